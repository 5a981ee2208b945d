//! Dataset ingestion, stratified cross-validation and F1 reporting.
//!
//! Experiments train a one-vs-rest model on k-1 folds, predict the held-out
//! fold, pool all held-out predictions and compute one metrics report on
//! the pooled vector, so rare classes that vanish from individual folds
//! still get well-defined scores.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{
    bag_of_words_baseline, predict, train_ovr, LabeledExample, DEFAULT_EPOCHS, DEFAULT_LAMBDA,
};
use crate::corpus::{build_vocabulary, tokenize, Sentence};
use crate::error::{Error, Result};
use crate::seed::{derive_seed, derive_seed_indexed};
use crate::sent2vec::embed_sentence;
use crate::word2vec::EmbeddingMatrix;

/// One labeled sentence of an evaluation dataset.
#[derive(Debug, Clone)]
pub struct DatasetExample {
    pub tokens: Vec<String>,
    pub label: String,
}

/// A labeled dataset with its declared, ordered label set.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub name: String,
    pub examples: Vec<DatasetExample>,
    pub label_set: Vec<String>,
}

impl LabeledDataset {
    /// Instances per label, in label-set order.
    pub fn support(&self) -> Vec<(String, u64)> {
        self.label_set
            .iter()
            .map(|l| {
                (
                    l.clone(),
                    self.examples.iter().filter(|e| &e.label == l).count() as u64,
                )
            })
            .collect()
    }
}

/// Loads a TSV dataset: one `label<TAB>sentence text` line per example.
///
/// A `#labels:` header comment may declare the label set and order, either
/// as bare letters (`#labels: p,n`) or with full-word aliases
/// (`#labels: p=positive,n=negative`). When `label_set` is `None` and no
/// header is present, labels are collected in order of first appearance.
pub fn load_dataset(path: &Path, label_set: Option<&[String]>) -> Result<LabeledDataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    let mut declared: Option<Vec<String>> = label_set.map(|l| l.to_vec());
    let mut aliases: HashMap<String, String> = HashMap::new();
    let mut inferred: Vec<String> = Vec::new();
    let mut examples = Vec::new();

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#labels:") {
            let mut header_set = Vec::new();
            for item in rest.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    continue;
                }
                match item.split_once('=') {
                    Some((short, long)) => {
                        let short = short.trim().to_string();
                        aliases.insert(long.trim().to_string(), short.clone());
                        header_set.push(short);
                    }
                    None => header_set.push(item.to_string()),
                }
            }
            if header_set.is_empty() {
                return Err(Error::parse(path, line_no, "empty #labels: header"));
            }
            if declared.is_none() {
                declared = Some(header_set);
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }

        let (raw_label, sentence) = line.split_once('\t').ok_or_else(|| {
            Error::parse(path, line_no, "expected \"label<TAB>sentence text\"")
        })?;
        let raw_label = raw_label.trim();
        let label = aliases
            .get(raw_label)
            .cloned()
            .unwrap_or_else(|| raw_label.to_string());

        match &declared {
            Some(set) => {
                if !set.contains(&label) {
                    return Err(Error::UnknownLabel {
                        label: label.clone(),
                        expected: set.clone(),
                    });
                }
            }
            None => {
                if !inferred.contains(&label) {
                    inferred.push(label.clone());
                }
            }
        }
        examples.push(DatasetExample {
            tokens: tokenize(sentence),
            label,
        });
    }

    if examples.is_empty() {
        return Err(Error::parse(path, 1, "dataset has no examples"));
    }
    let label_set = declared.unwrap_or(inferred);
    Ok(LabeledDataset {
        name,
        examples,
        label_set,
    })
}

/// Maps every example index to a fold id in `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: Vec<usize>,
    pub seed: u64,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len())
            .filter(|&i| self.assignment[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.k];
        for &f in &self.assignment {
            sizes[f] += 1;
        }
        sizes
    }
}

fn validate_k(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidConfig("fold count must be >= 2".into()));
    }
    if n < k {
        return Err(Error::InvalidConfig(format!(
            "dataset of {n} examples cannot be split into {k} folds"
        )));
    }
    Ok(())
}

/// Stratified fold assignment: within every label the per-fold counts
/// differ by at most one, and label remainders are dealt to the currently
/// smallest folds so overall fold sizes also differ by at most one.
pub fn stratified_kfold(labels: &[String], k: usize, seed: u64) -> Result<FoldAssignment> {
    validate_k(labels.len(), k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut label_order: Vec<&String> = Vec::new();
    let mut groups: HashMap<&String, Vec<usize>> = HashMap::new();
    for (i, label) in labels.iter().enumerate() {
        if !groups.contains_key(label) {
            label_order.push(label);
        }
        groups.entry(label).or_default().push(i);
    }

    let mut assignment = vec![0usize; labels.len()];
    let mut totals = vec![0usize; k];
    for label in label_order {
        let mut indices = groups.remove(label).unwrap();
        indices.shuffle(&mut rng);
        let base = indices.len() / k;
        let remainder = indices.len() % k;

        let mut fold_order: Vec<usize> = (0..k).collect();
        fold_order.sort_by_key(|&f| (totals[f], f));

        let mut cursor = 0;
        for (rank, &fold) in fold_order.iter().enumerate() {
            let take = base + usize::from(rank < remainder);
            for &example in &indices[cursor..cursor + take] {
                assignment[example] = fold;
            }
            totals[fold] += take;
            cursor += take;
        }
    }
    Ok(FoldAssignment {
        k,
        assignment,
        seed,
    })
}

/// Plain shuffled fold assignment without stratification.
pub fn shuffled_kfold(n: usize, k: usize, seed: u64) -> Result<FoldAssignment> {
    validate_k(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut rng);
    let mut assignment = vec![0usize; n];
    for (rank, &i) in indices.iter().enumerate() {
        assignment[i] = rank % k;
    }
    Ok(FoldAssignment {
        k,
        assignment,
        seed,
    })
}

/// Per-class F1 plus the micro/macro/weighted aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub classes: Vec<String>,
    pub per_class_f1: Vec<f64>,
    pub support: Vec<u64>,
    pub micro_f: f64,
    pub macro_f: f64,
    pub weighted_f: f64,
    pub degenerate_vector_count: usize,
}

impl MetricsReport {
    pub fn f1_of(&self, label: &str) -> Option<f64> {
        self.classes
            .iter()
            .position(|c| c == label)
            .map(|i| self.per_class_f1[i])
    }

    pub fn support_of(&self, label: &str) -> Option<u64> {
        self.classes
            .iter()
            .position(|c| c == label)
            .map(|i| self.support[i])
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn f1_from_counts(tp: u64, fp: u64, fn_: u64) -> f64 {
    let precision = ratio(tp as f64, (tp + fp) as f64);
    let recall = ratio(tp as f64, (tp + fn_) as f64);
    ratio(2.0 * precision * recall, precision + recall)
}

/// Computes per-class F1 (`2PR/(P+R)`, any 0/0 ratio defined as 0), micro-F
/// from globally pooled counts, macro-F as the unweighted mean over
/// `label_set`, and weighted-F as the support-weighted mean.
pub fn f1_scores(
    y_true: &[String],
    y_pred: &[String],
    label_set: &[String],
) -> Result<MetricsReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            true_len: y_true.len(),
            pred_len: y_pred.len(),
        });
    }
    for label in y_true.iter().chain(y_pred) {
        if !label_set.contains(label) {
            return Err(Error::UnknownLabel {
                label: label.clone(),
                expected: label_set.to_vec(),
            });
        }
    }

    let mut per_class_f1 = Vec::with_capacity(label_set.len());
    let mut support = Vec::with_capacity(label_set.len());
    let mut pooled_tp = 0u64;
    let mut pooled_fp = 0u64;
    let mut pooled_fn = 0u64;

    for class in label_set {
        let mut tp = 0u64;
        let mut fp = 0u64;
        let mut fn_ = 0u64;
        for (t, p) in y_true.iter().zip(y_pred) {
            match (t == class, p == class) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fn_ += 1,
                (false, false) => {}
            }
        }
        per_class_f1.push(f1_from_counts(tp, fp, fn_));
        support.push(tp + fn_);
        pooled_tp += tp;
        pooled_fp += fp;
        pooled_fn += fn_;
    }

    let micro_f = f1_from_counts(pooled_tp, pooled_fp, pooled_fn);
    let macro_f = ratio(per_class_f1.iter().sum(), label_set.len() as f64);
    let total_support: u64 = support.iter().sum();
    let weighted_f = ratio(
        per_class_f1
            .iter()
            .zip(&support)
            .map(|(f, &s)| f * s as f64)
            .sum(),
        total_support as f64,
    );

    Ok(MetricsReport {
        classes: label_set.to_vec(),
        per_class_f1,
        support,
        micro_f,
        macro_f,
        weighted_f,
        degenerate_vector_count: 0,
    })
}

/// F1 of class `"x"` after collapsing all other labels into one rest class.
pub fn x_vs_rest_score(y_true: &[String], y_pred: &[String]) -> f64 {
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    for (t, p) in y_true.iter().zip(y_pred) {
        match (t == "x", p == "x") {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    f1_from_counts(tp, fp, fn_)
}

/// SVM hyperparameters for an experiment.
#[derive(Debug, Clone)]
pub struct ClassifierConfig {
    pub lambda: f64,
    pub epochs: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            lambda: DEFAULT_LAMBDA,
            epochs: DEFAULT_EPOCHS,
        }
    }
}

/// Feature construction for an experiment.
pub enum Featurizer<'a> {
    /// Mean word vectors from a trained or loaded embedding matrix.
    SentenceVectors(&'a EmbeddingMatrix),
    /// Unigram counts over a vocabulary built from the whole dataset.
    BagOfWords,
}

/// Pooled cross-validation outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub dataset: String,
    pub report: MetricsReport,
    pub y_true: Vec<String>,
    /// Held-out prediction per dataset example, index-aligned.
    pub y_pred: Vec<String>,
    /// F1 of class `x` against everything else, when `x` is in the label set.
    pub x_vs_rest_f: Option<f64>,
    pub k: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl ExperimentResult {
    /// Plain-text table plus a machine-readable `key=value` block.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "dataset: {}  examples: {}  folds: {}  stratified: {}  seed: {}",
            self.dataset,
            self.y_true.len(),
            self.k,
            if self.stratified { "yes" } else { "no" },
            self.seed
        );
        let _ = writeln!(out, "class  support  f1");
        for ((class, &f1), &support) in self
            .report
            .classes
            .iter()
            .zip(&self.report.per_class_f1)
            .zip(&self.report.support)
        {
            let _ = writeln!(out, "{class:<6} {support:<8} {f1:.4}");
        }
        let _ = writeln!(out, "micro_f={:.6}", self.report.micro_f);
        let _ = writeln!(out, "macro_f={:.6}", self.report.macro_f);
        let _ = writeln!(out, "weighted_f={:.6}", self.report.weighted_f);
        let _ = writeln!(
            out,
            "degenerate_vectors={}",
            self.report.degenerate_vector_count
        );
        if let Some(x) = self.x_vs_rest_f {
            let _ = writeln!(out, "x_vs_rest_f={x:.6}");
        }
        out
    }
}

/// K-fold cross-validation over prebuilt feature vectors: train one-vs-rest
/// on k-1 folds, predict the held-out fold, pool all held-out predictions
/// and score them once.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    dataset_name: &str,
    features: &[Vec<f64>],
    labels: &[String],
    label_set: &[String],
    config: &ClassifierConfig,
    k: usize,
    seed: u64,
    stratify: bool,
) -> Result<ExperimentResult> {
    if features.len() != labels.len() {
        return Err(Error::LengthMismatch {
            true_len: labels.len(),
            pred_len: features.len(),
        });
    }
    let fold_seed = derive_seed(seed, "folds");
    let folds = if stratify {
        stratified_kfold(labels, k, fold_seed)?
    } else {
        shuffled_kfold(labels.len(), k, fold_seed)?
    };

    let mut y_pred = vec![String::new(); labels.len()];
    for fold in 0..k {
        let train: Vec<LabeledExample> = folds
            .train_indices(fold)
            .into_iter()
            .map(|i| LabeledExample {
                features: features[i].clone(),
                label: labels[i].clone(),
            })
            .collect();
        let model = train_ovr(
            &train,
            label_set,
            config.lambda,
            config.epochs,
            derive_seed_indexed(seed, "fold-train", fold as u64),
        )?;
        for i in folds.test_indices(fold) {
            y_pred[i] = predict(&model, &features[i])?.to_string();
        }
    }

    let mut report = f1_scores(labels, &y_pred, label_set)?;
    report.degenerate_vector_count = features
        .iter()
        .filter(|f| f.iter().all(|&v| v == 0.0))
        .count();
    let x_vs_rest_f = label_set
        .iter()
        .any(|l| l == "x")
        .then(|| x_vs_rest_score(labels, &y_pred));

    Ok(ExperimentResult {
        dataset: dataset_name.to_string(),
        report,
        y_true: labels.to_vec(),
        y_pred,
        x_vs_rest_f,
        k,
        seed,
        stratified: stratify,
    })
}

/// Featurizes `dataset` and runs [`cross_validate`].
pub fn run_experiment(
    dataset: &LabeledDataset,
    featurizer: Featurizer<'_>,
    config: &ClassifierConfig,
    k: usize,
    seed: u64,
    stratify: bool,
) -> Result<ExperimentResult> {
    let features: Vec<Vec<f64>> = match featurizer {
        Featurizer::SentenceVectors(matrix) => dataset
            .examples
            .iter()
            .map(|e| embed_sentence(&e.tokens, matrix).values)
            .collect(),
        Featurizer::BagOfWords => {
            let sentences: Vec<Sentence> = dataset
                .examples
                .iter()
                .enumerate()
                .map(|(i, e)| Sentence {
                    doc_id: dataset.name.clone(),
                    index: i,
                    tokens: e.tokens.clone(),
                })
                .collect();
            let vocab = build_vocabulary(&sentences, 1)?;
            dataset
                .examples
                .iter()
                .map(|e| bag_of_words_baseline(&e.tokens, &vocab).to_dense())
                .collect()
        }
    };
    let labels: Vec<String> = dataset.examples.iter().map(|e| e.label.clone()).collect();
    cross_validate(
        &dataset.name,
        &features,
        &labels,
        &dataset.label_set,
        config,
        k,
        seed,
        stratify,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn perfect_predictions_score_one() {
        let y = labels(&["a", "b", "a"]);
        let set = labels(&["a", "b"]);
        let r = f1_scores(&y, &y, &set).unwrap();
        assert_eq!(r.micro_f, 1.0);
        assert_eq!(r.macro_f, 1.0);
        assert_eq!(r.weighted_f, 1.0);
        assert!(r.per_class_f1.iter().all(|&f| f == 1.0));
    }

    #[test]
    fn hand_counted_two_class_case() {
        let y_true = labels(&["a", "a", "b"]);
        let y_pred = labels(&["a", "b", "b"]);
        let set = labels(&["a", "b"]);
        let r = f1_scores(&y_true, &y_pred, &set).unwrap();
        assert!((r.f1_of("a").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.f1_of("b").unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.micro_f - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.macro_f - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.weighted_f - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.support_of("a"), Some(2));
    }

    #[test]
    fn absent_class_contributes_zero_to_macro() {
        let y_true = labels(&["a", "a"]);
        let y_pred = labels(&["a", "a"]);
        let set = labels(&["a", "c"]);
        let r = f1_scores(&y_true, &y_pred, &set).unwrap();
        assert_eq!(r.f1_of("c"), Some(0.0));
        assert!((r.macro_f - 0.5).abs() < 1e-12);
        assert_eq!(r.weighted_f, 1.0);
    }

    #[test]
    fn mismatched_lengths_error() {
        let set = labels(&["a"]);
        assert!(matches!(
            f1_scores(&labels(&["a", "a"]), &labels(&["a"]), &set),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn x_vs_rest_hand_counted() {
        let y_true = labels(&["x", "x", "o", "n"]);
        assert_eq!(x_vs_rest_score(&y_true, &y_true), 1.0);

        // Everything predicted x with 98 of 100 truly x:
        // tp=98, fp=2, fn=0 -> F1 = 2*0.98/1.98.
        let mut t = vec!["x".to_string(); 98];
        t.push("o".to_string());
        t.push("n".to_string());
        let p = vec!["x".to_string(); 100];
        assert!((x_vs_rest_score(&t, &p) - 196.0 / 198.0).abs() < 1e-12);
    }

    #[test]
    fn kfold_singleton_folds() {
        let y: Vec<String> = (0..10).map(|i| format!("c{}", i % 2)).collect();
        let folds = stratified_kfold(&y, 10, 3).unwrap();
        assert!(folds.fold_sizes().iter().all(|&s| s == 1));
    }

    #[test]
    fn kfold_stratifies_eight_two() {
        let mut y = vec!["a".to_string(); 8];
        y.extend(vec!["b".to_string(); 2]);
        let folds = stratified_kfold(&y, 2, 9).unwrap();
        for fold in 0..2 {
            let test = folds.test_indices(fold);
            let a = test.iter().filter(|&&i| y[i] == "a").count();
            let b = test.iter().filter(|&&i| y[i] == "b").count();
            assert_eq!(a, 4);
            assert_eq!(b, 1);
        }
    }

    #[test]
    fn kfold_is_deterministic_and_validates() {
        let y: Vec<String> = (0..25).map(|i| format!("c{}", i % 3)).collect();
        assert_eq!(
            stratified_kfold(&y, 5, 11).unwrap(),
            stratified_kfold(&y, 5, 11).unwrap()
        );
        assert!(stratified_kfold(&y[..3], 10, 1).is_err());
        assert!(stratified_kfold(&y, 1, 1).is_err());
    }

    #[test]
    fn dataset_loading_and_label_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.tsv");
        fs::write(&path, "p\tGreat results here.\nn\tThis fails badly.\np\tIt works.\n").unwrap();
        let set = labels(&["p", "n"]);
        let ds = load_dataset(&path, Some(&set)).unwrap();
        assert_eq!(ds.examples.len(), 3);
        assert_eq!(ds.examples[0].tokens, vec!["great", "results", "here"]);
        assert_eq!(ds.support(), vec![("p".to_string(), 2), ("n".to_string(), 1)]);

        fs::write(&path, "q\tMystery label.\n").unwrap();
        match load_dataset(&path, Some(&set)) {
            Err(Error::UnknownLabel { label, .. }) => assert_eq!(label, "q"),
            other => panic!("expected unknown label, got {other:?}"),
        }

        fs::write(&path, "no tab separator\n").unwrap();
        assert!(matches!(
            load_dataset(&path, Some(&set)),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn dataset_header_maps_full_words() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.tsv");
        fs::write(
            &path,
            "#labels: p=positive,n=negative\npositive\tGood stuff.\nn\tBad stuff.\n",
        )
        .unwrap();
        let ds = load_dataset(&path, None).unwrap();
        assert_eq!(ds.label_set, labels(&["p", "n"]));
        assert_eq!(ds.examples[0].label, "p");
        assert_eq!(ds.examples[1].label, "n");
    }

    #[test]
    fn dataset_infers_labels_in_first_appearance_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.tsv");
        fs::write(&path, "o\tObjective one.\np\tPositive one.\no\tObjective two.\n").unwrap();
        let ds = load_dataset(&path, None).unwrap();
        assert_eq!(ds.label_set, labels(&["o", "p"]));
    }

    proptest! {
        #[test]
        fn micro_f_equals_accuracy(
            pairs in proptest::collection::vec((0usize..4, 0usize..4), 1..60)
        ) {
            let set: Vec<String> = (0..4).map(|i| format!("c{i}")).collect();
            let y_true: Vec<String> = pairs.iter().map(|&(t, _)| format!("c{t}")).collect();
            let y_pred: Vec<String> = pairs.iter().map(|&(_, p)| format!("c{p}")).collect();
            let r = f1_scores(&y_true, &y_pred, &set).unwrap();
            let accuracy = pairs.iter().filter(|&&(t, p)| t == p).count() as f64
                / pairs.len() as f64;
            prop_assert!((r.micro_f - accuracy).abs() < 1e-12);
            let max = r.per_class_f1.iter().cloned().fold(0.0f64, f64::max);
            let min = r.per_class_f1.iter().cloned().fold(1.0f64, f64::min);
            prop_assert!(r.macro_f <= max + 1e-12);
            prop_assert!(r.macro_f >= min - 1e-12);
        }

        #[test]
        fn fold_assignment_invariants(
            class_sizes in proptest::collection::vec(1usize..12, 1..4),
            k in 2usize..6,
            seed in 0u64..1000,
        ) {
            let y: Vec<String> = class_sizes
                .iter()
                .enumerate()
                .flat_map(|(c, &n)| vec![format!("c{c}"); n])
                .collect();
            prop_assume!(y.len() >= k);
            let folds = stratified_kfold(&y, k, seed).unwrap();
            // Partition: every index in exactly one fold.
            prop_assert!(folds.assignment.iter().all(|&f| f < k));
            // Overall sizes differ by at most one.
            let sizes = folds.fold_sizes();
            let max = sizes.iter().max().unwrap();
            let min = sizes.iter().min().unwrap();
            prop_assert!(max - min <= 1);
            // Per-label counts differ by at most one.
            for c in 0..class_sizes.len() {
                let label = format!("c{c}");
                let counts: Vec<usize> = (0..k)
                    .map(|f| {
                        folds
                            .test_indices(f)
                            .iter()
                            .filter(|&&i| y[i] == label)
                            .count()
                    })
                    .collect();
                let cmax = counts.iter().max().unwrap();
                let cmin = counts.iter().min().unwrap();
                prop_assert!(cmax - cmin <= 1);
            }
        }
    }
}
