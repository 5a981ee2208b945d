//! Linear SVM classification with a one-vs-rest multiclass reduction.
//!
//! Binary models minimize the L2-regularized hinge loss
//! `(lambda/2)*||w||^2 + (1/m) * sum(max(0, 1 - y_i * (w.x_i + b)))`
//! by projected stochastic subgradient descent on the `1/(lambda*t)` step
//! schedule, returning the averaged iterate. The bias is trained as an
//! augmented coordinate (shrunk and projected together with `w`), which
//! keeps the aggressive early steps of the schedule bounded; the returned
//! model is still validated against the plain objective above and falls
//! back to the zero model if the average ever comes out worse.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::seed::derive_seed_indexed;

pub const DEFAULT_LAMBDA: f64 = 1e-4;
pub const DEFAULT_EPOCHS: usize = 50;

/// A feature vector with its class label.
#[derive(Debug, Clone)]
pub struct LabeledExample {
    pub features: Vec<f64>,
    pub label: String,
}

/// One-vs-rest linear model: one weight vector and bias per class, in
/// declared class order.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub classes: Vec<String>,
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Regularized hinge objective of `(w, b)` on the training set, with labels
/// mapped to +1 for `positive_label` and -1 otherwise.
pub fn hinge_objective(
    weights: &[f64],
    bias: f64,
    examples: &[LabeledExample],
    positive_label: &str,
    lambda: f64,
) -> f64 {
    let reg = 0.5 * lambda * dot(weights, weights);
    let mut hinge = 0.0;
    for ex in examples {
        let y = if ex.label == positive_label { 1.0 } else { -1.0 };
        hinge += (1.0 - y * (dot(weights, &ex.features) + bias)).max(0.0);
    }
    reg + hinge / examples.len() as f64
}

fn check_examples(examples: &[LabeledExample]) -> Result<usize> {
    let first = examples
        .first()
        .ok_or_else(|| Error::InvalidConfig("no training examples".into()))?;
    let dim = first.features.len();
    for ex in examples {
        if ex.features.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: ex.features.len(),
            });
        }
        if ex.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training features"));
        }
    }
    Ok(dim)
}

/// Trains one binary SVM with `positive_label` as the +1 class.
///
/// A set containing a single class does not error; the model degenerates to
/// a constant decision in favor of that class.
pub fn train_binary_svm(
    examples: &[LabeledExample],
    positive_label: &str,
    lambda: f64,
    epochs: usize,
    seed: u64,
) -> Result<(Vec<f64>, f64)> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidConfig("lambda must be > 0".into()));
    }
    if epochs < 1 {
        return Err(Error::InvalidConfig("epochs must be >= 1".into()));
    }
    let dim = check_examples(examples)?;
    let m = examples.len();

    let mut w = vec![0.0f64; dim];
    let mut b = 0.0f64;
    let mut w_sum = vec![0.0f64; dim];
    let mut b_sum = 0.0f64;
    let radius = 1.0 / lambda.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..m).collect();
    let mut t = 0u64;

    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let ex = &examples[i];
            let y = if ex.label == positive_label { 1.0 } else { -1.0 };
            let margin = y * (dot(&w, &ex.features) + b);

            let scale = 1.0 - 1.0 / t as f64;
            for v in &mut w {
                *v *= scale;
            }
            b *= scale;
            if margin < 1.0 {
                for (v, x) in w.iter_mut().zip(&ex.features) {
                    *v += eta * y * x;
                }
                b += eta * y;
            }

            // Project (w, b) onto the ball of radius 1/sqrt(lambda).
            let norm = (dot(&w, &w) + b * b).sqrt();
            if norm > radius {
                let shrink = radius / norm;
                for v in &mut w {
                    *v *= shrink;
                }
                b *= shrink;
            }

            for (s, v) in w_sum.iter_mut().zip(&w) {
                *s += v;
            }
            b_sum += b;
        }
    }

    let steps = t as f64;
    let avg_w: Vec<f64> = w_sum.into_iter().map(|v| v / steps).collect();
    let avg_b = b_sum / steps;

    let zero = vec![0.0f64; dim];
    if hinge_objective(&avg_w, avg_b, examples, positive_label, lambda)
        > hinge_objective(&zero, 0.0, examples, positive_label, lambda)
    {
        return Ok((zero, 0.0));
    }
    Ok((avg_w, avg_b))
}

/// Trains one binary model per label in `label_set` order.
pub fn train_ovr(
    examples: &[LabeledExample],
    label_set: &[String],
    lambda: f64,
    epochs: usize,
    seed: u64,
) -> Result<LinearModel> {
    if label_set.len() < 2 {
        return Err(Error::InvalidConfig(
            "one-vs-rest needs at least two labels".into(),
        ));
    }
    for ex in examples {
        if !label_set.contains(&ex.label) {
            return Err(Error::UnknownLabel {
                label: ex.label.clone(),
                expected: label_set.to_vec(),
            });
        }
    }
    let mut weights = Vec::with_capacity(label_set.len());
    let mut biases = Vec::with_capacity(label_set.len());
    for (class_index, class) in label_set.iter().enumerate() {
        let class_seed = derive_seed_indexed(seed, "ovr-class", class_index as u64);
        let (w, b) = train_binary_svm(examples, class, lambda, epochs, class_seed)?;
        weights.push(w);
        biases.push(b);
    }
    Ok(LinearModel {
        classes: label_set.to_vec(),
        weights,
        biases,
        lambda,
        epochs,
        seed,
    })
}

/// Per-class decision values `w_c . x + b_c`.
pub fn decision_values(model: &LinearModel, features: &[f64]) -> Result<Vec<f64>> {
    let dim = model.weights.first().map_or(0, Vec::len);
    if features.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: features.len(),
        });
    }
    Ok(model
        .weights
        .iter()
        .zip(&model.biases)
        .map(|(w, b)| dot(w, features) + b)
        .collect())
}

/// Argmax of the decision values; ties go to the earliest declared class.
pub fn predict<'a>(model: &'a LinearModel, features: &[f64]) -> Result<&'a str> {
    let values = decision_values(model, features)?;
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    Ok(&model.classes[best])
}

/// Unigram count vector over the vocabulary; out-of-vocabulary tokens are
/// ignored. Entries are sorted by index.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub dim: usize,
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.dim];
        for &(i, v) in &self.entries {
            dense[i] = v;
        }
        dense
    }
}

/// Bag-of-words sanity baseline featurizer.
pub fn bag_of_words_baseline(tokens: &[String], vocab: &Vocabulary) -> SparseVector {
    let mut counts: std::collections::BTreeMap<usize, f64> = std::collections::BTreeMap::new();
    for token in tokens {
        if let Some(i) = vocab.index_of(token) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    SparseVector {
        dim: vocab.len(),
        entries: counts.into_iter().collect(),
    }
}

/// Writes the model file format: `classes:`, `dim:` and `lambda:` header
/// lines, then one `<class> <bias> <w1> ... <wD>` line per class.
pub fn save_model(model: &LinearModel, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |e| Error::io(path, e);
    let dim = model.weights.first().map_or(0, Vec::len);
    writeln!(out, "classes: {}", model.classes.join(",")).map_err(write)?;
    writeln!(out, "dim: {dim}").map_err(write)?;
    writeln!(out, "lambda: {:.8e}", model.lambda).map_err(write)?;
    for ((class, w), b) in model.classes.iter().zip(&model.weights).zip(&model.biases) {
        write!(out, "{class} {b:.8e}").map_err(write)?;
        for v in w {
            write!(out, " {v:.8e}").map_err(write)?;
        }
        writeln!(out).map_err(write)?;
    }
    out.flush().map_err(write)
}

/// Reads a model written by [`save_model`]. Training provenance that the
/// format does not carry (epochs, seed) is zeroed.
pub fn load_model(path: &Path) -> Result<LinearModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let mut expect_header = |prefix: &str| -> Result<String> {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, format!("missing {prefix} header")))?;
        line.strip_prefix(prefix)
            .map(|rest| rest.trim().to_string())
            .ok_or_else(|| {
                Error::parse(path, idx + 1, format!("expected {prefix:?} header, got {line:?}"))
            })
    };

    let classes: Vec<String> = expect_header("classes:")?
        .split(',')
        .map(|c| c.trim().to_string())
        .filter(|c| !c.is_empty())
        .collect();
    let dim: usize = expect_header("dim:")?
        .parse()
        .map_err(|_| Error::parse(path, 2, "unparsable dim"))?;
    let lambda: f64 = expect_header("lambda:")?
        .parse()
        .map_err(|_| Error::parse(path, 3, "unparsable lambda"))?;
    if classes.is_empty() {
        return Err(Error::parse(path, 1, "no classes declared"));
    }

    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for (k, class) in classes.iter().enumerate() {
        let line_no = 4 + k;
        let (idx, line) = lines.next().ok_or_else(|| {
            Error::parse(path, line_no, format!("missing row for class {class:?}"))
        })?;
        let mut fields = line.split_whitespace();
        let got = fields.next().unwrap_or("");
        if got != class {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected class {class:?}, found {got:?}"),
            ));
        }
        let mut values: Vec<f64> = Vec::with_capacity(dim + 1);
        for field in fields {
            values.push(field.parse().map_err(|_| {
                Error::parse(path, idx + 1, format!("unparsable value {field:?}"))
            })?);
        }
        if values.len() != dim + 1 {
            return Err(Error::parse(
                path,
                idx + 1,
                format!("expected bias plus {dim} weights, found {}", values.len()),
            ));
        }
        biases.push(values[0]);
        weights.push(values[1..].to_vec());
    }

    Ok(LinearModel {
        classes,
        weights,
        biases,
        lambda,
        epochs: 0,
        seed: 0,
    })
}
