//! Polar subcorpus selection and polarity-specific embedding training.
//!
//! Sentences are matched against a lexicon of positive and negative phrases
//! by exact contiguous token-subsequence comparison. Strictly positive and
//! strictly negative matches form a balanced subcorpus (the majority class
//! is downsampled), from which ordinary skip-gram embeddings are trained.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::word2vec::{train_embeddings, EmbeddingMatrix, TrainingConfig};

/// Phrase lists for the two polarities: lowercase token sequences, disjoint
/// across polarities, no empty phrase.
#[derive(Debug, Clone)]
pub struct PolarLexicon {
    positive: Vec<Vec<String>>,
    negative: Vec<Vec<String>>,
}

/// How a sentence relates to the lexicon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarityMatch {
    Positive,
    Negative,
    /// Phrases of both polarities occur; excluded from the subcorpus.
    Both,
    None,
}

impl PolarLexicon {
    /// Builds a lexicon from phrase lists. Phrases are lowercased; empty
    /// phrases and overlap between the two lists are rejected.
    pub fn new(positive: Vec<Vec<String>>, negative: Vec<Vec<String>>) -> Result<Self> {
        let normalize = |phrases: Vec<Vec<String>>| -> Result<Vec<Vec<String>>> {
            let mut out = Vec::with_capacity(phrases.len());
            for phrase in phrases {
                if phrase.is_empty() || phrase.iter().any(|t| t.is_empty()) {
                    return Err(Error::InvalidConfig("empty phrase in lexicon".into()));
                }
                out.push(phrase.iter().map(|t| t.to_lowercase()).collect());
            }
            Ok(out)
        };
        let positive = normalize(positive)?;
        let negative = normalize(negative)?;
        for phrase in &positive {
            if negative.contains(phrase) {
                return Err(Error::InvalidConfig(format!(
                    "phrase {:?} appears in both polarities",
                    phrase.join(" ")
                )));
            }
        }
        Ok(PolarLexicon { positive, negative })
    }

    /// Parses the lexicon file format: `[positive]` / `[negative]` section
    /// headers, one space-separated phrase per line, `#` comments.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        let mut current: Option<&mut Vec<Vec<String>>> = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            match line {
                "[positive]" => current = Some(&mut positive),
                "[negative]" => current = Some(&mut negative),
                _ if line.starts_with('[') => {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("unknown section {line:?}"),
                    ));
                }
                _ => {
                    let section = current.as_deref_mut().ok_or_else(|| {
                        Error::parse(path, line_no, "phrase before any [positive]/[negative] section")
                    })?;
                    section.push(line.split_whitespace().map(str::to_string).collect());
                }
            }
        }
        PolarLexicon::new(positive, negative)
    }

    /// Small default phrase list for tests and smoke runs. It is a
    /// convenience list only, not a curated citation-sentiment lexicon;
    /// real experiments should load one via [`PolarLexicon::from_file`].
    pub fn builtin() -> Self {
        let phrase = |s: &str| s.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        let positive = [
            "outperform",
            "outperforms",
            "outperformed",
            "improve",
            "improves",
            "improved",
            "improvement",
            "effective",
            "efficient",
            "better",
            "best",
            "successful",
            "successfully",
            "robust",
            "accurate",
            "state of the art",
            "well suited",
            "gain",
            "gains",
            "benefit",
            "benefits",
        ];
        let negative = [
            "fail",
            "fails",
            "failed",
            "failure",
            "worse",
            "worst",
            "poor",
            "poorly",
            "weak",
            "weaker",
            "unable",
            "difficult",
            "limited",
            "limitation",
            "limitations",
            "drawback",
            "drawbacks",
            "suffer",
            "suffers",
            "inferior",
            "error prone",
        ];
        PolarLexicon::new(
            positive.iter().map(|p| phrase(p)).collect(),
            negative.iter().map(|p| phrase(p)).collect(),
        )
        .expect("builtin lexicon is well-formed")
    }

    pub fn positive_phrases(&self) -> &[Vec<String>] {
        &self.positive
    }

    pub fn negative_phrases(&self) -> &[Vec<String>] {
        &self.negative
    }
}

fn contains_phrase(tokens: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty()
        && phrase.len() <= tokens.len()
        && tokens.windows(phrase.len()).any(|w| w == phrase)
}

/// Matches a tokenized sentence against the lexicon. A phrase matches only
/// as a whole-token contiguous subsequence, so "outperform" does not match
/// the token "outperformance".
pub fn match_polarity(sentence: &Sentence, lexicon: &PolarLexicon) -> PolarityMatch {
    let pos = lexicon
        .positive
        .iter()
        .any(|p| contains_phrase(&sentence.tokens, p));
    let neg = lexicon
        .negative
        .iter()
        .any(|p| contains_phrase(&sentence.tokens, p));
    match (pos, neg) {
        (true, true) => PolarityMatch::Both,
        (true, false) => PolarityMatch::Positive,
        (false, true) => PolarityMatch::Negative,
        (false, false) => PolarityMatch::None,
    }
}

/// Equal-sized positive and negative sentence lists.
#[derive(Debug, Clone)]
pub struct PolarSubcorpus {
    pub positive: Vec<Sentence>,
    pub negative: Vec<Sentence>,
}

fn downsample(mut sentences: Vec<Sentence>, target: usize, rng: &mut ChaCha8Rng) -> Vec<Sentence> {
    if sentences.len() <= target {
        return sentences;
    }
    let mut picked = rand::seq::index::sample(rng, sentences.len(), target).into_vec();
    picked.sort_unstable();
    let mut keep = vec![false; sentences.len()];
    for i in picked {
        keep[i] = true;
    }
    let mut it = keep.iter();
    sentences.retain(|_| *it.next().unwrap());
    sentences
}

/// Collects strictly positive and strictly negative sentences and balances
/// the classes by seeded uniform downsampling of the majority, preserving
/// corpus order. Sentences matching both polarities are dropped as
/// ambiguous.
pub fn select_polar_sentences(
    corpus: &[Sentence],
    lexicon: &PolarLexicon,
    seed: u64,
) -> Result<PolarSubcorpus> {
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for sentence in corpus {
        match match_polarity(sentence, lexicon) {
            PolarityMatch::Positive => positive.push(sentence.clone()),
            PolarityMatch::Negative => negative.push(sentence.clone()),
            PolarityMatch::Both | PolarityMatch::None => {}
        }
    }
    if positive.is_empty() {
        return Err(Error::EmptyPolarityClass("positive"));
    }
    if negative.is_empty() {
        return Err(Error::EmptyPolarityClass("negative"));
    }
    let target = positive.len().min(negative.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let positive = downsample(positive, target, &mut rng);
    let negative = downsample(negative, target, &mut rng);
    Ok(PolarSubcorpus { positive, negative })
}

/// Trains ordinary skip-gram embeddings on the union of the balanced polar
/// subcorpus (the polarity-specific embedding scheme).
pub fn train_ps_embeddings(
    subcorpus: &PolarSubcorpus,
    config: &TrainingConfig,
) -> Result<EmbeddingMatrix> {
    let mut combined =
        Vec::with_capacity(subcorpus.positive.len() + subcorpus.negative.len());
    combined.extend_from_slice(&subcorpus.positive);
    combined.extend_from_slice(&subcorpus.negative);
    train_embeddings(&combined, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(text: &str) -> Sentence {
        Sentence {
            doc_id: "d".into(),
            index: 0,
            tokens: text.split_whitespace().map(str::to_string).collect(),
        }
    }

    fn tiny_lexicon() -> PolarLexicon {
        PolarLexicon::new(
            vec![
                vec!["outperform".into()],
                vec!["state".into(), "of".into(), "the".into(), "art".into()],
            ],
            vec![vec!["fail".into()], vec!["worse".into()]],
        )
        .unwrap()
    }

    #[test]
    fn matches_positive_negative_both_none() {
        let lex = tiny_lexicon();
        assert_eq!(
            match_polarity(&sent("these models outperform the baseline"), &lex),
            PolarityMatch::Positive
        );
        assert_eq!(
            match_polarity(&sent("the models fail badly"), &lex),
            PolarityMatch::Negative
        );
        assert_eq!(
            match_polarity(&sent("they outperform some but fail elsewhere"), &lex),
            PolarityMatch::Both
        );
        assert_eq!(
            match_polarity(&sent("nothing to see here"), &lex),
            PolarityMatch::None
        );
    }

    #[test]
    fn matching_respects_token_boundaries() {
        let lex = tiny_lexicon();
        assert_eq!(
            match_polarity(&sent("outperformance is not a phrase match"), &lex),
            PolarityMatch::None
        );
        assert_eq!(
            match_polarity(&sent("a state of the art system"), &lex),
            PolarityMatch::Positive
        );
        assert_eq!(
            match_polarity(&sent("state of art is not the phrase"), &lex),
            PolarityMatch::None
        );
    }

    #[test]
    fn selection_balances_classes() {
        let lex = tiny_lexicon();
        let mut corpus = Vec::new();
        for i in 0..10 {
            let mut s = sent("models outperform baselines here");
            s.index = i;
            corpus.push(s);
        }
        for i in 0..4 {
            let mut s = sent("models fail on this data");
            s.index = 10 + i;
            corpus.push(s);
        }
        let sub = select_polar_sentences(&corpus, &lex, 5).unwrap();
        assert_eq!(sub.positive.len(), 4);
        assert_eq!(sub.negative.len(), 4);
        // Corpus order is preserved within the downsampled class.
        for pair in sub.positive.windows(2) {
            assert!(pair[0].index < pair[1].index);
        }
    }

    #[test]
    fn selection_is_deterministic_and_errors_on_empty_class() {
        let lex = tiny_lexicon();
        let corpus: Vec<Sentence> = (0..8)
            .map(|i| {
                let mut s = if i % 2 == 0 {
                    sent("they outperform everything")
                } else {
                    sent("they fail everywhere")
                };
                s.index = i;
                s
            })
            .collect();
        let a = select_polar_sentences(&corpus, &lex, 7).unwrap();
        let b = select_polar_sentences(&corpus, &lex, 7).unwrap();
        assert_eq!(a.positive, b.positive);
        assert_eq!(a.negative, b.negative);

        let only_positive = vec![sent("models outperform baselines")];
        assert!(matches!(
            select_polar_sentences(&only_positive, &lex, 1),
            Err(Error::EmptyPolarityClass("negative"))
        ));
    }

    #[test]
    fn lexicon_rejects_overlap_and_empty_phrases() {
        assert!(PolarLexicon::new(vec![vec!["good".into()]], vec![vec!["good".into()]]).is_err());
        assert!(PolarLexicon::new(vec![vec![]], vec![]).is_err());
    }

    #[test]
    fn lexicon_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.txt");
        std::fs::write(
            &path,
            "# comment\n[positive]\noutperform\nstate of the art  # trailing comment\n\n[negative]\nfail\n",
        )
        .unwrap();
        let lex = PolarLexicon::from_file(&path).unwrap();
        assert_eq!(lex.positive_phrases().len(), 2);
        assert_eq!(lex.negative_phrases().len(), 1);
        assert_eq!(lex.positive_phrases()[1].len(), 4);

        std::fs::write(&path, "phrase without section\n").unwrap();
        assert!(matches!(
            PolarLexicon::from_file(&path),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn builtin_lexicon_is_well_formed() {
        let lex = PolarLexicon::builtin();
        assert!(!lex.positive_phrases().is_empty());
        assert!(!lex.negative_phrases().is_empty());
    }

    #[test]
    fn ps_training_covers_subcorpus_vocabulary() {
        let lex = tiny_lexicon();
        let corpus: Vec<Sentence> = (0..20)
            .map(|i| {
                let mut s = if i % 2 == 0 {
                    sent("these systems outperform prior systems clearly")
                } else {
                    sent("these systems fail on noisy data")
                };
                s.index = i;
                s
            })
            .collect();
        let sub = select_polar_sentences(&corpus, &lex, 3).unwrap();
        let config = TrainingConfig {
            dim: 8,
            min_count: 1,
            epochs: 2,
            seed: 11,
            ..TrainingConfig::default()
        };
        let matrix = train_ps_embeddings(&sub, &config).unwrap();
        assert!(matrix.vocab().index_of("outperform").is_some());
        assert!(matrix.vocab().index_of("fail").is_some());
        assert!(matrix.all_finite());

        let again = train_ps_embeddings(&sub, &config).unwrap();
        assert_eq!(matrix.vector("systems"), again.vector("systems"));
    }
}
