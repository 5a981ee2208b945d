//! Sentence vectors as the arithmetic mean of word vectors.
//!
//! A sentence maps to `(1/n) * sum(vector(token_i))` over its in-vocabulary
//! tokens. Out-of-vocabulary tokens are skipped and do not count toward `n`;
//! a sentence with no known token yields the zero vector and is flagged
//! degenerate so downstream evaluation can report it instead of aborting.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::corpus::Sentence;
use crate::error::{Error, Result};
use crate::word2vec::EmbeddingMatrix;

/// Mean word vector of a sentence, with coverage bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceVector {
    pub values: Vec<f64>,
    /// Tokens found in the vocabulary (the averaging denominator).
    pub n_in_vocab: usize,
    pub n_total: usize,
}

impl SentenceVector {
    /// True when no token was in the vocabulary and `values` is all zero.
    pub fn is_degenerate(&self) -> bool {
        self.n_in_vocab == 0
    }
}

/// Averages the word vectors of the in-vocabulary tokens. Repeated tokens
/// contribute once per occurrence.
pub fn embed_sentence(tokens: &[String], matrix: &EmbeddingMatrix) -> SentenceVector {
    let mut values = vec![0.0f64; matrix.dim()];
    let mut n_in_vocab = 0usize;
    for token in tokens {
        if let Some(index) = matrix.vocab().index_of(token) {
            for (acc, v) in values.iter_mut().zip(matrix.vector_at(index)) {
                *acc += v;
            }
            n_in_vocab += 1;
        }
    }
    if n_in_vocab > 0 {
        let inv = 1.0 / n_in_vocab as f64;
        for v in &mut values {
            *v *= inv;
        }
    }
    SentenceVector {
        values,
        n_in_vocab,
        n_total: tokens.len(),
    }
}

/// Order-preserving [`embed_sentence`] over a corpus.
pub fn embed_corpus(sentences: &[Sentence], matrix: &EmbeddingMatrix) -> Vec<SentenceVector> {
    sentences
        .iter()
        .map(|s| embed_sentence(&s.tokens, matrix))
        .collect()
}

/// Diagnostic dump: one line per sentence,
/// `"<doc_id>:<index> <n_in_vocab> <v1> ... <v_dim>"`.
pub fn write_vector_dump(
    path: &Path,
    sentences: &[Sentence],
    vectors: &[SentenceVector],
) -> Result<()> {
    if sentences.len() != vectors.len() {
        return Err(Error::LengthMismatch {
            true_len: sentences.len(),
            pred_len: vectors.len(),
        });
    }
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for (sentence, vector) in sentences.iter().zip(vectors) {
        write!(
            out,
            "{}:{} {}",
            sentence.doc_id, sentence.index, vector.n_in_vocab
        )
        .map_err(|e| Error::io(path, e))?;
        for v in &vector.values {
            write!(out, " {v:.8e}").map_err(|e| Error::io(path, e))?;
        }
        writeln!(out).map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;
    use proptest::prelude::*;

    fn matrix(tokens: &[&str], dim: usize, rows: Vec<f64>) -> EmbeddingMatrix {
        let vocab = Vocabulary::from_tokens(tokens.iter().map(|t| t.to_string()).collect()).unwrap();
        EmbeddingMatrix::new(vocab, dim, rows, None).unwrap()
    }

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn single_token_is_identity() {
        let m = matrix(&["w"], 3, vec![0.25, -1.5, 2.0]);
        let v = embed_sentence(&toks(&["w"]), &m);
        assert_eq!(v.values, vec![0.25, -1.5, 2.0]);
        assert_eq!(v.n_in_vocab, 1);
        assert_eq!(v.n_total, 1);
        assert!(!v.is_degenerate());
    }

    #[test]
    fn two_tokens_average() {
        let m = matrix(&["a", "b"], 2, vec![1.0, 0.0, 0.0, 1.0]);
        let v = embed_sentence(&toks(&["a", "b"]), &m);
        assert_eq!(v.values, vec![0.5, 0.5]);
        assert_eq!(v.n_in_vocab, 2);
    }

    #[test]
    fn all_oov_is_degenerate_zero() {
        let m = matrix(&["a"], 2, vec![1.0, 2.0]);
        let v = embed_sentence(&toks(&["x", "y"]), &m);
        assert!(v.is_degenerate());
        assert_eq!(v.values, vec![0.0, 0.0]);
        assert_eq!(v.n_in_vocab, 0);
        assert_eq!(v.n_total, 2);
    }

    #[test]
    fn oov_tokens_shrink_the_denominator() {
        let m = matrix(&["a", "b"], 1, vec![2.0, 4.0]);
        let v = embed_sentence(&toks(&["a", "zz", "b"]), &m);
        assert_eq!(v.values, vec![3.0]);
        assert_eq!(v.n_in_vocab, 2);
        assert_eq!(v.n_total, 3);
    }

    #[test]
    fn embed_corpus_maps_in_order() {
        let m = matrix(&["a", "b"], 1, vec![1.0, 3.0]);
        let sentences = vec![
            Sentence { doc_id: "d".into(), index: 0, tokens: toks(&["a"]) },
            Sentence { doc_id: "d".into(), index: 1, tokens: toks(&["b"]) },
            Sentence { doc_id: "d".into(), index: 2, tokens: toks(&["a"]) },
        ];
        let vecs = embed_corpus(&sentences, &m);
        assert_eq!(vecs.len(), 3);
        assert_eq!(vecs[0].values, vec![1.0]);
        assert_eq!(vecs[1].values, vec![3.0]);
        assert_eq!(vecs[0], vecs[2]);
        assert!(embed_corpus(&[], &m).is_empty());
    }

    fn arb_matrix_and_sentence() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<usize>)> {
        (2usize..6, 1usize..5).prop_flat_map(|(vocab_size, dim)| {
            (
                proptest::collection::vec(
                    proptest::collection::vec(-10.0f64..10.0, dim..=dim),
                    vocab_size..=vocab_size,
                ),
                proptest::collection::vec(0..vocab_size, 1..12),
            )
        })
    }

    proptest! {
        #[test]
        fn permutation_invariance((rows, sentence) in arb_matrix_and_sentence()) {
            let dim = rows[0].len();
            let names: Vec<String> = (0..rows.len()).map(|i| format!("t{i}")).collect();
            let m = matrix(
                &names.iter().map(String::as_str).collect::<Vec<_>>(),
                dim,
                rows.iter().flatten().copied().collect(),
            );
            let forward: Vec<String> = sentence.iter().map(|&i| format!("t{i}")).collect();
            let mut reversed = forward.clone();
            reversed.reverse();
            let a = embed_sentence(&forward, &m);
            let b = embed_sentence(&reversed, &m);
            prop_assert_eq!(a.n_in_vocab, b.n_in_vocab);
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn scaling_embeddings_scales_sentences(
            (rows, sentence) in arb_matrix_and_sentence(),
            scale in -4.0f64..4.0,
        ) {
            let dim = rows[0].len();
            let names: Vec<String> = (0..rows.len()).map(|i| format!("t{i}")).collect();
            let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let flat: Vec<f64> = rows.iter().flatten().copied().collect();
            let scaled: Vec<f64> = flat.iter().map(|v| v * scale).collect();
            let m1 = matrix(&name_refs, dim, flat);
            let m2 = matrix(&name_refs, dim, scaled);
            let tokens: Vec<String> = sentence.iter().map(|&i| format!("t{i}")).collect();
            let a = embed_sentence(&tokens, &m1);
            let b = embed_sentence(&tokens, &m2);
            for (x, y) in a.values.iter().zip(&b.values) {
                prop_assert!((x * scale - y).abs() < 1e-9);
            }
        }

        #[test]
        fn components_stay_in_convex_hull((rows, sentence) in arb_matrix_and_sentence()) {
            let dim = rows[0].len();
            let names: Vec<String> = (0..rows.len()).map(|i| format!("t{i}")).collect();
            let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let m = matrix(&name_refs, dim, rows.iter().flatten().copied().collect());
            let tokens: Vec<String> = sentence.iter().map(|&i| format!("t{i}")).collect();
            let v = embed_sentence(&tokens, &m);
            for c in 0..dim {
                let lo = sentence.iter().map(|&i| rows[i][c]).fold(f64::INFINITY, f64::min);
                let hi = sentence.iter().map(|&i| rows[i][c]).fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(v.values[c] >= lo - 1e-12 && v.values[c] <= hi + 1e-12);
            }
        }

        #[test]
        fn repeated_token_equals_single(copies in 1usize..10) {
            let m = matrix(&["w"], 2, vec![0.7, -0.3]);
            let tokens = vec!["w".to_string(); copies];
            let v = embed_sentence(&tokens, &m);
            prop_assert!((v.values[0] - 0.7).abs() < 1e-12);
            prop_assert!((v.values[1] + 0.3).abs() < 1e-12);
        }
    }
}
