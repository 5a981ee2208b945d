//! Citation sentiment classification from word embeddings.
//!
//! The pipeline mirrors a classic embedding-based text classification
//! setup, specialized to citation sentences:
//!
//! 1. [`corpus`] — rule-based sentence segmentation, tokenization,
//!    short-sentence filtering, vocabulary construction.
//! 2. [`word2vec`] — skip-gram embeddings with negative sampling, plus the
//!    interoperable text format for saving/loading vectors.
//! 3. [`sent2vec`] — sentence vectors as the mean of word vectors.
//! 4. [`polarity`] — phrase-lexicon selection of a balanced polar
//!    subcorpus and polarity-specific embedding training.
//! 5. [`classify`] — one-vs-rest linear SVMs over sentence vectors (or a
//!    bag-of-words sanity baseline).
//! 6. [`eval`] — stratified 10-fold cross-validation with per-class,
//!    micro, macro and weighted F1.
//!
//! The `citesent` binary wires these stages into subcommands; see the
//! repository README for usage.

pub mod classify;
pub mod config;
pub mod corpus;
pub mod eval;
pub mod polarity;
pub mod seed;
pub mod sent2vec;
pub mod word2vec;

mod error;

pub use error::{Error, Result};
