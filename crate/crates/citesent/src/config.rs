//! Flat key=value pipeline configuration.
//!
//! Defaults can be overridden by a config file and again by command-line
//! flags; `citesent config --dump` prints the effective values so every run
//! is self-documenting.

use std::fs;
use std::path::{Path, PathBuf};

use crate::classify::{DEFAULT_EPOCHS, DEFAULT_LAMBDA};
use crate::error::{Error, Result};
use crate::eval::ClassifierConfig;
use crate::word2vec::TrainingConfig;

/// Every tunable of the pipeline plus optional default input paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr: f64,
    pub min_count: u64,
    pub subsample: f64,
    pub workers: usize,
    pub k: usize,
    pub lambda: f64,
    pub svm_epochs: usize,
    pub stratify: bool,
    pub seed: u64,
    pub corpus: Option<PathBuf>,
    pub sentences: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr: 0.025,
            min_count: 5,
            subsample: 1e-3,
            workers: 1,
            k: 10,
            lambda: DEFAULT_LAMBDA,
            svm_epochs: DEFAULT_EPOCHS,
            stratify: true,
            seed: 42,
            corpus: None,
            sentences: None,
            lexicon: None,
            dataset: None,
            embeddings: None,
            out: None,
        }
    }
}

impl PipelineConfig {
    /// Loads defaults and applies `key=value` lines from `path`. Blank
    /// lines and `#` comments are ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut config = PipelineConfig::default();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (i, raw) in text.lines().enumerate() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before.trim(),
                None => raw.trim(),
            };
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::parse(path, i + 1, format!("expected key=value, got {line:?}"))
            })?;
            config
                .apply(key.trim(), value.trim())
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(config)
    }

    /// Sets one configuration key from its textual value.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad value {value:?} for {key}")))
        }
        match key {
            "dim" => self.dim = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "negatives" => self.negatives = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "lr" => self.lr = parse(key, value)?,
            "min_count" => self.min_count = parse(key, value)?,
            "subsample" => self.subsample = parse(key, value)?,
            "workers" => self.workers = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "lambda" => self.lambda = parse(key, value)?,
            "svm_epochs" => self.svm_epochs = parse(key, value)?,
            "stratify" => {
                self.stratify = match value {
                    "true" | "on" | "yes" | "1" => true,
                    "false" | "off" | "no" | "0" => false,
                    _ => {
                        return Err(Error::InvalidConfig(format!(
                            "bad value {value:?} for stratify"
                        )))
                    }
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "corpus" => self.corpus = Some(PathBuf::from(value)),
            "sentences" => self.sentences = Some(PathBuf::from(value)),
            "lexicon" => self.lexicon = Some(PathBuf::from(value)),
            "dataset" => self.dataset = Some(PathBuf::from(value)),
            "embeddings" => self.embeddings = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Serializes the effective configuration as key=value lines.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push('=');
            out.push_str(&v);
            out.push('\n');
        };
        push("dim", self.dim.to_string());
        push("window", self.window.to_string());
        push("negatives", self.negatives.to_string());
        push("epochs", self.epochs.to_string());
        push("lr", self.lr.to_string());
        push("min_count", self.min_count.to_string());
        push("subsample", self.subsample.to_string());
        push("workers", self.workers.to_string());
        push("k", self.k.to_string());
        push("lambda", self.lambda.to_string());
        push("svm_epochs", self.svm_epochs.to_string());
        push("stratify", self.stratify.to_string());
        push("seed", self.seed.to_string());
        for (key, path) in [
            ("corpus", &self.corpus),
            ("sentences", &self.sentences),
            ("lexicon", &self.lexicon),
            ("dataset", &self.dataset),
            ("embeddings", &self.embeddings),
            ("out", &self.out),
        ] {
            if let Some(p) = path {
                push(key, p.display().to_string());
            }
        }
        out
    }

    /// Training hyperparameters with the training sub-seed filled in.
    pub fn training_config(&self, seed: u64) -> TrainingConfig {
        TrainingConfig {
            dim: self.dim,
            window: self.window,
            negatives: self.negatives,
            epochs: self.epochs,
            initial_lr: self.lr,
            min_count: self.min_count,
            subsample_t: self.subsample,
            seed,
            workers: self.workers,
        }
    }

    pub fn classifier_config(&self) -> ClassifierConfig {
        ClassifierConfig {
            lambda: self.lambda,
            epochs: self.svm_epochs,
        }
    }
}
