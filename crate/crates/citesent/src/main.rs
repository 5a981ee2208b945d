use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use citesent::config::PipelineConfig;
use citesent::corpus::{
    load_documents, preprocess_documents, read_sentences, write_sentences, DEFAULT_MIN_TOKENS,
};
use citesent::eval::{load_dataset, run_experiment, Featurizer};
use citesent::polarity::{select_polar_sentences, PolarLexicon};
use citesent::seed::derive_seed;
use citesent::sent2vec::{embed_corpus, write_vector_dump};
use citesent::word2vec::{
    load_embeddings, nearest_neighbors, save_embeddings, train_embeddings_with_stats,
};

#[derive(Parser)]
#[command(
    name = "citesent",
    version,
    about = "Citation sentiment pipeline: preprocess a corpus, train word embeddings, \
             build sentence vectors and evaluate linear classifiers with cross-validated F1"
)]
struct Cli {
    /// Key=value configuration file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Root seed; every randomized stage derives its own stream from it.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TrainOpts {
    /// Embedding dimensionality.
    #[arg(long)]
    dim: Option<usize>,

    /// Maximum context window distance.
    #[arg(long)]
    window: Option<usize>,

    /// Negative samples per observed pair.
    #[arg(long)]
    negatives: Option<usize>,

    /// Passes over the corpus.
    #[arg(long)]
    epochs: Option<usize>,

    /// Starting learning rate (decays linearly).
    #[arg(long)]
    lr: Option<f64>,

    /// Vocabulary frequency threshold.
    #[arg(long)]
    min_count: Option<u64>,

    /// Frequent-word subsampling threshold; 0 disables subsampling.
    #[arg(long)]
    subsample: Option<f64>,

    /// Training worker threads (1 is fully deterministic).
    #[arg(long)]
    workers: Option<usize>,
}

impl TrainOpts {
    fn apply(&self, config: &mut PipelineConfig) {
        if let Some(v) = self.dim {
            config.dim = v;
        }
        if let Some(v) = self.window {
            config.window = v;
        }
        if let Some(v) = self.negatives {
            config.negatives = v;
        }
        if let Some(v) = self.epochs {
            config.epochs = v;
        }
        if let Some(v) = self.lr {
            config.lr = v;
        }
        if let Some(v) = self.min_count {
            config.min_count = v;
        }
        if let Some(v) = self.subsample {
            config.subsample = v;
        }
        if let Some(v) = self.workers {
            config.workers = v;
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Segment, tokenize and filter a corpus into a sentence file.
    Preprocess {
        /// Directory of text files (stem = doc id) or one-document-per-line file.
        #[arg(long, value_name = "PATH")]
        corpus: Option<PathBuf>,

        /// Output sentence file (one sentence per line, space-separated tokens).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Train skip-gram embeddings from a sentence file.
    Train {
        #[arg(long, value_name = "FILE")]
        sentences: Option<PathBuf>,

        /// Output embedding file (word2vec-style text format).
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,

        #[command(flatten)]
        opts: TrainOpts,
    },

    /// Select a balanced polar subcorpus by phrase-lexicon matching.
    SelectPolar {
        #[arg(long, value_name = "FILE")]
        sentences: Option<PathBuf>,

        /// Phrase lexicon; without it a small builtin demo list is used.
        #[arg(long, value_name = "FILE")]
        lexicon: Option<PathBuf>,

        /// Output directory, receives positive.txt and negative.txt.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },

    /// Write mean-word-vector sentence embeddings for a sentence file.
    Embed {
        #[arg(long, value_name = "FILE")]
        sentences: Option<PathBuf>,

        #[arg(long, value_name = "FILE")]
        embeddings: Option<PathBuf>,

        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },

    /// Cross-validated one-vs-rest evaluation of a labeled dataset.
    Evaluate {
        /// TSV dataset: label<TAB>sentence per line, optional #labels: header.
        #[arg(long, value_name = "FILE")]
        dataset: Option<PathBuf>,

        /// Embedding file for sentence-vector features.
        #[arg(long, value_name = "FILE", conflicts_with = "bow")]
        embeddings: Option<PathBuf>,

        /// Use the bag-of-words baseline featurizer instead of embeddings.
        #[arg(long)]
        bow: bool,

        /// Fold count.
        #[arg(long)]
        k: Option<usize>,

        /// SVM regularization strength.
        #[arg(long)]
        lambda: Option<f64>,

        /// SVM training epochs.
        #[arg(long)]
        epochs: Option<usize>,

        /// Stratify folds by label (default).
        #[arg(long, overrides_with = "no_stratify")]
        stratify: bool,

        /// Use plain shuffled folds instead of stratified ones.
        #[arg(long)]
        no_stratify: bool,
    },

    /// List the tokens most similar to a query token.
    Nearest {
        #[arg(long, value_name = "FILE")]
        embeddings: Option<PathBuf>,

        #[arg(long)]
        token: String,

        #[arg(long, default_value_t = 10)]
        k: usize,
    },

    /// Print the effective configuration as key=value lines.
    Config {
        /// Dump every setting (the default action).
        #[arg(long)]
        dump: bool,
    },
}

fn required(flag: Option<PathBuf>, fallback: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| fallback.clone())
        .with_context(|| format!("missing --{name} (no {name} set in the config file either)"))
}

fn run() -> Result<()> {
    let cli = Cli::parse();

    let mut config = match &cli.config {
        Some(path) => PipelineConfig::from_file(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let root_seed = config.seed;

    match cli.command {
        Command::Preprocess { corpus, out } => {
            let corpus = required(corpus, &config.corpus, "corpus")?;
            let out = required(out, &config.out, "out")?;
            let (documents, replaced) = load_documents(&corpus)?;
            let (sentences, stats) = preprocess_documents(&documents, DEFAULT_MIN_TOKENS);
            write_sentences(&out, &sentences)?;
            println!("documents={}", stats.documents);
            println!("segmented={}", stats.segmented);
            println!("sentences={}", stats.kept);
            println!("replaced_utf8={replaced}");
        }

        Command::Train {
            sentences,
            out,
            opts,
        } => {
            let sentences_path = required(sentences, &config.sentences, "sentences")?;
            let out = required(out, &config.out, "out")?;
            opts.apply(&mut config);
            let sentences = read_sentences(&sentences_path)?;
            if sentences.is_empty() {
                bail!("{}: no sentences to train on", sentences_path.display());
            }
            let train_config = config.training_config(derive_seed(root_seed, "train"));
            let (matrix, stats) = train_embeddings_with_stats(&sentences, &train_config)?;
            save_embeddings(&matrix, &out)?;
            println!("vocab={}", stats.vocab_size);
            println!("tokens={}", stats.token_count);
            println!("dim={}", train_config.dim);
            for (i, loss) in stats.epoch_mean_loss.iter().enumerate() {
                println!("epoch_{}_loss={loss:.6}", i + 1);
            }
        }

        Command::SelectPolar {
            sentences,
            lexicon,
            out,
        } => {
            let sentences_path = required(sentences, &config.sentences, "sentences")?;
            let out = required(out, &config.out, "out")?;
            let lexicon = match lexicon.or_else(|| config.lexicon.clone()) {
                Some(path) => PolarLexicon::from_file(&path)?,
                None => {
                    eprintln!("note: no --lexicon given, using the builtin demo phrase list");
                    PolarLexicon::builtin()
                }
            };
            let sentences = read_sentences(&sentences_path)?;
            let subcorpus =
                select_polar_sentences(&sentences, &lexicon, derive_seed(root_seed, "select"))?;
            std::fs::create_dir_all(&out)
                .with_context(|| format!("creating {}", out.display()))?;
            write_sentences(&out.join("positive.txt"), &subcorpus.positive)?;
            write_sentences(&out.join("negative.txt"), &subcorpus.negative)?;
            println!("positive={}", subcorpus.positive.len());
            println!("negative={}", subcorpus.negative.len());
        }

        Command::Embed {
            sentences,
            embeddings,
            out,
        } => {
            let sentences_path = required(sentences, &config.sentences, "sentences")?;
            let embeddings_path = required(embeddings, &config.embeddings, "embeddings")?;
            let out = required(out, &config.out, "out")?;
            let sentences = read_sentences(&sentences_path)?;
            let matrix = load_embeddings(&embeddings_path)?;
            let vectors = embed_corpus(&sentences, &matrix);
            let degenerate = vectors.iter().filter(|v| v.is_degenerate()).count();
            write_vector_dump(&out, &sentences, &vectors)?;
            println!("sentences={}", vectors.len());
            println!("degenerate={degenerate}");
        }

        Command::Evaluate {
            dataset,
            embeddings,
            bow,
            k,
            lambda,
            epochs,
            stratify,
            no_stratify,
        } => {
            let dataset_path = required(dataset, &config.dataset, "dataset")?;
            if let Some(v) = k {
                config.k = v;
            }
            if let Some(v) = lambda {
                config.lambda = v;
            }
            if let Some(v) = epochs {
                config.svm_epochs = v;
            }
            if stratify {
                config.stratify = true;
            }
            if no_stratify {
                config.stratify = false;
            }

            let dataset = load_dataset(&dataset_path, None)?;
            let matrix;
            let featurizer = if bow {
                Featurizer::BagOfWords
            } else {
                let path = required(embeddings, &config.embeddings, "embeddings")
                    .context("evaluate needs --embeddings or --bow")?;
                matrix = load_embeddings(&path)?;
                Featurizer::SentenceVectors(&matrix)
            };
            let result = run_experiment(
                &dataset,
                featurizer,
                &config.classifier_config(),
                config.k,
                derive_seed(root_seed, "eval"),
                config.stratify,
            )?;
            print!("{}", result.render());
        }

        Command::Nearest {
            embeddings,
            token,
            k,
        } => {
            let embeddings_path = required(embeddings, &config.embeddings, "embeddings")?;
            let matrix = load_embeddings(&embeddings_path)?;
            for (neighbor, cosine) in nearest_neighbors(&matrix, &token, k)? {
                println!("{neighbor} {cosine:.6}");
            }
        }

        Command::Config { dump: _ } => {
            print!("{}", config.dump());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
