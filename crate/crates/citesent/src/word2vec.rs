//! Skip-gram word embedding training with negative sampling.
//!
//! The trainer runs plain SGD over (center, context) pairs drawn from a
//! sliding window, contrasting each observed pair against noise tokens
//! sampled from the unigram distribution raised to [`NOISE_POWER`]. Weight
//! matrices are shared across workers without locks: concurrent component
//! updates may race, which is the usual asynchronous-SGD contract. A single
//! worker with a fixed seed is bit-for-bit reproducible.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{build_vocabulary, Sentence, Vocabulary};
use crate::error::{Error, Result};
use crate::seed::derive_seed_indexed;

/// Exponent applied to unigram counts in the negative-sampling noise
/// distribution.
pub const NOISE_POWER: f64 = 0.75;

/// The learning rate decays linearly and never drops below
/// `initial_lr / LR_FLOOR_DIVISOR`.
const LR_FLOOR_DIVISOR: f64 = 10_000.0;

/// A noise draw colliding with the true context token is redrawn at most
/// this many times before the slot is skipped.
const NEGATIVE_REDRAWS: usize = 8;

/// Hyperparameters for embedding training.
#[derive(Debug, Clone)]
pub struct TrainingConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_count: u64,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            dim: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            min_count: 5,
            subsample_t: 1e-3,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidConfig("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(Error::InvalidConfig("negatives must be >= 1".into()));
        }
        if self.epochs < 1 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if !self.initial_lr.is_finite() || self.initial_lr <= 0.0 {
            return Err(Error::InvalidConfig("initial_lr must be > 0".into()));
        }
        if self.subsample_t < 0.0 {
            return Err(Error::InvalidConfig("subsample_t must be >= 0".into()));
        }
        if self.workers < 1 {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Trained word vectors plus the vocabulary they index.
///
/// `input` holds the word embedding per token row; `output` holds the
/// context-side weights, present only on freshly trained matrices.
#[derive(Debug, Clone)]
pub struct EmbeddingMatrix {
    vocab: Vocabulary,
    dim: usize,
    input: Vec<f64>,
    output: Option<Vec<f64>>,
}

impl EmbeddingMatrix {
    pub fn new(
        vocab: Vocabulary,
        dim: usize,
        input: Vec<f64>,
        output: Option<Vec<f64>>,
    ) -> Result<Self> {
        if input.len() != vocab.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: vocab.len() * dim,
                actual: input.len(),
            });
        }
        if let Some(out) = &output {
            if out.len() != vocab.len() * dim {
                return Err(Error::DimensionMismatch {
                    expected: vocab.len() * dim,
                    actual: out.len(),
                });
            }
        }
        Ok(EmbeddingMatrix {
            vocab,
            dim,
            input,
            output,
        })
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Word vector for `token`, if it is in the vocabulary.
    pub fn vector(&self, token: &str) -> Option<&[f64]> {
        self.vocab.index_of(token).map(|i| self.vector_at(i))
    }

    pub fn vector_at(&self, index: usize) -> &[f64] {
        &self.input[index * self.dim..(index + 1) * self.dim]
    }

    /// Context-side vector, available only on trained matrices.
    pub fn context_vector_at(&self, index: usize) -> Option<&[f64]> {
        self.output
            .as_ref()
            .map(|out| &out[index * self.dim..(index + 1) * self.dim])
    }

    pub fn all_finite(&self) -> bool {
        self.input.iter().all(|v| v.is_finite())
            && self
                .output
                .as_ref()
                .is_none_or(|out| out.iter().all(|v| v.is_finite()))
    }
}

/// Per-epoch training diagnostics.
#[derive(Debug, Clone)]
pub struct TrainingStats {
    /// Mean negative-sampling loss per trained pair term, one entry per epoch.
    pub epoch_mean_loss: Vec<f64>,
    pub pairs_trained: u64,
    pub vocab_size: usize,
    pub token_count: u64,
}

/// Normalized noise distribution over token indices:
/// `p(i) = count(i)^power / sum_j count(j)^power`.
pub fn noise_distribution(vocab: &Vocabulary, power: f64) -> Vec<f64> {
    let weights: Vec<f64> = (0..vocab.len())
        .map(|i| (vocab.count(i) as f64).powf(power))
        .collect();
    // Compensated sum keeps the normalization tight for large vocabularies.
    let mut total = 0.0f64;
    let mut comp = 0.0f64;
    for &w in &weights {
        let y = w - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    weights.into_iter().map(|w| w / total).collect()
}

/// Keep probability for a token with corpus frequency fraction `f` under
/// subsampling threshold `t`: `min(1, sqrt(t/f) + t/f)`, with `t = 0`
/// meaning subsampling is disabled.
pub fn subsample_keep_probability(freq_fraction: f64, subsample_t: f64) -> f64 {
    if subsample_t <= 0.0 {
        return 1.0;
    }
    if freq_fraction <= subsample_t {
        return 1.0;
    }
    let ratio = subsample_t / freq_fraction;
    (ratio.sqrt() + ratio).min(1.0)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log(1 + exp(x)) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Loss and gradients for one (center, context) pair under the
/// negative-sampling objective. `observed` marks a true co-occurrence;
/// noise pairs pass `false`.
#[derive(Debug, Clone)]
pub struct PairGradient {
    pub loss: f64,
    pub grad_center: Vec<f64>,
    pub grad_context: Vec<f64>,
}

/// With `s = center · context` and `label` 1 for observed pairs, 0 for noise:
/// loss is `-log sigmoid(s)` resp. `-log sigmoid(-s)`, and the gradients are
/// `grad_center = (sigmoid(s) - label) * context`,
/// `grad_context = (sigmoid(s) - label) * center`.
pub fn pair_gradient(center: &[f64], context: &[f64], observed: bool) -> PairGradient {
    debug_assert_eq!(center.len(), context.len());
    let s: f64 = center.iter().zip(context).map(|(a, b)| a * b).sum();
    let label = if observed { 1.0 } else { 0.0 };
    let loss = if observed { softplus(-s) } else { softplus(s) };
    let g = sigmoid(s) - label;
    PairGradient {
        loss,
        grad_center: context.iter().map(|&c| g * c).collect(),
        grad_context: center.iter().map(|&c| g * c).collect(),
    }
}

/// Weight matrix shared across training workers. Reads and writes use
/// relaxed atomics; concurrent updates to the same component may drop one
/// increment, which asynchronous SGD tolerates.
struct SharedWeights {
    dim: usize,
    cells: Vec<AtomicU64>,
}

impl SharedWeights {
    fn zeros(rows: usize, dim: usize) -> Self {
        let cells = (0..rows * dim)
            .map(|_| AtomicU64::new(0f64.to_bits()))
            .collect();
        SharedWeights { dim, cells }
    }

    fn from_values(values: Vec<f64>, dim: usize) -> Self {
        let cells = values
            .into_iter()
            .map(|v| AtomicU64::new(v.to_bits()))
            .collect();
        SharedWeights { dim, cells }
    }

    #[inline]
    fn get(&self, row: usize, col: usize) -> f64 {
        f64::from_bits(self.cells[row * self.dim + col].load(Ordering::Relaxed))
    }

    #[inline]
    fn add(&self, row: usize, col: usize, delta: f64) {
        let cell = &self.cells[row * self.dim + col];
        let v = f64::from_bits(cell.load(Ordering::Relaxed)) + delta;
        cell.store(v.to_bits(), Ordering::Relaxed);
    }

    fn row_dot(&self, row_a: usize, other: &SharedWeights, row_b: usize) -> f64 {
        (0..self.dim)
            .map(|c| self.get(row_a, c) * other.get(row_b, c))
            .sum()
    }

    fn all_finite(&self) -> bool {
        self.cells
            .iter()
            .all(|c| f64::from_bits(c.load(Ordering::Relaxed)).is_finite())
    }

    fn into_values(self) -> Vec<f64> {
        self.cells
            .into_iter()
            .map(|c| f64::from_bits(c.into_inner()))
            .collect()
    }
}

/// Trains skip-gram embeddings over `sentences`.
pub fn train_embeddings(
    sentences: &[Sentence],
    config: &TrainingConfig,
) -> Result<EmbeddingMatrix> {
    train_embeddings_with_stats(sentences, config).map(|(matrix, _)| matrix)
}

/// As [`train_embeddings`], additionally returning per-epoch diagnostics.
pub fn train_embeddings_with_stats(
    sentences: &[Sentence],
    config: &TrainingConfig,
) -> Result<(EmbeddingMatrix, TrainingStats)> {
    config.validate()?;
    let vocab = build_vocabulary(sentences, config.min_count)?;

    // Index-encode, dropping out-of-vocabulary tokens.
    let encoded: Vec<Vec<u32>> = sentences
        .iter()
        .map(|s| {
            s.tokens
                .iter()
                .filter_map(|t| vocab.index_of(t).map(|i| i as u32))
                .collect()
        })
        .filter(|s: &Vec<u32>| !s.is_empty())
        .collect();
    let token_count: u64 = encoded.iter().map(|s| s.len() as u64).sum();
    if token_count == 0 {
        return Err(Error::EmptyVocabulary);
    }

    let dim = config.dim;
    let probs = noise_distribution(&vocab, NOISE_POWER);
    let noise = WeightedIndex::new(&probs)
        .map_err(|e| Error::InvalidConfig(format!("noise distribution: {e}")))?;
    let freq_fraction: Vec<f64> = (0..vocab.len())
        .map(|i| vocab.count(i) as f64 / token_count as f64)
        .collect();

    let mut init_rng = ChaCha8Rng::seed_from_u64(derive_seed_indexed(config.seed, "w2v-init", 0));
    let init: Vec<f64> = (0..vocab.len() * dim)
        .map(|_| (init_rng.gen::<f64>() - 0.5) / dim as f64)
        .collect();
    let input = SharedWeights::from_values(init, dim);
    let output = SharedWeights::zeros(vocab.len(), dim);

    let schedule_total = (config.epochs as u64 * token_count).max(1);
    let processed = AtomicU64::new(0);
    let chunk = encoded.len().div_ceil(config.workers);
    let shards: Vec<&[Vec<u32>]> = encoded.chunks(chunk.max(1)).collect();

    let mut epoch_mean_loss = Vec::with_capacity(config.epochs);
    let mut pairs_trained = 0u64;

    for epoch in 0..config.epochs {
        let mut worker_stats = vec![(0.0f64, 0u64); shards.len()];
        thread::scope(|scope| {
            let mut handles = Vec::new();
            for (worker_id, shard) in shards.iter().enumerate() {
                let worker = WorkerContext {
                    shard,
                    input: &input,
                    output: &output,
                    noise: &noise,
                    freq_fraction: &freq_fraction,
                    processed: &processed,
                    schedule_total,
                    config,
                    seed: derive_seed_indexed(
                        config.seed,
                        "w2v-epoch",
                        (epoch * config.workers + worker_id) as u64,
                    ),
                };
                handles.push(scope.spawn(move || worker.run()));
            }
            for (i, handle) in handles.into_iter().enumerate() {
                worker_stats[i] = handle.join().expect("training worker panicked");
            }
        });

        let loss_sum: f64 = worker_stats.iter().map(|(s, _)| s).sum();
        let loss_count: u64 = worker_stats.iter().map(|(_, n)| n).sum();
        pairs_trained += loss_count;
        epoch_mean_loss.push(if loss_count > 0 {
            loss_sum / loss_count as f64
        } else {
            0.0
        });

        if !input.all_finite() || !output.all_finite() || !loss_sum.is_finite() {
            return Err(Error::NonFinite("embedding training"));
        }
    }

    let vocab_size = vocab.len();
    let matrix = EmbeddingMatrix::new(
        vocab,
        dim,
        input.into_values(),
        Some(output.into_values()),
    )?;
    Ok((
        matrix,
        TrainingStats {
            epoch_mean_loss,
            pairs_trained,
            vocab_size,
            token_count,
        },
    ))
}

struct WorkerContext<'a> {
    shard: &'a [Vec<u32>],
    input: &'a SharedWeights,
    output: &'a SharedWeights,
    noise: &'a WeightedIndex<f64>,
    freq_fraction: &'a [f64],
    processed: &'a AtomicU64,
    schedule_total: u64,
    config: &'a TrainingConfig,
    seed: u64,
}

impl WorkerContext<'_> {
    #[allow(clippy::needless_range_loop)]
    fn run(&self) -> (f64, u64) {
        let cfg = self.config;
        let dim = cfg.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut kept: Vec<u32> = Vec::new();
        let mut center_grad = vec![0.0f64; dim];
        let mut loss_sum = 0.0f64;
        let mut loss_count = 0u64;

        for sentence in self.shard {
            kept.clear();
            for &tok in sentence {
                let keep = subsample_keep_probability(
                    self.freq_fraction[tok as usize],
                    cfg.subsample_t,
                );
                if keep >= 1.0 || rng.gen::<f64>() < keep {
                    kept.push(tok);
                }
            }

            // Progress counts pre-subsampling tokens so the schedule covers
            // the whole corpus regardless of how many tokens are dropped.
            let advanced = sentence.len() as u64;
            let done = self.processed.fetch_add(advanced, Ordering::Relaxed) + advanced;
            let lr = (cfg.initial_lr * (1.0 - done as f64 / self.schedule_total as f64))
                .max(cfg.initial_lr / LR_FLOOR_DIVISOR);

            if kept.len() < 2 {
                continue;
            }
            for pos in 0..kept.len() {
                let center = kept[pos] as usize;
                let reduced = rng.gen_range(1..=cfg.window);
                let lo = pos.saturating_sub(reduced);
                let hi = (pos + reduced).min(kept.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = kept[ctx_pos];
                    center_grad.iter_mut().for_each(|g| *g = 0.0);

                    let (loss, n) = self.train_pair(center, context, lr, &mut center_grad, &mut rng);
                    loss_sum += loss;
                    loss_count += n;

                    for c in 0..dim {
                        self.input.add(center, c, -lr * center_grad[c]);
                    }
                }
            }
        }
        (loss_sum, loss_count)
    }

    /// One positive pair plus its negative draws. Accumulates the center
    /// gradient into `center_grad` and applies context updates in place.
    #[allow(clippy::needless_range_loop)]
    fn train_pair(
        &self,
        center: usize,
        context: u32,
        lr: f64,
        center_grad: &mut [f64],
        rng: &mut ChaCha8Rng,
    ) -> (f64, u64) {
        let dim = self.config.dim;
        let mut loss_sum = 0.0;
        let mut loss_count = 0u64;

        for slot in 0..=self.config.negatives {
            let (target, label) = if slot == 0 {
                (context as usize, 1.0)
            } else {
                let mut drawn = None;
                for _ in 0..NEGATIVE_REDRAWS {
                    let cand = self.noise.sample(rng) as u32;
                    if cand != context {
                        drawn = Some(cand as usize);
                        break;
                    }
                }
                match drawn {
                    Some(t) => (t, 0.0),
                    None => continue,
                }
            };

            let s = self.input.row_dot(center, self.output, target);
            let g = sigmoid(s) - label;
            loss_sum += if label == 1.0 { softplus(-s) } else { softplus(s) };
            loss_count += 1;

            for c in 0..dim {
                let out_c = self.output.get(target, c);
                center_grad[c] += g * out_c;
                self.output.add(target, c, -lr * g * self.input.get(center, c));
            }
        }
        (loss_sum, loss_count)
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// The `k` tokens most cosine-similar to `token`, descending, query
/// excluded, ties broken by token index.
pub fn nearest_neighbors(
    matrix: &EmbeddingMatrix,
    token: &str,
    k: usize,
) -> Result<Vec<(String, f64)>> {
    let query = matrix
        .vocab()
        .index_of(token)
        .ok_or_else(|| Error::UnknownToken(token.to_string()))?;
    let query_vec = matrix.vector_at(query);
    let mut scored: Vec<(usize, f64)> = (0..matrix.vocab().len())
        .filter(|&i| i != query)
        .map(|i| (i, cosine(query_vec, matrix.vector_at(i))))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(i, c)| (matrix.vocab().token(i).to_string(), c))
        .collect())
}

/// Writes the text embedding format: a `"<vocab_size> <dim>"` header line,
/// then one `"<token> <v1> ... <v_dim>"` line per token, 9 significant
/// digits per value, LF endings.
pub fn save_embeddings(matrix: &EmbeddingMatrix, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let write = |e| Error::io(path, e);
    writeln!(out, "{} {}", matrix.vocab().len(), matrix.dim()).map_err(write)?;
    for i in 0..matrix.vocab().len() {
        write!(out, "{}", matrix.vocab().token(i)).map_err(write)?;
        for v in matrix.vector_at(i) {
            write!(out, " {v:.8e}").map_err(write)?;
        }
        writeln!(out).map_err(write)?;
    }
    out.flush().map_err(write)
}

/// Reads the format written by [`save_embeddings`] (or any compatible
/// word2vec-style text file). Only input vectors are restored; the loaded
/// vocabulary carries unit counts.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file, expected \"<vocab_size> <dim>\" header"))?;
    let mut parts = header.split_whitespace();
    let parse_count = |s: Option<&str>| -> Option<usize> { s.and_then(|v| v.parse().ok()) };
    let vocab_size = parse_count(parts.next())
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::parse(path, 1, format!("malformed header {header:?}")))?;
    let dim = parse_count(parts.next())
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::parse(path, 1, format!("malformed header {header:?}")))?;
    if parts.next().is_some() {
        return Err(Error::parse(path, 1, format!("malformed header {header:?}")));
    }

    let mut tokens = Vec::with_capacity(vocab_size);
    let mut values = Vec::with_capacity(vocab_size * dim);
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows == vocab_size {
            return Err(Error::parse(
                path,
                line_no,
                format!("header declared {vocab_size} rows but more follow"),
            ));
        }
        let mut fields = line.split_whitespace();
        let token = fields.next().unwrap().to_string();
        let mut row = 0usize;
        for field in fields {
            let v: f64 = field.parse().map_err(|_| {
                Error::parse(path, line_no, format!("unparsable value {field:?}"))
            })?;
            if !v.is_finite() {
                return Err(Error::parse(path, line_no, format!("non-finite value {field:?}")));
            }
            values.push(v);
            row += 1;
        }
        if row != dim {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected {dim} values for token {token:?}, found {row}"),
            ));
        }
        tokens.push(token);
        rows += 1;
    }
    if rows != vocab_size {
        let line_no = rows + 2;
        return Err(Error::parse(
            path,
            line_no,
            format!("header declared {vocab_size} rows, file has {rows}"),
        ));
    }

    let vocab = Vocabulary::from_tokens(tokens)
        .map_err(|e| Error::parse(path, 1, format!("invalid vocabulary: {e}")))?;
    EmbeddingMatrix::new(vocab, dim, values, None)
}
