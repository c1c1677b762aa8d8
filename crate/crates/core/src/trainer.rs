//! Two-stage training: denoising pretraining, then contrastive fine-tuning on
//! (summary, code) pairs.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{collect_functions, ingest_directory};
use crate::denoiser::{collate_stage1, DenoiseConfig, MaskConfig, SeqConfig, SpecialIds, Stage1Item};
use crate::encoder::{pool_mean_backward, EncoderConfig, Mode, Parameters, Scalar, TokenBatch};
use crate::error::{Error, Result};
use crate::objectives::{contrastive_loss, in_batch_accuracy, mlm_loss, DEFAULT_TEMPERATURE};
use crate::syntax::Language;
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "1")]
    Stage1,
    #[serde(rename = "2")]
    Stage2,
    #[serde(rename = "2-scratch")]
    Stage2FromScratch,
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Stage::Stage1),
            "2" => Ok(Stage::Stage2),
            "2-scratch" => Ok(Stage::Stage2FromScratch),
            other => Err(Error::Config(format!("unknown stage `{other}` (expected 1, 2 or 2-scratch)"))),
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Stage1 => "1",
            Stage::Stage2 => "2",
            Stage::Stage2FromScratch => "2-scratch",
        })
    }
}

/// Input locations, resolved by the command line front end.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataPaths {
    pub tokenizer: Option<PathBuf>,
    /// Source directory for denoising pretraining.
    pub corpus: Option<PathBuf>,
    /// Pair JSONL for contrastive training.
    pub pairs: Option<PathBuf>,
    /// Checkpoint to start from.
    pub init: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub stage: Stage,
    pub steps: usize,
    pub warmup_steps: usize,
    pub batch_size: usize,
    pub base_lr: f64,
    pub weight_decay: f64,
    pub grad_clip: f64,
    pub seed: u64,
    pub preset: String,
    pub dropout: f64,
    pub temperature: f64,
    /// Save an intermediate checkpoint every this many steps (0 = only at the end).
    pub checkpoint_every: usize,
    pub data: DataPaths,
    pub mask: MaskConfig,
    pub seq: SeqConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self::for_stage(Stage::Stage1)
    }
}

impl TrainConfig {
    /// Desk-scale defaults per stage.
    pub fn for_stage(stage: Stage) -> Self {
        let (steps, batch_size, base_lr) = match stage {
            Stage::Stage1 => (300, 32, 1e-3),
            Stage::Stage2 | Stage::Stage2FromScratch => (200, 64, 1e-4),
        };
        Self {
            stage,
            steps,
            warmup_steps: steps / 10,
            batch_size,
            base_lr,
            weight_decay: 0.01,
            grad_clip: 1.0,
            seed: 0,
            preset: "tiny".into(),
            dropout: 0.1,
            temperature: DEFAULT_TEMPERATURE,
            checkpoint_every: 0,
            data: DataPaths::default(),
            mask: MaskConfig::default(),
            seq: SeqConfig::default(),
        }
    }

    pub fn denoise(&self) -> DenoiseConfig {
        DenoiseConfig {
            mask: self.mask.clone(),
            seq: self.seq.clone(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.warmup_steps > self.steps {
            return Err(Error::Config(format!(
                "warmup_steps {} exceeds steps {}",
                self.warmup_steps, self.steps
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be positive".into()));
        }
        if self.stage != Stage::Stage1 && self.batch_size < 2 {
            return Err(Error::Config("contrastive training needs batch_size >= 2".into()));
        }
        if !(self.base_lr >= 0.0) || !(self.weight_decay >= 0.0) || !(self.grad_clip > 0.0) {
            return Err(Error::Config("base_lr and weight_decay must be >= 0, grad_clip > 0".into()));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Config("temperature must be positive".into()));
        }
        self.denoise().validate()
    }

    pub fn encoder_config(&self, vocab_size: usize) -> Result<EncoderConfig> {
        let mut cfg = EncoderConfig::preset(&self.preset, vocab_size, self.seq.max_len)?;
        cfg.dropout = self.dropout;
        cfg.seed = self.seed;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Linear warmup from 0 to `base_lr`, then linear decay to 0 at `steps`.
pub fn lr_schedule(step: usize, steps: usize, warmup_steps: usize, base_lr: f64) -> f64 {
    if step >= steps {
        0.0
    } else if step < warmup_steps {
        base_lr * step as f64 / warmup_steps as f64
    } else {
        base_lr * (steps - step) as f64 / (steps - warmup_steps) as f64
    }
}

/// AdamW moments and step counter.
#[derive(Debug, Clone)]
pub struct AdamW<T> {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub m: Parameters<T>,
    pub v: Parameters<T>,
    pub t: u64,
    /// Updates skipped because of non-finite gradients.
    pub skipped: u64,
}

impl<T: Scalar> AdamW<T> {
    pub fn new(params: &Parameters<T>) -> Self {
        Self {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: params.zeros_like(),
            v: params.zeros_like(),
            t: 0,
            skipped: 0,
        }
    }
}

/// One AdamW update with decoupled weight decay. Returns `false` and leaves
/// everything untouched when a gradient is not finite.
pub fn optimizer_step<T: Scalar>(
    params: &mut Parameters<T>,
    grads: &Parameters<T>,
    state: &mut AdamW<T>,
    lr: f64,
    weight_decay: f64,
) -> bool {
    if !grads.is_finite() {
        state.skipped += 1;
        log::warn!("non-finite gradient, update skipped ({} so far)", state.skipped);
        return false;
    }
    state.t += 1;
    let (b1, b2) = (T::c(state.beta1), T::c(state.beta2));
    let c1 = T::c(1.0 - state.beta1.powi(state.t as i32));
    let c2 = T::c(1.0 - state.beta2.powi(state.t as i32));
    let (lr, decay, eps) = (T::c(lr), T::c(lr * weight_decay), T::c(state.eps));
    let m_all = state.m.tensors_mut();
    let v_all = state.v.tensors_mut();
    for (((p, g), m), v) in params.tensors_mut().iter_mut().zip(grads.tensors()).zip(m_all).zip(v_all) {
        for i in 0..p.data.len() {
            let gi = g.data[i];
            m.data[i] = b1 * m.data[i] + (T::one() - b1) * gi;
            v.data[i] = b2 * v.data[i] + (T::one() - b2) * gi * gi;
            let mhat = m.data[i] / c1;
            let vhat = v.data[i] / c2;
            p.data[i] = p.data[i] - decay * p.data[i] - lr * mhat / (vhat.sqrt() + eps);
        }
    }
    true
}

/// Rescale `grads` so the global L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
pub fn clip_grad_norm<T: Scalar>(grads: &mut Parameters<T>, max_norm: f64) -> f64 {
    let norm = grads.squared_norm().to_f64().unwrap_or(f64::NAN).sqrt();
    if norm.is_finite() && norm > max_norm {
        grads.scale(T::c(max_norm / norm));
    }
    norm
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub stage: Stage,
    pub steps: usize,
    pub losses: Vec<f64>,
    /// In-batch retrieval accuracy per step (contrastive stages only).
    pub accuracies: Vec<f64>,
    pub learning_rates: Vec<f64>,
    pub chance_accuracy: Option<f64>,
    pub skipped_steps: u64,
    pub initial_loss: Option<f64>,
    /// Mean loss over the last ten steps.
    pub final_loss: Option<f64>,
    pub final_accuracy: Option<f64>,
    /// Logged but not serialized, so reports stay byte-identical across runs.
    #[serde(skip)]
    pub wall_clock_secs: f64,
    pub final_checkpoint: Option<PathBuf>,
}

impl TrainReport {
    fn new(stage: Stage, steps: usize) -> Self {
        Self {
            stage,
            steps,
            losses: Vec::with_capacity(steps),
            accuracies: Vec::new(),
            learning_rates: Vec::with_capacity(steps),
            chance_accuracy: None,
            skipped_steps: 0,
            initial_loss: None,
            final_loss: None,
            final_accuracy: None,
            wall_clock_secs: 0.0,
            final_checkpoint: None,
        }
    }

    fn finish(&mut self, started: Instant) {
        let tail = |xs: &[f64]| (!xs.is_empty()).then(|| {
            let t = &xs[xs.len().saturating_sub(10)..];
            t.iter().sum::<f64>() / t.len() as f64
        });
        self.initial_loss = self.losses.first().copied();
        self.final_loss = tail(&self.losses);
        self.final_accuracy = tail(&self.accuracies);
        self.wall_clock_secs = started.elapsed().as_secs_f64();
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `step,loss,lr[,accuracy]` rows.
    pub fn loss_csv(&self) -> String {
        let with_acc = !self.accuracies.is_empty();
        let mut out = String::from(if with_acc { "step,loss,lr,accuracy\n" } else { "step,loss,lr\n" });
        for (i, loss) in self.losses.iter().enumerate() {
            out.push_str(&format!("{i},{loss},{}", self.learning_rates[i]));
            if with_acc {
                out.push_str(&format!(",{}", self.accuracies[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Where to write checkpoints. `None` keeps everything in memory.
#[derive(Debug, Clone, Default)]
pub struct CheckpointSink {
    pub dir: Option<PathBuf>,
}

impl CheckpointSink {
    fn save(&self, params: &Parameters<f32>, name: &str) -> Result<Option<PathBuf>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join(name);
        params.save(&path)?;
        Ok(Some(path))
    }
}

/// Deterministic, independently seeded streams for one run.
fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

const STREAM_DATA: u64 = 1;
const STREAM_DROPOUT: u64 = 2;

/// Epoch-wise shuffled index stream (without replacement within an epoch).
struct EpochSampler {
    order: Vec<usize>,
    next: usize,
    rng: ChaCha8Rng,
}

impl EpochSampler {
    fn new(len: usize, rng: ChaCha8Rng) -> Self {
        let mut s = Self {
            order: (0..len).collect(),
            next: len,
            rng,
        };
        s.reshuffle();
        s
    }

    fn reshuffle(&mut self) {
        self.order.shuffle(&mut self.rng);
        self.next = 0;
    }

    /// Next `k` indices; an epoch's incomplete tail is dropped.
    fn take(&mut self, k: usize) -> Vec<usize> {
        if self.next + k > self.order.len() {
            self.reshuffle();
        }
        let out = self.order[self.next..self.next + k.min(self.order.len())].to_vec();
        self.next += k;
        out
    }
}

fn check_init(params: &Parameters<f32>, tokenizer: &Tokenizer, max_len: usize) -> Result<()> {
    let cfg = params.config();
    if cfg.vocab_size != tokenizer.vocab_size() {
        return Err(Error::Config(format!(
            "checkpoint vocabulary {} does not match tokenizer vocabulary {}",
            cfg.vocab_size,
            tokenizer.vocab_size()
        )));
    }
    if cfg.max_len < max_len {
        return Err(Error::Config(format!(
            "checkpoint max_len {} is shorter than seq.max_len {max_len}",
            cfg.max_len
        )));
    }
    Ok(())
}

/// Masked denoising over `items`, mixing deobfuscation and random masking.
pub fn train_stage1(
    config: &TrainConfig,
    tokenizer: &Tokenizer,
    items: &[Stage1Item],
    init: Option<Parameters<f32>>,
    sink: &CheckpointSink,
) -> Result<(Parameters<f32>, TrainReport)> {
    config.validate()?;
    if items.is_empty() {
        return Err(Error::Config("pretraining corpus is empty".into()));
    }
    let started = Instant::now();
    let mut params = match init {
        Some(p) => {
            check_init(&p, tokenizer, config.seq.max_len)?;
            p
        }
        None => Parameters::init(&config.encoder_config(tokenizer.vocab_size())?, config.seed)?,
    };
    let specials = SpecialIds::of(tokenizer);
    let denoise = config.denoise();
    let vocab = params.config().vocab_size;
    let dim = params.config().model_dim;
    let mut opt = AdamW::new(&params);
    let mut sampler = EpochSampler::new(items.len(), stream(config.seed, STREAM_DATA));
    let mut mask_rng = stream(config.seed, STREAM_DATA + 10);
    let mut dropout_rng = stream(config.seed, STREAM_DROPOUT);
    let mut report = TrainReport::new(Stage::Stage1, config.steps);

    for step in 0..config.steps {
        let batch = loop {
            let idx = sampler.take(config.batch_size);
            let chosen: Vec<&Stage1Item> = idx.iter().map(|&i| &items[i]).collect();
            let b = collate_stage1(&chosen, &denoise, &specials, &mut mask_rng)?;
            if !b.labels.is_empty() {
                break b;
            }
        };
        let (hidden, cache) = params.forward(&batch.tokens, Mode::Train(&mut dropout_rng))?;
        let rows = batch.label_rows();
        let logits = params.mlm_logits(&hidden, &rows);
        let (loss, d_logits) = mlm_loss(&logits, vocab, &batch.label_ids())?;
        let mut grads = params.zeros_like();
        let mut d_hidden = vec![0.0f32; hidden.len()];
        params.mlm_head_backward(&hidden, &rows, &d_logits, &mut grads, &mut d_hidden);
        params.backward(&cache, &d_hidden, &mut grads)?;
        debug_assert_eq!(d_hidden.len(), batch.tokens.rows * batch.tokens.width * dim);
        clip_grad_norm(&mut grads, config.grad_clip);
        let lr = lr_schedule(step, config.steps, config.warmup_steps, config.base_lr);
        optimizer_step(&mut params, &grads, &mut opt, lr, config.weight_decay);
        report.losses.push(loss as f64);
        report.learning_rates.push(lr);
        if step % 50 == 0 || step + 1 == config.steps {
            log::info!("stage 1 step {step}: loss {loss:.4} lr {lr:.2e}");
        }
        if config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0 {
            sink.save(&params, &format!("step_{:06}.sage", step + 1))?;
        }
    }
    report.skipped_steps = opt.skipped;
    report.finish(started);
    report.final_checkpoint = sink.save(&params, "final.sage")?;
    Ok((params, report))
}

/// Every function under `root`, tokenized and prepared for denoising.
/// Functions that fail to prepare are skipped with a warning.
pub fn load_stage1_items(root: &Path, language: Language, tokenizer: &Tokenizer) -> Result<Vec<Stage1Item>> {
    let ingested = ingest_directory(root, language)?;
    let functions = collect_functions(&ingested.files)?;
    let prepared: Vec<_> = functions
        .par_iter()
        .map(|f| Stage1Item::prepare(&f.source_text, f.language, tokenizer))
        .collect();
    let mut items = Vec::with_capacity(prepared.len());
    for (f, r) in functions.iter().zip(prepared) {
        match r {
            Ok(item) => items.push(item),
            Err(e) => log::warn!("skipping function {}: {e}", f.name),
        }
    }
    Ok(items)
}

/// A tokenized (query, code) training pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairItem {
    pub query: Vec<u32>,
    pub code: Vec<u32>,
}

impl PairItem {
    pub fn new(query: &str, code: &str, tokenizer: &Tokenizer, max_len: usize) -> Self {
        Self {
            query: tokenizer.encode_sequence(query, max_len),
            code: tokenizer.encode_sequence(code, max_len),
        }
    }
}

/// Pooled sequence embeddings and the caches needed to backpropagate.
fn encode_pooled(
    params: &Parameters<f32>,
    seqs: Vec<Vec<u32>>,
    pad: u32,
    mode: Mode<'_>,
) -> Result<(Vec<f32>, crate::encoder::ForwardCache<f32>)> {
    let batch = TokenBatch::from_sequences(&seqs, pad);
    let (hidden, cache) = params.forward(&batch, mode)?;
    let pooled = params.pool_mean(&hidden, &batch)?;
    Ok((pooled, cache))
}

/// Contrastive training on pairs. `init` is required unless the stage is
/// [`Stage::Stage2FromScratch`], which always starts from a fresh encoder.
pub fn train_stage2(
    config: &TrainConfig,
    tokenizer: &Tokenizer,
    pairs: &[PairItem],
    init: Option<Parameters<f32>>,
    sink: &CheckpointSink,
) -> Result<(Parameters<f32>, TrainReport)> {
    config.validate()?;
    if config.batch_size < 2 {
        return Err(Error::Config("contrastive training needs batch_size >= 2".into()));
    }
    if pairs.len() < config.batch_size {
        return Err(Error::Config(format!(
            "{} pairs cannot fill a batch of {}",
            pairs.len(),
            config.batch_size
        )));
    }
    let started = Instant::now();
    let mut params = match (config.stage, init) {
        (Stage::Stage2, Some(p)) => {
            check_init(&p, tokenizer, config.seq.max_len)?;
            p
        }
        (Stage::Stage2, None) => {
            return Err(Error::Config("stage 2 needs an initial checkpoint; use 2-scratch to train from scratch".into()))
        }
        (Stage::Stage2FromScratch, _) => {
            Parameters::init(&config.encoder_config(tokenizer.vocab_size())?, config.seed)?
        }
        (Stage::Stage1, _) => return Err(Error::Config("train_stage2 called with stage 1 config".into())),
    };
    let pad = tokenizer.pad_id();
    let dim = params.config().model_dim;
    let tau = config.temperature as f32;
    let mut opt = AdamW::new(&params);
    let mut sampler = EpochSampler::new(pairs.len(), stream(config.seed, STREAM_DATA));
    let mut dropout_rng = stream(config.seed, STREAM_DROPOUT);
    let mut report = TrainReport::new(config.stage, config.steps);
    report.chance_accuracy = Some(1.0 / (2 * config.batch_size - 1) as f64);

    for step in 0..config.steps {
        let idx = sampler.take(config.batch_size);
        let queries = idx.iter().map(|&i| pairs[i].query.clone()).collect();
        let codes = idx.iter().map(|&i| pairs[i].code.clone()).collect();
        let (h, qcache) = encode_pooled(&params, queries, pad, Mode::Train(&mut dropout_rng))?;
        let (hp, ccache) = encode_pooled(&params, codes, pad, Mode::Train(&mut dropout_rng))?;
        let out = contrastive_loss(&h, &hp, dim, tau)?;
        let mut grads = params.zeros_like();
        let dq = pool_mean_backward(&out.d_anchors, qcache.batch(), dim);
        params.backward(&qcache, &dq, &mut grads)?;
        let dc = pool_mean_backward(&out.d_positives, ccache.batch(), dim);
        params.backward(&ccache, &dc, &mut grads)?;
        clip_grad_norm(&mut grads, config.grad_clip);
        let lr = lr_schedule(step, config.steps, config.warmup_steps, config.base_lr);
        optimizer_step(&mut params, &grads, &mut opt, lr, config.weight_decay);
        let acc = in_batch_accuracy(&out.similarity, 2 * config.batch_size);
        report.losses.push(out.loss as f64);
        report.accuracies.push(acc);
        report.learning_rates.push(lr);
        if step % 20 == 0 || step + 1 == config.steps {
            log::info!("stage {} step {step}: loss {:.4} in-batch acc {acc:.3}", config.stage, out.loss);
        }
        if config.checkpoint_every > 0 && (step + 1) % config.checkpoint_every == 0 {
            sink.save(&params, &format!("step_{:06}.sage", step + 1))?;
        }
    }
    report.skipped_steps = opt.skipped;
    report.finish(started);
    report.final_checkpoint = sink.save(&params, "final.sage")?;
    Ok((params, report))
}

/// Write `report.json` and `loss.csv` into `dir`.
pub fn write_report(report: &TrainReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = dir.join("report.json");
    std::fs::write(&json, report.to_json()?).map_err(|e| Error::io(&json, e))?;
    let csv = dir.join("loss.csv");
    std::fs::write(&csv, report.loss_csv()).map_err(|e| Error::io(&csv, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::TokenizerConfig;

    fn param_config() -> EncoderConfig {
        EncoderConfig {
            layers: 1,
            heads: 1,
            model_dim: 1,
            ff_dim: 1,
            vocab_size: 1,
            max_len: 1,
            dropout: 0.0,
            seed: 0,
        }
    }

    fn single(value: f64) -> Parameters<f64> {
        let mut p = Parameters::<f64>::zeros(&param_config());
        for t in p.tensors_mut() {
            t.data.fill(value);
        }
        p
    }

    #[test]
    fn schedule_endpoints() {
        assert_eq!(lr_schedule(0, 100, 10, 3e-4), 0.0);
        assert_eq!(lr_schedule(10, 100, 10, 3e-4), 3e-4);
        assert_eq!(lr_schedule(100, 100, 10, 3e-4), 0.0);
        assert!((lr_schedule(55, 100, 10, 3e-4) - 1.5e-4).abs() < 1e-18);
        assert_eq!(lr_schedule(0, 10, 0, 1.0), 1.0);
    }

    #[test]
    fn zero_grads_leave_params() {
        let mut p = single(0.7);
        let g = single(0.0);
        let mut st = AdamW::new(&p);
        assert!(optimizer_step(&mut p, &g, &mut st, 0.1, 0.0));
        assert_eq!(p, single(0.7));
        assert_eq!(st.m, single(0.0));
        assert_eq!(st.v, single(0.0));
    }

    #[test]
    fn decoupled_decay_shrinks() {
        let mut p = single(2.0);
        let mut st = AdamW::new(&p);
        optimizer_step(&mut p, &single(0.0), &mut st, 0.1, 0.5);
        assert!(p.tensors().iter().all(|t| t.data.iter().all(|&v| (v - 2.0 * (1.0 - 0.05)).abs() < 1e-15)));
    }

    #[test]
    fn two_scalar_steps_match_hand_computation() {
        let mut p = single(1.0);
        let mut st = AdamW::new(&p);
        let (lr, wd) = (0.01, 0.1);
        optimizer_step(&mut p, &single(0.5), &mut st, lr, wd);
        optimizer_step(&mut p, &single(-0.2), &mut st, lr, wd);
        // by hand
        let (b1, b2, eps) = (0.9f64, 0.999f64, 1e-8);
        let mut x = 1.0f64;
        let (mut m, mut v) = (0.0, 0.0);
        for (t, g) in [(1, 0.5f64), (2, -0.2)] {
            m = b1 * m + (1.0 - b1) * g;
            v = b2 * v + (1.0 - b2) * g * g;
            let mh = m / (1.0 - b1.powi(t));
            let vh = v / (1.0 - b2.powi(t));
            x = x - lr * wd * x - lr * mh / (vh.sqrt() + eps);
        }
        let got = p.tensors()[0].data[0];
        assert!((got - x).abs() < 1e-15, "{got} vs {x}");
    }

    #[test]
    fn non_finite_grad_skips() {
        let mut p = single(1.0);
        let mut st = AdamW::new(&p);
        assert!(!optimizer_step(&mut p, &single(f64::NAN), &mut st, 0.1, 0.0));
        assert_eq!(st.skipped, 1);
        assert_eq!(st.t, 0);
        assert_eq!(p, single(1.0));
    }

    #[test]
    fn clipping() {
        let mut g = single(1.0);
        let n = g.num_params() as f64;
        let before = clip_grad_norm(&mut g, 1.0);
        assert!((before - n.sqrt()).abs() < 1e-12);
        assert!((g.squared_norm().sqrt() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_round_trip_and_validation() {
        let cfg = TrainConfig::for_stage(Stage::Stage2);
        let text = cfg.to_toml().unwrap();
        assert_eq!(TrainConfig::from_toml(&text).unwrap(), cfg);
        assert!(TrainConfig::from_toml("steps = 5\nwarmup_steps = 6\n").is_err());
        assert!(TrainConfig::from_toml("stage = \"2\"\nbatch_size = 1\n").is_err());
        assert!(TrainConfig::from_toml("nope = 1\n").is_err());
        let cfg = TrainConfig::from_toml("stage = \"1\"\n[mask]\nrate = 0.3\n[seq]\nmax_len = 64\n").unwrap();
        assert_eq!(cfg.seq.max_len, 64);
    }

    fn fixture() -> (Tokenizer, Vec<String>) {
        let funcs: Vec<String> = (0..12)
            .map(|i| format!("def add_{i}(left, right):\n    total = left + right * {i}\n    return total\n"))
            .collect();
        let cfg = TokenizerConfig {
            vocab_size: 420,
            max_placeholders: 8,
            min_frequency: 2,
        };
        let tok = Tokenizer::train(funcs.iter().map(String::as_str), &cfg, 0).unwrap();
        (tok, funcs)
    }

    fn small_config(stage: Stage) -> TrainConfig {
        let mut cfg = TrainConfig::for_stage(stage);
        cfg.steps = 4;
        cfg.warmup_steps = 1;
        cfg.batch_size = 4;
        cfg.seq.max_len = 32;
        cfg
    }

    #[test]
    fn stage1_is_deterministic_and_zero_steps_is_init() {
        let (tok, funcs) = fixture();
        let items: Vec<Stage1Item> = funcs
            .iter()
            .map(|f| Stage1Item::prepare(f, Language::Python, &tok).unwrap())
            .collect();
        let cfg = small_config(Stage::Stage1);
        let (a, ra) = train_stage1(&cfg, &tok, &items, None, &CheckpointSink::default()).unwrap();
        let (b, rb) = train_stage1(&cfg, &tok, &items, None, &CheckpointSink::default()).unwrap();
        assert_eq!(a.to_bytes().unwrap(), b.to_bytes().unwrap());
        assert_eq!(ra.losses, rb.losses);
        assert_eq!(ra.losses.len(), 4);
        assert!(ra.losses.iter().all(|l| l.is_finite()));

        let zero = TrainConfig { steps: 0, warmup_steps: 0, ..cfg.clone() };
        let dir = tempfile::tempdir().unwrap();
        let sink = CheckpointSink {
            dir: Some(dir.path().to_path_buf()),
        };
        let (p, r) = train_stage1(&zero, &tok, &items, None, &sink).unwrap();
        let init = Parameters::<f32>::init(&zero.encoder_config(tok.vocab_size()).unwrap(), zero.seed).unwrap();
        assert_eq!(p, init);
        assert_eq!(Parameters::<f32>::load(r.final_checkpoint.as_ref().unwrap()).unwrap(), init);
        assert!(train_stage1(&cfg, &tok, &[], None, &CheckpointSink::default()).is_err());
    }

    #[test]
    fn stage2_requires_init_and_batch() {
        let (tok, funcs) = fixture();
        let pairs: Vec<PairItem> = funcs.iter().map(|f| PairItem::new("add numbers", f, &tok, 32)).collect();
        let cfg = small_config(Stage::Stage2);
        assert!(train_stage2(&cfg, &tok, &pairs, None, &CheckpointSink::default()).is_err());
        let scratch = small_config(Stage::Stage2FromScratch);
        let (p, r) = train_stage2(&scratch, &tok, &pairs, None, &CheckpointSink::default()).unwrap();
        assert_eq!(r.accuracies.len(), 4);
        assert_eq!(r.chance_accuracy, Some(1.0 / 7.0));
        let (q, r2) = train_stage2(&scratch, &tok, &pairs, None, &CheckpointSink::default()).unwrap();
        assert_eq!(p, q);
        assert_eq!(r.losses, r2.losses);
        let (_, r3) = train_stage2(&cfg, &tok, &pairs, Some(p.clone()), &CheckpointSink::default()).unwrap();
        assert!(r3.losses.iter().all(|l| l.is_finite()));
        let zero = TrainConfig { steps: 0, warmup_steps: 0, ..cfg };
        let (z, _) = train_stage2(&zero, &tok, &pairs, Some(p.clone()), &CheckpointSink::default()).unwrap();
        assert_eq!(z, p);
        let one = TrainConfig { batch_size: 1, ..scratch };
        assert!(train_stage2(&one, &tok, &pairs, None, &CheckpointSink::default()).is_err());
    }

    #[test]
    fn report_csv_shape() {
        let mut r = TrainReport::new(Stage::Stage2, 2);
        r.losses = vec![1.0, 0.5];
        r.learning_rates = vec![0.0, 0.1];
        r.accuracies = vec![0.25, 0.5];
        assert_eq!(r.loss_csv(), "step,loss,lr,accuracy\n0,1,0,0.25\n1,0.5,0.1,0.5\n");
    }
}
