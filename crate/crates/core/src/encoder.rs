//! Bidirectional transformer encoder with a hand-written backward pass.
//!
//! Pre-norm residual blocks (layer norm, fused QKV self-attention, GELU
//! feed-forward), learned absolute positions, a final layer norm, and an MLM
//! head whose weight is the token embedding matrix. Generic over `f32` for
//! training and `f64` for finite-difference checks.

use std::fmt::Debug;
use std::io::{Read, Write};
use std::iter::Sum;
use std::path::Path;

use num_traits::Float;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LN_EPS: f64 = 1e-5;
pub const INIT_STD: f64 = 0.02;

pub trait Scalar: Float + Default + Debug + Send + Sync + Sum + 'static {
    /// Raw strided `c = alpha*a*b + beta*c`.
    ///
    /// # Safety
    /// Pointers and strides must describe valid `m×k`, `k×n` and `m×n` views.
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );

    fn c(x: f64) -> Self {
        Self::from(x).expect("representable constant")
    }
}

impl Scalar for f32 {
    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const f32,
        rsa: isize,
        csa: isize,
        b: *const f32,
        rsb: isize,
        csb: isize,
        beta: f32,
        c: *mut f32,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc);
    }
}

impl Scalar for f64 {
    unsafe fn gemm(
        m: usize,
        k: usize,
        n: usize,
        a: *const f64,
        rsa: isize,
        csa: isize,
        b: *const f64,
        rsb: isize,
        csb: isize,
        beta: f64,
        c: *mut f64,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, 1.0, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc);
    }
}

/// Row-major `c (+)= op(a) · op(b)` with `op(a)` of shape `m×k` and `op(b)` of
/// shape `k×n`. A transposed operand is stored in its untransposed layout.
#[allow(clippy::too_many_arguments)]
pub(crate) fn matmul<T: Scalar>(
    m: usize,
    k: usize,
    n: usize,
    a: &[T],
    trans_a: bool,
    b: &[T],
    trans_b: bool,
    c: &mut [T],
    accumulate: bool,
) {
    assert_eq!(a.len(), m * k, "lhs shape");
    assert_eq!(b.len(), k * n, "rhs shape");
    assert_eq!(c.len(), m * n, "output shape");
    if m == 0 || n == 0 {
        return;
    }
    if k == 0 {
        if !accumulate {
            c.fill(T::zero());
        }
        return;
    }
    let (rsa, csa) = if trans_a { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if trans_b { (1, k as isize) } else { (n as isize, 1) };
    let beta = if accumulate { T::one() } else { T::zero() };
    // SAFETY: lengths asserted above match the strided views.
    unsafe {
        T::gemm(m, k, n, a.as_ptr(), rsa, csa, b.as_ptr(), rsb, csb, beta, c.as_mut_ptr(), n as isize, 1);
    }
}

fn add_bias<T: Scalar>(x: &mut [T], bias: &[T]) {
    for row in x.chunks_exact_mut(bias.len()) {
        for (v, &b) in row.iter_mut().zip(bias) {
            *v = *v + b;
        }
    }
}

fn add_col_sums<T: Scalar>(acc: &mut [T], x: &[T]) {
    for row in x.chunks_exact(acc.len()) {
        for (a, &v) in acc.iter_mut().zip(row) {
            *a = *a + v;
        }
    }
}

fn gelu<T: Scalar>(u: T) -> T {
    let k = T::c((2.0 / std::f64::consts::PI).sqrt());
    let inner = k * (u + T::c(0.044715) * u * u * u);
    T::c(0.5) * u * (T::one() + inner.tanh())
}

fn gelu_grad<T: Scalar>(u: T) -> T {
    let k = T::c((2.0 / std::f64::consts::PI).sqrt());
    let inner = k * (u + T::c(0.044715) * u * u * u);
    let t = inner.tanh();
    let dinner = k * (T::one() + T::c(3.0 * 0.044715) * u * u);
    T::c(0.5) * (T::one() + t) + T::c(0.5) * u * (T::one() - t * t) * dinner
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderConfig {
    pub layers: usize,
    pub heads: usize,
    pub model_dim: usize,
    pub ff_dim: usize,
    pub vocab_size: usize,
    pub max_len: usize,
    pub dropout: f64,
    pub seed: u64,
}

impl EncoderConfig {
    /// Named architecture presets. `tiny` and `mini` are meant for CPU
    /// runs; `small`, `base` and `large` are full-size models with a 4x
    /// feed-forward width.
    pub fn preset(name: &str, vocab_size: usize, max_len: usize) -> Result<Self> {
        let (layers, model_dim, heads, ff_dim) = match name {
            "tiny" => (2, 64, 4, 256),
            "mini" => (4, 128, 4, 512),
            "small" => (6, 1024, 8, 4096),
            "base" => (24, 1024, 8, 4096),
            "large" => (24, 2048, 16, 8192),
            other => return Err(Error::Config(format!("unknown encoder preset `{other}`"))),
        };
        let cfg = Self {
            layers,
            heads,
            model_dim,
            ff_dim,
            vocab_size,
            max_len,
            dropout: 0.1,
            seed: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.heads == 0 || self.model_dim == 0 || self.model_dim % self.heads != 0 {
            return fail(format!(
                "model_dim {} must be a positive multiple of heads {}",
                self.model_dim, self.heads
            ));
        }
        if self.ff_dim == 0 || self.vocab_size == 0 || self.max_len == 0 {
            return fail("ff_dim, vocab_size and max_len must be positive".into());
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail(format!("dropout {} outside [0, 1)", self.dropout));
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.model_dim / self.heads
    }

    /// `(name, shape)` of every tensor in storage order.
    pub fn tensor_shapes(&self) -> Vec<(String, Vec<usize>)> {
        let (d, f) = (self.model_dim, self.ff_dim);
        let mut out = vec![
            ("embeddings.token".to_owned(), vec![self.vocab_size, d]),
            ("embeddings.position".to_owned(), vec![self.max_len, d]),
        ];
        for l in 0..self.layers {
            let p = format!("layers.{l}");
            out.extend([
                (format!("{p}.attn_norm.weight"), vec![d]),
                (format!("{p}.attn_norm.bias"), vec![d]),
                (format!("{p}.attn.qkv.weight"), vec![d, 3 * d]),
                (format!("{p}.attn.qkv.bias"), vec![3 * d]),
                (format!("{p}.attn.out.weight"), vec![d, d]),
                (format!("{p}.attn.out.bias"), vec![d]),
                (format!("{p}.ff_norm.weight"), vec![d]),
                (format!("{p}.ff_norm.bias"), vec![d]),
                (format!("{p}.ff.in.weight"), vec![d, f]),
                (format!("{p}.ff.in.bias"), vec![f]),
                (format!("{p}.ff.out.weight"), vec![f, d]),
                (format!("{p}.ff.out.bias"), vec![d]),
            ]);
        }
        out.extend([
            ("final_norm.weight".to_owned(), vec![d]),
            ("final_norm.bias".to_owned(), vec![d]),
            ("mlm.bias".to_owned(), vec![self.vocab_size]),
        ]);
        out
    }
}

const TOK: usize = 0;
const POS: usize = 1;
const PER_LAYER: usize = 12;
const LN1_G: usize = 0;
const LN1_B: usize = 1;
const QKV_W: usize = 2;
const QKV_B: usize = 3;
const OUT_W: usize = 4;
const OUT_B: usize = 5;
const LN2_G: usize = 6;
const LN2_B: usize = 7;
const FF1_W: usize = 8;
const FF1_B: usize = 9;
const FF2_W: usize = 10;
const FF2_B: usize = 11;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<T>,
}

/// All trainable weights, also used as the gradient container.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<T> {
    config: EncoderConfig,
    tensors: Vec<Tensor<T>>,
}

impl<T: Scalar> Parameters<T> {
    /// Normal(0, 0.02) weights, zero biases, unit norm gains.
    pub fn init(config: &EncoderConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, INIT_STD).expect("valid std");
        let tensors = config
            .tensor_shapes()
            .into_iter()
            .map(|(name, shape)| {
                let len = shape.iter().product();
                let data = if name.ends_with("norm.weight") {
                    vec![T::one(); len]
                } else if shape.len() == 2 {
                    (0..len).map(|_| T::c(normal.sample(&mut rng))).collect()
                } else {
                    vec![T::zero(); len]
                };
                Tensor { name, shape, data }
            })
            .collect();
        Ok(Self {
            config: config.clone(),
            tensors,
        })
    }

    pub fn zeros(config: &EncoderConfig) -> Self {
        let tensors = config
            .tensor_shapes()
            .into_iter()
            .map(|(name, shape)| {
                let len = shape.iter().product();
                Tensor {
                    name,
                    shape,
                    data: vec![T::zero(); len],
                }
            })
            .collect();
        Self {
            config: config.clone(),
            tensors,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(&self.config)
    }

    pub fn config(&self) -> &EncoderConfig {
        &self.config
    }

    pub fn tensors(&self) -> &[Tensor<T>] {
        &self.tensors
    }

    pub fn tensors_mut(&mut self) -> &mut [Tensor<T>] {
        &mut self.tensors
    }

    pub fn tensor(&self, name: &str) -> Option<&Tensor<T>> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn num_params(&self) -> usize {
        self.tensors.iter().map(|t| t.data.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors.iter().all(|t| t.data.iter().all(|v| v.is_finite()))
    }

    pub fn cast<U: Scalar>(&self) -> Parameters<U> {
        Parameters {
            config: self.config.clone(),
            tensors: self
                .tensors
                .iter()
                .map(|t| Tensor {
                    name: t.name.clone(),
                    shape: t.shape.clone(),
                    data: t.data.iter().map(|&v| U::from(v).expect("castable")).collect(),
                })
                .collect(),
        }
    }

    /// Multiply every entry by `s`.
    pub fn scale(&mut self, s: T) {
        for t in &mut self.tensors {
            for v in &mut t.data {
                *v = *v * s;
            }
        }
    }

    pub fn squared_norm(&self) -> T {
        self.tensors
            .iter()
            .flat_map(|t| t.data.iter())
            .fold(T::zero(), |acc, &v| acc + v * v)
    }

    fn layer(&self, l: usize, which: usize) -> &[T] {
        &self.tensors[2 + l * PER_LAYER + which].data
    }

    fn layer_mut(&mut self, l: usize, which: usize) -> &mut [T] {
        &mut self.tensors[2 + l * PER_LAYER + which].data
    }

    fn final_norm(&self) -> (&[T], &[T]) {
        let base = 2 + self.config.layers * PER_LAYER;
        (&self.tensors[base].data, &self.tensors[base + 1].data)
    }

    fn mlm_bias_index(&self) -> usize {
        2 + self.config.layers * PER_LAYER + 2
    }
}

/// Padded id matrix with its attention mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenBatch {
    pub ids: Vec<u32>,
    /// `true` on real tokens, `false` on padding.
    pub mask: Vec<bool>,
    pub rows: usize,
    pub width: usize,
}

impl TokenBatch {
    pub fn from_sequences(seqs: &[Vec<u32>], pad: u32) -> Self {
        let width = seqs.iter().map(Vec::len).max().unwrap_or(0);
        let mut ids = Vec::with_capacity(seqs.len() * width);
        let mut mask = Vec::with_capacity(seqs.len() * width);
        for s in seqs {
            ids.extend_from_slice(s);
            mask.extend(std::iter::repeat_n(true, s.len()));
            ids.extend(std::iter::repeat_n(pad, width - s.len()));
            mask.extend(std::iter::repeat_n(false, width - s.len()));
        }
        Self {
            ids,
            mask,
            rows: seqs.len(),
            width,
        }
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.mask
            .chunks(self.width.max(1))
            .take(self.rows)
            .map(|r| r.iter().filter(|&&m| m).count())
            .collect()
    }
}

/// Whether dropout is active. Training draws masks from the given generator.
pub enum Mode<'a> {
    Eval,
    Train(&'a mut ChaCha8Rng),
}

struct NormCache<T> {
    xhat: Vec<T>,
    rstd: Vec<T>,
}

struct LayerCache<T> {
    norm1: NormCache<T>,
    a: Vec<T>,
    qkv: Vec<T>,
    probs: Vec<T>,
    ctx: Vec<T>,
    drop_attn: Option<Vec<T>>,
    norm2: NormCache<T>,
    c: Vec<T>,
    u: Vec<T>,
    g: Vec<T>,
    drop_ff: Option<Vec<T>>,
}

/// Activations saved by [`Parameters::forward`] for the backward pass.
pub struct ForwardCache<T> {
    batch: TokenBatch,
    drop_emb: Option<Vec<T>>,
    layers: Vec<LayerCache<T>>,
    final_norm: NormCache<T>,
}

impl<T> ForwardCache<T> {
    pub fn batch(&self) -> &TokenBatch {
        &self.batch
    }
}

fn layer_norm<T: Scalar>(x: &[T], gain: &[T], bias: &[T]) -> (Vec<T>, NormCache<T>) {
    let d = gain.len();
    let n = x.len() / d;
    let mut y = vec![T::zero(); x.len()];
    let mut xhat = vec![T::zero(); x.len()];
    let mut rstd = vec![T::zero(); n];
    let inv_d = T::c(1.0 / d as f64);
    for r in 0..n {
        let row = &x[r * d..(r + 1) * d];
        let mean = row.iter().copied().sum::<T>() * inv_d;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() * inv_d;
        let rs = (var + T::c(LN_EPS)).sqrt().recip();
        rstd[r] = rs;
        for j in 0..d {
            let h = (row[j] - mean) * rs;
            xhat[r * d + j] = h;
            y[r * d + j] = h * gain[j] + bias[j];
        }
    }
    (y, NormCache { xhat, rstd })
}

/// Returns dx; accumulates gain/bias gradients.
fn layer_norm_backward<T: Scalar>(
    dy: &[T],
    cache: &NormCache<T>,
    gain: &[T],
    dgain: &mut [T],
    dbias: &mut [T],
) -> Vec<T> {
    let d = gain.len();
    let n = dy.len() / d;
    let inv_d = T::c(1.0 / d as f64);
    let mut dx = vec![T::zero(); dy.len()];
    let mut dxhat = vec![T::zero(); d];
    for r in 0..n {
        let dyr = &dy[r * d..(r + 1) * d];
        let xh = &cache.xhat[r * d..(r + 1) * d];
        let mut mean_dxhat = T::zero();
        let mut mean_dxhat_xhat = T::zero();
        for j in 0..d {
            dgain[j] = dgain[j] + dyr[j] * xh[j];
            dbias[j] = dbias[j] + dyr[j];
            dxhat[j] = dyr[j] * gain[j];
            mean_dxhat = mean_dxhat + dxhat[j];
            mean_dxhat_xhat = mean_dxhat_xhat + dxhat[j] * xh[j];
        }
        mean_dxhat = mean_dxhat * inv_d;
        mean_dxhat_xhat = mean_dxhat_xhat * inv_d;
        let rs = cache.rstd[r];
        for j in 0..d {
            dx[r * d + j] = rs * (dxhat[j] - mean_dxhat - xh[j] * mean_dxhat_xhat);
        }
    }
    dx
}

fn dropout_mask<T: Scalar>(len: usize, rate: f64, mode: &mut Mode<'_>) -> Option<Vec<T>> {
    match mode {
        Mode::Train(rng) if rate > 0.0 => {
            let keep = T::c(1.0 / (1.0 - rate));
            Some(
                (0..len)
                    .map(|_| if rng.random::<f64>() < rate { T::zero() } else { keep })
                    .collect(),
            )
        }
        _ => None,
    }
}

fn apply_mask<T: Scalar>(x: &mut [T], mask: &Option<Vec<T>>) {
    if let Some(m) = mask {
        for (v, &k) in x.iter_mut().zip(m) {
            *v = *v * k;
        }
    }
}

impl<T: Scalar> Parameters<T> {
    /// Encode a batch into last-layer hidden states, `rows·width × model_dim`.
    pub fn forward(&self, batch: &TokenBatch, mut mode: Mode<'_>) -> Result<(Vec<T>, ForwardCache<T>)> {
        let cfg = &self.config;
        let (b, s, d) = (batch.rows, batch.width, cfg.model_dim);
        let n = b * s;
        if batch.ids.len() != n || batch.mask.len() != n {
            return Err(Error::Argument("token batch shape mismatch".into()));
        }
        if s > cfg.max_len {
            return Err(Error::Argument(format!("sequence width {s} exceeds max_len {}", cfg.max_len)));
        }
        if let Some(&bad) = batch.ids.iter().find(|&&id| id as usize >= cfg.vocab_size) {
            return Err(Error::Argument(format!("token id {bad} outside vocabulary of {}", cfg.vocab_size)));
        }

        let tok = &self.tensors[TOK].data;
        let pos = &self.tensors[POS].data;
        let mut x = vec![T::zero(); n * d];
        for r in 0..n {
            let id = batch.ids[r] as usize;
            let p = r % s;
            for j in 0..d {
                x[r * d + j] = tok[id * d + j] + pos[p * d + j];
            }
        }
        let drop_emb = dropout_mask(n * d, cfg.dropout, &mut mode);
        apply_mask(&mut x, &drop_emb);

        let mut layers = Vec::with_capacity(cfg.layers);
        for l in 0..cfg.layers {
            let (a, norm1) = layer_norm(&x, self.layer(l, LN1_G), self.layer(l, LN1_B));
            let mut qkv = vec![T::zero(); n * 3 * d];
            matmul(n, d, 3 * d, &a, false, self.layer(l, QKV_W), false, &mut qkv, false);
            add_bias(&mut qkv, self.layer(l, QKV_B));
            let (ctx, probs) = self.attention(&qkv, batch);
            let mut o = vec![T::zero(); n * d];
            matmul(n, d, d, &ctx, false, self.layer(l, OUT_W), false, &mut o, false);
            add_bias(&mut o, self.layer(l, OUT_B));
            let drop_attn = dropout_mask(n * d, cfg.dropout, &mut mode);
            apply_mask(&mut o, &drop_attn);
            for (xv, ov) in x.iter_mut().zip(&o) {
                *xv = *xv + *ov;
            }

            let f = cfg.ff_dim;
            let (c, norm2) = layer_norm(&x, self.layer(l, LN2_G), self.layer(l, LN2_B));
            let mut u = vec![T::zero(); n * f];
            matmul(n, d, f, &c, false, self.layer(l, FF1_W), false, &mut u, false);
            add_bias(&mut u, self.layer(l, FF1_B));
            let g: Vec<T> = u.iter().map(|&v| gelu(v)).collect();
            let mut h = vec![T::zero(); n * d];
            matmul(n, f, d, &g, false, self.layer(l, FF2_W), false, &mut h, false);
            add_bias(&mut h, self.layer(l, FF2_B));
            let drop_ff = dropout_mask(n * d, cfg.dropout, &mut mode);
            apply_mask(&mut h, &drop_ff);
            for (xv, hv) in x.iter_mut().zip(&h) {
                *xv = *xv + *hv;
            }
            layers.push(LayerCache {
                norm1,
                a,
                qkv,
                probs,
                ctx,
                drop_attn,
                norm2,
                c,
                u,
                g,
                drop_ff,
            });
        }
        let (gain, bias) = self.final_norm();
        let (hidden, final_norm) = layer_norm(&x, gain, bias);
        Ok((
            hidden,
            ForwardCache {
                batch: batch.clone(),
                drop_emb,
                layers,
                final_norm,
            },
        ))
    }

    /// Masked multi-head attention. Pad keys get zero weight and pad queries
    /// produce a zero context.
    fn attention(&self, qkv: &[T], batch: &TokenBatch) -> (Vec<T>, Vec<T>) {
        let cfg = &self.config;
        let (b, s, d, heads, hd) = (batch.rows, batch.width, cfg.model_dim, cfg.heads, cfg.head_dim());
        let scale = T::c(1.0 / (hd as f64).sqrt());
        let mut ctx = vec![T::zero(); b * s * d];
        let mut probs = vec![T::zero(); b * heads * s * s];
        let mut q = vec![T::zero(); s * hd];
        let mut k = vec![T::zero(); s * hd];
        let mut v = vec![T::zero(); s * hd];
        let mut out = vec![T::zero(); s * hd];
        for bi in 0..b {
            let mask = &batch.mask[bi * s..(bi + 1) * s];
            for h in 0..heads {
                gather_head(qkv, bi, s, d, h, hd, 0, &mut q);
                gather_head(qkv, bi, s, d, h, hd, 1, &mut k);
                gather_head(qkv, bi, s, d, h, hd, 2, &mut v);
                let p = &mut probs[(bi * heads + h) * s * s..(bi * heads + h + 1) * s * s];
                matmul(s, hd, s, &q, false, &k, true, p, false);
                for i in 0..s {
                    let row = &mut p[i * s..(i + 1) * s];
                    if !mask[i] {
                        row.fill(T::zero());
                        continue;
                    }
                    let mut max = T::neg_infinity();
                    for j in 0..s {
                        if mask[j] {
                            row[j] = row[j] * scale;
                            max = max.max(row[j]);
                        }
                    }
                    let mut sum = T::zero();
                    for j in 0..s {
                        row[j] = if mask[j] { (row[j] - max).exp() } else { T::zero() };
                        sum = sum + row[j];
                    }
                    for w in row.iter_mut() {
                        *w = *w / sum;
                    }
                }
                matmul(s, s, hd, p, false, &v, false, &mut out, false);
                for i in 0..s {
                    let dst = (bi * s + i) * d + h * hd;
                    ctx[dst..dst + hd].copy_from_slice(&out[i * hd..(i + 1) * hd]);
                }
            }
        }
        (ctx, probs)
    }

    /// Accumulate parameter gradients for `d_hidden` into `grads`.
    pub fn backward(&self, cache: &ForwardCache<T>, d_hidden: &[T], grads: &mut Parameters<T>) -> Result<()> {
        let cfg = &self.config;
        let batch = &cache.batch;
        let (s, d, f) = (batch.width, cfg.model_dim, cfg.ff_dim);
        let n = batch.rows * s;
        if d_hidden.len() != n * d || cache.layers.len() != cfg.layers || grads.config != self.config {
            return Err(Error::Integrity("backward cache does not match parameters".into()));
        }
        let base = 2 + cfg.layers * PER_LAYER;
        let (dg, rest) = grads.tensors[base..].split_at_mut(1);
        let mut dx = layer_norm_backward(
            d_hidden,
            &cache.final_norm,
            &self.tensors[base].data,
            &mut dg[0].data,
            &mut rest[0].data,
        );

        for l in (0..cfg.layers).rev() {
            let lc = &cache.layers[l];
            // feed-forward branch
            let mut dh = dx.clone();
            apply_mask(&mut dh, &lc.drop_ff);
            matmul(f, n, d, &lc.g, true, &dh, false, grads.layer_mut(l, FF2_W), true);
            add_col_sums(grads.layer_mut(l, FF2_B), &dh);
            let mut du = vec![T::zero(); n * f];
            matmul(n, d, f, &dh, false, self.layer(l, FF2_W), true, &mut du, false);
            for (g, &u) in du.iter_mut().zip(&lc.u) {
                *g = *g * gelu_grad(u);
            }
            matmul(d, n, f, &lc.c, true, &du, false, grads.layer_mut(l, FF1_W), true);
            add_col_sums(grads.layer_mut(l, FF1_B), &du);
            let mut dc = vec![T::zero(); n * d];
            matmul(n, f, d, &du, false, self.layer(l, FF1_W), true, &mut dc, false);
            let dxn = {
                let t = &mut grads.tensors[2 + l * PER_LAYER + LN2_G..2 + l * PER_LAYER + LN2_B + 1];
                let (gg, gb) = t.split_at_mut(1);
                layer_norm_backward(&dc, &lc.norm2, self.layer(l, LN2_G), &mut gg[0].data, &mut gb[0].data)
            };
            for (a, b) in dx.iter_mut().zip(&dxn) {
                *a = *a + *b;
            }

            // attention branch
            let mut dout = dx.clone();
            apply_mask(&mut dout, &lc.drop_attn);
            matmul(d, n, d, &lc.ctx, true, &dout, false, grads.layer_mut(l, OUT_W), true);
            add_col_sums(grads.layer_mut(l, OUT_B), &dout);
            let mut dctx = vec![T::zero(); n * d];
            matmul(n, d, d, &dout, false, self.layer(l, OUT_W), true, &mut dctx, false);
            let dqkv = self.attention_backward(&dctx, lc, batch);
            matmul(d, n, 3 * d, &lc.a, true, &dqkv, false, grads.layer_mut(l, QKV_W), true);
            add_col_sums(grads.layer_mut(l, QKV_B), &dqkv);
            let mut da = vec![T::zero(); n * d];
            matmul(n, 3 * d, d, &dqkv, false, self.layer(l, QKV_W), true, &mut da, false);
            let dxn = {
                let t = &mut grads.tensors[2 + l * PER_LAYER + LN1_G..2 + l * PER_LAYER + LN1_B + 1];
                let (gg, gb) = t.split_at_mut(1);
                layer_norm_backward(&da, &lc.norm1, self.layer(l, LN1_G), &mut gg[0].data, &mut gb[0].data)
            };
            for (a, b) in dx.iter_mut().zip(&dxn) {
                *a = *a + *b;
            }
        }

        apply_mask(&mut dx, &cache.drop_emb);
        let (te, pe) = grads.tensors.split_at_mut(1);
        let (dtok, dpos) = (&mut te[TOK].data, &mut pe[0].data);
        for r in 0..n {
            if !batch.mask[r] {
                continue;
            }
            let id = batch.ids[r] as usize;
            let p = r % s;
            for j in 0..d {
                dtok[id * d + j] = dtok[id * d + j] + dx[r * d + j];
                dpos[p * d + j] = dpos[p * d + j] + dx[r * d + j];
            }
        }
        Ok(())
    }

    fn attention_backward(&self, dctx: &[T], lc: &LayerCache<T>, batch: &TokenBatch) -> Vec<T> {
        let cfg = &self.config;
        let (b, s, d, heads, hd) = (batch.rows, batch.width, cfg.model_dim, cfg.heads, cfg.head_dim());
        let scale = T::c(1.0 / (hd as f64).sqrt());
        let mut dqkv = vec![T::zero(); b * s * 3 * d];
        let mut q = vec![T::zero(); s * hd];
        let mut k = vec![T::zero(); s * hd];
        let mut v = vec![T::zero(); s * hd];
        let mut dout = vec![T::zero(); s * hd];
        let mut dp = vec![T::zero(); s * s];
        let mut dq = vec![T::zero(); s * hd];
        let mut dk = vec![T::zero(); s * hd];
        let mut dv = vec![T::zero(); s * hd];
        for bi in 0..b {
            for h in 0..heads {
                gather_head(&lc.qkv, bi, s, d, h, hd, 0, &mut q);
                gather_head(&lc.qkv, bi, s, d, h, hd, 1, &mut k);
                gather_head(&lc.qkv, bi, s, d, h, hd, 2, &mut v);
                for i in 0..s {
                    let src = (bi * s + i) * d + h * hd;
                    dout[i * hd..(i + 1) * hd].copy_from_slice(&dctx[src..src + hd]);
                }
                let p = &lc.probs[(bi * heads + h) * s * s..(bi * heads + h + 1) * s * s];
                matmul(s, s, hd, p, true, &dout, false, &mut dv, false);
                matmul(s, hd, s, &dout, false, &v, true, &mut dp, false);
                for i in 0..s {
                    let pr = &p[i * s..(i + 1) * s];
                    let dr = &mut dp[i * s..(i + 1) * s];
                    let dot: T = pr.iter().zip(dr.iter()).map(|(&a, &b)| a * b).sum();
                    for j in 0..s {
                        dr[j] = pr[j] * (dr[j] - dot) * scale;
                    }
                }
                matmul(s, s, hd, &dp, false, &k, false, &mut dq, false);
                matmul(s, s, hd, &dp, true, &q, false, &mut dk, false);
                scatter_head(&mut dqkv, bi, s, d, h, hd, 0, &dq);
                scatter_head(&mut dqkv, bi, s, d, h, hd, 1, &dk);
                scatter_head(&mut dqkv, bi, s, d, h, hd, 2, &dv);
            }
        }
        dqkv
    }

    /// Mean of hidden states over non-pad positions, one row per sequence.
    pub fn pool_mean(&self, hidden: &[T], batch: &TokenBatch) -> Result<Vec<T>> {
        pool_mean(hidden, batch, self.config.model_dim)
    }

    /// MLM logits `hidden[rows] · Eᵀ + bias`, `rows.len() × vocab_size`.
    pub fn mlm_logits(&self, hidden: &[T], rows: &[usize]) -> Vec<T> {
        let (d, v) = (self.config.model_dim, self.config.vocab_size);
        let h = gather_rows(hidden, rows, d);
        let mut logits = vec![T::zero(); rows.len() * v];
        matmul(rows.len(), d, v, &h, false, &self.tensors[TOK].data, true, &mut logits, false);
        add_bias(&mut logits, &self.tensors[self.mlm_bias_index()].data);
        logits
    }

    /// Logits for every position of `hidden`.
    pub fn mlm_logits_all(&self, hidden: &[T]) -> Vec<T> {
        let rows: Vec<usize> = (0..hidden.len() / self.config.model_dim).collect();
        self.mlm_logits(hidden, &rows)
    }

    /// Backward through the tied MLM head. Accumulates into `grads` and adds
    /// the hidden-state gradient into `d_hidden` at `rows`.
    pub fn mlm_head_backward(
        &self,
        hidden: &[T],
        rows: &[usize],
        d_logits: &[T],
        grads: &mut Parameters<T>,
        d_hidden: &mut [T],
    ) {
        let (d, v) = (self.config.model_dim, self.config.vocab_size);
        let h = gather_rows(hidden, rows, d);
        matmul(v, rows.len(), d, d_logits, true, &h, false, &mut grads.tensors[TOK].data, true);
        let bi = self.mlm_bias_index();
        add_col_sums(&mut grads.tensors[bi].data, d_logits);
        let mut dh = vec![T::zero(); rows.len() * d];
        matmul(rows.len(), v, d, d_logits, false, &self.tensors[TOK].data, false, &mut dh, false);
        for (i, &r) in rows.iter().enumerate() {
            for j in 0..d {
                d_hidden[r * d + j] = d_hidden[r * d + j] + dh[i * d + j];
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn gather_head<T: Scalar>(qkv: &[T], bi: usize, s: usize, d: usize, h: usize, hd: usize, part: usize, out: &mut [T]) {
    for i in 0..s {
        let src = (bi * s + i) * 3 * d + part * d + h * hd;
        out[i * hd..(i + 1) * hd].copy_from_slice(&qkv[src..src + hd]);
    }
}

#[allow(clippy::too_many_arguments)]
fn scatter_head<T: Scalar>(qkv: &mut [T], bi: usize, s: usize, d: usize, h: usize, hd: usize, part: usize, src: &[T]) {
    for i in 0..s {
        let dst = (bi * s + i) * 3 * d + part * d + h * hd;
        qkv[dst..dst + hd].copy_from_slice(&src[i * hd..(i + 1) * hd]);
    }
}

fn gather_rows<T: Scalar>(x: &[T], rows: &[usize], d: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(rows.len() * d);
    for &r in rows {
        out.extend_from_slice(&x[r * d..(r + 1) * d]);
    }
    out
}

pub fn pool_mean<T: Scalar>(hidden: &[T], batch: &TokenBatch, d: usize) -> Result<Vec<T>> {
    let s = batch.width;
    let mut out = vec![T::zero(); batch.rows * d];
    for (b, len) in batch.lengths().into_iter().enumerate() {
        if len == 0 {
            return Err(Error::Argument(format!("sequence {b} has no tokens to pool")));
        }
        let inv = T::c(1.0 / len as f64);
        for p in 0..s {
            if batch.mask[b * s + p] {
                let r = b * s + p;
                for j in 0..d {
                    out[b * d + j] = out[b * d + j] + hidden[r * d + j] * inv;
                }
            }
        }
    }
    Ok(out)
}

pub fn pool_mean_backward<T: Scalar>(d_pooled: &[T], batch: &TokenBatch, d: usize) -> Vec<T> {
    let s = batch.width;
    let mut dh = vec![T::zero(); batch.rows * s * d];
    for (b, len) in batch.lengths().into_iter().enumerate() {
        if len == 0 {
            continue;
        }
        let inv = T::c(1.0 / len as f64);
        for p in 0..s {
            if batch.mask[b * s + p] {
                let r = b * s + p;
                for j in 0..d {
                    dh[r * d + j] = d_pooled[b * d + j] * inv;
                }
            }
        }
    }
    dh
}

const MAGIC: &[u8; 4] = b"SAGE";
const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    shape: Vec<usize>,
    offset: u64,
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    config: EncoderConfig,
    tensors: Vec<TensorEntry>,
}

impl<T: Scalar> Parameters<T> {
    /// `SAGE`, u32 version, u64 header length, JSON header, then every tensor
    /// as little-endian f32 in declared order.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut offset = 0u64;
        let entries = self
            .tensors
            .iter()
            .map(|t| {
                let e = TensorEntry {
                    name: t.name.clone(),
                    shape: t.shape.clone(),
                    offset,
                };
                offset += 4 * t.data.len() as u64;
                e
            })
            .collect();
        let header = serde_json::to_vec(&CheckpointHeader {
            config: self.config.clone(),
            tensors: entries,
        })?;
        let mut out = Vec::with_capacity(16 + header.len() + offset as usize);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u64).to_le_bytes());
        out.extend_from_slice(&header);
        for t in &self.tensors {
            for &v in &t.data {
                out.extend_from_slice(&v.to_f32().expect("finite cast").to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |m: &str| Error::Format {
            what: "checkpoint",
            message: m.to_owned(),
        };
        if bytes.len() < 16 || &bytes[..4] != MAGIC {
            return Err(bad("missing SAGE magic"));
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != CHECKPOINT_VERSION {
            return Err(bad(&format!("unsupported version {version}")));
        }
        let hlen = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
        let header_end = 16usize.checked_add(hlen).filter(|&e| e <= bytes.len()).ok_or_else(|| bad("truncated header"))?;
        let header: CheckpointHeader = serde_json::from_slice(&bytes[16..header_end])?;
        header.config.validate()?;
        let expected = header.config.tensor_shapes();
        if expected.len() != header.tensors.len() {
            return Err(bad("tensor manifest does not match config"));
        }
        let data = &bytes[header_end..];
        let mut tensors = Vec::with_capacity(expected.len());
        for ((name, shape), entry) in expected.into_iter().zip(header.tensors) {
            if entry.name != name || entry.shape != shape {
                return Err(bad(&format!("unexpected tensor {} {:?}", entry.name, entry.shape)));
            }
            let len: usize = shape.iter().product();
            let start = entry.offset as usize;
            let raw = data.get(start..start + 4 * len).ok_or_else(|| bad("truncated tensor data"))?;
            let values = raw
                .chunks_exact(4)
                .map(|c| T::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))).expect("castable"))
                .collect();
            tensors.push(Tensor { name, shape, data: values });
        }
        Ok(Self {
            config: header.config,
            tensors,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_bytes()?;
        let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        f.write_all(&bytes).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)
            .and_then(|mut f| f.read_to_end(&mut bytes))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}
