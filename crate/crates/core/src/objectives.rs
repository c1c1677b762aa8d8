//! Masked-token cross-entropy and the symmetric contrastive loss with
//! hard-negative weights.

use crate::encoder::Scalar;
use crate::error::{Error, Result};

pub const DEFAULT_TEMPERATURE: f64 = 0.05;

/// Mean cross-entropy over labelled rows. `logits` holds one row of `vocab`
/// scores per label. Returns the loss and its gradient w.r.t. `logits`.
pub fn mlm_loss<T: Scalar>(logits: &[T], vocab: usize, labels: &[u32]) -> Result<(T, Vec<T>)> {
    if labels.is_empty() {
        return Err(Error::Argument("masked loss needs at least one label".into()));
    }
    if logits.len() != labels.len() * vocab {
        return Err(Error::Argument("logit rows do not match labels".into()));
    }
    let inv = T::c(1.0 / labels.len() as f64);
    let mut grad = vec![T::zero(); logits.len()];
    let mut loss = T::zero();
    for (r, &label) in labels.iter().enumerate() {
        let label = label as usize;
        if label >= vocab {
            return Err(Error::Argument(format!("label {label} outside vocabulary of {vocab}")));
        }
        let row = &logits[r * vocab..(r + 1) * vocab];
        let max = row.iter().copied().fold(T::neg_infinity(), T::max);
        let sum: T = row.iter().map(|&v| (v - max).exp()).sum();
        let lse = max + sum.ln();
        loss = loss + (lse - row[label]);
        let g = &mut grad[r * vocab..(r + 1) * vocab];
        for (gv, &v) in g.iter_mut().zip(row) {
            *gv = (v - lse).exp() * inv;
        }
        g[label] = g[label] - inv;
    }
    Ok((loss * inv, grad))
}

/// Rows ordered `[h_1, h_1+, h_2, h_2+, ...]`.
pub fn interleave<T: Scalar>(anchors: &[T], positives: &[T], dim: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(anchors.len() * 2);
    for (a, p) in anchors.chunks_exact(dim).zip(positives.chunks_exact(dim)) {
        out.extend_from_slice(a);
        out.extend_from_slice(p);
    }
    out
}

fn normalize_rows<T: Scalar>(z: &[T], dim: usize) -> Result<(Vec<T>, Vec<T>)> {
    let mut unit = Vec::with_capacity(z.len());
    let mut norms = Vec::with_capacity(z.len() / dim);
    for (i, row) in z.chunks_exact(dim).enumerate() {
        let norm = row.iter().map(|&v| v * v).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Argument(format!("embedding row {i} has zero or non-finite norm")));
        }
        unit.extend(row.iter().map(|&v| v / norm));
        norms.push(norm);
    }
    Ok((unit, norms))
}

fn check_batch<T>(anchors: &[T], positives: &[T], dim: usize) -> Result<usize> {
    if dim == 0 || anchors.len() % dim != 0 || anchors.len() != positives.len() {
        return Err(Error::Argument("anchor and positive matrices must have equal shape".into()));
    }
    Ok(anchors.len() / dim)
}

/// Cosine similarity over the interleaved `2N` rows, row-major `2N × 2N`.
pub fn cosine_sim_matrix<T: Scalar>(anchors: &[T], positives: &[T], dim: usize) -> Result<Vec<T>> {
    let n = check_batch(anchors, positives, dim)?;
    let (u, _) = normalize_rows(&interleave(anchors, positives, dim), dim)?;
    Ok(gram(&u, 2 * n, dim))
}

fn gram<T: Scalar>(u: &[T], m: usize, dim: usize) -> Vec<T> {
    let mut s = vec![T::zero(); m * m];
    crate::encoder::matmul(m, dim, m, u, false, u, true, &mut s, false);
    for i in 0..m {
        s[i * m + i] = T::one();
    }
    s
}

/// Weights over the in-batch negatives of one anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaRow<T> {
    /// Row indices (interleaved layout) of the negatives, ascending.
    pub negatives: Vec<usize>,
    pub weights: Vec<T>,
}

/// Softmax at temperature `tau` of anchor `i`'s similarities to the `2N-2`
/// rows that are neither `i` nor its positive.
pub fn hard_negative_weights<T: Scalar>(sim: &[T], rows: usize, i: usize, tau: T) -> Result<GammaRow<T>> {
    if rows < 4 || sim.len() != rows * rows || rows % 2 != 0 {
        return Err(Error::Argument("hard negatives need at least two pairs".into()));
    }
    let pos = i ^ 1;
    let negatives: Vec<usize> = (0..rows).filter(|&k| k != i && k != pos).collect();
    let row = &sim[i * rows..(i + 1) * rows];
    let max = negatives.iter().map(|&k| row[k] / tau).fold(T::neg_infinity(), T::max);
    let mut weights: Vec<T> = negatives.iter().map(|&k| (row[k] / tau - max).exp()).collect();
    let sum: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w = *w / sum;
    }
    Ok(GammaRow { negatives, weights })
}

/// Full `2N × 2N` weight matrix with zeros on each anchor's own and positive
/// columns.
pub fn gamma_matrix<T: Scalar>(sim: &[T], rows: usize, tau: T) -> Result<Vec<T>> {
    let mut g = vec![T::zero(); rows * rows];
    for i in 0..rows {
        let gr = hard_negative_weights(sim, rows, i, tau)?;
        for (&k, &w) in gr.negatives.iter().zip(&gr.weights) {
            g[i * rows + k] = w;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone)]
pub struct ContrastiveOutput<T> {
    /// Mean over pairs of the two-direction loss.
    pub loss: T,
    pub per_pair: Vec<T>,
    pub d_anchors: Vec<T>,
    pub d_positives: Vec<T>,
    /// Weights used, `2N × 2N`.
    pub gamma: Vec<T>,
    pub similarity: Vec<T>,
}

/// Symmetric hard-negative contrastive loss. The weights are computed from
/// the current similarities and treated as constants in the gradient.
pub fn contrastive_loss<T: Scalar>(anchors: &[T], positives: &[T], dim: usize, tau: T) -> Result<ContrastiveOutput<T>> {
    contrastive_loss_impl(anchors, positives, dim, tau, None)
}

/// Same loss with externally supplied weights, e.g. frozen at a base point
/// for finite-difference checks.
pub fn contrastive_loss_with_gamma<T: Scalar>(
    anchors: &[T],
    positives: &[T],
    dim: usize,
    tau: T,
    gamma: &[T],
) -> Result<ContrastiveOutput<T>> {
    contrastive_loss_impl(anchors, positives, dim, tau, Some(gamma))
}

fn contrastive_loss_impl<T: Scalar>(
    anchors: &[T],
    positives: &[T],
    dim: usize,
    tau: T,
    gamma: Option<&[T]>,
) -> Result<ContrastiveOutput<T>> {
    let n = check_batch(anchors, positives, dim)?;
    if n < 2 {
        return Err(Error::Argument("contrastive loss needs at least two pairs".into()));
    }
    if !(tau > T::zero()) {
        return Err(Error::Argument("temperature must be positive".into()));
    }
    let m = 2 * n;
    let z = interleave(anchors, positives, dim);
    let (u, norms) = normalize_rows(&z, dim)?;
    let sim = gram(&u, m, dim);
    let gamma = match gamma {
        Some(g) if g.len() == m * m => g.to_vec(),
        Some(_) => return Err(Error::Argument("gamma matrix shape mismatch".into())),
        None => gamma_matrix(&sim, m, tau)?,
    };

    // dL/dS, accumulated per anchor row
    let mut ds = vec![T::zero(); m * m];
    let mut per_anchor = vec![T::zero(); m];
    let inv_n = T::c(1.0 / n as f64);
    for a in 0..m {
        let p = a ^ 1;
        let row = &sim[a * m..(a + 1) * m];
        let g = &gamma[a * m..(a + 1) * m];
        let max = (0..m).filter(|&k| k != a).map(|k| row[k] / tau).fold(T::neg_infinity(), T::max);
        let wp = (row[p] / tau - max).exp();
        let mut denom = wp;
        let mut wk = vec![T::zero(); m];
        for k in 0..m {
            if k != a && k != p {
                wk[k] = g[k] * (row[k] / tau - max).exp();
                denom = denom + wk[k];
            }
        }
        per_anchor[a] = denom.ln() - (row[p] / tau - max);
        let dr = &mut ds[a * m..(a + 1) * m];
        dr[p] = (wp / denom - T::one()) / tau * inv_n;
        for k in 0..m {
            if k != a && k != p {
                dr[k] = wk[k] / denom / tau * inv_n;
            }
        }
    }
    let per_pair: Vec<T> = (0..n).map(|i| per_anchor[2 * i] + per_anchor[2 * i + 1]).collect();
    let loss = per_pair.iter().copied().sum::<T>() * inv_n;

    // S = U Uᵀ  =>  dU = (dS + dSᵀ) U
    let mut sym = vec![T::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            sym[a * m + b] = ds[a * m + b] + ds[b * m + a];
        }
    }
    let mut du = vec![T::zero(); m * dim];
    crate::encoder::matmul(m, m, dim, &sym, false, &u, false, &mut du, false);
    // through the normalization: dz = (du - u (u·du)) / |z|
    let mut dz = vec![T::zero(); m * dim];
    for r in 0..m {
        let ur = &u[r * dim..(r + 1) * dim];
        let dr = &du[r * dim..(r + 1) * dim];
        let dot: T = ur.iter().zip(dr).map(|(&a, &b)| a * b).sum();
        for j in 0..dim {
            dz[r * dim + j] = (dr[j] - ur[j] * dot) / norms[r];
        }
    }
    let mut d_anchors = Vec::with_capacity(n * dim);
    let mut d_positives = Vec::with_capacity(n * dim);
    for i in 0..n {
        d_anchors.extend_from_slice(&dz[2 * i * dim..(2 * i + 1) * dim]);
        d_positives.extend_from_slice(&dz[(2 * i + 1) * dim..(2 * i + 2) * dim]);
    }
    Ok(ContrastiveOutput {
        loss,
        per_pair,
        d_anchors,
        d_positives,
        gamma,
        similarity: sim,
    })
}

/// Fraction of the `2N` rows whose positive is the most similar of the other
/// `2N-1` rows. Ties resolve to the lowest index.
pub fn in_batch_accuracy<T: Scalar>(sim: &[T], rows: usize) -> f64 {
    if rows < 2 {
        return 0.0;
    }
    let mut hits = 0;
    for a in 0..rows {
        let row = &sim[a * rows..(a + 1) * rows];
        let best = (0..rows)
            .filter(|&k| k != a)
            .fold(None, |best: Option<usize>, k| match best {
                Some(b) if row[b] >= row[k] => Some(b),
                _ => Some(k),
            })
            .expect("at least one other row");
        if best == a ^ 1 {
            hits += 1;
        }
    }
    hits as f64 / rows as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        (0..len).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
    }

    #[test]
    fn uniform_logits_give_ln_v() {
        let (loss, _) = mlm_loss(&[0.3f64; 22], 11, &[4, 9]).unwrap();
        assert!((loss - 11f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn confident_logits_give_zero_loss() {
        let mut logits = vec![0.0f64; 11];
        logits[2] = 1e4;
        let (loss, _) = mlm_loss(&logits, 11, &[2]).unwrap();
        assert!(loss.abs() < 1e-12);
    }

    #[test]
    fn mlm_matches_direct_log_softmax() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let logits = random(&mut rng, 33);
        let labels = [1u32, 10, 5];
        let (loss, grad) = mlm_loss(&logits, 11, &labels).unwrap();
        let mut expected = 0.0;
        for (r, &l) in labels.iter().enumerate() {
            let row = &logits[r * 11..(r + 1) * 11];
            let z: f64 = row.iter().map(|v| v.exp()).sum();
            expected -= (row[l as usize].exp() / z).ln();
        }
        assert!((loss - expected / 3.0).abs() < 1e-12);
        for idx in [0usize, 12, 27] {
            let mut p = logits.clone();
            p[idx] += 1e-6;
            let mut m = logits.clone();
            m[idx] -= 1e-6;
            let fd = (mlm_loss(&p, 11, &labels).unwrap().0 - mlm_loss(&m, 11, &labels).unwrap().0) / 2e-6;
            assert!((fd - grad[idx]).abs() < 1e-8);
        }
        assert!(mlm_loss::<f64>(&[], 11, &[]).is_err());
    }

    #[test]
    fn similarity_basics() {
        let s = cosine_sim_matrix(&[1.0f64, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], 2).unwrap_err();
        assert!(matches!(s, Error::Argument(_)));
        let s = cosine_sim_matrix(&[1.0f64, 0.0, 2.0, 0.0], &[0.0, 1.0, -5.0, 0.0], 2).unwrap();
        assert_eq!(s[0], 1.0);
        assert!(s[1].abs() < 1e-15);
        assert!((s[2 * 4 + 3] + 1.0).abs() < 1e-15);
        assert!((s[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_symmetric_case() {
        let z = vec![1.0f64; 8 * 3];
        let sim = cosine_sim_matrix(&z[..12], &z[12..], 3).unwrap();
        let g = hard_negative_weights(&sim, 8, 0, 0.05).unwrap();
        assert_eq!(g.weights.len(), 6);
        for w in g.weights {
            assert!((w - 1.0 / 6.0).abs() < 1e-15);
        }
    }

    #[test]
    fn gamma_saturation() {
        let mut sim = vec![-1.0f64; 16];
        for i in 0..4 {
            sim[i * 4 + i] = 1.0;
        }
        sim[2] = 1.0;
        let g = hard_negative_weights(&sim, 4, 0, 0.05).unwrap();
        assert_eq!(g.negatives, vec![2, 3]);
        assert!(g.weights[0] > 1.0 - 1e-10);
        assert!(hard_negative_weights(&sim[..4], 2, 0, 0.05).is_err());
    }

    #[test]
    fn identical_embeddings_give_two_ln_two() {
        for n in [2usize, 3, 7] {
            let z = vec![0.4f64; n * 5];
            let out = contrastive_loss(&z, &z, 5, 0.05).unwrap();
            for l in &out.per_pair {
                assert!((l - 2.0 * 2f64.ln()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn perfect_separation() {
        // anchors and positives equal, distinct pairs antipodal in 1-D
        let out = contrastive_loss(&[1.0f64, -1.0], &[1.0, -1.0], 1, 0.05).unwrap();
        assert!(out.loss < 1e-10);
    }

    #[test]
    fn contrastive_gradients_match_frozen_gamma_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (n, d) = (4, 6);
        let a = random(&mut rng, n * d);
        let p = random(&mut rng, n * d);
        let out = contrastive_loss(&a, &p, d, 0.05).unwrap();
        let eps = 1e-6;
        let f = |a: &[f64], p: &[f64]| contrastive_loss_with_gamma(a, p, d, 0.05, &out.gamma).unwrap().loss;
        for idx in 0..n * d {
            let mut ap = a.clone();
            ap[idx] += eps;
            let mut am = a.clone();
            am[idx] -= eps;
            let fd = (f(&ap, &p) - f(&am, &p)) / (2.0 * eps);
            let an = out.d_anchors[idx];
            assert!((fd - an).abs() <= 1e-6 * fd.abs().max(an.abs()).max(1e-3), "{fd} {an}");
            let mut pp = p.clone();
            pp[idx] += eps;
            let mut pm = p.clone();
            pm[idx] -= eps;
            let fd = (f(&a, &pp) - f(&a, &pm)) / (2.0 * eps);
            let an = out.d_positives[idx];
            assert!((fd - an).abs() <= 1e-6 * fd.abs().max(an.abs()).max(1e-3), "{fd} {an}");
        }
    }

    #[test]
    fn accuracy_counts_top1() {
        let a = [1.0f64, 0.0, 0.0, 1.0];
        let out = contrastive_loss(&a, &a, 2, 0.05).unwrap();
        assert_eq!(in_batch_accuracy(&out.similarity, 4), 1.0);
        let p = [0.0f64, 1.0, 1.0, 0.0];
        let out = contrastive_loss(&a, &p, 2, 0.05).unwrap();
        assert_eq!(in_batch_accuracy(&out.similarity, 4), 0.0);
    }

    #[test]
    fn increasing_positive_similarity_lowers_anchor_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (n, d) = (3, 4);
        let a = random(&mut rng, n * d);
        let p = random(&mut rng, n * d);
        let base = contrastive_loss(&a, &p, d, 0.05).unwrap();
        // move p_0 onto a_0
        let mut p2 = p.clone();
        p2[..d].copy_from_slice(&a[..d]);
        let sim = |s: &[f64]| s[1];
        let moved = contrastive_loss_with_gamma(&a, &p2, d, 0.05, &base.gamma).unwrap();
        assert!(sim(&moved.similarity) > sim(&base.similarity));
        // with the other similarities of anchor 0 fixed, its term falls
        let row = |o: &ContrastiveOutput<f64>| {
            let s = &o.similarity[..2 * n];
            let g = &o.gamma[..2 * n];
            let num = (s[1] / 0.05).exp();
            let den = num + (2..2 * n).map(|k| g[k] * (s[k] / 0.05).exp()).sum::<f64>();
            -(num / den).ln()
        };
        let mut held = moved.clone();
        held.similarity[2..2 * n].copy_from_slice(&base.similarity[2..2 * n]);
        assert!(row(&held) < row(&base));
    }

    proptest! {
        #[test]
        fn gamma_rows_sum_to_one(seed in 0u64..1000, n in 2usize..9) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random(&mut rng, n * 4);
            let p = random(&mut rng, n * 4);
            let sim = cosine_sim_matrix(&a, &p, 4).unwrap();
            for i in 0..2 * n {
                let g = hard_negative_weights(&sim, 2 * n, i, 0.05).unwrap();
                let s: f64 = g.weights.iter().sum();
                prop_assert!((s - 1.0).abs() < 1e-12);
                // a weight within 1e-16 of 1 rounds to exactly 1
                prop_assert!(g.weights.iter().all(|&w| w > 0.0 && w <= 1.0));
            }
        }

        #[test]
        fn loss_is_scale_and_permutation_invariant(seed in 0u64..1000, scale in 0.1f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (n, d) = (4, 3);
            let a = random(&mut rng, n * d);
            let p = random(&mut rng, n * d);
            let base = contrastive_loss(&a, &p, d, 0.05).unwrap();
            let mut a2 = a.clone();
            for v in &mut a2[d..2 * d] { *v *= scale; }
            let scaled = contrastive_loss(&a2, &p, d, 0.05).unwrap();
            prop_assert!((base.loss - scaled.loss).abs() < 1e-9);
            let perm = [2usize, 0, 3, 1];
            let pa: Vec<f64> = perm.iter().flat_map(|&i| a[i * d..(i + 1) * d].to_vec()).collect();
            let pp: Vec<f64> = perm.iter().flat_map(|&i| p[i * d..(i + 1) * d].to_vec()).collect();
            let permuted = contrastive_loss(&pa, &pp, d, 0.05).unwrap();
            prop_assert!((base.loss - permuted.loss).abs() < 1e-9);
            for (k, &i) in perm.iter().enumerate() {
                prop_assert!((permuted.per_pair[k] - base.per_pair[i]).abs() < 1e-9);
            }
        }
    }
}
