//! Corruption schemes for denoising pretraining and batch collation.

use std::fmt;
use std::ops::Range;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::encoder::TokenBatch;
use crate::error::{Error, Result};
use crate::obfuscator::{build_mask_map, obfuscate_source, DobfExample};
use crate::syntax::Language;
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaskScheme {
    #[serde(rename = "full")]
    FullMask,
    #[serde(rename = "80-10-10")]
    Conv801010,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeTag {
    FullMask,
    Conv801010,
    Dobf,
}

/// Fixed masking rate or a per-example draw from `U[0.10, 0.50]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaskRate {
    Fixed(f64),
    Dynamic,
}

pub const DYNAMIC_RATE_RANGE: Range<f64> = 0.10..0.50;

impl MaskRate {
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            MaskRate::Fixed(r) => r,
            MaskRate::Dynamic => rng.random_range(DYNAMIC_RATE_RANGE.start..=DYNAMIC_RATE_RANGE.end),
        }
    }
}

impl fmt::Display for MaskRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaskRate::Fixed(r) => write!(f, "{r}"),
            MaskRate::Dynamic => f.write_str("dynamic"),
        }
    }
}

impl Serialize for MaskRate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MaskRate::Fixed(r) => s.serialize_f64(*r),
            MaskRate::Dynamic => s.serialize_str("dynamic"),
        }
    }
}

impl<'de> Deserialize<'de> for MaskRate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(r) if r > 0.0 && r < 1.0 => Ok(MaskRate::Fixed(r)),
            Repr::Num(r) => Err(serde::de::Error::custom(format!("mask rate {r} outside (0, 1)"))),
            Repr::Str(s) if s == "dynamic" => Ok(MaskRate::Dynamic),
            Repr::Str(s) => Err(serde::de::Error::custom(format!("unknown mask rate `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaskConfig {
    pub scheme: MaskScheme,
    pub rate: MaskRate,
    /// Probability of choosing deobfuscation over random masking.
    pub dobf_mix: f64,
}

impl Default for MaskConfig {
    fn default() -> Self {
        Self {
            scheme: MaskScheme::FullMask,
            rate: MaskRate::Fixed(0.15),
            dobf_mix: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeqConfig {
    /// Maximum sequence length including `[CLS]` and `[SEP]`.
    pub max_len: usize,
}

impl Default for SeqConfig {
    fn default() -> Self {
        Self { max_len: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DenoiseConfig {
    pub mask: MaskConfig,
    pub seq: SeqConfig,
}

impl DenoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if let MaskRate::Fixed(r) = self.mask.rate {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Config(format!("mask.rate {r} outside (0, 1)")));
            }
        }
        if !(0.0..=1.0).contains(&self.mask.dobf_mix) {
            return Err(Error::Config(format!("mask.dobf_mix {} outside [0, 1]", self.mask.dobf_mix)));
        }
        if self.seq.max_len < 3 {
            return Err(Error::Config("seq.max_len must leave room for [CLS] and [SEP]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedExample {
    pub input_ids: Vec<u32>,
    /// `(position, original id)`, positions strictly increasing.
    pub labels: Vec<(usize, u32)>,
    pub scheme: SchemeTag,
}

impl MaskedExample {
    /// Input with every labelled position restored to its original id.
    pub fn restored(&self) -> Vec<u32> {
        let mut ids = self.input_ids.clone();
        for &(p, id) in &self.labels {
            ids[p] = id;
        }
        ids
    }
}

/// Round-half-up of `rate·n` with a floor of one; zero when `n` is zero.
pub fn selection_count(n: usize, rate: f64) -> usize {
    if n == 0 {
        return 0;
    }
    // the tolerance keeps decimal rates such as 0.15 from rounding down at exact halves
    let k = (rate * n as f64 + 0.5 + 1e-9).floor() as usize;
    k.clamp(1, n)
}

/// Uniform sample without replacement, returned in ascending order.
pub fn select_mask_positions<R: Rng + ?Sized>(maskable: &[usize], rate: f64, rng: &mut R) -> Result<Vec<usize>> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Argument(format!("mask rate {rate} outside (0, 1)")));
    }
    let k = selection_count(maskable.len(), rate);
    let mut picked: Vec<usize> = sample(rng, maskable.len(), k).into_iter().map(|i| maskable[i]).collect();
    picked.sort_unstable();
    Ok(picked)
}

pub fn apply_full_mask(ids: &[u32], positions: &[usize], mask_id: u32) -> MaskedExample {
    let mut input_ids = ids.to_vec();
    let labels = positions
        .iter()
        .map(|&p| {
            input_ids[p] = mask_id;
            (p, ids[p])
        })
        .collect();
    MaskedExample {
        input_ids,
        labels,
        scheme: SchemeTag::FullMask,
    }
}

/// What happened to one selected position under 80-10-10.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    Masked,
    Unchanged,
    Random,
}

impl Corruption {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let u: f64 = rng.random();
        if u < 0.8 {
            Corruption::Masked
        } else if u < 0.9 {
            Corruption::Unchanged
        } else {
            Corruption::Random
        }
    }
}

/// 80% `[MASK]`, 10% unchanged, 10% a random ordinary token different from
/// the original (drawn from `ordinary`).
pub fn apply_80_10_10<R: Rng + ?Sized>(
    ids: &[u32],
    positions: &[usize],
    rng: &mut R,
    mask_id: u32,
    ordinary: Range<u32>,
) -> MaskedExample {
    let mut input_ids = ids.to_vec();
    let mut labels = Vec::with_capacity(positions.len());
    for &p in positions {
        let original = ids[p];
        match Corruption::draw(rng) {
            Corruption::Masked => input_ids[p] = mask_id,
            Corruption::Unchanged => {}
            Corruption::Random => {
                if ordinary.len() > 1 || !ordinary.contains(&original) {
                    input_ids[p] = loop {
                        let r = rng.random_range(ordinary.clone());
                        if r != original {
                            break r;
                        }
                    };
                }
            }
        }
        labels.push((p, original));
    }
    MaskedExample {
        input_ids,
        labels,
        scheme: SchemeTag::Conv801010,
    }
}

pub fn apply_dobf_mask(ex: &DobfExample) -> MaskedExample {
    MaskedExample {
        input_ids: ex.input_ids.clone(),
        labels: ex.label_map.clone(),
        scheme: SchemeTag::Dobf,
    }
}

/// A pretraining unit tokenized once: plain ids plus the deobfuscation view
/// when the unit defines at least one identifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage1Item {
    pub ids: Vec<u32>,
    pub dobf: Option<DobfExample>,
}

impl Stage1Item {
    pub fn prepare(text: &str, language: Language, tokenizer: &Tokenizer) -> Result<Self> {
        let ids = tokenizer.encode_ids(text);
        let obf = obfuscate_source(text, language)?;
        let dobf = if obf.identifier_map.is_empty() {
            None
        } else {
            Some(build_mask_map(&obf, tokenizer)?)
        };
        Ok(Self { ids, dobf })
    }
}

/// Special ids the collator needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialIds {
    pub pad: u32,
    pub cls: u32,
    pub sep: u32,
    pub mask: u32,
    pub ordinary: Range<u32>,
}

impl SpecialIds {
    pub fn of(tokenizer: &Tokenizer) -> Self {
        Self {
            pad: tokenizer.pad_id(),
            cls: tokenizer.cls_id(),
            sep: tokenizer.sep_id(),
            mask: tokenizer.mask_id(),
            ordinary: tokenizer.ordinary_ids(),
        }
    }
}

/// Corrupt one item and wrap it as `[CLS] ... [SEP]`. Returns `None` when the
/// item has no content or when truncation removes every deobfuscation label.
pub fn prepare_example<R: Rng + ?Sized>(
    item: &Stage1Item,
    config: &DenoiseConfig,
    specials: &SpecialIds,
    rng: &mut R,
) -> Result<Option<MaskedExample>> {
    let keep = config.seq.max_len.saturating_sub(2);
    let choose_dobf = rng.random::<f64>() < config.mask.dobf_mix;
    let inner = match (&item.dobf, choose_dobf) {
        (Some(dobf), true) => {
            let mut ex = apply_dobf_mask(dobf);
            ex.input_ids.truncate(keep);
            ex.labels.retain(|&(p, _)| p < keep);
            if ex.labels.is_empty() {
                return Ok(None);
            }
            ex
        }
        _ => {
            let ids = &item.ids[..item.ids.len().min(keep)];
            if ids.is_empty() {
                return Ok(None);
            }
            let rate = config.mask.rate.draw(rng);
            let maskable: Vec<usize> = (0..ids.len()).collect();
            let positions = select_mask_positions(&maskable, rate, rng)?;
            match config.mask.scheme {
                MaskScheme::FullMask => apply_full_mask(ids, &positions, specials.mask),
                MaskScheme::Conv801010 => {
                    apply_80_10_10(ids, &positions, rng, specials.mask, specials.ordinary.clone())
                }
            }
        }
    };
    let mut input_ids = Vec::with_capacity(inner.input_ids.len() + 2);
    input_ids.push(specials.cls);
    input_ids.extend_from_slice(&inner.input_ids);
    input_ids.push(specials.sep);
    Ok(Some(MaskedExample {
        input_ids,
        labels: inner.labels.into_iter().map(|(p, id)| (p + 1, id)).collect(),
        scheme: inner.scheme,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stage1Batch {
    pub tokens: TokenBatch,
    /// `(row·width + position, original id)`.
    pub labels: Vec<(usize, u32)>,
    pub schemes: Vec<SchemeTag>,
    /// Items dropped because nothing was left to predict.
    pub skipped: usize,
}

impl Stage1Batch {
    pub fn label_rows(&self) -> Vec<usize> {
        self.labels.iter().map(|&(r, _)| r).collect()
    }

    pub fn label_ids(&self) -> Vec<u32> {
        self.labels.iter().map(|&(_, id)| id).collect()
    }
}

pub fn collate_stage1<R: Rng + ?Sized>(
    items: &[&Stage1Item],
    config: &DenoiseConfig,
    specials: &SpecialIds,
    rng: &mut R,
) -> Result<Stage1Batch> {
    let mut examples = Vec::with_capacity(items.len());
    let mut skipped = 0;
    for item in items {
        match prepare_example(item, config, specials, rng)? {
            Some(ex) => examples.push(ex),
            None => skipped += 1,
        }
    }
    let seqs: Vec<Vec<u32>> = examples.iter().map(|e| e.input_ids.clone()).collect();
    let tokens = TokenBatch::from_sequences(&seqs, specials.pad);
    let labels = examples
        .iter()
        .enumerate()
        .flat_map(|(row, e)| e.labels.iter().map(move |&(p, id)| (row * tokens.width + p, id)))
        .collect();
    Ok(Stage1Batch {
        labels,
        schemes: examples.iter().map(|e| e.scheme).collect(),
        tokens,
        skipped,
    })
}
