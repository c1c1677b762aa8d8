//! Code representation learning toolkit: syntax-aware corpus preparation,
//! identifier deobfuscation and masked denoising, bimodal contrastive
//! learning with hard negatives, and zero-shot code search evaluation.

pub mod corpus;
pub mod denoiser;
pub mod encoder;
pub mod error;
pub mod obfuscator;
pub mod objectives;
pub mod searcheval;
pub mod syntax;
pub mod tokenizer;
pub mod trainer;

pub use error::{Error, Result};

#[cfg(test)]
mod testdata;
