//! Recorded outputs of the fixture tokenizer and a seeded tiny encoder.

use std::path::Path;

use sageforge_core::corpus::ingest_directory;
use sageforge_core::encoder::{EncoderConfig, Mode, Parameters, TokenBatch};
use sageforge_core::searcheval::embed_texts;
use sageforge_core::syntax::Language;
use sageforge_core::tokenizer::{Tokenizer, TokenizerConfig};

fn tokenizer() -> Tokenizer {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/corpus");
    let files = ingest_directory(&root, Language::Python).unwrap().files;
    let cfg = TokenizerConfig {
        vocab_size: 2048,
        ..TokenizerConfig::default()
    };
    Tokenizer::train(files.iter().map(|f| f.content.as_str()), &cfg, 7).unwrap()
}

fn model(tok: &Tokenizer) -> Parameters<f32> {
    Parameters::init(&EncoderConfig::preset("tiny", tok.vocab_size(), 64).unwrap(), 7).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-4 * (1.0 + b.abs())
}

fn weighted_sum(row: &[f32]) -> f64 {
    row.iter().enumerate().map(|(i, &v)| (i + 1) as f64 * v as f64).sum()
}

#[test]
fn def_line_ids() {
    let tok = tokenizer();
    let ids = tok.encode_ids("def f():");
    assert_eq!(ids, [471, 228, 298, 236, 478]);
    assert_eq!(tok.decode(&ids).unwrap(), "def f():");
}

#[test]
fn tiny_encoder_logits_checksum() {
    let tok = tokenizer();
    let p = model(&tok);
    let batch = TokenBatch::from_sequences(&[tok.encode_sequence("def f():", 64)], tok.pad_id());
    let (h, _) = p.forward(&batch, Mode::Eval).unwrap();
    let logits = p.mlm_logits_all(&h);
    assert_eq!(logits.len(), 7 * tok.vocab_size());
    let sum: f64 = logits.iter().map(|&v| v as f64).sum();
    let sq: f64 = logits.iter().map(|&v| (v as f64) * (v as f64)).sum();
    assert!(close(sum, 24.214846211), "{sum}");
    assert!(close(sq, 224.716910363), "{sq}");
}

#[test]
fn embedding_checksums() {
    let tok = tokenizer();
    let p = model(&tok);
    let items = ["def f():", "return the sum of two numbers", "x = [i * i for i in range(10)]"];
    let e = embed_texts(&p, &tok, &items, 64, 2).unwrap();
    let expected = [
        (18.323739469, 22.931098126),
        (51.342341382, 24.108066196),
        (4.861300442, 19.906302448),
    ];
    for (row, (ws, abs)) in e.chunks(p.config().model_dim).zip(expected) {
        let a: f64 = row.iter().map(|&v| (v as f64).abs()).sum();
        assert!(close(weighted_sum(row), ws), "{}", weighted_sum(row));
        assert!(close(a, abs), "{a}");
    }
    // duplicates and permutations
    let again = embed_texts(&p, &tok, &[items[2], items[0], items[2]], 64, 3).unwrap();
    let d = p.config().model_dim;
    assert_eq!(again[..d], again[2 * d..]);
    assert_eq!(again[d..2 * d], e[..d]);
}
