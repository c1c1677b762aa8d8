//! Byte-level BPE tokenizer with atomic special tokens.
//!
//! Ids are laid out as `[specials][256 bytes][merges]`. Text is first split
//! into chunks of one character class (letters, digits, whitespace, other) and
//! merges never cross a chunk. Because every byte has its own id, any UTF-8
//! string round-trips through `encode`/`decode`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, HashSet};
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAD: &str = "[PAD]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";

const FORMAT_VERSION: &str = "bpe-v1";

/// Placeholder families in the order their specials are registered.
pub const PLACEHOLDER_PREFIXES: [char; 3] = ['c', 'f', 'v'];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub id: u32,
    pub span: Range<usize>,
}

impl Token {
    pub fn len(&self) -> usize {
        self.span.len()
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_empty()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TokenizerConfig {
    pub vocab_size: usize,
    /// Placeholders registered per family (`c_0..`, `f_0..`, `v_0..`).
    pub max_placeholders: usize,
    pub min_frequency: u64,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            vocab_size: 8192,
            max_placeholders: 64,
            min_frequency: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tokenizer {
    specials: Vec<String>,
    special_ids: HashMap<String, u32>,
    max_placeholders: usize,
    /// id -> bytes; special ids map to their literal text.
    pieces: Vec<Vec<u8>>,
    /// (left, right) ordered by rank, with the id they produce.
    merges: Vec<(u32, u32, u32)>,
    ranks: HashMap<(u32, u32), (u32, u32)>,
}

fn special_list(max_placeholders: usize) -> Vec<String> {
    let mut specials: Vec<String> = [PAD, CLS, SEP, MASK].iter().map(|s| s.to_string()).collect();
    for prefix in PLACEHOLDER_PREFIXES {
        specials.extend((0..max_placeholders).map(|i| format!("{prefix}_{i}")));
    }
    specials
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Letter,
    Digit,
    Space,
    Other,
}

fn char_class(c: char) -> CharClass {
    if c.is_alphabetic() {
        CharClass::Letter
    } else if c.is_numeric() {
        CharClass::Digit
    } else if c.is_whitespace() {
        CharClass::Space
    } else {
        CharClass::Other
    }
}

/// Split `s` into maximal runs of a single character class.
fn chunks(s: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut current = None;
    for (i, c) in s.char_indices() {
        let class = char_class(c);
        if current.is_some_and(|k| k != class) {
            out.push(start..i);
            start = i;
        }
        current = Some(class);
    }
    if start < s.len() {
        out.push(start..s.len());
    }
    out
}

impl Tokenizer {
    /// Learn merges by repeatedly joining the most frequent adjacent pair.
    ///
    /// Ties are broken by the lexicographically smallest `(left bytes, right
    /// bytes)`. Training stops at `vocab_size` or when no pair reaches
    /// `min_frequency`. The procedure has no random component; `_seed` is
    /// accepted so every pipeline stage takes the run seed uniformly.
    pub fn train<'a>(
        corpus: impl IntoIterator<Item = &'a str>,
        config: &TokenizerConfig,
        _seed: u64,
    ) -> Result<Self> {
        let specials = special_list(config.max_placeholders);
        let reserved = 256 + specials.len();
        if config.vocab_size <= reserved {
            return Err(Error::Config(format!(
                "vocab_size {} must exceed 256 byte tokens + {} specials",
                config.vocab_size,
                specials.len()
            )));
        }
        let mut tok = Self::base(specials, config.max_placeholders);

        let mut counts: HashMap<&[u8], u64> = HashMap::new();
        for text in corpus {
            for r in chunks(text) {
                *counts.entry(&text.as_bytes()[r]).or_default() += 1;
            }
        }
        let mut sorted: Vec<(&[u8], u64)> = counts.into_iter().collect();
        sorted.sort_unstable();
        let offset = tok.byte_offset();
        let mut words: Vec<(Vec<u32>, u64)> = sorted
            .into_iter()
            .map(|(bytes, n)| (bytes.iter().map(|&b| offset + b as u32).collect(), n))
            .collect();

        let mut pair_counts: HashMap<(u32, u32), u64> = HashMap::new();
        let mut pair_words: HashMap<(u32, u32), HashSet<usize>> = HashMap::new();
        for (wi, (syms, n)) in words.iter().enumerate() {
            for w in syms.windows(2) {
                *pair_counts.entry((w[0], w[1])).or_default() += n;
                pair_words.entry((w[0], w[1])).or_default().insert(wi);
            }
        }
        type HeapEntry = (u64, Reverse<(Vec<u8>, Vec<u8>)>, (u32, u32));
        let key = |tok: &Self, p: (u32, u32)| {
            Reverse((tok.pieces[p.0 as usize].clone(), tok.pieces[p.1 as usize].clone()))
        };
        let mut heap: BinaryHeap<HeapEntry> =
            pair_counts.iter().map(|(&p, &n)| (n, key(&tok, p), p)).collect();
        let mut index: HashMap<Vec<u8>, u32> = tok
            .pieces
            .iter()
            .enumerate()
            .skip(tok.specials.len())
            .map(|(i, b)| (b.clone(), i as u32))
            .collect();

        while tok.pieces.len() < config.vocab_size {
            let Some((n, _, pair)) = heap.pop() else { break };
            if pair_counts.get(&pair) != Some(&n) {
                continue;
            }
            if n < config.min_frequency.max(1) {
                break;
            }
            let mut merged = tok.pieces[pair.0 as usize].clone();
            merged.extend_from_slice(&tok.pieces[pair.1 as usize]);
            let new_id = *index.entry(merged.clone()).or_insert_with(|| {
                tok.pieces.push(merged);
                (tok.pieces.len() - 1) as u32
            });
            let rank = tok.merges.len() as u32;
            tok.merges.push((pair.0, pair.1, new_id));
            tok.ranks.insert(pair, (rank, new_id));

            let mut affected: Vec<usize> = pair_words.remove(&pair).unwrap_or_default().into_iter().collect();
            affected.sort_unstable();
            let mut touched: HashSet<(u32, u32)> = HashSet::new();
            for wi in affected {
                let (syms, wn) = &mut words[wi];
                let wn = *wn;
                for w in syms.windows(2) {
                    let p = (w[0], w[1]);
                    if let Some(c) = pair_counts.get_mut(&p) {
                        *c -= wn;
                    }
                    touched.insert(p);
                }
                *syms = merge_pair(syms, pair, new_id);
                for w in syms.windows(2) {
                    let p = (w[0], w[1]);
                    *pair_counts.entry(p).or_default() += wn;
                    pair_words.entry(p).or_default().insert(wi);
                    touched.insert(p);
                }
            }
            pair_counts.remove(&pair);
            let mut touched: Vec<_> = touched.into_iter().collect();
            touched.sort_unstable();
            for p in touched {
                match pair_counts.get(&p) {
                    Some(&0) => {
                        pair_counts.remove(&p);
                        pair_words.remove(&p);
                    }
                    Some(&c) => heap.push((c, key(&tok, p), p)),
                    None => {}
                }
            }
        }
        Ok(tok)
    }

    fn base(specials: Vec<String>, max_placeholders: usize) -> Self {
        let special_ids = specials
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        let mut pieces: Vec<Vec<u8>> = specials.iter().map(|s| s.as_bytes().to_vec()).collect();
        pieces.extend((0..=255u8).map(|b| vec![b]));
        Self {
            specials,
            special_ids,
            max_placeholders,
            pieces,
            merges: Vec::new(),
            ranks: HashMap::new(),
        }
    }

    fn byte_offset(&self) -> u32 {
        self.specials.len() as u32
    }

    pub fn vocab_size(&self) -> usize {
        self.pieces.len()
    }

    pub fn num_merges(&self) -> usize {
        self.merges.len()
    }

    pub fn max_placeholders(&self) -> usize {
        self.max_placeholders
    }

    pub fn special_id(&self, text: &str) -> Option<u32> {
        self.special_ids.get(text).copied()
    }

    pub fn pad_id(&self) -> u32 {
        0
    }

    pub fn cls_id(&self) -> u32 {
        1
    }

    pub fn sep_id(&self) -> u32 {
        2
    }

    pub fn mask_id(&self) -> u32 {
        3
    }

    pub fn is_special(&self, id: u32) -> bool {
        (id as usize) < self.specials.len()
    }

    /// Ids available for random replacement: every non-special token.
    pub fn ordinary_ids(&self) -> Range<u32> {
        self.byte_offset()..self.pieces.len() as u32
    }

    pub fn piece(&self, id: u32) -> Option<&[u8]> {
        self.pieces.get(id as usize).map(Vec::as_slice)
    }

    /// Encode `s` as plain text. Special-token spellings get no special treatment.
    pub fn encode(&self, s: &str) -> Vec<Token> {
        let mut out = Vec::new();
        self.encode_into(s, 0, &mut out);
        out
    }

    pub fn encode_ids(&self, s: &str) -> Vec<u32> {
        self.encode(s).into_iter().map(|t| t.id).collect()
    }

    /// `[CLS] ids [SEP]` with the ids tail-truncated to fit `max_len` (at least 3).
    pub fn encode_sequence(&self, s: &str, max_len: usize) -> Vec<u32> {
        let mut ids = self.encode_ids(s);
        ids.truncate(max_len.max(3) - 2);
        ids.insert(0, self.cls_id());
        ids.push(self.sep_id());
        ids
    }

    /// Encode with `boundaries` isolated: no token crosses a boundary edge, and
    /// a boundary whose text spells a special token becomes that single token.
    pub fn encode_with_boundaries(&self, s: &str, boundaries: &[Range<usize>]) -> Result<Vec<Token>> {
        let mut sorted: Vec<Range<usize>> = boundaries.iter().filter(|r| !r.is_empty()).cloned().collect();
        sorted.sort_by_key(|r| (r.start, r.end));
        let mut out = Vec::new();
        let mut pos = 0;
        for r in sorted {
            if r.start < pos {
                return Err(Error::Argument(format!("boundary {r:?} overlaps a previous boundary")));
            }
            let text = s
                .get(r.clone())
                .ok_or_else(|| Error::Argument(format!("boundary {r:?} is not a valid range of the input")))?;
            self.encode_into(&s[pos..r.start], pos, &mut out);
            match self.special_ids.get(text) {
                Some(&id) => out.push(Token { id, span: r.clone() }),
                None => self.encode_into(text, r.start, &mut out),
            }
            pos = r.end;
        }
        self.encode_into(&s[pos..], pos, &mut out);
        Ok(out)
    }

    fn encode_into(&self, s: &str, offset: usize, out: &mut Vec<Token>) {
        for r in chunks(s) {
            let bytes = &s.as_bytes()[r.clone()];
            let mut start = offset + r.start;
            for id in self.encode_chunk(bytes) {
                let len = self.pieces[id as usize].len();
                out.push(Token {
                    id,
                    span: start..start + len,
                });
                start += len;
            }
        }
    }

    fn encode_chunk(&self, bytes: &[u8]) -> Vec<u32> {
        let offset = self.byte_offset();
        let mut syms: Vec<u32> = bytes.iter().map(|&b| offset + b as u32).collect();
        while syms.len() > 1 {
            let best = syms
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0], w[1])).map(|&(rank, id)| (rank, (w[0], w[1]), id)))
                .min();
            let Some((_, pair, id)) = best else { break };
            syms = merge_pair(&syms, pair, id);
        }
        syms
    }

    pub fn decode_bytes(&self, ids: &[u32]) -> Result<Vec<u8>> {
        let mut out = Vec::new();
        for &id in ids {
            let piece = self
                .pieces
                .get(id as usize)
                .ok_or_else(|| Error::Argument(format!("unknown token id {id}")))?;
            out.extend_from_slice(piece);
        }
        Ok(out)
    }

    /// Inverse of `encode`. Byte sequences that are not valid UTF-8 (possible
    /// for arbitrary id lists) are repaired lossily.
    pub fn decode(&self, ids: &[u32]) -> Result<String> {
        let bytes = self.decode_bytes(ids)?;
        Ok(match String::from_utf8(bytes) {
            Ok(s) => s,
            Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let byte_map = bytes_to_unicode();
        let show = |b: &[u8]| b.iter().map(|&x| byte_map[x as usize]).collect::<String>();
        let vocab: BTreeMap<String, u32> = self
            .pieces
            .iter()
            .enumerate()
            .skip(self.specials.len())
            .map(|(i, b)| (show(b), i as u32))
            .collect();
        let file = TokenizerFile {
            version: FORMAT_VERSION.to_string(),
            max_placeholders: self.max_placeholders,
            specials: self.specials.clone(),
            vocab,
            merges: self
                .merges
                .iter()
                .map(|&(a, b, _)| format!("{} {}", show(&self.pieces[a as usize]), show(&self.pieces[b as usize])))
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Format {
            what: "tokenizer file",
            message: m,
        };
        let file: TokenizerFile = serde_json::from_str(text)?;
        if file.version != FORMAT_VERSION {
            return Err(bad(format!("unsupported version {:?}", file.version)));
        }
        if file.specials != special_list(file.max_placeholders) {
            return Err(bad("special token list does not match max_placeholders".into()));
        }
        let mut tok = Self::base(file.specials, file.max_placeholders);
        let inverse: HashMap<char, u8> = bytes_to_unicode()
            .iter()
            .enumerate()
            .map(|(b, &c)| (c, b as u8))
            .collect();
        let unshow = |s: &str| -> Result<Vec<u8>> {
            s.chars()
                .map(|c| inverse.get(&c).copied().ok_or_else(|| bad(format!("bad symbol {c:?}"))))
                .collect()
        };
        let mut by_id: Vec<(u32, Vec<u8>)> = Vec::with_capacity(file.vocab.len());
        for (s, id) in &file.vocab {
            by_id.push((*id, unshow(s)?));
        }
        by_id.sort();
        for (id, bytes) in by_id {
            let id = id as usize;
            if id < tok.pieces.len() {
                if tok.pieces[id] != bytes {
                    return Err(bad(format!("id {id} does not match the byte alphabet")));
                }
            } else if id == tok.pieces.len() {
                tok.pieces.push(bytes);
            } else {
                return Err(bad(format!("vocabulary ids are not dense at {id}")));
            }
        }
        let index: HashMap<&[u8], u32> = tok
            .pieces
            .iter()
            .enumerate()
            .skip(tok.specials.len())
            .map(|(i, b)| (b.as_slice(), i as u32))
            .collect();
        let mut merges = Vec::with_capacity(file.merges.len());
        for m in &file.merges {
            let (a, b) = m.split_once(' ').ok_or_else(|| bad(format!("bad merge {m:?}")))?;
            let (a, b) = (unshow(a)?, unshow(b)?);
            let lookup = |x: &[u8]| index.get(x).copied().ok_or_else(|| bad(format!("merge part {x:?} missing")));
            let joined = [a.as_slice(), b.as_slice()].concat();
            merges.push((lookup(&a)?, lookup(&b)?, lookup(&joined)?));
        }
        for (rank, &(a, b, id)) in merges.iter().enumerate() {
            tok.ranks.insert((a, b), (rank as u32, id));
        }
        tok.merges = merges;
        Ok(tok)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

fn merge_pair(syms: &[u32], pair: (u32, u32), id: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(syms.len());
    let mut i = 0;
    while i < syms.len() {
        if i + 1 < syms.len() && syms[i] == pair.0 && syms[i + 1] == pair.1 {
            out.push(id);
            i += 2;
        } else {
            out.push(syms[i]);
            i += 1;
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TokenizerFile {
    version: String,
    max_placeholders: usize,
    specials: Vec<String>,
    vocab: BTreeMap<String, u32>,
    merges: Vec<String>,
}

/// Printable stand-ins for raw bytes, so byte-level tokens serialize as JSON strings.
fn bytes_to_unicode() -> [char; 256] {
    let mut map = ['\0'; 256];
    let mut next = 256u32;
    for b in 0..=255u32 {
        let printable = (b'!' as u32..=b'~' as u32).contains(&b)
            || (0xA1..=0xAC).contains(&b)
            || (0xAE..=0xFF).contains(&b);
        map[b as usize] = if printable {
            char::from_u32(b).unwrap()
        } else {
            let c = char::from_u32(next).unwrap();
            next += 1;
            c
        };
    }
    map
}
