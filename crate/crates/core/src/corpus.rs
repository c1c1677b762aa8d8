//! Corpus ingestion, function extraction, docstring summaries, bimodal
//! filtering and hard-positive construction.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::error::{Error, Result};
use crate::syntax::{visit, Language, OverlapAccumulator, OverlapTable, SyntaxParser, SyntaxTree};
use crate::tokenizer::Tokenizer;

pub const MIN_SUMMARY_TOKENS: usize = 3;
pub const MAX_SUMMARY_TOKENS: usize = 256;

/// First eight bytes of SHA-256, big-endian.
pub fn digest64(bytes: &[u8]) -> u64 {
    let d = Sha256::digest(bytes);
    u64::from_be_bytes(d[..8].try_into().unwrap())
}

/// Remove stray BOMs, replacement characters and control characters, and
/// undo UTF-8-read-as-Latin-1 mojibake. Applied until a fixpoint, so it is
/// idempotent.
pub fn repair_text(s: &str) -> String {
    let mut current = s.to_owned();
    loop {
        let stripped: String = current
            .chars()
            .filter(|&c| {
                !matches!(c, '\u{feff}' | '\u{fffd}')
                    && !(c.is_control() && !matches!(c, '\n' | '\t' | '\r'))
            })
            .collect();
        let fixed = fix_mojibake(&stripped);
        if fixed == current {
            return fixed;
        }
        current = fixed;
    }
}

fn fix_mojibake(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    let mut i = 0;
    while i < chars.len() {
        let lead = chars[i] as u32;
        let width = match lead {
            0xC2..=0xDF => 2,
            0xE0..=0xEF => 3,
            0xF0..=0xF4 => 4,
            _ => 0,
        };
        if width > 0 && i + width <= chars.len() {
            let run = &chars[i..i + width];
            if run[1..].iter().all(|&c| (0x80..=0xBF).contains(&(c as u32))) {
                let bytes: Vec<u8> = run.iter().map(|&c| c as u32 as u8).collect();
                if let Ok(decoded) = std::str::from_utf8(&bytes) {
                    out.push_str(decoded);
                    i += width;
                    continue;
                }
            }
        }
        out.push(chars[i]);
        i += 1;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: PathBuf,
    pub language: Language,
    pub content: String,
    pub content_hash: u64,
}

impl SourceFile {
    pub fn new(path: impl Into<PathBuf>, language: Language, content: &str) -> Self {
        let content = repair_text(content);
        let content_hash = digest64(content.as_bytes());
        Self {
            path: path.into(),
            language,
            content,
            content_hash,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct Ingested {
    pub files: Vec<SourceFile>,
    pub skipped: Vec<SkippedFile>,
}

/// Read every file under `root` whose extension belongs to `language`, in
/// lexicographic path order. Unreadable or non-UTF-8 files are skipped.
pub fn ingest_directory(root: &Path, language: Language) -> Result<Ingested> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "input directory does not exist"),
        ));
    }
    let mut paths = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::io(root, e.into()))?;
        let ext = entry.path().extension().and_then(|e| e.to_str()).unwrap_or("");
        if entry.file_type().is_file() && language.extensions().contains(&ext) {
            paths.push(entry.into_path());
        }
    }
    paths.sort();
    let mut out = Ingested::default();
    for path in paths {
        let skip = |reason: String| {
            log::warn!("skipping {}: {reason}", path.display());
            SkippedFile {
                path: path.clone(),
                reason,
            }
        };
        match fs::read(&path) {
            Ok(bytes) => match String::from_utf8(bytes) {
                Ok(text) => out.files.push(SourceFile::new(&path, language, &text)),
                Err(e) => out.skipped.push(skip(format!("not valid UTF-8: {e}"))),
            },
            Err(e) => out.skipped.push(skip(e.to_string())),
        }
    }
    Ok(out)
}

/// One function definition with byte spans into the containing file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFunction {
    pub file_hash: u64,
    pub name: String,
    pub language: Language,
    /// Whole definition (decorators excluded).
    pub span: Range<usize>,
    pub signature_span: Range<usize>,
    pub body_span: Range<usize>,
    /// The docstring statement, quotes included.
    pub docstring_span: Option<Range<usize>>,
    pub return_statement_spans: Vec<Range<usize>>,
    pub docstring: Option<String>,
    pub source_text: String,
    /// Lines of code in the body, docstring and comment lines excluded.
    pub body_lines: usize,
}

impl SourceFunction {
    /// Convert a file span into an offset within `source_text`.
    pub fn local(&self, r: &Range<usize>) -> Range<usize> {
        r.start - self.span.start..r.end - self.span.start
    }

    pub fn signature_text(&self) -> &str {
        &self.source_text[self.local(&self.signature_span)]
    }

    pub fn return_texts(&self) -> impl Iterator<Item = &str> {
        self.return_statement_spans
            .iter()
            .map(|r| &self.source_text[self.local(r)])
    }

    /// Body text with the docstring statement cut out.
    pub fn body_code(&self) -> String {
        let body = self.local(&self.body_span);
        match &self.docstring_span {
            Some(d) => {
                let d = self.local(d);
                format!("{}{}", &self.source_text[body.start..d.start], &self.source_text[d.end..body.end])
            }
            None => self.source_text[body].to_owned(),
        }
    }

    pub fn origin_hash(&self) -> u64 {
        let mut bytes = self.file_hash.to_be_bytes().to_vec();
        bytes.extend_from_slice(&(self.span.start as u64).to_be_bytes());
        bytes.extend_from_slice(self.source_text.as_bytes());
        digest64(&bytes)
    }
}

fn has_error_ancestor(node: tree_sitter::Node<'_>) -> bool {
    let mut cur = node.parent();
    while let Some(n) = cur {
        if n.is_error() {
            return true;
        }
        cur = n.parent();
    }
    false
}

/// Strip prefix and quotes from a Python string literal.
pub(crate) fn string_literal_content(lit: &str) -> &str {
    let body = lit.trim_start_matches(|c: char| c.is_ascii_alphabetic());
    for q in ["\"\"\"", "'''", "\"", "'"] {
        if body.len() >= 2 * q.len() && body.starts_with(q) && body.ends_with(q) {
            return &body[q.len()..body.len() - q.len()];
        }
    }
    body
}

fn docstring_node<'t>(body: tree_sitter::Node<'t>) -> Option<tree_sitter::Node<'t>> {
    let mut cursor = body.walk();
    let first = body.named_children(&mut cursor).find(|n| n.kind() != "comment")?;
    if first.kind() != "expression_statement" || first.named_child_count() != 1 {
        return None;
    }
    let expr = first.named_child(0)?;
    matches!(expr.kind(), "string" | "concatenated_string").then_some(first)
}

fn docstring_text(tree: &SyntaxTree, stmt: tree_sitter::Node<'_>) -> String {
    let mut parts = Vec::new();
    visit(stmt, &mut |n| {
        if n.kind() == "string" {
            parts.push(string_literal_content(tree.text(n)).to_owned());
            false
        } else {
            true
        }
    });
    parts.concat()
}

/// Every function definition in `file`, nested ones included, in document order.
pub fn extract_functions(file: &SourceFile, parser: &mut SyntaxParser) -> Result<Vec<SourceFunction>> {
    if parser.language() != file.language {
        return Err(Error::Config(format!(
            "parser for {} cannot read {} file {}",
            parser.language(),
            file.language,
            file.path.display()
        )));
    }
    let tree = parser.parse(&file.content)?;
    Ok(functions_in_tree(&tree, file.content_hash))
}

pub(crate) fn functions_in_tree(tree: &SyntaxTree, file_hash: u64) -> Vec<SourceFunction> {
    let mut defs = Vec::new();
    visit(tree.root(), &mut |n| {
        if n.kind() == "function_definition" && !has_error_ancestor(n) {
            defs.push(n);
        }
        true
    });
    defs.into_iter()
        .filter_map(|n| function_from_node(tree, n, file_hash))
        .collect()
}

fn function_from_node(tree: &SyntaxTree, node: tree_sitter::Node<'_>, file_hash: u64) -> Option<SourceFunction> {
    let name = tree.text(node.child_by_field_name("name")?).to_owned();
    let body = node.child_by_field_name("body")?;
    let mut cursor = node.walk();
    let colon = node
        .children(&mut cursor)
        .take_while(|c| c.start_byte() < body.start_byte())
        .filter(|c| c.kind() == ":")
        .last()?;
    let signature_span = node.start_byte()..colon.end_byte();

    let doc_stmt = docstring_node(body);
    let docstring = doc_stmt.map(|s| docstring_text(tree, s));
    let docstring_span = doc_stmt.map(|s| s.byte_range());

    let mut returns = Vec::new();
    let mut comments = Vec::new();
    visit(body, &mut |n| {
        match n.kind() {
            "return_statement" => returns.push(n.byte_range()),
            "comment" => comments.push(n.byte_range()),
            _ => {}
        }
        true
    });

    let src = tree.source();
    let line_start = src[..body.start_byte()].rfind('\n').map_or(0, |i| i + 1);
    let mut region: Vec<u8> = src.as_bytes()[line_start..body.end_byte()].to_vec();
    // blank out bytes before the block on its first line (e.g. `def f(): pass`)
    for b in &mut region[..body.start_byte() - line_start] {
        *b = b' ';
    }
    for r in docstring_span.iter().chain(comments.iter()) {
        for b in &mut region[r.start - line_start..r.end - line_start] {
            if *b != b'\n' {
                *b = b' ';
            }
        }
    }
    let body_lines = region
        .split(|&b| b == b'\n')
        .filter(|line| line.iter().any(|b| !b.is_ascii_whitespace()))
        .count();

    Some(SourceFunction {
        file_hash,
        name,
        language: tree.language(),
        span: node.byte_range(),
        signature_span,
        body_span: body.byte_range(),
        docstring_span,
        return_statement_spans: returns,
        docstring,
        source_text: tree.text(node).to_owned(),
        body_lines,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub text: String,
    pub token_count: usize,
}

static URL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"https?://\S+").unwrap());
static HTML_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^>]+>").unwrap());
static DOCTAG_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(
        r"[:@](?:param|parameter|arg|argument|key|keyword|type|return|returns|rtype|raise|raises|throws|exception|var|ivar|cvar|see|note|todo|deprecated|since|author|version)\b:?",
    )
    .unwrap()
});

/// First sentence: up to `.`, `!` or `?` followed by whitespace or the end,
/// or up to the first blank line, whichever comes first.
pub fn first_sentence(text: &str) -> &str {
    let bytes = text.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'.' | b'!' | b'?' => {
                if bytes.get(i + 1).is_none_or(|c| c.is_ascii_whitespace()) {
                    return &text[..=i];
                }
            }
            b'\n' => {
                let rest = &text[i + 1..];
                let line_end = rest.find('\n');
                let next_line = &rest[..line_end.unwrap_or(rest.len())];
                if line_end.is_some() && next_line.trim().is_empty() && !text[..i].trim().is_empty() {
                    return &text[..i];
                }
            }
            _ => {}
        }
    }
    text
}

/// Repair, strip URLs, HTML tags and doctags, take the first sentence and
/// collapse whitespace.
pub fn clean_summary(docstring: &str) -> String {
    let repaired = repair_text(docstring);
    let no_url = URL_RE.replace_all(&repaired, "");
    let no_html = HTML_RE.replace_all(&no_url, "");
    let no_tags = DOCTAG_RE.replace_all(&no_html, "");
    let trimmed = no_tags.trim_start();
    first_sentence(trimmed).split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn extract_summary(docstring: Option<&str>, tokenizer: &Tokenizer) -> Option<Summary> {
    let text = clean_summary(docstring?);
    if text.is_empty() {
        return None;
    }
    let token_count = tokenizer.encode(&text).len();
    Some(Summary { text, token_count })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    NoDocstring,
    NotEnglish,
    TooShort,
    TooLong,
    EmptyBody,
    Ok,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterVerdict {
    pub accepted: bool,
    pub reason: FilterReason,
}

impl FilterVerdict {
    fn from_reason(reason: FilterReason) -> Self {
        Self {
            accepted: reason == FilterReason::Ok,
            reason,
        }
    }
}

/// At least 90% ASCII characters and at least one ASCII letter.
pub fn looks_english(text: &str) -> bool {
    let total = text.chars().count();
    let ascii = text.chars().filter(char::is_ascii).count();
    total > 0 && ascii * 10 >= total * 9 && text.chars().any(|c| c.is_ascii_alphabetic())
}

pub fn filter_bimodal(function: &SourceFunction, summary: Option<&Summary>) -> FilterVerdict {
    let reason = match summary {
        None => FilterReason::NoDocstring,
        Some(s) if !looks_english(&s.text) => FilterReason::NotEnglish,
        Some(s) if s.token_count < MIN_SUMMARY_TOKENS => FilterReason::TooShort,
        Some(s) if s.token_count > MAX_SUMMARY_TOKENS => FilterReason::TooLong,
        Some(_) if function.body_lines <= 1 => FilterReason::EmptyBody,
        Some(_) => FilterReason::Ok,
    };
    FilterVerdict::from_reason(reason)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardPositive {
    pub text: String,
    /// Set when stripping left nothing and the full body was kept instead.
    pub fallback: bool,
}

/// Delete `cuts` (local byte ranges) from `text`, drop lines emptied by the
/// deletion, trim surrounding blank lines and dedent.
fn cut_and_dedent(text: &str, cuts: &[Range<usize>]) -> String {
    let mut lines: Vec<String> = Vec::new();
    let mut start = 0;
    for line in text.split_inclusive('\n') {
        let end = start + line.len();
        let content_end = start + line.trim_end_matches(['\n', '\r']).len();
        let mut kept = String::new();
        let mut pos = start;
        let mut removed = false;
        let mut overlapping: Vec<&Range<usize>> =
            cuts.iter().filter(|c| c.start < content_end && c.end > start).collect();
        overlapping.sort_by_key(|c| c.start);
        for c in overlapping {
            if c.start > pos {
                kept.push_str(&text[pos..c.start]);
            }
            pos = pos.max(c.end.min(content_end));
            removed = true;
        }
        if pos < content_end {
            kept.push_str(&text[pos..content_end]);
        }
        let kept = kept.trim_end().to_owned();
        if !(removed && kept.trim().is_empty()) {
            lines.push(kept);
        }
        start = end;
    }
    while lines.first().is_some_and(|l| l.trim().is_empty()) {
        lines.remove(0);
    }
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    let indent = lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start_matches([' ', '\t']).len())
        .min()
        .unwrap_or(0);
    lines
        .iter()
        .map(|l| if l.len() >= indent { &l[indent..] } else { l.trim_start() })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Function text with the signature, docstring and every return statement removed.
pub fn make_hard_positive(function: &SourceFunction) -> HardPositive {
    let sig = function.local(&function.signature_span);
    let doc = function.docstring_span.as_ref().map(|d| function.local(d));
    let mut cuts: Vec<Range<usize>> = vec![sig.clone()];
    cuts.extend(doc.clone());
    cuts.extend(function.return_statement_spans.iter().map(|r| function.local(r)));
    let stripped = cut_and_dedent(&function.source_text, &cuts);
    if !stripped.trim().is_empty() {
        return HardPositive {
            text: stripped,
            fallback: false,
        };
    }
    let mut cuts = vec![sig.clone()];
    cuts.extend(doc);
    let mut text = cut_and_dedent(&function.source_text, &cuts);
    if text.trim().is_empty() {
        text = cut_and_dedent(&function.source_text, &[sig]);
    }
    HardPositive { text, fallback: true }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BimodalPair {
    pub summary: Summary,
    pub positive_view: String,
    pub fallback: bool,
    pub language: Language,
    pub origin_hash: u64,
    /// Complete function text; used for evaluation, not serialized.
    pub function_text: String,
}

/// One JSONL line of the pair dataset. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub summary: String,
    pub code: String,
    pub lang: Language,
    pub origin_hash: String,
    pub fallback: bool,
}

impl From<&BimodalPair> for PairRecord {
    fn from(p: &BimodalPair) -> Self {
        Self {
            summary: p.summary.text.clone(),
            code: p.positive_view.clone(),
            lang: p.language,
            origin_hash: format!("{:016x}", p.origin_hash),
            fallback: p.fallback,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairDataset {
    pub pairs: Vec<BimodalPair>,
    pub verdicts: BTreeMap<FilterReason, u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub files: usize,
    pub functions: u64,
    pub pairs: usize,
    pub fallback_pairs: usize,
    pub verdicts: BTreeMap<FilterReason, u64>,
}

impl PairDataset {
    pub fn report(&self, files: usize) -> PairReport {
        PairReport {
            files,
            functions: self.verdicts.values().sum(),
            pairs: self.pairs.len(),
            fallback_pairs: self.pairs.iter().filter(|p| p.fallback).count(),
            verdicts: self.verdicts.clone(),
        }
    }
}

/// Verdict and, when accepted, the pair for one function.
pub fn pair_for_function(function: &SourceFunction, tokenizer: &Tokenizer) -> (FilterVerdict, Option<BimodalPair>) {
    let summary = extract_summary(function.docstring.as_deref(), tokenizer);
    let verdict = filter_bimodal(function, summary.as_ref());
    let pair = match summary {
        Some(summary) if verdict.accepted => {
            let positive = make_hard_positive(function);
            Some(BimodalPair {
                summary,
                positive_view: positive.text,
                fallback: positive.fallback,
                language: function.language,
                origin_hash: function.origin_hash(),
                function_text: function.source_text.clone(),
            })
        }
        _ => None,
    };
    (verdict, pair)
}

/// Extract functions from every file; files are processed in parallel and
/// results are returned in input order.
pub fn collect_functions(files: &[SourceFile]) -> Result<Vec<SourceFunction>> {
    let per_file: Vec<Result<Vec<SourceFunction>>> = files
        .par_iter()
        .map_init(
            || None::<SyntaxParser>,
            |slot, file| {
                if slot.as_ref().is_none_or(|p| p.language() != file.language) {
                    *slot = Some(SyntaxParser::new(file.language)?);
                }
                extract_functions(file, slot.as_mut().unwrap())
            },
        )
        .collect();
    let mut out = Vec::new();
    for r in per_file {
        out.extend(r?);
    }
    Ok(out)
}

pub fn build_pair_dataset(files: &[SourceFile], tokenizer: &Tokenizer) -> Result<PairDataset> {
    let functions = collect_functions(files)?;
    let results: Vec<_> = functions
        .par_iter()
        .map(|f| pair_for_function(f, tokenizer))
        .collect();
    let mut dataset = PairDataset::default();
    for (verdict, pair) in results {
        *dataset.verdicts.entry(verdict.reason).or_default() += 1;
        dataset.pairs.extend(pair);
    }
    Ok(dataset)
}

pub fn write_pairs_jsonl(pairs: &[BimodalPair], path: &Path) -> Result<()> {
    let mut out = Vec::new();
    for p in pairs {
        serde_json::to_writer(&mut out, &PairRecord::from(p))?;
        out.push(b'\n');
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&out).map_err(|e| Error::io(path, e))
}

pub fn read_pairs_jsonl(path: &Path) -> Result<Vec<PairRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

/// Mean subword overlap of signature and body against docstring and summary,
/// over functions that have a summary.
pub fn overlap_table(functions: &[SourceFunction], tokenizer: &Tokenizer) -> OverlapTable {
    let mut acc = OverlapAccumulator::default();
    for f in functions {
        let Some(doc) = f.docstring.as_deref() else { continue };
        let Some(summary) = extract_summary(Some(doc), tokenizer) else { continue };
        acc.add(
            &tokenizer.encode_ids(f.signature_text()),
            &tokenizer.encode_ids(&f.body_code()),
            &tokenizer.encode_ids(doc),
            &tokenizer.encode_ids(&summary.text),
        );
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenizer::TokenizerConfig;

    fn tokenizer() -> Tokenizer {
        let cfg = TokenizerConfig {
            vocab_size: 600,
            max_placeholders: 8,
            min_frequency: 2,
        };
        Tokenizer::train(["Sorts the list. Returns the sum of the values in the list."], &cfg, 0).unwrap()
    }

    fn functions(src: &str) -> Vec<SourceFunction> {
        let file = SourceFile::new("t.py", Language::Python, src);
        extract_functions(&file, &mut SyntaxParser::new(Language::Python).unwrap()).unwrap()
    }

    fn one(src: &str) -> SourceFunction {
        functions(src).remove(0)
    }

    #[test]
    fn repair_is_idempotent_and_fixes_mojibake() {
        let s = "caf\u{00c3}\u{00a9}\u{feff} ok\u{0007}";
        let once = repair_text(s);
        assert_eq!(once, "café ok");
        assert_eq!(repair_text(&once), once);
    }

    #[test]
    fn ingest_orders_and_skips() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("b.py"), "x = 1\n").unwrap();
        fs::write(dir.path().join("a.py"), "y = 2\n").unwrap();
        fs::write(dir.path().join("notes.txt"), "skip me").unwrap();
        let got = ingest_directory(dir.path(), Language::Python).unwrap();
        let names: Vec<_> = got.files.iter().map(|f| f.path.file_name().unwrap().to_owned()).collect();
        assert_eq!(names, ["a.py", "b.py"]);
        assert!(got.skipped.is_empty());
    }

    #[test]
    fn ingest_empty_and_invalid() {
        let dir = tempfile::tempdir().unwrap();
        assert!(ingest_directory(dir.path(), Language::Python).unwrap().files.is_empty());
        fs::write(dir.path().join("bad.py"), [b'x', b'=', 0xff, 0xfe, b'\n']).unwrap();
        let got = ingest_directory(dir.path(), Language::Python).unwrap();
        assert_eq!(got.files.len(), 0);
        assert_eq!(got.skipped.len(), 1);
        assert!(ingest_directory(&dir.path().join("missing"), Language::Python).is_err());
    }

    #[test]
    fn postorder_functions() {
        let fns = functions(crate::testdata::POSTORDER);
        let names: Vec<_> = fns.iter().map(|f| f.name.as_str()).collect();
        assert_eq!(names, ["__init__", "printPostorder"]);
        assert_eq!(fns[1].return_statement_spans.len(), 1);
    }

    #[test]
    fn no_functions_and_pass_body() {
        assert!(functions("x = 1\nclass A:\n    y = 2\n").is_empty());
        let f = one("def f():\n    pass\n");
        assert_eq!(f.body_lines, 1);
        let f = one("def f(): pass\n");
        assert_eq!(f.body_lines, 1);
    }

    #[test]
    fn spans_and_docstring() {
        let src = "import os\n\ndef add(a, b):\n    \"\"\"Add two numbers.\"\"\"\n    # comment\n    s = a + b\n    return s\n";
        let f = one(src);
        assert_eq!(f.signature_text(), "def add(a, b):");
        assert_eq!(f.docstring.as_deref(), Some("Add two numbers."));
        assert_eq!(f.body_lines, 2);
        assert_eq!(&src[f.span.clone()], f.source_text);
        assert!(f.signature_span.end <= f.body_span.start);
        for r in &f.return_statement_spans {
            assert!(f.body_span.start <= r.start && r.end <= f.body_span.end);
        }
        assert_eq!(f.return_texts().collect::<Vec<_>>(), ["return s"]);
    }

    #[test]
    fn summary_rules() {
        let tok = tokenizer();
        assert_eq!(extract_summary(Some("Sorts the list.\n\nUses quicksort."), &tok).unwrap().text, "Sorts the list.");
        assert_eq!(
            extract_summary(Some("See https://x.y for details. Returns sum."), &tok).unwrap().text,
            "See for details."
        );
        assert_eq!(extract_summary(Some(""), &tok), None);
        assert_eq!(extract_summary(None, &tok), None);
        assert_eq!(clean_summary("Compute the <b>total</b> cost\n\n:param x: y"), "Compute the total cost");
        assert_eq!(clean_summary("Version 1.5 of the api\nspans lines"), "Version 1.5 of the api spans lines");
        assert_eq!(clean_summary("\n    Indented first line.\n    "), "Indented first line.");
    }

    #[test]
    fn filter_order_and_bounds() {
        let body5 = one("def f(x):\n    a = 1\n    b = 2\n    c = 3\n    d = 4\n    return a\n");
        let s = |text: &str, n| Summary { text: text.into(), token_count: n };
        assert_eq!(filter_bimodal(&body5, None).reason, FilterReason::NoDocstring);
        assert_eq!(filter_bimodal(&body5, Some(&s("Add it", 2))).reason, FilterReason::TooShort);
        let ok = filter_bimodal(&body5, Some(&s("Add it now", 3)));
        assert!(ok.accepted && ok.reason == FilterReason::Ok);
        assert_eq!(filter_bimodal(&body5, Some(&s("x", 256))).reason, FilterReason::Ok);
        assert_eq!(filter_bimodal(&body5, Some(&s("x", 257))).reason, FilterReason::TooLong);
        assert_eq!(
            filter_bimodal(&body5, Some(&s("добавляет числа", 10))).reason,
            FilterReason::NotEnglish
        );
        let short = one("def f(x):\n    \"\"\"Doc.\"\"\"\n    return x\n");
        assert_eq!(filter_bimodal(&short, Some(&s("Add it now", 3))).reason, FilterReason::EmptyBody);
    }

    #[test]
    fn english_heuristic_by_hand() {
        // 15 chars, 1 ASCII (the space): 1/15 < 0.9
        assert!(!looks_english("добавляет числа"));
        assert!(looks_english("Returns the naïve sum."));
        assert!(!looks_english("1234 5678."));
    }

    #[test]
    fn hard_positive_basic() {
        let f = one("def add(a,b):\n  \"\"\"Add.\"\"\"\n  s = a + b\n  log(s)\n  return s");
        let hp = make_hard_positive(&f);
        assert_eq!(hp.text, "s = a + b\nlog(s)");
        assert!(!hp.fallback);
    }

    #[test]
    fn hard_positive_fallback() {
        let f = one("def f(x):\n  return x");
        let hp = make_hard_positive(&f);
        assert_eq!(hp.text, "return x");
        assert!(hp.fallback);
    }

    #[test]
    fn hard_positive_nested_returns() {
        let src = "def sign(x):\n    if x > 0:\n        return 1\n    elif x < 0:\n        y = -1\n        return y\n    z = 0\n    return z\n";
        let f = one(src);
        assert_eq!(f.return_statement_spans.len(), 3);
        let hp = make_hard_positive(&f);
        assert_eq!(hp.text, "if x > 0:\nelif x < 0:\n    y = -1\nz = 0");
        for r in f.return_texts() {
            assert!(!hp.text.contains(r));
        }
        assert!(!hp.text.contains(f.signature_text()));
    }

    #[test]
    fn hard_positive_inline_return() {
        let f = one("def f(x):\n    if x: return 1\n    y = x * 2\n    return y\n");
        assert_eq!(make_hard_positive(&f).text, "if x:\ny = x * 2");
    }

    #[test]
    fn small_fixture_histogram() {
        let src = r#"
def a(x):
    """Adds one to the value."""
    y = x + 1
    z = y * 2
    return z

def b(x):
    """Doubles the value given."""
    y = x * 2
    return y

def c(x):
    """Squares the value here."""
    y = x * x
    w = y + 0
    return w

def d(x):
    """Negates the value now."""
    return -x

def e(x):
    """Returns the value back."""
    t = x
    return t

def g(x):
    """Triples it for you."""
    q = x * 3
    return q

def h(x):
    y = x
    return y

def i(x):
    return x

def j(x):
    k = 1
    return k

def k2(x):
    m = 2
    return m
"#;
        let file = SourceFile::new("fx.py", Language::Python, src);
        let tok = tokenizer();
        let ds = build_pair_dataset(&[file], &tok).unwrap();
        assert_eq!(ds.verdicts.values().sum::<u64>(), 10);
        assert_eq!(ds.verdicts[&FilterReason::NoDocstring], 4);
        assert_eq!(ds.verdicts[&FilterReason::EmptyBody], 1);
        assert!(ds.pairs.len() <= 5);
        let accepted = ds.verdicts.get(&FilterReason::Ok).copied().unwrap_or(0);
        assert_eq!(accepted as usize, ds.pairs.len());
    }

    #[test]
    fn empty_corpus() {
        let ds = build_pair_dataset(&[], &tokenizer()).unwrap();
        assert!(ds.pairs.is_empty() && ds.verdicts.is_empty());
    }

    #[test]
    fn jsonl_key_order() {
        let p = BimodalPair {
            summary: Summary { text: "Add.".into(), token_count: 2 },
            positive_view: "s = 1".into(),
            fallback: false,
            language: Language::Python,
            origin_hash: 0xabc,
            function_text: String::new(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.jsonl");
        write_pairs_jsonl(&[p], &path).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "{\"summary\":\"Add.\",\"code\":\"s = 1\",\"lang\":\"python\",\"origin_hash\":\"0000000000000abc\",\"fallback\":false}\n"
        );
        assert_eq!(read_pairs_jsonl(&path).unwrap().len(), 1);
    }
}
