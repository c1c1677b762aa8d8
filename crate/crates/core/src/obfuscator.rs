//! Identifier obfuscation for the deobfuscation objective.
//!
//! Class, function and variable names defined in a unit are replaced with
//! `c_i`, `f_i` and `v_i` placeholders, numbered per family in order of first
//! appearance. Names that come from imports or builtins stay intact, and so do
//! comments and string literals. [`build_mask_map`] then expands every
//! placeholder into as many `[MASK]` tokens as its original name has subwords.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use tree_sitter::Node;

use crate::error::{Error, Result};
use crate::syntax::{parse, visit, Language, SyntaxTree};
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Class,
    Function,
    Variable,
}

impl Family {
    fn prefix(self) -> char {
        match self {
            Family::Class => 'c',
            Family::Function => 'f',
            Family::Variable => 'v',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Placeholder {
    pub family: Family,
    pub index: u32,
}

impl fmt::Display for Placeholder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.family.prefix(), self.index)
    }
}

impl FromStr for Placeholder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Argument(format!("`{s}` is not a placeholder"));
        let (prefix, index) = s.split_once('_').ok_or_else(bad)?;
        let family = match prefix {
            "c" => Family::Class,
            "f" => Family::Function,
            "v" => Family::Variable,
            _ => return Err(bad()),
        };
        let index = index.parse().map_err(|_| bad())?;
        Ok(Self { family, index })
    }
}

impl Serialize for Placeholder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Placeholder {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceholderSpan {
    pub placeholder: Placeholder,
    /// Byte range in the obfuscated text.
    pub span: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObfuscationResult {
    pub obfuscated_text: String,
    pub identifier_map: BTreeMap<Placeholder, String>,
    pub placeholder_spans: Vec<PlaceholderSpan>,
}

impl ObfuscationResult {
    /// Map file contents: `{"map": {"c_0": "Node", ...}, "spans": [...]}`.
    pub fn map_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct MapFile<'a> {
            map: &'a BTreeMap<Placeholder, String>,
            spans: &'a [PlaceholderSpan],
        }
        Ok(serde_json::to_string_pretty(&MapFile {
            map: &self.identifier_map,
            spans: &self.placeholder_spans,
        })?)
    }
}

fn has_ancestor(node: Node<'_>, pred: impl Fn(Node<'_>) -> bool) -> bool {
    let mut cur = node.parent();
    while let Some(n) = cur {
        if pred(n) {
            return true;
        }
        cur = n.parent();
    }
    false
}

fn is_field(parent: Node<'_>, field: &str, node: Node<'_>) -> bool {
    parent.child_by_field_name(field) == Some(node)
}

/// Whether `node` is (part of) a binding target.
fn is_target(node: Node<'_>) -> bool {
    let mut cur = node;
    while let Some(p) = cur.parent() {
        match p.kind() {
            "pattern_list" | "tuple_pattern" | "list_pattern" | "list_splat_pattern" | "tuple"
            | "list" | "parenthesized_expression" | "expression_list" => cur = p,
            "assignment" | "augmented_assignment" => return is_field(p, "left", cur),
            "for_statement" | "for_in_clause" => return is_field(p, "left", cur),
            "as_pattern_target" | "global_statement" | "nonlocal_statement" => return true,
            "named_expression" => return is_field(p, "name", cur),
            "except_clause" => return cur.kind() == "identifier" && cur.prev_sibling().is_some_and(|s| s.kind() == "as"),
            _ => return false,
        }
    }
    false
}

fn is_parameter(node: Node<'_>) -> bool {
    let Some(p) = node.parent() else { return false };
    match p.kind() {
        "parameters" | "lambda_parameters" | "typed_parameter" => true,
        "default_parameter" | "typed_default_parameter" => is_field(p, "name", node),
        "list_splat_pattern" | "dictionary_splat_pattern" => p
            .parent()
            .is_some_and(|g| matches!(g.kind(), "parameters" | "lambda_parameters" | "typed_parameter")),
        _ => false,
    }
}

fn definition_family(node: Node<'_>) -> Option<Family> {
    let p = node.parent()?;
    match p.kind() {
        "class_definition" if is_field(p, "name", node) => return Some(Family::Class),
        "function_definition" if is_field(p, "name", node) => return Some(Family::Function),
        _ => {}
    }
    if is_parameter(node) {
        return Some(Family::Variable);
    }
    if p.kind() == "attribute" {
        // `obj.name = ...` defines `name` as an attribute
        return (is_field(p, "attribute", node) && is_target(p)).then_some(Family::Variable);
    }
    is_target(node).then_some(Family::Variable)
}

/// Obfuscate a parsed unit (a file or a single function).
pub fn obfuscate(tree: &SyntaxTree) -> ObfuscationResult {
    let source = tree.source();
    let mut identifiers: Vec<Node<'_>> = Vec::new();
    visit(tree.root(), &mut |n| {
        if n.kind() == "identifier" {
            identifiers.push(n);
        }
        true
    });

    let mut family_of: HashMap<&str, Family> = HashMap::new();
    let mut excluded: HashSet<&str> = HashSet::new();
    for &n in &identifiers {
        let text = tree.text(n);
        if has_ancestor(n, |a| a.is_error()) || n.is_missing() {
            excluded.insert(text);
            continue;
        }
        if has_ancestor(n, |a| {
            matches!(a.kind(), "import_statement" | "import_from_statement" | "future_import_statement")
        }) {
            excluded.insert(text);
            continue;
        }
        if let Some(fam) = definition_family(n) {
            let entry = family_of.entry(text).or_insert(fam);
            *entry = (*entry).min(fam);
        }
    }

    let mut numbering: HashMap<&str, Placeholder> = HashMap::new();
    let mut next = [0u32; 3];
    let mut identifier_map = BTreeMap::new();
    let mut obfuscated_text = String::with_capacity(source.len());
    let mut placeholder_spans = Vec::new();
    let mut pos = 0;
    for &n in &identifiers {
        let text = tree.text(n);
        let Some(&family) = family_of.get(text) else { continue };
        if excluded.contains(text) {
            continue;
        }
        let ph = *numbering.entry(text).or_insert_with(|| {
            let slot = &mut next[family as usize];
            let ph = Placeholder { family, index: *slot };
            *slot += 1;
            identifier_map.insert(ph, text.to_owned());
            ph
        });
        obfuscated_text.push_str(&source[pos..n.start_byte()]);
        let start = obfuscated_text.len();
        obfuscated_text.push_str(&ph.to_string());
        placeholder_spans.push(PlaceholderSpan {
            placeholder: ph,
            span: start..obfuscated_text.len(),
        });
        pos = n.end_byte();
    }
    obfuscated_text.push_str(&source[pos..]);
    ObfuscationResult {
        obfuscated_text,
        identifier_map,
        placeholder_spans,
    }
}

pub fn obfuscate_source(source: &str, language: Language) -> Result<ObfuscationResult> {
    Ok(obfuscate(&parse(source, language)?))
}

/// Substitute the original names back at every placeholder span.
pub fn deobfuscate(result: &ObfuscationResult) -> Result<String> {
    let text = &result.obfuscated_text;
    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    for ps in &result.placeholder_spans {
        let found = text
            .get(ps.span.clone())
            .ok_or_else(|| Error::Integrity(format!("span {:?} outside obfuscated text", ps.span)))?;
        if ps.span.start < pos || found != ps.placeholder.to_string() {
            return Err(Error::Integrity(format!(
                "span {:?} holds {found:?}, expected {}",
                ps.span, ps.placeholder
            )));
        }
        let original = result
            .identifier_map
            .get(&ps.placeholder)
            .ok_or_else(|| Error::Integrity(format!("{} missing from identifier map", ps.placeholder)))?;
        out.push_str(&text[pos..ps.span.start]);
        out.push_str(original);
        pos = ps.span.end;
    }
    out.push_str(&text[pos..]);
    Ok(out)
}

/// One placeholder occurrence expanded into consecutive mask positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskRun {
    pub placeholder: Placeholder,
    pub positions: Range<usize>,
}

/// Encoder input for the deobfuscation objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DobfExample {
    pub input_ids: Vec<u32>,
    /// `(position, label id)` pairs, one per mask token, strictly increasing.
    pub label_map: Vec<(usize, u32)>,
    pub runs: Vec<MaskRun>,
}

impl DobfExample {
    /// Input ids with every mask replaced by its label.
    pub fn filled_ids(&self) -> Vec<u32> {
        let mut ids = self.input_ids.clone();
        for &(p, id) in &self.label_map {
            ids[p] = id;
        }
        ids
    }
}

/// Tokenize the obfuscated text with placeholder edges as hard boundaries and
/// expand each placeholder into `[MASK] x k`, labelled with the `k` subwords
/// of the original identifier encoded on its own.
pub fn build_mask_map(result: &ObfuscationResult, tokenizer: &Tokenizer) -> Result<DobfExample> {
    let bounds: Vec<Range<usize>> = result.placeholder_spans.iter().map(|p| p.span.clone()).collect();
    let tokens = tokenizer.encode_with_boundaries(&result.obfuscated_text, &bounds)?;
    let mask = tokenizer.mask_id();
    let mut input_ids = Vec::with_capacity(tokens.len());
    let mut label_map = Vec::new();
    let mut runs = Vec::with_capacity(result.placeholder_spans.len());
    let mut spans = result.placeholder_spans.iter().peekable();
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match spans.peek() {
            Some(ps) if ps.span.start == t.span.start => {
                let original = result
                    .identifier_map
                    .get(&ps.placeholder)
                    .ok_or_else(|| Error::Integrity(format!("{} missing from identifier map", ps.placeholder)))?;
                let labels = tokenizer.encode_ids(original);
                if labels.is_empty() {
                    return Err(Error::Integrity(format!("identifier {original:?} encodes to no tokens")));
                }
                // a placeholder beyond the registered specials spans several tokens
                while i < tokens.len() && tokens[i].span.end <= ps.span.end {
                    i += 1;
                }
                let start = input_ids.len();
                for id in labels {
                    label_map.push((input_ids.len(), id));
                    input_ids.push(mask);
                }
                runs.push(MaskRun {
                    placeholder: ps.placeholder,
                    positions: start..input_ids.len(),
                });
                spans.next();
            }
            _ => {
                input_ids.push(t.id);
                i += 1;
            }
        }
    }
    if spans.next().is_some() {
        return Err(Error::Integrity("placeholder span not aligned with token boundaries".into()));
    }
    Ok(DobfExample {
        input_ids,
        label_map,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata::POSTORDER;
    use crate::tokenizer::TokenizerConfig;

    const POSTORDER_OBFUSCATED: &str = "class c_0:
  def f_0(v_0, v_1):
    v_0.v_2 = v_1
    v_0.v_3 = None
    v_0.v_4 = None

# Function to print postorder traversal
def f_1(v_5):
  if v_5 == None:
    return

  # First recur on the left subtree
  f_1(v_5.v_3)

  # Then recur on the right subtree
  f_1(v_5.v_4)

  # Now deal with the node
  print(v_5.v_2, end=' ')
";

    fn obf(src: &str) -> ObfuscationResult {
        obfuscate_source(src, Language::Python).unwrap()
    }

    fn ph(s: &str) -> Placeholder {
        s.parse().unwrap()
    }

    #[test]
    fn postorder_listing() {
        let r = obf(POSTORDER);
        assert_eq!(r.obfuscated_text, POSTORDER_OBFUSCATED);
        let expected: BTreeMap<Placeholder, String> = [
            ("c_0", "Node"),
            ("f_0", "__init__"),
            ("f_1", "printPostorder"),
            ("v_0", "self"),
            ("v_1", "v"),
            ("v_2", "data"),
            ("v_3", "left"),
            ("v_4", "right"),
            ("v_5", "node"),
        ]
        .into_iter()
        .map(|(k, v)| (ph(k), v.to_string()))
        .collect();
        assert_eq!(r.identifier_map, expected);
        assert_eq!(deobfuscate(&r).unwrap(), POSTORDER);
    }

    #[test]
    fn builtins_stay() {
        let r = obf("x = 3\nprint(x)\n");
        assert_eq!(r.obfuscated_text, "v_0 = 3\nprint(v_0)\n");
    }

    #[test]
    fn no_identifiers() {
        let r = obf("1 + 2\n");
        assert_eq!(r.obfuscated_text, "1 + 2\n");
        assert!(r.identifier_map.is_empty());
        assert_eq!(deobfuscate(&r).unwrap(), "1 + 2\n");
    }

    #[test]
    fn imports_stay() {
        let r = obf("import math\nfrom os import path\ndef f(a):\n    return math.sqrt(path.join(a))\n");
        assert_eq!(
            r.obfuscated_text,
            "import math\nfrom os import path\ndef f_0(v_0):\n    return math.sqrt(path.join(v_0))\n"
        );
    }

    #[test]
    fn comments_and_docstrings_untouched() {
        let src = "def f(x):\n    \"\"\"Uses x and f.\"\"\"\n    # x is here\n    return x\n";
        let r = obf(src);
        assert_eq!(
            r.obfuscated_text,
            "def f_0(v_0):\n    \"\"\"Uses x and f.\"\"\"\n    # x is here\n    return v_0\n"
        );
    }

    #[test]
    fn existing_placeholder_names_are_renamed_by_span() {
        let src = "v_0 = 1\nb = v_0 + 2\n";
        let r = obf(src);
        assert_eq!(r.obfuscated_text, "v_0 = 1\nv_1 = v_0 + 2\n");
        assert_eq!(r.identifier_map[&ph("v_0")], "v_0");
        assert_eq!(deobfuscate(&r).unwrap(), src);
    }

    #[test]
    fn error_regions_are_left_intact() {
        let src = "def f(a):\n    return a\nx = (a b c\n";
        let r = obf(src);
        assert_eq!(deobfuscate(&r).unwrap(), src);
        assert!(!r.identifier_map.values().any(|v| v == "a"));
    }

    #[test]
    fn corrupted_span_is_integrity_error() {
        let mut r = obf("x = 1\n");
        r.placeholder_spans[0].span = 1..4;
        assert!(matches!(deobfuscate(&r), Err(Error::Integrity(_))));
    }

    #[test]
    fn placeholder_parse_display() {
        for s in ["c_0", "f_12", "v_3"] {
            assert_eq!(ph(s).to_string(), s);
        }
        assert!("x_1".parse::<Placeholder>().is_err());
    }

    fn tokenizer() -> Tokenizer {
        let cfg = TokenizerConfig {
            vocab_size: 500,
            max_placeholders: 8,
            min_frequency: 2,
        };
        let corpus = "def function_name(x):\n    return function_name(x)\nfunction function name name x x\n";
        Tokenizer::train([corpus; 3], &cfg, 0).unwrap()
    }

    #[test]
    fn multi_subword_identifier_expands() {
        let tok = tokenizer();
        let r = obf("def function_name(x):\n    return x\n");
        let ex = build_mask_map(&r, &tok).unwrap();
        let run = &ex.runs[0];
        assert_eq!(run.placeholder, ph("f_0"));
        let labels: Vec<String> = ex
            .label_map
            .iter()
            .filter(|(p, _)| run.positions.contains(p))
            .map(|&(_, id)| tok.decode(&[id]).unwrap())
            .collect();
        assert_eq!(labels, ["function", "_", "name"]);
        for p in run.positions.clone() {
            assert_eq!(ex.input_ids[p], tok.mask_id());
        }
        // `x` is a single subword: two occurrences, one mask each
        assert_eq!(ex.runs.len(), 3);
        assert_eq!(ex.runs[1].positions.len(), 1);
        assert_eq!(ex.label_map.len(), 5);
        assert_eq!(tok.decode(&ex.filled_ids()).unwrap(), "def function_name(x):\n    return x\n");
    }

    #[test]
    fn mask_positions_follow_document_order() {
        let tok = tokenizer();
        let r = obf("nm = 1\nx = nm\n");
        let ex = build_mask_map(&r, &tok).unwrap();
        let lens: Vec<usize> = ex.runs.iter().map(|r| r.positions.len()).collect();
        let expected: Vec<usize> = ["nm", "x", "nm"].iter().map(|s| tok.encode(s).len()).collect();
        assert_eq!(lens, expected);
        assert!(ex.label_map.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn placeholders_beyond_vocab_still_align() {
        let tok = tokenizer();
        let src: String = (0..12).map(|i| format!("a{i} = {i}\n")).collect();
        let r = obf(&src);
        let ex = build_mask_map(&r, &tok).unwrap();
        assert_eq!(ex.runs.len(), 12);
        assert_eq!(tok.decode(&ex.filled_ids()).unwrap(), src);
    }
}
