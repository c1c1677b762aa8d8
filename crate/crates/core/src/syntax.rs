//! Grammar-backed parsing and token categorization.
//!
//! Source text is parsed into a lossless concrete syntax tree. Its leaves are
//! sorted into five groups (identifiers, keywords, operators, delimiters and
//! literals); string literals and comments additionally carry an NL flag, and
//! everything else counts as PL. Identifiers get a role derived from the kinds
//! of their ancestors.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use tree_sitter::{Node, Parser, Tree};

use crate::error::{Error, Result};
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Python,
}

impl Language {
    pub fn extensions(self) -> &'static [&'static str] {
        match self {
            Language::Python => &["py"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Language::Python => "python",
        }
    }

    fn grammar(self) -> tree_sitter::Language {
        match self {
            Language::Python => tree_sitter_python::LANGUAGE.into(),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "python" | "py" => Ok(Language::Python),
            other => Err(Error::Config(format!("no grammar available for language `{other}`"))),
        }
    }
}

/// A parser bound to one grammar. Not shareable across threads; create one per worker.
pub struct SyntaxParser {
    parser: Parser,
    language: Language,
}

impl SyntaxParser {
    pub fn new(language: Language) -> Result<Self> {
        let mut parser = Parser::new();
        parser
            .set_language(&language.grammar())
            .map_err(|e| Error::Config(format!("cannot load {language} grammar: {e}")))?;
        Ok(Self { parser, language })
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn parse(&mut self, source: &str) -> Result<SyntaxTree> {
        let tree = self
            .parser
            .parse(source, None)
            .ok_or_else(|| Error::Config("parser returned no tree (no language set)".into()))?;
        Ok(SyntaxTree {
            tree,
            source: source.to_owned(),
            language: self.language,
        })
    }
}

/// One-shot parse.
pub fn parse(source: &str, language: Language) -> Result<SyntaxTree> {
    SyntaxParser::new(language)?.parse(source)
}

/// Immutable concrete syntax tree together with the text it was parsed from.
pub struct SyntaxTree {
    tree: Tree,
    source: String,
    language: Language,
}

impl SyntaxTree {
    pub fn root(&self) -> Node<'_> {
        self.tree.root_node()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn root_span(&self) -> Range<usize> {
        self.root().byte_range()
    }

    /// True when the parse contains error or missing nodes.
    pub fn has_error(&self) -> bool {
        self.root().has_error()
    }

    pub fn text(&self, node: Node<'_>) -> &str {
        &self.source[node.byte_range()]
    }

    /// Byte spans of all `ERROR` nodes.
    pub fn error_spans(&self) -> Vec<Range<usize>> {
        let mut spans = Vec::new();
        visit(self.root(), &mut |node| {
            if node.is_error() {
                spans.push(node.byte_range());
            }
            true
        });
        spans
    }

    /// Token-level leaves in document order. String literals are kept whole.
    pub fn leaves(&self) -> Vec<Node<'_>> {
        let mut out = Vec::new();
        visit(self.root(), &mut |node| {
            if is_token_leaf(node) {
                if node.end_byte() > node.start_byte() {
                    out.push(node);
                }
                false
            } else {
                true
            }
        });
        out
    }
}

/// Pre-order traversal; `f` returns whether to descend into the node.
pub(crate) fn visit<'t>(node: Node<'t>, f: &mut impl FnMut(Node<'t>) -> bool) {
    if !f(node) {
        return;
    }
    let mut cursor = node.walk();
    for child in node.children(&mut cursor) {
        visit(child, f);
    }
}

fn is_token_leaf(node: Node<'_>) -> bool {
    node.child_count() == 0 || node.kind() == "string"
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenCategory {
    Identifier,
    Keyword,
    Operator,
    Delimiter,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentifierRole {
    ClassName,
    FunctionName,
    FunctionArg,
    Variable,
    Call,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategorizedToken {
    pub span: Range<usize>,
    pub text: String,
    pub category: TokenCategory,
    /// String literals (docstrings included) and comments.
    pub nl: bool,
    pub comment: bool,
    pub role: Option<IdentifierRole>,
}

const DELIMITERS: &[&str] = &["(", ")", "[", "]", "{", "}", ",", ":", ";", ".", "->"];

/// Assign every non-whitespace leaf of `tree` to exactly one category.
pub fn categorize_tokens(tree: &SyntaxTree) -> Vec<CategorizedToken> {
    tree.leaves()
        .into_iter()
        .map(|node| {
            let text = tree.text(node);
            let (category, nl, comment) = classify_leaf(node, text);
            let role = (category == TokenCategory::Identifier).then(|| identifier_role(node));
            CategorizedToken {
                span: node.byte_range(),
                text: text.to_owned(),
                category,
                nl,
                comment,
                role,
            }
        })
        .collect()
}

fn classify_leaf(node: Node<'_>, text: &str) -> (TokenCategory, bool, bool) {
    use TokenCategory::*;
    match node.kind() {
        "string" | "string_content" | "string_start" | "string_end" => return (Literal, true, false),
        "comment" => return (Literal, true, true),
        "identifier" => return (Identifier, false, false),
        "integer" | "float" | "true" | "false" | "none" | "ellipsis" => return (Literal, false, false),
        "line_continuation" => return (Delimiter, false, false),
        _ => {}
    }
    if node.parent().is_some_and(|p| p.kind() == "keyword_identifier") {
        return (Identifier, false, false);
    }
    if DELIMITERS.contains(&text) {
        return (Delimiter, false, false);
    }
    let word = text.chars().all(|c| c.is_alphanumeric() || c == '_');
    if word {
        if text.chars().next().is_some_and(|c| c.is_ascii_digit()) {
            return (Literal, false, false);
        }
        // error-recovery leaves spelled like names are treated as names
        let in_error = node.parent().is_some_and(|p| p.is_error());
        if is_python_keyword(text) || (!node.is_named() && !in_error) {
            return (Keyword, false, false);
        }
        return (Identifier, false, false);
    }
    (Operator, false, false)
}

fn is_python_keyword(text: &str) -> bool {
    matches!(
        text,
        "False" | "None" | "True" | "and" | "as" | "assert" | "async" | "await" | "break" | "class"
            | "continue" | "def" | "del" | "elif" | "else" | "except" | "finally" | "for" | "from"
            | "global" | "if" | "import" | "in" | "is" | "lambda" | "nonlocal" | "not" | "or"
            | "pass" | "raise" | "return" | "try" | "while" | "with" | "yield"
    )
}

fn is_field(parent: Node<'_>, field: &str, node: Node<'_>) -> bool {
    parent.child_by_field_name(field) == Some(node)
}

fn identifier_role(node: Node<'_>) -> IdentifierRole {
    use IdentifierRole::*;
    let Some(parent) = node.parent() else {
        return Variable;
    };
    match parent.kind() {
        "class_definition" if is_field(parent, "name", node) => return ClassName,
        "function_definition" if is_field(parent, "name", node) => return FunctionName,
        "parameters" | "lambda_parameters" | "typed_parameter" => return FunctionArg,
        "default_parameter" | "typed_default_parameter" if is_field(parent, "name", node) => {
            return FunctionArg
        }
        "list_splat_pattern" | "dictionary_splat_pattern" => {
            if parent.parent().is_some_and(|g| {
                matches!(g.kind(), "parameters" | "lambda_parameters" | "typed_parameter")
            }) {
                return FunctionArg;
            }
        }
        "call" if is_field(parent, "function", node) => return Call,
        "decorator" => return Call,
        "attribute" if is_field(parent, "attribute", node) => {
            if let Some(g) = parent.parent() {
                if (g.kind() == "call" && is_field(g, "function", parent)) || g.kind() == "decorator" {
                    return Call;
                }
            }
        }
        _ => {}
    }
    Variable
}

/// Token counts, merged with `+` in any order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryCounts {
    pub identifier: u64,
    pub keyword: u64,
    pub operator: u64,
    pub delimiter: u64,
    pub literal: u64,
    /// Literal tokens that are strings or comments (the NL side).
    pub string_literal: u64,
    pub comment: u64,
}

impl CategoryCounts {
    pub fn total(&self) -> u64 {
        self.identifier + self.keyword + self.operator + self.delimiter + self.literal
    }

    fn add(&mut self, token: &CategorizedToken, n: u64) {
        match token.category {
            TokenCategory::Identifier => self.identifier += n,
            TokenCategory::Keyword => self.keyword += n,
            TokenCategory::Operator => self.operator += n,
            TokenCategory::Delimiter => self.delimiter += n,
            TokenCategory::Literal => self.literal += n,
        }
        if token.nl {
            self.string_literal += n;
        }
        if token.comment {
            self.comment += n;
        }
    }
}

impl std::ops::Add for CategoryCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            identifier: self.identifier + o.identifier,
            keyword: self.keyword + o.keyword,
            operator: self.operator + o.operator,
            delimiter: self.delimiter + o.delimiter,
            literal: self.literal + o.literal,
            string_literal: self.string_literal + o.string_literal,
            comment: self.comment + o.comment,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionReport {
    pub files: u64,
    pub total_tokens: u64,
    pub pl_token_fraction: f64,
    pub nl_token_fraction: f64,
    /// Identifier subwords as a fraction of all subwords.
    pub identifier_fraction: f64,
    pub identifier_fraction_of_pl: f64,
    pub string_literal_fraction_of_literals: f64,
    pub counts: CategoryCounts,
}

impl DistributionReport {
    pub fn from_counts(files: u64, counts: CategoryCounts) -> Self {
        let total = counts.total();
        let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let nl = counts.string_literal;
        let pl = total - nl;
        Self {
            files,
            total_tokens: total,
            pl_token_fraction: ratio(pl, total),
            nl_token_fraction: ratio(nl, total),
            identifier_fraction: ratio(counts.identifier, total),
            identifier_fraction_of_pl: ratio(counts.identifier, pl),
            string_literal_fraction_of_literals: ratio(nl, counts.literal),
            counts,
        }
    }
}

/// Subword-level category counts for one parsed file.
///
/// Each subword is attributed to the source token containing it; the encoding
/// uses token spans as boundaries so no subword straddles two source tokens.
/// Whitespace-only subwords between tokens are not counted.
pub fn subword_counts(tree: &SyntaxTree, tokenizer: &Tokenizer) -> Result<CategoryCounts> {
    let tokens = categorize_tokens(tree);
    let spans: Vec<Range<usize>> = tokens.iter().map(|t| t.span.clone()).collect();
    let pieces = tokenizer.encode_with_boundaries(tree.source(), &spans)?;
    let mut counts = CategoryCounts::default();
    let mut cursor = 0usize;
    for piece in pieces {
        while cursor < tokens.len() && tokens[cursor].span.end <= piece.span.start {
            cursor += 1;
        }
        if let Some(token) = tokens.get(cursor) {
            if token.span.start <= piece.span.start && piece.span.end <= token.span.end {
                counts.add(token, 1);
            }
        }
    }
    Ok(counts)
}

/// Aggregate subword category statistics over `sources`.
pub fn token_distribution<'a>(
    sources: impl IntoIterator<Item = &'a str>,
    language: Language,
    tokenizer: &Tokenizer,
) -> Result<DistributionReport> {
    let mut parser = SyntaxParser::new(language)?;
    let mut counts = CategoryCounts::default();
    let mut files = 0;
    for source in sources {
        let tree = parser.parse(source)?;
        counts = counts + subword_counts(&tree, tokenizer)?;
        files += 1;
    }
    Ok(DistributionReport::from_counts(files, counts))
}

/// Fraction of `segment` tokens (with multiplicity) that also occur in `reference`.
pub fn lexical_overlap<T: Eq + Hash>(segment: &[T], reference: &[T]) -> f64 {
    if segment.is_empty() {
        return 0.0;
    }
    let reference: HashSet<&T> = reference.iter().collect();
    let hits = segment.iter().filter(|t| reference.contains(t)).count();
    hits as f64 / segment.len() as f64
}

/// Mean lexical overlap of function parts against docstring and summary.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OverlapTable {
    pub functions: u64,
    pub signature_vs_docstring: f64,
    pub body_vs_docstring: f64,
    pub signature_vs_summary: f64,
    pub body_vs_summary: f64,
}

#[derive(Debug, Clone, Default)]
pub struct OverlapAccumulator {
    n: u64,
    sums: [f64; 4],
}

impl OverlapAccumulator {
    pub fn add<T: Eq + Hash>(&mut self, signature: &[T], body: &[T], docstring: &[T], summary: &[T]) {
        self.n += 1;
        self.sums[0] += lexical_overlap(signature, docstring);
        self.sums[1] += lexical_overlap(body, docstring);
        self.sums[2] += lexical_overlap(signature, summary);
        self.sums[3] += lexical_overlap(body, summary);
    }

    pub fn finish(&self) -> OverlapTable {
        let mean = |s: f64| if self.n == 0 { 0.0 } else { s / self.n as f64 };
        OverlapTable {
            functions: self.n,
            signature_vs_docstring: mean(self.sums[0]),
            body_vs_docstring: mean(self.sums[1]),
            signature_vs_summary: mean(self.sums[2]),
            body_vs_summary: mean(self.sums[3]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata::POSTORDER;

    fn cats(src: &str) -> Vec<CategorizedToken> {
        categorize_tokens(&parse(src, Language::Python).unwrap())
    }

    #[test]
    fn assignment_spans_whole_input() {
        let tree = parse("x = 1", Language::Python).unwrap();
        assert_eq!(tree.root_span(), 0..5);
        let stmt = tree.root().child(0).unwrap();
        let assign = stmt.child(0).unwrap();
        assert_eq!(assign.kind(), "assignment");
        assert_eq!(assign.byte_range(), 0..5);
        assert!(!tree.has_error());
    }

    #[test]
    fn empty_source() {
        let tree = parse("", Language::Python).unwrap();
        assert_eq!(tree.root_span(), 0..0);
        assert!(categorize_tokens(&tree).is_empty());
    }

    #[test]
    fn malformed_source_has_error_nodes() {
        let tree = parse("def f(: ) x", Language::Python).unwrap();
        assert!(tree.has_error());
        assert!(!tree.error_spans().is_empty());
    }

    #[test]
    fn unknown_language_is_config_error() {
        assert!(matches!("cobol".parse::<Language>(), Err(Error::Config(_))));
    }

    #[test]
    fn assignment_with_comment() {
        let toks = cats("x = 1  # note");
        let summary: Vec<_> = toks
            .iter()
            .map(|t| (t.text.as_str(), t.category, t.nl, t.role))
            .collect();
        assert_eq!(
            summary,
            vec![
                ("x", TokenCategory::Identifier, false, Some(IdentifierRole::Variable)),
                ("=", TokenCategory::Operator, false, None),
                ("1", TokenCategory::Literal, false, None),
                ("# note", TokenCategory::Literal, true, None),
            ]
        );
        assert!(toks[3].comment);
    }

    #[test]
    fn def_roles() {
        let toks = cats("def f(a): pass");
        let get = |s: &str| toks.iter().find(|t| t.text == s).unwrap();
        assert_eq!(get("def").category, TokenCategory::Keyword);
        assert_eq!(get("pass").category, TokenCategory::Keyword);
        assert_eq!(get("f").role, Some(IdentifierRole::FunctionName));
        assert_eq!(get("a").role, Some(IdentifierRole::FunctionArg));
        for d in ["(", ")", ":"] {
            assert_eq!(get(d).category, TokenCategory::Delimiter, "{d}");
        }
    }

    #[test]
    fn postorder_roles() {
        let toks = cats(POSTORDER);
        let with_role = |role| {
            let mut v: Vec<&str> = toks
                .iter()
                .filter(|t| t.role == Some(role))
                .map(|t| t.text.as_str())
                .collect();
            v.sort();
            v.dedup();
            v
        };
        assert_eq!(with_role(IdentifierRole::ClassName), vec!["Node"]);
        assert_eq!(with_role(IdentifierRole::FunctionName), vec!["__init__", "printPostorder"]);
        assert_eq!(with_role(IdentifierRole::FunctionArg), vec!["node", "self", "v"]);
        assert_eq!(with_role(IdentifierRole::Call), vec!["print", "printPostorder"]);
        assert_eq!(
            with_role(IdentifierRole::Variable),
            vec!["data", "end", "left", "node", "right", "self", "v"]
        );
        let none = toks.iter().find(|t| t.text == "None").unwrap();
        assert_eq!(none.category, TokenCategory::Literal);
        assert!(!none.nl);
    }

    #[test]
    fn docstring_is_single_nl_literal() {
        let toks = cats("def f():\n    \"\"\"Doc string.\"\"\"\n    return 1\n");
        let doc = toks.iter().find(|t| t.text.starts_with("\"\"\"")).unwrap();
        assert_eq!(doc.category, TokenCategory::Literal);
        assert!(doc.nl && !doc.comment);
    }

    #[test]
    fn decorator_names_are_calls() {
        let toks = cats("@functools.cache\ndef f(): pass\n");
        let cache = toks.iter().find(|t| t.text == "cache").unwrap();
        assert_eq!(cache.role, Some(IdentifierRole::Call));
    }

    #[test]
    fn gaps_between_leaves_are_whitespace() {
        let src = POSTORDER;
        let toks = cats(src);
        let mut pos = 0;
        for t in &toks {
            assert!(src[pos..t.span.start].trim().is_empty(), "gap {:?}", &src[pos..t.span.start]);
            pos = t.span.end;
        }
        assert!(src[pos..].trim().is_empty());
    }

    #[test]
    fn overlap_definition() {
        assert!((lexical_overlap(&["a", "b", "a"], &["a", "c"]) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(lexical_overlap(&["a"], &["b"]), 0.0);
        assert_eq!(lexical_overlap(&["a", "b"], &["b", "a", "c"]), 1.0);
        assert_eq!(lexical_overlap::<&str>(&[], &["a"]), 0.0);
    }

    #[test]
    fn counts_merge_commutes() {
        let a = CategoryCounts { identifier: 3, literal: 2, string_literal: 1, ..Default::default() };
        let b = CategoryCounts { keyword: 5, operator: 1, ..Default::default() };
        assert_eq!(a + b, b + a);
        let r = DistributionReport::from_counts(2, a + b);
        assert!((r.pl_token_fraction + r.nl_token_fraction - 1.0).abs() < 1e-9);
    }
}
