//! Zero-shot code search evaluation: embedding, cosine ranking, MRR and MAP,
//! and representation similarity diagnostics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use rand::seq::{index::sample, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::corpus::PairRecord;
use crate::encoder::{Mode, Parameters, TokenBatch};
use crate::error::{Error, Result};
use crate::tokenizer::Tokenizer;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub qid: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub cid: String,
    pub code: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct RelevanceLine {
    qid: String,
    relevant: Vec<String>,
}

/// Queries, candidates and relevance judgements. A candidate whose id equals
/// the query id is left out of that query's pool, so a code query never
/// retrieves itself.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SearchDataset {
    pub queries: Vec<Query>,
    /// Kept sorted by id, so index order is id order.
    pub candidates: Vec<Candidate>,
    pub relevance: BTreeMap<String, BTreeSet<String>>,
}

const QUERIES: &str = "queries.jsonl";
const CANDIDATES: &str = "candidates.jsonl";
const RELEVANCE: &str = "relevance.jsonl";

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}

fn write_jsonl<T: Serialize>(items: &[T], path: &Path) -> Result<()> {
    let mut out = Vec::new();
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.push(b'\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

impl SearchDataset {
    pub fn new(
        queries: Vec<Query>,
        mut candidates: Vec<Candidate>,
        relevance: BTreeMap<String, BTreeSet<String>>,
    ) -> Result<Self> {
        candidates.sort_by(|a, b| a.cid.cmp(&b.cid));
        let ds = Self {
            queries,
            candidates,
            relevance,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn validate(&self) -> Result<()> {
        let ids: BTreeSet<&str> = self.candidates.iter().map(|c| c.cid.as_str()).collect();
        if ids.len() != self.candidates.len() {
            return Err(Error::Argument("duplicate candidate ids".into()));
        }
        for q in &self.queries {
            let rel = self
                .relevance
                .get(&q.qid)
                .filter(|r| !r.is_empty())
                .ok_or_else(|| Error::Argument(format!("query {} has no relevant candidates", q.qid)))?;
            if let Some(missing) = rel.iter().find(|r| !ids.contains(r.as_str())) {
                return Err(Error::Argument(format!(
                    "query {} lists unknown candidate {missing}",
                    q.qid
                )));
            }
            if rel.contains(&q.qid) {
                return Err(Error::Argument(format!("query {} marks itself relevant", q.qid)));
            }
        }
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let queries = read_jsonl(&dir.join(QUERIES))?;
        let candidates = read_jsonl(&dir.join(CANDIDATES))?;
        let relevance = read_jsonl::<RelevanceLine>(&dir.join(RELEVANCE))?
            .into_iter()
            .map(|r| (r.qid, r.relevant.into_iter().collect()))
            .collect();
        Self::new(queries, candidates, relevance)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_jsonl(&self.queries, &dir.join(QUERIES))?;
        write_jsonl(&self.candidates, &dir.join(CANDIDATES))?;
        let rel: Vec<RelevanceLine> = self
            .queries
            .iter()
            .map(|q| RelevanceLine {
                qid: q.qid.clone(),
                relevant: self.relevance[&q.qid].iter().cloned().collect(),
            })
            .collect();
        write_jsonl(&rel, &dir.join(RELEVANCE))
    }

    /// One query per pair (its summary) against every pair's code.
    pub fn from_pairs(pairs: &[PairRecord]) -> Result<Self> {
        let width = pairs.len().to_string().len().max(4);
        let mut queries = Vec::with_capacity(pairs.len());
        let mut candidates = Vec::with_capacity(pairs.len());
        let mut relevance = BTreeMap::new();
        for (i, p) in pairs.iter().enumerate() {
            let qid = format!("q{i:0width$}");
            let cid = format!("c{i:0width$}");
            queries.push(Query {
                qid: qid.clone(),
                text: p.summary.clone(),
            });
            candidates.push(Candidate {
                cid: cid.clone(),
                code: p.code.clone(),
            });
            relevance.insert(qid, BTreeSet::from([cid]));
        }
        Self::new(queries, candidates, relevance)
    }

    /// Candidate index sets per query, and the index excluded from each pool.
    fn index_view(&self) -> (Vec<BTreeSet<usize>>, Vec<Option<usize>>) {
        let pos: HashMap<&str, usize> = self.candidates.iter().enumerate().map(|(i, c)| (c.cid.as_str(), i)).collect();
        let rel = self
            .queries
            .iter()
            .map(|q| self.relevance[&q.qid].iter().map(|c| pos[c.as_str()]).collect())
            .collect();
        let excluded = self.queries.iter().map(|q| pos.get(q.qid.as_str()).copied()).collect();
        (rel, excluded)
    }
}

/// Mean-pooled embeddings in inference mode, one row per text, in order.
pub fn embed_texts(
    params: &Parameters<f32>,
    tokenizer: &Tokenizer,
    texts: &[&str],
    max_len: usize,
    batch_size: usize,
) -> Result<Vec<f32>> {
    let cfg = params.config();
    if cfg.vocab_size != tokenizer.vocab_size() {
        return Err(Error::Config(format!(
            "model vocabulary {} does not match tokenizer vocabulary {}",
            cfg.vocab_size,
            tokenizer.vocab_size()
        )));
    }
    let max_len = max_len.min(cfg.max_len);
    let mut out = Vec::with_capacity(texts.len() * cfg.model_dim);
    for chunk in texts.chunks(batch_size.max(1)) {
        let seqs: Vec<Vec<u32>> = chunk.iter().map(|t| tokenizer.encode_sequence(t, max_len)).collect();
        let batch = TokenBatch::from_sequences(&seqs, tokenizer.pad_id());
        let (hidden, _) = params.forward(&batch, Mode::Eval)?;
        out.extend(params.pool_mean(&hidden, &batch)?);
    }
    Ok(out)
}

fn unit_rows(m: &[f32], dim: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(m.len());
    for (i, row) in m.chunks_exact(dim).enumerate() {
        let norm = row.iter().map(|&v| (v as f64) * (v as f64)).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Argument(format!("embedding row {i} has zero or non-finite norm")));
        }
        out.extend(row.iter().map(|&v| v as f64 / norm));
    }
    Ok(out)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Candidate indices by descending cosine similarity, ties by ascending index.
pub fn rank(query: &[f32], candidates: &[f32], dim: usize) -> Result<Vec<usize>> {
    if query.len() != dim || candidates.len() % dim != 0 {
        return Err(Error::Argument("embedding dimensions do not match".into()));
    }
    let q = unit_rows(query, dim)?;
    let c = unit_rows(candidates, dim)?;
    let scores: Vec<f64> = c.chunks_exact(dim).map(|r| dot(&q, r)).collect();
    Ok(rank_scores(&scores))
}

pub fn rank_scores(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

fn check_relevance(ranking: &[usize], relevant: &BTreeSet<usize>, q: usize) -> Result<()> {
    if relevant.is_empty() {
        return Err(Error::Argument(format!("query {q} has no relevant candidates")));
    }
    if !relevant.iter().all(|r| ranking.contains(r)) {
        return Err(Error::Argument(format!("query {q} has relevant items outside its ranking")));
    }
    Ok(())
}

pub fn reciprocal_rank(ranking: &[usize], relevant: &BTreeSet<usize>) -> f64 {
    ranking
        .iter()
        .position(|c| relevant.contains(c))
        .map_or(0.0, |p| 1.0 / (p + 1) as f64)
}

pub fn average_precision(ranking: &[usize], relevant: &BTreeSet<usize>) -> f64 {
    let mut hits = 0usize;
    let mut total = 0.0;
    for (k, c) in ranking.iter().enumerate() {
        if relevant.contains(c) {
            hits += 1;
            total += hits as f64 / (k + 1) as f64;
        }
    }
    total / relevant.len() as f64
}

/// Mean reciprocal rank of the first relevant candidate.
pub fn mrr(rankings: &[Vec<usize>], relevance: &[BTreeSet<usize>]) -> Result<f64> {
    mean_metric(rankings, relevance, reciprocal_rank)
}

/// Mean average precision over all relevant candidates.
pub fn map(rankings: &[Vec<usize>], relevance: &[BTreeSet<usize>]) -> Result<f64> {
    mean_metric(rankings, relevance, average_precision)
}

fn mean_metric(
    rankings: &[Vec<usize>],
    relevance: &[BTreeSet<usize>],
    metric: fn(&[usize], &BTreeSet<usize>) -> f64,
) -> Result<f64> {
    if rankings.len() != relevance.len() {
        return Err(Error::Argument("rankings and relevance differ in length".into()));
    }
    if rankings.is_empty() {
        return Err(Error::Argument("no queries to score".into()));
    }
    let mut sum = 0.0;
    for (q, (r, rel)) in rankings.iter().zip(relevance).enumerate() {
        check_relevance(r, rel, q)?;
        sum += metric(r, rel);
    }
    Ok(sum / rankings.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryScore {
    pub qid: String,
    pub reciprocal_rank: f64,
    pub average_precision: f64,
    pub first_relevant_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub task: String,
    pub queries: usize,
    pub candidates: usize,
    pub mrr: f64,
    pub map: f64,
    /// Expected MRR of a uniformly random ranking.
    pub random_mrr: f64,
    pub per_query: Vec<QueryScore>,
}

impl SearchReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Expected reciprocal rank of the first of `r` relevant items among `n`
/// uniformly shuffled candidates.
pub fn random_reciprocal_rank(n: usize, r: usize) -> f64 {
    // P(first relevant at rank k) = C(n-k, r-1) / C(n, r)
    let mut total = 0.0;
    let mut p_none_before = 1.0;
    for k in 1..=n - r + 1 {
        let remaining = (n - k + 1) as f64;
        let p_here = r as f64 / remaining;
        total += p_none_before * p_here / k as f64;
        p_none_before *= 1.0 - p_here;
    }
    total
}

/// Rank every query's pool given precomputed embeddings.
pub fn evaluate_embeddings(
    task: &str,
    dataset: &SearchDataset,
    query_emb: &[f32],
    cand_emb: &[f32],
    dim: usize,
) -> Result<SearchReport> {
    dataset.validate()?;
    let (rel, excluded) = dataset.index_view();
    let cands = unit_rows(cand_emb, dim)?;
    let queries = unit_rows(query_emb, dim)?;
    let mut rankings = Vec::with_capacity(dataset.queries.len());
    let mut per_query = Vec::with_capacity(dataset.queries.len());
    let mut random = 0.0;
    for (qi, q) in dataset.queries.iter().enumerate() {
        let qv = &queries[qi * dim..(qi + 1) * dim];
        let scores: Vec<f64> = cands.chunks_exact(dim).map(|c| dot(qv, c)).collect();
        let ranking: Vec<usize> = rank_scores(&scores).into_iter().filter(|&c| Some(c) != excluded[qi]).collect();
        let rr = reciprocal_rank(&ranking, &rel[qi]);
        per_query.push(QueryScore {
            qid: q.qid.clone(),
            reciprocal_rank: rr,
            average_precision: average_precision(&ranking, &rel[qi]),
            first_relevant_rank: (1.0 / rr).round() as usize,
        });
        random += random_reciprocal_rank(ranking.len(), rel[qi].len());
        rankings.push(ranking);
    }
    Ok(SearchReport {
        task: task.to_owned(),
        queries: dataset.queries.len(),
        candidates: dataset.candidates.len(),
        mrr: mrr(&rankings, &rel)?,
        map: map(&rankings, &rel)?,
        random_mrr: random / dataset.queries.len() as f64,
        per_query,
    })
}

/// Embed and evaluate a dataset with a trained encoder.
pub fn evaluate(
    task: &str,
    params: &Parameters<f32>,
    tokenizer: &Tokenizer,
    dataset: &SearchDataset,
    max_len: usize,
) -> Result<SearchReport> {
    let q: Vec<&str> = dataset.queries.iter().map(|q| q.text.as_str()).collect();
    let c: Vec<&str> = dataset.candidates.iter().map(|c| c.code.as_str()).collect();
    let qe = embed_texts(params, tokenizer, &q, max_len, 32)?;
    let ce = embed_texts(params, tokenizer, &c, max_len, 32)?;
    evaluate_embeddings(task, dataset, &qe, &ce, params.config().model_dim)
}

/// One parallel example for the similarity diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapItem {
    pub query: String,
    pub code: String,
    /// Full function text, the code-side counterpart of `code`.
    pub function: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub pairs: usize,
    /// Mean cosine of (query, code) parallel pairs.
    pub parallel_mean: f64,
    /// Mean cosine after re-matching queries to other pairs' code.
    pub random_mean: f64,
    pub gap: f64,
    /// Mean cosine of (code, full function) pairs, when available.
    pub code2code_mean: Option<f64>,
    /// `(code2code_mean - parallel_mean) / |code2code_mean|`.
    pub relative_gap: Option<f64>,
}

pub fn similarity_gap_report(
    params: &Parameters<f32>,
    tokenizer: &Tokenizer,
    items: &[GapItem],
    max_len: usize,
    seed: u64,
) -> Result<GapReport> {
    let n = items.len();
    if n < 2 {
        return Err(Error::Argument("similarity gap needs at least two pairs".into()));
    }
    if n < 20 {
        log::warn!("similarity gap over only {n} pairs");
    }
    let dim = params.config().model_dim;
    let q: Vec<&str> = items.iter().map(|i| i.query.as_str()).collect();
    let c: Vec<&str> = items.iter().map(|i| i.code.as_str()).collect();
    let qe = unit_rows(&embed_texts(params, tokenizer, &q, max_len, 32)?, dim)?;
    let ce = unit_rows(&embed_texts(params, tokenizer, &c, max_len, 32)?, dim)?;
    let row = |m: &[f64], i: usize| m[i * dim..(i + 1) * dim].to_vec();
    let parallel_mean = (0..n).map(|i| dot(&row(&qe, i), &row(&ce, i))).sum::<f64>() / n as f64;
    // a seeded cyclic shift never re-pairs an item with itself
    let shift = ChaCha8Rng::seed_from_u64(seed).random_range(1..n);
    let random_mean = (0..n).map(|i| dot(&row(&qe, i), &row(&ce, (i + shift) % n))).sum::<f64>() / n as f64;
    let (code2code_mean, relative_gap) = match items.iter().map(|i| i.function.as_deref()).collect::<Option<Vec<_>>>() {
        Some(funcs) => {
            let fe = unit_rows(&embed_texts(params, tokenizer, &funcs, max_len, 32)?, dim)?;
            let c2c = (0..n).map(|i| dot(&row(&ce, i), &row(&fe, i))).sum::<f64>() / n as f64;
            (Some(c2c), Some((c2c - parallel_mean) / c2c.abs()))
        }
        None => (None, None),
    };
    Ok(GapReport {
        pairs: n,
        parallel_mean,
        random_mean,
        gap: parallel_mean - random_mean,
        code2code_mean,
        relative_gap,
    })
}

pub const MAX_SOLUTIONS_PER_PROBLEM: usize = 10;

/// A problem and its solutions, `(solution id, code)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemGroup {
    pub problem: String,
    pub solutions: Vec<(String, String)>,
}

/// Every solution becomes a query whose relevant set is the other solutions
/// of its problem. Groups larger than ten are subsampled under `seed`;
/// singleton groups are dropped with a warning.
pub fn build_code2code_dataset(groups: &[ProblemGroup], seed: u64) -> Result<SearchDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut queries = Vec::new();
    let mut candidates = Vec::new();
    let mut relevance = BTreeMap::new();
    for g in groups {
        if g.solutions.len() < 2 {
            log::warn!("problem {} has {} solution(s), dropped", g.problem, g.solutions.len());
            continue;
        }
        let mut picked: Vec<usize> = if g.solutions.len() > MAX_SOLUTIONS_PER_PROBLEM {
            sample(&mut rng, g.solutions.len(), MAX_SOLUTIONS_PER_PROBLEM).into_vec()
        } else {
            (0..g.solutions.len()).collect()
        };
        picked.sort_unstable();
        let ids: Vec<String> = picked.iter().map(|&i| format!("{}/{}", g.problem, g.solutions[i].0)).collect();
        for (k, &i) in picked.iter().enumerate() {
            let code = g.solutions[i].1.clone();
            queries.push(Query {
                qid: ids[k].clone(),
                text: code.clone(),
            });
            candidates.push(Candidate { cid: ids[k].clone(), code });
            let others: BTreeSet<String> = ids.iter().filter(|id| *id != &ids[k]).cloned().collect();
            relevance.insert(ids[k].clone(), others);
        }
    }
    SearchDataset::new(queries, candidates, relevance)
}

/// Read `root/<problem>/<solution file>` groups in sorted order.
pub fn load_problem_groups(root: &Path) -> Result<Vec<ProblemGroup>> {
    if !root.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "problem directory not found"),
        ));
    }
    let mut groups: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for entry in WalkDir::new(root).min_depth(2).max_depth(2).sort_by_file_name() {
        let entry = entry.map_err(|e| Error::Format {
            what: "problem directory",
            message: e.to_string(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let path = entry.path();
        let problem = path
            .parent()
            .and_then(|p| p.file_name())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let solution = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match fs::read_to_string(path) {
            Ok(code) => groups.entry(problem).or_default().push((solution, code)),
            Err(e) => log::warn!("skipping {}: {e}", path.display()),
        }
    }
    Ok(groups
        .into_iter()
        .map(|(problem, solutions)| ProblemGroup { problem, solutions })
        .collect())
}

/// Seeded split of pairs into (train, held-out) with `heldout` items held out.
pub fn split_heldout<T: Clone>(items: &[T], heldout: usize, seed: u64) -> (Vec<T>, Vec<T>) {
    let mut idx: Vec<usize> = (0..items.len()).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let k = heldout.min(items.len());
    let mut held: Vec<usize> = idx[..k].to_vec();
    let mut train: Vec<usize> = idx[k..].to_vec();
    held.sort_unstable();
    train.sort_unstable();
    (
        train.into_iter().map(|i| items[i].clone()).collect(),
        held.into_iter().map(|i| items[i].clone()).collect(),
    )
}
