use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use sageforge_core::corpus::{
    build_pair_dataset, collect_functions, ingest_directory, overlap_table, write_pairs_jsonl, PairRecord,
};
use sageforge_core::encoder::Parameters;
use sageforge_core::obfuscator::obfuscate_source;
use sageforge_core::searcheval::{
    build_code2code_dataset, evaluate, load_problem_groups, split_heldout, SearchDataset, SearchReport,
};
use sageforge_core::syntax::{token_distribution, DistributionReport, Language, OverlapTable};
use sageforge_core::tokenizer::{Tokenizer, TokenizerConfig};
use sageforge_core::trainer::{
    load_stage1_items, train_stage1, train_stage2, write_report, CheckpointSink, PairItem, Stage, TrainConfig,
    TrainReport,
};

#[derive(Parser, Debug)]
#[command(name = "sageforge", version, about = "Code representation pretraining and code search evaluation")]
struct Cli {
    /// Seed for every random choice in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract (summary, code) pairs from a source tree.
    Pairs(PairsArgs),
    /// Token category distribution and docstring overlap statistics.
    Stats(StatsArgs),
    /// Rename identifiers to placeholders in one file.
    Obfuscate(ObfuscateArgs),
    /// Learn a byte-level BPE vocabulary from a source tree.
    TokenizerTrain(TokenizerArgs),
    /// Run one training stage.
    Train(TrainArgs),
    /// Zero-shot code search evaluation.
    Eval(EvalArgs),
    /// Render a training or evaluation report as text and CSV.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct PairsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "python")]
    lang: Language,
    #[arg(long)]
    tokenizer: PathBuf,
    /// Training pairs (held-out pairs excluded).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
    /// Number of pairs held out as an NL2Code search set.
    #[arg(long, default_value_t = 0)]
    heldout: usize,
    /// Directory for the held-out search set.
    #[arg(long)]
    search_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "python")]
    lang: Language,
    #[arg(long)]
    tokenizer: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ObfuscateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "python")]
    lang: Language,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    map: PathBuf,
}

#[derive(Args, Debug)]
struct TokenizerArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "python")]
    lang: Language,
    #[arg(long)]
    out: PathBuf,
    /// TOML or JSON file with tokenizer settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    vocab_size: Option<usize>,
    #[arg(long)]
    max_placeholders: Option<usize>,
    #[arg(long)]
    min_frequency: Option<u64>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long)]
    stage: Stage,
    /// TOML or JSON training config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Checkpoint and report directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    tokenizer: Option<PathBuf>,
    /// Source tree for denoising pretraining.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Pair JSONL for contrastive training.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Checkpoint to start from.
    #[arg(long)]
    init: Option<PathBuf>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    warmup_steps: Option<usize>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    max_len: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Task {
    Nl2code,
    Code2code,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    task: Task,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    tokenizer: PathBuf,
    /// Directory with queries.jsonl, candidates.jsonl and relevance.jsonl.
    #[arg(long, conflicts_with = "groups")]
    data: Option<PathBuf>,
    /// Directory of problem folders, each holding solution files (code2code).
    #[arg(long)]
    groups: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    max_len: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// A training report.json or an evaluation report.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let seed = cli.seed.unwrap_or(0);
    match cli.command {
        Command::Pairs(a) => pairs(a, seed),
        Command::Stats(a) => stats(a),
        Command::Obfuscate(a) => obfuscate(a),
        Command::TokenizerTrain(a) => tokenizer_train(a, seed),
        Command::Train(a) => train(a, cli.seed),
        Command::Eval(a) => eval(a, seed),
        Command::Report(a) => report(a),
    }
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, text)
}

/// Parse a TOML or JSON file (by extension); unknown keys are rejected by the target type.
fn read_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing config {}", path.display()))
}

fn load_tokenizer(path: &Path) -> Result<Tokenizer> {
    Tokenizer::load(path).with_context(|| format!("loading tokenizer {}", path.display()))
}

fn pairs(a: PairsArgs, seed: u64) -> Result<()> {
    let tok = load_tokenizer(&a.tokenizer)?;
    let ingested = ingest_directory(&a.input, a.lang)?;
    let dataset = build_pair_dataset(&ingested.files, &tok)?;
    let report = dataset.report(ingested.files.len());
    log::info!("{} files, {} pairs from {} functions", report.files, report.pairs, report.functions);
    if a.heldout > dataset.pairs.len() {
        bail!("cannot hold out {} of {} pairs", a.heldout, dataset.pairs.len());
    }
    if a.heldout > 0 && a.search_out.is_none() {
        bail!("--heldout needs --search-out");
    }
    let (train, held) = split_heldout(&dataset.pairs, a.heldout, seed);
    write_pairs_jsonl(&train, &a.out)?;
    if let Some(dir) = &a.search_out {
        let records: Vec<PairRecord> = held.iter().map(PairRecord::from).collect();
        SearchDataset::from_pairs(&records)?.save(dir)?;
        log::info!("held out {} pairs as a search set in {}", held.len(), dir.display());
    }
    if let Some(path) = &a.report {
        write_json(path, &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StatsOutput {
    distribution: DistributionReport,
    overlap: OverlapTable,
}

fn stats(a: StatsArgs) -> Result<()> {
    let tok = load_tokenizer(&a.tokenizer)?;
    let ingested = ingest_directory(&a.input, a.lang)?;
    let distribution = token_distribution(ingested.files.iter().map(|f| f.content.as_str()), a.lang, &tok)?;
    let functions = collect_functions(&ingested.files)?;
    let overlap = overlap_table(&functions, &tok);
    write_json(&a.out, &StatsOutput { distribution, overlap })
}

fn obfuscate(a: ObfuscateArgs) -> Result<()> {
    let source = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let result = obfuscate_source(&source, a.lang)?;
    log::info!("renamed {} identifiers", result.identifier_map.len());
    write(&a.out, &result.obfuscated_text)?;
    write(&a.map, result.map_json()?)
}

fn tokenizer_train(a: TokenizerArgs, seed: u64) -> Result<()> {
    let mut cfg: TokenizerConfig = match &a.config {
        Some(p) => read_config(p)?,
        None => TokenizerConfig::default(),
    };
    cfg.vocab_size = a.vocab_size.unwrap_or(cfg.vocab_size);
    cfg.max_placeholders = a.max_placeholders.unwrap_or(cfg.max_placeholders);
    cfg.min_frequency = a.min_frequency.unwrap_or(cfg.min_frequency);
    log::info!("resolved config: {}", serde_json::to_string(&cfg)?);
    let ingested = ingest_directory(&a.input, a.lang)?;
    let tok = Tokenizer::train(ingested.files.iter().map(|f| f.content.as_str()), &cfg, seed)?;
    log::info!("learned {} merges, vocabulary {}", tok.num_merges(), tok.vocab_size());
    tok.save(&a.out)?;
    Ok(())
}

/// Defaults for the stage, then the config file, then flags.
fn resolve_train_config(a: &TrainArgs, seed: Option<u64>) -> Result<TrainConfig> {
    let mut cfg = match &a.config {
        Some(p) => {
            let cfg: TrainConfig = read_config(p)?;
            if cfg.stage != a.stage {
                log::warn!("config stage {} overridden by --stage {}", cfg.stage, a.stage);
            }
            cfg
        }
        None => TrainConfig::for_stage(a.stage),
    };
    cfg.stage = a.stage;
    macro_rules! set {
        ($field:expr, $flag:expr) => {
            if let Some(v) = $flag.clone() {
                $field = v;
            }
        };
    }
    set!(cfg.seed, seed);
    set!(cfg.steps, a.steps);
    set!(cfg.batch_size, a.batch_size);
    set!(cfg.base_lr, a.lr);
    set!(cfg.warmup_steps, a.warmup_steps);
    set!(cfg.preset, a.preset);
    set!(cfg.seq.max_len, a.max_len);
    if a.tokenizer.is_some() {
        cfg.data.tokenizer = a.tokenizer.clone();
    }
    if a.corpus.is_some() {
        cfg.data.corpus = a.corpus.clone();
    }
    if a.pairs.is_some() {
        cfg.data.pairs = a.pairs.clone();
    }
    if a.init.is_some() {
        cfg.data.init = a.init.clone();
    }
    if a.steps.is_some() && a.warmup_steps.is_none() && cfg.warmup_steps > cfg.steps {
        cfg.warmup_steps = cfg.steps / 10;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn train(a: TrainArgs, seed: Option<u64>) -> Result<()> {
    let cfg = resolve_train_config(&a, seed)?;
    log::info!("resolved config:\n{}", cfg.to_toml()?);
    let tok_path = cfg.data.tokenizer.as_deref().context("no tokenizer given (--tokenizer or data.tokenizer)")?;
    let tok = load_tokenizer(tok_path)?;
    let init = match &cfg.data.init {
        Some(p) if cfg.stage != Stage::Stage2FromScratch => {
            Some(Parameters::<f32>::load(p).with_context(|| format!("loading checkpoint {}", p.display()))?)
        }
        Some(_) => {
            log::warn!("2-scratch ignores the initial checkpoint");
            None
        }
        None => None,
    };
    let sink = CheckpointSink { dir: Some(a.out.clone()) };
    let report = match cfg.stage {
        Stage::Stage1 => {
            let corpus = cfg.data.corpus.as_deref().context("no corpus given (--corpus or data.corpus)")?;
            let items = load_stage1_items(corpus, Language::Python, &tok)?;
            log::info!("{} functions prepared for denoising", items.len());
            train_stage1(&cfg, &tok, &items, init, &sink)?.1
        }
        Stage::Stage2 | Stage::Stage2FromScratch => {
            let path = cfg.data.pairs.as_deref().context("no pairs given (--pairs or data.pairs)")?;
            let records = sageforge_core::corpus::read_pairs_jsonl(path)?;
            let items: Vec<PairItem> = records
                .iter()
                .map(|r| PairItem::new(&r.summary, &r.code, &tok, cfg.seq.max_len))
                .collect();
            train_stage2(&cfg, &tok, &items, init, &sink)?.1
        }
    };
    log::info!(
        "finished {} steps in {:.1}s, final loss {:.4}",
        report.steps,
        report.wall_clock_secs,
        report.final_loss.unwrap_or(f64::NAN)
    );
    write_report(&report, &a.out)?;
    write(&a.out.join("config.toml"), cfg.to_toml()?)
}

fn eval(a: EvalArgs, seed: u64) -> Result<()> {
    let tok = load_tokenizer(&a.tokenizer)?;
    let params = Parameters::<f32>::load(&a.model).with_context(|| format!("loading checkpoint {}", a.model.display()))?;
    let (name, dataset) = match (a.task, &a.data, &a.groups) {
        (_, Some(dir), _) => (a.task, SearchDataset::load(dir)?),
        (Task::Code2code, None, Some(dir)) => (a.task, build_code2code_dataset(&load_problem_groups(dir)?, seed)?),
        (Task::Nl2code, None, Some(_)) => bail!("--groups only applies to code2code"),
        (_, None, None) => bail!("one of --data or --groups is required"),
    };
    let task = match name {
        Task::Nl2code => "nl2code",
        Task::Code2code => "code2code",
    };
    let report = evaluate(task, &params, &tok, &dataset, a.max_len)?;
    log::info!(
        "{task}: {} queries, MRR {:.4}, MAP {:.4} (random MRR {:.4})",
        report.queries,
        report.mrr,
        report.map,
        report.random_mrr
    );
    write_json(&a.out, &report)
}

fn report(a: ReportArgs) -> Result<()> {
    let text = fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let (summary, csv) = if let Ok(r) = serde_json::from_str::<TrainReport>(&text) {
        render_train(&r)
    } else if let Ok(r) = serde_json::from_str::<SearchReport>(&text) {
        render_search(&r)
    } else {
        bail!("{} is neither a training nor an evaluation report", a.input.display());
    };
    write(&a.out, summary)?;
    if let Some(path) = &a.csv {
        write(path, csv)?;
    }
    Ok(())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

fn render_train(r: &TrainReport) -> (String, String) {
    let mut s = format!("stage {}\nsteps {}\n", r.stage, r.steps);
    s += &format!("initial loss {}\nfinal loss {}\n", opt(r.initial_loss), opt(r.final_loss));
    if let Some(chance) = r.chance_accuracy {
        s += &format!("final in-batch accuracy {} (chance {chance:.4})\n", opt(r.final_accuracy));
    }
    s += &format!("skipped steps {}\n", r.skipped_steps);
    (s, r.loss_csv())
}

fn render_search(r: &SearchReport) -> (String, String) {
    let s = format!(
        "task {}\nqueries {}\ncandidates {}\nMRR {:.4}\nMAP {:.4}\nrandom MRR {:.4}\n",
        r.task, r.queries, r.candidates, r.mrr, r.map, r.random_mrr
    );
    let mut csv = String::from("qid,reciprocal_rank,average_precision,first_relevant_rank\n");
    for q in &r.per_query {
        csv += &format!("{},{},{},{}\n", q.qid, q.reciprocal_rank, q.average_precision, q.first_relevant_rank);
    }
    (s, csv)
}
