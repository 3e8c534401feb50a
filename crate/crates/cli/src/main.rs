//! `xwf`: build and analyse cross-lingual summarisation corpora from
//! Wikipedia dumps.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xwf_core::align::LinkFormat;
use xwf_core::config::{describe_keys, ConfigError, RunConfig};
use xwf_core::pipeline::{self, BaselineMethod, DumpInput, LinkInput, PipelineError, StatsOptions};
use xwf_core::rouge::LcsMode;
use xwf_core::store::{build_timestamp, CorpusLayout};

#[derive(Parser)]
#[command(
    name = "xwf",
    version,
    about = "Cross-lingual Wikipedia summarisation corpus toolkit"
)]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, env = "XWF_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse XML dumps into articles.jsonl and pageids.tsv.
    #[command(after_help = keys_ingest())]
    Ingest(IngestArgs),
    /// Cluster titles over interlanguage links into clusters.jsonl.
    #[command(after_help = keys_align())]
    Align(AlignArgs),
    /// Build every pair set under the length filters and write the manifest.
    #[command(after_help = keys_build())]
    Build(BuildArgs),
    /// Sample the parallel subset and assign train/valid/test by cluster.
    #[command(after_help = keys_split())]
    Split(SplitArgs),
    /// Task statistics per pair set as CSV and markdown.
    #[command(after_help = keys_stats())]
    Stats(StatsArgs),
    /// Run Lead, LexRank or Ext-Oracle over a pair file.
    #[command(after_help = keys_baseline())]
    Baseline(BaselineArgs),
    /// Score candidates against references by id.
    #[command(after_help = keys_rouge())]
    Rouge(RougeArgs),
    /// Reduce documents to a token budget of LexRank-ranked paragraphs.
    #[command(after_help = keys_extract())]
    ExtractParagraphs(ExtractArgs),
}

fn keys_ingest() -> String {
    describe_keys(&[])
}
fn keys_align() -> String {
    describe_keys(&["languages"])
}
fn keys_build() -> String {
    describe_keys(&["languages", "filters", "monolingual", "abbreviations_dir"])
}
fn keys_split() -> String {
    describe_keys(&["seed", "parallel_k", "valid_fraction"])
}
fn keys_stats() -> String {
    describe_keys(&["rouge", "abbreviations_dir"])
}
fn keys_baseline() -> String {
    describe_keys(&["lexrank", "rouge", "abbreviations_dir"])
}
fn keys_rouge() -> String {
    describe_keys(&["rouge", "abbreviations_dir"])
}
fn keys_extract() -> String {
    describe_keys(&["budget", "lexrank", "rouge", "abbreviations_dir"])
}

#[derive(Args)]
struct IngestArgs {
    /// Dump to read, as LANG=PATH. Repeatable.
    #[arg(long = "dump", required = true, value_parser = parse_dump_arg)]
    dumps: Vec<DumpInput>,
    /// Corpus directory to write.
    #[arg(long)]
    corpus: PathBuf,
}

#[derive(Args)]
struct AlignArgs {
    /// Langlinks file. For sql-insert give LANG=PATH, LANG being the wiki
    /// the dump belongs to. Repeatable.
    #[arg(long = "links", required = true)]
    links: Vec<String>,
    /// tsv or sql-insert.
    #[arg(long, default_value = "tsv", value_parser = |s: &str| s.parse::<LinkFormat>().map_err(|e| e.to_string()))]
    format: LinkFormat,
    #[arg(long)]
    corpus: PathBuf,
    /// Comma-separated language codes.
    #[arg(long, value_delimiter = ',')]
    languages: Option<Vec<String>>,
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_delimiter = ',')]
    languages: Option<Vec<String>>,
    /// Also build same-language sets.
    #[arg(long)]
    monolingual: bool,
    #[arg(long)]
    min_body_tokens: Option<usize>,
    #[arg(long)]
    max_body_tokens: Option<usize>,
    #[arg(long)]
    min_lead_tokens: Option<usize>,
    #[arg(long)]
    max_lead_tokens: Option<usize>,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    parallel_k: Option<usize>,
    #[arg(long)]
    valid_fraction: Option<f64>,
}

#[derive(Args)]
struct RougeFlags {
    /// ROUGE-L mode: summary-union or sequence.
    #[arg(long, value_parser = |s: &str| s.parse::<LcsMode>())]
    mode: Option<LcsMode>,
    /// Match case-sensitively.
    #[arg(long)]
    no_lowercase: bool,
}

#[derive(Args)]
struct StatsArgs {
    /// Corpus directory; its pair files are described unless --pairs is given.
    #[arg(long, required_unless_present = "pairs")]
    corpus: Option<PathBuf>,
    /// Pair files to describe, one row each.
    #[arg(long)]
    pairs: Vec<PathBuf>,
    /// Articles for the monolingual view of cross-lingual pairs
    /// (default: the corpus articles.jsonl).
    #[arg(long)]
    articles: Option<PathBuf>,
    /// Where stats.csv and report.md go (default: the corpus directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add Lead and Ext-Oracle ROUGE-L rows.
    #[arg(long)]
    probes: bool,
    #[command(flatten)]
    rouge: RougeFlags,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    pairs: PathBuf,
    /// lead, lexrank or ext-oracle.
    #[arg(long, value_parser = |s: &str| s.parse::<BaselineMethod>())]
    method: BaselineMethod,
    /// Select oracle sentences against the monolingual summary.
    #[arg(long)]
    proxy_reference: bool,
    /// Articles holding the monolingual summaries.
    #[arg(long, required_if_eq("proxy_reference", "true"))]
    articles: Option<PathBuf>,
    /// Candidate JSONL {id, tokens}.
    #[arg(long)]
    out_candidates: PathBuf,
    /// Per-pair scores CSV.
    #[arg(long)]
    out_scores: PathBuf,
    #[command(flatten)]
    rouge: RougeFlags,
}

#[derive(Args)]
struct RougeArgs {
    /// JSONL with id and tokens, text or summary.
    #[arg(long)]
    candidates: PathBuf,
    /// JSONL with id and tokens, text or summary (pair files work).
    #[arg(long)]
    references: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    rouge: RougeFlags,
}

#[derive(Args)]
struct ExtractArgs {
    /// Pair files to reduce. Repeatable.
    #[arg(long, required = true)]
    pairs: Vec<PathBuf>,
    /// Directory for the reduced pair files (same names).
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    budget: Option<usize>,
    /// Length of the plain-prefix comparison column.
    #[arg(long, default_value_t = 800)]
    prefix_tokens: usize,
    /// Articles holding the monolingual summaries.
    #[arg(long)]
    articles: Option<PathBuf>,
    /// Recall report (default: <out-dir>/extraction.md).
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    rouge: RougeFlags,
}

fn parse_dump_arg(s: &str) -> Result<DumpInput, String> {
    match s.split_once('=') {
        Some((lang, path)) if !lang.is_empty() && !path.is_empty() => Ok(DumpInput {
            lang: lang.to_string(),
            path: PathBuf::from(path),
        }),
        _ => Err(format!("expected LANG=PATH, got {s:?}")),
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(c) => Failure::Usage(c.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn apply_rouge(cfg: &mut RunConfig, flags: &RougeFlags) {
    if let Some(mode) = flags.mode {
        cfg.rouge.mode = mode;
    }
    if flags.no_lowercase {
        cfg.rouge.lowercase = false;
    }
}

fn existing(path: PathBuf) -> Option<PathBuf> {
    path.exists().then_some(path)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    match cli.command {
        Command::Ingest(a) => {
            pipeline::ingest(&a.dumps, &CorpusLayout::new(a.corpus))?;
        }
        Command::Align(a) => {
            if let Some(l) = a.languages {
                cfg.languages = l;
            }
            cfg.validate()?;
            let inputs = a
                .links
                .iter()
                .map(|spec| match (a.format, spec.split_once('=')) {
                    (LinkFormat::SqlInsert, Some((lang, path))) => Ok(LinkInput {
                        path: PathBuf::from(path),
                        format: a.format,
                        lang: Some(lang.to_string()),
                    }),
                    (LinkFormat::SqlInsert, None) => {
                        Err(Failure::Usage(format!("sql-insert links need LANG=PATH, got {spec:?}")))
                    }
                    (LinkFormat::Tsv, _) => Ok(LinkInput {
                        path: PathBuf::from(spec),
                        format: a.format,
                        lang: None,
                    }),
                })
                .collect::<Result<Vec<_>, _>>()?;
            pipeline::align(&inputs, &CorpusLayout::new(a.corpus), &cfg)?;
        }
        Command::Build(a) => {
            if let Some(l) = a.languages {
                cfg.languages = l;
            }
            cfg.monolingual |= a.monolingual;
            let f = &mut cfg.filters;
            f.min_body_tokens = a.min_body_tokens.unwrap_or(f.min_body_tokens);
            f.max_body_tokens = a.max_body_tokens.unwrap_or(f.max_body_tokens);
            f.min_lead_tokens = a.min_lead_tokens.unwrap_or(f.min_lead_tokens);
            f.max_lead_tokens = a.max_lead_tokens.unwrap_or(f.max_lead_tokens);
            cfg.validate()?;
            pipeline::build(&CorpusLayout::new(a.corpus), &cfg, build_timestamp())?;
        }
        Command::Split(a) => {
            cfg.seed = a.seed.or(cfg.seed);
            cfg.parallel_k = a.parallel_k.unwrap_or(cfg.parallel_k);
            cfg.valid_fraction = a.valid_fraction.unwrap_or(cfg.valid_fraction);
            cfg.validate()?;
            cfg.require_seed()?;
            pipeline::split(&CorpusLayout::new(a.corpus), &cfg, build_timestamp())?;
        }
        Command::Stats(a) => {
            apply_rouge(&mut cfg, &a.rouge);
            cfg.validate()?;
            let layout = a.corpus.as_ref().map(CorpusLayout::new);
            let inputs = if a.pairs.is_empty() {
                let layout = layout.as_ref().expect("clap requires --corpus without --pairs");
                layout
                    .pair_files()
                    .map_err(|e| Failure::Data(e.to_string()))?
                    .into_iter()
                    .map(|(_, p)| p)
                    .collect()
            } else {
                a.pairs
            };
            let articles = a
                .articles
                .or_else(|| layout.as_ref().and_then(|l| existing(l.articles())));
            let partners = pipeline::load_partners(articles.as_deref())?;
            let out = a.out.or_else(|| a.corpus.clone()).unwrap_or_else(|| PathBuf::from("."));
            let out = CorpusLayout::new(out);
            pipeline::stats(
                &inputs,
                &partners,
                &cfg,
                StatsOptions { probes: a.probes },
                &out.stats_csv(),
                &out.report(),
            )?;
        }
        Command::Baseline(a) => {
            apply_rouge(&mut cfg, &a.rouge);
            cfg.validate()?;
            let partners = pipeline::load_partners(a.articles.as_deref())?;
            let summary = pipeline::baseline(
                &a.pairs,
                a.method,
                a.proxy_reference,
                &partners,
                &cfg,
                &a.out_candidates,
                &a.out_scores,
            )?;
            log::info!(
                "baseline: {} pairs, mean R1 {:.4} R2 {:.4} RL {:.4} (F1)",
                summary.pairs,
                summary.mean[2],
                summary.mean[5],
                summary.mean[8]
            );
        }
        Command::Rouge(a) => {
            apply_rouge(&mut cfg, &a.rouge);
            cfg.validate()?;
            let summary = pipeline::rouge_files(&a.candidates, &a.references, &cfg, &a.out)?;
            log::info!(
                "rouge: {} pairs, mean R1 {:.4} R2 {:.4} RL {:.4} (F1)",
                summary.pairs,
                summary.mean[2],
                summary.mean[5],
                summary.mean[8]
            );
        }
        Command::ExtractParagraphs(a) => {
            apply_rouge(&mut cfg, &a.rouge);
            cfg.budget = a.budget.unwrap_or(cfg.budget);
            cfg.validate()?;
            std::fs::create_dir_all(&a.out_dir).map_err(|e| Failure::Data(format!("{}: {e}", a.out_dir.display())))?;
            let inputs = a
                .pairs
                .iter()
                .map(|p| {
                    let name = p
                        .file_name()
                        .ok_or_else(|| Failure::Usage(format!("{} is not a file", p.display())))?;
                    let out = a.out_dir.join(name);
                    if same_file(p, &out) {
                        return Err(Failure::Usage(format!("{} would overwrite its input", out.display())));
                    }
                    Ok((p.clone(), out))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let partners = pipeline::load_partners(a.articles.as_deref())?;
            let report = a.report.unwrap_or_else(|| a.out_dir.join("extraction.md"));
            pipeline::extract_paragraphs(&inputs, &partners, &cfg, a.prefix_tokens, &report)?;
        }
    }
    Ok(())
}

fn same_file(a: &Path, b: &Path) -> bool {
    match (a.canonicalize(), b.canonicalize()) {
        (Ok(x), Ok(y)) => x == y,
        _ => false,
    }
}

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format(|buf, record| {
            writeln!(
                buf,
                "ts={} level={} target={} msg={:?}",
                buf.timestamp_millis(),
                record.level(),
                record.target(),
                record.args().to_string()
            )
        })
        .init();
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    if let Some(jobs) = cli.jobs.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            log::warn!("could not size the thread pool: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            log::error!("{msg}");
            ExitCode::from(1)
        }
    }
}
