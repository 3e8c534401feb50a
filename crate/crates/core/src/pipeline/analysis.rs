use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::align::{canonical_title, SummPair};
use crate::baselines::{ext_oracle, lead_baseline, lexrank_baseline, reduce_document};
use crate::config::RunConfig;
use crate::metrics::{corpus_stats, extractive_probes, stats_csv, stats_markdown, TaskStats};
use crate::rouge::{self, rouge_l_recall_budget, RougeReport};
use crate::segment::{RuleTokenizer, TokenizedText, Tokenizer};
use crate::store::{read_articles, read_pairs, write_text, JsonlReader, JsonlWriter, Transaction};

use super::{PipelineError, Result};

const CHUNK: usize = 256;

/// Leads of source-language articles, for the monolingual view of a pair.
#[derive(Debug, Clone, Default)]
pub struct Partners {
    leads: HashMap<(String, String), Vec<String>>,
}

impl Partners {
    /// Monolingual pairs are their own partner; others need the source
    /// article's lead.
    pub fn lookup(&self, pair: &SummPair) -> Option<Vec<String>> {
        if pair.is_monolingual() {
            return Some(pair.summary.clone());
        }
        self.leads
            .get(&(pair.src_lang.clone(), canonical_title(&pair.src_title)))
            .cloned()
    }

    pub fn len(&self) -> usize {
        self.leads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leads.is_empty()
    }
}

pub fn load_partners(articles: Option<&Path>) -> Result<Partners> {
    let mut leads = HashMap::new();
    if let Some(path) = articles {
        for article in read_articles(path)? {
            let a = article?;
            leads.insert((a.language, canonical_title(&a.title)), a.lead);
        }
    }
    Ok(Partners { leads })
}

fn read_all(path: &Path) -> Result<Vec<SummPair>> {
    Ok(read_pairs(path)?.collect::<std::result::Result<_, _>>()?)
}

fn set_label(path: &Path, pairs: &[SummPair]) -> String {
    pairs.first().map(|p| p.lang_pair().to_string()).unwrap_or_else(|| {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        name.trim_start_matches("pairs.").trim_end_matches(".jsonl").to_string()
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StatsOptions {
    /// Add Lead and Ext-Oracle ROUGE-L rows to the markdown table.
    pub probes: bool,
}

/// Table-3 statistics for each pair file; writes the CSV and markdown.
pub fn stats(
    inputs: &[PathBuf],
    partners: &Partners,
    cfg: &RunConfig,
    opts: StatsOptions,
    csv_out: &Path,
    md_out: &Path,
) -> Result<Vec<(String, TaskStats)>> {
    let tokenizer = cfg.tokenizer()?;
    let lookup = |p: &SummPair| partners.lookup(p);
    let mut rows = Vec::new();
    let mut probes = Vec::new();
    for path in inputs {
        let pairs = read_all(path)?;
        let label = set_label(path, &pairs);
        if pairs.is_empty() {
            log::warn!("stats: {label} is empty, skipped");
            continue;
        }
        let s = corpus_stats(&pairs, lookup, &tokenizer, cfg.rouge.lowercase)?;
        if opts.probes {
            probes.push(extractive_probes(&pairs, lookup, &tokenizer, &cfg.rouge));
        } else {
            probes.push(None);
        }
        log::info!("stats: {label} {} pairs", s.pairs);
        rows.push((label, s));
    }
    if rows.is_empty() {
        return Err(PipelineError::Data("no non-empty pair set to describe".into()));
    }
    let mut tx = Transaction::new();
    write_text(&tx.stage(csv_out), &stats_csv(&rows))?;
    write_text(&tx.stage(md_out), &stats_markdown(&rows, &probes))?;
    tx.commit()?;
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Lead,
    LexRank,
    ExtOracle,
}

impl FromStr for BaselineMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "lead" => Ok(BaselineMethod::Lead),
            "lexrank" => Ok(BaselineMethod::LexRank),
            "ext-oracle" => Ok(BaselineMethod::ExtOracle),
            other => Err(format!("unknown method {other:?} (lead, lexrank, ext-oracle)")),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Candidate {
    id: String,
    tokens: Vec<String>,
}

/// Corpus means of the nine P/R/F1 values, R1 then R2 then RL.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineSummary {
    pub pairs: usize,
    pub mean: [f64; 9],
}

fn flat(r: &RougeReport) -> [f64; 9] {
    let mut out = [0.0; 9];
    for (i, s) in r.scores().iter().enumerate() {
        out[3 * i] = s.precision;
        out[3 * i + 1] = s.recall;
        out[3 * i + 2] = s.f1;
    }
    out
}

const SCORE_HEADER: &str = "id,r1_p,r1_r,r1_f,r2_p,r2_r,r2_f,rl_p,rl_r,rl_f\n";

struct ScoreTable {
    csv: String,
    sum: [f64; 9],
    n: usize,
}

impl ScoreTable {
    fn new() -> Self {
        ScoreTable {
            csv: SCORE_HEADER.to_string(),
            sum: [0.0; 9],
            n: 0,
        }
    }

    fn push(&mut self, id: &str, values: [f64; 9]) {
        self.csv.push_str(id);
        for (acc, v) in self.sum.iter_mut().zip(values) {
            *acc += v;
            let _ = write!(self.csv, ",{v:.6}");
        }
        self.csv.push('\n');
        self.n += 1;
    }

    fn finish(mut self) -> (String, BaselineSummary) {
        let mean = self.sum.map(|s| if self.n == 0 { 0.0 } else { s / self.n as f64 });
        self.csv.push_str("mean");
        for v in mean {
            let _ = write!(self.csv, ",{v:.6}");
        }
        self.csv.push('\n');
        (self.csv, BaselineSummary { pairs: self.n, mean })
    }
}

/// Tokens re-read as text so sentence bounds are available to ROUGE-L.
fn retokenize(tokenizer: &RuleTokenizer, tokens: &[String], lang: &str) -> TokenizedText {
    tokenizer.tokenize(&tokens.join(" "), lang)
}

fn run_baseline(
    pair: &SummPair,
    method: BaselineMethod,
    proxy: Option<Vec<String>>,
    tokenizer: &RuleTokenizer,
    cfg: &RunConfig,
) -> (Vec<String>, [f64; 9]) {
    let paragraphs: Vec<&str> = pair.doc.paragraphs().collect();
    let doc = tokenizer.tokenize_paragraphs(&paragraphs, &pair.src_lang);
    let reference = tokenizer.tokenize_paragraphs(&pair.summary, &pair.tgt_lang);
    let k = reference.len();
    let tokens = match method {
        BaselineMethod::Lead => lead_baseline(&doc.tokens, k),
        BaselineMethod::LexRank => {
            let sentences: Vec<Vec<String>> = doc.sentences().map(<[String]>::to_vec).collect();
            lexrank_baseline(&sentences, k, &cfg.lexrank)
        }
        BaselineMethod::ExtOracle => {
            let folded = doc.clone().folded(cfg.rouge.lowercase);
            let sentences: Vec<Vec<String>> = folded.sentences().map(<[String]>::to_vec).collect();
            let target = reference.clone().folded(cfg.rouge.lowercase);
            let proxy = proxy.map(|p| {
                tokenizer
                    .tokenize_paragraphs(&p, &pair.src_lang)
                    .folded(cfg.rouge.lowercase)
                    .tokens
            });
            let mut chosen = ext_oracle(&sentences, &target.tokens, proxy.as_deref()).chosen;
            chosen.sort_unstable();
            let original: Vec<&[String]> = doc.sentences().collect();
            chosen.iter().flat_map(|&i| original[i].iter().cloned()).collect()
        }
    };
    let candidate = retokenize(tokenizer, &tokens, &pair.src_lang);
    let scores = flat(&rouge::score(&candidate, &reference, &cfg.rouge));
    (tokens, scores)
}

/// Runs one extractive baseline over a pair file, writing candidates
/// `{id, tokens}` and a per-pair scores CSV against the pair summaries.
pub fn baseline(
    pairs_path: &Path,
    method: BaselineMethod,
    proxy_reference: bool,
    partners: &Partners,
    cfg: &RunConfig,
    candidates_out: &Path,
    scores_out: &Path,
) -> Result<BaselineSummary> {
    let tokenizer = cfg.tokenizer()?;
    let mut tx = Transaction::new();
    let mut writer = JsonlWriter::<Candidate>::create(&tx.stage(candidates_out))?;
    let mut table = ScoreTable::new();
    let mut missing_proxy = 0;
    let mut reader = read_pairs(pairs_path)?;
    loop {
        let chunk = reader
            .by_ref()
            .take(CHUNK)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if chunk.is_empty() {
            break;
        }
        let proxies: Vec<Option<Vec<String>>> = chunk
            .iter()
            .map(|p| {
                if !proxy_reference || p.is_monolingual() {
                    return None;
                }
                let found = partners.lookup(p);
                missing_proxy += usize::from(found.is_none());
                found
            })
            .collect();
        let results: Vec<_> = chunk
            .par_iter()
            .zip(proxies)
            .map(|(pair, proxy)| run_baseline(pair, method, proxy, &tokenizer, cfg))
            .collect();
        for (pair, (tokens, scores)) in chunk.iter().zip(results) {
            writer.write(&Candidate {
                id: pair.id.clone(),
                tokens,
            })?;
            table.push(&pair.id, scores);
        }
    }
    if missing_proxy > 0 {
        log::warn!("baseline: {missing_proxy} pairs had no monolingual summary; the reference was used for selection");
    }
    writer.finish()?;
    let (csv, summary) = table.finish();
    write_text(&tx.stage(scores_out), &csv)?;
    tx.commit()?;
    Ok(summary)
}

/// Text of a candidate or reference record: `tokens`, `summary` or `text`.
fn record_text(v: &Value) -> Option<(String, String)> {
    let id = v.get("id")?.as_str()?.to_string();
    let text = if let Some(tokens) = v.get("tokens").and_then(Value::as_array) {
        tokens.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" ")
    } else {
        match v.get("summary").or_else(|| v.get("text"))? {
            Value::String(s) => s.clone(),
            Value::Array(items) => items.iter().filter_map(Value::as_str).collect::<Vec<_>>().join("\n"),
            _ => return None,
        }
    };
    Some((id, text))
}

fn record_lang(v: &Value) -> String {
    ["tgt_lang", "lang"]
        .iter()
        .find_map(|k| v.get(*k).and_then(Value::as_str))
        .unwrap_or("und")
        .to_string()
}

fn read_texts(path: &Path) -> Result<Vec<(String, String, String)>> {
    let mut out = Vec::new();
    for (i, v) in JsonlReader::<Value>::open(path)?.enumerate() {
        let v = v?;
        let (id, text) = record_text(&v).ok_or_else(|| {
            PipelineError::Data(format!(
                "{}: record {} needs an id and one of tokens, summary or text",
                path.display(),
                i + 1
            ))
        })?;
        out.push((id, text, record_lang(&v)));
    }
    Ok(out)
}

/// Scores candidates against references matched by id; writes per-pair
/// rows and a mean row.
pub fn rouge_files(candidates: &Path, references: &Path, cfg: &RunConfig, out: &Path) -> Result<BaselineSummary> {
    let tokenizer = cfg.tokenizer()?;
    let refs: HashMap<String, (String, String)> = read_texts(references)?
        .into_iter()
        .map(|(id, text, lang)| (id, (text, lang)))
        .collect();
    let cands = read_texts(candidates)?;
    let mut table = ScoreTable::new();
    for (id, text, _) in &cands {
        let (ref_text, lang) = refs
            .get(id)
            .ok_or_else(|| PipelineError::Data(format!("no reference with id {id:?}")))?;
        let reference = tokenizer.tokenize(ref_text, lang);
        let candidate = tokenizer.tokenize(text, lang);
        table.push(id, flat(&rouge::score(&candidate, &reference, &cfg.rouge)));
    }
    let (csv, summary) = table.finish();
    write_text(out, &csv)?;
    Ok(summary)
}

/// Mean ROUGE-L recall (×100) of three document views against the
/// monolingual summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRow {
    pub set: String,
    pub pairs: usize,
    pub all: f64,
    pub prefix: f64,
    pub extracted: f64,
}

struct Reduced {
    pair: SummPair,
    recalls: [f64; 3],
}

fn reduce_pair(
    pair: &SummPair,
    partner: Option<Vec<String>>,
    tokenizer: &RuleTokenizer,
    cfg: &RunConfig,
    prefix: usize,
) -> Result<Reduced> {
    let (reference, ref_lang) = match partner {
        Some(lead) => (lead, pair.src_lang.as_str()),
        None => (pair.summary.clone(), pair.tgt_lang.as_str()),
    };
    let lc = cfg.rouge.lowercase;
    let reference = tokenizer.tokenize_paragraphs(&reference, ref_lang).folded(lc);
    let paragraphs: Vec<&str> = pair.doc.paragraphs().collect();
    let full = tokenizer.tokenize_paragraphs(&paragraphs, &pair.src_lang).folded(lc);
    let (doc, _) = reduce_document(&pair.doc, tokenizer, &pair.src_lang, cfg.budget, &cfg.lexrank)?;
    let kept: Vec<&str> = doc.paragraphs().collect();
    let reduced = tokenizer.tokenize_paragraphs(&kept, &pair.src_lang).folded(lc);
    let mode = cfg.rouge.mode;
    Ok(Reduced {
        recalls: [
            rouge_l_recall_budget(&full, &reference, mode),
            rouge_l_recall_budget(&full.truncated(prefix), &reference, mode),
            rouge_l_recall_budget(&reduced, &reference, mode),
        ],
        pair: SummPair { doc, ..pair.clone() },
    })
}

/// Reduces each input pair file to `cfg.budget` tokens of LexRank-chosen
/// paragraphs and writes the recall report.
pub fn extract_paragraphs(
    inputs: &[(PathBuf, PathBuf)],
    partners: &Partners,
    cfg: &RunConfig,
    prefix_tokens: usize,
    report_out: &Path,
) -> Result<Vec<ExtractionRow>> {
    let tokenizer = cfg.tokenizer()?;
    let mut tx = Transaction::new();
    let mut rows = Vec::new();
    for (input, output) in inputs {
        let mut writer = JsonlWriter::<SummPair>::create(&tx.stage(output))?;
        let mut sums = [0.0; 3];
        let mut n = 0;
        let mut label = None;
        let mut reader = read_pairs(input)?;
        loop {
            let chunk = reader
                .by_ref()
                .take(CHUNK)
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if chunk.is_empty() {
                break;
            }
            label.get_or_insert_with(|| chunk[0].lang_pair().to_string());
            let reduced = chunk
                .par_iter()
                .map(|p| reduce_pair(p, partners.lookup(p), &tokenizer, cfg, prefix_tokens))
                .collect::<Result<Vec<_>>>()?;
            for r in reduced {
                for (s, v) in sums.iter_mut().zip(r.recalls) {
                    *s += v;
                }
                n += 1;
                writer.write(&r.pair)?;
            }
        }
        writer.finish()?;
        let mean = |s: f64| if n == 0 { 0.0 } else { 100.0 * s / n as f64 };
        rows.push(ExtractionRow {
            set: label.unwrap_or_else(|| set_label(input, &[])),
            pairs: n,
            all: mean(sums[0]),
            prefix: mean(sums[1]),
            extracted: mean(sums[2]),
        });
    }
    write_text(
        &tx.stage(report_out),
        &extraction_report(&rows, prefix_tokens, cfg.budget),
    )?;
    tx.commit()?;
    Ok(rows)
}

fn extraction_report(rows: &[ExtractionRow], prefix: usize, budget: usize) -> String {
    let mut out = format!("| | Pairs | All | {prefix} | ParaLexRank.{budget} |\n|---|---:|---:|---:|---:|\n");
    for r in rows {
        let _ = writeln!(
            out,
            "| {} | {} | {:.2} | {:.2} | {:.2} |",
            r.set, r.pairs, r.all, r.prefix, r.extracted
        );
    }
    out
}
