//! Corpus-level task statistics.
//!
//! Size statistics are taken on each pair as stored. Overlap statistics
//! (coverage, density, compression, novel n-grams) are taken on the
//! monolingual view of each pair, i.e. the source document against the lead
//! of the same-language article, because token overlap is meaningless across
//! languages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::align::SummPair;
use crate::baselines::{ext_oracle, lead_baseline};
use crate::rouge::{self, RougeConfig};
use crate::segment::{TokenizedText, Tokenizer};

use super::fragments::{compression, coverage, density, extractive_fragments, novel_ngrams, MetricError};

pub const MAX_NGRAM: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct TaskStats {
    pub pairs: usize,
    pub words_per_doc: f64,
    pub sents_per_doc: f64,
    /// Top-level (level 2) sections.
    pub sections_per_doc: f64,
    pub words_per_sum: f64,
    pub sents_per_sum: f64,
    /// Distinct top-level headings, verbatim.
    pub aspects: usize,
    pub coverage: f64,
    pub density: f64,
    pub compression: f64,
    pub novel_ngram_pct: BTreeMap<usize, f64>,
}

/// Overlap metrics of one document/summary pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairOverlap {
    pub coverage: f64,
    pub density: f64,
    pub compression: f64,
    /// `novel[n - 1]`, `None` when the summary is shorter than `n`.
    pub novel: [Option<f64>; MAX_NGRAM],
}

pub fn pair_overlap<S: AsRef<str>, T: AsRef<str>>(doc: &[S], summary: &[T]) -> Result<PairOverlap, MetricError> {
    let frags = extractive_fragments(doc, summary);
    let mut novel = [None; MAX_NGRAM];
    for (n, slot) in novel.iter_mut().enumerate() {
        *slot = novel_ngrams(doc, summary, n + 1).ok();
    }
    Ok(PairOverlap {
        coverage: coverage(&frags)?,
        density: density(&frags)?,
        compression: compression(doc.len(), summary.len())?,
        novel,
    })
}

fn mean(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn doc_text<T: Tokenizer>(tok: &T, pair: &SummPair, lowercase: bool) -> TokenizedText {
    let paras: Vec<&str> = pair.doc.paragraphs().collect();
    tok.tokenize_paragraphs(&paras, &pair.src_lang).folded(lowercase)
}

/// Table-3 style statistics for one pair set.
///
/// `partner` returns the lead paragraphs of the source-language article for
/// a pair; monolingual pairs may simply return their own summary. Pairs
/// without a partner are left out of the overlap means.
pub fn corpus_stats<T, F>(
    pairs: &[SummPair],
    partner: F,
    tokenizer: &T,
    lowercase: bool,
) -> Result<TaskStats, MetricError>
where
    T: Tokenizer,
    F: Fn(&SummPair) -> Option<Vec<String>>,
{
    if pairs.is_empty() {
        return Err(MetricError::EmptyCorpus);
    }

    let mut size = Vec::with_capacity(pairs.len());
    let mut overlaps = Vec::new();
    let mut aspects = BTreeSet::new();

    for pair in pairs {
        let doc = doc_text(tokenizer, pair, lowercase);
        let summary = tokenizer.tokenize_paragraphs(&pair.summary, &pair.tgt_lang);
        let top_level: Vec<&str> = pair
            .doc
            .sections
            .iter()
            .filter(|s| s.level == 2)
            .map(|s| s.heading.as_str())
            .collect();
        size.push((
            doc.len() as f64,
            doc.sentence_count() as f64,
            top_level.len() as f64,
            summary.len() as f64,
            summary.sentence_count() as f64,
        ));
        aspects.extend(top_level.into_iter().map(str::to_string));

        let Some(mono) = partner(pair) else {
            continue;
        };
        let mono = tokenizer.tokenize_paragraphs(&mono, &pair.src_lang).folded(lowercase);
        if let Ok(o) = pair_overlap(&doc.tokens, &mono.tokens) {
            overlaps.push(o);
        }
    }

    if overlaps.is_empty() {
        return Err(MetricError::NoMonolingualPartner);
    }

    let col = |f: fn(&(f64, f64, f64, f64, f64)) -> f64| mean(size.iter().map(f)).unwrap_or(0.0);
    let mut novel_ngram_pct = BTreeMap::new();
    for n in 1..=MAX_NGRAM {
        if let Some(m) = mean(overlaps.iter().filter_map(|o| o.novel[n - 1])) {
            novel_ngram_pct.insert(n, m);
        }
    }

    Ok(TaskStats {
        pairs: pairs.len(),
        words_per_doc: col(|s| s.0),
        sents_per_doc: col(|s| s.1),
        sections_per_doc: col(|s| s.2),
        words_per_sum: col(|s| s.3),
        sents_per_sum: col(|s| s.4),
        aspects: aspects.len(),
        coverage: mean(overlaps.iter().map(|o| o.coverage)).unwrap_or(0.0),
        density: mean(overlaps.iter().map(|o| o.density)).unwrap_or(0.0),
        compression: mean(overlaps.iter().map(|o| o.compression)).unwrap_or(0.0),
        novel_ngram_pct,
    })
}

/// Mean ROUGE-L F1 (×100) of Lead and Ext-Oracle on the monolingual view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractiveProbes {
    pub lead: f64,
    pub ext_oracle: f64,
}

pub fn extractive_probes<T, F>(
    pairs: &[SummPair],
    partner: F,
    tokenizer: &T,
    cfg: &RougeConfig,
) -> Option<ExtractiveProbes>
where
    T: Tokenizer,
    F: Fn(&SummPair) -> Option<Vec<String>>,
{
    let mut lead = Vec::new();
    let mut oracle = Vec::new();
    for pair in pairs {
        let Some(mono) = partner(pair) else {
            continue;
        };
        let doc = doc_text(tokenizer, pair, cfg.lowercase);
        let reference = tokenizer
            .tokenize_paragraphs(&mono, &pair.src_lang)
            .folded(cfg.lowercase);
        if reference.is_empty() {
            continue;
        }
        let lead_tokens = lead_baseline(&doc.tokens, reference.len());
        let lead_text = tokenizer.tokenize(&lead_tokens.join(" "), &pair.src_lang);
        lead.push(rouge::rouge_l(&lead_text, &reference, cfg.mode).f1);

        let sentences: Vec<Vec<String>> = doc.sentences().map(<[String]>::to_vec).collect();
        let picked = ext_oracle(&sentences, &reference.tokens, None);
        let mut chosen = picked.chosen.clone();
        chosen.sort_unstable();
        let oracle_text = with_sentence_bounds(
            TokenizedText::from_tokens(&picked.tokens(&sentences)),
            chosen.iter().map(|&i| sentences[i].len()),
        );
        oracle.push(rouge::rouge_l(&oracle_text, &reference, cfg.mode).f1);
    }
    Some(ExtractiveProbes {
        lead: 100.0 * mean(lead)?,
        ext_oracle: 100.0 * mean(oracle)?,
    })
}

fn with_sentence_bounds(mut text: TokenizedText, lengths: impl Iterator<Item = usize>) -> TokenizedText {
    let mut start = 0;
    text.sentence_bounds = lengths
        .filter(|&l| l > 0)
        .map(|l| {
            let b = (start, start + l);
            start += l;
            b
        })
        .collect();
    text
}

pub const STATS_COLUMNS: &[&str] = &[
    "set",
    "pairs",
    "words_per_doc",
    "sents_per_doc",
    "sections_per_doc",
    "words_per_sum",
    "sents_per_sum",
    "aspects",
    "coverage",
    "density",
    "compression",
    "novel_1gram_pct",
    "novel_2gram_pct",
    "novel_3gram_pct",
    "novel_4gram_pct",
];

fn fmt_opt(v: Option<&f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.4}"))
}

/// One CSV row per pair set, fixed four-decimal formatting.
pub fn stats_csv(rows: &[(String, TaskStats)]) -> String {
    let mut out = STATS_COLUMNS.join(",");
    out.push('\n');
    for (set, s) in rows {
        let _ = write!(
            out,
            "{set},{},{:.4},{:.4},{:.4},{:.4},{:.4},{},{:.4},{:.4},{:.4}",
            s.pairs,
            s.words_per_doc,
            s.sents_per_doc,
            s.sections_per_doc,
            s.words_per_sum,
            s.sents_per_sum,
            s.aspects,
            s.coverage,
            s.density,
            s.compression
        );
        for n in 1..=MAX_NGRAM {
            out.push(',');
            out.push_str(&fmt_opt(s.novel_ngram_pct.get(&n)));
        }
        out.push('\n');
    }
    out
}

/// Metrics as rows, pair sets as columns.
pub fn stats_markdown(rows: &[(String, TaskStats)], probes: &[Option<ExtractiveProbes>]) -> String {
    let mut out = String::from("| |");
    for (set, _) in rows {
        let _ = write!(out, " {set} |");
    }
    out.push_str("\n|---|");
    out.push_str(&"---:|".repeat(rows.len()));
    out.push('\n');

    let mut line = |label: &str, cell: &dyn Fn(usize) -> String| {
        let _ = write!(out, "| {label} |");
        for i in 0..rows.len() {
            let _ = write!(out, " {} |", cell(i));
        }
        out.push('\n');
    };
    line("Pairs", &|i| rows[i].1.pairs.to_string());
    line("Words/Doc", &|i| format!("{:.0}", rows[i].1.words_per_doc));
    line("Sents/Doc", &|i| format!("{:.0}", rows[i].1.sents_per_doc));
    line("Sections/Doc", &|i| format!("{:.0}", rows[i].1.sections_per_doc));
    line("Words/Sum", &|i| format!("{:.0}", rows[i].1.words_per_sum));
    line("Sents/Sum", &|i| format!("{:.0}", rows[i].1.sents_per_sum));
    line("Aspects", &|i| rows[i].1.aspects.to_string());
    line("Coverage", &|i| format!("{:.2}", rows[i].1.coverage));
    line("Density", &|i| format!("{:.2}", rows[i].1.density));
    line("Compression", &|i| format!("{:.2}", rows[i].1.compression));
    for (n, label) in [(1, "% new unigrams"), (2, "bigrams"), (3, "trigrams"), (4, "4-grams")] {
        line(label, &|i| {
            rows[i]
                .1
                .novel_ngram_pct
                .get(&n)
                .map_or_else(|| "-".to_string(), |v| format!("{v:.2}"))
        });
    }
    if probes.iter().any(Option::is_some) {
        line("Lead", &|i| {
            probes
                .get(i)
                .copied()
                .flatten()
                .map_or("-".into(), |p| format!("{:.2}", p.lead))
        });
        line("Ext-Oracle", &|i| {
            probes
                .get(i)
                .copied()
                .flatten()
                .map_or("-".into(), |p| format!("{:.2}", p.ext_oracle))
        });
    }
    out
}
