use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::rouge::ngram_counts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("summary is empty")]
    EmptySummary,
    #[error("summary has {len} tokens, fewer than n = {n}")]
    SummaryTooShort { len: usize, n: usize },
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("no pairs to describe")]
    EmptyCorpus,
    #[error("no pair has a monolingual summary to compare against")]
    NoMonolingualPartner,
}

/// One shared span: `summary[summary_start..+len] == article[article_start..+len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fragment {
    pub summary_start: usize,
    pub article_start: usize,
    pub len: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FragmentSet {
    pub fragments: Vec<Fragment>,
    pub summary_len: usize,
    pub article_len: usize,
}

/// Greedy left-to-right fragment extraction.
///
/// At each summary position the longest matching article span is taken
/// (earliest article start on ties) and the cursor jumps past it; unmatched
/// tokens advance the cursor by one.
pub fn extractive_fragments<S: AsRef<str>, T: AsRef<str>>(article: &[S], summary: &[T]) -> FragmentSet {
    let mut positions: HashMap<&str, Vec<usize>> = HashMap::new();
    for (j, tok) in article.iter().enumerate() {
        positions.entry(tok.as_ref()).or_default().push(j);
    }

    let mut fragments = Vec::new();
    let mut i = 0;
    while i < summary.len() {
        let mut best: Option<(usize, usize)> = None;
        if let Some(starts) = positions.get(summary[i].as_ref()) {
            for &j in starts {
                let len = summary[i..]
                    .iter()
                    .zip(&article[j..])
                    .take_while(|(s, a)| s.as_ref() == a.as_ref())
                    .count();
                if best.is_none_or(|(_, l)| len > l) {
                    best = Some((j, len));
                }
            }
        }
        match best {
            Some((j, len)) => {
                fragments.push(Fragment {
                    summary_start: i,
                    article_start: j,
                    len,
                });
                i += len;
            }
            None => i += 1,
        }
    }

    FragmentSet {
        fragments,
        summary_len: summary.len(),
        article_len: article.len(),
    }
}

impl FragmentSet {
    fn covered(&self) -> usize {
        self.fragments.iter().map(|f| f.len).sum()
    }
}

/// Percentage of summary tokens inside a fragment.
pub fn coverage(f: &FragmentSet) -> Result<f64, MetricError> {
    if f.summary_len == 0 {
        return Err(MetricError::EmptySummary);
    }
    Ok(100.0 * f.covered() as f64 / f.summary_len as f64)
}

/// Sum of squared fragment lengths per summary token.
pub fn density(f: &FragmentSet) -> Result<f64, MetricError> {
    if f.summary_len == 0 {
        return Err(MetricError::EmptySummary);
    }
    let sq: usize = f.fragments.iter().map(|fr| fr.len * fr.len).sum();
    Ok(sq as f64 / f.summary_len as f64)
}

pub fn compression(article_len: usize, summary_len: usize) -> Result<f64, MetricError> {
    if summary_len == 0 {
        return Err(MetricError::EmptySummary);
    }
    Ok(article_len as f64 / summary_len as f64)
}

/// Percentage of summary n-gram occurrences that never occur in the article.
pub fn novel_ngrams<S: AsRef<str>, T: AsRef<str>>(article: &[S], summary: &[T], n: usize) -> Result<f64, MetricError> {
    if n == 0 {
        return Err(MetricError::ZeroOrder);
    }
    if summary.len() < n {
        return Err(MetricError::SummaryTooShort { len: summary.len(), n });
    }
    let seen: HashSet<Vec<&str>> = ngram_counts(article, n).into_keys().collect();
    let total = summary.len() - n + 1;
    let novel = summary
        .windows(n)
        .filter(|w| {
            let key: Vec<&str> = w.iter().map(AsRef::as_ref).collect();
            !seen.contains(&key)
        })
        .count();
    Ok(100.0 * novel as f64 / total as f64)
}
