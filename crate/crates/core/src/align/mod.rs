//! Title alignment over interlanguage links and construction of the
//! per-direction document/summary pair sets.

mod clusters;
mod langlinks;
mod pairs;
mod split;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::{normalize_text, Section};

pub use clusters::{build_clusters, ClusterBuild};
pub use langlinks::{load_langlinks, LangLinkReader, LinkFormat, SqlContext};
pub use pairs::{build_pairs, cross_lingual_key_count, ArticleStore, PairSets};
pub use split::{
    apply_splits, intersection, select_parallel, split_train_valid, tag_subsets, valid_count, SplitAssignment,
};

#[derive(Debug, Error)]
pub enum AlignError {
    #[error("unknown langlinks format {0:?} (expected tsv or sql-insert)")]
    UnknownFormat(String),
    #[error("sql-insert langlinks need a source language and page-id table")]
    MissingSqlContext,
    #[error("reading langlinks: {0}")]
    Io(#[from] std::io::Error),
    #[error("requested {requested} parallel titles but only {available} clusters are in every language set")]
    ParallelTooLarge { requested: usize, available: usize },
    #[error("need at least 2 comparable clusters to split, found {0}")]
    TooFewClusters(usize),
    #[error("valid fraction must be in (0, 1), got {0}")]
    BadFraction(f64),
    #[error("invalid filter configuration: {0}")]
    BadFilter(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LangLink {
    pub src_title: String,
    pub src_lang: String,
    pub tgt_title: String,
    pub tgt_lang: String,
}

/// MediaWiki-style canonical title: underscores as spaces, normalized,
/// first letter upper-cased.
pub fn canonical_title(raw: &str) -> String {
    let spaced = normalize_text(&raw.replace('_', " "));
    let mut chars = spaced.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => spaced,
    }
}

/// Language-aligned titles, at most one per language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleCluster {
    pub id: String,
    pub members: BTreeMap<String, String>,
}

impl TitleCluster {
    pub fn new(members: BTreeMap<String, String>) -> Self {
        let id = cluster_id(&members);
        TitleCluster { id, members }
    }

    pub fn title(&self, lang: &str) -> Option<&str> {
        self.members.get(lang).map(String::as_str)
    }
}

fn cluster_id(members: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (lang, title) in members {
        h.update(lang.as_bytes());
        h.update([0x1f]);
        h.update(title.as_bytes());
        h.update([0x1e]);
    }
    let digest = h.finalize();
    format!("c{}", hex::encode(&digest[..8]))
}

/// Token-length filters on the source body and the target lead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    pub min_body_tokens: usize,
    pub max_body_tokens: usize,
    pub min_lead_tokens: usize,
    pub max_lead_tokens: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_body_tokens: 250,
            max_body_tokens: 5000,
            min_lead_tokens: 20,
            max_lead_tokens: 400,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), AlignError> {
        if self.min_body_tokens == 0 || self.min_body_tokens >= self.max_body_tokens {
            return Err(AlignError::BadFilter(format!(
                "body range {}..{}",
                self.min_body_tokens, self.max_body_tokens
            )));
        }
        if self.min_lead_tokens == 0 || self.min_lead_tokens >= self.max_lead_tokens {
            return Err(AlignError::BadFilter(format!(
                "lead range {}..{}",
                self.min_lead_tokens, self.max_lead_tokens
            )));
        }
        Ok(())
    }

    pub fn body_ok(&self, tokens: usize) -> bool {
        (self.min_body_tokens..=self.max_body_tokens).contains(&tokens)
    }

    pub fn lead_ok(&self, tokens: usize) -> bool {
        (self.min_lead_tokens..=self.max_lead_tokens).contains(&tokens)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subset {
    Comparable,
    Parallel,
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
    Unassigned,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        })
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "valid" => Ok(Split::Valid),
            "test" => Ok(Split::Test),
            "unassigned" => Ok(Split::Unassigned),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn paragraphs(&self) -> impl Iterator<Item = &str> {
        self.sections
            .iter()
            .flat_map(|s| s.paragraphs.iter().map(String::as_str))
    }
}

/// One (source-language body, target-language lead) instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummPair {
    pub id: String,
    pub src_lang: String,
    pub tgt_lang: String,
    pub src_title: String,
    pub tgt_title: String,
    pub doc: Document,
    pub summary: Vec<String>,
    pub subset: Subset,
    pub split: Split,
}

impl SummPair {
    pub fn pair_id(cluster: &str, src: &str, tgt: &str) -> String {
        format!("{cluster}:{src}-{tgt}")
    }

    /// Cluster part of the id; the whole id for records without one.
    pub fn cluster_id(&self) -> &str {
        self.id.rsplit_once(':').map_or(self.id.as_str(), |(c, _)| c)
    }

    pub fn lang_pair(&self) -> LangPair {
        LangPair::new(&self.src_lang, &self.tgt_lang)
    }

    pub fn is_monolingual(&self) -> bool {
        self.src_lang == self.tgt_lang
    }
}

/// Ordered direction `src -> tgt`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LangPair {
    pub src: String,
    pub tgt: String,
}

impl LangPair {
    pub fn new(src: &str, tgt: &str) -> Self {
        LangPair {
            src: src.to_string(),
            tgt: tgt.to_string(),
        }
    }

    pub fn is_cross_lingual(&self) -> bool {
        self.src != self.tgt
    }
}

impl fmt::Display for LangPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

impl std::str::FromStr for LangPair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('-') {
            Some((a, b)) if !a.is_empty() && !b.is_empty() => Ok(LangPair::new(a, b)),
            _ => Err(format!("expected <src>-<tgt>, got {s:?}")),
        }
    }
}
