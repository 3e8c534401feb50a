//! Dump ingestion: XML page stream, wikitext stripping, text normalization.

mod dump;
mod normalize;
mod wikitext;

use serde::{Deserialize, Serialize};

pub use dump::{parse_dump, DumpError, DumpReader};
pub use normalize::normalize_text;
pub use wikitext::{extract_article, strip_markup, Extracted, Extraction, SkipReason};

/// One `<page>` of a dump before any markup processing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPage {
    pub title: String,
    pub language: String,
    pub markup: String,
    pub namespace: i32,
    /// MediaWiki page id, needed to resolve SQL langlinks rows.
    pub id: Option<u64>,
    pub redirect: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    /// 2 is a top-level `== h ==` heading.
    pub level: u8,
    pub paragraphs: Vec<String>,
}

/// Normalized lead and sectioned body of one page in one language.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    #[serde(rename = "lang")]
    pub language: String,
    pub title: String,
    pub lead: Vec<String>,
    pub sections: Vec<Section>,
}

impl Article {
    pub fn body_paragraphs(&self) -> impl Iterator<Item = &str> {
        self.sections
            .iter()
            .flat_map(|s| s.paragraphs.iter().map(String::as_str))
    }
}
