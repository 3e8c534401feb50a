use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::align::{Document, Split, Subset, SummPair};
use crate::ingest::{normalize_text, Section};

use super::StoreError;

/// Field names of an external JSONL corpus.
///
/// `doc` and `summary` may hold a string (paragraphs separated by blank
/// lines) or an array of paragraph strings. Without `id` the line number is
/// used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalMapping {
    #[serde(default)]
    pub id: Option<String>,
    pub doc: String,
    pub summary: String,
    pub src_lang: String,
    pub tgt_lang: String,
}

impl ExternalMapping {
    pub fn load(path: &Path) -> Result<Self, StoreError> {
        let text = std::fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
        toml::from_str(&text).map_err(|e| StoreError::BadRecord {
            path: path.to_path_buf(),
            line: e.span().map_or(1, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })
    }
}

pub struct ExternalReader<R> {
    path: PathBuf,
    input: R,
    mapping: ExternalMapping,
    line: usize,
    done: bool,
}

/// Streams an external corpus as pairs tagged `external`. No length
/// filters are applied.
pub fn load_external_corpus(
    path: &Path,
    mapping: ExternalMapping,
) -> Result<ExternalReader<BufReader<File>>, StoreError> {
    let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
    Ok(ExternalReader {
        path: path.to_path_buf(),
        input: BufReader::new(file),
        mapping,
        line: 0,
        done: false,
    })
}

fn paragraphs(value: &Value) -> Option<Vec<String>> {
    let raw: Vec<String> = match value {
        Value::String(s) => s.split("\n\n").map(str::to_string).collect(),
        Value::Array(items) => items
            .iter()
            .map(|v| v.as_str().map(str::to_string))
            .collect::<Option<_>>()?,
        _ => return None,
    };
    Some(
        raw.iter()
            .map(|p| normalize_text(p))
            .filter(|p| !p.is_empty())
            .collect(),
    )
}

fn scalar(value: &Value) -> Option<String> {
    match value {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

impl<R: BufRead> ExternalReader<R> {
    fn convert(&self, text: &str) -> Result<SummPair, StoreError> {
        let bad = |message: String| StoreError::BadRecord {
            path: self.path.clone(),
            line: self.line,
            message,
        };
        let record: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let field = |name: &str| {
            record.get(name).ok_or_else(|| StoreError::MissingField {
                path: self.path.clone(),
                line: self.line,
                field: name.to_string(),
            })
        };
        let m = &self.mapping;
        let raw_id = match &m.id {
            Some(name) => {
                scalar(field(name)?).ok_or_else(|| bad(format!("field {name:?} is not a string or number")))?
            }
            None => format!("x{}", self.line),
        };
        let src = scalar(field(&m.src_lang)?).ok_or_else(|| bad("source language is not a string".into()))?;
        let tgt = scalar(field(&m.tgt_lang)?).ok_or_else(|| bad("target language is not a string".into()))?;
        let doc = paragraphs(field(&m.doc)?).ok_or_else(|| bad(format!("field {:?} is not text", m.doc)))?;
        let summary =
            paragraphs(field(&m.summary)?).ok_or_else(|| bad(format!("field {:?} is not text", m.summary)))?;
        Ok(SummPair {
            id: SummPair::pair_id(&raw_id, &src, &tgt),
            src_title: raw_id.clone(),
            tgt_title: raw_id,
            src_lang: src,
            tgt_lang: tgt,
            doc: Document {
                sections: vec![Section {
                    heading: "body".into(),
                    level: 2,
                    paragraphs: doc,
                }],
            },
            summary,
            subset: Subset::External,
            split: Split::Unassigned,
        })
    }
}

impl<R: BufRead> Iterator for ExternalReader<R> {
    type Item = Result<SummPair, StoreError>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut buf = String::new();
        while !self.done {
            buf.clear();
            self.line += 1;
            match self.input.read_line(&mut buf) {
                Ok(0) => self.done = true,
                Ok(_) if buf.trim().is_empty() => {}
                Ok(_) => return Some(self.convert(buf.trim_end())),
                Err(e) => {
                    self.done = true;
                    return Some(Err(StoreError::io(&self.path, e)));
                }
            }
        }
        None
    }
}
