//! On-disk corpus layout: JSONL records, split manifest, reports and the
//! versioned `manifest.json` at the corpus root.

mod external;
mod jsonl;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{LangPair, Split, SplitAssignment, SummPair, TitleCluster};
use crate::ingest::Article;

pub use external::{load_external_corpus, ExternalMapping, ExternalReader};
pub use jsonl::{write_jsonl, JsonlReader, JsonlWriter};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}:{line}: {message}", path.display())]
    BadRecord {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{}: cannot encode record: {message}", path.display())]
    Encode { path: PathBuf, message: String },
    #[error("schema version mismatch: corpus has {found}, this build reads {expected}")]
    SchemaMismatch { found: u32, expected: u32 },
    #[error("{}:{line}: mapping names field {field:?} which the record lacks", path.display())]
    MissingField { path: PathBuf, line: usize, field: String },
    #[error("manifest counts {expected} pairs for {set} but the file holds {found}")]
    CountMismatch { set: String, expected: usize, found: usize },
}

impl StoreError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        StoreError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// File names inside a corpus directory.
#[derive(Debug, Clone)]
pub struct CorpusLayout {
    pub root: PathBuf,
}

impl CorpusLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        CorpusLayout { root: root.into() }
    }

    pub fn articles(&self) -> PathBuf {
        self.root.join("articles.jsonl")
    }

    pub fn page_ids(&self) -> PathBuf {
        self.root.join("pageids.tsv")
    }

    pub fn clusters(&self) -> PathBuf {
        self.root.join("clusters.jsonl")
    }

    pub fn pairs(&self, pair: &LangPair) -> PathBuf {
        self.root.join(format!("pairs.{pair}.jsonl"))
    }

    pub fn splits(&self) -> PathBuf {
        self.root.join("splits.manifest")
    }

    pub fn stats_csv(&self) -> PathBuf {
        self.root.join("stats.csv")
    }

    pub fn report(&self) -> PathBuf {
        self.root.join("report.md")
    }

    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }

    /// Pair files present in the directory, sorted by direction.
    pub fn pair_files(&self) -> Result<Vec<(LangPair, PathBuf)>, StoreError> {
        let mut found = Vec::new();
        let entries = std::fs::read_dir(&self.root).map_err(|e| StoreError::io(&self.root, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| StoreError::io(&self.root, e))?;
            let name = entry.file_name();
            let Some(name) = name.to_str() else { continue };
            let Some(key) = name.strip_prefix("pairs.").and_then(|n| n.strip_suffix(".jsonl")) else {
                continue;
            };
            if let Ok(pair) = key.parse::<LangPair>() {
                found.push((pair, entry.path()));
            }
        }
        found.sort();
        Ok(found)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    /// RFC 3339, UTC.
    pub created: String,
    pub config_hash: String,
    /// Pair count per `src-tgt` set.
    pub counts: BTreeMap<String, usize>,
}

impl Manifest {
    pub fn new(created: DateTime<Utc>, config_hash: String, counts: BTreeMap<String, usize>) -> Self {
        Manifest {
            schema_version: SCHEMA_VERSION,
            created: created.to_rfc3339_opts(SecondsFormat::Secs, true),
            config_hash,
            counts,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), StoreError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|e| StoreError::Encode {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        text.push('\n');
        write_text(path, &text)
    }

    /// Reads a manifest and rejects any other schema version.
    pub fn read(path: &Path) -> Result<Self, StoreError> {
        let text = std::fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| StoreError::BadRecord {
            path: path.to_path_buf(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if let Some(found) = value.get("schema_version").and_then(|v| v.as_u64()) {
            if found != u64::from(SCHEMA_VERSION) {
                return Err(StoreError::SchemaMismatch {
                    found: found as u32,
                    expected: SCHEMA_VERSION,
                });
            }
        }
        serde_json::from_value(value).map_err(|e| StoreError::BadRecord {
            path: path.to_path_buf(),
            line: 1,
            message: e.to_string(),
        })
    }

    /// Checks that every counted pair file exists with exactly that many
    /// records.
    pub fn verify(&self, layout: &CorpusLayout) -> Result<(), StoreError> {
        for (set, &expected) in &self.counts {
            let pair: LangPair = set.parse().map_err(|message| StoreError::BadRecord {
                path: layout.manifest(),
                line: 1,
                message,
            })?;
            let mut found = 0;
            for record in read_pairs(&layout.pairs(&pair))? {
                record?;
                found += 1;
            }
            if found != expected {
                return Err(StoreError::CountMismatch {
                    set: set.clone(),
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }
}

/// Opens a corpus directory, checking its manifest schema version.
pub fn open_corpus(root: &Path) -> Result<(CorpusLayout, Manifest), StoreError> {
    let layout = CorpusLayout::new(root);
    let manifest = Manifest::read(&layout.manifest())?;
    Ok((layout, manifest))
}

/// Writes `text` via a partial file renamed into place.
pub fn write_text(path: &Path, text: &str) -> Result<(), StoreError> {
    let partial = jsonl::partial_path(path);
    jsonl::create_parent(&partial)?;
    let result = (|| {
        let mut f = File::create(&partial)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        std::fs::rename(&partial, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&partial);
        return Err(StoreError::io(path, e));
    }
    Ok(())
}

pub fn validate_pair(p: &SummPair) -> Result<(), String> {
    if p.id.is_empty() {
        return Err("empty id".into());
    }
    if p.src_lang.is_empty() || p.tgt_lang.is_empty() {
        return Err("empty language code".into());
    }
    if p.summary.iter().all(|s| s.trim().is_empty()) {
        return Err(format!("pair {} has an empty summary", p.id));
    }
    if p.doc.paragraphs().next().is_none() {
        return Err(format!("pair {} has an empty document", p.id));
    }
    Ok(())
}

fn validate_article(a: &Article) -> Result<(), String> {
    if a.title.is_empty() || a.language.is_empty() {
        return Err("article without title or language".into());
    }
    if a.lead
        .iter()
        .map(String::as_str)
        .chain(a.body_paragraphs())
        .any(str::is_empty)
    {
        return Err(format!("article {} has an empty paragraph", a.title));
    }
    Ok(())
}

fn validate_cluster(c: &TitleCluster) -> Result<(), String> {
    if c.members.len() < 2 {
        return Err(format!("cluster {} has fewer than 2 members", c.id));
    }
    Ok(())
}

pub fn write_pairs<'a, I: IntoIterator<Item = &'a SummPair>>(path: &Path, pairs: I) -> Result<usize, StoreError> {
    write_jsonl(path, pairs)
}

pub fn read_pairs(path: &Path) -> Result<JsonlReader<SummPair>, StoreError> {
    Ok(JsonlReader::open(path)?.with_validation(validate_pair))
}

pub fn read_articles(path: &Path) -> Result<JsonlReader<Article>, StoreError> {
    Ok(JsonlReader::open(path)?.with_validation(validate_article))
}

pub fn read_clusters(path: &Path) -> Result<JsonlReader<TitleCluster>, StoreError> {
    Ok(JsonlReader::open(path)?.with_validation(validate_cluster))
}

/// `cluster id \t split`, one per line, sorted by id.
pub fn write_split_manifest(path: &Path, assignment: &SplitAssignment) -> Result<(), StoreError> {
    let mut text = String::new();
    for (id, split) in assignment {
        text.push_str(&format!("{id}\t{split}\n"));
    }
    write_text(path, &text)
}

pub fn read_split_manifest(path: &Path) -> Result<SplitAssignment, StoreError> {
    let file = File::open(path).map_err(|e| StoreError::io(path, e))?;
    let mut out = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| StoreError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| StoreError::BadRecord {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let (id, split) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected id<TAB>split".into()))?;
        let split: Split = split.parse().map_err(bad)?;
        out.insert(id.to_string(), split);
    }
    Ok(out)
}

/// `lang \t page id \t title`, the lookup SQL langlinks rows need.
pub fn write_page_ids(path: &Path, rows: &[(String, u64, String)]) -> Result<(), StoreError> {
    let mut text = String::new();
    for (lang, id, title) in rows {
        text.push_str(&format!("{lang}\t{id}\t{title}\n"));
    }
    write_text(path, &text)
}

pub fn read_page_ids(path: &Path) -> Result<Vec<(String, u64, String)>, StoreError> {
    let text = std::fs::read_to_string(path).map_err(|e| StoreError::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut cols = line.splitn(3, '\t');
        let parsed = match (cols.next(), cols.next().map(str::parse::<u64>), cols.next()) {
            (Some(lang), Some(Ok(id)), Some(title)) => (lang.to_string(), id, title.to_string()),
            _ => {
                return Err(StoreError::BadRecord {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: "expected lang<TAB>id<TAB>title".into(),
                })
            }
        };
        rows.push(parsed);
    }
    Ok(rows)
}

/// Group of output files that appear together or not at all.
///
/// Writers target [`Transaction::stage`] paths; [`Transaction::commit`]
/// renames them into place. Dropping an uncommitted transaction deletes
/// whatever was staged.
#[derive(Debug, Default)]
pub struct Transaction {
    staged: Vec<(PathBuf, PathBuf)>,
}

impl Transaction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&mut self, path: &Path) -> PathBuf {
        let mut name = path.file_name().unwrap_or_default().to_os_string();
        name.push(".staged");
        let staged = path.with_file_name(name);
        self.staged.push((staged.clone(), path.to_path_buf()));
        staged
    }

    pub fn commit(mut self) -> Result<(), StoreError> {
        for (staged, path) in std::mem::take(&mut self.staged) {
            std::fs::rename(&staged, &path).map_err(|e| StoreError::io(&path, e))?;
        }
        Ok(())
    }
}

impl Drop for Transaction {
    fn drop(&mut self) {
        for (staged, _) in &self.staged {
            let _ = std::fs::remove_file(staged);
        }
    }
}

/// `SOURCE_DATE_EPOCH` if set, else the Unix epoch, so repeated runs write
/// identical manifests.
pub fn build_timestamp() -> DateTime<Utc> {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::from_timestamp(secs, 0))
        .unwrap_or(DateTime::UNIX_EPOCH)
}
