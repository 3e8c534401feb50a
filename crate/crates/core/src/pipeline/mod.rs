//! End-to-end stages over a corpus directory. Each stage reads its inputs
//! through [`crate::store`] and writes its outputs atomically.

mod analysis;

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use rayon::prelude::*;
use thiserror::Error;

use crate::align::{
    apply_splits, build_clusters, build_pairs, canonical_title, load_langlinks, select_parallel, split_train_valid,
    tag_subsets, AlignError, ArticleStore, LangLink, LinkFormat, PairSets, Split, SqlContext, Subset, TitleCluster,
};
use crate::baselines::BaselineError;
use crate::config::{ConfigError, RunConfig};
use crate::ingest::{extract_article, parse_dump, Article, DumpError, Extracted, SkipReason};
use crate::metrics::MetricError;
use crate::store::{
    self, open_corpus, read_articles, read_clusters, read_pairs, write_page_ids, write_split_manifest, CorpusLayout,
    JsonlWriter, Manifest, StoreError, Transaction,
};

pub use analysis::{
    baseline, extract_paragraphs, load_partners, rouge_files, stats, BaselineMethod, BaselineSummary, ExtractionRow,
    Partners, StatsOptions,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("{}: {source}", path.display())]
    Dump { path: PathBuf, source: DumpError },
    #[error("{0}")]
    Data(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|source| {
        PipelineError::Store(StoreError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|source| {
        PipelineError::Store(StoreError::Io {
            path: path.to_path_buf(),
            source,
        })
    })
}

/// One dump file and the language of its wiki.
#[derive(Debug, Clone)]
pub struct DumpInput {
    pub lang: String,
    pub path: PathBuf,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestReport {
    pub pages: usize,
    pub articles: usize,
    pub redirects: usize,
    pub other_namespace: usize,
    pub empty_lead: usize,
    pub markup_warnings: usize,
}

const INGEST_BATCH: usize = 256;

/// Parses every dump and writes `articles.jsonl` plus `pageids.tsv`.
pub fn ingest(dumps: &[DumpInput], layout: &CorpusLayout) -> Result<IngestReport> {
    create_dir(&layout.root)?;
    let mut tx = Transaction::new();
    let mut writer = JsonlWriter::<Article>::create(&tx.stage(&layout.articles()))?;
    let mut report = IngestReport::default();
    let mut ids = Vec::new();

    for dump in dumps {
        log::info!("ingesting {} ({})", dump.path.display(), dump.lang);
        let mut pages = parse_dump(open(&dump.path)?, &dump.lang);
        loop {
            let batch = pages
                .by_ref()
                .take(INGEST_BATCH)
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|source| PipelineError::Dump {
                    path: dump.path.clone(),
                    source,
                })?;
            if batch.is_empty() {
                break;
            }
            let extracted: Vec<_> = batch.par_iter().map(extract_article).collect();
            for (page, ex) in batch.iter().zip(extracted) {
                report.pages += 1;
                report.markup_warnings += ex.warnings;
                match ex.outcome {
                    Extracted::Article(article) => {
                        if let Some(id) = page.id {
                            ids.push((dump.lang.clone(), id, canonical_title(&article.title)));
                        }
                        writer.write(&article)?;
                        report.articles += 1;
                    }
                    Extracted::Skipped(SkipReason::Redirect) => report.redirects += 1,
                    Extracted::Skipped(SkipReason::NonMainNamespace) => report.other_namespace += 1,
                    Extracted::Skipped(SkipReason::EmptyLead) => report.empty_lead += 1,
                }
            }
        }
    }
    writer.finish()?;
    write_page_ids(&tx.stage(&layout.page_ids()), &ids)?;
    tx.commit()?;
    log::info!(
        "ingest: {} pages, {} articles, {} redirects, {} other namespace, {} empty lead",
        report.pages,
        report.articles,
        report.redirects,
        report.other_namespace,
        report.empty_lead
    );
    Ok(report)
}

/// One langlinks file. SQL dumps are per source wiki and need `lang`.
#[derive(Debug, Clone)]
pub struct LinkInput {
    pub path: PathBuf,
    pub format: LinkFormat,
    pub lang: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignReport {
    pub links: usize,
    pub malformed: usize,
    pub clusters: usize,
    pub conflicts: usize,
    pub ignored_links: usize,
}

fn page_titles(layout: &CorpusLayout, lang: &str) -> Result<HashMap<u64, String>> {
    Ok(store::read_page_ids(&layout.page_ids())?
        .into_iter()
        .filter(|(l, _, _)| l == lang)
        .map(|(_, id, title)| (id, title))
        .collect())
}

/// Loads links, forms title clusters and writes `clusters.jsonl`.
pub fn align(inputs: &[LinkInput], layout: &CorpusLayout, cfg: &RunConfig) -> Result<AlignReport> {
    create_dir(&layout.root)?;
    let mut links: Vec<LangLink> = Vec::new();
    let mut malformed = 0;
    for input in inputs {
        let sql = match input.format {
            LinkFormat::Tsv => None,
            LinkFormat::SqlInsert => {
                let lang = input.lang.clone().ok_or(AlignError::MissingSqlContext)?;
                Some(SqlContext {
                    page_titles: page_titles(layout, &lang)?,
                    src_lang: lang,
                })
            }
        };
        let mut reader = load_langlinks(open(&input.path)?, input.format, sql)?;
        for link in reader.by_ref() {
            links.push(link?);
        }
        malformed += reader.malformed();
    }
    let built = build_clusters(links.iter().cloned(), &cfg.languages);

    let mut tx = Transaction::new();
    store::write_jsonl(&tx.stage(&layout.clusters()), &built.clusters)?;
    tx.commit()?;
    let report = AlignReport {
        links: links.len(),
        malformed,
        clusters: built.clusters.len(),
        conflicts: built.conflicts,
        ignored_links: built.ignored_links,
    };
    log::info!(
        "align: {} links ({} malformed), {} clusters, {} conflicting components dropped",
        report.links,
        report.malformed,
        report.clusters,
        report.conflicts
    );
    Ok(report)
}

fn load_articles(layout: &CorpusLayout, cfg: &RunConfig) -> Result<ArticleStore> {
    let mut store = ArticleStore::new();
    for article in read_articles(&layout.articles())? {
        let article = article?;
        if cfg.languages.contains(&article.language) {
            store.insert(article);
        }
    }
    Ok(store)
}

fn load_clusters(layout: &CorpusLayout) -> Result<Vec<TitleCluster>> {
    Ok(read_clusters(&layout.clusters())?.collect::<std::result::Result<_, _>>()?)
}

fn counts(sets: &PairSets) -> BTreeMap<String, usize> {
    sets.iter().map(|(k, v)| (k.to_string(), v.len())).collect()
}

fn write_sets(tx: &mut Transaction, layout: &CorpusLayout, sets: &PairSets) -> Result<()> {
    for (key, pairs) in sets {
        store::write_pairs(&tx.stage(&layout.pairs(key)), pairs)?;
    }
    Ok(())
}

/// Builds every pair set from articles and clusters; writes pair files and
/// the manifest.
pub fn build(layout: &CorpusLayout, cfg: &RunConfig, created: DateTime<Utc>) -> Result<BTreeMap<String, usize>> {
    let articles = load_articles(layout, cfg)?;
    let clusters = load_clusters(layout)?;
    let tokenizer = cfg.tokenizer()?;
    let sets = build_pairs(
        &clusters,
        &articles,
        &cfg.languages,
        &cfg.filters,
        &tokenizer,
        cfg.monolingual,
    );
    let counts = counts(&sets);
    let mut tx = Transaction::new();
    write_sets(&mut tx, layout, &sets)?;
    Manifest::new(created, cfg.config_hash(), counts.clone()).write(&tx.stage(&layout.manifest()))?;
    tx.commit()?;
    for (set, n) in &counts {
        log::info!("build: {set} {n} pairs");
    }
    Ok(counts)
}

/// Reads every pair set the manifest lists.
pub fn load_sets(layout: &CorpusLayout, manifest: &Manifest) -> Result<PairSets> {
    let mut sets = PairSets::new();
    for set in manifest.counts.keys() {
        let key = set
            .parse()
            .map_err(|e: String| PipelineError::Data(format!("manifest: {e}")))?;
        let pairs = read_pairs(&layout.pairs(&key))?.collect::<std::result::Result<Vec<_>, _>>()?;
        sets.insert(key, pairs);
    }
    Ok(sets)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitReport {
    pub parallel: usize,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

/// Tags the parallel subset, assigns cluster-keyed splits and rewrites the
/// pair files, `splits.manifest` and the manifest.
pub fn split(layout: &CorpusLayout, cfg: &RunConfig, created: DateTime<Utc>) -> Result<SplitReport> {
    let seed = cfg.require_seed()?;
    let (_, manifest) = open_corpus(&layout.root)?;
    let mut sets = load_sets(layout, &manifest)?;
    let parallel = select_parallel(&sets, cfg.parallel_k, seed)?;
    tag_subsets(&mut sets, &parallel);
    let assignment = split_train_valid(&sets, cfg.valid_fraction, seed)?;
    apply_splits(&mut sets, &assignment);

    let mut tx = Transaction::new();
    write_sets(&mut tx, layout, &sets)?;
    write_split_manifest(&tx.stage(&layout.splits()), &assignment)?;
    Manifest::new(created, cfg.config_hash(), counts(&sets)).write(&tx.stage(&layout.manifest()))?;
    tx.commit()?;

    let count = |s: Split| assignment.values().filter(|&&v| v == s).count();
    let report = SplitReport {
        parallel: parallel.len(),
        train: count(Split::Train),
        valid: count(Split::Valid),
        test: count(Split::Test),
    };
    debug_assert!(sets
        .values()
        .flatten()
        .all(|p| (p.subset == Subset::Parallel) == (p.split == Split::Test)));
    log::info!(
        "split: {} parallel clusters, {} train / {} valid / {} test clusters",
        report.parallel,
        report.train,
        report.valid,
        report.test
    );
    Ok(report)
}
