#![allow(dead_code)]

use std::path::{Path, PathBuf};

use xwf_core::align::LinkFormat;
use xwf_core::config::RunConfig;
use xwf_core::pipeline::{self, AlignReport, DumpInput, IngestReport, LinkInput, SplitReport, StatsOptions};
use xwf_core::store::CorpusLayout;

pub const LANGS: [&str; 4] = ["en", "de", "fr", "cs"];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn mini_dump(name: &str) -> PathBuf {
    fixtures().join("mini-dump").join(name)
}

pub fn fixture_config() -> RunConfig {
    RunConfig::load(&mini_dump("config.toml")).expect("fixture config")
}

pub fn dumps() -> Vec<DumpInput> {
    LANGS
        .iter()
        .map(|l| DumpInput {
            lang: l.to_string(),
            path: mini_dump(&format!("{l}wiki.xml")),
        })
        .collect()
}

pub struct FixtureRun {
    pub layout: CorpusLayout,
    pub ingest: IngestReport,
    pub align: AlignReport,
    pub split: SplitReport,
}

/// ingest, align, build and split over the mini-dump.
pub fn build_fixture(root: &Path, cfg: &RunConfig) -> FixtureRun {
    let layout = CorpusLayout::new(root);
    let ingest = pipeline::ingest(&dumps(), &layout).expect("ingest");
    let links = [LinkInput {
        path: mini_dump("langlinks.tsv"),
        format: LinkFormat::Tsv,
        lang: None,
    }];
    let align = pipeline::align(&links, &layout, cfg).expect("align");
    pipeline::build(&layout, cfg, chrono::DateTime::UNIX_EPOCH).expect("build");
    let split = pipeline::split(&layout, cfg, chrono::DateTime::UNIX_EPOCH).expect("split");
    FixtureRun {
        layout,
        ingest,
        align,
        split,
    }
}

/// [`build_fixture`] followed by stats and paragraph extraction of every set.
pub fn full_run(root: &Path, cfg: &RunConfig) -> FixtureRun {
    let run = build_fixture(root, cfg);
    let layout = &run.layout;
    let files: Vec<PathBuf> = layout.pair_files().unwrap().into_iter().map(|(_, p)| p).collect();
    let partners = pipeline::load_partners(Some(&layout.articles())).unwrap();
    pipeline::stats(
        &files,
        &partners,
        cfg,
        StatsOptions::default(),
        &layout.stats_csv(),
        &layout.report(),
    )
    .expect("stats");
    let reduced = layout.root.join("reduced");
    std::fs::create_dir_all(&reduced).unwrap();
    let inputs: Vec<(PathBuf, PathBuf)> = files
        .iter()
        .map(|p| (p.clone(), reduced.join(p.file_name().unwrap())))
        .collect();
    pipeline::extract_paragraphs(&inputs, &partners, cfg, 800, &reduced.join("extraction.md")).expect("extract");
    run
}
