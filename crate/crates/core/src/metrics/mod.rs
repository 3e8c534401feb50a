//! Task characterisation: extractive fragments, overlap ratios, novel
//! n-grams and corpus-level statistics.

mod fragments;
mod stats;

pub use fragments::{
    compression, coverage, density, extractive_fragments, novel_ngrams, Fragment, FragmentSet, MetricError,
};
pub use stats::{
    corpus_stats, extractive_probes, pair_overlap, stats_csv, stats_markdown, ExtractiveProbes, PairOverlap, TaskStats,
    MAX_NGRAM, STATS_COLUMNS,
};
