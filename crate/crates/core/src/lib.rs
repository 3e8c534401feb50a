//! Construction and analysis of cross-lingual Wikipedia summarisation
//! corpora: dump ingestion, title alignment, pair building, task metrics,
//! ROUGE and extractive baselines.

pub mod align;
pub mod baselines;
pub mod config;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod rouge;
pub mod segment;
pub mod store;
