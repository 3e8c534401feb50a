//! Extractive baselines and the budgeted paragraph-extraction step.

mod extract;
mod lexrank;
mod oracle;

use thiserror::Error;

pub use extract::{apply_selection, paragraph_extract, reduce_document, select_within_budget, ParagraphSelection};
pub use lexrank::{lexrank_baseline, lexrank_scores, transition_matrix, LexRankConfig, RankedUnits};
pub use oracle::{ext_oracle, selection_rouge2, OracleSelection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("no text units to rank")]
    NoUnits,
    #[error("extraction budget must be positive")]
    ZeroBudget,
}

/// First `k` tokens of the document.
pub fn lead_baseline<S: AsRef<str>>(doc: &[S], k: usize) -> Vec<String> {
    doc.iter().take(k).map(|t| t.as_ref().to_string()).collect()
}
