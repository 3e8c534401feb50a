use crate::align::Document;
use crate::ingest::Section;
use crate::segment::{TokenizedText, Tokenizer};

use super::lexrank::{lexrank_scores, LexRankConfig};
use super::BaselineError;

/// Paragraphs kept by budgeted extraction, in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParagraphSelection {
    pub selected: Vec<usize>,
    /// Set when nothing fit: `(paragraph, tokens kept)` of the top-ranked
    /// paragraph cut to the budget.
    pub truncated: Option<(usize, usize)>,
}

impl ParagraphSelection {
    pub fn token_count(&self, lengths: &[usize]) -> usize {
        match self.truncated {
            Some((_, kept)) => kept,
            None => self.selected.iter().map(|&i| lengths[i]).sum(),
        }
    }
}

/// Walks `ranking` taking every paragraph that still fits the remaining
/// budget, skipping those that do not.
pub fn select_within_budget(
    lengths: &[usize],
    ranking: &[usize],
    budget: usize,
) -> Result<ParagraphSelection, BaselineError> {
    if budget == 0 {
        return Err(BaselineError::ZeroBudget);
    }
    let mut remaining = budget;
    let mut selected = Vec::new();
    for &i in ranking {
        if lengths[i] <= remaining {
            remaining -= lengths[i];
            selected.push(i);
        }
    }
    if selected.is_empty() {
        let Some(&top) = ranking.first() else {
            return Err(BaselineError::NoUnits);
        };
        log::warn!(
            "no paragraph fits a budget of {budget} tokens; truncating the top-ranked one ({} tokens)",
            lengths[top]
        );
        return Ok(ParagraphSelection {
            selected: vec![top],
            truncated: Some((top, budget)),
        });
    }
    selected.sort_unstable();
    Ok(ParagraphSelection {
        selected,
        truncated: None,
    })
}

/// LexRank-ranked budgeted selection over paragraph token lists.
pub fn paragraph_extract<S: AsRef<str>>(
    paragraphs: &[Vec<S>],
    budget: usize,
    cfg: &LexRankConfig,
) -> Result<ParagraphSelection, BaselineError> {
    let ranking = lexrank_scores(paragraphs, cfg)?.ranking();
    let lengths: Vec<usize> = paragraphs.iter().map(Vec::len).collect();
    select_within_budget(&lengths, &ranking, budget)
}

/// Rebuilds a document from a selection, dropping sections left empty.
pub fn apply_selection(doc: &Document, tokenized: &[TokenizedText], sel: &ParagraphSelection) -> Document {
    let mut flat = 0;
    let mut sections = Vec::new();
    for section in &doc.sections {
        let mut kept = Vec::new();
        for para in &section.paragraphs {
            if sel.selected.binary_search(&flat).is_ok() {
                match sel.truncated {
                    Some((i, n)) if i == flat => kept.push(tokenized[i].source_prefix(n).to_string()),
                    _ => kept.push(para.clone()),
                }
            }
            flat += 1;
        }
        if !kept.is_empty() {
            sections.push(Section {
                heading: section.heading.clone(),
                level: section.level,
                paragraphs: kept,
            });
        }
    }
    Document { sections }
}

/// Reduces a document to at most `budget` tokens of LexRank-selected
/// paragraphs, keeping their original order and section headings.
pub fn reduce_document<T: Tokenizer>(
    doc: &Document,
    tokenizer: &T,
    lang: &str,
    budget: usize,
    cfg: &LexRankConfig,
) -> Result<(Document, ParagraphSelection), BaselineError> {
    let tokenized: Vec<TokenizedText> = doc.paragraphs().map(|p| tokenizer.tokenize(p, lang)).collect();
    let tokens: Vec<Vec<String>> = tokenized.iter().map(|t| t.tokens.clone()).collect();
    let sel = paragraph_extract(&tokens, budget, cfg)?;
    Ok((apply_selection(doc, &tokenized, &sel), sel))
}
