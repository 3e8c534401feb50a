use crate::rouge::{rouge_n_tokens, NgramOrder};

/// Greedy oracle result: picks in selection order and the ROUGE-2 F1 after
/// each pick.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OracleSelection {
    pub chosen: Vec<usize>,
    pub score_trace: Vec<f64>,
}

impl OracleSelection {
    /// Tokens of the chosen sentences, concatenated in document order.
    pub fn tokens<S: AsRef<str>>(&self, sentences: &[Vec<S>]) -> Vec<String> {
        concat_in_order(sentences, &self.chosen)
    }

    pub fn final_score(&self) -> f64 {
        self.score_trace.last().copied().unwrap_or(0.0)
    }
}

pub(crate) fn concat_in_order<S: AsRef<str>>(sentences: &[Vec<S>], picks: &[usize]) -> Vec<String> {
    let mut order = picks.to_vec();
    order.sort_unstable();
    order
        .into_iter()
        .flat_map(|i| sentences[i].iter().map(|t| t.as_ref().to_string()))
        .collect()
}

/// ROUGE-2 F1 of a sentence selection (document order) against a reference.
pub fn selection_rouge2<S: AsRef<str>, T: AsRef<str>>(sentences: &[Vec<S>], picks: &[usize], reference: &[T]) -> f64 {
    rouge_n_tokens(&concat_in_order(sentences, picks), reference, NgramOrder::Bigram).f1
}

/// Greedy sentence selection maximizing ROUGE-2 F1.
///
/// When `proxy_reference` is given it drives selection in place of
/// `reference`; this is how cross-lingual sets use the monolingual summary.
/// Stops as soon as no remaining sentence strictly improves F1; ties go to
/// the earliest sentence.
pub fn ext_oracle<S: AsRef<str>, T: AsRef<str>>(
    sentences: &[Vec<S>],
    reference: &[T],
    proxy_reference: Option<&[T]>,
) -> OracleSelection {
    let target = proxy_reference.unwrap_or(reference);
    let mut selection = OracleSelection::default();
    let mut best_so_far = 0.0;
    let mut used = vec![false; sentences.len()];
    loop {
        let mut best: Option<(usize, f64)> = None;
        let mut picks = selection.chosen.clone();
        picks.push(0);
        for i in (0..sentences.len()).filter(|&i| !used[i]) {
            *picks.last_mut().unwrap() = i;
            let f1 = selection_rouge2(sentences, &picks, target);
            if best.is_none_or(|(_, b)| f1 > b) {
                best = Some((i, f1));
            }
        }
        match best {
            Some((i, f1)) if f1 > best_so_far => {
                used[i] = true;
                selection.chosen.push(i);
                selection.score_trace.push(f1);
                best_so_far = f1;
            }
            _ => return selection,
        }
    }
}
