//! ROUGE-1, ROUGE-2 and ROUGE-L without stemming or stopword removal.
//!
//! Zero denominators give zero scores rather than NaN so that empty
//! selections can be compared.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::segment::TokenizedText;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RougeVariant {
    R1,
    R2,
    RL,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub variant: RougeVariant,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl RougeScore {
    pub fn from_counts(matches: usize, candidate: usize, reference: usize, variant: RougeVariant) -> Self {
        let precision = ratio(matches, candidate);
        let recall = ratio(matches, reference);
        RougeScore {
            precision,
            recall,
            f1: f_measure(precision, recall),
            variant,
        }
    }

    pub fn zero(variant: RougeVariant) -> Self {
        Self::from_counts(0, 0, 0, variant)
    }
}

pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NgramOrder {
    Unigram,
    Bigram,
}

impl NgramOrder {
    pub fn n(self) -> usize {
        match self {
            NgramOrder::Unigram => 1,
            NgramOrder::Bigram => 2,
        }
    }

    fn variant(self) -> RougeVariant {
        match self {
            NgramOrder::Unigram => RougeVariant::R1,
            NgramOrder::Bigram => RougeVariant::R2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LcsMode {
    /// Per reference sentence, union of LCS hits over candidate sentences.
    #[default]
    SummaryUnion,
    /// Plain LCS of the two token sequences.
    Sequence,
}

impl std::str::FromStr for LcsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "summary-union" => Ok(LcsMode::SummaryUnion),
            "sequence" => Ok(LcsMode::Sequence),
            other => Err(format!(
                "unknown ROUGE-L mode {other:?} (expected summary-union or sequence)"
            )),
        }
    }
}

pub(crate) fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if n == 0 || tokens.len() < n {
        return counts;
    }
    for w in tokens.windows(n) {
        let key: Vec<&str> = w.iter().map(AsRef::as_ref).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    counts
}

/// Clipped n-gram overlap as `(matches, candidate n-grams, reference n-grams)`.
pub fn ngram_overlap<S: AsRef<str>, T: AsRef<str>>(
    candidate: &[S],
    reference: &[T],
    n: usize,
) -> (usize, usize, usize) {
    let cand = ngram_counts(candidate, n);
    let refc = ngram_counts(reference, n);
    let matches = cand
        .iter()
        .map(|(g, &c)| c.min(refc.get(g).copied().unwrap_or(0)))
        .sum();
    (
        matches,
        candidate.len().saturating_sub(n - 1).min(candidate.len()),
        reference.len().saturating_sub(n - 1).min(reference.len()),
    )
}

pub fn rouge_n_tokens<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], reference: &[T], order: NgramOrder) -> RougeScore {
    let (m, c, r) = ngram_overlap(candidate, reference, order.n());
    RougeScore::from_counts(m, c, r, order.variant())
}

pub fn rouge_n(candidate: &TokenizedText, reference: &TokenizedText, order: NgramOrder) -> RougeScore {
    rouge_n_tokens(&candidate.tokens, &reference.tokens, order)
}

/// Length of the longest common subsequence, O(|b|) memory.
pub fn lcs_len<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> usize {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x.as_ref() == y.as_ref() {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Indices into `a` taken by one LCS of `a` and `b`.
fn lcs_hits<S: AsRef<str>, T: AsRef<str>>(a: &[S], b: &[T]) -> Vec<usize> {
    let (m, n) = (a.len(), b.len());
    let mut dp = vec![0u32; (m + 1) * (n + 1)];
    let at = |i: usize, j: usize| i * (n + 1) + j;
    for i in 1..=m {
        for j in 1..=n {
            dp[at(i, j)] = if a[i - 1].as_ref() == b[j - 1].as_ref() {
                dp[at(i - 1, j - 1)] + 1
            } else {
                dp[at(i - 1, j)].max(dp[at(i, j - 1)])
            };
        }
    }
    let mut hits = Vec::with_capacity(dp[at(m, n)] as usize);
    let (mut i, mut j) = (m, n);
    while i > 0 && j > 0 {
        if a[i - 1].as_ref() == b[j - 1].as_ref() {
            hits.push(i - 1);
            i -= 1;
            j -= 1;
        } else if dp[at(i - 1, j)] >= dp[at(i, j - 1)] {
            i -= 1;
        } else {
            j -= 1;
        }
    }
    hits.reverse();
    hits
}

fn sentence_slices(text: &TokenizedText) -> Vec<&[String]> {
    if text.sentence_bounds.is_empty() && !text.tokens.is_empty() {
        vec![&text.tokens[..]]
    } else {
        text.sentences().collect()
    }
}

fn summary_union_hits(candidate: &TokenizedText, reference: &TokenizedText) -> usize {
    let mut cand_left: HashMap<&str, usize> = HashMap::new();
    for t in &candidate.tokens {
        *cand_left.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut ref_left: HashMap<&str, usize> = HashMap::new();
    for t in &reference.tokens {
        *ref_left.entry(t.as_str()).or_insert(0) += 1;
    }

    let cand_sents = sentence_slices(candidate);
    let mut hits = 0;
    for ref_sent in sentence_slices(reference) {
        let union: BTreeSet<usize> = cand_sents.iter().flat_map(|c| lcs_hits(ref_sent, c)).collect();
        for idx in union {
            let tok = ref_sent[idx].as_str();
            let (Some(c), Some(r)) = (cand_left.get_mut(tok), ref_left.get_mut(tok)) else {
                continue;
            };
            if *c > 0 && *r > 0 {
                *c -= 1;
                *r -= 1;
                hits += 1;
            }
        }
    }
    hits
}

pub fn rouge_l(candidate: &TokenizedText, reference: &TokenizedText, mode: LcsMode) -> RougeScore {
    let hits = match mode {
        LcsMode::Sequence => lcs_len(&candidate.tokens, &reference.tokens),
        LcsMode::SummaryUnion => summary_union_hits(candidate, reference),
    };
    RougeScore::from_counts(hits, candidate.len(), reference.len(), RougeVariant::RL)
}

/// ROUGE-L recall of a (possibly reduced) document against a summary.
pub fn rouge_l_recall_budget(extracted_doc: &TokenizedText, reference: &TokenizedText, mode: LcsMode) -> f64 {
    rouge_l(extracted_doc, reference, mode).recall
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RougeConfig {
    pub lowercase: bool,
    pub mode: LcsMode,
}

impl Default for RougeConfig {
    fn default() -> Self {
        RougeConfig {
            lowercase: true,
            mode: LcsMode::SummaryUnion,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RougeReport {
    pub r1: RougeScore,
    pub r2: RougeScore,
    pub rl: RougeScore,
}

impl RougeReport {
    pub fn scores(&self) -> [RougeScore; 3] {
        [self.r1, self.r2, self.rl]
    }
}

/// All three variants, applying the configured case folding first.
pub fn score(candidate: &TokenizedText, reference: &TokenizedText, cfg: &RougeConfig) -> RougeReport {
    let (c, r);
    let (candidate, reference) = if cfg.lowercase {
        c = candidate.lowercased();
        r = reference.lowercased();
        (&c, &r)
    } else {
        (candidate, reference)
    };
    RougeReport {
        r1: rouge_n(candidate, reference, NgramOrder::Unigram),
        r2: rouge_n(candidate, reference, NgramOrder::Bigram),
        rl: rouge_l(candidate, reference, cfg.mode),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::{RuleTokenizer, Tokenizer};
    use proptest::prelude::*;

    fn t(s: &str) -> TokenizedText {
        TokenizedText::from_tokens(&s.split_whitespace().collect::<Vec<_>>())
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn identity_is_one() {
        let x = t("the cat sat on the mat");
        for order in [NgramOrder::Unigram, NgramOrder::Bigram] {
            let s = rouge_n(&x, &x, order);
            assert!(close(s.precision, 1.0) && close(s.recall, 1.0) && close(s.f1, 1.0));
        }
        for mode in [LcsMode::Sequence, LcsMode::SummaryUnion] {
            let s = rouge_l(&x, &x, mode);
            assert!(close(s.f1, 1.0));
        }
    }

    #[test]
    fn unigram_partial() {
        let s = rouge_n(&t("the cat"), &t("the cat sat"), NgramOrder::Unigram);
        assert!(close(s.precision, 1.0));
        assert!(close(s.recall, 2.0 / 3.0));
        assert!(close(s.f1, 0.8));
    }

    #[test]
    fn bigram_half() {
        let s = rouge_n(&t("a b c"), &t("a b d"), NgramOrder::Bigram);
        assert!(close(s.precision, 0.5) && close(s.recall, 0.5) && close(s.f1, 0.5));
    }

    #[test]
    fn clipping() {
        let s = rouge_n(&t("a a a"), &t("a b"), NgramOrder::Unigram);
        assert!(close(s.precision, 1.0 / 3.0) && close(s.recall, 0.5));
    }

    #[test]
    fn lcs_sequence_example() {
        let s = rouge_l(&t("a b c d"), &t("a x b y c"), LcsMode::Sequence);
        assert!(close(s.precision, 0.75) && close(s.recall, 0.6));
    }

    #[test]
    fn empty_candidate_zero() {
        let empty = t("");
        for mode in [LcsMode::Sequence, LcsMode::SummaryUnion] {
            let s = rouge_l(&empty, &t("a b"), mode);
            assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
        }
        let s = rouge_n(&empty, &t("a b"), NgramOrder::Bigram);
        assert_eq!(s.f1, 0.0);
        let s = rouge_n(&t("a"), &t("a"), NgramOrder::Bigram);
        assert_eq!(s.f1, 0.0);
    }

    #[test]
    fn summary_union_credits_across_candidate_sentences() {
        let tok = RuleTokenizer::default();
        let cand = tok.tokenize("Cats sleep. Dogs bark loudly.", "en");
        let reference = tok.tokenize("Dogs bark and cats sleep.", "en");
        let seq = rouge_l(&cand, &reference, LcsMode::Sequence);
        let uni = rouge_l(&cand, &reference, LcsMode::SummaryUnion);
        assert!(uni.recall > seq.recall, "{uni:?} {seq:?}");
    }

    #[test]
    fn budget_recall_containment() {
        let tok = RuleTokenizer::default();
        let doc = tok.tokenize("Intro here. The summary sits inside. More text follows.", "en");
        let sum = tok.tokenize("The summary sits inside.", "en");
        assert!(close(rouge_l_recall_budget(&doc, &sum, LcsMode::SummaryUnion), 1.0));
        assert!(close(rouge_l_recall_budget(&doc, &sum, LcsMode::Sequence), 1.0));
        assert_eq!(rouge_l_recall_budget(&t(""), &sum, LcsMode::SummaryUnion), 0.0);
    }

    #[test]
    fn union_can_lose_to_sequence_with_repeated_tokens() {
        // reference "a b | a", candidate "b a": one LCS of (a b, b a) takes "a",
        // then clipping leaves nothing for the second sentence.
        let reference = TokenizedText {
            sentence_bounds: vec![(0, 2), (2, 3)],
            ..t("a b a")
        };
        let cand = t("b a");
        let seq = rouge_l(&cand, &reference, LcsMode::Sequence).recall;
        let uni = rouge_l(&cand, &reference, LcsMode::SummaryUnion).recall;
        assert!(uni < seq, "{uni} {seq}");
    }

    fn with_sentences(tokens: Vec<String>, cuts: Vec<usize>) -> TokenizedText {
        let mut text = TokenizedText::from_tokens(&tokens);
        if tokens.is_empty() {
            return text;
        }
        let mut cuts: Vec<usize> = cuts.into_iter().map(|c| 1 + c % tokens.len()).collect();
        cuts.push(tokens.len());
        cuts.sort_unstable();
        cuts.dedup();
        let mut start = 0;
        text.sentence_bounds = cuts
            .into_iter()
            .map(|e| {
                let b = (start, e);
                start = e;
                b
            })
            .collect();
        text
    }

    fn distinct_tokens(max: usize) -> impl Strategy<Value = Vec<String>> {
        prop::sample::subsequence((0..40).collect::<Vec<u32>>(), 0..max)
            .prop_shuffle()
            .prop_map(|v| v.into_iter().map(|x| format!("w{x}")).collect())
    }

    proptest! {
        #[test]
        fn appending_reference_never_lowers_recall(
            cand in prop::collection::vec("[a-d]", 0..12),
            reference in prop::collection::vec("[a-d]", 1..12),
            extra_start in 0usize..12,
            extra_len in 0usize..6,
        ) {
            let r = t(&reference.join(" "));
            let base = t(&cand.join(" "));
            let s = extra_start.min(reference.len());
            let e = (s + extra_len).min(reference.len());
            let mut longer = cand.clone();
            longer.extend_from_slice(&reference[s..e]);
            let longer = t(&longer.join(" "));
            for mode in [LcsMode::Sequence, LcsMode::SummaryUnion] {
                prop_assert!(rouge_l(&longer, &r, mode).recall >= rouge_l(&base, &r, mode).recall);
            }
            for order in [NgramOrder::Unigram, NgramOrder::Bigram] {
                prop_assert!(rouge_n(&longer, &r, order).recall >= rouge_n(&base, &r, order).recall);
            }
        }

        #[test]
        fn self_f1_is_one(x in prop::collection::vec("[a-e]", 2..20)) {
            let x = t(&x.join(" "));
            prop_assert!(close(rouge_n(&x, &x, NgramOrder::Unigram).f1, 1.0));
            prop_assert!(close(rouge_n(&x, &x, NgramOrder::Bigram).f1, 1.0));
        }

        // Holds when no token repeats; see the counterexample test above.
        #[test]
        fn union_recall_at_least_sequence_recall(
            cand in distinct_tokens(20),
            cand_cuts in prop::collection::vec(0usize..20, 0..4),
            reference in distinct_tokens(20),
            ref_cuts in prop::collection::vec(0usize..20, 1..4),
        ) {
            let c = with_sentences(cand, cand_cuts);
            let r = with_sentences(reference, ref_cuts);
            let seq = rouge_l(&c, &r, LcsMode::Sequence).recall;
            let uni = rouge_l(&c, &r, LcsMode::SummaryUnion).recall;
            prop_assert!(uni + 1e-12 >= seq, "union {} < sequence {}", uni, seq);
        }
    }
}
