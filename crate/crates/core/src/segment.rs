//! Tokenization and sentence splitting shared by every metric and baseline.
//!
//! The built-in [`RuleTokenizer`] uses Unicode word boundaries for tokens and
//! a terminal-punctuation rule with per-language abbreviation lists for
//! sentences. Anything implementing [`Tokenizer`] can replace it.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Mutex;

use unicode_segmentation::UnicodeSegmentation;

const BUILTIN_ABBREVIATIONS: &[(&str, &str)] = &[
    ("en", include_str!("../data/abbrev/en.txt")),
    ("de", include_str!("../data/abbrev/de.txt")),
    ("fr", include_str!("../data/abbrev/fr.txt")),
    ("cs", include_str!("../data/abbrev/cs.txt")),
];

const TERMINALS: &[&str] = &[".", "!", "?", "…"];
const CLOSERS: &[&str] = &["\"", "'", ")", "]", "»", "”", "’", "›"];

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenizedText {
    pub tokens: Vec<String>,
    /// Byte range of each token in `source`.
    pub spans: Vec<(usize, usize)>,
    /// Half-open token index ranges, one per sentence.
    pub sentence_bounds: Vec<(usize, usize)>,
    pub source: String,
}

impl TokenizedText {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn sentence_count(&self) -> usize {
        self.sentence_bounds.len()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &[String]> + '_ {
        self.sentence_bounds.iter().map(|&(s, e)| &self.tokens[s..e])
    }

    pub fn lowercased(&self) -> TokenizedText {
        TokenizedText {
            tokens: self.tokens.iter().map(|t| t.to_lowercase()).collect(),
            ..self.clone()
        }
    }

    /// Lowercases only when asked to; metric configs decide.
    pub fn folded(self, lowercase: bool) -> TokenizedText {
        if lowercase {
            self.lowercased()
        } else {
            self
        }
    }

    /// Tokens joined by single spaces.
    pub fn detokenize(&self) -> String {
        self.tokens.join(" ")
    }

    /// The source text up to the end of the first `n` tokens.
    pub fn source_prefix(&self, n: usize) -> &str {
        match n.min(self.spans.len()) {
            0 => "",
            k => &self.source[..self.spans[k - 1].1],
        }
    }

    /// The first `n` tokens, sentence bounds clipped.
    pub fn truncated(&self, n: usize) -> TokenizedText {
        let n = n.min(self.len());
        TokenizedText {
            tokens: self.tokens[..n].to_vec(),
            spans: self.spans[..n].to_vec(),
            sentence_bounds: self
                .sentence_bounds
                .iter()
                .filter(|&&(s, _)| s < n)
                .map(|&(s, e)| (s, e.min(n)))
                .collect(),
            source: self.source_prefix(n).to_string(),
        }
    }

    /// Builds a single-sentence text directly from tokens.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> TokenizedText {
        let tokens: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        let mut spans = Vec::with_capacity(tokens.len());
        let mut pos = 0;
        for t in &tokens {
            spans.push((pos, pos + t.len()));
            pos += t.len() + 1;
        }
        let sentence_bounds = if tokens.is_empty() {
            Vec::new()
        } else {
            vec![(0, tokens.len())]
        };
        TokenizedText {
            source: tokens.join(" "),
            tokens,
            spans,
            sentence_bounds,
        }
    }
}

pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str, lang: &str) -> TokenizedText;

    /// Paragraphs are joined with newlines, which always end a sentence.
    fn tokenize_paragraphs<S: AsRef<str>>(&self, paragraphs: &[S], lang: &str) -> TokenizedText
    where
        Self: Sized,
    {
        let joined: Vec<&str> = paragraphs.iter().map(AsRef::as_ref).collect();
        self.tokenize(&joined.join("\n"), lang)
    }

    fn count_tokens(&self, text: &str, lang: &str) -> usize {
        self.tokenize(text, lang).len()
    }
}

/// Parses an abbreviation list: one token per line, `#` starts a comment.
pub fn parse_abbreviations(text: &str) -> HashSet<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| l.strip_suffix('.').unwrap_or(l).to_string())
        .collect()
}

#[derive(Debug)]
pub struct RuleTokenizer {
    abbreviations: HashMap<String, HashSet<String>>,
    warned: Mutex<HashSet<String>>,
}

impl Default for RuleTokenizer {
    fn default() -> Self {
        let abbreviations = BUILTIN_ABBREVIATIONS
            .iter()
            .map(|(lang, text)| (lang.to_string(), parse_abbreviations(text)))
            .collect();
        RuleTokenizer {
            abbreviations,
            warned: Mutex::new(HashSet::new()),
        }
    }
}

impl RuleTokenizer {
    /// Tokenizer with no abbreviation lists at all.
    pub fn empty() -> Self {
        RuleTokenizer {
            abbreviations: HashMap::new(),
            warned: Mutex::new(HashSet::new()),
        }
    }

    pub fn add_abbreviations<I, S>(&mut self, lang: &str, items: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set = self.abbreviations.entry(lang.to_string()).or_default();
        for item in items {
            let item = item.as_ref().trim();
            set.insert(item.strip_suffix('.').unwrap_or(item).to_string());
        }
    }

    pub fn load_abbreviation_file(&mut self, lang: &str, path: &Path) -> std::io::Result<()> {
        let text = std::fs::read_to_string(path)?;
        let parsed = parse_abbreviations(&text);
        self.abbreviations.entry(lang.to_string()).or_default().extend(parsed);
        Ok(())
    }

    pub fn knows(&self, lang: &str) -> bool {
        self.abbreviations.contains_key(lang)
    }

    fn abbreviations_for(&self, lang: &str) -> Option<&HashSet<String>> {
        let found = self.abbreviations.get(lang);
        if found.is_none() {
            let mut warned = self.warned.lock().unwrap_or_else(|e| e.into_inner());
            if warned.insert(lang.to_string()) {
                log::warn!("no sentence rules for language {lang:?}; using defaults");
            }
        }
        found
    }
}

const OPENERS: &[&str] = &["\"", "'", "(", "[", "«", "„", "“", "‘", "‹"];

fn capitalised(token: &str) -> bool {
    token.chars().next().is_some_and(|c| c.is_uppercase() || c.is_numeric())
}

/// Whether the token at `i`, possibly behind one opening quote or bracket,
/// looks like the start of a sentence.
fn starts_sentence(tokens: &[String], i: usize) -> bool {
    capitalised(&tokens[i])
        || (OPENERS.contains(&tokens[i].as_str()) && tokens.get(i + 1).is_some_and(|t| capitalised(t)))
}

impl Tokenizer for RuleTokenizer {
    fn tokenize(&self, text: &str, lang: &str) -> TokenizedText {
        let abbreviations = self.abbreviations_for(lang);

        let (spans, tokens): (Vec<(usize, usize)>, Vec<String>) = text
            .split_word_bound_indices()
            .filter(|(_, seg)| !seg.chars().all(char::is_whitespace))
            .map(|(start, seg)| ((start, start + seg.len()), seg.to_string()))
            .unzip();

        let n = tokens.len();
        let adjacent = |a: usize, b: usize| spans[a].1 == spans[b].0;
        let gap = |a: usize| &text[spans[a].1..spans[a + 1].0];
        let is_terminal = |i: usize| TERMINALS.contains(&tokens[i].as_str());

        let mut bounds = Vec::new();
        let mut start = 0;
        let mut i = 0;
        while i < n {
            let mut end = i;
            let mut cut = false;
            if is_terminal(i) {
                while end + 1 < n && is_terminal(end + 1) && adjacent(end, end + 1) {
                    end += 1;
                }
                while end + 1 < n && CLOSERS.contains(&tokens[end + 1].as_str()) && adjacent(end, end + 1) {
                    end += 1;
                }
                let abbreviated = tokens[i] == "."
                    && i > 0
                    && adjacent(i - 1, i)
                    && abbreviations.is_some_and(|a| a.contains(&tokens[i - 1]));
                cut = end + 1 < n && !abbreviated && !adjacent(end, end + 1) && starts_sentence(&tokens, end + 1);
            }
            if end + 1 < n && gap(end).contains('\n') {
                cut = true;
            }
            if cut {
                bounds.push((start, end + 1));
                start = end + 1;
            }
            i = end + 1;
        }
        if start < n {
            bounds.push((start, n));
        }

        TokenizedText {
            tokens,
            spans,
            sentence_bounds: bounds,
            source: text.to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tok(text: &str) -> TokenizedText {
        RuleTokenizer::default().tokenize(text, "en")
    }

    #[test]
    fn hello_world() {
        let t = tok("Hello world.");
        assert_eq!(t.tokens, ["Hello", "world", "."]);
        assert_eq!(t.sentence_bounds, vec![(0, 3)]);
    }

    #[test]
    fn truncation_clips_sentences() {
        let t = tok("One two. Three four five.");
        let cut = t.truncated(4);
        assert_eq!(cut.tokens, ["One", "two", ".", "Three"]);
        assert_eq!(cut.sentence_bounds, vec![(0, 3), (3, 4)]);
        assert_eq!(cut.source, "One two. Three");
        assert_eq!(t.truncated(100), t);
        assert!(t.truncated(0).sentence_bounds.is_empty());
    }

    #[test]
    fn empty_input() {
        let t = tok("");
        assert!(t.tokens.is_empty());
        assert!(t.sentence_bounds.is_empty());
    }

    #[test]
    fn abbreviation_does_not_split() {
        let t = tok("Dr. Smith left. He ran.");
        assert_eq!(t.sentence_count(), 2);
        let first: Vec<&str> = t.sentences().next().unwrap().iter().map(String::as_str).collect();
        assert_eq!(first, ["Dr", ".", "Smith", "left", "."]);

        let bare = RuleTokenizer::empty().tokenize("Dr. Smith left. He ran.", "en");
        assert_eq!(bare.sentence_count(), 3);
    }

    #[test]
    fn lowercase_and_closers() {
        let t = tok("It ended. then more. \"Quoted!\" Next 3 items? 4 left… Done");
        let sents: Vec<String> = t.sentences().map(|s| s.join(" ")).collect();
        assert_eq!(
            sents,
            [
                "It ended . then more .",
                "\" Quoted ! \"",
                "Next 3 items ?",
                "4 left …",
                "Done"
            ]
        );
    }

    #[test]
    fn newline_is_hard_break() {
        let t = RuleTokenizer::default().tokenize_paragraphs(&["first para", "second para"], "en");
        assert_eq!(t.sentence_bounds, vec![(0, 2), (2, 4)]);
    }

    #[test]
    fn unknown_language_falls_back() {
        let t = RuleTokenizer::default().tokenize("One. Two.", "xx");
        assert_eq!(t.sentence_count(), 2);
    }

    #[test]
    fn abbreviation_file_format() {
        let set = parse_abbreviations("# comment\nDr.\n\n  etc  # trailing\nz.B.\n");
        assert_eq!(set.len(), 3);
        assert!(set.contains("Dr") && set.contains("etc") && set.contains("z.B"));
    }

    #[test]
    fn source_prefix_cuts_at_token_end() {
        let t = tok("Alpha beta,  gamma.");
        assert_eq!(t.source_prefix(2), "Alpha beta");
        assert_eq!(t.source_prefix(3), "Alpha beta,");
        assert_eq!(t.source_prefix(0), "");
        assert_eq!(t.source_prefix(99), "Alpha beta,  gamma.");
    }

    proptest! {
        #[test]
        fn bounds_partition_tokens(text in "[A-Za-z0-9 .!?,\"\n…]{0,80}") {
            let t = tok(&text);
            let mut next = 0;
            for &(s, e) in &t.sentence_bounds {
                prop_assert_eq!(s, next);
                prop_assert!(e > s);
                next = e;
            }
            prop_assert_eq!(next, t.len());
            let rejoined: Vec<String> = t.sentences().flat_map(|s| s.iter().cloned()).collect();
            prop_assert_eq!(rejoined, t.tokens.clone());
        }
    }
}
