use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use super::{canonical_title, Document, FilterConfig, LangPair, Split, Subset, SummPair, TitleCluster};
use crate::ingest::Article;
use crate::segment::Tokenizer;

/// Every ordered language pair mapped to its pairs, in cluster-id order.
pub type PairSets = BTreeMap<LangPair, Vec<SummPair>>;

/// Articles keyed by `(language, canonical title)`.
#[derive(Debug, Default, Clone)]
pub struct ArticleStore {
    map: HashMap<(String, String), Article>,
}

impl ArticleStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, article: Article) {
        let key = (article.language.clone(), canonical_title(&article.title));
        self.map.insert(key, article);
    }

    pub fn get(&self, lang: &str, title: &str) -> Option<&Article> {
        self.map.get(&(lang.to_string(), canonical_title(title)))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl FromIterator<Article> for ArticleStore {
    fn from_iter<I: IntoIterator<Item = Article>>(iter: I) -> Self {
        let mut store = ArticleStore::new();
        for a in iter {
            store.insert(a);
        }
        store
    }
}

/// N·(N−1) ordered cross-lingual directions for N languages.
pub fn cross_lingual_key_count(n: usize) -> usize {
    n * n.saturating_sub(1)
}

struct Member<'a> {
    lang: &'a str,
    article: &'a Article,
    body_ok: bool,
    lead_ok: bool,
}

fn count_tokens<'a, T: Tokenizer>(tok: &T, paragraphs: impl Iterator<Item = &'a str>, lang: &str) -> usize {
    paragraphs.map(|p| tok.count_tokens(p, lang)).sum()
}

/// Materializes every ordered pair set.
///
/// All N² keys are present in the result (cross-lingual ones always; the N
/// monolingual ones only when `monolingual` is set), even when empty.
pub fn build_pairs<T: Tokenizer>(
    clusters: &[TitleCluster],
    articles: &ArticleStore,
    langs: &[String],
    cfg: &FilterConfig,
    tokenizer: &T,
    monolingual: bool,
) -> PairSets {
    let per_cluster: Vec<Vec<(LangPair, SummPair)>> = clusters
        .par_iter()
        .map(|cluster| {
            let members: Vec<Member> = langs
                .iter()
                .filter_map(|lang| {
                    let title = cluster.title(lang)?;
                    let article = articles.get(lang, title)?;
                    Some(Member {
                        lang,
                        article,
                        body_ok: cfg.body_ok(count_tokens(tokenizer, article.body_paragraphs(), lang)),
                        lead_ok: cfg.lead_ok(count_tokens(tokenizer, article.lead.iter().map(String::as_str), lang)),
                    })
                })
                .collect();

            let mut out = Vec::new();
            for src in members.iter().filter(|m| m.body_ok) {
                for tgt in members.iter().filter(|m| m.lead_ok) {
                    if src.lang == tgt.lang && !monolingual {
                        continue;
                    }
                    let key = LangPair::new(src.lang, tgt.lang);
                    out.push((
                        key,
                        SummPair {
                            id: SummPair::pair_id(&cluster.id, src.lang, tgt.lang),
                            src_lang: src.lang.to_string(),
                            tgt_lang: tgt.lang.to_string(),
                            src_title: src.article.title.clone(),
                            tgt_title: tgt.article.title.clone(),
                            doc: Document {
                                sections: src.article.sections.clone(),
                            },
                            summary: tgt.article.lead.clone(),
                            subset: Subset::Comparable,
                            split: Split::Unassigned,
                        },
                    ));
                }
            }
            out
        })
        .collect();

    let mut sets = PairSets::new();
    for src in langs {
        for tgt in langs {
            if src != tgt || monolingual {
                sets.insert(LangPair::new(src, tgt), Vec::new());
            }
        }
    }
    for (key, pair) in per_cluster.into_iter().flatten() {
        sets.entry(key).or_default().push(pair);
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Section;
    use crate::segment::RuleTokenizer;

    fn words(n: usize, tag: &str) -> String {
        (0..n).map(|i| format!("{tag}{i}")).collect::<Vec<_>>().join(" ")
    }

    fn article(lang: &str, title: &str, body: usize, lead: usize) -> Article {
        Article {
            language: lang.into(),
            title: title.into(),
            lead: vec![words(lead, "l")],
            sections: vec![Section {
                heading: "H".into(),
                level: 2,
                paragraphs: vec![words(body, "b")],
            }],
        }
    }

    fn langs() -> Vec<String> {
        ["en", "de", "fr", "cs"].map(String::from).to_vec()
    }

    fn cluster(titles: &[(&str, &str)]) -> TitleCluster {
        TitleCluster::new(titles.iter().map(|(l, t)| (l.to_string(), t.to_string())).collect())
    }

    #[test]
    fn twelve_keys_for_four_languages() {
        let sets = build_pairs(
            &[],
            &ArticleStore::new(),
            &langs(),
            &FilterConfig::default(),
            &RuleTokenizer::default(),
            false,
        );
        assert_eq!(sets.len(), 12);
        assert_eq!(cross_lingual_key_count(4), 12);
        assert!(sets.keys().all(LangPair::is_cross_lingual));
        let with_mono = build_pairs(
            &[],
            &ArticleStore::new(),
            &langs(),
            &FilterConfig::default(),
            &RuleTokenizer::default(),
            true,
        );
        assert_eq!(with_mono.len(), 16);
    }

    #[test]
    fn six_full_clusters_fill_every_set() {
        let mut store = ArticleStore::new();
        let mut clusters = Vec::new();
        for i in 0..6 {
            let names: Vec<(String, String)> = langs().iter().map(|l| (l.clone(), format!("T{i} {l}"))).collect();
            for (l, t) in &names {
                store.insert(article(l, t, 300, 30));
            }
            clusters.push(cluster(
                &names.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect::<Vec<_>>(),
            ));
        }
        let sets = build_pairs(
            &clusters,
            &store,
            &langs(),
            &FilterConfig::default(),
            &RuleTokenizer::default(),
            false,
        );
        assert!(sets.values().all(|v| v.len() == 6));
    }

    #[test]
    fn short_body_excluded_as_source_only() {
        let mut store = ArticleStore::new();
        store.insert(article("en", "A", 100, 30));
        store.insert(article("fr", "B", 300, 30));
        let c = cluster(&[("en", "A"), ("fr", "B")]);
        let sets = build_pairs(
            &[c],
            &store,
            &langs(),
            &FilterConfig::default(),
            &RuleTokenizer::default(),
            true,
        );
        assert!(sets[&LangPair::new("en", "fr")].is_empty());
        assert!(sets[&LangPair::new("en", "en")].is_empty());
        assert_eq!(sets[&LangPair::new("fr", "en")].len(), 1);
        assert_eq!(sets[&LangPair::new("fr", "fr")].len(), 1);
        let p = &sets[&LangPair::new("fr", "en")][0];
        assert_eq!(p.src_title, "B");
        assert_eq!(p.tgt_title, "A");
        assert_eq!(p.summary, vec![words(30, "l")]);
    }

    #[test]
    fn missing_article_member_ignored() {
        let mut store = ArticleStore::new();
        store.insert(article("en", "A", 300, 30));
        store.insert(article("de", "C", 300, 30));
        let c = cluster(&[("en", "A"), ("fr", "B"), ("de", "C")]);
        let sets = build_pairs(
            &[c],
            &store,
            &langs(),
            &FilterConfig::default(),
            &RuleTokenizer::default(),
            false,
        );
        let total: usize = sets.values().map(Vec::len).sum();
        assert_eq!(total, 2);
    }
}
