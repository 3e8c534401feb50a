use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{LangLink, TitleCluster};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ClusterBuild {
    /// Sorted by cluster id.
    pub clusters: Vec<TitleCluster>,
    /// Components holding two titles for one language.
    pub conflicts: usize,
    /// Links touching a language outside the configured set.
    pub ignored_links: usize,
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind {
            parent: Vec::new(),
            rank: Vec::new(),
        }
    }

    fn push(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.rank.push(0);
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Connected components of the undirected link graph restricted to `langs`.
///
/// A component with two distinct titles in one language is dropped whole.
pub fn build_clusters<I>(links: I, langs: &[String]) -> ClusterBuild
where
    I: IntoIterator<Item = LangLink>,
{
    let allowed: BTreeSet<&str> = langs.iter().map(String::as_str).collect();
    let mut nodes: HashMap<(String, String), usize> = HashMap::new();
    let mut keys: Vec<(String, String)> = Vec::new();
    let mut uf = UnionFind::new();
    let mut ignored = 0;

    let mut node = |lang: String, title: String, uf: &mut UnionFind| -> usize {
        *nodes.entry((lang.clone(), title.clone())).or_insert_with(|| {
            keys.push((lang, title));
            uf.push()
        })
    };

    for link in links {
        if !allowed.contains(link.src_lang.as_str())
            || !allowed.contains(link.tgt_lang.as_str())
            || link.src_lang == link.tgt_lang
        {
            ignored += 1;
            continue;
        }
        let a = node(link.src_lang, link.src_title, &mut uf);
        let b = node(link.tgt_lang, link.tgt_title, &mut uf);
        uf.union(a, b);
    }

    let mut components: HashMap<usize, Vec<usize>> = HashMap::new();
    for idx in 0..keys.len() {
        let root = uf.find(idx);
        components.entry(root).or_default().push(idx);
    }

    let mut clusters = Vec::new();
    let mut conflicts = 0;
    for members in components.into_values() {
        let mut map = BTreeMap::new();
        let mut conflict = false;
        for idx in members {
            let (lang, title) = &keys[idx];
            if map.insert(lang.clone(), title.clone()).is_some() {
                conflict = true;
            }
        }
        if conflict {
            conflicts += 1;
        } else {
            clusters.push(TitleCluster::new(map));
        }
    }
    clusters.sort_by(|a, b| a.id.cmp(&b.id));

    ClusterBuild {
        clusters,
        conflicts,
        ignored_links: ignored,
    }
}
