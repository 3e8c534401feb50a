use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::BaselineError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LexRankConfig {
    pub damping: f64,
    /// L1 change below which power iteration stops.
    pub epsilon: f64,
    pub max_iter: usize,
}

impl Default for LexRankConfig {
    fn default() -> Self {
        LexRankConfig {
            damping: 0.85,
            epsilon: 1e-6,
            max_iter: 100,
        }
    }
}

/// Stationary scores of the text units, indexed by original position.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedUnits {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl RankedUnits {
    /// Positions by descending score; equal scores keep document order.
    pub fn ranking(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.scores.len()).collect();
        // quantized so that scores equal up to float noise tie exactly
        let key = |i: usize| (self.scores[i] * 1e12).round() as i64;
        order.sort_by(|&a, &b| key(b).cmp(&key(a)).then(a.cmp(&b)));
        order
    }
}

fn tfidf<S: AsRef<str>>(units: &[Vec<S>]) -> Vec<HashMap<&str, f64>> {
    let m = units.len() as f64;
    let mut df: HashMap<&str, usize> = HashMap::new();
    let tfs: Vec<HashMap<&str, f64>> = units
        .iter()
        .map(|u| {
            let mut tf: HashMap<&str, f64> = HashMap::new();
            for t in u {
                *tf.entry(t.as_ref()).or_insert(0.0) += 1.0;
            }
            for term in tf.keys() {
                *df.entry(term).or_insert(0) += 1;
            }
            tf
        })
        .collect();
    tfs.into_iter()
        .map(|tf| {
            tf.into_iter()
                .map(|(term, f)| (term, f * (m / df[term] as f64).ln()))
                .filter(|&(_, w)| w != 0.0)
                .collect()
        })
        .collect()
}

fn cosine(a: &HashMap<&str, f64>, b: &HashMap<&str, f64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let dot: f64 = small.iter().filter_map(|(t, w)| large.get(t).map(|v| w * v)).sum();
    if dot == 0.0 {
        return 0.0;
    }
    let na: f64 = a.values().map(|w| w * w).sum::<f64>().sqrt();
    let nb: f64 = b.values().map(|w| w * w).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Row-stochastic transition matrix of the cosine-similarity graph, without
/// self loops. A unit with no neighbours links to every unit uniformly.
pub fn transition_matrix<S: AsRef<str>>(units: &[Vec<S>]) -> Vec<Vec<f64>> {
    let n = units.len();
    let vectors = tfidf(units);
    let mut sim = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let s = cosine(&vectors[i], &vectors[j]);
            sim[i][j] = s;
            sim[j][i] = s;
        }
    }
    for row in &mut sim {
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|x| *x /= total);
        } else {
            row.iter_mut().for_each(|x| *x = 1.0 / n as f64);
        }
    }
    sim
}

/// Continuous LexRank over tf-idf vectors with idf taken within the unit
/// collection.
pub fn lexrank_scores<S: AsRef<str>>(units: &[Vec<S>], cfg: &LexRankConfig) -> Result<RankedUnits, BaselineError> {
    let n = units.len();
    if n == 0 {
        return Err(BaselineError::NoUnits);
    }
    let matrix = transition_matrix(units);
    let teleport = (1.0 - cfg.damping) / n as f64;
    let mut p = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        next.iter_mut().for_each(|x| *x = teleport);
        for (i, row) in matrix.iter().enumerate() {
            let mass = cfg.damping * p[i];
            for (j, w) in row.iter().enumerate() {
                next[j] += mass * w;
            }
        }
        iterations += 1;
        let delta: f64 = p.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut p, &mut next);
        if delta < cfg.epsilon {
            converged = true;
            break;
        }
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    Ok(RankedUnits {
        scores: p,
        iterations,
        converged,
    })
}

/// Sentences in LexRank order, concatenated and cut to `k` tokens.
pub fn lexrank_baseline<S: AsRef<str>>(sentences: &[Vec<S>], k: usize, cfg: &LexRankConfig) -> Vec<String> {
    let Ok(ranked) = lexrank_scores(sentences, cfg) else {
        return Vec::new();
    };
    ranked
        .ranking()
        .into_iter()
        .flat_map(|i| sentences[i].iter().map(|t| t.as_ref().to_string()))
        .take(k)
        .collect()
}
