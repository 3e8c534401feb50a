use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AlignError, PairSets, Split, Subset};

/// Cluster id to split; every pair of a cluster shares it.
pub type SplitAssignment = BTreeMap<String, Split>;

/// Clusters that have a pair in every cross-lingual set.
pub fn intersection(sets: &PairSets) -> BTreeSet<String> {
    let mut cross = sets.iter().filter(|(k, _)| k.is_cross_lingual()).map(|(_, v)| v);
    let Some(first) = cross.next() else {
        return BTreeSet::new();
    };
    let mut common: BTreeSet<String> = first.iter().map(|p| p.cluster_id().to_string()).collect();
    for pairs in cross {
        let here: BTreeSet<&str> = pairs.iter().map(|p| p.cluster_id()).collect();
        common.retain(|c| here.contains(c.as_str()));
    }
    common
}

fn seeded_shuffle(mut ids: Vec<String>, seed: u64) -> Vec<String> {
    ids.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ids.shuffle(&mut rng);
    ids
}

/// Seeded sample of `k` clusters from the all-languages intersection.
pub fn select_parallel(sets: &PairSets, k: usize, seed: u64) -> Result<BTreeSet<String>, AlignError> {
    let pool = intersection(sets);
    if k > pool.len() {
        return Err(AlignError::ParallelTooLarge {
            requested: k,
            available: pool.len(),
        });
    }
    Ok(seeded_shuffle(pool.into_iter().collect(), seed)
        .into_iter()
        .take(k)
        .collect())
}

/// Marks pairs of the chosen clusters parallel and every other pair comparable.
pub fn tag_subsets(sets: &mut PairSets, parallel: &BTreeSet<String>) {
    for pair in sets.values_mut().flatten() {
        pair.subset = if parallel.contains(pair.cluster_id()) {
            Subset::Parallel
        } else {
            Subset::Comparable
        };
    }
}

/// `round(fraction · n)` with halves rounded up.
pub fn valid_count(clusters: usize, fraction: f64) -> usize {
    (fraction * clusters as f64 + 0.5).floor() as usize
}

/// Cluster-keyed train/valid split of the comparable pairs; parallel
/// clusters go to test.
pub fn split_train_valid(sets: &PairSets, valid_fraction: f64, seed: u64) -> Result<SplitAssignment, AlignError> {
    if !(valid_fraction > 0.0 && valid_fraction < 1.0) {
        return Err(AlignError::BadFraction(valid_fraction));
    }
    let mut comparable = BTreeSet::new();
    let mut assignment = SplitAssignment::new();
    for pair in sets.values().flatten() {
        match pair.subset {
            Subset::Parallel => {
                assignment.insert(pair.cluster_id().to_string(), Split::Test);
            }
            Subset::Comparable => {
                comparable.insert(pair.cluster_id().to_string());
            }
            Subset::External => {}
        }
    }
    if comparable.len() < 2 {
        return Err(AlignError::TooFewClusters(comparable.len()));
    }
    let n_valid = valid_count(comparable.len(), valid_fraction);
    for (i, id) in seeded_shuffle(comparable.into_iter().collect(), seed)
        .into_iter()
        .enumerate()
    {
        assignment.insert(id, if i < n_valid { Split::Valid } else { Split::Train });
    }
    Ok(assignment)
}

pub fn apply_splits(sets: &mut PairSets, assignment: &SplitAssignment) {
    for pair in sets.values_mut().flatten() {
        pair.split = assignment.get(pair.cluster_id()).copied().unwrap_or(Split::Unassigned);
    }
}
