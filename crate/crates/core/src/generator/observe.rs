//! Tag collection: the randomized (RCT) sample with forced-complete labels and
//! the observational sample with pair-level selection and tag-level
//! subsampling, plus the held-out user-movie pools behind test splits II/III.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;

use super::missing::{ObsMissingProbs, RatingRow};
use super::world::World;
use super::{GenConfig, Parallelism};
use crate::catalog::TagId;
use crate::rng::{keyed, Domain};

/// `tagID` written when the user likes none of the movie's tags.
pub const NO_TAG: i64 = -1;

/// One row of `obstag.csv` / `rcttag.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TagRow {
    pub user: u32,
    pub movie: u32,
    /// A tag id, or [`NO_TAG`].
    pub tag: i64,
}

/// Outcome of labelling one user-movie pair in the observational sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObsLabel {
    /// `T_L` was empty: the user likes none of the movie's tags.
    NoneLiked,
    /// The labelled subset of `T_L` and the liked tags left unlabelled.
    Tags { kept: Vec<TagId>, dropped: Vec<TagId> },
}

/// One uniformly chosen liked tag is always labelled; every other liked tag is
/// labelled independently with probability `keep_prob`.
pub fn obs_tag_subsample(liked: &[TagId], keep_prob: f64, rng: &mut impl Rng) -> ObsLabel {
    if liked.is_empty() {
        return ObsLabel::NoneLiked;
    }
    let first = rng.random_range(0..liked.len());
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, &t) in liked.iter().enumerate() {
        if i == first || rng.random_bool(keep_prob) {
            kept.push(t);
        } else {
            dropped.push(t);
        }
    }
    ObsLabel::Tags { kept, dropped }
}

fn label_rows(user: u32, movie: u32, tags: &[TagId]) -> Vec<TagRow> {
    if tags.is_empty() {
        vec![TagRow {
            user,
            movie,
            tag: NO_TAG,
        }]
    } else {
        tags.iter()
            .map(|&t| TagRow {
                user,
                movie,
                tag: t as i64,
            })
            .collect()
    }
}

/// Pairs drawn uniformly without replacement, sorted.
fn sample_pairs(world: &World, count: usize, rng: &mut impl Rng) -> Vec<(u32, u32)> {
    let nm = world.n_movies();
    let total = world.n_users * nm;
    let mut pairs: Vec<(u32, u32)> = rand::seq::index::sample(rng, total, count.min(total))
        .into_iter()
        .map(|i| ((i / nm) as u32, (i % nm) as u32))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// RCT pairs (sorted) and their rows: every liked tag, or a single `-1` row.
pub fn rct_sample(world: &World, cfg: &GenConfig) -> (Vec<(u32, u32)>, Vec<TagRow>) {
    let mut rng = keyed(cfg.seed, Domain::RctSelect, 0, 0);
    let pairs = sample_pairs(world, cfg.n_rct_pairs, &mut rng);
    let rows = pairs
        .iter()
        .flat_map(|&(u, m)| label_rows(u, m, &world.liked(u as usize, m as usize)))
        .collect();
    (pairs, rows)
}

/// A user-movie pair retained by the observational selection step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObsPair {
    pub user: u32,
    pub movie: u32,
    pub label: ObsLabel,
}

/// Pair-level Bernoulli selection followed by tag subsampling. Sorted by pair.
pub fn obs_sample(world: &World, probs: &ObsMissingProbs, cfg: &GenConfig, par: Parallelism) -> Vec<ObsPair> {
    let row = |u: usize| -> Vec<ObsPair> {
        (0..world.n_movies())
            .filter_map(|m| {
                let mut prng = keyed(cfg.seed, Domain::ObsPair, u as u64, m as u64);
                if prng.random::<f64>() >= 1.0 - probs.get(world, u, m) {
                    return None;
                }
                let mut trng = keyed(cfg.seed, Domain::ObsTags, u as u64, m as u64);
                Some(ObsPair {
                    user: u as u32,
                    movie: m as u32,
                    label: obs_tag_subsample(&world.liked(u, m), cfg.obs_keep_prob, &mut trng),
                })
            })
            .collect()
    };
    match par {
        Parallelism::Sequential => (0..world.n_users).flat_map(row).collect(),
        Parallelism::Parallel => (0..world.n_users).into_par_iter().map(row).collect::<Vec<_>>().concat(),
    }
}

pub fn obs_rows(pairs: &[ObsPair]) -> Vec<TagRow> {
    pairs
        .iter()
        .flat_map(|p| match &p.label {
            ObsLabel::NoneLiked => label_rows(p.user, p.movie, &[]),
            ObsLabel::Tags { kept, .. } => label_rows(p.user, p.movie, kept),
        })
        .collect()
}

/// Sorted `(user, movie)` pairs.
pub type PairList = Vec<(u32, u32)>;

/// Held-out user-movie pairs for splits II (rated) and III (unrated), each
/// drawn uniformly within its stratum and sorted.
pub fn test_pools(world: &World, ratings: &[RatingRow], cfg: &GenConfig) -> (PairList, PairList) {
    let mut rng = keyed(cfg.seed, Domain::TestPool, 0, 0);
    let rated_set: HashSet<(u32, u32)> = ratings.iter().map(|r| (r.user, r.movie)).collect();

    let take = cfg.n_test_pairs_rated.min(ratings.len());
    let mut rated: Vec<(u32, u32)> = rand::seq::index::sample(&mut rng, ratings.len(), take)
        .into_iter()
        .map(|i| (ratings[i].user, ratings[i].movie))
        .collect();
    rated.sort_unstable();

    let nm = world.n_movies();
    let total = world.n_users * nm;
    let n_unrated = total - rated_set.len();
    let want = cfg.n_test_pairs_unrated.min(n_unrated);
    let mut unrated: Vec<(u32, u32)> = if want * 2 >= n_unrated {
        let all: Vec<(u32, u32)> = (0..total)
            .map(|i| ((i / nm) as u32, (i % nm) as u32))
            .filter(|p| !rated_set.contains(p))
            .collect();
        rand::seq::index::sample(&mut rng, all.len(), want)
            .into_iter()
            .map(|i| all[i])
            .collect()
    } else {
        let mut chosen = HashSet::with_capacity(want);
        let mut out = Vec::with_capacity(want);
        while out.len() < want {
            let i = rng.random_range(0..total);
            let p = ((i / nm) as u32, (i % nm) as u32);
            if !rated_set.contains(&p) && chosen.insert(p) {
                out.push(p);
            }
        }
        out
    };
    unrated.sort_unstable();
    (rated, unrated)
}
