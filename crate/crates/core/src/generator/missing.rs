//! Missing-rate tables for ratings (popularity exposure) and observational
//! tag pairs (popularity plus a rating-dependent selection term).
//!
//! Both have the form `p = c · P_M · sigmoid(arg / T + b)` with `c` chosen so
//! the mean of `p` over all user-movie pairs equals `P_M`. Values are clamped
//! to 1 and `c` is re-solved over the unclamped pairs until the mean is exact.

use rand::Rng;
use rayon::prelude::*;

use super::world::{PopularityModel, World};
use super::{GenConfig, GenError, Parallelism};
use crate::rng::{keyed, Domain};

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Finds `k = c·P_M` with `mean(min(1, k·s)) = target` over the values
/// produced by `visit`. `visit` must yield the same `n` values each call.
fn solve_scale(n: usize, target: f64, visit: impl Fn(&mut dyn FnMut(f64))) -> Result<f64, GenError> {
    if n == 0 || target == 0.0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    visit(&mut |s| total += s);
    if total <= 0.0 {
        return Err(GenError::Unnormalizable { target, reachable: 0.0 });
    }
    let goal = target * n as f64;
    let mut k = goal / total;
    for _ in 0..(n + 2).min(10_000) {
        let (mut saturated, mut zeros, mut rest) = (0usize, 0usize, 0.0f64);
        visit(&mut |s| {
            if s == 0.0 {
                zeros += 1;
            } else if k * s >= 1.0 {
                saturated += 1;
            } else {
                rest += s;
            }
        });
        let mean = (saturated as f64 + k * rest) / n as f64;
        if (mean - target).abs() <= 1e-12 {
            return Ok(k);
        }
        if rest == 0.0 {
            // Nothing left to scale: every reachable pair is already at 1.
            return Err(GenError::Unnormalizable {
                target,
                reachable: (n - zeros) as f64 / n as f64,
            });
        }
        k = (goal - saturated as f64) / rest;
    }
    Ok(k)
}

/// Per-movie rating missing probabilities. All users share a movie's value.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingMissingProbs {
    pub n_users: usize,
    per_movie: Vec<f64>,
    /// The normalization constant `c`.
    pub c: f64,
}

impl RatingMissingProbs {
    pub fn get(&self, _user: usize, movie: usize) -> f64 {
        self.per_movie[movie]
    }

    pub fn per_movie(&self) -> &[f64] {
        &self.per_movie
    }

    /// Mean over all user-movie pairs.
    pub fn mean(&self) -> f64 {
        if self.per_movie.is_empty() {
            return 0.0;
        }
        self.per_movie.iter().sum::<f64>() / self.per_movie.len() as f64
    }
}

fn rating_arg(n_movies: usize, rank: u32, temp: f64, b: f64) -> f64 {
    (n_movies as f64 - rank as f64) / temp + b
}

pub fn rating_missing_probs(
    pop: &PopularityModel,
    n_users: usize,
    cfg: &GenConfig,
) -> Result<RatingMissingProbs, GenError> {
    let n = pop.n_movies();
    let s: Vec<f64> = (0..n)
        .map(|m| sigmoid(rating_arg(n, pop.rank(m), cfg.rating_temp, cfg.rating_b)))
        .collect();
    // Every movie carries n_users identical pairs, so the movie mean is the pair mean.
    let k = solve_scale(n, cfg.rating_pm, |f| s.iter().for_each(|&v| f(v)))?;
    Ok(RatingMissingProbs {
        n_users,
        per_movie: s.iter().map(|&v| (k * v).min(1.0)).collect(),
        c: if cfg.rating_pm > 0.0 { k / cfg.rating_pm } else { 0.0 },
    })
}

/// Per-pair missing probabilities of the observational tag collection.
/// Values are recomputed from the world's ratings on demand.
#[derive(Debug, Clone, PartialEq)]
pub struct ObsMissingProbs {
    scale: f64,
    temp: f64,
    b: f64,
    alpha: f64,
    /// The normalization constant `c`.
    pub c: f64,
}

impl ObsMissingProbs {
    fn raw(&self, world: &World, user: usize, movie: usize) -> f64 {
        let n = world.n_movies() as f64;
        let rank = world.popularity.rank(movie) as f64;
        let arg = (n - rank + self.alpha * world.rating(user, movie)) / self.temp + self.b;
        sigmoid(arg)
    }

    pub fn get(&self, world: &World, user: usize, movie: usize) -> f64 {
        (self.scale * self.raw(world, user, movie)).min(1.0)
    }

    pub fn mean(&self, world: &World) -> f64 {
        let n = world.n_users * world.n_movies();
        if n == 0 {
            return 0.0;
        }
        let sum: f64 = (0..world.n_users)
            .map(|u| (0..world.n_movies()).map(|m| self.get(world, u, m)).sum::<f64>())
            .sum();
        sum / n as f64
    }
}

pub fn obs_pair_missing_probs(world: &World, cfg: &GenConfig) -> Result<ObsMissingProbs, GenError> {
    let mut probs = ObsMissingProbs {
        scale: 1.0,
        temp: cfg.obs_temp,
        b: cfg.obs_b,
        alpha: cfg.alpha,
        c: 0.0,
    };
    let n = world.n_users * world.n_movies();
    let k = solve_scale(n, cfg.obs_pm, |f| {
        for u in 0..world.n_users {
            for m in 0..world.n_movies() {
                f(probs.raw(world, u, m));
            }
        }
    })?;
    probs.scale = k;
    probs.c = if cfg.obs_pm > 0.0 { k / cfg.obs_pm } else { 0.0 };
    Ok(probs)
}

/// Rating row as emitted in `rating.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatingRow {
    pub user: u32,
    pub movie: u32,
    pub rating: f64,
}

/// Keeps pair `(u, m)` with probability `1 − p(u, m)`; rows come out sorted.
pub fn apply_rating_missingness(
    world: &World,
    seed: u64,
    p: impl Fn(usize, usize) -> f64 + Sync,
    par: Parallelism,
) -> Vec<RatingRow> {
    let row = |u: usize| -> Vec<RatingRow> {
        (0..world.n_movies())
            .filter(|&m| {
                let mut rng = keyed(seed, Domain::RatingMissing, u as u64, m as u64);
                rng.random::<f64>() < 1.0 - p(u, m)
            })
            .map(|m| RatingRow {
                user: u as u32,
                movie: m as u32,
                rating: world.rating(u, m),
            })
            .collect()
    };
    match par {
        Parallelism::Sequential => (0..world.n_users).flat_map(row).collect(),
        Parallelism::Parallel => (0..world.n_users).into_par_iter().map(row).collect::<Vec<_>>().concat(),
    }
}
