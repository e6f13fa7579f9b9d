//! Causal effect of a tag on a user's expected rating.
//!
//! Under the rating equation, forcing tag `t` into a movie raises `|T_L|` by
//! one exactly when the user likes `t`, which shifts the mean rating by 1/2.
//! So `tau(u, t) = 0.5 · 1{t ∈ T_U(u)}` and `tau'(u, t) = 1{tau > 0}`.
//! Both are taken on the unclipped structural equation.

use rand::Rng;

use super::world::{rating, World};
use crate::catalog::TagId;

pub fn ground_truth_tau(world: &World, user: usize, tag: TagId) -> (f64, bool) {
    let likes = world.islike(user, tag);
    (if likes { 0.5 } else { 0.0 }, likes)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEntry {
    pub user: u32,
    pub tag: TagId,
    pub tau: f64,
    pub tau_prime: bool,
}

/// `tau` and `tau'` for every user and every tag of the world's tag universe.
#[derive(Debug, Clone)]
pub struct TauTable<'w> {
    world: &'w World,
}

impl<'w> TauTable<'w> {
    pub fn new(world: &'w World) -> Self {
        TauTable { world }
    }

    pub fn get(&self, user: usize, tag: TagId) -> TauEntry {
        let (tau, tau_prime) = ground_truth_tau(self.world, user, tag);
        TauEntry {
            user: user as u32,
            tag,
            tau,
            tau_prime,
        }
    }

    pub fn len(&self) -> usize {
        self.world.n_users * self.world.tag_universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Entries ordered by (user, tag).
    pub fn iter(&self) -> impl Iterator<Item = TauEntry> + '_ {
        (0..self.world.n_users).flat_map(move |u| self.world.tag_universe.iter().map(move |&t| self.get(u, t)))
    }
}

/// Monte-Carlo interventional estimate of `tau(u, t)`.
///
/// Each of `draws` iterations picks a movie uniformly, then samples one rating
/// with `t` forced into the movie's tags and an independent one with `t`
/// removed; the estimate is the mean difference. The standard error is
/// `σ₂·√(2/draws)`.
pub fn monte_carlo_tau(
    world: &World,
    user: usize,
    tag: TagId,
    mu: f64,
    sigma2: f64,
    draws: usize,
    rng: &mut impl Rng,
) -> f64 {
    let likes = world.islike(user, tag);
    let mut diff = 0.0;
    for _ in 0..draws {
        let m = rng.random_range(0..world.n_movies());
        let movie = &world.movies[m];
        let without = world.liked_count(user, m) - usize::from(likes && movie.tags.contains(&tag));
        let with = without + usize::from(likes);
        let r1 = rating(movie.quality, with, mu, sigma2, false, rng);
        let r0 = rating(movie.quality, without, mu, sigma2, false, rng);
        diff += r1 - r0;
    }
    diff / draws as f64
}
