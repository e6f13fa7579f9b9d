//! Ground-truth world: movies with tags and quality, users with preferred
//! tags, and the complete rating matrix.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::{GenConfig, GenError, Parallelism};
use crate::catalog::{popularity_rank, Catalog, MovieId, MovieSeed, TagId};
use crate::rng::{keyed, Domain};
use crate::sampling::WeightedSampler;

/// The full rating matrix is stored only up to this many cells; larger
/// worlds recompute ratings from their keyed streams on demand.
pub const MATERIALIZE_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Movie {
    /// Dense id used in every emitted file.
    pub movie_id: MovieId,
    pub catalog_id: MovieId,
    pub avg_rating: f64,
    /// Sorted, `tags_per_movie` long.
    pub tags: Vec<TagId>,
    pub quality: f64,
    pub popularity: u64,
}

/// The RecSys node: popularity rank of every selected movie, 1 = least popular.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopularityModel {
    ranks: Vec<u32>,
}

impl PopularityModel {
    pub fn from_ranks(ranks: Vec<u32>) -> Self {
        PopularityModel { ranks }
    }

    pub fn rank(&self, movie: usize) -> u32 {
        self.ranks[movie]
    }

    pub fn n_movies(&self) -> usize {
        self.ranks.len()
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct World {
    pub n_users: usize,
    pub movies: Vec<Movie>,
    /// Sorted preferred tags per user.
    pub user_tags: Vec<Vec<TagId>>,
    /// Sorted union of all movie tags.
    pub tag_universe: Vec<TagId>,
    pub popularity: PopularityModel,
    #[serde(skip)]
    params: RatingParams,
    /// Row-major `n_users × n_movies`, present when small enough.
    #[serde(skip_serializing_if = "Option::is_none")]
    ratings: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Default)]
struct RatingParams {
    seed: u64,
    mu: f64,
    sigma2: f64,
    clip: bool,
}

/// `Q_m = avg_rating + N(0, σ₁²)`.
pub fn quality(avg_rating: f64, sigma1: f64, rng: &mut impl Rng) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    avg_rating + sigma1 * z
}

/// `R = Q_m + N(|T_L|/2 − μ, σ₂²)`, clipped to `[1, 5]` when requested.
pub fn rating(quality: f64, liked: usize, mu: f64, sigma2: f64, clip: bool, rng: &mut impl Rng) -> f64 {
    let z: f64 = StandardNormal.sample(rng);
    let r = quality + liked as f64 / 2.0 - mu + sigma2 * z;
    if clip {
        r.clamp(1.0, 5.0)
    } else {
        r
    }
}

fn count_common(a: &[TagId], b: &[TagId]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

impl World {
    pub fn n_movies(&self) -> usize {
        self.movies.len()
    }

    /// `T_L(u, m) = T_M(m) ∩ T_U(u)`, sorted.
    pub fn liked(&self, user: usize, movie: usize) -> Vec<TagId> {
        let tu = &self.user_tags[user];
        self.movies[movie]
            .tags
            .iter()
            .copied()
            .filter(|t| tu.binary_search(t).is_ok())
            .collect()
    }

    pub fn liked_count(&self, user: usize, movie: usize) -> usize {
        count_common(&self.movies[movie].tags, &self.user_tags[user])
    }

    /// Ground truth: does the user like the tag?
    pub fn islike(&self, user: usize, tag: TagId) -> bool {
        self.user_tags[user].binary_search(&tag).is_ok()
    }

    pub fn rating(&self, user: usize, movie: usize) -> f64 {
        match &self.ratings {
            Some(r) => r[user * self.n_movies() + movie],
            None => self.compute_rating(user, movie),
        }
    }

    pub fn ratings_materialized(&self) -> bool {
        self.ratings.is_some()
    }

    fn compute_rating(&self, user: usize, movie: usize) -> f64 {
        let p = self.params;
        let mut rng = keyed(p.seed, Domain::Rating, user as u64, movie as u64);
        rating(
            self.movies[movie].quality,
            self.liked_count(user, movie),
            p.mu,
            p.sigma2,
            p.clip,
            &mut rng,
        )
    }

    /// Row-major copy of the full rating matrix.
    pub fn rating_matrix(&self) -> Vec<f64> {
        (0..self.n_users)
            .flat_map(|u| (0..self.n_movies()).map(move |m| (u, m)))
            .map(|(u, m)| self.rating(u, m))
            .collect()
    }
}

/// Picks the movie's generator tags: a uniform subset of its catalog tags,
/// topped up uniformly from the catalog tag universe if it has too few.
fn movie_tags(seed: &MovieSeed, universe: &[TagId], k: usize, rng: &mut impl Rng) -> Vec<TagId> {
    let mut tags: Vec<TagId> = if seed.tags.len() > k {
        rand::seq::index::sample(rng, seed.tags.len(), k)
            .into_iter()
            .map(|i| seed.tags[i])
            .collect()
    } else {
        seed.tags.clone()
    };
    let k = k.min(universe.len());
    while tags.len() < k {
        let t = universe[rng.random_range(0..universe.len())];
        if !tags.contains(&t) {
            tags.push(t);
        }
    }
    tags.sort_unstable();
    tags
}

/// Samples the ground-truth world in the graph's topological order:
/// movies and their tags, quality, user tags, then ratings.
pub fn sample_world(cfg: &GenConfig, cat: &Catalog, par: Parallelism) -> Result<World, GenError> {
    cfg.validate()?;
    if cat.len() < cfg.n_movies {
        return Err(GenError::CatalogTooSmall {
            have: cat.len(),
            need: cfg.n_movies,
        });
    }

    // The n_movies most popular catalog entries, re-indexed by catalog id.
    let ranks = popularity_rank(cat);
    let mut selected: Vec<&MovieSeed> = cat.movies().iter().collect();
    selected.sort_by_key(|m| std::cmp::Reverse(ranks[&m.movie_id]));
    selected.truncate(cfg.n_movies);
    selected.sort_by_key(|m| m.movie_id);

    let universe: Vec<TagId> = cat.tag_universe().iter().copied().collect();
    let movies: Vec<Movie> = selected
        .iter()
        .enumerate()
        .map(|(i, seed)| {
            let mut trng = keyed(cfg.seed, Domain::MovieTagPad, i as u64, 0);
            let mut qrng = keyed(cfg.seed, Domain::Quality, i as u64, 0);
            Movie {
                movie_id: i as MovieId,
                catalog_id: seed.movie_id,
                avg_rating: seed.avg_rating,
                tags: movie_tags(seed, &universe, cfg.tags_per_movie, &mut trng),
                quality: quality(seed.avg_rating, cfg.sigma1, &mut qrng),
                popularity: seed.popularity,
            }
        })
        .collect();

    let sub = Catalog::new(selected.iter().map(|&m| m.clone()).collect()).expect("subset of a valid catalog is valid");
    let sub_ranks = popularity_rank(&sub);
    let popularity = PopularityModel::from_ranks(movies.iter().map(|m| sub_ranks[&m.catalog_id]).collect());

    // Preferred tags are drawn by frequency among the selected movies' tags.
    let mut freq = std::collections::BTreeMap::<TagId, f64>::new();
    for m in &movies {
        for &t in &m.tags {
            *freq.entry(t).or_insert(0.0) += 1.0;
        }
    }
    let tag_universe: Vec<TagId> = freq.keys().copied().collect();
    let sampler = WeightedSampler::new(freq.values().copied().collect());
    let user_tags: Vec<Vec<TagId>> = (0..cfg.n_users)
        .map(|u| {
            let mut rng = keyed(cfg.seed, Domain::UserTags, u as u64, 0);
            let size = rng.random_range(cfg.tags_per_user_min..=cfg.tags_per_user_max);
            sampler
                .sample_distinct(size, &mut rng)
                .into_iter()
                .map(|i| tag_universe[i])
                .collect()
        })
        .collect();

    let mut world = World {
        n_users: cfg.n_users,
        movies,
        user_tags,
        tag_universe,
        popularity,
        params: RatingParams {
            seed: cfg.seed,
            mu: cfg.mu,
            sigma2: cfg.sigma2,
            clip: cfg.rating_clip,
        },
        ratings: None,
    };

    if cfg.n_pairs() <= MATERIALIZE_LIMIT {
        let n_movies = world.n_movies();
        let row = |u: usize| -> Vec<f64> { (0..n_movies).map(|m| world.compute_rating(u, m)).collect() };
        let rows: Vec<Vec<f64>> = match par {
            Parallelism::Sequential => (0..cfg.n_users).map(row).collect(),
            Parallelism::Parallel => (0..cfg.n_users).into_par_iter().map(row).collect(),
        };
        world.ratings = Some(rows.concat());
    }
    Ok(world)
}
