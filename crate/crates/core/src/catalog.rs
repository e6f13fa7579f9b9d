//! Seed catalog of movies: average rating, tag set and popularity per movie.
//!
//! The catalog is either loaded from a CSV summary file
//! (`movieID,avgRating,popularity,tags`, tags `;`-separated) or synthesized
//! with a bell-shaped rating distribution and Zipf-like popularity and tag
//! frequencies.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::rng::{keyed, Domain};
use crate::sampling::WeightedSampler;

pub type MovieId = u32;
pub type TagId = u32;

pub const CATALOG_HEADER: [&str; 4] = ["movieID", "avgRating", "popularity", "tags"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: duplicate movieID {movie_id}")]
    DuplicateMovie { line: u64, movie_id: MovieId },
    #[error("line {line}: movie {movie_id} has an empty tag list")]
    EmptyTags { line: u64, movie_id: MovieId },
    #[error("line {line}: movie {movie_id} has avgRating {value} outside [1, 5]")]
    RatingOutOfRange { line: u64, movie_id: MovieId, value: f64 },
    #[error("catalog is invalid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovieSeed {
    pub movie_id: MovieId,
    pub avg_rating: f64,
    /// Sorted, distinct.
    pub tags: Vec<TagId>,
    pub popularity: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Catalog {
    movies: Vec<MovieSeed>,
    tag_universe: BTreeSet<TagId>,
}

impl Catalog {
    /// Validates and wraps a movie list. Tags are sorted and deduplicated;
    /// the tag universe is the union of all movie tags.
    pub fn new(mut movies: Vec<MovieSeed>) -> Result<Self, CatalogError> {
        let mut ids = HashSet::with_capacity(movies.len());
        let mut tag_universe = BTreeSet::new();
        for m in &mut movies {
            if !ids.insert(m.movie_id) {
                return Err(CatalogError::Invalid(format!("duplicate movieID {}", m.movie_id)));
            }
            if !(1.0..=5.0).contains(&m.avg_rating) {
                return Err(CatalogError::Invalid(format!(
                    "movie {} has avgRating {} outside [1, 5]",
                    m.movie_id, m.avg_rating
                )));
            }
            m.tags.sort_unstable();
            m.tags.dedup();
            if m.tags.is_empty() {
                return Err(CatalogError::Invalid(format!("movie {} has no tags", m.movie_id)));
            }
            tag_universe.extend(m.tags.iter().copied());
        }
        Ok(Catalog { movies, tag_universe })
    }

    pub fn movies(&self) -> &[MovieSeed] {
        &self.movies
    }

    pub fn len(&self) -> usize {
        self.movies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.movies.is_empty()
    }

    pub fn tag_universe(&self) -> &BTreeSet<TagId> {
        &self.tag_universe
    }

    /// Number of movies carrying each tag.
    pub fn tag_frequencies(&self) -> BTreeMap<TagId, u64> {
        let mut freq = BTreeMap::new();
        for m in &self.movies {
            for &t in &m.tags {
                *freq.entry(t).or_insert(0) += 1;
            }
        }
        freq
    }
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Catalog, CatalogError> {
    read_catalog(std::fs::File::open(path)?)
}

pub fn read_catalog(reader: impl Read) -> Result<Catalog, CatalogError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != CATALOG_HEADER {
        return Err(CatalogError::Parse {
            line: 1,
            message: format!("expected header `{}`", CATALOG_HEADER.join(",")),
        });
    }
    let mut movies = Vec::new();
    let mut seen = HashSet::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let parse_err = |message: String| CatalogError::Parse { line, message };
        if rec.len() != 4 {
            return Err(parse_err(format!("expected 4 fields, found {}", rec.len())));
        }
        let movie_id: MovieId = rec[0]
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad movieID `{}`: {e}", &rec[0])))?;
        let avg_rating: f64 = rec[1]
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad avgRating `{}`: {e}", &rec[1])))?;
        let popularity: u64 = rec[2]
            .trim()
            .parse()
            .map_err(|e| parse_err(format!("bad popularity `{}`: {e}", &rec[2])))?;
        let tags = rec[3]
            .split(';')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<TagId>().map_err(|e| parse_err(format!("bad tag `{s}`: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if !seen.insert(movie_id) {
            return Err(CatalogError::DuplicateMovie { line, movie_id });
        }
        if !(1.0..=5.0).contains(&avg_rating) {
            return Err(CatalogError::RatingOutOfRange {
                line,
                movie_id,
                value: avg_rating,
            });
        }
        if tags.is_empty() {
            return Err(CatalogError::EmptyTags { line, movie_id });
        }
        movies.push(MovieSeed {
            movie_id,
            avg_rating,
            tags,
            popularity,
        });
    }
    Catalog::new(movies)
}

pub fn save_catalog(cat: &Catalog, path: impl AsRef<Path>) -> Result<(), CatalogError> {
    let file = std::fs::File::create(path)?;
    write_catalog(cat, std::io::BufWriter::new(file))
}

pub fn write_catalog(cat: &Catalog, writer: impl Write) -> Result<(), CatalogError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(CATALOG_HEADER)?;
    for m in cat.movies() {
        let tags: Vec<String> = m.tags.iter().map(ToString::to_string).collect();
        w.write_record([
            m.movie_id.to_string(),
            m.avg_rating.to_string(),
            m.popularity.to_string(),
            tags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Knobs of the synthetic catalog.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SynthCatalogConfig {
    pub n_movies: usize,
    pub n_tags: usize,
    pub seed: u64,
    pub rating_mean: f64,
    pub rating_sd: f64,
    /// Popularity of the k-th most popular movie is `max_popularity · k^-s`.
    pub popularity_exponent: f64,
    pub max_popularity: f64,
    /// Tag `j` (1-based) is drawn with weight `j^-s`.
    pub tag_exponent: f64,
    pub max_tags_per_movie: usize,
}

impl SynthCatalogConfig {
    pub fn new(n_movies: usize, n_tags: usize, seed: u64) -> Self {
        SynthCatalogConfig {
            n_movies,
            n_tags,
            seed,
            rating_mean: 3.5,
            rating_sd: 0.6,
            popularity_exponent: 1.1,
            max_popularity: 20_000.0,
            tag_exponent: 1.1,
            max_tags_per_movie: 40,
        }
    }

    /// Popularity assigned to the movie at 1-based popularity position `k`.
    pub fn popularity_at(&self, k: usize) -> u64 {
        (self.max_popularity * (k as f64).powf(-self.popularity_exponent))
            .round()
            .max(1.0) as u64
    }
}

pub fn synth_catalog(n_movies: usize, n_tags: usize, seed: u64) -> Catalog {
    synth_catalog_with(&SynthCatalogConfig::new(n_movies, n_tags, seed))
}

/// Movie ids are `1..=n_movies`, tag ids `1..=n_tags`. Popularity positions
/// are shuffled over movie ids so id order carries no information.
pub fn synth_catalog_with(cfg: &SynthCatalogConfig) -> Catalog {
    assert!(
        cfg.n_movies >= 1 && cfg.n_tags >= 1,
        "catalog needs at least one movie and tag"
    );
    let mut rng = keyed(cfg.seed, Domain::Catalog, 0, 0);
    let mut positions: Vec<usize> = (1..=cfg.n_movies).collect();
    rand::seq::SliceRandom::shuffle(positions.as_mut_slice(), &mut rng);

    let tag_sampler = WeightedSampler::new((1..=cfg.n_tags).map(|j| (j as f64).powf(-cfg.tag_exponent)).collect());
    let rating = Normal::new(cfg.rating_mean, cfg.rating_sd).expect("finite rating sd");

    let movies = positions
        .iter()
        .enumerate()
        .map(|(i, &pos)| {
            let avg_rating = loop {
                let r = rating.sample(&mut rng);
                if (1.0..=5.0).contains(&r) {
                    break r;
                }
            };
            let popularity = cfg.popularity_at(pos);
            let n_distinct = (popularity as usize).min(cfg.max_tags_per_movie).min(cfg.n_tags).max(1);
            let tags = tag_sampler
                .sample_distinct(n_distinct, &mut rng)
                .into_iter()
                .map(|j| j as TagId + 1)
                .collect();
            MovieSeed {
                movie_id: i as MovieId + 1,
                avg_rating,
                tags,
                popularity,
            }
        })
        .collect();
    Catalog::new(movies).expect("synthesized catalog is valid")
}

/// Rank of each movie by ascending popularity: rank 1 is the least popular,
/// ties go to the smaller movie id.
pub fn popularity_rank(cat: &Catalog) -> BTreeMap<MovieId, u32> {
    let mut order: Vec<&MovieSeed> = cat.movies().iter().collect();
    order.sort_by_key(|m| (m.popularity, m.movie_id));
    order
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m.movie_id, i as u32 + 1))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(id: MovieId, pop: u64) -> MovieSeed {
        MovieSeed {
            movie_id: id,
            avg_rating: 3.0,
            tags: vec![1],
            popularity: pop,
        }
    }

    #[test]
    fn loads_three_rows() {
        let text = "movieID,avgRating,popularity,tags\n1,3.5,10,1;2\n2,4.0,3,2\n3,1.0,0,5;6;7\n";
        let cat = read_catalog(text.as_bytes()).unwrap();
        assert_eq!(cat.len(), 3);
        assert_eq!(cat.tag_universe().len(), 5);
    }

    #[test]
    fn rejects_out_of_range_rating() {
        let text = "movieID,avgRating,popularity,tags\n1,3.5,10,1\n7,6.0,3,2\n";
        match read_catalog(text.as_bytes()).unwrap_err() {
            CatalogError::RatingOutOfRange { line, movie_id, .. } => {
                assert_eq!((line, movie_id), (3, 7));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn rejects_duplicates_empty_tags_and_garbage() {
        let dup = "movieID,avgRating,popularity,tags\n1,3.5,10,1\n1,3.0,3,2\n";
        assert!(matches!(
            read_catalog(dup.as_bytes()).unwrap_err(),
            CatalogError::DuplicateMovie { line: 3, movie_id: 1 }
        ));
        let empty = "movieID,avgRating,popularity,tags\n1,3.5,10,\n";
        assert!(matches!(
            read_catalog(empty.as_bytes()).unwrap_err(),
            CatalogError::EmptyTags { line: 2, .. }
        ));
        let bad = "movieID,avgRating,popularity,tags\n1,x,10,1\n";
        assert!(matches!(
            read_catalog(bad.as_bytes()).unwrap_err(),
            CatalogError::Parse { line: 2, .. }
        ));
        let header = "id,rating,pop,tags\n";
        assert!(matches!(
            read_catalog(header.as_bytes()).unwrap_err(),
            CatalogError::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn rank_example() {
        let cat = Catalog::new(vec![seed(10, 5), seed(20, 9), seed(30, 1)]).unwrap();
        let r = popularity_rank(&cat);
        assert_eq!(r[&30], 1);
        assert_eq!(r[&10], 2);
        assert_eq!(r[&20], 3);
    }

    #[test]
    fn equal_popularity_ranks_by_id() {
        let cat = Catalog::new(vec![seed(5, 2), seed(1, 2), seed(3, 2)]).unwrap();
        let r = popularity_rank(&cat);
        assert_eq!((r[&1], r[&3], r[&5]), (1, 2, 3));
    }

    #[test]
    fn synth_is_deterministic() {
        assert_eq!(synth_catalog(200, 300, 9), synth_catalog(200, 300, 9));
        assert_ne!(synth_catalog(200, 300, 9), synth_catalog(200, 300, 10));
    }

    #[test]
    fn synth_single_movie() {
        let cat = synth_catalog(1, 5, 1);
        assert_eq!(cat.len(), 1);
        assert_eq!(popularity_rank(&cat)[&1], 1);
    }

    #[test]
    fn synth_respects_invariants() {
        let cat = synth_catalog(500, 800, 2);
        for m in cat.movies() {
            assert!((1.0..=5.0).contains(&m.avg_rating));
            assert!(!m.tags.is_empty() && m.tags.len() <= 40);
            assert!(m.tags.iter().all(|t| (1..=800).contains(t)));
        }
    }
}
