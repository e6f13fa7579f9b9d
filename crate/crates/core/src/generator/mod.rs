//! Simulator for the full CTAR m-graph: ground-truth world, the three
//! missingness mechanisms, dataset files and counterfactual oracles.

pub mod config;
pub mod io;
pub mod missing;
pub mod observe;
pub mod splits;
pub mod tau;
pub mod world;

use std::path::Path;

use thiserror::Error;

use crate::catalog::{Catalog, CatalogError};

pub use config::{GenConfig, PRESETS};
pub use io::ObservedDataset;
pub use missing::{ObsMissingProbs, RatingMissingProbs, RatingRow};
pub use observe::{ObsLabel, ObsPair, TagRow, NO_TAG};
pub use splits::{TestRow, TestSplits};
pub use tau::{ground_truth_tau, monte_carlo_tau, TauEntry, TauTable};
pub use world::{sample_world, Movie, PopularityModel, World};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("catalog has {have} movies but {need} are required")]
    CatalogTooSmall { have: usize, need: usize },
    #[error("mean missing rate {target} is unreachable (at most {reachable} with every reachable pair missing)")]
    Unnormalizable { target: f64, reachable: f64 },
    #[error("missing dataset file {0}")]
    MissingFile(String),
    #[error("{file}:{line}: {message}")]
    Format { file: String, line: u64, message: String },
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Whether per-pair work may be spread over threads. Output is identical
/// either way.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    #[default]
    Sequential,
    Parallel,
}

/// Intermediate products kept for diagnostics and tests.
#[derive(Debug, Clone)]
pub struct GenTrace {
    pub rating_probs: RatingMissingProbs,
    pub obs_probs: ObsMissingProbs,
    pub rct_pairs: Vec<(u32, u32)>,
    pub obs_pairs: Vec<ObsPair>,
    pub pool_rated: Vec<(u32, u32)>,
    pub pool_unrated: Vec<(u32, u32)>,
}

#[derive(Debug, Clone)]
pub struct GenerationOutput {
    pub world: World,
    pub dataset: ObservedDataset,
    pub trace: GenTrace,
}

impl GenerationOutput {
    pub fn tau(&self) -> TauTable<'_> {
        TauTable::new(&self.world)
    }

    /// Writes the dataset files, `ground_truth.csv` and `world.json`.
    /// Returns the written file names in emission order.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<Vec<&'static str>, GenError> {
        let dir = dir.as_ref();
        let mut names = self.dataset.write_dir(dir)?;
        io::write_ground_truth(dir, &self.tau())?;
        io::write_world(dir, &self.world)?;
        names.push(io::GROUND_TRUTH_FILE);
        names.push(io::WORLD_FILE);
        Ok(names)
    }
}

/// Loads the configured catalog file or synthesizes one.
pub fn resolve_catalog(cfg: &GenConfig) -> Result<Catalog, GenError> {
    match &cfg.catalog_path {
        Some(path) => Ok(crate::catalog::load_catalog(path)?),
        None => Ok(crate::catalog::synth_catalog_with(&cfg.synth_catalog_config())),
    }
}

/// Runs the whole pipeline in the graph's topological order:
/// world (U, M, T_M, Q, T_U, T_L, R), then R_R, R_RCT, R_O, then test splits.
pub fn generate(cfg: &GenConfig, cat: &Catalog, par: Parallelism) -> Result<GenerationOutput, GenError> {
    let world = sample_world(cfg, cat, par)?;

    let rating_probs = missing::rating_missing_probs(&world.popularity, world.n_users, cfg)?;
    let ratings = missing::apply_rating_missingness(&world, cfg.seed, |u, m| rating_probs.get(u, m), par);

    let (rct_pairs, rcttag) = observe::rct_sample(&world, cfg);

    let obs_probs = missing::obs_pair_missing_probs(&world, cfg)?;
    let obs_pairs = observe::obs_sample(&world, &obs_probs, cfg, par);
    let obstag = observe::obs_rows(&obs_pairs);

    let (pool_rated, pool_unrated) = observe::test_pools(&world, &ratings, cfg);
    let splits = splits::build_test_splits(&world, &obstag, &rcttag, &pool_rated, &pool_unrated);

    let movies = world.movies.iter().map(|m| (m.movie_id, m.tags.clone())).collect();
    log::info!(
        "generated {} ratings, {} obstag rows, {} rcttag rows, {}+{}+{} test rows",
        ratings.len(),
        obstag.len(),
        rcttag.len(),
        splits.split1.len(),
        splits.split2.len(),
        splits.split3.len()
    );
    Ok(GenerationOutput {
        dataset: ObservedDataset {
            movies,
            ratings,
            obstag,
            rcttag,
            splits,
        },
        trace: GenTrace {
            rating_probs,
            obs_probs,
            rct_pairs,
            obs_pairs,
            pool_rated,
            pool_unrated,
        },
        world,
    })
}
