//! Semi-synthetic causal-tag-and-rating data generation driven by m-graphs,
//! together with the baseline recommenders and metrics used to evaluate it.

pub mod baselines;
pub mod catalog;
pub mod cli;
pub mod eval;
pub mod generator;
pub mod mgraph;
pub mod rng;
pub mod sampling;
