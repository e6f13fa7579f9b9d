//! Repeated train-and-test runs of a baseline on a generated dataset.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::metrics::{auc, mse};
use super::EvalError;
use crate::baselines::mf::run_seed;
use crate::baselines::{derive_training_labels, train_model, CauseHyper, FactorModel, ModelKind};
use crate::generator::{ObservedDataset, TestRow};

pub const SPLIT_NAMES: [&str; 4] = ["I", "II", "III", "all"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub runs: usize,
    pub seed: u64,
    pub hyper: CauseHyper,
}

impl ExperimentConfig {
    pub fn new(model: ModelKind, runs: usize, seed: u64) -> Self {
        ExperimentConfig {
            model,
            runs,
            seed,
            hyper: CauseHyper::default(),
        }
    }
}

/// Mean and sample standard deviation over runs (0 for a single run).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let std = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Summary { mean, std }
    }
}

/// Metrics of one model on one split and one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitScore {
    pub mse: f64,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub split: String,
    pub rows: usize,
    pub positives: usize,
    pub mse: Summary,
    /// Absent when the split holds a single class.
    pub auc: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub model: ModelKind,
    pub runs: usize,
    pub splits: Vec<SplitReport>,
    /// `per_run[r][s]` in [`SPLIT_NAMES`] order.
    pub per_run: Vec<Vec<SplitScore>>,
}

impl EvalReport {
    pub fn split(&self, name: &str) -> Option<&SplitReport> {
        self.splits.iter().find(|s| s.split == name)
    }
}

/// The four evaluation sets in [`SPLIT_NAMES`] order.
pub fn test_sets(ds: &ObservedDataset) -> [Vec<TestRow>; 4] {
    [
        ds.splits.split1.clone(),
        ds.splits.split2.clone(),
        ds.splits.split3.clone(),
        ds.splits.all(),
    ]
}

/// Scores a trained model on one test set.
pub fn score_split(model: &FactorModel, rows: &[TestRow]) -> Result<Option<SplitScore>, EvalError> {
    if rows.is_empty() {
        return Ok(None);
    }
    let pred: Vec<f64> = rows.iter().map(|r| model.predict(r.user, r.tag)).collect();
    let truth: Vec<f64> = rows.iter().map(|r| f64::from(u8::from(r.islike))).collect();
    let labels: Vec<bool> = rows.iter().map(|r| r.islike).collect();
    Ok(Some(SplitScore {
        mse: mse(&pred, &truth)?,
        auc: auc(&pred, &labels)?,
    }))
}

/// Candidate (user, tag) slots: users seen anywhere times the movie tags.
pub fn candidate_slots(ds: &ObservedDataset) -> usize {
    let max_user = ds
        .ratings
        .iter()
        .map(|r| r.user)
        .chain(ds.obstag.iter().chain(&ds.rcttag).map(|r| r.user))
        .chain(ds.splits.all().iter().map(|r| r.user))
        .max();
    let tags: BTreeSet<u32> = ds.movies.iter().flat_map(|(_, t)| t.iter().copied()).collect();
    max_user.map_or(0, |u| u as usize + 1) * tags.len()
}

/// `runs` independent trainings with seeds derived from `cfg.seed`, each
/// scored on splits I, II, III and their union. Runs execute in parallel;
/// each is single-threaded and deterministic.
pub fn evaluate_dataset(ds: &ObservedDataset, cfg: &ExperimentConfig) -> Result<EvalReport, EvalError> {
    if cfg.runs == 0 {
        return Err(EvalError::NoRuns);
    }
    let (biased, unbiased) = derive_training_labels(&ds.obstag, &ds.rcttag, &ds.movies)?;
    let slots = candidate_slots(ds);
    let sets = test_sets(ds);

    let per_run: Vec<Vec<Option<SplitScore>>> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| -> Result<Vec<Option<SplitScore>>, EvalError> {
            let mut hyper = cfg.hyper.clone();
            hyper.base.seed = run_seed(cfg.seed, r);
            hyper.base.threads = 1;
            let model = train_model(cfg.model, &biased, &unbiased, slots, &hyper)?;
            sets.iter().map(|rows| score_split(&model, rows)).collect()
        })
        .collect::<Result<_, _>>()?;

    let mut splits = Vec::new();
    for (s, name) in SPLIT_NAMES.iter().enumerate() {
        let scores: Vec<SplitScore> = per_run.iter().filter_map(|run| run[s]).collect();
        if scores.is_empty() {
            continue;
        }
        let mses: Vec<f64> = scores.iter().map(|x| x.mse).collect();
        let aucs: Vec<f64> = scores.iter().filter_map(|x| x.auc).collect();
        splits.push(SplitReport {
            split: name.to_string(),
            rows: sets[s].len(),
            positives: sets[s].iter().filter(|r| r.islike).count(),
            mse: Summary::of(&mses),
            auc: (!aucs.is_empty()).then(|| Summary::of(&aucs)),
        });
    }
    let empty = SplitScore {
        mse: f64::NAN,
        auc: None,
    };
    Ok(EvalReport {
        model: cfg.model,
        runs: cfg.runs,
        splits,
        per_run: per_run
            .into_iter()
            .map(|run| run.into_iter().map(|x| x.unwrap_or(empty)).collect())
            .collect(),
    })
}

pub fn run_experiment(dir: impl AsRef<Path>, cfg: &ExperimentConfig) -> Result<EvalReport, EvalError> {
    let ds = ObservedDataset::read_dir(dir)?;
    evaluate_dataset(&ds, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_one_run_has_zero_std() {
        assert_eq!(Summary::of(&[0.7]), Summary { mean: 0.7, std: 0.0 });
        let s = Summary::of(&[1.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 2f64.sqrt()).abs() < 1e-15);
    }
}
