//! Naive-Bayes propensities and inverse-propensity-weighted MF.

use serde::Serialize;

use super::mf::{check_data, mf_train, FactorModel, Hyper, TrainLog};
use super::{BaselineError, Interaction};

/// `P(O = 1 | y)` for both labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropensityTable {
    pub p_obs_given_neg: f64,
    pub p_obs_given_pos: f64,
}

impl PropensityTable {
    /// Bayes' rule `P(O=1|y) = P(y|O=1)·P(O=1) / P(y)`, capped at 1.
    /// `p_pos_given_obs` and `p_pos` are the positive-label rates.
    pub fn from_rates(p_pos_given_obs: f64, p_obs: f64, p_pos: f64) -> Self {
        let bayes = |py_o: f64, py: f64| (py_o * p_obs / py).min(1.0);
        PropensityTable {
            p_obs_given_neg: bayes(1.0 - p_pos_given_obs, 1.0 - p_pos),
            p_obs_given_pos: bayes(p_pos_given_obs, p_pos),
        }
    }

    pub fn get(&self, label: u8) -> f64 {
        if label == 1 {
            self.p_obs_given_pos
        } else {
            self.p_obs_given_neg
        }
    }

    /// IPS weights `1/P(O=1|y)` rescaled to mean 1 over `data`, so the
    /// effective learning rate matches unweighted training.
    pub fn weigh(&self, data: &[Interaction]) -> Vec<Interaction> {
        let raw: Vec<f64> = data.iter().map(|i| i.weight / self.get(i.label)).collect();
        let mean = raw.iter().sum::<f64>() / raw.len().max(1) as f64;
        data.iter()
            .zip(raw)
            .map(|(i, w)| Interaction { weight: w / mean, ..*i })
            .collect()
    }
}

fn positives(data: &[Interaction]) -> usize {
    data.iter().filter(|i| i.label == 1).count()
}

/// Naive-Bayes propensity estimate with +1 smoothing on label counts.
/// `P(y|O=1)` comes from the biased set, `P(y)` from the unbiased set and
/// `P(O=1) = |biased| / n_slots`.
pub fn nb_propensity(
    biased: &[Interaction],
    unbiased: &[Interaction],
    n_slots: usize,
) -> Result<PropensityTable, BaselineError> {
    if biased.is_empty() {
        return Err(BaselineError::EmptyData);
    }
    if unbiased.is_empty() {
        return Err(BaselineError::EmptyUnbiased);
    }
    let smooth = |k: usize, n: usize| (k as f64 + 1.0) / (n as f64 + 2.0);
    let p_obs = (biased.len() as f64 / n_slots.max(biased.len()) as f64).max(f64::MIN_POSITIVE);
    Ok(PropensityTable::from_rates(
        smooth(positives(biased), biased.len()),
        p_obs,
        smooth(positives(unbiased), unbiased.len()),
    ))
}

/// [`mf_train`] with each interaction weighted by its inverse propensity.
pub fn mf_ips_train(
    biased: &[Interaction],
    table: &PropensityTable,
    hyper: &Hyper,
) -> Result<(FactorModel, TrainLog), BaselineError> {
    check_data(biased)?;
    mf_train(&table.weigh(biased), hyper)
}
