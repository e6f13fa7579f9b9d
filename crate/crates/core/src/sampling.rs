//! Weighted sampling without replacement.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

/// Reusable sampler over a fixed nonnegative weight vector.
#[derive(Debug, Clone)]
pub struct WeightedSampler {
    weights: Vec<f64>,
    alias: Option<WeightedAliasIndex<f64>>,
    positive: usize,
}

impl WeightedSampler {
    pub fn new(weights: Vec<f64>) -> Self {
        let positive = weights.iter().filter(|&&w| w > 0.0).count();
        let alias = if positive > 0 {
            Some(WeightedAliasIndex::new(weights.clone()).expect("finite nonnegative weights"))
        } else {
            None
        };
        WeightedSampler {
            weights,
            alias,
            positive,
        }
    }

    /// Number of indices with positive weight.
    pub fn support(&self) -> usize {
        self.positive
    }

    /// Draws `min(k, support)` distinct indices, successively proportional to
    /// weight among the not-yet-drawn ones. Returned sorted.
    pub fn sample_distinct(&self, k: usize, rng: &mut impl Rng) -> Vec<usize> {
        let k = k.min(self.positive);
        if k == 0 {
            return Vec::new();
        }
        let mut out: Vec<usize> = if k * 4 >= self.positive {
            rand::seq::index::sample_weighted(rng, self.weights.len(), |i| self.weights[i], k)
                .expect("k bounded by positive support")
                .into_vec()
        } else {
            // Sparse draw: rejection of repeats keeps each step proportional to
            // the remaining weights.
            let alias = self.alias.as_ref().expect("positive support");
            let mut picked = Vec::with_capacity(k);
            while picked.len() < k {
                let i = alias.sample(rng);
                if !picked.contains(&i) {
                    picked.push(i);
                }
            }
            picked
        };
        out.sort_unstable();
        out
    }
}
