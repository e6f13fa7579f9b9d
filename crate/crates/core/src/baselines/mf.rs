//! Matrix factorization with a sigmoid output trained by SGD.
//!
//! Score `s = g + b_u + b_t + <p_u, q_t>`, prediction `σ(s)`. The objective is
//!
//! ```text
//! J = Σ_i w_i (σ(s_i) − y_i)² + reg · Σ_i (|p_u|² + |q_t|² + b_u² + b_t²)
//! ```
//!
//! with the L2 term counted once per interaction. Each SGD step takes a
//! gradient step on the squared loss of one interaction, then the exact
//! proximal step of its L2 term (`x ← x / (1 + 2·lr·reg)`), so large `reg`
//! shrinks parameters to zero instead of overshooting. The global bias is
//! not regularized.

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BaselineError, Interaction};
use crate::catalog::TagId;
use crate::generator::missing::sigmoid;
use crate::rng::{keyed, mix, Domain};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyper {
    pub dim: usize,
    pub lr: f64,
    pub reg: f64,
    pub epochs: usize,
    pub seed: u64,
    pub init_std: f64,
    /// 1 = deterministic single-thread SGD. Larger values train one copy per
    /// shard each epoch and average them.
    pub threads: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            dim: 16,
            lr: 0.05,
            reg: 0.001,
            epochs: 30,
            seed: 0,
            init_std: 0.1,
            threads: 1,
        }
    }
}

/// Objective value after each epoch (index 0 = before training).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainLog {
    pub objective: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    pub dim: usize,
    pub global_bias: f64,
    pub(crate) user_ids: Vec<u32>,
    pub(crate) user_bias: Vec<f64>,
    pub(crate) user_vecs: Vec<f64>,
    pub(crate) tag_ids: Vec<TagId>,
    pub(crate) tag_bias: Vec<f64>,
    pub(crate) tag_vecs: Vec<f64>,
}

fn init_rows(ids: &[u32], dim: usize, std: f64, seed: u64, kind: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(ids.len() * dim);
    for &id in ids {
        let mut rng = keyed(seed, Domain::Training, kind, u64::from(id));
        out.extend((0..dim).map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            std * z
        }));
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-3, 1.0 - 1e-3);
    (p / (1.0 - p)).ln()
}

/// Weighted share of positive labels.
pub(crate) fn base_rate(data: &[Interaction]) -> f64 {
    let w: f64 = data.iter().map(|i| i.weight).sum();
    if w == 0.0 {
        return 0.5;
    }
    data.iter().map(|i| i.weight * i.y()).sum::<f64>() / w
}

fn sorted_ids(it: impl Iterator<Item = u32>) -> Vec<u32> {
    let mut v: Vec<u32> = it.collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// An interaction resolved to model row indices.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Example {
    pub u: usize,
    pub t: usize,
    pub y: f64,
    pub w: f64,
}

impl FactorModel {
    /// Random embeddings keyed by (seed, id), zero biases, and the global
    /// bias at the logit of `base_rate`.
    pub fn init(
        dim: usize,
        users: impl IntoIterator<Item = u32>,
        tags: impl IntoIterator<Item = TagId>,
        base_rate: f64,
        init_std: f64,
        seed: u64,
    ) -> Self {
        let user_ids = sorted_ids(users.into_iter());
        let tag_ids = sorted_ids(tags.into_iter());
        FactorModel {
            dim,
            global_bias: logit(base_rate),
            user_bias: vec![0.0; user_ids.len()],
            user_vecs: init_rows(&user_ids, dim, init_std, seed, 0),
            tag_bias: vec![0.0; tag_ids.len()],
            tag_vecs: init_rows(&tag_ids, dim, init_std, seed, 1),
            user_ids,
            tag_ids,
        }
    }

    pub fn for_data(data: &[Interaction], hyper: &Hyper) -> Self {
        FactorModel::init(
            hyper.dim,
            data.iter().map(|i| i.user),
            data.iter().map(|i| i.tag),
            base_rate(data),
            hyper.init_std,
            hyper.seed,
        )
    }

    pub fn n_users(&self) -> usize {
        self.user_ids.len()
    }

    pub fn n_tags(&self) -> usize {
        self.tag_ids.len()
    }

    pub(crate) fn user_index(&self, user: u32) -> Option<usize> {
        self.user_ids.binary_search(&user).ok()
    }

    pub(crate) fn tag_index(&self, tag: TagId) -> Option<usize> {
        self.tag_ids.binary_search(&tag).ok()
    }

    pub fn user_vec(&self, user: u32) -> Option<&[f64]> {
        let d = self.dim;
        self.user_index(user).map(|i| &self.user_vecs[i * d..(i + 1) * d])
    }

    pub fn tag_vec(&self, tag: TagId) -> Option<&[f64]> {
        let d = self.dim;
        self.tag_index(tag).map(|i| &self.tag_vecs[i * d..(i + 1) * d])
    }

    /// Raw score. Unknown users or tags contribute nothing.
    pub fn score(&self, user: u32, tag: TagId) -> f64 {
        let d = self.dim;
        let (ui, ti) = (self.user_index(user), self.tag_index(tag));
        let mut s = self.global_bias;
        if let Some(u) = ui {
            s += self.user_bias[u];
        }
        if let Some(t) = ti {
            s += self.tag_bias[t];
        }
        if let (Some(u), Some(t)) = (ui, ti) {
            s += dot(&self.user_vecs[u * d..(u + 1) * d], &self.tag_vecs[t * d..(t + 1) * d]);
        }
        s
    }

    /// Predicted probability that `user` likes `tag`.
    pub fn predict(&self, user: u32, tag: TagId) -> f64 {
        sigmoid(self.score(user, tag))
    }

    fn index_score(&self, u: usize, t: usize) -> f64 {
        let d = self.dim;
        self.global_bias
            + self.user_bias[u]
            + self.tag_bias[t]
            + dot(&self.user_vecs[u * d..(u + 1) * d], &self.tag_vecs[t * d..(t + 1) * d])
    }

    /// Resolves interactions to row indices; every user and tag must be known.
    pub(crate) fn examples(&self, data: &[Interaction]) -> Vec<Example> {
        data.iter()
            .map(|i| Example {
                u: self.user_index(i.user).expect("user row exists"),
                t: self.tag_index(i.tag).expect("tag row exists"),
                y: i.y(),
                w: i.weight,
            })
            .collect()
    }

    /// All parameters flattened as
    /// `[global, user_bias, user_vecs, tag_bias, tag_vecs]`.
    pub fn params(&self) -> Vec<f64> {
        let mut p = vec![self.global_bias];
        p.extend(&self.user_bias);
        p.extend(&self.user_vecs);
        p.extend(&self.tag_bias);
        p.extend(&self.tag_vecs);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.params().len(), "parameter vector length");
        self.global_bias = p[0];
        let mut off = 1;
        for dst in [
            &mut self.user_bias,
            &mut self.user_vecs,
            &mut self.tag_bias,
            &mut self.tag_vecs,
        ] {
            let n = dst.len();
            dst.copy_from_slice(&p[off..off + n]);
            off += n;
        }
    }

    fn offsets(&self) -> (usize, usize, usize, usize) {
        let ub = 1;
        let uv = ub + self.user_bias.len();
        let tb = uv + self.user_vecs.len();
        let tv = tb + self.tag_bias.len();
        (ub, uv, tb, tv)
    }

    pub(crate) fn objective_ex(&self, ex: &[Example], reg: f64) -> f64 {
        let d = self.dim;
        ex.iter()
            .map(|e| {
                let r = sigmoid(self.index_score(e.u, e.t)) - e.y;
                let pu = &self.user_vecs[e.u * d..(e.u + 1) * d];
                let qt = &self.tag_vecs[e.t * d..(e.t + 1) * d];
                let l2 = dot(pu, pu) + dot(qt, qt) + self.user_bias[e.u].powi(2) + self.tag_bias[e.t].powi(2);
                e.w * r * r + reg * l2
            })
            .sum()
    }

    /// The training objective on `data`.
    pub fn objective(&self, data: &[Interaction], reg: f64) -> f64 {
        self.objective_ex(&self.examples(data), reg)
    }

    /// Analytic gradient of [`FactorModel::objective`] in [`FactorModel::params`] layout.
    pub fn gradient(&self, data: &[Interaction], reg: f64) -> Vec<f64> {
        let d = self.dim;
        let (ub, uv, tb, tv) = self.offsets();
        let mut g = vec![0.0; self.params().len()];
        for e in self.examples(data) {
            let s = sigmoid(self.index_score(e.u, e.t));
            let ds = 2.0 * e.w * (s - e.y) * s * (1.0 - s);
            g[0] += ds;
            g[ub + e.u] += ds + 2.0 * reg * self.user_bias[e.u];
            g[tb + e.t] += ds + 2.0 * reg * self.tag_bias[e.t];
            for k in 0..d {
                let (p, q) = (self.user_vecs[e.u * d + k], self.tag_vecs[e.t * d + k]);
                g[uv + e.u * d + k] += ds * q + 2.0 * reg * p;
                g[tv + e.t * d + k] += ds * p + 2.0 * reg * q;
            }
        }
        g
    }

    /// One SGD step on a single interaction followed by the proximal L2 step.
    pub(crate) fn sgd_step(&mut self, e: &Example, lr: f64, reg: f64) {
        let d = self.dim;
        let s = sigmoid(self.index_score(e.u, e.t));
        let ds = 2.0 * e.w * (s - e.y) * s * (1.0 - s);
        let shrink = 1.0 / (1.0 + 2.0 * lr * reg);
        self.global_bias -= lr * ds;
        self.user_bias[e.u] = (self.user_bias[e.u] - lr * ds) * shrink;
        self.tag_bias[e.t] = (self.tag_bias[e.t] - lr * ds) * shrink;
        for k in 0..d {
            let p = self.user_vecs[e.u * d + k];
            let q = self.tag_vecs[e.t * d + k];
            self.user_vecs[e.u * d + k] = (p - lr * ds * q) * shrink;
            self.tag_vecs[e.t * d + k] = (q - lr * ds * p) * shrink;
        }
    }

    pub(crate) fn copy_user_row_from(&mut self, other: &FactorModel, u: usize) {
        let d = self.dim;
        self.user_bias[u] = other.user_bias[u];
        self.user_vecs[u * d..(u + 1) * d].copy_from_slice(&other.user_vecs[u * d..(u + 1) * d]);
    }

    pub(crate) fn all_finite(&self) -> bool {
        self.params().iter().all(|x| x.is_finite())
    }
}

/// Visiting order of epoch `epoch`: a keyed shuffle of `0..n`.
pub(crate) fn epoch_order(n: usize, seed: u64, epoch: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = keyed(seed, Domain::Training, 2, epoch as u64);
    order.shuffle(&mut rng);
    order
}

pub(crate) fn check_data(data: &[Interaction]) -> Result<(), BaselineError> {
    if data.is_empty() {
        return Err(BaselineError::EmptyData);
    }
    data.iter().try_for_each(Interaction::check)
}

pub(crate) fn check_objective(objective: f64, epoch: usize, hyper: &Hyper) -> Result<(), BaselineError> {
    if objective.is_finite() {
        Ok(())
    } else {
        Err(BaselineError::Divergence {
            epoch,
            objective,
            lr: hyper.lr / 10.0,
        })
    }
}

fn average_into(model: &mut FactorModel, copies: &[FactorModel]) {
    let n = copies.len() as f64;
    let mut acc = vec![0.0; model.params().len()];
    for c in copies {
        for (a, x) in acc.iter_mut().zip(c.params()) {
            *a += x / n;
        }
    }
    model.set_params(&acc);
}

/// Trains from `model`'s current state.
pub(crate) fn train_from(
    mut model: FactorModel,
    data: &[Interaction],
    hyper: &Hyper,
) -> Result<(FactorModel, TrainLog), BaselineError> {
    let ex = model.examples(data);
    let mut log = TrainLog {
        objective: vec![model.objective_ex(&ex, hyper.reg)],
    };
    for epoch in 0..hyper.epochs {
        let order = epoch_order(ex.len(), hyper.seed, epoch);
        if hyper.threads <= 1 {
            for &i in &order {
                model.sgd_step(&ex[i], hyper.lr, hyper.reg);
            }
        } else {
            let chunk = order.len().div_ceil(hyper.threads);
            let copies: Vec<FactorModel> = order
                .par_chunks(chunk)
                .map(|shard| {
                    let mut m = model.clone();
                    for &i in shard {
                        m.sgd_step(&ex[i], hyper.lr, hyper.reg);
                    }
                    m
                })
                .collect();
            average_into(&mut model, &copies);
        }
        let obj = model.objective_ex(&ex, hyper.reg);
        check_objective(obj, epoch + 1, hyper)?;
        if !model.all_finite() {
            return Err(BaselineError::Divergence {
                epoch: epoch + 1,
                objective: obj,
                lr: hyper.lr / 10.0,
            });
        }
        log::debug!("epoch {} objective {obj:.6}", epoch + 1);
        log.objective.push(obj);
    }
    Ok((model, log))
}

/// Plain matrix factorization on `data` with the interactions' own weights.
pub fn mf_train(data: &[Interaction], hyper: &Hyper) -> Result<(FactorModel, TrainLog), BaselineError> {
    check_data(data)?;
    train_from(FactorModel::for_data(data, hyper), data, hyper)
}

/// Seed of run `run` derived from a base seed.
pub fn run_seed(seed: u64, run: usize) -> u64 {
    mix(&[seed, run as u64])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Vec<Interaction> {
        vec![
            Interaction::new(0, 0, 1),
            Interaction::new(0, 1, 0),
            Interaction::new(1, 0, 1),
            Interaction::new(1, 2, 0),
            Interaction::new(2, 1, 1),
        ]
    }

    #[test]
    fn squash_of_zero_is_half_and_unknowns_fall_back_to_biases() {
        let mut m = FactorModel::init(2, [0], [0], 0.5, 0.0, 1);
        assert_eq!(m.predict(0, 0), 0.5);
        m.global_bias = 0.3;
        m.tag_bias[0] = 0.4;
        assert!((m.predict(99, 0) - sigmoid(0.7)).abs() < 1e-15);
        assert!((m.predict(99, 99) - sigmoid(0.3)).abs() < 1e-15);
    }

    #[test]
    fn prediction_is_monotone_in_the_inner_product() {
        let mut m = FactorModel::init(1, [0], [0], 0.5, 0.0, 1);
        m.tag_vecs[0] = 1.0;
        let mut last = 0.0;
        for k in -5..=5 {
            m.user_vecs[0] = f64::from(k);
            let p = m.predict(0, 0);
            assert!(p > last && (0.0..=1.0).contains(&p));
            last = p;
        }
    }

    #[test]
    fn single_positive_is_learned() {
        let data = [Interaction::new(3, 7, 1)];
        let hyper = Hyper {
            lr: 0.5,
            reg: 0.0,
            epochs: 2000,
            ..Hyper::default()
        };
        let (m, _) = mf_train(&data, &hyper).unwrap();
        assert!(m.predict(3, 7) >= 0.95, "{}", m.predict(3, 7));
    }

    #[test]
    fn huge_reg_predicts_the_base_rate() {
        let data = tiny();
        let hyper = Hyper {
            reg: 1e9,
            lr: 0.005,
            epochs: 300,
            ..Hyper::default()
        };
        let (m, _) = mf_train(&data, &hyper).unwrap();
        for i in &data {
            assert!(
                (m.predict(i.user, i.tag) - 0.6).abs() < 1e-3,
                "{}",
                m.predict(i.user, i.tag)
            );
        }
    }

    #[test]
    fn small_lr_decreases_the_objective() {
        let hyper = Hyper {
            lr: 0.01,
            epochs: 50,
            ..Hyper::default()
        };
        let (_, log) = mf_train(&tiny(), &hyper).unwrap();
        assert!(
            log.objective.windows(2).all(|w| w[1] <= w[0] + 1e-12),
            "{:?}",
            log.objective
        );
    }

    #[test]
    fn deterministic_under_fixed_seed() {
        let h = Hyper::default();
        let (a, _) = mf_train(&tiny(), &h).unwrap();
        let (b, _) = mf_train(&tiny(), &h).unwrap();
        assert_eq!(a.params(), b.params());
    }

    #[test]
    fn sharded_training_runs() {
        let h = Hyper {
            threads: 3,
            ..Hyper::default()
        };
        let (m, log) = mf_train(&tiny(), &h).unwrap();
        assert!(m.all_finite());
        assert!(log.objective.last().unwrap() < &log.objective[0]);
    }

    #[test]
    fn empty_and_malformed_data_rejected() {
        assert!(matches!(
            mf_train(&[], &Hyper::default()),
            Err(BaselineError::EmptyData)
        ));
        let mut bad = Interaction::new(0, 0, 1);
        bad.weight = 0.0;
        assert!(mf_train(&[bad], &Hyper::default()).is_err());
        bad.weight = 1.0;
        bad.label = 2;
        assert!(mf_train(&[bad], &Hyper::default()).is_err());
    }

    #[test]
    fn huge_lr_reports_divergence() {
        let mut data = tiny();
        for i in &mut data {
            i.weight = 1e300;
        }
        let h = Hyper {
            lr: 1e10,
            ..Hyper::default()
        };
        assert!(matches!(mf_train(&data, &h), Err(BaselineError::Divergence { .. })));
    }
}
