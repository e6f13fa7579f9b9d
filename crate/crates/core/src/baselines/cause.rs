//! CausE: a control model on the biased set and a treatment model on the
//! unbiased set, trained together with a penalty
//! `tie_reg · Σ_t |q_t^c − q_t^t|²` pulling their tag embeddings together.
//!
//! Both models cover the union of users and tags. With `share_users` the user
//! rows are kept identical across the two models. The tie penalty is applied
//! as an exact proximal step after every update of a tag row and once over
//! all tags at the end of each epoch.

use serde::{Deserialize, Serialize};

use super::mf::{base_rate, check_data, check_objective, epoch_order, FactorModel, Hyper, TrainLog};
use super::{BaselineError, Interaction};
use crate::rng::mix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CauseHyper {
    #[serde(flatten)]
    pub base: Hyper,
    pub tie_reg: f64,
    pub share_users: bool,
}

impl Default for CauseHyper {
    fn default() -> Self {
        CauseHyper {
            base: Hyper::default(),
            tie_reg: 1.0,
            share_users: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CauseModel {
    pub control: FactorModel,
    /// The model used for prediction.
    pub treatment: FactorModel,
}

impl CauseModel {
    pub fn tie_penalty(&self) -> f64 {
        self.control
            .tag_vecs
            .iter()
            .zip(&self.treatment.tag_vecs)
            .map(|(a, b)| (a - b).powi(2))
            .sum()
    }

    /// Largest Euclidean distance between a tag's two embeddings.
    pub fn max_tag_distance(&self) -> f64 {
        let d = self.control.dim.max(1);
        self.control
            .tag_vecs
            .chunks(d)
            .zip(self.treatment.tag_vecs.chunks(d))
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    fn tie_prox(&mut self, t: usize, lr: f64, tie_reg: f64) {
        let d = self.control.dim;
        let shrink = 1.0 / (1.0 + 4.0 * lr * tie_reg);
        for k in t * d..(t + 1) * d {
            let (a, b) = (self.control.tag_vecs[k], self.treatment.tag_vecs[k]);
            let (mid, half) = ((a + b) / 2.0, (a - b) / 2.0 * shrink);
            self.control.tag_vecs[k] = mid + half;
            self.treatment.tag_vecs[k] = mid - half;
        }
    }
}

/// Interleaves two visiting orders by relative position in their epochs.
fn merge_orders(control: &[usize], treatment: &[usize]) -> Vec<(bool, usize)> {
    let pos = |i: usize, n: usize| (2 * i + 1) as u128 * 1_000_000_007 / (2 * n) as u128;
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(control.len() + treatment.len());
    while i < control.len() || j < treatment.len() {
        let take_control =
            j == treatment.len() || (i < control.len() && pos(i, control.len()) <= pos(j, treatment.len()));
        if take_control {
            out.push((false, control[i]));
            i += 1;
        } else {
            out.push((true, treatment[j]));
            j += 1;
        }
    }
    out
}

/// The treatment model follows exactly the visiting order `mf_train` would use
/// on the unbiased set with the same seed.
pub fn cause_train(
    biased: &[Interaction],
    unbiased: &[Interaction],
    hyper: &CauseHyper,
) -> Result<(CauseModel, TrainLog), BaselineError> {
    check_data(biased)?;
    if unbiased.is_empty() {
        return Err(BaselineError::EmptyUnbiased);
    }
    check_data(unbiased)?;
    let h = &hyper.base;
    let users = || biased.iter().chain(unbiased).map(|i| i.user);
    let tags = || biased.iter().chain(unbiased).map(|i| i.tag);
    let init = |rate| FactorModel::init(h.dim, users(), tags(), rate, h.init_std, h.seed);
    let mut model = CauseModel {
        control: init(base_rate(biased)),
        treatment: init(base_rate(unbiased)),
    };
    let ex_c = model.control.examples(biased);
    let ex_t = model.treatment.examples(unbiased);
    let control_seed = mix(&[h.seed, 0xC0_47_01]);

    let objective = |m: &CauseModel| {
        m.control.objective_ex(&ex_c, h.reg) + m.treatment.objective_ex(&ex_t, h.reg) + hyper.tie_reg * m.tie_penalty()
    };
    let mut log = TrainLog {
        objective: vec![objective(&model)],
    };
    for epoch in 0..h.epochs {
        let oc = epoch_order(ex_c.len(), control_seed, epoch);
        let ot = epoch_order(ex_t.len(), h.seed, epoch);
        for (is_treatment, i) in merge_orders(&oc, &ot) {
            let e = if is_treatment { &ex_t[i] } else { &ex_c[i] };
            let (stepped, other) = if is_treatment {
                (&mut model.treatment, &mut model.control)
            } else {
                (&mut model.control, &mut model.treatment)
            };
            stepped.sgd_step(e, h.lr, h.reg);
            if hyper.share_users {
                other.copy_user_row_from(stepped, e.u);
            }
            if hyper.tie_reg > 0.0 {
                model.tie_prox(e.t, h.lr, hyper.tie_reg);
            }
        }
        if hyper.tie_reg > 0.0 {
            for t in 0..model.control.n_tags() {
                model.tie_prox(t, h.lr, hyper.tie_reg);
            }
        }
        let obj = objective(&model);
        check_objective(obj, epoch + 1, h)?;
        log.objective.push(obj);
    }
    Ok((model, log))
}
