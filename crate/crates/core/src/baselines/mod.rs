//! Reference user-tag preference models: matrix factorization, its
//! inverse-propensity-weighted variant, and CausE.

pub mod cause;
pub mod checkpoint;
pub mod ips;
pub mod labels;
pub mod mf;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::TagId;

pub use cause::{cause_train, CauseHyper, CauseModel};
pub use ips::{mf_ips_train, nb_propensity, PropensityTable};
pub use labels::derive_training_labels;
pub use mf::{mf_train, FactorModel, Hyper, TrainLog};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("no training interactions")]
    EmptyData,
    #[error("the unbiased set is empty")]
    EmptyUnbiased,
    #[error("the unbiased set has no label-{0} interactions")]
    MissingLabel(u8),
    #[error("training diverged at epoch {epoch} (objective {objective}); try a learning rate below {lr}")]
    Divergence { epoch: usize, objective: f64, lr: f64 },
    #[error("movie {movie} is not in the movie file")]
    UnknownMovie { movie: u32 },
    #[error("row ({user}, {movie}, {tag}): tag is not one of the movie's tags")]
    TagNotInMovie { user: u32, movie: u32, tag: i64 },
    #[error("interaction ({user}, {tag}): {reason}")]
    BadInteraction {
        user: u32,
        tag: TagId,
        reason: &'static str,
    },
    #[error("checkpoint line {line}: {message}")]
    Checkpoint { line: usize, message: String },
    #[error("unknown model `{0}` (expected mf, mf-ips or cause)")]
    UnknownModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One (user, tag) training example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interaction {
    pub user: u32,
    pub tag: TagId,
    /// 1 = likes the tag.
    pub label: u8,
    pub weight: f64,
}

impl Interaction {
    pub fn new(user: u32, tag: TagId, label: u8) -> Self {
        Interaction {
            user,
            tag,
            label,
            weight: 1.0,
        }
    }

    pub fn y(&self) -> f64 {
        f64::from(self.label)
    }

    pub(crate) fn check(&self) -> Result<(), BaselineError> {
        let bad = |reason| {
            Err(BaselineError::BadInteraction {
                user: self.user,
                tag: self.tag,
                reason,
            })
        };
        if self.label > 1 {
            return bad("label must be 0 or 1");
        }
        if !(self.weight.is_finite() && self.weight > 0.0) {
            return bad("weight must be finite and positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    #[serde(rename = "mf")]
    Mf,
    #[serde(rename = "mf-ips")]
    MfIps,
    #[serde(rename = "cause")]
    Cause,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Mf, ModelKind::MfIps, ModelKind::Cause];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mf => "mf",
            ModelKind::MfIps => "mf-ips",
            ModelKind::Cause => "cause",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = BaselineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mf" => Ok(ModelKind::Mf),
            "mf-ips" => Ok(ModelKind::MfIps),
            "cause" => Ok(ModelKind::Cause),
            other => Err(BaselineError::UnknownModel(other.to_string())),
        }
    }
}

/// Fits `kind` on the derived label sets. `n_slots` is the candidate
/// (user, tag) count used by the propensity model.
pub fn train_model(
    kind: ModelKind,
    biased: &[Interaction],
    unbiased: &[Interaction],
    n_slots: usize,
    hyper: &CauseHyper,
) -> Result<FactorModel, BaselineError> {
    match kind {
        ModelKind::Mf => Ok(mf_train(biased, &hyper.base)?.0),
        ModelKind::MfIps => {
            let table = nb_propensity(biased, unbiased, n_slots)?;
            Ok(mf_ips_train(biased, &table, &hyper.base)?.0)
        }
        ModelKind::Cause => Ok(cause_train(biased, unbiased, hyper)?.0.treatment),
    }
}
