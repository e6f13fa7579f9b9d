//! Graphical MCAR / MAR / MNAR classification of missing indicators.
//!
//! Proxy nodes are dropped before any test. An unobserved node whose only
//! descendants are missing indicators (for example the recommender node that
//! drives rating exposure) is treated as exogenous noise of those indicators
//! and is left out of the tested variable set.

use std::fmt;

use super::{GraphError, MGraph, NodeRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MissingnessClass {
    Mcar,
    Mar,
    Mnar,
}

impl fmt::Display for MissingnessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MissingnessClass::Mcar => "MCAR",
            MissingnessClass::Mar => "MAR",
            MissingnessClass::Mnar => "MNAR",
        })
    }
}

impl MGraph {
    /// Classifies a single indicator. The other indicators are neither tested
    /// nor conditioned on.
    pub fn classify_missingness(&self, indicator: &str) -> Result<MissingnessClass, GraphError> {
        if self.role(indicator)? != NodeRole::MissingIndicator {
            return Err(GraphError::NotIndicator(indicator.to_string()));
        }
        let h = self.without_proxies();
        let r = h.idx(indicator)?;
        Ok(h.classify_against(&[r]))
    }

    /// Classifies the whole indicator set `R` jointly.
    pub fn classify_indicator_set(&self) -> MissingnessClass {
        let h = self.without_proxies();
        let rs: Vec<usize> = (0..h.len())
            .filter(|&i| h.roles[i] == NodeRole::MissingIndicator)
            .collect();
        h.classify_against(&rs)
    }

    /// Per-indicator classification in declaration order.
    pub fn classify_all(&self) -> Vec<(String, MissingnessClass)> {
        self.indicators()
            .map(|r| {
                let class = self
                    .classify_missingness(r)
                    .expect("indicators() yields indicator nodes");
                (r.to_string(), class)
            })
            .collect()
    }

    fn classify_against(&self, rs: &[usize]) -> MissingnessClass {
        let private = self.indicator_private_nodes();
        let pick = |want: &[NodeRole]| -> Vec<usize> {
            (0..self.len())
                .filter(|&i| want.contains(&self.roles[i]) && !private[i])
                .collect()
        };
        let everything = pick(&[
            NodeRole::FullyObserved,
            NodeRole::PartiallyObserved,
            NodeRole::Unobserved,
        ]);
        if self.d_separated_idx(&everything, rs, &[]) {
            return MissingnessClass::Mcar;
        }
        let hidden = pick(&[NodeRole::PartiallyObserved, NodeRole::Unobserved]);
        let observed = pick(&[NodeRole::FullyObserved]);
        if self.d_separated_idx(&hidden, rs, &observed) {
            MissingnessClass::Mar
        } else {
            MissingnessClass::Mnar
        }
    }

    /// Unobserved nodes all of whose descendants are missing indicators.
    fn indicator_private_nodes(&self) -> Vec<bool> {
        let mut private = vec![false; self.len()];
        // Reverse topological order: children are settled first.
        let mut only_indicators_below = vec![true; self.len()];
        for &v in self.order.iter().rev() {
            only_indicators_below[v] = self.children[v]
                .iter()
                .all(|&c| self.roles[c] == NodeRole::MissingIndicator && only_indicators_below[c]);
            private[v] = self.roles[v] == NodeRole::Unobserved && only_indicators_below[v];
        }
        private
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mgraph::{fixture, Fixture};

    #[test]
    fn fig4_classes() {
        let g = fixture(Fixture::Fig4);
        assert_eq!(g.classify_missingness("R_RCT").unwrap(), MissingnessClass::Mcar);
        assert_eq!(g.classify_missingness("R_R").unwrap(), MissingnessClass::Mar);
        assert_eq!(g.classify_missingness("R_O").unwrap(), MissingnessClass::Mnar);
        assert_eq!(g.classify_indicator_set(), MissingnessClass::Mnar);
    }

    #[test]
    fn fig3_is_mar() {
        let g = fixture(Fixture::Fig3);
        assert_eq!(g.classify_missingness("R_R").unwrap(), MissingnessClass::Mar);
    }

    #[test]
    fn fig2_is_mar() {
        let g = fixture(Fixture::Fig2);
        assert_eq!(g.classify_missingness("R_Y").unwrap(), MissingnessClass::Mar);
    }

    #[test]
    fn edgeless_indicator_is_mcar() {
        let g = MGraph::builder()
            .node("X", NodeRole::PartiallyObserved)
            .node("A", NodeRole::FullyObserved)
            .node("R_X", NodeRole::MissingIndicator)
            .edge("A", "X")
            .proxy("R_X", "X")
            .build()
            .unwrap();
        assert_eq!(g.classify_missingness("R_X").unwrap(), MissingnessClass::Mcar);
    }

    #[test]
    fn latent_parent_shared_with_data_is_mnar() {
        let g = MGraph::builder()
            .node("X", NodeRole::PartiallyObserved)
            .node("L", NodeRole::Unobserved)
            .node("R_X", NodeRole::MissingIndicator)
            .edge("L", "X")
            .edge("L", "R_X")
            .proxy("R_X", "X")
            .build()
            .unwrap();
        assert_eq!(g.classify_missingness("R_X").unwrap(), MissingnessClass::Mnar);
    }

    #[test]
    fn rejects_non_indicator() {
        let g = fixture(Fixture::Fig4);
        assert_eq!(
            g.classify_missingness("T_L").unwrap_err(),
            GraphError::NotIndicator("T_L".into())
        );
    }
}
