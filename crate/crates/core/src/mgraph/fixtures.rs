//! The three reference m-graphs: the user/item/outcome example, the simple
//! rating model, and the full causal-tag-and-rating generator graph.

use std::fmt;
use std::str::FromStr;

use super::{GraphError, MGraph, NodeRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    /// User `U` and item `I` cause outcome `Y`; `I` also drives `R_Y`.
    Fig2,
    /// Rating model with tags and a movie-driven rating indicator; no proxy.
    Fig3,
    /// Full CTAR data-generating graph.
    Fig4,
}

impl FromStr for Fixture {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fig2" => Ok(Fixture::Fig2),
            "fig3" => Ok(Fixture::Fig3),
            "fig4" => Ok(Fixture::Fig4),
            _ => Err(GraphError::UnknownFixture(s.to_string())),
        }
    }
}

impl fmt::Display for Fixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fixture::Fig2 => "fig2",
            Fixture::Fig3 => "fig3",
            Fixture::Fig4 => "fig4",
        })
    }
}

pub fn fixture(which: Fixture) -> MGraph {
    use NodeRole::*;
    let b = match which {
        Fixture::Fig2 => MGraph::builder()
            .node("U", FullyObserved)
            .node("I", FullyObserved)
            .node("Y", PartiallyObserved)
            .node("R_Y", MissingIndicator)
            .node("Y*", Proxy)
            .edge("U", "Y")
            .edge("I", "Y")
            .edge("I", "R_Y")
            .edge("Y", "Y*")
            .edge("R_Y", "Y*")
            .proxy("R_Y", "Y"),
        Fixture::Fig3 => MGraph::builder()
            .node("U", FullyObserved)
            .node("M", FullyObserved)
            .node("T_M", FullyObserved)
            .node("R", PartiallyObserved)
            .node("R_R", MissingIndicator)
            .edge("M", "T_M")
            .edge("U", "R")
            .edge("T_M", "R")
            .edge("M", "R_R")
            .proxy("R_R", "R"),
        Fixture::Fig4 => MGraph::builder()
            .node("U", FullyObserved)
            .node("M", FullyObserved)
            .node("T_M", FullyObserved)
            .node("T_U", Unobserved)
            .node("T_L", PartiallyObserved)
            .node("Q", Unobserved)
            .node("RecSys", Unobserved)
            .node("R", PartiallyObserved)
            .node("R_RCT", MissingIndicator)
            .node("R_R", MissingIndicator)
            .node("R_O", MissingIndicator)
            .node("RCT*", Proxy)
            .node("O*", Proxy)
            .node("R*", Proxy)
            .edge("M", "T_M")
            .edge("M", "Q")
            .edge("U", "T_U")
            .edge("T_M", "T_L")
            .edge("T_U", "T_L")
            .edge("T_L", "R")
            .edge("Q", "R")
            .edge("M", "RecSys")
            .edge("RecSys", "R_R")
            .edge("T_L", "R_O")
            .edge("T_L", "RCT*")
            .edge("R_RCT", "RCT*")
            .edge("T_L", "O*")
            .edge("R_O", "O*")
            .edge("R", "R*")
            .edge("R_R", "R*")
            .proxy("R_R", "R")
            .proxy("R_RCT", "T_L")
            .proxy("R_O", "T_L"),
    };
    b.build().expect("fixture graphs are valid")
}
