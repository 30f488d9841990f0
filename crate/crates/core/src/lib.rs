//! Exact and randomized solvers for induced, acyclic and (c-)disconnected
//! matching on graphs of bounded treewidth, with brute-force oracles and a
//! Hitting Set reduction used as an instance generator.

pub mod acyclic;
pub mod cdisc;
pub mod certificate;
pub mod decomp;
pub mod error;
pub mod generate;
pub mod graph;
pub mod induced;
pub mod oracle;
pub mod par;
pub mod reduction;
pub mod semiring;
mod table;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use graph::{classify_matching, parse_graph, write_gr, write_graph, Graph, Matching, MatchingClass, Vertex};

/// How join nodes combine their children's tables.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JoinMode {
    /// Enumerate every compatible pair of child states.
    Naive,
    /// Subset convolution over the saturated part of the bag.
    #[default]
    #[serde(rename = "conv")]
    Convolution,
}
