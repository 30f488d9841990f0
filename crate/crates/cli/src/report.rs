use serde::{Deserialize, Serialize};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Result of one `solve` invocation. Everything except `wall_time` is a
/// function of the command line and the input files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub problem: String,
    pub ell: usize,
    pub c: Option<usize>,
    pub answer: bool,
    /// Saturated vertices of the best matching found (twice its size);
    /// `None` stands for minus infinity. The randomized acyclic decision
    /// only certifies `2 ell` on a yes.
    pub value: Option<i64>,
    pub width_used: usize,
    /// Whether `width_used` came from the min-fill heuristic.
    pub heuristic_decomposition: bool,
    pub node_count: usize,
    pub join: String,
    pub seed: u64,
    pub trials: usize,
    /// Acyclic only: `(trial, B, W)` of the first odd root entry.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<(usize, usize, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<(u32, u32)>>,
    pub oracle_checked: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    pub wall_time: f64,
}

impl RunReport {
    /// The report with `wall_time` zeroed, for determinism comparisons.
    pub fn timeless(&self) -> Self {
        Self {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}
