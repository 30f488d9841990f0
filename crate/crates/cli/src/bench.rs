use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use twmatch_core::decomp::{
    grid_branched_decomposition, grid_path_decomposition, make_nice_deferred, min_fill_decompose, TreeDecomposition,
};
use twmatch_core::generate::{gnp, grid};
use twmatch_core::{Graph, JoinMode};

use crate::solve::decide;
use crate::Problem;

/// A TOML suite: `[[grid]]` and `[[random]]` tables, each run once per
/// join mode and repeated `repeats` times (the fastest run is kept).
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "one")]
    pub repeats: usize,
    #[serde(default)]
    pub grid: Vec<GridSpec>,
    #[serde(default)]
    pub random: Vec<RandomSpec>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct GridSpec {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub decomposition: GridDecomposition,
    #[serde(flatten)]
    pub task: Task,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridDecomposition {
    /// Column sweep with a leaf branch per bag.
    #[default]
    Branched,
    Path,
    Minfill,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RandomSpec {
    pub n: usize,
    pub p: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub count: usize,
    #[serde(flatten)]
    pub task: Task,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Task {
    #[serde(default = "induced")]
    pub problem: Problem,
    #[serde(default = "one")]
    pub ell: usize,
    pub c: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
}

fn one() -> usize {
    1
}

fn induced() -> Problem {
    Problem::Induced
}

fn default_trials() -> usize {
    twmatch_core::acyclic::DEFAULT_TRIALS
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub problem: String,
    pub join_mode: String,
    pub wall_time: f64,
    pub width: usize,
    pub answer: bool,
    pub value: Option<i64>,
}

struct Instance {
    name: String,
    graph: Graph,
    td: TreeDecomposition,
    task: Task,
}

fn instances(suite: &SuiteConfig) -> Vec<Instance> {
    let mut out = Vec::new();
    for spec in &suite.grid {
        let graph = grid(spec.rows, spec.cols);
        let td = match spec.decomposition {
            GridDecomposition::Branched => grid_branched_decomposition(spec.rows, spec.cols),
            GridDecomposition::Path => grid_path_decomposition(spec.rows, spec.cols),
            GridDecomposition::Minfill => min_fill_decompose(&graph),
        };
        out.push(Instance {
            name: format!("grid{}x{}", spec.rows, spec.cols),
            graph,
            td,
            task: spec.task.clone(),
        });
    }
    for spec in &suite.random {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        for i in 0..spec.count {
            let graph = gnp(spec.n, spec.p, &mut rng);
            let td = min_fill_decompose(&graph);
            out.push(Instance {
                name: format!("gnp{}_p{}_s{}_{}", spec.n, spec.p, spec.seed, i),
                graph,
                td,
                task: spec.task.clone(),
            });
        }
    }
    out
}

/// Runs every instance in both join modes. Differing answers between the
/// modes are a correctness bug and abort the suite.
pub fn run_suite(suite: &SuiteConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for inst in instances(suite) {
        let nd = make_nice_deferred(&inst.graph, &inst.td).with_context(|| inst.name.clone())?;
        let t = &inst.task;
        let mut first: Option<(bool, Option<i64>)> = None;
        for (mode, tag) in [(JoinMode::Naive, "naive"), (JoinMode::Convolution, "conv")] {
            let mut best = f64::INFINITY;
            let mut result = None;
            for _ in 0..suite.repeats.max(1) {
                let start = Instant::now();
                let r = decide(t.problem, &inst.graph, &nd, t.ell, t.c, t.seed, t.trials, mode)
                    .with_context(|| format!("{} ({tag})", inst.name))?;
                best = best.min(start.elapsed().as_secs_f64());
                result = Some((r.answer, r.value));
            }
            let result = result.unwrap();
            match first {
                None => first = Some(result),
                Some(prev) if prev != result => {
                    bail!("join modes disagree on {}: naive {prev:?}, conv {result:?}", inst.name)
                }
                Some(_) => {}
            }
            rows.push(BenchRow {
                instance: inst.name.clone(),
                problem: t.problem.tag().to_string(),
                join_mode: tag.to_string(),
                wall_time: best,
                width: inst.td.width(),
                answer: result.0,
                value: result.1,
            });
        }
    }
    Ok(rows)
}

/// Writes `rows` with a header; no rows gives an empty file.
pub fn write_csv(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults() {
        let suite: SuiteConfig = toml::from_str("[[grid]]\nrows = 2\ncols = 3\n").unwrap();
        assert_eq!(suite.repeats, 1);
        assert_eq!(suite.grid[0].decomposition, GridDecomposition::Branched);
        assert_eq!(suite.grid[0].task.problem, Problem::Induced);
        assert!(toml::from_str::<SuiteConfig>("[[grid]]\nrows = 2\n").is_err());
        assert!(toml::from_str::<SuiteConfig>("speed = 2\n").is_err());
        assert!(run_suite(&SuiteConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn modes_agree_on_small_suite() {
        let text = r#"
            [[grid]]
            rows = 3
            cols = 4
            [[grid]]
            rows = 2
            cols = 4
            problem = "cdisc"
            c = 2
            decomposition = "path"
            [[random]]
            n = 9
            p = 0.3
            count = 2
            problem = "acyclic"
            ell = 2
        "#;
        let rows = run_suite(&toml::from_str(text).unwrap()).unwrap();
        assert_eq!(rows.len(), 8);
        let mu = twmatch_core::oracle::brute_matching_numbers(&grid(3, 4), 1)
            .unwrap()
            .mu_induced;
        assert_eq!(rows[0].value, Some(2 * mu as i64));
        assert!(rows
            .chunks(2)
            .all(|p| p[0].value == p[1].value && p[0].join_mode == "naive"));
    }
}
