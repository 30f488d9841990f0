use std::fs;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use twmatch_core::acyclic::{decide_acyclic, extract_acyclic_certificate};
use twmatch_core::cdisc::{solve_cdisc, solve_disconnected};
use twmatch_core::certificate::{perfect_matching, self_reduce};
use twmatch_core::decomp::{
    make_nice_deferred, min_fill_decompose, nice_min_fill, parse_td, validate_td, NiceDecomposition,
};
use twmatch_core::induced::solve_induced;
use twmatch_core::oracle::{brute_matching_numbers, MAX_ORACLE_N};
use twmatch_core::semiring::{Ext, NEG_INF};
use twmatch_core::{classify_matching, Graph, JoinMode, Matching};

use crate::report::{RunReport, SCHEMA_VERSION};
use crate::{Problem, SolveArgs};

/// Largest input the `--check-oracle` cross-check runs on.
pub const ORACLE_CHECK_N: usize = 10;

pub struct Outcome {
    pub report: RunReport,
    /// Human-readable remarks for standard error.
    pub notes: Vec<String>,
}

pub(crate) struct Answer {
    pub answer: bool,
    pub value: Option<i64>,
    pub witness: Option<(usize, usize, usize)>,
}

fn finite(v: Ext) -> Option<i64> {
    (v != NEG_INF).then_some(v as i64)
}

pub fn solve(args: &SolveArgs, g: &Graph) -> Result<Outcome> {
    let n = g.n();
    let ell = args.ell;
    ensure!(
        ell >= 1 && 2 * ell <= n,
        "--ell must lie in 1..={} for n = {n}, got {ell}",
        n / 2
    );
    let c = match (args.problem, args.c) {
        (Problem::Cdisc | Problem::Disc, Some(c)) => Some(c),
        (Problem::Cdisc | Problem::Disc, None) => {
            bail!("--c is required for --problem {}", args.problem.tag())
        }
        (_, Some(_)) => bail!("--c only applies to cdisc and disc"),
        (_, None) => None,
    };
    let mode = JoinMode::from(args.join);
    let mut notes = Vec::new();
    let mut notice = None;

    let start = Instant::now();
    let (nd, width) = decomposition(args, g)?;
    let result = decide(args.problem, g, &nd, ell, c, args.seed, args.trials, mode)?;
    let wall_time = start.elapsed().as_secs_f64();

    if args.problem == Problem::Disc && c == Some(1) {
        let how = if n <= MAX_ORACLE_N {
            "the exhaustive oracle"
        } else {
            "the one-color table"
        };
        let text = format!("c = 1 is plain maximum matching, outside the treewidth DP; answered by {how}");
        notes.push(text.clone());
        notice = Some(text);
    }

    let oracle_checked = args.check_oracle && n <= ORACLE_CHECK_N;
    if oracle_checked {
        check_oracle(args.problem, g, ell, c, &result)?;
    } else if args.check_oracle {
        notes.push(format!("oracle check skipped: n = {n} exceeds {ORACLE_CHECK_N}"));
    }

    let certificate = if args.certificate && result.answer {
        let m = certify(args.problem, g, ell, c, args.seed, args.trials, mode)?;
        Some(m.edges().to_vec())
    } else {
        None
    };

    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        problem: args.problem.tag().to_string(),
        ell,
        c,
        answer: result.answer,
        value: result.value,
        width_used: width,
        heuristic_decomposition: args.td.is_none(),
        node_count: nd.len(),
        join: match mode {
            JoinMode::Naive => "naive",
            JoinMode::Convolution => "conv",
        }
        .to_string(),
        seed: args.seed,
        trials: args.trials,
        witness: result.witness,
        certificate,
        oracle_checked,
        notice,
        wall_time,
    };
    Ok(Outcome { report, notes })
}

fn decomposition(args: &SolveArgs, g: &Graph) -> Result<(NiceDecomposition, usize)> {
    let td = match &args.td {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let td = parse_td(&text).with_context(|| format!("parsing {}", path.display()))?;
            if let Some(v) = validate_td(g, &td)?.first() {
                bail!("invalid decomposition {}: {v}", path.display());
            }
            td
        }
        None => min_fill_decompose(g),
    };
    let nd = make_nice_deferred(g, &td)?;
    Ok((nd, td.width()))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn decide(
    problem: Problem,
    g: &Graph,
    nd: &NiceDecomposition,
    ell: usize,
    c: Option<usize>,
    seed: u64,
    trials: usize,
    mode: JoinMode,
) -> Result<Answer> {
    let exact = |answer, max_saturated| Answer {
        answer,
        value: finite(max_saturated),
        witness: None,
    };
    Ok(match problem {
        Problem::Induced => {
            let r = solve_induced(g, nd, ell, mode)?;
            exact(r.answer, r.max_saturated)
        }
        Problem::Cdisc => {
            let r = solve_cdisc(g, nd, c.unwrap_or(2), ell, mode)?;
            exact(r.answer, r.max_saturated)
        }
        Problem::Disc => {
            let r = solve_disconnected(g, nd, c.unwrap_or(1), ell, mode)?;
            exact(r.answer, r.max_saturated)
        }
        Problem::Acyclic => {
            ensure!(trials >= 1, "--trials must be at least 1");
            let d = decide_acyclic(g, nd, ell, seed, trials, mode)?;
            Answer {
                answer: d.answer,
                value: d.answer.then_some(2 * ell as i64),
                witness: d.witness,
            }
        }
    })
}

fn check_oracle(problem: Problem, g: &Graph, ell: usize, c: Option<usize>, got: &Answer) -> Result<()> {
    let report = brute_matching_numbers(g, c.unwrap_or(1))?;
    let twice = |mu: Option<usize>| mu.filter(|&m| m > 0).map(|m| 2 * m as i64);
    let (expected_answer, expected_value) = match problem {
        Problem::Induced => (report.mu_induced >= ell, Some(2 * report.mu_induced as i64)),
        Problem::Acyclic => {
            let yes = report.mu_acyclic >= ell;
            (yes, yes.then_some(2 * ell as i64))
        }
        Problem::Cdisc | Problem::Disc => {
            let mu = report.mu_cdiscon.get(&c.unwrap_or(1)).copied().flatten();
            (mu.is_some_and(|m| m >= ell), twice(mu))
        }
    };
    if got.answer != expected_answer || got.value != expected_value {
        let hint = if problem == Problem::Acyclic && expected_answer {
            " (a randomized false negative; rerun with more --trials)"
        } else {
            ""
        };
        bail!(
            "oracle mismatch for {}: solver answered {} with value {:?}, oracle says {} with value {:?}{hint}",
            problem.tag(),
            got.answer,
            got.value,
            expected_answer,
            expected_value
        );
    }
    Ok(())
}

/// A witness for a yes answer. Acyclic matchings come from the randomized
/// self-reduction in the core; the exact problems delete vertices while
/// the answer stays yes, after which the survivors are exactly the
/// saturated set of some solution and any perfect matching on them will do.
#[allow(clippy::too_many_arguments)]
fn certify(
    problem: Problem,
    g: &Graph,
    ell: usize,
    c: Option<usize>,
    seed: u64,
    trials: usize,
    mode: JoinMode,
) -> Result<Matching> {
    if problem == Problem::Acyclic {
        return Ok(extract_acyclic_certificate(g, ell, seed, trials)?);
    }
    let k = c.unwrap_or(1);
    let kept = self_reduce(g, |h| {
        if 2 * ell > h.n() || 2 * k > h.n() {
            return Ok(false);
        }
        let nd = nice_min_fill(h);
        Ok(match problem {
            Problem::Induced => solve_induced(h, &nd, ell, mode)?.answer,
            Problem::Cdisc => solve_cdisc(h, &nd, k, ell, mode)?.answer,
            _ => solve_disconnected(h, &nd, k, ell, mode)?.answer,
        })
    })?
    .context("certificate requested for a no instance")?;
    let (h, ids) = g.induced_subgraph(&kept);
    let m = perfect_matching(&h).context("self-reduction left a graph without a perfect matching")?;
    let m = Matching::new(m.edges().iter().map(|&(a, b)| (ids[a as usize], ids[b as usize])));
    let cls = classify_matching(g, &m, k)?;
    let ok = match problem {
        Problem::Induced => cls.is_induced,
        _ => cls.components >= k,
    };
    ensure!(
        cls.is_matching && ok && m.len() >= ell,
        "extracted matching fails verification"
    );
    Ok(m)
}
