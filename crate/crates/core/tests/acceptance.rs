//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs sequentially so the timing criterion is not
//! disturbed by the others.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twmatch_core::acyclic::{decide_acyclic, sample_weights};
use twmatch_core::cdisc::cdisc_root_value;
use twmatch_core::decomp::{
    grid_branched_decomposition, make_nice_deferred, min_fill_decompose, nice_min_fill, validate_nice, validate_td,
};
use twmatch_core::generate::{gnp, grid, unlabelled_connected};
use twmatch_core::induced::induced_root_value;
use twmatch_core::oracle::{
    brute_hitting_set, brute_matching_numbers, check_chains, cut_parity_table, has_disconnected_matching, Cell,
    OracleReport,
};
use twmatch_core::par;
use twmatch_core::reduction::{build_reduction, is_forward_witness, witness_from_hitting_set};
use twmatch_core::semiring::{convolve_maxsum, convolve_ring2, naive_convolve, Domain, Ext, SetFunction, NEG_INF};
use twmatch_core::{Graph, JoinMode};

type Outcome = Result<String, String>;

/// Node count bound `C (tw + 1) n` for nice decompositions.
const NICE_SIZE_FACTOR: usize = 4;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Corpus {
    graphs: Vec<Graph>,
    reports: Vec<OracleReport>,
    exhaustive: usize,
}

/// Connected graphs on up to 7 vertices, one per isomorphism class, and
/// 500 random graphs on up to 10 vertices.
fn corpus() -> Corpus {
    let mut graphs: Vec<Graph> = (1..=7).flat_map(unlabelled_connected).collect();
    let exhaustive = graphs.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    for _ in 0..500 {
        let n = rng.gen_range(1..=10);
        let p = rng.gen_range(0.1..0.5);
        graphs.push(gnp(n, p, &mut rng));
    }
    let reports = par::map_slice(&graphs, |g| brute_matching_numbers(g, 3).unwrap());
    Corpus {
        graphs,
        reports,
        exhaustive,
    }
}

fn first_failure(results: Vec<Result<(), String>>) -> Result<(), String> {
    results.into_iter().collect::<Result<Vec<()>, String>>().map(|_| ())
}

fn induced_equivalence(c: &Corpus) -> Outcome {
    let items: Vec<usize> = (0..c.graphs.len()).collect();
    first_failure(par::map_slice(&items, |&i| {
        let g = &c.graphs[i];
        let got = induced_root_value(&nice_min_fill(g), JoinMode::Convolution).map_err(|e| e.to_string())?;
        let want = 2 * c.reports[i].mu_induced as Ext;
        ensure(got == want, || {
            format!("graph {i} {:?}: dp {got}, oracle {want}", g.edges())
        })
    }))?;
    Ok(format!(
        "{} exhaustive + {} random graphs",
        c.exhaustive,
        c.graphs.len() - c.exhaustive
    ))
}

fn cdisc_equivalence(c: &Corpus) -> Outcome {
    let items: Vec<usize> = (0..c.graphs.len()).collect();
    let minus_inf: usize = par::map_slice(&items, |&i| {
        let g = &c.graphs[i];
        let nd = nice_min_fill(g);
        let mut none = 0;
        for comps in 2..=3 {
            if comps > g.n() {
                continue;
            }
            let got = cdisc_root_value(&nd, comps, JoinMode::Convolution);
            let want = c.reports[i].mu_cdiscon[&comps].map_or(NEG_INF, |m| 2 * m as Ext);
            if want == NEG_INF {
                none += 1;
            }
            if got != want {
                return Err(format!(
                    "graph {i} {:?}, c = {comps}: dp {got}, oracle {want}",
                    g.edges()
                ));
            }
        }
        Ok(none)
    })
    .into_iter()
    .collect::<Result<Vec<usize>, String>>()?
    .into_iter()
    .sum();
    Ok(format!(
        "{} graphs, c in {{2,3}}, {minus_inf} minus-infinity cases",
        c.graphs.len()
    ))
}

struct AcyclicInstance {
    graph: Graph,
    ell: usize,
    seed: u64,
}

/// Random sparse graphs with `ell` one above (no) or equal to (yes) the
/// acyclic matching number.
fn acyclic_instances(yes: bool, count: usize, seed: u64) -> Vec<AcyclicInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let n = rng.gen_range(4..=12);
        let g = gnp(n, rng.gen_range(0.15..0.4), &mut rng);
        let mu = brute_matching_numbers(&g, 1).unwrap().mu_acyclic;
        let ell = if yes { mu } else { mu + 1 };
        if ell == 0 || 2 * ell > n {
            continue;
        }
        out.push(AcyclicInstance {
            graph: g,
            ell,
            seed: rng.gen(),
        });
    }
    out
}

fn acyclic_soundness() -> Outcome {
    let inst = acyclic_instances(false, 500, 0xA0);
    let yes: usize = par::map_slice(&inst, |x| {
        let nd = nice_min_fill(&x.graph);
        decide_acyclic(&x.graph, &nd, x.ell, x.seed, 7, JoinMode::Convolution)
            .unwrap()
            .answer as usize
    })
    .into_iter()
    .sum();
    ensure(yes == 0, || format!("{yes} of 500 no-instances answered yes"))?;
    Ok("500 no-instances, 7 trials, 0 yes".into())
}

fn acyclic_completeness() -> Outcome {
    let inst = acyclic_instances(true, 300, 0xA1);
    let results = par::map_slice(&inst, |x| {
        let nd = nice_min_fill(&x.graph);
        let one = decide_acyclic(&x.graph, &nd, x.ell, x.seed, 1, JoinMode::Convolution)
            .unwrap()
            .answer;
        let seven = decide_acyclic(&x.graph, &nd, x.ell, x.seed ^ 0x5EED, 7, JoinMode::Convolution)
            .unwrap()
            .answer;
        (one as usize, seven as usize)
    });
    let single: usize = results.iter().map(|r| r.0).sum();
    let seven: usize = results.iter().map(|r| r.1).sum();
    let rate = single as f64 / 300.0;
    ensure(rate >= 0.55 && seven >= 299, || {
        format!("single-trial rate {rate:.3}, {seven}/300 with 7 trials")
    })?;
    Ok(format!("single-trial rate {rate:.3}, {seven}/300 with 7 trials"))
}

fn parity_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x62);
    let mut checked = 0usize;
    for gi in 0..100 {
        let n = rng.gen_range(1..=6);
        let g = gnp(n, rng.gen_range(0.2..0.8), &mut rng);
        for t in 0..3 {
            let w = sample_weights(n, rng.gen());
            let table = cut_parity_table(&g, &w).map_err(|e| e.to_string())?;
            for (&(a, b, c, weight), counts) in &table {
                if c + b > a {
                    continue;
                }
                checked += 1;
                ensure(counts.c_count % 2 == counts.s_count % 2, || {
                    format!(
                        "graph {gi} {:?}, weights {t}, key ({a},{b},{c},{weight}): {counts:?}",
                        g.edges()
                    )
                })?;
            }
        }
    }
    Ok(format!("100 graphs x 3 weightings, {checked} keys with C <= A - B"))
}

fn all_functions(u: usize, alphabet: &[Ext]) -> Vec<Vec<Ext>> {
    let size = 1 << u;
    let total = alphabet.len().pow(size as u32);
    (0..total)
        .map(|mut code| {
            (0..size)
                .map(|_| {
                    let v = alphabet[code % alphabet.len()];
                    code /= alphabet.len();
                    v
                })
                .collect()
        })
        .collect()
}

fn convolution_correctness() -> Outcome {
    let ring = |u: usize, v: Vec<Ext>| SetFunction::new(Domain::Ring2, u, v).unwrap();
    let maxsum = |u: usize, v: Vec<Ext>| SetFunction::new(Domain::MaxSum, u, v).unwrap();
    let check = |f: &SetFunction, g: &SetFunction| -> Result<(), String> {
        let fast = match f.domain() {
            Domain::Ring2 => convolve_ring2(f, g),
            Domain::MaxSum => convolve_maxsum(f, g, 1 << 20),
        }
        .map_err(|e| e.to_string())?;
        let slow = naive_convolve(f, g).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("{:?} * {:?}", f.values(), g.values()))
    };
    let mut pairs = 0usize;
    // GF(2): every pair for u <= 3; all basis pairs for u = 4, which by
    // bilinearity covers every pair.
    for u in 0..=3 {
        let fs = all_functions(u, &[0, 1]);
        for f in &fs {
            for g in &fs {
                check(&ring(u, f.clone()), &ring(u, g.clone()))?;
                pairs += 1;
            }
        }
    }
    for u in 0..=4 {
        let basis = |a: usize| ring(u, (0..1 << u).map(|s| (s == a) as Ext).collect());
        for a in 0..1 << u {
            for b in 0..1 << u {
                check(&basis(a), &basis(b))?;
                pairs += 1;
            }
        }
    }
    // Max-sum: every pair over {-inf, 0, 1, 2} for u <= 2; for u = 3 every
    // such f against 16 fixed g; for u = 4 every f over {-inf, 0} against
    // 16 fixed g.
    let alphabet = [NEG_INF, 0, 1, 2];
    for u in 0..=2 {
        let fs = all_functions(u, &alphabet);
        for f in &fs {
            for g in &fs {
                check(&maxsum(u, f.clone()), &maxsum(u, g.clone()))?;
                pairs += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x66);
    for (u, letters) in [(3, &alphabet[..]), (4, &alphabet[..2])] {
        let gs: Vec<Vec<Ext>> = (0..16)
            .map(|_| (0..1 << u).map(|_| alphabet[rng.gen_range(0..4)]).collect())
            .collect();
        let fs = all_functions(u, letters);
        let results = par::map_slice(&fs, |f| -> Result<usize, String> {
            for g in &gs {
                check(&maxsum(u, f.clone()), &maxsum(u, g.clone()))?;
            }
            Ok(gs.len())
        });
        for r in results {
            pairs += r?;
        }
    }
    for _ in 0..100 {
        let u = rng.gen_range(0..=12);
        let mut bits = || -> Vec<Ext> { (0..1 << u).map(|_| rng.gen_range(0..2)).collect() };
        let (f, g) = (bits(), bits());
        check(&ring(u, f), &ring(u, g))?;
        let mut vals = || -> Vec<Ext> {
            (0..1 << u)
                .map(|_| {
                    if rng.gen_bool(0.2) {
                        NEG_INF
                    } else {
                        rng.gen_range(-50..50)
                    }
                })
                .collect()
        };
        let (f, g) = (vals(), vals());
        check(&maxsum(u, f), &maxsum(u, g))?;
        pairs += 2;
    }
    Ok(format!("{pairs} convolution pairs"))
}

fn decomposition_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x77);
    let mut widest = 0;
    for i in 0..200 {
        let n = rng.gen_range(1..=50);
        let g = gnp(n, (rng.gen_range(1.0..5.0) / n as f64).min(1.0), &mut rng);
        let td = min_fill_decompose(&g);
        let nd = make_nice_deferred(&g, &td).map_err(|e| e.to_string())?;
        let violations = validate_nice(&g, &nd);
        ensure(violations.is_empty(), || format!("graph {i}: {}", violations[0]))?;
        ensure(nd.width() == td.width(), || {
            format!("graph {i}: width {} -> {}", td.width(), nd.width())
        })?;
        let bound = NICE_SIZE_FACTOR * (td.width() + 1) * n;
        ensure(nd.len() <= bound, || format!("graph {i}: {} nodes > {bound}", nd.len()))?;
        widest = widest.max(td.width());
    }
    Ok(format!(
        "200 graphs, widths up to {widest}, nodes <= {NICE_SIZE_FACTOR}(tw+1)n"
    ))
}

/// Nonempty sets over `[k] x [k]` with at most one cell per row.
fn row_constrained_sets(k: usize) -> Vec<Vec<Cell>> {
    let total = (k + 1).pow(k as u32);
    (1..total)
        .map(|mut code| {
            let mut set = Vec::new();
            for row in 1..=k {
                let col = code % (k + 1);
                code /= k + 1;
                if col > 0 {
                    set.push((row, col));
                }
            }
            set
        })
        .collect()
}

fn check_reduction(k: usize, sets: &[Vec<Cell>]) -> Result<bool, String> {
    let inst = build_reduction(k, sets).map_err(|e| e.to_string())?;
    let pd = &inst.path_decomposition;
    let violations = validate_td(&inst.graph, pd).map_err(|e| e.to_string())?;
    ensure(violations.is_empty(), || format!("{sets:?}: {}", violations[0]))?;
    ensure(pd.width() <= 3 * k, || format!("{sets:?}: width {}", pd.width()))?;
    ensure(pd.edges.iter().all(|&(a, b)| b == a + 1), || {
        format!("{sets:?}: not a path")
    })?;
    let hs = brute_hitting_set(k, sets).map_err(|e| e.to_string())?;
    let dm = has_disconnected_matching(&inst.graph, inst.ell, inst.c).map_err(|e| e.to_string())?;
    ensure(hs.is_some() == dm.is_some(), || {
        format!("{sets:?}: hitting set {}, matching {}", hs.is_some(), dm.is_some())
    })?;
    if let Some(cols) = hs {
        let m = witness_from_hitting_set(&inst, &cols).map_err(|e| e.to_string())?;
        ensure(is_forward_witness(&inst, &m).map_err(|e| e.to_string())?, || {
            format!("{sets:?}: constructed witness fails")
        })?;
    }
    Ok(dm.is_some())
}

fn reduction_equivalence() -> Outcome {
    let pool = row_constrained_sets(2);
    let mut families: Vec<Vec<Vec<Cell>>> = vec![vec![]];
    for m in 1..=3u32 {
        for code in 0..pool.len().pow(m) {
            let mut c = code;
            families.push(
                (0..m)
                    .map(|_| {
                        let s = pool[c % pool.len()].clone();
                        c /= pool.len();
                        s
                    })
                    .collect(),
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x88);
    let pool3 = row_constrained_sets(3);
    let random: Vec<Vec<Vec<Cell>>> = (0..50)
        .map(|_| {
            let m = rng.gen_range(1..=3);
            (0..m).map(|_| pool3[rng.gen_range(0..pool3.len())].clone()).collect()
        })
        .collect();
    let k2 = par::map_slice(&families, |f| check_reduction(2, f));
    let k3 = par::map_slice(&random, |f| check_reduction(3, f));
    let mut yes = 0;
    for r in k2.into_iter().chain(k3) {
        yes += r? as usize;
    }
    Ok(format!(
        "{} k=2 families (m <= 3) + 50 k=3 families, {yes} yes",
        families.len()
    ))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn grid_scaling() -> Outcome {
    const Q: usize = 500;
    const REPS: usize = 3;
    let mut conv = Vec::new();
    let mut naive = Vec::new();
    let mut detail = Vec::new();
    for p in 2..=6 {
        let g = grid(p, Q);
        let td = grid_branched_decomposition(p, Q);
        ensure(td.width() == p, || format!("{p}x{Q}: width {}", td.width()))?;
        let nd = make_nice_deferred(&g, &td).map_err(|e| e.to_string())?;
        let mut times = [f64::INFINITY; 2];
        let mut values = [0; 2];
        for _ in 0..REPS {
            for (i, mode) in [JoinMode::Naive, JoinMode::Convolution].into_iter().enumerate() {
                let t = Instant::now();
                values[i] = induced_root_value(&nd, mode).map_err(|e| e.to_string())?;
                times[i] = times[i].min(t.elapsed().as_secs_f64());
            }
        }
        ensure(values[0] == values[1], || format!("{p}x{Q}: modes disagree {values:?}"))?;
        naive.push((p as f64, times[0].log2()));
        conv.push((p as f64, times[1].log2()));
        detail.push(format!("p={p} naive {:.3}s conv {:.3}s", times[0], times[1]));
    }
    let (sc, sn) = (slope(&conv), slope(&naive));
    let target = 3f64.log2();
    let summary = format!("conv slope {sc:.3}, naive slope {sn:.3} ({})", detail.join(", "));
    ensure((sc - target).abs() <= 0.7 && sc < sn, || summary.clone())?;
    Ok(summary)
}

fn chain_property(c: &Corpus) -> Outcome {
    for (i, r) in c.reports.iter().enumerate() {
        check_chains(r).map_err(|e| format!("graph {i} {:?}: {e}", c.graphs[i].edges()))?;
    }
    Ok(format!("{} oracle reports", c.reports.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: usize, name: &str, run: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {id:>2} {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {id:>2} {name}: {msg} [{secs:.1}s]");
            }
        }
    };
    let c = corpus();
    report(1, "induced matches oracle", &|| induced_equivalence(&c));
    report(2, "c-disconnected matches oracle", &|| cdisc_equivalence(&c));
    report(3, "acyclic soundness", &acyclic_soundness);
    report(4, "acyclic completeness", &acyclic_completeness);
    report(5, "cut parity identity", &parity_identity);
    report(6, "subset convolution", &convolution_correctness);
    report(7, "nice decompositions", &decomposition_validity);
    report(8, "hitting set reduction", &reduction_equivalence);
    report(9, "grid scaling", &grid_scaling);
    report(10, "matching number chains", &|| chain_property(&c));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
