//! Randomized acyclic matching by Cut & Count.
//!
//! A candidate is a vertex set `X` with a perfect matching in `G[X]` and a
//! marker set `P ⊆ X`; it is counted together with every consistent cut
//! `(X_l, X_r)` of `G[X]` with `P ⊆ X_l`. Unmarked components can sit on
//! either side, so modulo two only candidates with a marker in every
//! component survive, and with `|P| ≤ |X| - |E(G[X])|` those are forests.
//!
//! Table entries are polynomials over GF(2) in the accumulators
//! `a = |X|`, `b = |E(G[X])|`, `c = |P|` and the weight `w`, one per packed
//! bag state. A base-5 digit encodes `(d, s)`: 0 is `(0, 0)`, 1 `(1, l)`,
//! 2 `(1, r)`, 3 `(2, l)`, 4 `(2, r)`.

mod poly;
mod weights;

use serde::{Deserialize, Serialize};

pub use poly::{Bounds, Key, ParityPoly, WBits};
pub use weights::{sample_weights, Tag, WeightAssignment};

use crate::certificate::{perfect_matching, self_reduce};
use crate::decomp::{nice_min_fill, validate_nice, NiceDecomposition, NiceNode, NodeKind};
use crate::error::{Error, Result};
use crate::graph::{classify_matching, Graph, Matching};
use crate::par;
use crate::semiring::{ranked_convolve, Ring};
use crate::table::{evaluate, position, Radix};
use crate::JoinMode;

/// Trials for a false-negative rate below `10^-3`: `⌈log_3 1000⌉`.
pub const DEFAULT_TRIALS: usize = 7;

const EMPTY: usize = 0;

#[inline]
fn d_of(digit: usize) -> usize {
    digit.div_ceil(2)
}

#[inline]
fn right_side(digit: usize) -> bool {
    digit != EMPTY && digit.is_multiple_of(2)
}

pub struct AcyclicTable {
    pub bag: Vec<u32>,
    pub values: Vec<ParityPoly>,
}

/// Table at `node` from its children's tables.
pub fn acyclic_transition(
    node: &NiceNode,
    mut children: Vec<AcyclicTable>,
    w: &WeightAssignment,
    bounds: &Bounds,
    mode: JoinMode,
) -> AcyclicTable {
    let bag = node.bag.clone();
    let r5 = Radix::new(5, bag.len());
    let size = r5.size(bag.len());
    let values: Vec<ParityPoly> = match node.kind {
        NodeKind::Leaf => vec![ParityPoly::one(bounds)],
        NodeKind::Join => {
            let right = children.pop().expect("join has two children");
            let left = children.pop().expect("join has two children");
            return acyclic_join(&left, &right, w, bounds, mode);
        }
        NodeKind::IntroduceVertex(v) => {
            let child = &children[0].values;
            let p = position(&bag, v);
            let wv = w.get(v, Tag::F) as usize;
            (0..size)
                .map(|idx| {
                    let (ci, digit) = r5.remove(idx, p);
                    match d_of(digit) {
                        0 => child[ci].clone(),
                        1 => ParityPoly::default(),
                        _ => child[ci].shifted(1, 0, 0, wv, bounds),
                    }
                })
                .collect()
        }
        NodeKind::IntroduceEdge(u, v) => {
            let child = &children[0].values;
            let (pu, pv) = (position(&bag, u), position(&bag, v));
            (0..size)
                .map(|idx| {
                    let (du, dv) = (r5.digit(idx, pu), r5.digit(idx, pv));
                    if du == EMPTY || dv == EMPTY {
                        return child[idx].clone();
                    }
                    if right_side(du) != right_side(dv) {
                        return ParityPoly::default();
                    }
                    let mut out = child[idx].shifted(0, 1, 0, 0, bounds);
                    if d_of(du) == 1 && d_of(dv) == 1 {
                        // uv is the matching edge of both ends: they were
                        // waiting (d = 2) below. Disjoint from the case
                        // above, so the counts add.
                        let waiting = idx + 2 * r5.pw[pu] + 2 * r5.pw[pv];
                        out.add_shifted(&child[waiting], 0, 1, 0, 0, bounds);
                    }
                    out
                })
                .collect()
        }
        NodeKind::Forget(u) => {
            let child = &children[0].values;
            let p = position(&children[0].bag, u);
            let wp = w.get(u, Tag::P) as usize;
            (0..size)
                .map(|idx| {
                    let at = |digit| &child[r5.insert(idx, p, digit)];
                    // Marked (must be on the left), absent, unmarked on
                    // either side.
                    let mut out = at(1).shifted(0, 0, 1, wp, bounds);
                    out.add_assign(at(0), bounds);
                    out.add_assign(at(1), bounds);
                    out.add_assign(at(2), bounds);
                    out
                })
                .collect()
        }
    };
    AcyclicTable { bag, values }
}

/// Both children carry the same cut sides; every saturated bag vertex is
/// counted on both sides, so the right factor is divided by its `a` and
/// `w` contribution before multiplying.
pub fn acyclic_join(
    left: &AcyclicTable,
    right: &AcyclicTable,
    w: &WeightAssignment,
    bounds: &Bounds,
    mode: JoinMode,
) -> AcyclicTable {
    assert_eq!(left.bag, right.bag, "join children must share the bag");
    let bag = &left.bag;
    let k = bag.len();
    let r5 = Radix::new(5, k);
    let size = r5.size(k);
    let mut out = vec![ParityPoly::default(); size];
    match mode {
        JoinMode::Naive => {
            for (idx, slot) in out.iter_mut().enumerate() {
                let mut ones = Vec::new();
                let (mut sat, mut wsat) = (0, 0);
                for p in 0..k {
                    let digit = r5.digit(idx, p);
                    if digit != EMPTY {
                        sat += 1;
                        wsat += w.get(bag[p], Tag::F) as usize;
                    }
                    if d_of(digit) == 1 {
                        ones.push(2 * r5.pw[p]);
                    }
                }
                for split in 0..1usize << ones.len() {
                    let (mut li, mut ri) = (idx, idx);
                    for (i, &step) in ones.iter().enumerate() {
                        if split >> i & 1 == 1 {
                            li += step;
                        } else {
                            ri += step;
                        }
                    }
                    let r = right.values[ri].divided(sat, wsat);
                    slot.add_mul(&left.values[li], &r, bounds);
                }
            }
        }
        JoinMode::Convolution => {
            // One convolution per absent set R and side assignment on the rest.
            let tasks: Vec<(usize, usize)> = (0..1usize << k)
                .flat_map(|absent| {
                    let u = k - (absent.count_ones() as usize);
                    (0..1usize << u).map(move |sides| (absent, sides))
                })
                .collect();
            let run = |&(absent, sides): &(usize, usize)| -> Vec<(usize, ParityPoly)> {
                let rest: Vec<usize> = (0..k).filter(|p| absent >> p & 1 == 0).collect();
                let u = rest.len();
                let mut base = 0;
                let mut wsat = 0;
                for (i, &p) in rest.iter().enumerate() {
                    // Gray (d = 2) on the chosen side: digit 3 or 4.
                    base += (3 + (sides >> i & 1)) * r5.pw[p];
                    wsat += w.get(bag[p], Tag::F) as usize;
                }
                let index = |s: usize| -> usize {
                    let mut idx = base;
                    for (i, &p) in rest.iter().enumerate() {
                        if s >> i & 1 == 1 {
                            idx -= 2 * r5.pw[p];
                        }
                    }
                    idx
                };
                let indices: Vec<usize> = (0..1usize << u).map(index).collect();
                let f: Vec<ParityPoly> = indices.iter().map(|&i| left.values[i].clone()).collect();
                let g: Vec<ParityPoly> = indices.iter().map(|&i| right.values[i].divided(u, wsat)).collect();
                indices.into_iter().zip(ranked_convolve(&f, &g, u, bounds)).collect()
            };
            let parts = if k >= 4 {
                par::map_slice(&tasks, run)
            } else {
                tasks.iter().map(run).collect()
            };
            for (i, v) in parts.into_iter().flatten() {
                out[i] = v;
            }
        }
    }
    AcyclicTable {
        bag: bag.clone(),
        values: out,
    }
}

/// Root polynomial of the whole decomposition under the given window.
pub fn acyclic_root(nd: &NiceDecomposition, w: &WeightAssignment, bounds: &Bounds, mode: JoinMode) -> ParityPoly {
    let mut root = evaluate(nd, |_, node, children| {
        acyclic_transition(node, children, w, bounds, mode)
    });
    root.values.swap_remove(0)
}

/// The `(B, W)` witnessing a yes answer, if any: an odd root entry at
/// `a = 2 ell`, `c = 2 ell - B`.
pub fn read_root(root: &ParityPoly, ell: usize) -> Option<(usize, usize)> {
    let a = 2 * ell;
    (0..a).find_map(|b| {
        root.weights(a, b, a - b)
            .and_then(|bits| bits.ones().next())
            .map(|weight| (b, weight))
    })
}

/// One Monte Carlo trial with the given weights. Never answers yes
/// wrongly.
pub fn acyclic_trial(
    nd: &NiceDecomposition,
    n: usize,
    ell: usize,
    w: &WeightAssignment,
    mode: JoinMode,
) -> Option<(usize, usize)> {
    let bounds = Bounds::for_target(n, 2 * ell);
    read_root(&acyclic_root(nd, w, &bounds, mode), ell)
}

/// Seed of trial `i` derived from the base seed.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    // splitmix64 finaliser, so neighbouring trials get unrelated streams.
    let mut z = seed.wrapping_add((i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcyclicDecision {
    pub answer: bool,
    /// First successful trial with its `(B, W)` root witness.
    pub witness: Option<(usize, usize, usize)>,
    pub trials: usize,
}

fn check_ell(n: usize, ell: usize) -> Result<()> {
    if ell == 0 || 2 * ell > n {
        return Err(Error::InvalidInput(format!(
            "ell must lie in 1..={} for n = {n}, got {ell}",
            n / 2
        )));
    }
    Ok(())
}

/// Runs `trials` independent weight samples; yes iff some trial finds an
/// odd root entry.
pub fn decide_acyclic(
    g: &Graph,
    nd: &NiceDecomposition,
    ell: usize,
    seed: u64,
    trials: usize,
    mode: JoinMode,
) -> Result<AcyclicDecision> {
    check_ell(g.n(), ell)?;
    if let Some(v) = validate_nice(g, nd).first() {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    let outcomes = par::map_range(trials, |i| {
        let w = sample_weights(g.n(), trial_seed(seed, i));
        acyclic_trial(nd, g.n(), ell, &w, mode)
    });
    let witness = outcomes
        .iter()
        .enumerate()
        .find_map(|(i, o)| o.map(|(b, weight)| (i, b, weight)));
    Ok(AcyclicDecision {
        answer: witness.is_some(),
        witness,
        trials,
    })
}

/// An acyclic matching with `ell` edges found by self-reduction: vertices
/// are deleted while the (re-decomposed) residual graph stays a yes
/// instance. Yes answers are never wrong, so once exactly `2 ell`
/// vertices remain they carry a perfectly matchable forest. A run that
/// stalls above `2 ell` vertices because of false negatives is retried
/// with fresh seeds.
pub fn extract_acyclic_certificate(g: &Graph, ell: usize, seed: u64, trials: usize) -> Result<Matching> {
    check_ell(g.n(), ell)?;
    const ATTEMPTS: usize = 5;
    for attempt in 0..ATTEMPTS {
        let mut calls = 0u64;
        let base = trial_seed(seed, 1000 + attempt);
        let decide = |h: &Graph| -> Result<bool> {
            calls += 1;
            if 2 * ell > h.n() {
                return Ok(false);
            }
            let nd = nice_min_fill(h);
            Ok(decide_acyclic(
                h,
                &nd,
                ell,
                trial_seed(base, calls as usize),
                trials,
                JoinMode::Convolution,
            )?
            .answer)
        };
        let Some(kept) = self_reduce(g, decide)? else {
            continue;
        };
        if kept.len() != 2 * ell {
            continue;
        }
        let (h, ids) = g.induced_subgraph(&kept);
        let Some(m) = perfect_matching(&h) else {
            continue;
        };
        let m = Matching::new(m.edges().iter().map(|&(a, b)| (ids[a as usize], ids[b as usize])));
        let cls = classify_matching(g, &m, 1)?;
        if cls.is_matching && cls.is_acyclic && m.len() == ell {
            return Ok(m);
        }
    }
    Err(Error::ExtractionFailed(ATTEMPTS))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{cycle, gnp, path};
    use crate::oracle::{brute_matching_numbers, cut_parity_table};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn leaf_and_dead_introduce() {
        let w = sample_weights(1, 0);
        let bd = Bounds::full(1);
        let leaf = NiceNode {
            kind: NodeKind::Leaf,
            bag: vec![],
            children: vec![],
        };
        let t = acyclic_transition(&leaf, vec![], &w, &bd, JoinMode::Naive);
        assert_eq!(t.values.len(), 1);
        assert!(t.values[0].get(0, 0, 0, 0));
        assert_eq!(t.values[0].terms().count(), 1);
        let iv = NiceNode {
            kind: NodeKind::IntroduceVertex(0),
            bag: vec![0],
            children: vec![0],
        };
        let t = acyclic_transition(&iv, vec![t], &w, &bd, JoinMode::Naive);
        assert!(t.values[1].is_zero() && t.values[2].is_zero());
        assert!(t.values[3].get(1, 0, 0, w.get(0, Tag::F) as usize));
    }

    /// Root table against direct enumeration on the region `C <= A - B`,
    /// where every surviving candidate is a forest and so has a unique
    /// perfect matching.
    fn compare_with_enumeration(g: &Graph, w: &WeightAssignment, mode: JoinMode) {
        let nd = nice_min_fill(g);
        let root = acyclic_root(&nd, w, &Bounds::full(g.n()), mode);
        let table = cut_parity_table(g, w).unwrap();
        for (&(a, b, c, weight), counts) in &table {
            if b + c > a {
                continue;
            }
            assert_eq!(
                root.get(a, b, c, weight as usize),
                counts.c_count % 2 == 1,
                "a={a} b={b} c={c} w={weight}"
            );
        }
        for (k, bits) in root.terms().filter(|(k, _)| k.b + k.c <= k.a) {
            for weight in bits.ones() {
                let key = (k.a as usize, k.b as usize, k.c as usize, weight as u64);
                assert!(table.get(&key).is_some_and(|x| x.c_count % 2 == 1), "{key:?}");
            }
        }
    }

    #[test]
    fn root_parities_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for i in 0..25 {
            let n = rng.gen_range(1..=7);
            let g = gnp(n, rng.gen_range(0.2..0.7), &mut rng);
            let w = sample_weights(n, i);
            compare_with_enumeration(&g, &w, JoinMode::Convolution);
            compare_with_enumeration(&g, &w, JoinMode::Naive);
        }
    }

    #[test]
    fn no_markers_means_even() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for i in 0..20 {
            let g = gnp(8, 0.4, &mut rng);
            let root = acyclic_root(
                &nice_min_fill(&g),
                &sample_weights(8, i),
                &Bounds::full(8),
                JoinMode::Convolution,
            );
            assert!(root.terms().all(|(k, _)| k.a == 0 || k.c > 0));
        }
    }

    #[test]
    fn decisions() {
        let c4 = cycle(4);
        let nd = nice_min_fill(&c4);
        for seed in 0..10 {
            assert!(
                !decide_acyclic(&c4, &nd, 2, seed, 7, JoinMode::Convolution)
                    .unwrap()
                    .answer
            );
        }
        assert!(decide_acyclic(&c4, &nd, 1, 3, 7, JoinMode::Convolution).unwrap().answer);
        let p4 = path(4);
        assert!(
            decide_acyclic(&p4, &nice_min_fill(&p4), 2, 1, 7, JoinMode::Convolution)
                .unwrap()
                .answer
        );
        assert!(decide_acyclic(&p4, &nice_min_fill(&p4), 3, 1, 7, JoinMode::Convolution).is_err());
        assert!(decide_acyclic(&p4, &nice_min_fill(&p4), 0, 1, 7, JoinMode::Convolution).is_err());
    }

    #[test]
    fn joins_agree_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for i in 0..15 {
            let n = rng.gen_range(4..=10);
            let g = gnp(n, 0.35, &mut rng);
            let nd = nice_min_fill(&g);
            let w = sample_weights(n, i);
            let bounds = Bounds::for_target(n, 2 * (n / 2).max(1));
            assert_eq!(
                acyclic_root(&nd, &w, &bounds, JoinMode::Naive),
                acyclic_root(&nd, &w, &bounds, JoinMode::Convolution)
            );
        }
    }

    #[test]
    fn certificates() {
        let p4 = path(4);
        let m = extract_acyclic_certificate(&p4, 2, 1, 7).unwrap();
        assert_eq!(m, Matching::new([(0, 1), (2, 3)]));
        let k2 = path(2);
        assert_eq!(
            extract_acyclic_certificate(&k2, 1, 1, 7).unwrap(),
            Matching::new([(0, 1)])
        );
        let c4 = cycle(4);
        let m = extract_acyclic_certificate(&c4, 1, 5, 7).unwrap();
        assert!(classify_matching(&c4, &m, 1).unwrap().is_acyclic);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for i in 0..5 {
            let g = gnp(9, 0.4, &mut rng);
            let mu = brute_matching_numbers(&g, 1).unwrap().mu_acyclic;
            if mu == 0 {
                continue;
            }
            let m = extract_acyclic_certificate(&g, mu, i, 7).unwrap();
            let cls = classify_matching(&g, &m, 1).unwrap();
            assert!(cls.is_acyclic && m.len() == mu);
        }
    }
}
