//! c-disconnected matching over a nice tree decomposition.
//!
//! Besides the induced coloring `d`, every saturated bag vertex carries a
//! class color in `1..=c`; adjacent saturated vertices must share it. A
//! table entry is indexed by the packed pair `(d, f)` per vertex and the
//! set `ĉ` of class colors used anywhere below the node, and stores the
//! largest number of saturated vertices, or `NEG_INF`. Using all `c`
//! colors at the root forces at least `c` components.
//!
//! A vertex digit is 0 for unsaturated, and `2 (col - 1) + d` for class
//! color `col` and `d ∈ {1, 2}`; it is followed by `ĉ` as the low `c` bits.

use serde::{Deserialize, Serialize};

use crate::decomp::{validate_nice, NiceDecomposition, NiceNode, NodeKind};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::oracle::{brute_matching_numbers, MAX_ORACLE_N};
use crate::par;
use crate::semiring::{ext_add, maxsum_convolve, Ext, NEG_INF};
use crate::table::{evaluate, position, Radix};
use crate::JoinMode;

/// Refuse tables with more entries than this.
pub const MAX_TABLE: usize = 1 << 28;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CDiscTable {
    pub bag: Vec<Vertex>,
    /// Indexed by `state * 2^c + ĉ`.
    pub values: Vec<Ext>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CDiscResult {
    pub answer: bool,
    pub max_saturated: Ext,
}

#[inline]
fn d_of(digit: usize) -> usize {
    if digit == 0 {
        0
    } else {
        2 - digit % 2
    }
}

#[inline]
fn color_of(digit: usize) -> usize {
    digit.div_ceil(2)
}

#[inline]
fn digit(col: usize, d: usize) -> usize {
    2 * (col - 1) + d
}

/// Mask of the class colors in `state`, bit `col - 1` for color `col`.
fn colors_used(r: &Radix, state: usize, k: usize) -> usize {
    (0..k)
        .map(|p| color_of(r.digit(state, p)))
        .filter(|&col| col > 0)
        .fold(0, |m, col| m | 1 << (col - 1))
}

struct Layout {
    c: usize,
    radix: Radix,
}

impl Layout {
    fn new(c: usize, k: usize) -> Self {
        Self {
            c,
            radix: Radix::new(2 * c + 1, k),
        }
    }

    fn size(&self, k: usize) -> usize {
        self.radix.size(k) << self.c
    }
}

/// Table at `node` from its children's tables.
pub fn cdisc_transition(node: &NiceNode, mut children: Vec<CDiscTable>, c: usize, mode: JoinMode) -> CDiscTable {
    let k = node.bag.len();
    let lay = Layout::new(c, k);
    let r = &lay.radix;
    let colors = 1usize << c;
    let bag = node.bag.clone();
    let values: Vec<Ext> = match node.kind {
        NodeKind::Leaf => {
            let mut v = vec![NEG_INF; colors];
            v[0] = 0;
            v
        }
        NodeKind::Join => {
            let right = children.pop().expect("join has two children");
            let left = children.pop().expect("join has two children");
            return cdisc_join(&left, &right, c, mode);
        }
        NodeKind::IntroduceVertex(v) => {
            let child = &children[0].values;
            let p = position(&bag, v);
            (0..lay.size(k))
                .map(|i| {
                    let (state, chat) = (i >> c, i & (colors - 1));
                    let (cs, dg) = r.remove(state, p);
                    let at = |ch: usize| child[cs << c | ch];
                    match d_of(dg) {
                        0 => at(chat),
                        1 => NEG_INF,
                        _ => {
                            let bit = 1 << (color_of(dg) - 1);
                            if chat & bit == 0 {
                                NEG_INF
                            } else {
                                // A fresh class, or one already used below.
                                ext_add(at(chat & !bit).max(at(chat)), 1)
                            }
                        }
                    }
                })
                .collect()
        }
        NodeKind::IntroduceEdge(u, v) => {
            let child = &children[0].values;
            let (pu, pv) = (position(&bag, u), position(&bag, v));
            (0..lay.size(k))
                .map(|i| {
                    let state = i >> c;
                    let (du, dv) = (r.digit(state, pu), r.digit(state, pv));
                    if du == 0 || dv == 0 {
                        child[i]
                    } else if color_of(du) != color_of(dv) {
                        NEG_INF
                    } else if d_of(du) == 1 && d_of(dv) == 1 {
                        let waiting = state + r.pw[pu] + r.pw[pv];
                        child[i].max(child[waiting << c | (i & (colors - 1))])
                    } else {
                        child[i]
                    }
                })
                .collect()
        }
        NodeKind::Forget(u) => {
            let child = &children[0].values;
            let p = position(&children[0].bag, u);
            (0..lay.size(k))
                .map(|i| {
                    let (state, chat) = (i >> c, i & (colors - 1));
                    let mut best = child[r.insert(state, p, 0) << c | chat];
                    for col in (1..=c).filter(|col| chat >> (col - 1) & 1 == 1) {
                        best = best.max(child[r.insert(state, p, digit(col, 1)) << c | chat]);
                    }
                    best
                })
                .collect()
        }
    };
    CDiscTable { bag, values }
}

/// Join of two tables over the same bag. Both sides see the same class
/// coloring; black vertices are black on exactly one side, and the color
/// sets of the two sides must cover `ĉ`.
pub fn cdisc_join(left: &CDiscTable, right: &CDiscTable, c: usize, mode: JoinMode) -> CDiscTable {
    assert_eq!(left.bag, right.bag, "join children must share the bag");
    let k = left.bag.len();
    let lay = Layout::new(c, k);
    let r = &lay.radix;
    let colors = 1usize << c;
    let mut out = vec![NEG_INF; lay.size(k)];
    match mode {
        JoinMode::Naive => {
            for state in 0..r.size(k) {
                let used = colors_used(r, state, k);
                let mut ones = Vec::new();
                let mut saturated = 0;
                for p in 0..k {
                    let dg = r.digit(state, p);
                    if dg != 0 {
                        saturated += 1;
                    }
                    if d_of(dg) == 1 {
                        ones.push(r.pw[p]);
                    }
                }
                for split in 0..1usize << ones.len() {
                    let (mut ls, mut rs) = (state, state);
                    for (i, &w) in ones.iter().enumerate() {
                        if split >> i & 1 == 1 {
                            ls += w;
                        } else {
                            rs += w;
                        }
                    }
                    for c1 in (0..colors).filter(|m| m & used == used) {
                        let a = left.values[ls << c | c1];
                        if a == NEG_INF {
                            continue;
                        }
                        for c2 in (0..colors).filter(|m| m & used == used) {
                            let slot = &mut out[state << c | c1 | c2];
                            *slot = (*slot).max(ext_add(ext_add(a, right.values[rs << c | c2]), -saturated));
                        }
                    }
                }
            }
        }
        JoinMode::Convolution => {
            // One max-sum convolution per class coloring and pair of color
            // sets; the coloring fixes which vertices are saturated.
            let fr = Radix::new(c + 1, k);
            let per_coloring = |f: usize| -> Vec<(usize, Ext)> {
                let rest: Vec<usize> = (0..k).filter(|&p| fr.digit(f, p) > 0).collect();
                let u = rest.len();
                let all_gray: usize = rest.iter().map(|&p| digit(fr.digit(f, p), 2) * r.pw[p]).sum();
                let states: Vec<usize> = (0..1usize << u)
                    .map(|s| {
                        let mut st = all_gray;
                        for (i, &p) in rest.iter().enumerate() {
                            if s >> i & 1 == 1 {
                                st -= r.pw[p];
                            }
                        }
                        st
                    })
                    .collect();
                let used = colors_used(r, all_gray, k);
                let side = |t: &CDiscTable, ch: usize| -> Option<Vec<Ext>> {
                    let v: Vec<Ext> = states.iter().map(|&st| t.values[st << c | ch]).collect();
                    v.iter().any(|&x| x != NEG_INF).then_some(v)
                };
                let supersets: Vec<usize> = (0..colors).filter(|m| m & used == used).collect();
                let ls: Vec<(usize, Vec<Ext>)> = supersets
                    .iter()
                    .filter_map(|&m| side(left, m).map(|v| (m, v)))
                    .collect();
                let rs: Vec<(usize, Vec<Ext>)> = supersets
                    .iter()
                    .filter_map(|&m| side(right, m).map(|v| (m, v)))
                    .collect();
                let mut best = vec![NEG_INF; (1usize << u) * colors];
                for (c1, l) in &ls {
                    for (c2, rv) in &rs {
                        let h = maxsum_convolve(l, rv, u);
                        for (s, v) in h.into_iter().enumerate() {
                            let slot = &mut best[s * colors + (c1 | c2)];
                            *slot = (*slot).max(ext_add(v, -(u as Ext)));
                        }
                    }
                }
                best.into_iter()
                    .enumerate()
                    .filter(|&(_, v)| v != NEG_INF)
                    .map(|(i, v)| ((states[i / colors] << c) | (i % colors), v))
                    .collect()
            };
            let fs = fr.size(k);
            let parts = if lay.size(k) >= 1 << 12 {
                par::map_range(fs, per_coloring)
            } else {
                (0..fs).map(per_coloring).collect()
            };
            for (i, v) in parts.into_iter().flatten() {
                out[i] = v;
            }
        }
    }
    CDiscTable {
        bag: left.bag.clone(),
        values: out,
    }
}

/// Root value `A_r[∅, ∅, [c]]`.
pub fn cdisc_root_value(nd: &NiceDecomposition, c: usize, mode: JoinMode) -> Ext {
    let root = evaluate(nd, |_, node, children| cdisc_transition(node, children, c, mode));
    root.values[(1 << c) - 1]
}

fn check_size(nd: &NiceDecomposition, c: usize) -> Result<()> {
    let k = nd.nodes.iter().map(|x| x.bag.len()).max().unwrap_or(0);
    let size = (2 * c as u128 + 1).pow(k as u32) << c;
    if size > MAX_TABLE as u128 {
        return Err(Error::TooLarge(format!(
            "c = {c} with bags of {k} vertices needs {size} table entries"
        )));
    }
    Ok(())
}

/// Decides whether `g` has a matching with at least `ell` edges whose
/// saturated vertices induce at least `c >= 2` components.
pub fn solve_cdisc(g: &Graph, nd: &NiceDecomposition, c: usize, ell: usize, mode: JoinMode) -> Result<CDiscResult> {
    if c < 2 {
        return Err(Error::InvalidInput(format!(
            "c = {c}: one component is plain maximum matching, use solve_disconnected"
        )));
    }
    if c > g.n() {
        return Err(Error::InvalidInput(format!("c = {c} exceeds n = {}", g.n())));
    }
    if let Some(v) = validate_nice(g, nd).first() {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    check_size(nd, c)?;
    let max_saturated = cdisc_root_value(nd, c, mode);
    Ok(CDiscResult {
        answer: max_saturated != NEG_INF && max_saturated as i64 >= 2 * ell as i64,
        max_saturated,
    })
}

/// Disconnected Matching with `c` from the input, `1 <= c <= n / 2`.
/// For `c = 1` this is maximum matching: solved exhaustively up to the
/// oracle's size limit and by the one-color table beyond it.
pub fn solve_disconnected(
    g: &Graph,
    nd: &NiceDecomposition,
    c: usize,
    ell: usize,
    mode: JoinMode,
) -> Result<CDiscResult> {
    if c == 0 || 2 * c > g.n() {
        return Err(Error::InvalidInput(format!(
            "c must lie in 1..={} for n = {}, got {c}",
            g.n() / 2,
            g.n()
        )));
    }
    if c >= 2 {
        return solve_cdisc(g, nd, c, ell, mode);
    }
    if let Some(v) = validate_nice(g, nd).first() {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    let max_saturated = if g.n() <= MAX_ORACLE_N {
        let mu = brute_matching_numbers(g, 1)?.mu;
        if mu == 0 {
            NEG_INF
        } else {
            2 * mu as Ext
        }
    } else {
        check_size(nd, 1)?;
        cdisc_root_value(nd, 1, mode)
    };
    Ok(CDiscResult {
        answer: max_saturated != NEG_INF && max_saturated as i64 >= 2 * ell as i64,
        max_saturated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::nice_min_fill;
    use crate::generate::{cycle, gnp, matching_graph, path};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn solve(g: &Graph, c: usize, ell: usize) -> CDiscResult {
        solve_cdisc(g, &nice_min_fill(g), c, ell, JoinMode::Convolution).unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(
            solve(&matching_graph(2), 2, 2),
            CDiscResult {
                answer: true,
                max_saturated: 4
            }
        );
        assert!(!solve(&path(4), 2, 1).answer);
        assert_eq!(solve(&path(4), 2, 1).max_saturated, NEG_INF);
        assert!(!solve(&cycle(4), 2, 1).answer);
        // P5 matched as {01, 34} leaves 2 out: two components.
        assert_eq!(solve(&path(5), 2, 1).max_saturated, 4);
        assert!(solve_cdisc(&path(4), &nice_min_fill(&path(4)), 1, 1, JoinMode::Naive).is_err());
    }

    #[test]
    fn leaf_and_introduce() {
        let leaf = NiceNode {
            kind: NodeKind::Leaf,
            bag: vec![],
            children: vec![],
        };
        let t = cdisc_transition(&leaf, vec![], 2, JoinMode::Naive);
        assert_eq!(t.values, vec![0, NEG_INF, NEG_INF, NEG_INF]);
        let iv = NiceNode {
            kind: NodeKind::IntroduceVertex(3),
            bag: vec![3],
            children: vec![0],
        };
        let t = cdisc_transition(&iv, vec![t], 2, JoinMode::Naive);
        // State digits: 0, (1,d1), (1,d2), (2,d1), (2,d2); ĉ in the low bits.
        assert_eq!(t.values[0], 0);
        assert!((4..8).all(|i| t.values[i] == NEG_INF), "d = 1 is dead");
        assert_eq!(t.values[2 << 2 | 0b01], 1);
        assert_eq!(t.values[2 << 2 | 0b10], NEG_INF, "color 1 missing from ĉ");
        assert_eq!(t.values[4 << 2 | 0b10], 1);
        assert_eq!(t.values[4 << 2 | 0b11], NEG_INF, "ĉ names exactly the colors used");
    }

    #[test]
    fn introduce_edge_needs_equal_colors() {
        let g = path(2);
        let nd = nice_min_fill(&g);
        let tables = {
            let mut out = Vec::new();
            evaluate(&nd, |_, node, children: Vec<CDiscTable>| {
                let t = cdisc_transition(node, children, 2, JoinMode::Naive);
                out.push((node.kind, t.clone()));
                t
            });
            out
        };
        let (_, t) = tables
            .iter()
            .find(|(k, _)| matches!(k, NodeKind::IntroduceEdge(..)))
            .unwrap();
        let r = Radix::new(5, 2);
        // Vertex 0 black in class 1, vertex 1 black in class 2.
        let state = 1 + 3 * r.pw[1];
        assert!((0..4).all(|ch| t.values[state << 2 | ch] == NEG_INF));
        let same = 1 + r.pw[1];
        assert_eq!(t.values[same << 2 | 0b01], 2);
    }

    #[test]
    fn joins_agree_on_random_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for c in 2..=3usize {
            for k in 0..=3usize {
                for _ in 0..10 {
                    let size = Layout::new(c, k).size(k);
                    let mut table = || CDiscTable {
                        bag: (0..k as Vertex).collect(),
                        values: (0..size)
                            .map(|_| {
                                if rng.gen_bool(0.4) {
                                    NEG_INF
                                } else {
                                    rng.gen_range(0..7)
                                }
                            })
                            .collect(),
                    };
                    let (a, b) = (table(), table());
                    let naive = cdisc_join(&a, &b, c, JoinMode::Naive);
                    let conv = cdisc_join(&a, &b, c, JoinMode::Convolution);
                    assert_eq!(naive, conv, "c={c} k={k}");
                }
            }
        }
    }

    #[test]
    fn matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..40 {
            let n = rng.gen_range(2..=9);
            let g = gnp(n, rng.gen_range(0.15..0.5), &mut rng);
            let nd = nice_min_fill(&g);
            let oracle = brute_matching_numbers(&g, 3).unwrap();
            for c in 2..=3.min(n) {
                let want = oracle.mu_cdiscon[&c].map_or(NEG_INF, |m| 2 * m as Ext);
                assert_eq!(cdisc_root_value(&nd, c, JoinMode::Convolution), want);
                assert_eq!(cdisc_root_value(&nd, c, JoinMode::Naive), want);
            }
        }
    }

    #[test]
    fn disconnected_with_one_component_is_maximum_matching() {
        let g = cycle(5);
        let nd = nice_min_fill(&g);
        let r = solve_disconnected(&g, &nd, 1, 2, JoinMode::Convolution).unwrap();
        assert_eq!(
            r,
            CDiscResult {
                answer: true,
                max_saturated: 4
            }
        );
        assert_eq!(cdisc_root_value(&nd, 1, JoinMode::Convolution), 4);
        assert!(solve_disconnected(&g, &nd, 3, 1, JoinMode::Convolution).is_err());
        assert!(solve_disconnected(&g, &nd, 0, 1, JoinMode::Convolution).is_err());
    }
}
