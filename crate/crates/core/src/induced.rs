//! Induced matching over a nice tree decomposition.
//!
//! Each bag coloring maps vertices to 0 (unsaturated), 1 (saturated, its
//! matching edge already introduced) or 2 (saturated, matching edge still
//! to come). A table entry is the largest number of saturated vertices of
//! a partial solution in the subgraph below the node, or `NEG_INF`.

use serde::{Deserialize, Serialize};

use crate::decomp::{validate_nice, NiceDecomposition, NiceNode, NodeKind};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::par;
use crate::semiring::{ext_add, maxsum_convolve, Ext, NEG_INF};
use crate::table::{evaluate, position, Radix};
use crate::JoinMode;

const WHITE: usize = 0;
const BLACK: usize = 1;
const GRAY: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedTable {
    pub bag: Vec<Vertex>,
    /// Indexed by base-3 coloring over `bag`.
    pub values: Vec<Ext>,
}

impl InducedTable {
    pub fn leaf() -> Self {
        Self {
            bag: vec![],
            values: vec![0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedResult {
    pub answer: bool,
    /// `2 * μ_induced`: the root entry.
    pub max_saturated: Ext,
}

/// Table at `node` from its children's tables. Joins go through
/// [`induced_join`].
pub fn induced_transition(node: &NiceNode, children: &[InducedTable], mode: JoinMode) -> Result<InducedTable> {
    let r3 = Radix::new(3, node.bag.len());
    let bag = node.bag.clone();
    let values = match node.kind {
        NodeKind::Leaf => return Ok(InducedTable::leaf()),
        NodeKind::Join => return induced_join(&children[0], &children[1], mode),
        NodeKind::IntroduceVertex(v) => {
            let child = &children[0].values;
            let p = position(&bag, v);
            (0..r3.size(bag.len()))
                .map(|idx| {
                    let (ci, d) = r3.remove(idx, p);
                    match d {
                        WHITE => child[ci],
                        BLACK => NEG_INF,
                        _ => ext_add(child[ci], 1),
                    }
                })
                .collect()
        }
        NodeKind::IntroduceEdge(u, v) => {
            let child = &children[0].values;
            let (pu, pv) = (position(&bag, u), position(&bag, v));
            (0..child.len())
                .map(|idx| match (r3.digit(idx, pu), r3.digit(idx, pv)) {
                    (WHITE, _) | (_, WHITE) => child[idx],
                    (BLACK, BLACK) => child[idx + r3.pw[pu] + r3.pw[pv]],
                    _ => NEG_INF,
                })
                .collect()
        }
        NodeKind::Forget(u) => {
            let child = &children[0].values;
            let p = position(&children[0].bag, u);
            (0..r3.size(bag.len()))
                .map(|idx| child[r3.insert(idx, p, WHITE)].max(child[r3.insert(idx, p, BLACK)]))
                .collect()
        }
    };
    Ok(InducedTable { bag, values })
}

/// Join of two tables over the same bag: every black vertex is black on
/// exactly one side and gray on the other; white and gray copy.
pub fn induced_join(left: &InducedTable, right: &InducedTable, mode: JoinMode) -> Result<InducedTable> {
    if left.bag != right.bag {
        return Err(Error::InvalidDecomposition("join children have different bags".into()));
    }
    let values = match mode {
        JoinMode::Naive => join_naive(left, right),
        JoinMode::Convolution => join_convolution(left, right),
    };
    Ok(InducedTable {
        bag: left.bag.clone(),
        values,
    })
}

fn join_naive(left: &InducedTable, right: &InducedTable) -> Vec<Ext> {
    let k = left.bag.len();
    let r3 = Radix::new(3, k);
    let mut out = vec![NEG_INF; r3.size(k)];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut ones = Vec::new();
        let mut saturated = 0;
        for p in 0..k {
            match r3.digit(idx, p) {
                BLACK => {
                    ones.push(r3.pw[p]);
                    saturated += 1;
                }
                GRAY => saturated += 1,
                _ => {}
            }
        }
        let mut best = NEG_INF;
        for a in 0..1usize << ones.len() {
            // Bits of `a` choose the black vertices that are gray on the left.
            let (mut li, mut ri) = (idx, idx);
            for (i, &w) in ones.iter().enumerate() {
                if a >> i & 1 == 1 {
                    li += w;
                } else {
                    ri += w;
                }
            }
            best = best.max(ext_add(left.values[li], right.values[ri]));
        }
        *slot = ext_add(best, -saturated);
    }
    out
}

/// For each white set `R`, one max-sum subset convolution over the rest of
/// the bag: side functions color `S` black and the remainder gray.
fn join_convolution(left: &InducedTable, right: &InducedTable) -> Vec<Ext> {
    let k = left.bag.len();
    let r3 = Radix::new(3, k);
    let full = (1usize << k) - 1;
    let per_white_set = |white: usize| -> Vec<(usize, Ext)> {
        let rest: Vec<usize> = (0..k).filter(|p| white >> p & 1 == 0).map(|p| r3.pw[p]).collect();
        let u = rest.len();
        // Index of "S black, rest gray" for S given as a bitmask over `rest`.
        let all_gray: usize = rest.iter().map(|w| 2 * w).sum();
        let index = |s: usize| -> usize {
            let mut idx = all_gray;
            for (i, w) in rest.iter().enumerate() {
                if s >> i & 1 == 1 {
                    idx -= w;
                }
            }
            idx
        };
        let indices: Vec<usize> = (0..1usize << u).map(index).collect();
        let l: Vec<Ext> = indices.iter().map(|&i| left.values[i]).collect();
        let r: Vec<Ext> = indices.iter().map(|&i| right.values[i]).collect();
        let h = maxsum_convolve(&l, &r, u);
        indices
            .into_iter()
            .zip(h)
            .map(|(i, v)| (i, ext_add(v, -(u as Ext))))
            .collect()
    };
    let parts: Vec<Vec<(usize, Ext)>> = if k >= PAR_JOIN_MIN_BAG {
        par::map_range(full + 1, per_white_set)
    } else {
        (0..=full).map(per_white_set).collect()
    };
    let mut out = vec![NEG_INF; r3.size(k)];
    for (i, v) in parts.into_iter().flatten() {
        out[i] = v;
    }
    out
}

/// Bag size from which joins split their independent convolutions across
/// threads.
pub(crate) const PAR_JOIN_MIN_BAG: usize = 8;

/// Runs the dynamic program bottom-up and returns the root entry.
pub fn induced_root_value(nd: &NiceDecomposition, mode: JoinMode) -> Result<Ext> {
    let root = evaluate(nd, |_, node, children: Vec<Result<InducedTable>>| {
        let children = children.into_iter().collect::<Result<Vec<_>>>()?;
        induced_transition(node, &children, mode)
    })?;
    Ok(root.values[0])
}

/// Decides whether `g` has an induced matching with `ell` edges.
pub fn solve_induced(g: &Graph, nd: &NiceDecomposition, ell: usize, mode: JoinMode) -> Result<InducedResult> {
    if let Some(v) = validate_nice(g, nd).first() {
        return Err(Error::InvalidDecomposition(v.to_string()));
    }
    let max_saturated = induced_root_value(nd, mode)?;
    Ok(InducedResult {
        answer: max_saturated != NEG_INF && max_saturated as i64 >= 2 * ell as i64,
        max_saturated,
    })
}
