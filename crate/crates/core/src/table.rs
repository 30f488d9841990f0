//! Packed mixed-radix indexing of bag colorings and bottom-up evaluation.

use crate::decomp::{NiceDecomposition, NiceNode};
use crate::graph::Vertex;

/// Positional base-`base` number over a bag, digit `i` for the bag's
/// `i`-th smallest vertex.
#[derive(Debug, Clone)]
pub(crate) struct Radix {
    pub base: usize,
    pub pw: Vec<usize>,
}

impl Radix {
    pub fn new(base: usize, len: usize) -> Self {
        let mut pw = Vec::with_capacity(len + 2);
        pw.push(1usize);
        for _ in 0..=len {
            pw.push(pw.last().unwrap() * base);
        }
        Self { base, pw }
    }

    /// Number of indices for a bag of `len` vertices.
    #[inline]
    pub fn size(&self, len: usize) -> usize {
        self.pw[len]
    }

    #[inline]
    pub fn digit(&self, idx: usize, p: usize) -> usize {
        (idx / self.pw[p]) % self.base
    }

    /// Removes digit `p`, returning the shorter index and the digit.
    #[inline]
    pub fn remove(&self, idx: usize, p: usize) -> (usize, usize) {
        let lo = idx % self.pw[p];
        let rest = idx / self.pw[p];
        (lo + (rest / self.base) * self.pw[p], rest % self.base)
    }

    /// Inserts digit `d` at position `p`.
    #[inline]
    pub fn insert(&self, idx: usize, p: usize, d: usize) -> usize {
        let lo = idx % self.pw[p];
        lo + d * self.pw[p] + (idx / self.pw[p]) * self.pw[p + 1]
    }
}

pub(crate) fn position(bag: &[Vertex], v: Vertex) -> usize {
    bag.binary_search(&v).expect("vertex missing from bag")
}

/// Evaluates a table per node in post-order, handing each node its
/// children's tables by value. Returns the root table.
pub(crate) fn evaluate<T>(nd: &NiceDecomposition, mut step: impl FnMut(usize, &NiceNode, Vec<T>) -> T) -> T {
    let mut slots: Vec<Option<T>> = Vec::with_capacity(nd.len());
    for (i, node) in nd.nodes.iter().enumerate() {
        let children = node
            .children
            .iter()
            .map(|&c| slots[c].take().expect("child table consumed twice"))
            .collect();
        slots.push(Some(step(i, node, children)));
    }
    slots.pop().flatten().expect("decomposition has a root")
}
