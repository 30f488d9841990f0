//! Small graph families used by tests, benchmarks and the CLI.

use rand::Rng;

use crate::graph::{Graph, Vertex};

pub fn path(n: usize) -> Graph {
    Graph::new(n, (1..n as Vertex).map(|i| (i - 1, i))).unwrap()
}

pub fn cycle(n: usize) -> Graph {
    assert!(n >= 3, "cycles need at least three vertices");
    Graph::new(n, (0..n as Vertex).map(|i| (i, (i + 1) % n as Vertex))).unwrap()
}

pub fn complete(n: usize) -> Graph {
    let n32 = n as Vertex;
    Graph::new(n, (0..n32).flat_map(|u| (u + 1..n32).map(move |v| (u, v)))).unwrap()
}

/// `copies` disjoint edges.
pub fn matching_graph(copies: usize) -> Graph {
    Graph::new(2 * copies, (0..copies as Vertex).map(|i| (2 * i, 2 * i + 1))).unwrap()
}

/// `rows x cols` grid. Vertex `(r, c)` has id `c * rows + r`, so each column
/// is a contiguous id range.
pub fn grid(rows: usize, cols: usize) -> Graph {
    let id = |r: usize, c: usize| (c * rows + r) as Vertex;
    let mut edges = Vec::new();
    for c in 0..cols {
        for r in 0..rows {
            if r + 1 < rows {
                edges.push((id(r, c), id(r + 1, c)));
            }
            if c + 1 < cols {
                edges.push((id(r, c), id(r, c + 1)));
            }
        }
    }
    Graph::new(rows * cols, edges).unwrap()
}

/// Erdős–Rényi G(n, p).
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

/// Every labelled graph on `n` vertices (`2^(n(n-1)/2)` of them).
pub fn all_labelled(n: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(Vertex, Vertex)> = (0..n as Vertex)
        .flat_map(|u| (u + 1..n as Vertex).map(move |v| (u, v)))
        .collect();
    let total = 1u64 << pairs.len();
    (0..total).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        Graph::new(n, edges).unwrap()
    })
}

/// Largest `n` accepted by [`unlabelled`].
pub const MAX_UNLABELLED_N: usize = 8;

/// One graph per isomorphism class on `n <= 8` vertices, each in its
/// canonical labelling. Classes on `n` vertices are grown from those on
/// `n - 1` by adding a vertex with every possible neighbourhood.
pub fn unlabelled(n: usize) -> Vec<Graph> {
    assert!(
        n <= MAX_UNLABELLED_N,
        "unlabelled generation needs n <= {MAX_UNLABELLED_N}"
    );
    let mut classes: Vec<Vec<u8>> = vec![vec![]];
    for size in 1..=n {
        let mut seen = std::collections::BTreeSet::new();
        for adj in &classes {
            for nbrs in 0u8..1 << (size - 1) {
                let mut grown: Vec<u8> = adj
                    .iter()
                    .enumerate()
                    .map(|(v, &row)| row | (nbrs >> v & 1) << (size - 1))
                    .collect();
                grown.push(nbrs);
                seen.insert(canonical_code(&grown));
            }
        }
        classes = seen.into_iter().map(|code| decode(code, size)).collect();
    }
    classes
        .iter()
        .map(|adj| {
            let edges = (0..n).flat_map(|u| {
                (u + 1..n)
                    .filter(move |&v| adj[u] >> v & 1 == 1)
                    .map(move |v| (u as Vertex, v as Vertex))
            });
            Graph::new(n, edges).unwrap()
        })
        .collect()
}

/// Connected members of [`unlabelled`].
pub fn unlabelled_connected(n: usize) -> Vec<Graph> {
    let all: Vec<Vertex> = (0..n as Vertex).collect();
    unlabelled(n)
        .into_iter()
        .filter(|g| n == 0 || g.component_count(&all) == 1)
        .collect()
}

fn pair_bit(u: usize, v: usize) -> usize {
    v * (v - 1) / 2 + u
}

fn decode(code: u64, n: usize) -> Vec<u8> {
    let mut adj = vec![0u8; n];
    for v in 0..n {
        for u in 0..v {
            if code >> pair_bit(u, v) & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
        }
    }
    adj
}

/// Smallest edge code over all relabellings that list vertices by
/// non-increasing degree. Degrees are invariant, so this is a complete
/// invariant while trying far fewer than `n!` orders.
fn canonical_code(adj: &[u8]) -> u64 {
    let n = adj.len();
    let deg: Vec<u32> = adj.iter().map(|r| r.count_ones()).collect();
    let mut want = deg.clone();
    want.sort_unstable_by(|a, b| b.cmp(a));
    let mut order = Vec::with_capacity(n);
    let mut best = u64::MAX;
    fn place(adj: &[u8], deg: &[u32], want: &[u32], order: &mut Vec<usize>, used: u8, code: u64, best: &mut u64) {
        let pos = order.len();
        if pos == adj.len() {
            *best = (*best).min(code);
            return;
        }
        for v in 0..adj.len() {
            if used >> v & 1 == 1 || deg[v] != want[pos] {
                continue;
            }
            let mut next = code;
            for (p, &w) in order.iter().enumerate() {
                if adj[v] >> w & 1 == 1 {
                    next |= 1 << pair_bit(p, pos);
                }
            }
            order.push(v);
            place(adj, deg, want, order, used | 1 << v, next, best);
            order.pop();
        }
    }
    place(adj, &deg, &want, &mut order, 0, 0, &mut best);
    best
}
