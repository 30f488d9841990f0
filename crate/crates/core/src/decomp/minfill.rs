use std::collections::BTreeSet;

use super::td::TreeDecomposition;
use crate::graph::{Graph, Vertex};

fn fill_in(adj: &[BTreeSet<Vertex>], v: Vertex) -> usize {
    let nb: Vec<Vertex> = adj[v as usize].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if !adj[a as usize].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Greedy min-fill elimination order. Ties go to the lowest vertex id.
pub fn min_fill_order(g: &Graph) -> Vec<Vertex> {
    let n = g.n();
    let mut adj: Vec<BTreeSet<Vertex>> = (0..n as Vertex)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut fill: Vec<usize> = (0..n as Vertex).map(|v| fill_in(&adj, v)).collect();
    let mut queue: BTreeSet<(usize, Vertex)> = (0..n as Vertex).map(|v| (fill[v as usize], v)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        order.push(v);
        let nb: Vec<Vertex> = adj[v as usize].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        for &a in &nb {
            adj[a as usize].remove(&v);
        }
        adj[v as usize].clear();
        // Fill counts can change only within distance two of v.
        let mut touched: BTreeSet<Vertex> = nb.iter().copied().collect();
        for &a in &nb {
            touched.extend(adj[a as usize].iter().copied());
        }
        for u in touched {
            if !queue.contains(&(fill[u as usize], u)) {
                continue;
            }
            queue.remove(&(fill[u as usize], u));
            fill[u as usize] = fill_in(&adj, u);
            queue.insert((fill[u as usize], u));
        }
    }
    order
}

/// Tree decomposition from the min-fill elimination order.
///
/// Bag i is the eliminated vertex with its neighbours at elimination time;
/// its parent is the bag of the earliest-eliminated of those neighbours.
/// Roots of separate components are chained so the result is one tree.
pub fn min_fill_decompose(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    if n == 0 {
        return TreeDecomposition::new(vec![vec![]], vec![]);
    }
    let order = min_fill_order(g);
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i;
    }
    let mut adj: Vec<BTreeSet<Vertex>> = (0..n as Vertex)
        .map(|v| g.neighbors(v).iter().copied().collect())
        .collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    let mut roots = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let nb: Vec<Vertex> = adj[v as usize].iter().copied().collect();
        for (x, &a) in nb.iter().enumerate() {
            for &b in &nb[x + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        for &a in &nb {
            adj[a as usize].remove(&v);
        }
        let mut bag = nb.clone();
        bag.push(v);
        bags.push(bag);
        match nb.iter().map(|&a| pos[a as usize]).min() {
            Some(p) => edges.push((i, p)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate_td;
    use crate::generate::{complete, cycle, gnp, grid, path};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_widths() {
        assert_eq!(min_fill_decompose(&path(4)).width(), 1);
        assert_eq!(min_fill_decompose(&cycle(4)).width(), 2);
        assert_eq!(min_fill_decompose(&complete(4)).width(), 3);
        assert_eq!(min_fill_decompose(&Graph::empty(3)).width(), 0);
    }

    #[test]
    fn valid_on_random_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..30 {
            let g = gnp(n, 0.2, &mut rng);
            let td = min_fill_decompose(&g);
            assert!(validate_td(&g, &td).unwrap().is_empty(), "n={n}");
        }
        let g = grid(4, 6);
        assert!(validate_td(&g, &min_fill_decompose(&g)).unwrap().is_empty());
    }

    #[test]
    fn order_is_deterministic() {
        let g = cycle(6);
        assert_eq!(min_fill_order(&g), min_fill_order(&g));
        assert_eq!(min_fill_order(&g)[0], 0);
    }
}
