//! Witness extraction from decision procedures.

use crate::error::Result;
use crate::graph::{Graph, Matching, Vertex};

/// Deletes vertices one at a time, keeping each deletion under which
/// `decide` still answers yes on the induced subgraph. Returns the
/// surviving original vertex ids, or `None` if `g` itself is a no.
pub fn self_reduce(g: &Graph, mut decide: impl FnMut(&Graph) -> Result<bool>) -> Result<Option<Vec<Vertex>>> {
    if !decide(g)? {
        return Ok(None);
    }
    let mut kept: Vec<Vertex> = g.vertices().collect();
    for v in g.vertices() {
        let trial: Vec<Vertex> = kept.iter().copied().filter(|&x| x != v).collect();
        let (h, _) = g.induced_subgraph(&trial);
        if decide(&h)? {
            kept = trial;
        }
    }
    Ok(Some(kept))
}

/// A perfect matching of `g`, if one exists. Pendant vertices are matched
/// greedily; whatever remains is searched by backtracking on the lowest
/// unmatched vertex.
pub fn perfect_matching(g: &Graph) -> Option<Matching> {
    let mut free = vec![true; g.n()];
    let mut edges = Vec::new();
    if search(g, &mut free, &mut edges) {
        Some(Matching::new(edges))
    } else {
        None
    }
}

fn search(g: &Graph, free: &mut [bool], edges: &mut Vec<(Vertex, Vertex)>) -> bool {
    let mark = edges.len();
    let free_degree = |free: &[bool], v: Vertex| g.neighbors(v).iter().filter(|&&w| free[w as usize]).count();
    // Strip pendant vertices: their mate is forced.
    loop {
        let mut progressed = false;
        for v in g.vertices() {
            if !free[v as usize] {
                continue;
            }
            match free_degree(free, v) {
                0 => {
                    undo(free, edges, mark);
                    return false;
                }
                1 => {
                    let w = *g.neighbors(v).iter().find(|&&w| free[w as usize]).unwrap();
                    free[v as usize] = false;
                    free[w as usize] = false;
                    edges.push((v.min(w), v.max(w)));
                    progressed = true;
                }
                _ => {}
            }
        }
        if !progressed {
            break;
        }
    }
    let Some(v) = g.vertices().find(|&v| free[v as usize]) else {
        return true;
    };
    free[v as usize] = false;
    for &w in g.neighbors(v) {
        if !free[w as usize] {
            continue;
        }
        free[w as usize] = false;
        edges.push((v.min(w), v.max(w)));
        if search(g, free, edges) {
            return true;
        }
        edges.pop();
        free[w as usize] = true;
    }
    free[v as usize] = true;
    undo(free, edges, mark);
    false
}

fn undo(free: &mut [bool], edges: &mut Vec<(Vertex, Vertex)>, mark: usize) {
    for (a, b) in edges.drain(mark..) {
        free[a as usize] = true;
        free[b as usize] = true;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{complete, cycle, path};

    #[test]
    fn perfect_matchings() {
        assert_eq!(perfect_matching(&path(4)), Some(Matching::new([(0, 1), (2, 3)])));
        assert_eq!(perfect_matching(&path(3)), None);
        assert!(perfect_matching(&cycle(6)).is_some());
        assert!(perfect_matching(&complete(5)).is_none());
        assert_eq!(perfect_matching(&Graph::empty(0)), Some(Matching::new([])));
        // Two triangles joined by a bridge, which must be matched.
        let g = Graph::new(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap();
        let m = perfect_matching(&g).unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.is_matching());
    }

    #[test]
    fn reduces_to_a_minimal_yes() {
        // "Has at least 3 vertices" keeps exactly the last three.
        let kept = self_reduce(&path(6), |h| Ok(h.n() >= 3)).unwrap().unwrap();
        assert_eq!(kept, vec![3, 4, 5]);
        assert_eq!(self_reduce(&path(2), |h| Ok(h.n() >= 3)).unwrap(), None);
    }
}
