//! Simple undirected graphs on dense vertex ids `0..n`, plus the matching
//! predicates every solver and oracle is checked against.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vertex = u32;

/// Undirected simple graph. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Canonical edges `(u, v)` with `u < v`, sorted.
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph, silently dropping duplicate edges. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<Self> {
        Self::with_duplicates(n, edges).map(|(g, _)| g)
    }

    /// Like [`Graph::new`] but also reports how many duplicate edges were dropped.
    pub fn with_duplicates(n: usize, edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Result<(Self, usize)> {
        let mut set = BTreeSet::new();
        let mut duplicates = 0;
        for (u, v) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint >= n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                duplicates += 1;
            }
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok((Self { n, edges, adjacency }, duplicates))
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[u as usize].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        0..self.n as Vertex
    }

    fn membership(&self, set: &[Vertex]) -> Vec<bool> {
        let mut inside = vec![false; self.n];
        for &v in set {
            inside[v as usize] = true;
        }
        inside
    }

    /// Number of edges of the subgraph induced by `set`.
    pub fn induced_edge_count(&self, set: &[Vertex]) -> usize {
        let inside = self.membership(set);
        self.edges
            .iter()
            .filter(|&&(u, v)| inside[u as usize] && inside[v as usize])
            .count()
    }

    /// Connected components of the subgraph induced by `set` (0 for the empty set).
    pub fn component_count(&self, set: &[Vertex]) -> usize {
        let inside = self.membership(set);
        let mut seen = vec![false; self.n];
        let mut stack = Vec::new();
        let mut count = 0;
        for &start in set {
            if seen[start as usize] {
                continue;
            }
            count += 1;
            seen[start as usize] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if inside[w as usize] && !seen[w as usize] {
                        seen[w as usize] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Forest test via the component/edge count identity: an induced subgraph
    /// on `x` vertices with `y` edges is acyclic iff it has at most `x - y`
    /// components.
    pub fn is_forest(&self, set: &[Vertex]) -> bool {
        let vertices = {
            let mut s = set.to_vec();
            s.sort_unstable();
            s.dedup();
            s
        };
        let edges = self.induced_edge_count(&vertices);
        edges <= vertices.len() && self.component_count(&vertices) <= vertices.len() - edges
    }

    /// Forest test by depth-first search looking for a back edge.
    pub fn has_cycle_dfs(&self, set: &[Vertex]) -> bool {
        let inside = self.membership(set);
        let mut parent: Vec<Option<Vertex>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        for &root in set {
            if seen[root as usize] {
                continue;
            }
            seen[root as usize] = true;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if !inside[w as usize] || parent[v as usize] == Some(w) {
                        continue;
                    }
                    if seen[w as usize] {
                        return true;
                    }
                    seen[w as usize] = true;
                    parent[w as usize] = Some(v);
                    stack.push(w);
                }
            }
        }
        false
    }

    /// Subgraph induced by `keep`, with vertices renumbered in ascending order
    /// of their old ids. Returns the graph and the old id of every new vertex.
    pub fn induced_subgraph(&self, keep: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut old_ids = keep.to_vec();
        old_ids.sort_unstable();
        old_ids.dedup();
        let mut new_id = vec![u32::MAX; self.n];
        for (i, &v) in old_ids.iter().enumerate() {
            new_id[v as usize] = i as Vertex;
        }
        let edges = self.edges.iter().filter_map(|&(u, v)| {
            let (a, b) = (new_id[u as usize], new_id[v as usize]);
            (a != u32::MAX && b != u32::MAX).then_some((a, b))
        });
        let g = Graph::new(old_ids.len(), edges).expect("induced subgraph of a valid graph");
        (g, old_ids)
    }

    /// Adds one vertex adjacent to exactly `attach`; returns the new graph and the new id.
    pub fn with_new_vertex(&self, attach: &[Vertex]) -> Result<(Graph, Vertex)> {
        let id = self.n as Vertex;
        let edges = self.edges.iter().copied().chain(attach.iter().map(|&v| (v, id)));
        Ok((Graph::new(self.n + 1, edges)?, id))
    }
}

/// A set of vertex-disjoint edges, stored canonically.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Matching {
    edges: Vec<(Vertex, Vertex)>,
}

impl Matching {
    pub fn new(edges: impl IntoIterator<Item = (Vertex, Vertex)>) -> Self {
        let mut edges: Vec<_> = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        edges.sort_unstable();
        edges.dedup();
        Self { edges }
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Saturated vertices, sorted and deduplicated.
    pub fn saturated(&self) -> Vec<Vertex> {
        let mut vs: Vec<_> = self.edges.iter().flat_map(|&(u, v)| [u, v]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// True iff no two edges share an endpoint.
    pub fn is_matching(&self) -> bool {
        self.saturated().len() == 2 * self.edges.len()
    }

    pub fn without(&self, index: usize) -> Matching {
        let mut edges = self.edges.clone();
        edges.remove(index);
        Matching { edges }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingClass {
    pub is_matching: bool,
    pub is_induced: bool,
    pub is_acyclic: bool,
    pub components: usize,
    /// `components >= c` for the requested component target.
    pub is_c_disconnected: bool,
}

/// Classifies `m` against the induced, acyclic and c-disconnected properties.
/// Fails if some edge of `m` is not an edge of `g`.
pub fn classify_matching(g: &Graph, m: &Matching, c: usize) -> Result<MatchingClass> {
    if let Some(&(u, v)) = m
        .edges()
        .iter()
        .find(|&&(u, v)| u as usize >= g.n() || v as usize >= g.n() || !g.has_edge(u, v))
    {
        return Err(Error::InvalidInput(format!("({u}, {v}) is not an edge of the graph")));
    }
    let saturated = m.saturated();
    let induced_edges = g.induced_edge_count(&saturated);
    let components = g.component_count(&saturated);
    let is_matching = m.is_matching();
    Ok(MatchingClass {
        is_matching,
        is_induced: is_matching && induced_edges == m.len(),
        is_acyclic: is_matching && g.is_forest(&saturated),
        components,
        is_c_disconnected: is_matching && components >= c,
    })
}

/// Result of parsing a graph file.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: Graph,
    pub duplicate_edges: usize,
}

/// Parses either the plain `n m` edge-list format (0-based) or a PACE `.gr`
/// file (`p tw n m` header, 1-based ids). Lines starting with `c` or `#` are
/// comments.
pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header line"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (n, m, one_based) = match tokens.as_slice() {
        ["p", _, n, m] => (parse_num(n, header_line)?, parse_num(m, header_line)?, true),
        [n, m] => (parse_num(n, header_line)?, parse_num(m, header_line)?, false),
        _ => return Err(Error::parse(header_line, "expected `n m` or `p tw n m`")),
    };

    let mut edges = Vec::with_capacity(m);
    for (line_no, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        let [a, b] = t.as_slice() else {
            return Err(Error::parse(line_no, "expected two vertex ids"));
        };
        let (mut u, mut v) = (parse_num(a, line_no)?, parse_num(b, line_no)?);
        if one_based {
            if u == 0 || v == 0 {
                return Err(Error::parse(line_no, "vertex ids are 1-based in .gr files"));
            }
            u -= 1;
            v -= 1;
        }
        if u >= n || v >= n {
            return Err(Error::parse(line_no, format!("endpoint out of range (n = {n})")));
        }
        if u == v {
            return Err(Error::parse(line_no, "self-loop"));
        }
        edges.push((u as Vertex, v as Vertex));
    }
    if edges.len() != m {
        return Err(Error::parse(
            header_line,
            format!("header declares {m} edges but {} were listed", edges.len()),
        ));
    }
    let (graph, duplicate_edges) = Graph::with_duplicates(n, edges)?;
    Ok(ParsedGraph { graph, duplicate_edges })
}

fn parse_num(token: &str, line: usize) -> Result<usize> {
    token
        .parse()
        .map_err(|_| Error::parse(line, format!("`{token}` is not a non-negative integer")))
}

/// Writes the 0-based edge-list form.
pub fn write_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Writes the PACE `.gr` form (1-based ids).
pub fn write_gr(g: &Graph) -> String {
    let mut out = format!("p tw {} {}\n", g.n(), g.m());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{} {}", u + 1, v + 1);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{cycle, path};

    #[test]
    fn parses_plain_edge_list() {
        let p = parse_graph("4 3\n0 1\n1 2\n2 3\n").unwrap();
        assert_eq!(p.graph, path(4));
        assert_eq!(p.duplicate_edges, 0);
    }

    #[test]
    fn parses_single_vertex() {
        let p = parse_graph("1 0\n").unwrap();
        assert_eq!(p.graph.n(), 1);
        assert_eq!(p.graph.m(), 0);
    }

    #[test]
    fn duplicates_are_dropped_and_counted() {
        let p = parse_graph("2 2\n0 1\n0 1\n").unwrap();
        assert_eq!(p.graph.m(), 1);
        assert_eq!(p.duplicate_edges, 1);
    }

    #[test]
    fn parses_pace_header_one_based() {
        let p = parse_graph("c comment\np tw 4 3\n1 2\n2 3\n3 4\n").unwrap();
        assert_eq!(p.graph, path(4));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = parse_graph("3 2\n0 1\n1 7\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = parse_graph("3 1\n2 2\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_graph("3 1\n0 x\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        assert!(parse_graph("").is_err());
    }

    #[test]
    fn writer_round_trips() {
        let g = cycle(5);
        assert_eq!(parse_graph(&write_graph(&g)).unwrap().graph, g);
        assert_eq!(parse_graph(&write_gr(&g)).unwrap().graph, g);
    }

    #[test]
    fn component_counts() {
        let c4 = cycle(4);
        assert_eq!(c4.component_count(&[0, 1, 2, 3]), 1);
        let two_k2 = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(two_k2.component_count(&[0, 1, 2, 3]), 2);
        assert_eq!(path(4).component_count(&[0, 1, 3]), 2);
        assert_eq!(path(4).component_count(&[]), 0);
    }

    #[test]
    fn forest_tests() {
        let triangle = cycle(3);
        assert!(!triangle.is_forest(&[0, 1, 2]));
        assert!(path(4).is_forest(&[0, 1, 2, 3]));
        assert!(cycle(4).is_forest(&[0, 1, 2]));
        assert!(!cycle(4).is_forest(&[0, 1, 2, 3]));
    }

    #[test]
    fn classify_examples() {
        let p4 = path(4);
        let m = Matching::new([(0, 1), (2, 3)]);
        let c = classify_matching(&p4, &m, 2).unwrap();
        assert!(c.is_matching && !c.is_induced && c.is_acyclic);
        assert_eq!(c.components, 1);

        let two_k2 = Graph::new(4, [(0, 1), (2, 3)]).unwrap();
        let c = classify_matching(&two_k2, &m, 2).unwrap();
        assert!(c.is_induced && c.is_c_disconnected);
        assert_eq!(c.components, 2);

        let c4 = cycle(4);
        let c = classify_matching(&c4, &Matching::new([(0, 1), (2, 3)]), 1).unwrap();
        assert!(!c.is_induced && !c.is_acyclic);
        assert_eq!(c.components, 1);
    }

    #[test]
    fn classify_flags_non_matchings() {
        let p3 = path(3);
        let c = classify_matching(&p3, &Matching::new([(0, 1), (1, 2)]), 1).unwrap();
        assert!(!c.is_matching);
        assert_eq!(c.components, 1);
        assert!(classify_matching(&p3, &Matching::new([(0, 2)]), 1).is_err());
    }

    #[test]
    fn induced_subgraph_renumbers() {
        let (h, ids) = cycle(5).induced_subgraph(&[4, 0, 1]);
        assert_eq!(ids, vec![0, 1, 4]);
        assert_eq!(h.edges(), &[(0, 1), (0, 2)]);
    }
}
