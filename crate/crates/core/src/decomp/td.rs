use std::fmt;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

/// A tree decomposition: bags on the nodes of an undirected tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    /// Sorted, deduplicated bags.
    pub bags: Vec<Vec<Vertex>>,
    /// Undirected tree edges between bag indices.
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<Vertex>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        Self { bags, edges }
    }

    /// Largest bag size minus one (-1 for a decomposition without vertices is
    /// reported as 0).
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Checks that the node set with `edges` forms a tree with valid indices.
    pub(crate) fn check_tree(&self) -> Result<()> {
        let k = self.bags.len();
        if let Some(&(a, b)) = self.edges.iter().find(|&&(a, b)| a >= k || b >= k || a == b) {
            return Err(Error::InvalidDecomposition(format!(
                "tree edge ({a}, {b}) is not between two distinct nodes"
            )));
        }
        if k == 0 {
            return if self.edges.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidDecomposition("edges without nodes".into()))
            };
        }
        if self.edges.len() != k - 1 {
            return Err(Error::InvalidDecomposition(format!(
                "{} nodes need {} tree edges, found {}",
                k,
                k - 1,
                self.edges.len()
            )));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; k];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != k {
            return Err(Error::InvalidDecomposition("tree edges are not connected".into()));
        }
        Ok(())
    }
}

/// A failed tree-decomposition condition, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TdViolation {
    /// T.1: vertex in no bag.
    UncoveredVertex(Vertex),
    /// T.2: edge in no bag.
    UncoveredEdge(Vertex, Vertex),
    /// T.3: nodes holding the vertex do not form a subtree.
    DisconnectedOccurrences(Vertex),
    /// A bag names a vertex outside the graph.
    ForeignVertex(Vertex),
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TdViolation::UncoveredVertex(v) => write!(f, "T.1: vertex {v} is in no bag"),
            TdViolation::UncoveredEdge(u, v) => write!(f, "T.2: edge ({u}, {v}) is in no bag"),
            TdViolation::DisconnectedOccurrences(v) => {
                write!(f, "T.3: bags containing vertex {v} are not connected")
            }
            TdViolation::ForeignVertex(v) => write!(f, "bag contains unknown vertex {v}"),
        }
    }
}

/// Returns every violated condition; an empty list means `td` is a tree
/// decomposition of `g`. Structural problems with the tree itself are errors.
pub fn validate_td(g: &Graph, td: &TreeDecomposition) -> Result<Vec<TdViolation>> {
    td.check_tree()?;
    let n = g.n();
    let mut violations = Vec::new();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v as usize >= n {
                violations.push(TdViolation::ForeignVertex(v));
            } else {
                holders[v as usize].push(i);
            }
        }
    }
    for v in 0..n {
        if holders[v].is_empty() {
            violations.push(TdViolation::UncoveredVertex(v as Vertex));
        }
    }
    for &(u, v) in g.edges() {
        let covered = holders[u as usize]
            .iter()
            .any(|&i| td.bags[i].binary_search(&v).is_ok());
        if !covered {
            violations.push(TdViolation::UncoveredEdge(u, v));
        }
    }
    let adj = td.adjacency();
    let mut mark = vec![usize::MAX; td.len()];
    for v in 0..n {
        let nodes = &holders[v];
        if nodes.len() <= 1 {
            continue;
        }
        for &x in nodes {
            mark[x] = v;
        }
        // Flood fill within the nodes holding v.
        let mut stack = vec![nodes[0]];
        let mut reached = 1;
        mark[nodes[0]] = usize::MAX - 1;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if mark[y] == v {
                    mark[y] = usize::MAX - 1;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != nodes.len() {
            violations.push(TdViolation::DisconnectedOccurrences(v as Vertex));
        }
        for &x in nodes {
            mark[x] = usize::MAX;
        }
    }
    Ok(violations)
}

/// Parses the PACE `.td` format (1-based bag and vertex ids).
pub fn parse_td(text: &str) -> Result<TreeDecomposition> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'));
    let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `s td` line"))?;
    let t: Vec<&str> = header.split_whitespace().collect();
    let ["s", "td", nbags, _max_bag, _n] = t.as_slice() else {
        return Err(Error::parse(hl, "expected `s td <bags> <width+1> <n>`"));
    };
    let nbags: usize = nbags
        .parse()
        .map_err(|_| Error::parse(hl, "bag count is not an integer"))?;
    let mut bags: Vec<Option<Vec<Vertex>>> = vec![None; nbags];
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let t: Vec<&str> = line.split_whitespace().collect();
        let nums = |toks: &[&str]| -> Result<Vec<usize>> {
            toks.iter()
                .map(|s| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&x| x >= 1)
                        .ok_or_else(|| Error::parse(ln, format!("`{s}` is not a 1-based id")))
                })
                .collect()
        };
        if t[0] == "b" {
            let ids = nums(&t[1..])?;
            let Some((&id, verts)) = ids.split_first() else {
                return Err(Error::parse(ln, "bag line without an id"));
            };
            if id > nbags {
                return Err(Error::parse(ln, format!("bag id {id} exceeds {nbags}")));
            }
            let slot = &mut bags[id - 1];
            if slot.is_some() {
                return Err(Error::parse(ln, format!("bag {id} defined twice")));
            }
            *slot = Some(verts.iter().map(|&v| (v - 1) as Vertex).collect());
        } else {
            let ids = nums(&t)?;
            let [a, b] = ids.as_slice() else {
                return Err(Error::parse(ln, "expected a tree edge `i j`"));
            };
            if *a > nbags || *b > nbags {
                return Err(Error::parse(ln, "tree edge names an unknown bag"));
            }
            edges.push((a - 1, b - 1));
        }
    }
    let bags = bags
        .into_iter()
        .enumerate()
        .map(|(i, b)| b.ok_or_else(|| Error::parse(hl, format!("bag {} is missing", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeDecomposition::new(bags, edges))
}

pub fn write_td(td: &TreeDecomposition, n: usize) -> String {
    let mut out = format!("s td {} {} {}\n", td.len(), td.width() + 1, n);
    for (i, bag) in td.bags.iter().enumerate() {
        let _ = write!(out, "b {}", i + 1);
        for &v in bag {
            let _ = write!(out, " {}", v + 1);
        }
        out.push('\n');
    }
    for &(a, b) in &td.edges {
        let _ = writeln!(out, "{} {}", a + 1, b + 1);
    }
    out
}

/// Sweep path decomposition of width `rows` for [`crate::generate::grid`].
///
/// Each bag holds the tail of one column and the head of the next, so
/// every bag has `rows + 1` vertices (a single column when `cols == 1`).
pub fn grid_path_decomposition(rows: usize, cols: usize) -> TreeDecomposition {
    let id = |r: usize, c: usize| (c * rows + r) as Vertex;
    let mut bags = Vec::new();
    if cols == 1 {
        bags.push((0..rows).map(|r| id(r, 0)).collect());
    }
    for c in 0..cols.saturating_sub(1) {
        for r in 0..rows {
            let bag: Vec<Vertex> = (r..rows)
                .map(|q| id(q, c))
                .chain((0..=r).map(|q| id(q, c + 1)))
                .collect();
            bags.push(bag);
        }
    }
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    TreeDecomposition::new(bags, edges)
}

/// The sweep of [`grid_path_decomposition`] with a copy of every bag hung
/// off it as a leaf, so the nice form has one join per sweep bag at full
/// width.
pub fn grid_branched_decomposition(rows: usize, cols: usize) -> TreeDecomposition {
    let sweep = grid_path_decomposition(rows, cols);
    let len = sweep.bags.len();
    let mut bags = sweep.bags.clone();
    bags.extend(sweep.bags);
    let mut edges = sweep.edges;
    edges.extend((0..len).map(|i| (i, len + i)));
    TreeDecomposition::new(bags, edges)
}
