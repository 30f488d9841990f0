use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;

use super::td::{validate_td, TdViolation, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Leaf,
    IntroduceVertex(Vertex),
    /// Endpoints stored with the smaller id first.
    IntroduceEdge(Vertex, Vertex),
    Forget(Vertex),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted ascending.
    pub bag: Vec<Vertex>,
    pub children: Vec<usize>,
}

/// Nodes in post-order; every child index is smaller than its parent and
/// the root is the last node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NiceDecomposition {
    pub nodes: Vec<NiceNode>,
}

impl NiceDecomposition {
    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|x| x.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    pub fn count(&self, pred: impl Fn(&NodeKind) -> bool) -> usize {
        self.nodes.iter().filter(|x| pred(&x.kind)).count()
    }

    fn parents(&self) -> Vec<Option<usize>> {
        let mut parent = vec![None; self.nodes.len()];
        for (i, x) in self.nodes.iter().enumerate() {
            for &c in &x.children {
                if c < parent.len() {
                    parent[c] = Some(i);
                }
            }
        }
        parent
    }
}

fn with(bag: &[Vertex], v: Vertex) -> Vec<Vertex> {
    let mut b = bag.to_vec();
    if let Err(p) = b.binary_search(&v) {
        b.insert(p, v);
    }
    b
}

fn without(bag: &[Vertex], v: Vertex) -> Vec<Vertex> {
    bag.iter().copied().filter(|&x| x != v).collect()
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<Vertex>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Walks from node `at` to a node with bag `target`: forgets first, then
    /// introduces, each in ascending vertex order.
    fn transition(&mut self, mut at: usize, target: &[Vertex]) -> usize {
        let from = self.nodes[at].bag.clone();
        for &v in from.iter().filter(|v| target.binary_search(v).is_err()) {
            let bag = without(&self.nodes[at].bag, v);
            at = self.push(NodeKind::Forget(v), bag, vec![at]);
        }
        for &v in target.iter().filter(|v| from.binary_search(v).is_err()) {
            let bag = with(&self.nodes[at].bag, v);
            at = self.push(NodeKind::IntroduceVertex(v), bag, vec![at]);
        }
        at
    }
}

/// Converts a tree decomposition into a nice decomposition with introduce-edge
/// nodes placed by the deferred-edge rule: edge uv, where u is forgotten
/// first, is introduced directly below Forget(u). Edges sharing u appear in
/// ascending order of the other endpoint, the smallest one lowest.
pub fn make_nice_deferred(g: &Graph, td: &TreeDecomposition) -> Result<NiceDecomposition> {
    let violations = validate_td(g, td)?;
    if let Some(v) = violations.first() {
        return Err(Error::InvalidDecomposition(format!(
            "{v} ({} violation(s) in total)",
            violations.len()
        )));
    }
    let mut b = Builder { nodes: Vec::new() };
    if td.is_empty() {
        b.push(NodeKind::Leaf, vec![], vec![]);
        return Ok(NiceDecomposition { nodes: b.nodes });
    }

    // Root the tree at node 0 and visit in post-order without recursion.
    let adj = td.adjacency();
    let k = td.len();
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut top = vec![usize::MAX; k];
    for &x in order.iter().rev() {
        let target = &td.bags[x];
        let mut acc: Option<usize> = None;
        for &c in &adj[x] {
            if c == parent[x] || parent[c] != x {
                continue;
            }
            let t = b.transition(top[c], target);
            acc = Some(match acc {
                None => t,
                Some(a) => b.push(NodeKind::Join, target.clone(), vec![a, t]),
            });
        }
        top[x] = match acc {
            Some(a) => a,
            None => {
                let leaf = b.push(NodeKind::Leaf, vec![], vec![]);
                b.transition(leaf, target)
            }
        };
    }
    let root = b.transition(top[0], &[]);

    // Thread introduce-edge chains below each Forget(u).
    let mut forget_at = vec![usize::MAX; g.n()];
    for (i, x) in b.nodes.iter().enumerate() {
        if let NodeKind::Forget(v) = x.kind {
            forget_at[v as usize] = i;
        }
    }
    let mut pending: Vec<Vec<(Vertex, Vertex)>> = vec![Vec::new(); b.nodes.len()];
    for &(u, v) in g.edges() {
        // Node indices grow toward the root, so the smaller index is lower.
        let fu = forget_at[u as usize];
        let fv = forget_at[v as usize];
        pending[fu.min(fv)].push((u, v));
    }
    for f in 0..pending.len() {
        if pending[f].is_empty() {
            continue;
        }
        let NodeKind::Forget(w) = b.nodes[f].kind else {
            unreachable!()
        };
        let mut list = std::mem::take(&mut pending[f]);
        list.sort_by_key(|&(u, v)| if u == w { v } else { u });
        let mut at = b.nodes[f].children[0];
        for (u, v) in list {
            let bag = b.nodes[at].bag.clone();
            at = b.push(NodeKind::IntroduceEdge(u, v), bag, vec![at]);
        }
        b.nodes[f].children[0] = at;
    }

    Ok(NiceDecomposition {
        nodes: renumber_post_order(b.nodes, root),
    })
}

fn renumber_post_order(nodes: Vec<NiceNode>, root: usize) -> Vec<NiceNode> {
    let mut new_id = vec![usize::MAX; nodes.len()];
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![(root, false)];
    while let Some((x, expanded)) = stack.pop() {
        if expanded {
            new_id[x] = order.len();
            order.push(x);
        } else {
            stack.push((x, true));
            for &c in nodes[x].children.iter().rev() {
                stack.push((c, false));
            }
        }
    }
    let mut slots: Vec<Option<NiceNode>> = nodes.into_iter().map(Some).collect();
    order
        .into_iter()
        .map(|x| {
            let mut node = slots[x].take().expect("node visited twice");
            for c in &mut node.children {
                *c = new_id[*c];
            }
            node
        })
        .collect()
}

/// Min-fill decomposition made nice.
pub fn nice_min_fill(g: &Graph) -> NiceDecomposition {
    let td = super::min_fill_decompose(g);
    make_nice_deferred(g, &td).expect("min-fill output is a valid decomposition")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NiceViolation {
    Empty,
    RootBagNotEmpty(usize),
    LeafBagNotEmpty(usize),
    UnsortedBag(usize),
    BadNode { node: usize, reason: String },
    Structure(String),
    Td(TdViolation),
    EdgeMultiplicity { u: Vertex, v: Vertex, count: usize },
    NonEdgeIntroduced { node: usize, u: Vertex, v: Vertex },
    DeferredPlacement { node: usize, u: Vertex, v: Vertex },
    JoinBagMismatch(usize),
    EdgeBelowJoin { join: usize, u: Vertex, v: Vertex },
    ForgetMultiplicity { v: Vertex, count: usize },
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use NiceViolation::*;
        match self {
            Empty => write!(f, "decomposition has no nodes"),
            RootBagNotEmpty(x) => write!(f, "root bag not empty at node {x}"),
            LeafBagNotEmpty(x) => write!(f, "leaf bag not empty at node {x}"),
            UnsortedBag(x) => write!(f, "bag of node {x} is not sorted and distinct"),
            BadNode { node, reason } => write!(f, "node {node}: {reason}"),
            Structure(s) => write!(f, "structure: {s}"),
            Td(v) => write!(f, "{v}"),
            EdgeMultiplicity { u, v, count } => {
                write!(f, "edge multiplicity: ({u}, {v}) introduced {count} times")
            }
            NonEdgeIntroduced { node, u, v } => {
                write!(f, "node {node} introduces ({u}, {v}), which is not an edge")
            }
            DeferredPlacement { node, u, v } => write!(
                f,
                "deferred edge: ({u}, {v}) at node {node} is not directly below a forget of an endpoint"
            ),
            JoinBagMismatch(x) => write!(f, "join bag mismatch at node {x}"),
            EdgeBelowJoin { join, u, v } => {
                write!(
                    f,
                    "edge ({u}, {v}) is introduced below join {join} whose bag holds both ends"
                )
            }
            ForgetMultiplicity { v, count } => {
                write!(f, "vertex {v} is forgotten {count} times")
            }
        }
    }
}

/// Checks every structural property the dynamic programs rely on.
pub fn validate_nice(g: &Graph, nd: &NiceDecomposition) -> Vec<NiceViolation> {
    use NiceViolation::*;
    let mut out = Vec::new();
    if nd.is_empty() {
        return vec![Empty];
    }
    let k = nd.len();
    let mut parent_count = vec![0usize; k];
    let mut structure_ok = true;
    for (i, x) in nd.nodes.iter().enumerate() {
        for &c in &x.children {
            if c >= i {
                out.push(Structure(format!("node {i} has child {c} not before it")));
                structure_ok = false;
            } else {
                parent_count[c] += 1;
            }
        }
    }
    for (i, &p) in parent_count.iter().enumerate() {
        let want = usize::from(i + 1 != k);
        if p != want {
            out.push(Structure(format!("node {i} has {p} parents, expected {want}")));
            structure_ok = false;
        }
    }
    if !structure_ok {
        return out;
    }
    let root = nd.root();
    if !nd.nodes[root].bag.is_empty() {
        out.push(RootBagNotEmpty(root));
    }
    let n = g.n();
    for (i, x) in nd.nodes.iter().enumerate() {
        if x.bag.windows(2).any(|w| w[0] >= w[1]) {
            out.push(UnsortedBag(i));
        }
        let bad = |reason: &str| BadNode {
            node: i,
            reason: reason.to_string(),
        };
        let child = |j: usize| &nd.nodes[x.children[j]].bag;
        match x.kind {
            NodeKind::Leaf => {
                if !x.children.is_empty() {
                    out.push(bad("leaf with children"));
                } else if !x.bag.is_empty() {
                    out.push(LeafBagNotEmpty(i));
                }
            }
            NodeKind::Join => {
                if x.children.len() != 2 {
                    out.push(bad("join needs two children"));
                } else if child(0) != &x.bag || child(1) != &x.bag {
                    out.push(JoinBagMismatch(i));
                }
            }
            kind => {
                if x.children.len() != 1 {
                    out.push(bad("introduce/forget needs one child"));
                    continue;
                }
                let c = child(0);
                match kind {
                    NodeKind::IntroduceVertex(v) => {
                        if c.contains(&v) || with(c, v) != x.bag {
                            out.push(bad("introduce-vertex bag is not child bag plus v"));
                        }
                    }
                    NodeKind::Forget(v) => {
                        if !c.contains(&v) || without(c, v) != x.bag {
                            out.push(bad("forget bag is not child bag minus v"));
                        }
                    }
                    NodeKind::IntroduceEdge(u, v) => {
                        if c != &x.bag || !x.bag.contains(&u) || !x.bag.contains(&v) {
                            out.push(bad("introduce-edge must keep the bag and hold both ends"));
                        }
                    }
                    _ => unreachable!(),
                }
            }
        }
        for &v in &x.bag {
            if (v as usize) >= n {
                out.push(Td(TdViolation::ForeignVertex(v)));
            }
        }
    }
    if !out.is_empty() {
        return out;
    }

    let td = TreeDecomposition::new(
        nd.nodes.iter().map(|x| x.bag.clone()).collect(),
        nd.nodes
            .iter()
            .enumerate()
            .flat_map(|(i, x)| x.children.iter().map(move |&c| (c, i)))
            .collect(),
    );
    match validate_td(g, &td) {
        Ok(v) => out.extend(v.into_iter().map(Td)),
        Err(e) => out.push(Structure(e.to_string())),
    }

    let mut forgets = vec![0usize; n];
    let mut intro: HashMap<(Vertex, Vertex), usize> = HashMap::new();
    for x in &nd.nodes {
        match x.kind {
            NodeKind::Forget(v) => forgets[v as usize] += 1,
            NodeKind::IntroduceEdge(u, v) => *intro.entry((u.min(v), u.max(v))).or_insert(0) += 1,
            _ => {}
        }
    }
    for (v, &count) in forgets.iter().enumerate() {
        if count != 1 {
            out.push(ForgetMultiplicity { v: v as Vertex, count });
        }
    }
    for &(u, v) in g.edges() {
        let count = intro.get(&(u, v)).copied().unwrap_or(0);
        if count != 1 {
            out.push(EdgeMultiplicity { u, v, count });
        }
    }

    let parent = nd.parents();
    for (i, x) in nd.nodes.iter().enumerate() {
        let NodeKind::IntroduceEdge(u, v) = x.kind else {
            continue;
        };
        if !g.has_edge(u, v) {
            out.push(NonEdgeIntroduced { node: i, u, v });
        }
        let mut p = parent[i];
        while let Some(j) = p {
            if !matches!(nd.nodes[j].kind, NodeKind::IntroduceEdge(..)) {
                break;
            }
            p = parent[j];
        }
        let placed = matches!(p.map(|j| nd.nodes[j].kind), Some(NodeKind::Forget(w)) if w == u || w == v);
        if !placed {
            out.push(DeferredPlacement { node: i, u, v });
        }
        // Walk up while both ends stay in the bag; no join may appear there.
        let mut p = parent[i];
        while let Some(j) = p {
            let bag = &nd.nodes[j].bag;
            if bag.binary_search(&u).is_err() || bag.binary_search(&v).is_err() {
                break;
            }
            if nd.nodes[j].kind == NodeKind::Join {
                out.push(EdgeBelowJoin { join: j, u, v });
                break;
            }
            p = parent[j];
        }
    }
    out
}

/// Debug listing, one node per line in post-order.
pub fn write_nice_debug(nd: &NiceDecomposition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "nodes {} width {}", nd.len(), nd.width());
    for (i, x) in nd.nodes.iter().enumerate() {
        let kind = match x.kind {
            NodeKind::Leaf => "leaf".to_string(),
            NodeKind::IntroduceVertex(v) => format!("introduce-vertex {v}"),
            NodeKind::IntroduceEdge(u, v) => format!("introduce-edge {u} {v}"),
            NodeKind::Forget(v) => format!("forget {v}"),
            NodeKind::Join => "join".to_string(),
        };
        let _ = writeln!(out, "{i}: {kind} bag {:?} children {:?}", x.bag, x.children);
    }
    out
}
