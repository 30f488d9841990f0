//! From `k × k` Hitting Set to Disconnected Matching.
//!
//! The family `𝒮` is the input sets `S_1..S_m` followed by the rows
//! `P_1..P_k`. Vertex ids: `v^L_1..v^L_k`, then `v^R_1..v^R_k`, then one
//! vertex per cell of each member of `𝒮` in family order, then the gadget
//! vertices `u^L_i`, `u^R_j` and `u^X`.

use serde::{Deserialize, Serialize};

use crate::decomp::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::{classify_matching, Graph, Matching, Vertex};
use crate::oracle::{check_hitting_set, Cell};

/// Adds a vertex adjacent to exactly `x`.
pub fn add_star_gadget(g: &Graph, x: &[Vertex]) -> Result<(Graph, Vertex)> {
    if x.is_empty() {
        return Err(Error::InvalidInput("star gadget on an empty set".into()));
    }
    g.with_new_vertex(x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionInstance {
    pub graph: Graph,
    pub ell: usize,
    pub c: usize,
    pub k: usize,
    pub m: usize,
    /// `S_1..S_m, P_1..P_k`.
    pub family: Vec<Vec<Cell>>,
    /// `v^X` ids per member of the family, aligned with its cells.
    pub set_vertices: Vec<Vec<Vertex>>,
    /// `u^X` per member of the family.
    pub set_gadgets: Vec<Vertex>,
    pub path_decomposition: TreeDecomposition,
    /// Name of every vertex, by id.
    pub labels: Vec<String>,
}

/// JSON sidecar written next to an emitted instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionSidecar {
    pub k: usize,
    pub m: usize,
    pub ell: usize,
    pub c: usize,
    pub labels: Vec<String>,
}

impl ReductionInstance {
    pub fn left(&self, i: usize) -> Vertex {
        (i - 1) as Vertex
    }

    pub fn right(&self, j: usize) -> Vertex {
        (self.k + j - 1) as Vertex
    }

    pub fn left_gadget(&self, i: usize) -> Vertex {
        self.set_gadgets[0] - (2 * self.k - i + 1) as Vertex
    }

    pub fn right_gadget(&self, j: usize) -> Vertex {
        self.set_gadgets[0] - (self.k - j + 1) as Vertex
    }

    pub fn sidecar(&self) -> ReductionSidecar {
        ReductionSidecar {
            k: self.k,
            m: self.m,
            ell: self.ell,
            c: self.c,
            labels: self.labels.clone(),
        }
    }
}

fn member_name(m: usize, x: usize) -> String {
    if x < m {
        format!("S{}", x + 1)
    } else {
        format!("P{}", x - m + 1)
    }
}

/// Builds `(G, 3k + m, k)` together with its width-`3k` path
/// decomposition. Sets must be nonempty and hold at most one cell per row.
pub fn build_reduction(k: usize, sets: &[Vec<Cell>]) -> Result<ReductionInstance> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    check_hitting_set(k, sets)?;
    if let Some(s) = sets.iter().position(Vec::is_empty) {
        return Err(Error::InvalidInput(format!("set {} is empty", s + 1)));
    }
    let m = sets.len();
    let mut family: Vec<Vec<Cell>> = sets
        .iter()
        .map(|s| {
            let mut s = s.clone();
            s.sort_unstable();
            s
        })
        .collect();
    family.extend((1..=k).map(|i| (1..=k).map(|j| (i, j)).collect()));

    let mut labels: Vec<String> = (1..=k)
        .map(|i| format!("v^L_{i}"))
        .chain((1..=k).map(|j| format!("v^R_{j}")))
        .collect();
    let mut edges = Vec::new();
    let mut set_vertices = Vec::with_capacity(family.len());
    for (x, cells) in family.iter().enumerate() {
        let name = member_name(m, x);
        let mut ids = Vec::with_capacity(cells.len());
        for &(i, j) in cells {
            let v = labels.len() as Vertex;
            labels.push(format!("v^{name}_{{{i},{j}}}"));
            edges.push(((i - 1) as Vertex, v));
            edges.push((v, (k + j - 1) as Vertex));
            ids.push(v);
        }
        set_vertices.push(ids);
    }
    let mut graph = Graph::new(labels.len(), edges)?;

    let mut bags: Vec<Vec<Vertex>> = Vec::new();
    let sides: Vec<Vertex> = (0..2 * k as Vertex).collect();
    let bag_of = |x: usize| -> Vec<Vertex> { sides.iter().chain(&set_vertices[x]).copied().collect() };
    for v in 0..2 * k {
        let (g, u) = add_star_gadget(&graph, &[v as Vertex])?;
        graph = g;
        labels.push(if v < k {
            format!("u^L_{}", v + 1)
        } else {
            format!("u^R_{}", v - k + 1)
        });
        let mut bag = bag_of(0);
        bag.push(u);
        bags.push(bag);
    }
    let mut set_gadgets = Vec::with_capacity(family.len());
    for x in 0..family.len() {
        let (g, u) = add_star_gadget(&graph, &set_vertices[x])?;
        graph = g;
        labels.push(format!("u^{}", member_name(m, x)));
        set_gadgets.push(u);
        // B_X, then B_X with its gadget; the side gadgets hang after B_X1.
        if x > 0 {
            bags.push(bag_of(x));
        } else {
            bags.insert(0, bag_of(0));
        }
        let mut with = bag_of(x);
        with.push(u);
        bags.push(with);
    }
    let edges = (1..bags.len()).map(|i| (i - 1, i)).collect();
    Ok(ReductionInstance {
        graph,
        ell: 3 * k + m,
        c: k,
        k,
        m,
        family,
        set_vertices,
        set_gadgets,
        path_decomposition: TreeDecomposition::new(bags, edges),
        labels,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeClasses {
    /// `v^L_i u^L_i` and `v^R_j u^R_j`.
    pub type1: Vec<(Vertex, Vertex)>,
    /// `v^X_{i,j} u^X`.
    pub type2: Vec<(Vertex, Vertex)>,
    /// `v^L_i v^X_{i,j}` and `v^R_j v^X_{i,j}`.
    pub type3: Vec<(Vertex, Vertex)>,
}

/// Splits the edges into the three types. Refuses instances that do not
/// match a fresh construction from their own family.
pub fn classify_edges(inst: &ReductionInstance) -> Result<EdgeClasses> {
    let rebuilt = build_reduction(inst.k, &inst.family[..inst.m.min(inst.family.len())])
        .map_err(|e| Error::InvalidInput(format!("not a reduction instance: {e}")))?;
    if rebuilt != *inst {
        return Err(Error::InvalidInput(
            "not a reduction instance: graph differs from its construction".into(),
        ));
    }
    let side = 2 * inst.k as Vertex;
    let first_gadget = inst.set_gadgets[0] - side;
    let mut out = EdgeClasses::default();
    for &(u, v) in inst.graph.edges() {
        if u < side && v >= first_gadget {
            out.type1.push((u, v));
        } else if u < side {
            out.type3.push((u, v));
        } else {
            out.type2.push((u, v));
        }
    }
    Ok(out)
}

/// The matching built from a hitting set given as one column per row:
/// every side vertex with its pendant, and per member `X` of the family one
/// hit cell with `u^X`.
pub fn witness_from_hitting_set(inst: &ReductionInstance, columns: &[usize]) -> Result<Matching> {
    if columns.len() != inst.k {
        return Err(Error::InvalidInput(format!(
            "expected {} columns, got {}",
            inst.k,
            columns.len()
        )));
    }
    let mut edges = Vec::new();
    for i in 1..=inst.k {
        edges.push((inst.left(i), inst.left_gadget(i)));
        edges.push((inst.right(i), inst.right_gadget(i)));
    }
    for (x, cells) in inst.family.iter().enumerate() {
        let Some(p) = cells.iter().position(|&(i, j)| columns[i - 1] == j) else {
            return Err(Error::InvalidInput(format!("{} is not hit", member_name(inst.m, x))));
        };
        edges.push((inst.set_vertices[x][p], inst.set_gadgets[x]));
    }
    Ok(Matching::new(edges))
}

/// Replaces every matched `v^L_i v^X` (or `v^R_j v^X`) edge by the pendant
/// edge at the same side vertex. Size is kept and the number of
/// components of `G[V_M]` never drops.
pub fn normalize_matching(inst: &ReductionInstance, m: &Matching) -> Matching {
    let side = 2 * inst.k as Vertex;
    Matching::new(m.edges().iter().map(|&(u, v)| {
        let is_type3 = u < side && v >= side && v < inst.set_gadgets[0] - side;
        if !is_type3 {
            (u, v)
        } else if (u as usize) < inst.k {
            (u, inst.left_gadget(u as usize + 1))
        } else {
            (u, inst.right_gadget(u as usize - inst.k + 1))
        }
    }))
}

/// Checks that `m` is a matching of the instance with `3k + m` edges whose
/// saturated vertices induce exactly `k` components.
pub fn is_forward_witness(inst: &ReductionInstance, m: &Matching) -> Result<bool> {
    let cls = classify_matching(&inst.graph, m, inst.c)?;
    Ok(cls.is_matching && m.len() == inst.ell && cls.components == inst.k)
}
