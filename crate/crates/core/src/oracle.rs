//! Exhaustive ground truth for small instances.
//!
//! Every matching predicate here depends only on the saturated set `V_M`,
//! so the matching numbers are computed over vertex subsets that admit a
//! perfect matching rather than over individual matchings.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::acyclic::{Tag, WeightAssignment};
use crate::error::{Error, Result};
use crate::graph::{Graph, Matching, Vertex};

/// Largest graph accepted by the subset-based oracles.
pub const MAX_ORACLE_N: usize = 16;
/// Largest graph accepted by [`enumerate_cut_parity`].
pub const MAX_CUT_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub mu: usize,
    pub mu_induced: usize,
    pub mu_acyclic: usize,
    /// `c -> μ_{c,discon}`, `None` when no matching induces `c` components.
    pub mu_cdiscon: BTreeMap<usize, Option<usize>>,
    /// A maximum matching, a maximum induced matching and a maximum acyclic
    /// matching, in that order.
    pub witnesses: Vec<Matching>,
    /// One maximum witness per `c` with `Some` value in `mu_cdiscon`.
    pub cdiscon_witnesses: BTreeMap<usize, Matching>,
}

/// Bit-parallel view of a graph on at most 64 vertices.
pub(crate) struct Masks {
    pub adj: Vec<u64>,
}

impl Masks {
    pub fn new(g: &Graph) -> Self {
        assert!(g.n() <= 64);
        let adj = (0..g.n() as Vertex)
            .map(|v| g.neighbors(v).iter().fold(0u64, |m, &w| m | 1 << w))
            .collect();
        Self { adj }
    }

    pub fn edges_within(&self, set: u64) -> u32 {
        let mut total = 0;
        let mut s = set;
        while s != 0 {
            let v = s.trailing_zeros() as usize;
            s &= s - 1;
            total += (self.adj[v] & set).count_ones();
        }
        total / 2
    }

    pub fn components(&self, set: u64) -> u32 {
        let mut left = set;
        let mut count = 0;
        while left != 0 {
            count += 1;
            let mut frontier = left & left.wrapping_neg();
            let mut seen = frontier;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let next = self.adj[v] & set & !seen;
                seen |= next;
                frontier |= next;
            }
            left &= !seen;
        }
        count
    }
}

/// For every subset S, a mate for the lowest vertex of S in some perfect
/// matching of G[S] (`u8::MAX` if none exists; the empty set is matched).
fn perfect_matchable(masks: &Masks, n: usize) -> Vec<u8> {
    let mut mate = vec![u8::MAX; 1 << n];
    mate[0] = 0;
    for s in 1u64..1 << n {
        if s.count_ones() % 2 == 1 {
            continue;
        }
        let v = s.trailing_zeros();
        let mut cand = masks.adj[v as usize] & s;
        while cand != 0 {
            let w = cand.trailing_zeros();
            cand &= cand - 1;
            if mate[(s & !(1 << v) & !(1 << w)) as usize] != u8::MAX {
                mate[s as usize] = w as u8;
                break;
            }
        }
    }
    mate
}

fn rebuild(mate: &[u8], mut s: u64) -> Matching {
    let mut edges = Vec::new();
    while s != 0 {
        let v = s.trailing_zeros();
        let w = mate[s as usize] as u32;
        edges.push((v, w));
        s &= !(1 << v) & !(1 << w);
    }
    Matching::new(edges)
}

/// All four matching numbers by exhaustive search, for `n <= 16`.
pub fn brute_matching_numbers(g: &Graph, c_max: usize) -> Result<OracleReport> {
    let n = g.n();
    if n > MAX_ORACLE_N {
        return Err(Error::TooLarge(format!("oracle needs n <= {MAX_ORACLE_N}, got {n}")));
    }
    let masks = Masks::new(g);
    let mate = perfect_matchable(&masks, n);
    let mut best = [0u64; 3];
    let mut best_size = [0u32; 3];
    let mut cdisc: Vec<Option<(u32, u64)>> = vec![None; c_max + 1];
    for s in 0u64..1 << n {
        if mate[s as usize] == u8::MAX {
            continue;
        }
        let size = s.count_ones() / 2;
        let e = masks.edges_within(s);
        let cc = masks.components(s);
        let flags = [true, e == size, cc + e == s.count_ones()];
        for i in 0..3 {
            if flags[i] && size > best_size[i] {
                best_size[i] = size;
                best[i] = s;
            }
        }
        for (c, slot) in cdisc.iter_mut().enumerate().skip(1) {
            if cc as usize >= c && slot.is_none_or(|(b, _)| size > b) {
                *slot = Some((size, s));
            }
        }
    }
    Ok(OracleReport {
        mu: best_size[0] as usize,
        mu_induced: best_size[1] as usize,
        mu_acyclic: best_size[2] as usize,
        mu_cdiscon: (1..=c_max).map(|c| (c, cdisc[c].map(|(b, _)| b as usize))).collect(),
        witnesses: best.iter().map(|&s| rebuild(&mate, s)).collect(),
        cdiscon_witnesses: (1..=c_max)
            .filter_map(|c| cdisc[c].map(|(_, s)| (c, rebuild(&mate, s))))
            .collect(),
    })
}

/// Checks both chains relating the matching numbers; returns a description
/// of the first violation.
pub fn check_chains(r: &OracleReport) -> std::result::Result<(), String> {
    if !(r.mu >= r.mu_acyclic && r.mu_acyclic >= r.mu_induced) {
        return Err(format!(
            "mu {} >= acyclic {} >= induced {} fails",
            r.mu, r.mu_acyclic, r.mu_induced
        ));
    }
    if r.mu >= 1 && r.mu_cdiscon.get(&1).is_some_and(|&v| v != Some(r.mu)) {
        return Err(format!("mu_1,discon differs from mu {}", r.mu));
    }
    let mut prev = Some(r.mu);
    for (&c, &v) in &r.mu_cdiscon {
        if v > prev {
            return Err(format!("mu_{c},discon {v:?} exceeds the previous value {prev:?}"));
        }
        if c <= r.mu_induced && v.is_none_or(|x| x < r.mu_induced) {
            return Err(format!("mu_{c},discon {v:?} below induced {}", r.mu_induced));
        }
        if c > r.mu_induced && v.is_some() {
            return Err(format!("{c} components exceed the induced matching number"));
        }
        prev = v;
    }
    Ok(())
}

/// Searches for a matching with at least `ell` edges whose saturated
/// vertices induce at least `c` components. Branches on the lowest
/// undecided vertex (skip it, or match it to a later neighbour) with at
/// most `n - 2 ell` skips, so it reaches well beyond the subset oracle on
/// sparse graphs.
pub fn has_disconnected_matching(g: &Graph, ell: usize, c: usize) -> Result<Option<Matching>> {
    let n = g.n();
    if n > 64 {
        return Err(Error::TooLarge(format!("search needs n <= 64, got {n}")));
    }
    if 2 * ell > n {
        return Ok(None);
    }
    let masks = Masks::new(g);
    struct Search<'a> {
        masks: &'a Masks,
        n: usize,
        c: u32,
        chosen: Vec<(Vertex, Vertex)>,
    }
    impl Search<'_> {
        fn go(&mut self, decided: u64, saturated: u64, skips: usize) -> bool {
            let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
            let open = full & !decided;
            if open == 0 {
                return self.masks.components(saturated) >= self.c;
            }
            let v = open.trailing_zeros();
            let bit = 1u64 << v;
            let mut cand = self.masks.adj[v as usize] & open & !bit;
            while cand != 0 {
                let w = cand.trailing_zeros();
                cand &= cand - 1;
                let pair = bit | 1 << w;
                self.chosen.push((v, w));
                if self.go(decided | pair, saturated | pair, skips) {
                    return true;
                }
                self.chosen.pop();
            }
            skips > 0 && self.go(decided | bit, saturated, skips - 1)
        }
    }
    let mut s = Search {
        masks: &masks,
        n,
        c: c as u32,
        chosen: Vec::new(),
    };
    Ok(s.go(0, 0, n - 2 * ell).then(|| Matching::new(s.chosen)))
}

/// A cell `(row, column)` of the `k × k` grid, both 1-based.
pub type Cell = (usize, usize);

/// Validates a `k × k` Hitting Set input: cells in range and at most one
/// cell per row in every set.
pub fn check_hitting_set(k: usize, sets: &[Vec<Cell>]) -> Result<()> {
    for (i, set) in sets.iter().enumerate() {
        let mut rows = vec![false; k + 1];
        for &(r, col) in set {
            if r == 0 || r > k || col == 0 || col > k {
                return Err(Error::InvalidInput(format!(
                    "set {} has cell ({r},{col}) outside the {k}x{k} grid",
                    i + 1
                )));
            }
            if std::mem::replace(&mut rows[r], true) {
                return Err(Error::InvalidInput(format!("set {} has two cells in row {r}", i + 1)));
            }
        }
    }
    Ok(())
}

/// Tries all `k^k` row choices. Returns the chosen column per row when
/// some choice hits every set.
pub fn brute_hitting_set(k: usize, sets: &[Vec<Cell>]) -> Result<Option<Vec<usize>>> {
    if k > 6 {
        return Err(Error::TooLarge(format!("hitting set oracle needs k <= 6, got {k}")));
    }
    check_hitting_set(k, sets)?;
    let mut choice = vec![1usize; k];
    loop {
        if sets.iter().all(|s| s.iter().any(|&(r, c)| choice[r - 1] == c)) {
            return Ok(Some(choice));
        }
        // Advance the odometer.
        let mut i = 0;
        while i < k && choice[i] == k {
            choice[i] = 1;
            i += 1;
        }
        if i == k {
            return Ok(None);
        }
        choice[i] += 1;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCounts {
    /// Candidates `(X, P)`.
    pub r_count: u64,
    /// Candidates that are forests with a marker in every component.
    pub s_count: u64,
    /// Candidates paired with a consistent cut that puts `P` on the left.
    pub c_count: u64,
}

/// Key `(A, B, C, W)`.
pub type CutKey = (usize, usize, usize, u64);

/// Counts for every reachable `(A, B, C, W)` by enumerating sets `X` with a
/// perfect matching, marker sets `P ⊆ X` and cuts `(X_l, X_r)` directly.
pub fn cut_parity_table(g: &Graph, w: &WeightAssignment) -> Result<HashMap<CutKey, CutCounts>> {
    let n = g.n();
    if n > MAX_CUT_N {
        return Err(Error::TooLarge(format!(
            "cut enumeration needs n <= {MAX_CUT_N}, got {n}"
        )));
    }
    let masks = Masks::new(g);
    let mate = perfect_matchable(&masks, n);
    let weight = |set: u64, tag: Tag| -> u64 {
        (0..n as Vertex)
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| w.get(v, tag) as u64)
            .sum()
    };
    let mut table: HashMap<CutKey, CutCounts> = HashMap::new();
    for x in 0u64..1 << n {
        if mate[x as usize] == u8::MAX {
            continue;
        }
        let a = x.count_ones() as usize;
        let b = masks.edges_within(x) as usize;
        let forest = masks.components(x) as usize + b == a;
        let wx = weight(x, Tag::F);
        // Consistent cuts of G[X]: no edge between the two sides.
        let cuts: Vec<u64> = subsets(x)
            .filter(|&l| {
                let r = x & !l;
                (0..n).all(|v| l >> v & 1 == 0 || masks.adj[v] & r == 0)
            })
            .collect();
        for p in subsets(x) {
            let key = (a, b, p.count_ones() as usize, wx + weight(p, Tag::P));
            let e = table.entry(key).or_default();
            e.r_count += 1;
            if forest && every_component_marked(&masks, x, p) {
                e.s_count += 1;
            }
            e.c_count += cuts.iter().filter(|&&l| p & !l == 0).count() as u64;
        }
    }
    Ok(table)
}

fn every_component_marked(masks: &Masks, x: u64, p: u64) -> bool {
    // Removing the components that contain markers must leave nothing.
    let mut seen = p;
    let mut frontier = p;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let next = masks.adj[v] & x & !seen;
        seen |= next;
        frontier |= next;
    }
    seen == x
}

fn subsets(set: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == set {
            None
        } else {
            Some((cur.wrapping_sub(set)) & set)
        };
        Some(cur)
    })
}

/// Counts of the three families for one `(A, B, C, W)`.
pub fn enumerate_cut_parity(
    g: &Graph,
    w: &WeightAssignment,
    a: usize,
    b: usize,
    c: usize,
    weight: u64,
) -> Result<CutCounts> {
    Ok(cut_parity_table(g, w)?
        .get(&(a, b, c, weight))
        .copied()
        .unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acyclic::sample_weights;
    use crate::generate::{all_labelled, complete, cycle, matching_graph, path};
    use crate::graph::classify_matching;

    #[test]
    fn small_numbers() {
        let r = brute_matching_numbers(&cycle(4), 2).unwrap();
        assert_eq!((r.mu, r.mu_acyclic, r.mu_induced), (2, 1, 1));
        let r = brute_matching_numbers(&path(4), 2).unwrap();
        assert_eq!((r.mu, r.mu_acyclic, r.mu_induced), (2, 2, 1));
        assert_eq!(r.mu_cdiscon[&2], None);
        let r = brute_matching_numbers(&matching_graph(2), 2).unwrap();
        assert_eq!((r.mu, r.mu_induced, r.mu_cdiscon[&2]), (2, 2, Some(2)));
        assert!(brute_matching_numbers(&Graph::empty(17), 1).is_err());
    }

    #[test]
    fn witnesses_classify_and_chains_hold() {
        for n in 0..=5 {
            for g in all_labelled(n) {
                let r = brute_matching_numbers(&g, 3).unwrap();
                check_chains(&r).unwrap();
                let cls: Vec<_> = r
                    .witnesses
                    .iter()
                    .map(|m| classify_matching(&g, m, 1).unwrap())
                    .collect();
                assert_eq!(r.witnesses[0].len(), r.mu);
                assert!(cls[1].is_matching && cls[1].is_induced);
                assert_eq!(r.witnesses[1].len(), r.mu_induced);
                assert!(cls[2].is_acyclic);
                assert_eq!(r.witnesses[2].len(), r.mu_acyclic);
                for (&c, m) in &r.cdiscon_witnesses {
                    assert!(classify_matching(&g, m, c).unwrap().components >= c);
                    assert_eq!(Some(m.len()), r.mu_cdiscon[&c]);
                }
            }
        }
    }

    #[test]
    fn targeted_search_agrees_with_subsets() {
        for g in all_labelled(5).chain([matching_graph(3), complete(6), path(7)]) {
            let r = brute_matching_numbers(&g, 3).unwrap();
            for c in 1..=3 {
                for ell in 0..=g.n() / 2 {
                    let want = r.mu_cdiscon[&c].is_some_and(|m| m >= ell);
                    let got = has_disconnected_matching(&g, ell, c).unwrap();
                    assert_eq!(got.is_some(), want, "c={c} ell={ell}");
                    if let Some(m) = got {
                        let cls = classify_matching(&g, &m, c).unwrap();
                        assert!(cls.is_matching && cls.components >= c && m.len() >= ell);
                    }
                }
            }
        }
    }

    #[test]
    fn hitting_set_examples() {
        assert!(brute_hitting_set(2, &[vec![(1, 1)]]).unwrap().is_some());
        assert!(brute_hitting_set(2, &[vec![(1, 1)], vec![(1, 2)]]).unwrap().is_none());
        assert!(brute_hitting_set(1, &[]).unwrap().is_some());
        assert!(brute_hitting_set(2, &[vec![(1, 1), (1, 2)]]).is_err());
        assert!(brute_hitting_set(2, &[vec![(3, 1)]]).is_err());
    }

    #[test]
    fn cut_counts_examples() {
        let g = path(2);
        let w = sample_weights(2, 1);
        for p in 0..2u32 {
            let weight = (w.get(0, Tag::F) + w.get(1, Tag::F) + w.get(p, Tag::P)) as u64;
            let t = cut_parity_table(&g, &w).unwrap();
            let total: u64 = t
                .iter()
                .filter(|(k, _)| **k == (2, 1, 1, weight))
                .map(|(_, v)| v.s_count)
                .sum();
            assert!(total >= 1);
        }
        let tri = complete(3);
        let t = cut_parity_table(&tri, &sample_weights(3, 2)).unwrap();
        assert!(t.keys().all(|&(a, ..)| a != 3));
        let e = enumerate_cut_parity(&tri, &sample_weights(3, 2), 0, 0, 0, 0).unwrap();
        assert_eq!((e.s_count, e.c_count), (1, 1));
    }

    #[test]
    fn subsets_iterates_all() {
        assert_eq!(subsets(0b101).collect::<Vec<_>>(), vec![0, 1, 4, 5]);
        assert_eq!(subsets(0).count(), 1);
    }
}
