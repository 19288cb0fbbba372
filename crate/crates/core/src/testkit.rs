//! Instance generators and brute-force oracles.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::digraph::{validate_odd_cycle_symmetric, ArcId, Digraph, NodeId, Symmetry};

/// Largest arc count the even-factor oracle accepts.
pub const ORACLE_MAX_ARCS: usize = 22;
/// Largest node count the matching oracle accepts.
pub const MATCHING_MAX_NODES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for brute force: {what} = {got} exceeds {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FamilyTag {
    SymmetrizedUndirected,
    BipartiteDigraph,
    MixedSymmetric,
    ExhaustiveSmall,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 4] = [
        FamilyTag::SymmetrizedUndirected,
        FamilyTag::BipartiteDigraph,
        FamilyTag::MixedSymmetric,
        FamilyTag::ExhaustiveSmall,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::SymmetrizedUndirected => "symmetrized-undirected",
            FamilyTag::BipartiteDigraph => "bipartite-digraph",
            FamilyTag::MixedSymmetric => "mixed-symmetric",
            FamilyTag::ExhaustiveSmall => "exhaustive-small",
        }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        FamilyTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown family `{s}`"))
    }
}

/// A generator request. `density` is the arc (or edge) probability for the
/// random families; exhaustive-small ignores it and samples uniformly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceFamily {
    pub tag: FamilyTag,
    pub n: usize,
    pub density: f64,
    pub seed: u64,
}

impl InstanceFamily {
    pub fn new(tag: FamilyTag, n: usize, density: f64, seed: u64) -> Self {
        InstanceFamily { tag, n, density, seed }
    }

    /// Default density per family: sparse enough to keep alternating structure
    /// interesting, dense enough to be connected.
    pub fn with_default_density(tag: FamilyTag, n: usize, seed: u64) -> Self {
        let density = match tag {
            FamilyTag::SymmetrizedUndirected => (3.0 / n.max(1) as f64).min(0.5),
            FamilyTag::BipartiteDigraph => (4.0 / n.max(1) as f64).min(0.5),
            FamilyTag::MixedSymmetric => (2.5 / n.max(1) as f64).min(0.4),
            FamilyTag::ExhaustiveSmall => 0.5,
        };
        InstanceFamily { tag, n, density, seed }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic instance for `family`. Always passes the symmetry validator.
pub fn gen(family: &InstanceFamily) -> Digraph {
    let mut r = rng(family.seed);
    let n = family.n;
    match family.tag {
        FamilyTag::SymmetrizedUndirected => symmetrize(n, &random_undirected(n, family.density, &mut r)),
        FamilyTag::BipartiteDigraph => {
            let side: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();
            let mut g = Digraph::with_nodes(n);
            for u in 0..n {
                for v in 0..n {
                    if side[u] != side[v] && r.gen_bool(family.density) {
                        g.add_arc(NodeId(u as u32), NodeId(v as u32)).unwrap();
                    }
                }
            }
            g
        }
        FamilyTag::MixedSymmetric => {
            let mut arcs = Vec::new();
            for u in 0..n {
                for v in 0..n {
                    if u != v && r.gen_bool(family.density) {
                        arcs.push((u as u32, v as u32));
                    }
                }
            }
            symmetric_completion(n, &arcs)
        }
        FamilyTag::ExhaustiveSmall => loop {
            let pairs = ordered_pairs(n);
            let mask: u64 = r.gen::<u64>() & low_bits(pairs.len());
            let g = digraph_from_mask(n, mask);
            if validate_odd_cycle_symmetric(&g) == Symmetry::Valid {
                break g;
            }
        },
    }
}

fn low_bits(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Builds a digraph on `n` nodes from `arcs`, then adds the reverse of each
/// validator witness until the result is valid.
pub fn symmetric_completion(n: usize, arcs: &[(u32, u32)]) -> Digraph {
    let mut arcs = arcs.to_vec();
    loop {
        let mut g = Digraph::with_nodes(n);
        for &(u, v) in &arcs {
            g.add_arc(NodeId(u), NodeId(v)).unwrap();
        }
        match validate_odd_cycle_symmetric(&g) {
            Symmetry::Valid => return g,
            Symmetry::PossiblyInvalid(a) => {
                let (t, h) = g.endpoints(a);
                arcs.push((h.0, t.0));
            }
        }
    }
}

/// Random simple undirected graph as an edge list `u < v`.
pub fn random_undirected(n: usize, p: f64, r: &mut impl Rng) -> Vec<(u32, u32)> {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if r.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Replaces every edge by a pair of opposite arcs.
pub fn symmetrize(n: usize, edges: &[(u32, u32)]) -> Digraph {
    let mut g = Digraph::with_nodes(n);
    for &(u, v) in edges {
        g.add_arc(NodeId(u), NodeId(v)).unwrap();
        g.add_arc(NodeId(v), NodeId(u)).unwrap();
    }
    g
}

/// Random digraph on at most `max_nodes` nodes and at most `max_arcs` arcs
/// passing the validator, mixing symmetric and one-way arcs.
pub fn small_mixed(max_nodes: usize, max_arcs: usize, r: &mut impl Rng) -> Digraph {
    loop {
        let n = r.gen_range(1..=max_nodes);
        let target = r.gen_range(0..=max_arcs.min(n * (n - 1)));
        let mut pairs = ordered_pairs(n);
        pairs.shuffle(r);
        let mut arcs: Vec<(u32, u32)> = pairs.into_iter().take(target).collect();
        // make some of them symmetric on purpose
        let extra: Vec<(u32, u32)> = arcs.iter().filter(|_| r.gen_bool(0.3)).map(|&(u, v)| (v, u)).collect();
        arcs.extend(extra);
        let g = symmetric_completion(n, &arcs);
        if g.arc_count() <= max_arcs {
            return g;
        }
    }
}

fn ordered_pairs(n: usize) -> Vec<(u32, u32)> {
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1));
    for u in 0..n as u32 {
        for v in 0..n as u32 {
            if u != v {
                pairs.push((u, v));
            }
        }
    }
    pairs
}

/// The digraph whose arcs are the ordered pairs selected by the bits of `mask`.
pub fn digraph_from_mask(n: usize, mask: u64) -> Digraph {
    let mut g = Digraph::with_nodes(n);
    for (i, (u, v)) in ordered_pairs(n).into_iter().enumerate() {
        if mask >> i & 1 == 1 {
            g.add_arc(NodeId(u), NodeId(v)).unwrap();
        }
    }
    g
}

/// Every labelled digraph on `n <= 4` nodes that passes the validator.
pub fn exhaustive_valid(n: usize) -> Vec<Digraph> {
    assert!(n <= 4, "exhaustive enumeration is capped at 4 nodes");
    let k = n * n.saturating_sub(1);
    (0..1u64 << k)
        .map(|mask| digraph_from_mask(n, mask))
        .filter(|g| validate_odd_cycle_symmetric(g) == Symmetry::Valid)
        .collect()
}

/// Maximum even factor by branch and bound: each node in turn picks its
/// outgoing arc (or none), keeping in-degrees at most one and rejecting any
/// choice that closes an odd cycle. Returns the size and one optimal arc set.
pub fn oracle_max_even_factor(g: &Digraph) -> Result<(usize, Vec<ArcId>), OracleError> {
    if g.arc_count() > ORACLE_MAX_ARCS {
        return Err(OracleError::TooLarge {
            what: "arcs",
            got: g.arc_count(),
            limit: ORACLE_MAX_ARCS,
        });
    }
    let nodes: Vec<NodeId> = g.nodes().collect();
    let cap = g.node_capacity();
    let mut s = Search {
        g,
        nodes: &nodes,
        succ: vec![None; cap],
        has_pred: vec![false; cap],
        chosen: Vec::new(),
        best: Vec::new(),
    };
    s.go(0);
    Ok((s.best.len(), s.best))
}

struct Search<'a> {
    g: &'a Digraph,
    nodes: &'a [NodeId],
    succ: Vec<Option<NodeId>>,
    has_pred: Vec<bool>,
    chosen: Vec<ArcId>,
    best: Vec<ArcId>,
}

impl Search<'_> {
    fn go(&mut self, i: usize) {
        if self.chosen.len() + (self.nodes.len() - i) <= self.best.len() {
            return;
        }
        if i == self.nodes.len() {
            self.best = self.chosen.clone();
            return;
        }
        let u = self.nodes[i];
        let outs: Vec<ArcId> = self.g.out_arcs(u).collect();
        for a in outs {
            let v = self.g.head(a);
            if self.has_pred[v.index()] || self.closes_odd_cycle(u, v) {
                continue;
            }
            self.succ[u.index()] = Some(v);
            self.has_pred[v.index()] = true;
            self.chosen.push(a);
            self.go(i + 1);
            self.chosen.pop();
            self.has_pred[v.index()] = false;
            self.succ[u.index()] = None;
        }
        self.go(i + 1);
    }

    fn closes_odd_cycle(&self, u: NodeId, v: NodeId) -> bool {
        let mut len = 1;
        let mut x = v;
        while let Some(y) = self.succ[x.index()] {
            x = y;
            len += 1;
        }
        x == u && len % 2 == 1
    }
}

/// Maximum matching size of an undirected graph on `n <= 12` nodes by
/// memoised search over node subsets.
pub fn oracle_max_matching(n: usize, edges: &[(u32, u32)]) -> Result<usize, OracleError> {
    if n > MATCHING_MAX_NODES {
        return Err(OracleError::TooLarge {
            what: "nodes",
            got: n,
            limit: MATCHING_MAX_NODES,
        });
    }
    let mut adj = vec![0u32; n];
    for &(u, v) in edges {
        adj[u as usize] |= 1 << v;
        adj[v as usize] |= 1 << u;
    }
    let full = (1usize << n) - 1;
    let mut best = vec![0u8; 1 << n];
    // best[mask] = maximum matching inside node set `mask`
    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut b = best[rest];
        let mut cand = adj[i] as usize & rest;
        while cand != 0 {
            let j = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            b = b.max(1 + best[rest & !(1 << j)]);
        }
        best[mask] = b;
    }
    Ok(best[full] as usize)
}

/// Independent symmetry check: an arc `(u, v)` lies on an odd closed walk
/// exactly when some walk from `v` back to `u` has even length. Quadratic
/// per arc; for cross-checking the validator on small graphs.
pub fn has_asymmetric_arc_on_odd_walk(g: &Digraph) -> bool {
    let cap = g.node_capacity();
    g.arcs().any(|a| {
        let (u, v) = g.endpoints(a);
        if g.arc_between(v, u).is_some() {
            return false;
        }
        // parity-layered reachability from v
        let mut seen = vec![[false; 2]; cap];
        let mut stack = vec![(v, 0usize)];
        seen[v.index()][0] = true;
        while let Some((x, p)) = stack.pop() {
            for b in g.out_arcs(x) {
                let y = g.head(b);
                let q = 1 - p;
                if !seen[y.index()][q] {
                    seen[y.index()][q] = true;
                    stack.push((y, q));
                }
            }
        }
        seen[u.index()][0]
    })
}
