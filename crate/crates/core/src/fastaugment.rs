//! Augmentation with forest recovery.
//!
//! The search grows an alternating forest depth first while a
//! [`PathCycleStore`] holds `M △ A(P)` for the path `P` to the current node,
//! so each step is tested for odd cycles in logarithmic time. When a step
//! closes an odd cycle the cycle is contracted. At the top level the forest
//! is then rebuilt inside a sparse subgraph of at most `4n` arcs instead of
//! the whole graph, and only the few arcs whose status may have changed are
//! put back into the scan lists.

use std::borrow::Cow;
use std::time::Instant;

use crate::digraph::{validate_odd_cycle_symmetric, ArcId, Digraph, NodeId, Symmetry};
use crate::evenfactor::{fits, lift_all, rebase, Cycle, EvenFactor, PathCycleMatching};
use crate::pap::find_augmenting_path;
use crate::seqstore::{Checkpoint, PathCycleStore};
use crate::solver::{Assertion, CallRecord, Context, Solution, SolveError, SolveOptions, TraceEvent};

/// Alternating forest of the auxiliary digraph, stored per node. A reached
/// second copy `v²` hangs below `parent_of_second(v)¹`; its only child is the
/// first copy of its mate, the tail of the member arc entering `v`.
#[derive(Clone, Debug, Default)]
pub struct AlternatingForest {
    reach1: Vec<bool>,
    reach2: Vec<bool>,
    parent2: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    roots: Vec<NodeId>,
}

impl AlternatingForest {
    /// The trivial forest: every source is a root.
    pub fn with_roots(g: &Digraph, m: &PathCycleMatching) -> Self {
        let cap = g.node_capacity();
        let mut f = AlternatingForest {
            reach1: vec![false; cap],
            reach2: vec![false; cap],
            parent2: vec![None; cap],
            children: vec![Vec::new(); cap],
            roots: Vec::new(),
        };
        for u in g.nodes() {
            if m.out_arc(u).is_none() {
                f.reach1[u.index()] = true;
                f.roots.push(u);
            }
        }
        f
    }

    pub fn roots(&self) -> &[NodeId] {
        &self.roots
    }

    pub fn reaches_first(&self, u: NodeId) -> bool {
        self.reach1.get(u.index()).copied().unwrap_or(false)
    }

    pub fn reaches_second(&self, v: NodeId) -> bool {
        self.reach2.get(v.index()).copied().unwrap_or(false)
    }

    pub fn parent_of_second(&self, v: NodeId) -> Option<NodeId> {
        self.parent2.get(v.index()).copied().flatten()
    }

    /// Number of reached second copies.
    pub fn reached_second_count(&self) -> usize {
        self.reach2.iter().filter(|&&b| b).count()
    }

    fn resize(&mut self, cap: usize) {
        self.reach1.resize(cap, false);
        self.reach2.resize(cap, false);
        self.parent2.resize(cap, None);
        self.children.resize(cap, Vec::new());
    }

    /// Forest arcs `(parent, v)` of `g` leading into second copies.
    fn non_member_arcs<'a>(&'a self, g: &'a Digraph) -> impl Iterator<Item = ArcId> + 'a {
        self.parent2.iter().enumerate().filter_map(move |(v, p)| {
            let u = (*p)?;
            g.arc_between(u, NodeId(v as u32))
        })
    }
}

/// Scan flags and lazily built lists of arcs still to scan, per tail.
#[derive(Clone, Debug)]
struct ScanState {
    scanned: Vec<bool>,
    lists: Vec<Option<Vec<ArcId>>>,
}

impl ScanState {
    fn new(g: &Digraph) -> Self {
        ScanState {
            scanned: vec![false; g.arc_capacity()],
            lists: vec![None; g.node_capacity()],
        }
    }

    /// Next unscanned arc leaving `u`. A list is built on first use; arcs
    /// into sinks of `m` come out first, then the rest by increasing id.
    fn fetch(&mut self, g: &Digraph, m: &PathCycleMatching, u: NodeId) -> Option<ArcId> {
        let scanned = &self.scanned;
        let list = self.lists[u.index()].get_or_insert_with(|| {
            let mut l: Vec<ArcId> = g.out_arcs(u).filter(|a| !scanned[a.index()]).collect();
            l.sort_unstable_by_key(|&a| (m.in_arc(g.head(a)).is_none(), std::cmp::Reverse(a)));
            l
        });
        while let Some(a) = list.pop() {
            if g.is_alive_arc(a) && g.tail(a) == u && !self.scanned[a.index()] {
                return Some(a);
            }
        }
        None
    }

    /// Returns whether `a` was scanned.
    fn unscan(&mut self, g: &Digraph, a: ArcId) -> bool {
        if !std::mem::replace(&mut self.scanned[a.index()], false) {
            return false;
        }
        if let Some(l) = &mut self.lists[g.tail(a).index()] {
            l.push(a);
        }
        true
    }
}

/// Result of one call of [`fast_augment`].
#[derive(Debug)]
pub struct FastOutcome<'g> {
    /// The input graph with every contraction made during the call.
    pub graph: Cow<'g, Digraph>,
    /// On a breakthrough, a path-cycle matching of `graph` with deficiency
    /// one less than the input; otherwise the input matching carried into `graph`.
    pub factor: PathCycleMatching,
    /// The maximal forest when there was no breakthrough.
    pub forest: AlternatingForest,
    pub breakthrough: bool,
}

struct Frame {
    node: NodeId,
    child: usize,
    token: Option<Checkpoint>,
}

fn store_from(g: &Digraph, m: &PathCycleMatching) -> Result<PathCycleStore, SolveError> {
    let mut d = PathCycleStore::new(g.node_capacity());
    for a in m.arcs() {
        let (t, h) = g.endpoints(a);
        d.insert(t.0, h.0)?;
    }
    Ok(d)
}

fn materialize(g: &Digraph, d: &PathCycleStore) -> Result<PathCycleMatching, SolveError> {
    let mut m = PathCycleMatching::empty(g);
    for x in g.nodes() {
        if let Some(y) = d.successor(x.0) {
            let a = g.arc_between(x, NodeId(y)).expect("store arcs exist in the graph");
            m.insert(g, a)?;
        }
    }
    Ok(m)
}

fn mate(g: &Digraph, m: &PathCycleMatching, v: NodeId) -> Option<NodeId> {
    m.in_arc(v).map(|a| g.tail(a))
}

fn check_scan_invariant(
    g: &Digraph,
    m: &PathCycleMatching,
    forest: &AlternatingForest,
    scan: &ScanState,
    when: &str,
) -> Result<(), SolveError> {
    for a in g.arcs() {
        if !scan.scanned[a.index()] || m.out_arc(g.tail(a)) == Some(a) {
            continue;
        }
        let (u, v) = g.endpoints(a);
        if !forest.reaches_first(u) || !forest.reaches_second(v) {
            return Err(SolveError::assertion(
                Assertion::ScanInvariant,
                format!("{when}: scanned arc {a} ({u} -> {v}) has an unreached end"),
            ));
        }
    }
    Ok(())
}

/// Sparse subgraph for recovery: member arcs of `m` and `before`, forest
/// arcs, the probed arc, and the reverse of each of these where `g` has it.
fn build_sparse(
    g: &Digraph,
    m: &PathCycleMatching,
    before: &PathCycleMatching,
    forest: &AlternatingForest,
    probe: ArcId,
) -> Result<Digraph, SolveError> {
    let mut h = Digraph::with_node_slots(g);
    let wanted = m
        .arcs()
        .into_iter()
        .chain(before.arcs())
        .chain(forest.non_member_arcs(g))
        .chain(std::iter::once(probe));
    for a in wanted {
        let (t, hd) = g.endpoints(a);
        h.add_arc(t, hd)?;
        if g.arc_between(hd, t).is_some() {
            h.add_arc(hd, t)?;
        }
    }
    Ok(h)
}

fn translate(src: &Digraph, m: &PathCycleMatching, dst: &Digraph) -> Result<PathCycleMatching, SolveError> {
    Ok(rebase(src, m, dst)?)
}

fn cycle_in(g: &Digraph, nodes: &[NodeId]) -> Result<Cycle, SolveError> {
    let k = nodes.len();
    let arcs = (0..k)
        .map(|i| {
            let (t, h) = (nodes[i], nodes[(i + 1) % k]);
            g.arc_between(t, h)
                .ok_or_else(|| SolveError::assertion(Assertion::FitsBeforeContract, format!("cycle arc {t} -> {h} missing")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Cycle {
        nodes: nodes.to_vec(),
        arcs,
    })
}

/// Grows an alternating forest for the even factor `m` of `g` until either an
/// augmenting step succeeds or the forest is maximal. With `sparsify`, each
/// contraction is followed by a recovery in a sparse subgraph; without it the
/// search restarts from scratch on the contracted graph.
pub fn fast_augment(g: Cow<'_, Digraph>, m: PathCycleMatching, sparsify: bool) -> Result<FastOutcome<'_>, SolveError> {
    let mut ctx = Context::new(SolveOptions::default());
    fast_augment_in(g, m, sparsify, &mut ctx)
}

pub(crate) fn fast_augment_in<'g>(
    mut g: Cow<'g, Digraph>,
    mut m: PathCycleMatching,
    sparsify: bool,
    ctx: &mut Context,
) -> Result<FastOutcome<'g>, SolveError> {
    let mut forest = AlternatingForest::with_roots(&g, &m);
    let mut scan = ScanState::new(&g);
    'restart: loop {
        let mut d = store_from(&g, &m)?;
        let mut stack: Vec<Frame> = forest
            .roots
            .iter()
            .rev()
            .map(|&r| Frame {
                node: r,
                child: 0,
                token: None,
            })
            .collect();
        while let Some(top) = stack.len().checked_sub(1) {
            let u = stack[top].node;
            let ci = stack[top].child;
            if ci < forest.children[u.index()].len() {
                // walk back down a recovered forest
                let v = forest.children[u.index()][ci];
                stack[top].child += 1;
                let w = mate(&g, &m, v).ok_or_else(|| {
                    SolveError::assertion(Assertion::RecoveredForest, format!("forest node {v} has no mate"))
                })?;
                let tok = d.checkpoint();
                d.remove(w.0, v.0)?;
                if d.insert(u.0, v.0)?.is_odd_cycle() {
                    return Err(SolveError::assertion(
                        Assertion::RecoveredForest,
                        format!("step {u} -> {v} closes an odd cycle"),
                    ));
                }
                stack.push(Frame {
                    node: w,
                    child: 0,
                    token: Some(tok),
                });
                continue;
            }
            if ctx.full() {
                check_scan_invariant(&g, &m, &forest, &scan, "before fetch")?;
            }
            let Some(a) = scan.fetch(&g, &m, u) else {
                let done = stack.pop().unwrap();
                if let Some(tok) = done.token {
                    d.rollback(tok)?;
                }
                continue;
            };
            scan.scanned[a.index()] = true;
            ctx.stats.arc_scans += 1;
            let v = g.head(a);
            ctx.emit(|| TraceEvent::Scan { arc: a, tail: u, head: v });
            if m.out_arc(u) == Some(a) || forest.reach2[v.index()] {
                continue;
            }
            let tok = d.checkpoint();
            let w = mate(&g, &m, v);
            if let Some(w) = w {
                d.remove(w.0, v.0)?;
            }
            if !d.insert(u.0, v.0)?.is_odd_cycle() {
                let Some(w) = w else {
                    let m1 = materialize(&g, &d)?;
                    ctx.emit(|| TraceEvent::Breakthrough {
                        deficiency: m1.deficiency(&g),
                    });
                    return Ok(FastOutcome {
                        graph: g,
                        factor: m1,
                        forest,
                        breakthrough: true,
                    });
                };
                forest.reach2[v.index()] = true;
                forest.parent2[v.index()] = Some(u);
                forest.children[u.index()].push(v);
                forest.reach1[w.index()] = true;
                stack[top].child = forest.children[u.index()].len();
                stack.push(Frame {
                    node: w,
                    child: 0,
                    token: Some(tok),
                });
                ctx.emit(|| TraceEvent::Extend { tail: u, head: v, mate: w });
                continue;
            }

            // the step closes an odd cycle through (u, v)
            let nodes: Vec<NodeId> = d.cycle_nodes(v.0).expect("odd cycle present").into_iter().map(NodeId).collect();
            let after = if ctx.cheap() { Some(materialize(&g, &d)?) } else { None };
            d.rollback(tok)?;
            let before = materialize(&g, &d)?;
            let cycle = cycle_in(&g, &nodes)?;
            if let Some(after) = after {
                let odd = after.odd_cycles(&g).len();
                if odd != 1 {
                    return Err(SolveError::assertion(
                        Assertion::UniqueOddCycle,
                        format!("step {u} -> {v} created {odd} odd cycles"),
                    ));
                }
                if !fits(&g, &before, &cycle) {
                    return Err(SolveError::assertion(
                        Assertion::FitsBeforeContract,
                        format!("cycle through {nodes:?}"),
                    ));
                }
            }

            if !sparsify {
                let z = g.to_mut().contract(&cycle.nodes, &cycle.arcs)?;
                ctx.stats.contractions += 1;
                ctx.emit(|| TraceEvent::Contract { nodes, complex: z });
                m = translate(&g, &before, &g)?;
                forest = AlternatingForest::with_roots(&g, &m);
                scan = ScanState::new(&g);
                continue 'restart;
            }

            // recovery inside a sparse subgraph
            let mut h = build_sparse(&g, &m, &before, &forest, a)?;
            if ctx.cheap() && h.arc_count() > 4 * g.node_count() {
                return Err(SolveError::assertion(
                    Assertion::SparseSubgraph,
                    format!("{} arcs on {} nodes", h.arc_count(), g.node_count()),
                ));
            }
            if ctx.full() {
                if let Symmetry::PossiblyInvalid(w) = validate_odd_cycle_symmetric(&h) {
                    return Err(SolveError::assertion(
                        Assertion::SparseSubgraph,
                        format!("arc {w} breaks odd-cycle symmetry"),
                    ));
                }
            }
            let before_h = translate(&g, &before, &h)?;
            let cycle_h = cycle_in(&h, &nodes)?;
            let z = h.contract(&cycle_h.nodes, &cycle_h.arcs)?;
            ctx.stats.contractions += 1;
            ctx.emit(|| TraceEvent::Contract { nodes, complex: z });
            let m_h = translate(&h, &before_h, &h)?;
            let sub = fast_augment_in(Cow::Owned(h), m_h, false, ctx)?;
            let h = sub.graph;

            let first_new = g.node_capacity();
            let gm = g.to_mut();
            for rec in h.ledger().records() {
                let k = rec.members.len();
                let arcs = (0..k)
                    .map(|i| gm.arc_between(rec.members[i], rec.members[(i + 1) % k]))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| {
                        SolveError::assertion(Assertion::RecoveredForest, "contracted cycle missing from the graph")
                    })?;
                let z = gm.contract(&rec.members, &arcs)?;
                debug_assert_eq!(z, rec.complex);
                scan.lists.push(None);
                let merged: Option<Vec<ArcId>> = rec
                    .members
                    .iter()
                    .map(|x| scan.lists[x.index()].take())
                    .collect::<Option<Vec<_>>>()
                    .map(|ls| ls.concat());
                scan.lists[z.index()] = merged;
            }
            let m_bar = translate(&h, &sub.factor, &g)?;
            let mut new_forest = sub.forest;
            new_forest.resize(g.node_capacity());
            if sub.breakthrough {
                return Ok(FastOutcome {
                    graph: g,
                    factor: m_bar,
                    forest: new_forest,
                    breakthrough: true,
                });
            }

            let mut unscanned = 0;
            for b in m.arcs() {
                let (t, hd) = g.endpoints(b);
                let (t, hd) = (g.find(t), g.find(hd));
                if t == hd {
                    continue;
                }
                if let Some(c) = g.arc_between(t, hd) {
                    unscanned += scan.unscan(&g, c) as usize;
                }
            }
            let complexes: Vec<NodeId> = (first_new..g.node_capacity())
                .map(|i| NodeId(i as u32))
                .filter(|&z| g.is_alive_node(z))
                .collect();
            for &z in &complexes {
                let incoming: Vec<ArcId> = g.in_arcs(z).collect();
                for c in incoming {
                    unscanned += scan.unscan(&g, c) as usize;
                }
            }
            m = m_bar;
            forest = new_forest;
            ctx.stats.recoveries += 1;
            ctx.emit(|| TraceEvent::Recover { complexes, unscanned });
            if ctx.cheap() {
                check_scan_invariant(&g, &m, &forest, &scan, "after recovery")?;
            }
            continue 'restart;
        }

        if ctx.cheap() && find_augmenting_path(&g, &m, &mut 0).is_some() {
            return Err(SolveError::assertion(
                Assertion::Completeness,
                "forest is maximal but an augmenting path exists",
            ));
        }
        return Ok(FastOutcome {
            graph: g,
            factor: m,
            forest,
            breakthrough: false,
        });
    }
}

/// Maximum even factor of `g`, which must be odd-cycle symmetric.
pub fn solve_fast(g: &Digraph) -> Result<Solution, SolveError> {
    solve_fast_with(g, SolveOptions::default())
}

pub fn solve_fast_with(g: &Digraph, opts: SolveOptions) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let mut ctx = Context::new(opts);
    let mut f = EvenFactor::empty(g);
    loop {
        let scans_before = ctx.stats.arc_scans;
        let out = fast_augment_in(Cow::Borrowed(g), f.matching().clone(), true, &mut ctx)?;
        ctx.stats.calls.push(CallRecord {
            nodes: g.node_count(),
            arcs: g.arc_count(),
            arc_scans: ctx.stats.arc_scans - scans_before,
        });
        if !out.breakthrough {
            break;
        }
        f = lift_all(g, &out.graph, &out.factor)?;
        ctx.stats.augmentations += 1;
    }
    Ok(Solution {
        factor: f,
        stats: ctx.stats,
        trace: ctx.trace,
        elapsed: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::CheckLevel;

    fn sym(n: usize, edges: &[(u32, u32)]) -> Digraph {
        let mut g = Digraph::with_nodes(n);
        for &(u, v) in edges {
            g.add_arc(NodeId(u), NodeId(v)).unwrap();
            g.add_arc(NodeId(v), NodeId(u)).unwrap();
        }
        g
    }

    fn full() -> SolveOptions {
        SolveOptions {
            check: CheckLevel::Full,
            trace: true,
        }
    }

    #[test]
    fn single_arc() {
        let mut g = Digraph::with_nodes(2);
        g.add_arc(NodeId(0), NodeId(1)).unwrap();
        let s = solve_fast_with(&g, full()).unwrap();
        assert_eq!(s.factor.len(), 1);
    }

    #[test]
    fn triangle() {
        let g = sym(3, &[(0, 1), (1, 2), (2, 0)]);
        let s = solve_fast_with(&g, full()).unwrap();
        assert_eq!(s.factor.len(), 2);
    }

    #[test]
    fn five_cycle_contracts_and_recovers() {
        let g = sym(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let s = solve_fast_with(&g, full()).unwrap();
        assert_eq!(s.factor.len(), 4);
    }

    #[test]
    fn petersen_has_even_factor_of_size_ten() {
        let edges = [
            (0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
            (0, 5), (1, 6), (2, 7), (3, 8), (4, 9),
            (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
        ];
        let g = sym(10, &edges);
        let s = solve_fast_with(&g, full()).unwrap();
        assert_eq!(s.factor.len(), 10);
    }

    #[test]
    fn trace_records_events() {
        let g = sym(3, &[(0, 1), (1, 2), (2, 0)]);
        let s = solve_fast_with(&g, full()).unwrap();
        assert!(s.trace.iter().any(|e| matches!(e, TraceEvent::Scan { .. })));
        assert!(s.trace.iter().any(|e| matches!(e, TraceEvent::Breakthrough { .. })));
    }

    #[test]
    fn sparse_subgraph_is_small() {
        let n = 12;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        let g = sym(n as usize, &edges);
        let m = PathCycleMatching::empty(&g);
        let forest = AlternatingForest::with_roots(&g, &m);
        let a = g.arc_between(NodeId(0), NodeId(1)).unwrap();
        let h = build_sparse(&g, &m, &m, &forest, a).unwrap();
        assert_eq!(h.arc_count(), 2);
    }

    #[test]
    fn maximal_forest_without_breakthrough() {
        let g = sym(2, &[(0, 1)]);
        let m = PathCycleMatching::from_arcs(&g, g.arcs()).unwrap();
        let out = fast_augment(Cow::Borrowed(&g), m, true).unwrap();
        assert!(!out.breakthrough);
        assert!(out.forest.roots().is_empty());
    }
}
