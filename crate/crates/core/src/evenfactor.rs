//! Path-cycle matchings, even factors and lifting through contractions.

use thiserror::Error;

use crate::digraph::{ArcId, ContractionRecord, Digraph, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("arc {0} is not alive")]
    DeadArc(ArcId),
    #[error("node {0} has more than one outgoing arc")]
    OutDegree(NodeId),
    #[error("node {0} has more than one incoming arc")]
    InDegree(NodeId),
    #[error("odd cycle through nodes {}", fmt_nodes(.0))]
    OddCycle(Vec<NodeId>),
}

fn fmt_nodes(nodes: &[NodeId]) -> String {
    nodes.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// An arc set with at most one outgoing and one incoming arc per node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathCycleMatching {
    out: Vec<Option<ArcId>>,
    inc: Vec<Option<ArcId>>,
    len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<ArcId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// `arcs[i]` goes from `nodes[i]` to `nodes[(i + 1) % len]`.
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<ArcId>,
}

impl Cycle {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_odd(&self) -> bool {
        self.arcs.len() % 2 == 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    pub paths: Vec<Path>,
    pub cycles: Vec<Cycle>,
}

impl Decomposition {
    pub fn arcs(&self) -> Vec<ArcId> {
        let mut all: Vec<ArcId> = self
            .paths
            .iter()
            .flat_map(|p| p.arcs.iter().copied())
            .chain(self.cycles.iter().flat_map(|c| c.arcs.iter().copied()))
            .collect();
        all.sort();
        all
    }
}

impl PathCycleMatching {
    pub fn empty(g: &Digraph) -> Self {
        let n = g.node_capacity();
        PathCycleMatching {
            out: vec![None; n],
            inc: vec![None; n],
            len: 0,
        }
    }

    pub fn from_arcs(g: &Digraph, arcs: impl IntoIterator<Item = ArcId>) -> Result<Self, Violation> {
        let mut m = Self::empty(g);
        for a in arcs {
            m.insert(g, a)?;
        }
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `|V| - |M|` with respect to the alive nodes of `g`.
    pub fn deficiency(&self, g: &Digraph) -> usize {
        g.node_count() - self.len
    }

    pub fn out_arc(&self, v: NodeId) -> Option<ArcId> {
        self.out.get(v.index()).copied().flatten()
    }

    pub fn in_arc(&self, v: NodeId) -> Option<ArcId> {
        self.inc.get(v.index()).copied().flatten()
    }

    pub fn contains(&self, g: &Digraph, a: ArcId) -> bool {
        self.out_arc(g.tail(a)) == Some(a)
    }

    pub fn successor(&self, g: &Digraph, v: NodeId) -> Option<NodeId> {
        self.out_arc(v).map(|a| g.head(a))
    }

    fn grow(&mut self, n: usize) {
        if self.out.len() < n {
            self.out.resize(n, None);
            self.inc.resize(n, None);
        }
    }

    pub fn insert(&mut self, g: &Digraph, a: ArcId) -> Result<(), Violation> {
        if !g.is_alive_arc(a) {
            return Err(Violation::DeadArc(a));
        }
        let (t, h) = g.endpoints(a);
        self.grow(g.node_capacity());
        if self.out[t.index()] == Some(a) {
            return Ok(());
        }
        if self.out[t.index()].is_some() {
            return Err(Violation::OutDegree(t));
        }
        if self.inc[h.index()].is_some() {
            return Err(Violation::InDegree(h));
        }
        self.out[t.index()] = Some(a);
        self.inc[h.index()] = Some(a);
        self.len += 1;
        Ok(())
    }

    /// Removes `a`; returns whether it was a member.
    pub fn remove(&mut self, g: &Digraph, a: ArcId) -> bool {
        let (t, h) = g.endpoints(a);
        if self.out_arc(t) != Some(a) {
            return false;
        }
        self.out[t.index()] = None;
        self.inc[h.index()] = None;
        self.len -= 1;
        true
    }

    /// Member arcs in ascending id order.
    pub fn arcs(&self) -> Vec<ArcId> {
        let mut v: Vec<ArcId> = self.out.iter().flatten().copied().collect();
        v.sort();
        v
    }

    /// Splits into node-disjoint paths (isolated nodes are singleton paths)
    /// and cycles over the alive nodes of `g`. Linear time.
    pub fn decompose(&self, g: &Digraph) -> Decomposition {
        let n = g.node_capacity();
        let mut seen = vec![false; n];
        let mut d = Decomposition::default();
        for s in g.nodes() {
            if self.in_arc(s).is_some() {
                continue;
            }
            let mut path = Path {
                nodes: vec![s],
                arcs: Vec::new(),
            };
            seen[s.index()] = true;
            let mut x = s;
            while let Some(a) = self.out_arc(x) {
                x = g.head(a);
                seen[x.index()] = true;
                path.arcs.push(a);
                path.nodes.push(x);
            }
            d.paths.push(path);
        }
        for s in g.nodes() {
            if seen[s.index()] {
                continue;
            }
            d.cycles.push(self.cycle_from(g, s, &mut seen));
        }
        d
    }

    fn cycle_from(&self, g: &Digraph, s: NodeId, seen: &mut [bool]) -> Cycle {
        let mut c = Cycle {
            nodes: Vec::new(),
            arcs: Vec::new(),
        };
        let mut x = s;
        loop {
            seen[x.index()] = true;
            c.nodes.push(x);
            let a = self.out_arc(x).expect("node on a cycle has a successor");
            c.arcs.push(a);
            x = g.head(a);
            if x == s {
                break;
            }
        }
        c
    }

    pub fn odd_cycles(&self, g: &Digraph) -> Vec<Cycle> {
        self.decompose(g).cycles.into_iter().filter(Cycle::is_odd).collect()
    }

    /// The cycle containing `v`, if `v` lies on one.
    pub fn cycle_through(&self, g: &Digraph, v: NodeId) -> Option<Cycle> {
        let mut x = v;
        let mut steps = 0;
        loop {
            x = self.successor(g, x)?;
            steps += 1;
            if x == v {
                break;
            }
            if steps > self.len {
                return None;
            }
        }
        let mut seen = vec![false; g.node_capacity()];
        Some(self.cycle_from(g, v, &mut seen))
    }
}

/// A path-cycle matching without odd cycles.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvenFactor(PathCycleMatching);

impl EvenFactor {
    pub fn empty(g: &Digraph) -> Self {
        EvenFactor(PathCycleMatching::empty(g))
    }

    pub fn try_from_matching(g: &Digraph, m: PathCycleMatching) -> Result<Self, Violation> {
        if let Some(c) = m.odd_cycles(g).into_iter().next() {
            return Err(Violation::OddCycle(c.nodes));
        }
        Ok(EvenFactor(m))
    }

    pub fn matching(&self) -> &PathCycleMatching {
        &self.0
    }

    pub fn into_matching(self) -> PathCycleMatching {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn arcs(&self) -> Vec<ArcId> {
        self.0.arcs()
    }

    pub fn deficiency(&self, g: &Digraph) -> usize {
        self.0.deficiency(g)
    }
}

/// Certificate check: degree constraints and no odd cycle.
pub fn verify(g: &Digraph, arcs: impl IntoIterator<Item = ArcId>) -> Result<EvenFactor, Violation> {
    let m = PathCycleMatching::from_arcs(g, arcs)?;
    EvenFactor::try_from_matching(g, m)
}

/// `f △ arcs`: members of `arcs` already in `f` are removed, the rest added.
pub fn symmetric_difference(
    g: &Digraph,
    f: &PathCycleMatching,
    arcs: &[ArcId],
) -> Result<PathCycleMatching, Violation> {
    let mut m = f.clone();
    let mut added = Vec::new();
    for &a in arcs {
        if !g.is_alive_arc(a) {
            return Err(Violation::DeadArc(a));
        }
        if !m.remove(g, a) {
            added.push(a);
        }
    }
    for a in added {
        m.insert(g, a)?;
    }
    Ok(m)
}

/// `f` fits `c`: it holds `|VC| - 1` arcs of `c` and no arc leaving `VC`.
pub fn fits(g: &Digraph, f: &PathCycleMatching, c: &Cycle) -> bool {
    let mut inside = 0;
    for &x in &c.nodes {
        if let Some(a) = f.out_arc(x) {
            let h = g.head(a);
            if !c.nodes.contains(&h) {
                return false;
            }
            if c.arcs.contains(&a) {
                inside += 1;
            }
        }
    }
    inside + 1 == c.nodes.len()
}

/// Re-expresses `m` (valid in `src`) in `dst` by endpoint pairs. Both graphs
/// must share a node id space with `dst` at least as contracted as `src`.
/// Arcs that became internal are dropped; merged arcs map to their survivor.
pub fn rebase(src: &Digraph, m: &PathCycleMatching, dst: &Digraph) -> Result<PathCycleMatching, Violation> {
    let mut out = PathCycleMatching::empty(dst);
    for a in m.arcs() {
        let (t, h) = src.endpoints(a);
        let (t, h) = (dst.find(t), dst.find(h));
        if t == h {
            continue;
        }
        let b = dst.arc_between(t, h).ok_or(Violation::DeadArc(a))?;
        out.insert(dst, b)?;
    }
    Ok(out)
}

/// Implicit view of the bipartite auxiliary digraph: `u¹ -> v²` for each
/// non-member arc `(u, v)` and `v² -> u¹` for each member arc `(u, v)`.
#[derive(Clone, Copy)]
pub struct AuxView<'a> {
    g: &'a Digraph,
    m: &'a PathCycleMatching,
}

impl<'a> AuxView<'a> {
    pub fn new(g: &'a Digraph, m: &'a PathCycleMatching) -> Self {
        AuxView { g, m }
    }

    /// `u¹` is a source when no member arc leaves `u`.
    pub fn is_source(&self, u: NodeId) -> bool {
        self.m.out_arc(u).is_none()
    }

    /// `v²` is a sink when no member arc enters `v`.
    pub fn is_sink(&self, v: NodeId) -> bool {
        self.m.in_arc(v).is_none()
    }

    /// Arcs leaving `u¹`: `(arc, v)` for every non-member arc `(u, v)`.
    pub fn successors_of_first(&self, u: NodeId) -> impl Iterator<Item = (ArcId, NodeId)> + 'a {
        let (g, m) = (self.g, self.m);
        g.out_arcs(u)
            .filter(move |&a| m.out_arc(u) != Some(a))
            .map(move |a| (a, g.head(a)))
    }

    /// The unique arc leaving `v²`, if `v` is not a sink: `(arc, w)` with `(w, v)` a member.
    pub fn successor_of_second(&self, v: NodeId) -> Option<(ArcId, NodeId)> {
        self.m.in_arc(v).map(|a| (a, self.g.tail(a)))
    }
}

/// An alternating path given by its arcs in `G`: even positions are added
/// (non-member) arcs, odd positions are removed (member) arcs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AltPath {
    pub arcs: Vec<ArcId>,
}

impl AltPath {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// The first `2i` arcs.
    pub fn prefix(&self, i: usize) -> &[ArcId] {
        &self.arcs[..(2 * i).min(self.arcs.len())]
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LiftError {
    #[error("contraction {record}: reverse of cycle arc {arc} is missing")]
    MissingSymmetricArc { record: usize, arc: ArcId },
    #[error("contraction {record}: cycle has even length {len}")]
    EvenCycle { record: usize, len: usize },
    #[error("contraction {record}: arc {arc} does not attach to the cycle")]
    Detached { record: usize, arc: ArcId },
    #[error("contraction {record}: complex node has more than one {what} arc")]
    Degree { record: usize, what: &'static str },
    #[error("lifted arc set is not an even factor: {0}")]
    Invalid(Violation),
    #[error("deficiency changed from {before} to {after} while lifting")]
    Deficiency { before: usize, after: usize },
}

/// Arcs to add inside the contracted cycle for one lifting step, given the
/// attachment members of the entering (`enter_at`) and leaving (`leave_at`)
/// arcs. Always `|K| - 1` arcs.
fn cycle_completion(
    record_index: usize,
    rec: &ContractionRecord,
    enter_at: Option<NodeId>,
    leave_at: Option<NodeId>,
) -> Result<Vec<ArcId>, LiftError> {
    let k = rec.len();
    if k.is_multiple_of(2) {
        return Err(LiftError::EvenCycle { record: record_index, len: k });
    }
    let fwd = |i: usize| rec.cycle_arcs[i % k];
    let rev = |i: usize| {
        rec.reverse_arcs[i % k].ok_or(LiftError::MissingSymmetricArc {
            record: record_index,
            arc: rec.cycle_arcs[i % k],
        })
    };
    let pos = |x: NodeId| rec.position(x).expect("attachment is a member");
    let mut add = Vec::with_capacity(k - 1);
    match (enter_at, leave_at) {
        (None, None) => add.extend((0..k - 1).map(fwd)),
        (Some(u), None) => {
            let p = pos(u);
            add.extend((p..p + k - 1).map(fwd));
        }
        (None, Some(v)) => {
            let q = pos(v);
            add.extend((q + 1..q + k).map(fwd));
        }
        (Some(u), Some(v)) => {
            let (p, q) = (pos(u), pos(v));
            let forward_len = (q + k - p) % k;
            // pair up the leftover run starting at `first`, `count` nodes long
            let (first, count) = if forward_len.is_multiple_of(2) {
                add.extend((p..p + forward_len).map(fwd));
                (q + 1, k - forward_len - 1)
            } else {
                let back_len = k - forward_len;
                for j in 0..back_len {
                    // m[p-j] -> m[p-j-1] is the reverse of cycle arc p-j-1
                    add.push(rev(p + 2 * k - j - 1)?);
                }
                (p + 1, forward_len - 1)
            };
            for j in (0..count).step_by(2) {
                add.push(fwd(first + j));
                add.push(rev(first + j)?);
            }
        }
    }
    Ok(add)
}

/// Attachment members of an entering and a leaving arc at the complex node of `rec`.
fn attachments(
    g: &Digraph,
    record_index: usize,
    rec: &ContractionRecord,
    entering: Option<ArcId>,
    leaving: Option<ArcId>,
) -> Result<(Option<NodeId>, Option<NodeId>), LiftError> {
    let z = rec.complex;
    let ledger = g.ledger();
    let enter_at = entering
        .map(|a| {
            ledger
                .member_of(g.original_endpoints(a).1, z)
                .ok_or(LiftError::Detached { record: record_index, arc: a })
        })
        .transpose()?;
    let leave_at = leaving
        .map(|a| {
            ledger
                .member_of(g.original_endpoints(a).0, z)
                .ok_or(LiftError::Detached { record: record_index, arc: a })
        })
        .transpose()?;
    Ok((enter_at, leave_at))
}

/// Undoes contraction `record_index` of `g` for the arc set `upper`, which
/// must be an even factor of the graph right after that contraction.
/// Returns an arc set valid right before it with the same deficiency.
pub fn lift_once(g: &Digraph, record_index: usize, upper: &[ArcId]) -> Result<Vec<ArcId>, LiftError> {
    let rec = &g.ledger().records()[record_index];
    let z = rec.complex;
    let ledger = g.ledger();
    let mut entering = None;
    let mut leaving = None;
    for &a in upper {
        let (ot, oh) = g.original_endpoints(a);
        let t_in = ledger.member_of(ot, z).is_some();
        let h_in = ledger.member_of(oh, z).is_some();
        if h_in && !t_in && entering.replace(a).is_some() {
            return Err(LiftError::Degree { record: record_index, what: "entering" });
        }
        if t_in && !h_in && leaving.replace(a).is_some() {
            return Err(LiftError::Degree { record: record_index, what: "leaving" });
        }
    }
    let (u, v) = attachments(g, record_index, rec, entering, leaving)?;
    let mut lower = upper.to_vec();
    lower.extend(cycle_completion(record_index, rec, u, v)?);
    lower.sort();
    Ok(lower)
}

/// Lifts `f`, a path-cycle matching of the contracted graph `contracted`, all
/// the way back to `original` (the uncontracted graph `contracted` was cloned
/// from), undoing the ledger in reverse order. Deficiency is preserved.
pub fn lift_all(original: &Digraph, contracted: &Digraph, f: &PathCycleMatching) -> Result<EvenFactor, LiftError> {
    let n = contracted.node_capacity();
    let mut out: Vec<Option<ArcId>> = vec![None; n];
    let mut inc: Vec<Option<ArcId>> = vec![None; n];
    for a in f.arcs() {
        let (t, h) = contracted.endpoints(a);
        out[t.index()] = Some(a);
        inc[h.index()] = Some(a);
    }
    let place = |out: &mut Vec<Option<ArcId>>, inc: &mut Vec<Option<ArcId>>, a: ArcId, t: NodeId, h: NodeId, r: usize| {
        if out[t.index()].replace(a).is_some() {
            return Err(LiftError::Degree { record: r, what: "outgoing" });
        }
        if inc[h.index()].replace(a).is_some() {
            return Err(LiftError::Degree { record: r, what: "incoming" });
        }
        Ok(())
    };
    let records = contracted.ledger().records();
    for (r, rec) in records.iter().enumerate().rev() {
        let z = rec.complex;
        let entering = inc[z.index()].take();
        let leaving = out[z.index()].take();
        let (u, v) = attachments(contracted, r, rec, entering, leaving)?;
        if let (Some(a), Some(u)) = (entering, u) {
            inc[u.index()] = Some(a);
        }
        if let (Some(a), Some(v)) = (leaving, v) {
            out[v.index()] = Some(a);
        }
        for a in cycle_completion(r, rec, u, v)? {
            let pos = rec.cycle_arcs.iter().position(|&c| c == a);
            let (t, h) = match pos {
                Some(i) => (rec.members[i], rec.members[(i + 1) % rec.len()]),
                None => {
                    let i = rec.reverse_arcs.iter().position(|&c| c == Some(a)).unwrap();
                    (rec.members[(i + 1) % rec.len()], rec.members[i])
                }
            };
            place(&mut out, &mut inc, a, t, h, r)?;
        }
    }
    let arcs: Vec<ArcId> = out.iter().take(original.node_capacity()).flatten().copied().collect();
    let lifted = verify(original, arcs).map_err(LiftError::Invalid)?;
    let before = f.deficiency(contracted);
    let after = lifted.deficiency(original);
    if before != after {
        return Err(LiftError::Deficiency { before, after });
    }
    Ok(lifted)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, arcs: &[(u32, u32)]) -> Digraph {
        let mut g = Digraph::with_nodes(n);
        for &(u, v) in arcs {
            g.add_arc(NodeId(u), NodeId(v)).unwrap();
        }
        g
    }

    fn arc(g: &Digraph, u: u32, v: u32) -> ArcId {
        g.arc_between(NodeId(u), NodeId(v)).unwrap()
    }

    fn symmetric_cycle(k: u32) -> Digraph {
        let mut arcs = Vec::new();
        for i in 0..k {
            arcs.push((i, (i + 1) % k));
        }
        for i in 0..k {
            arcs.push(((i + 1) % k, i));
        }
        graph(k as usize, &arcs)
    }

    #[test]
    fn verify_two_cycle() {
        let g = graph(2, &[(0, 1), (1, 0)]);
        let f = verify(&g, g.arcs()).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f.deficiency(&g), 0);
    }

    #[test]
    fn verify_rejects_odd_cycle() {
        let g = symmetric_cycle(3);
        let fwd = [arc(&g, 0, 1), arc(&g, 1, 2), arc(&g, 2, 0)];
        assert!(matches!(verify(&g, fwd), Err(Violation::OddCycle(c)) if c.len() == 3));
    }

    #[test]
    fn verify_rejects_out_degree() {
        let g = graph(3, &[(0, 1), (0, 2)]);
        assert_eq!(verify(&g, g.arcs()), Err(Violation::OutDegree(NodeId(0))));
    }

    #[test]
    fn decompose_examples() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let d = verify(&g, g.arcs()).unwrap().matching().decompose(&g);
        assert_eq!(d.paths.len(), 1);
        assert_eq!(d.paths[0].nodes, vec![NodeId(0), NodeId(1), NodeId(2)]);
        assert!(d.cycles.is_empty());

        let g = graph(4, &[(0, 1), (1, 0), (2, 3)]);
        let d = verify(&g, g.arcs()).unwrap().matching().decompose(&g);
        assert_eq!(d.cycles.len(), 1);
        assert_eq!(d.cycles[0].nodes, vec![NodeId(0), NodeId(1)]);
        assert_eq!(d.paths.len(), 1);
        assert_eq!(d.paths[0].nodes, vec![NodeId(2), NodeId(3)]);
        assert_eq!(d.arcs(), g.arcs().collect::<Vec<_>>());

        let g = graph(5, &[]);
        let d = PathCycleMatching::empty(&g).decompose(&g);
        assert_eq!(d.paths.len(), 5);
    }

    #[test]
    fn symmetric_difference_single_and_double_step() {
        let g = graph(3, &[(0, 1), (2, 1)]);
        let m = PathCycleMatching::empty(&g);
        let m1 = symmetric_difference(&g, &m, &[arc(&g, 0, 1)]).unwrap();
        assert_eq!(m1.arcs(), vec![arc(&g, 0, 1)]);

        let m = PathCycleMatching::from_arcs(&g, [arc(&g, 2, 1)]).unwrap();
        let m1 = symmetric_difference(&g, &m, &[arc(&g, 0, 1), arc(&g, 2, 1)]).unwrap();
        assert_eq!(m1.arcs(), vec![arc(&g, 0, 1)]);
    }

    #[test]
    fn fits_examples() {
        // Cycle 0->1->2->0 with a tail 3->0 and 2->4 outside.
        let g = graph(5, &[(0, 1), (1, 2), (2, 0), (3, 0), (2, 4), (1, 0), (2, 1), (0, 2)]);
        let c = Cycle {
            nodes: vec![NodeId(0), NodeId(1), NodeId(2)],
            arcs: vec![arc(&g, 0, 1), arc(&g, 1, 2), arc(&g, 2, 0)],
        };
        let fitting = PathCycleMatching::from_arcs(&g, [arc(&g, 3, 0), arc(&g, 0, 1), arc(&g, 1, 2)]).unwrap();
        assert!(fits(&g, &fitting, &c));
        let leaving = PathCycleMatching::from_arcs(&g, [arc(&g, 0, 1), arc(&g, 1, 2), arc(&g, 2, 4)]).unwrap();
        assert!(!fits(&g, &leaving, &c));
        let whole = PathCycleMatching::from_arcs(&g, c.arcs.clone()).unwrap();
        assert!(!fits(&g, &whole, &c));
    }

    fn contract_cycle(g: &mut Digraph, nodes: &[u32]) -> NodeId {
        let k = nodes.len();
        let ns: Vec<NodeId> = nodes.iter().map(|&x| NodeId(x)).collect();
        let arcs: Vec<ArcId> = (0..k).map(|i| g.arc_between(ns[i], ns[(i + 1) % k]).unwrap()).collect();
        g.contract(&ns, &arcs).unwrap()
    }

    #[test]
    fn lift_isolated_complex_node() {
        let original = symmetric_cycle(3);
        let mut g = original.clone();
        contract_cycle(&mut g, &[0, 1, 2]);
        let lifted = lift_once(&g, 0, &[]).unwrap();
        assert_eq!(lifted.len(), 2);
        verify(&original, lifted).unwrap();
    }

    #[test]
    fn lift_entering_only() {
        let mut arcs = vec![(0, 1), (1, 2), (2, 0), (1, 0), (2, 1), (0, 2)];
        arcs.push((3, 1));
        let original = graph(4, &arcs);
        let mut g = original.clone();
        let z = contract_cycle(&mut g, &[0, 1, 2]);
        let enter = g.arc_between(NodeId(3), z).unwrap();
        let upper = PathCycleMatching::from_arcs(&g, [enter]).unwrap();
        let lifted = lift_all(&original, &g, &upper).unwrap();
        assert_eq!(lifted.len(), 3);
        assert_eq!(lifted.deficiency(&original), upper.deficiency(&g));
        // path 3 -> 1 -> 2 -> 0
        assert!(lifted.arcs().contains(&arc(&original, 1, 2)));
        assert!(lifted.arcs().contains(&arc(&original, 2, 0)));
    }

    #[test]
    fn lift_through_cycle_picks_even_route() {
        // symmetric 5-cycle 0..4, path 5 -> z -> 6 enters at 0 and leaves from 2.
        let mut arcs = Vec::new();
        for i in 0..5u32 {
            arcs.push((i, (i + 1) % 5));
            arcs.push(((i + 1) % 5, i));
        }
        arcs.extend([(5, 0), (2, 6)]);
        let original = graph(7, &arcs);
        let mut g = original.clone();
        let z = contract_cycle(&mut g, &[0, 1, 2, 3, 4]);
        let upper = PathCycleMatching::from_arcs(
            &g,
            [g.arc_between(NodeId(5), z).unwrap(), g.arc_between(z, NodeId(6)).unwrap()],
        )
        .unwrap();
        let lifted = lift_all(&original, &g, &upper).unwrap();
        assert_eq!(lifted.len(), 6);
        assert_eq!(lifted.deficiency(&original), upper.deficiency(&g));
        // forward route 0->1->2 has even length 2; 3,4 form a 2-cycle
        let d = lifted.matching().decompose(&original);
        assert_eq!(d.paths.len(), 1);
        assert_eq!(d.paths[0].nodes.len(), 5);
        assert_eq!(d.cycles.len(), 1);
        assert!(!d.cycles[0].is_odd());
    }

    #[test]
    fn lift_backward_route() {
        // enter at 0, leave at 1: forward length 1 (odd) so route 0->4->3->2->1 backwards.
        let mut arcs = Vec::new();
        for i in 0..5u32 {
            arcs.push((i, (i + 1) % 5));
            arcs.push(((i + 1) % 5, i));
        }
        arcs.extend([(5, 0), (1, 5)]);
        let original = graph(6, &arcs);
        let mut g = original.clone();
        let z = contract_cycle(&mut g, &[0, 1, 2, 3, 4]);
        let upper = PathCycleMatching::from_arcs(
            &g,
            [g.arc_between(NodeId(5), z).unwrap(), g.arc_between(z, NodeId(5)).unwrap()],
        )
        .unwrap();
        let lifted = lift_all(&original, &g, &upper).unwrap();
        assert_eq!(lifted.len(), 6);
        let d = lifted.matching().decompose(&original);
        assert_eq!(d.cycles.len(), 1);
        assert_eq!(d.cycles[0].len(), 6);
        let via_once = lift_once(&g, 0, &upper.arcs()).unwrap();
        assert_eq!(via_once, lifted.arcs());
    }

    #[test]
    fn lift_same_attachment() {
        let mut arcs = Vec::new();
        for i in 0..5u32 {
            arcs.push((i, (i + 1) % 5));
            arcs.push(((i + 1) % 5, i));
        }
        arcs.extend([(5, 3), (3, 6)]);
        let original = graph(7, &arcs);
        let mut g = original.clone();
        let z = contract_cycle(&mut g, &[0, 1, 2, 3, 4]);
        let upper = PathCycleMatching::from_arcs(
            &g,
            [g.arc_between(NodeId(5), z).unwrap(), g.arc_between(z, NodeId(6)).unwrap()],
        )
        .unwrap();
        let lifted = lift_all(&original, &g, &upper).unwrap();
        assert_eq!(lifted.len(), 6);
        assert_eq!(lifted.matching().decompose(&original).cycles.len(), 2);
    }

    #[test]
    fn lift_missing_reverse_is_reported() {
        let original = graph(4, &[(0, 1), (1, 2), (2, 0), (3, 0), (1, 3)]);
        let mut g = original.clone();
        let z = contract_cycle(&mut g, &[0, 1, 2]);
        // enter at 0, leave at 1: forward route odd, needs reverse arcs
        let upper = PathCycleMatching::from_arcs(
            &g,
            [g.arc_between(NodeId(3), z).unwrap(), g.arc_between(z, NodeId(3)).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            lift_all(&original, &g, &upper),
            Err(LiftError::MissingSymmetricArc { .. })
        ));
    }

    #[test]
    fn lift_empty_ledger_is_identity() {
        let g = graph(3, &[(0, 1), (1, 2)]);
        let m = PathCycleMatching::from_arcs(&g, g.arcs()).unwrap();
        assert_eq!(lift_all(&g, &g, &m).unwrap().arcs(), m.arcs());
    }

    #[test]
    fn aux_view_second_copies_have_out_degree_at_most_one() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let m = PathCycleMatching::from_arcs(&g, [arc(&g, 0, 1), arc(&g, 2, 3)]).unwrap();
        let aux = AuxView::new(&g, &m);
        assert!(aux.is_source(NodeId(1)));
        assert!(!aux.is_source(NodeId(0)));
        assert!(aux.is_sink(NodeId(0)));
        assert_eq!(aux.successor_of_second(NodeId(1)), Some((arc(&g, 0, 1), NodeId(0))));
        let succ: Vec<_> = aux.successors_of_first(NodeId(0)).map(|(_, v)| v).collect();
        assert_eq!(succ, vec![NodeId(2)]);
    }

    #[test]
    fn rebase_maps_merged_arcs_to_survivor() {
        let mut g = graph(4, &[(0, 1), (1, 2), (2, 0), (3, 1), (3, 0)]);
        let m = PathCycleMatching::from_arcs(&g, [arc(&g, 3, 0), arc(&g, 0, 1), arc(&g, 1, 2)]).unwrap();
        let z = contract_cycle(&mut g, &[0, 1, 2]);
        let projected = rebase(&g, &m, &g).unwrap();
        assert_eq!(projected.arcs(), vec![g.arc_between(NodeId(3), z).unwrap()]);
    }
}
