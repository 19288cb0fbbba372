//! Simple digraphs with loop-free contraction.
//!
//! Arcs keep their [`ArcId`] for the lifetime of a graph: contracting a node
//! set redirects endpoints but never renumbers arcs, so an arc of a contracted
//! graph is always identified with its pre-image. Parallel arcs created by a
//! contraction are merged immediately (lowest id survives) and every merge is
//! written to the [`ContractionLedger`].

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Dense node index. Complex nodes created by contraction get fresh indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

/// Dense arc index, never reused within one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArcId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("loop at node {0} is not allowed")]
    Loop(NodeId),
    #[error("node {0} is not alive")]
    DeadNode(NodeId),
    #[error("arc {0} is not alive")]
    DeadArc(ArcId),
    #[error("not a cycle: {0}")]
    NotACycle(String),
    #[error("nodes and arcs cannot be added after a contraction")]
    Frozen,
}

#[derive(Clone, Debug)]
struct ArcSlot {
    tail: NodeId,
    head: NodeId,
    orig_tail: NodeId,
    orig_head: NodeId,
    alive: bool,
}

/// One contraction: the ordered cycle that was shrunk into `complex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionRecord {
    pub complex: NodeId,
    /// Cycle nodes in cycle order; `cycle_arcs[i]` goes from `members[i]` to `members[i + 1]`.
    pub members: Vec<NodeId>,
    pub cycle_arcs: Vec<ArcId>,
    /// Reverse of each cycle arc as it existed right before the contraction.
    pub reverse_arcs: Vec<Option<ArcId>>,
    /// Parallel arcs merged by this contraction, as `(removed, representative)`.
    pub merged: Vec<(ArcId, ArcId)>,
}

impl ContractionRecord {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.members.iter().position(|&x| x == node)
    }
}

/// Ordered contraction history plus the node forest linking every contracted
/// node to the complex node that absorbed it.
#[derive(Clone, Debug, Default)]
pub struct ContractionLedger {
    records: Vec<ContractionRecord>,
    parent: Vec<Option<NodeId>>,
}

impl ContractionLedger {
    pub fn records(&self) -> &[ContractionRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent.get(node.index()).copied().flatten()
    }

    /// The alive node that currently contains `node`.
    pub fn find(&self, mut node: NodeId) -> NodeId {
        while let Some(p) = self.parent(node) {
            node = p;
        }
        node
    }

    /// The direct member of `complex` whose subtree holds `node`, if any.
    pub fn member_of(&self, mut node: NodeId, complex: NodeId) -> Option<NodeId> {
        loop {
            match self.parent(node) {
                Some(p) if p == complex => return Some(node),
                Some(p) => node = p,
                None => return None,
            }
        }
    }

    /// Maximal contracted sets: for every alive complex node, the original
    /// (non-complex) nodes it contains. Sorted by complex id.
    pub fn maximal_sets(&self, alive: impl Fn(NodeId) -> bool) -> Vec<(NodeId, Vec<NodeId>)> {
        let complex: std::collections::HashSet<NodeId> =
            self.records.iter().map(|r| r.complex).collect();
        let mut sets: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for i in 0..self.parent.len() {
            let node = NodeId(i as u32);
            if complex.contains(&node) || self.parent(node).is_none() {
                continue;
            }
            let root = self.find(node);
            if alive(root) {
                sets.entry(root).or_default().push(node);
            }
        }
        let mut out: Vec<_> = sets.into_iter().collect();
        out.sort_by_key(|(z, _)| *z);
        out
    }
}

/// A simple loop-free digraph supporting cycle contraction.
#[derive(Clone, Debug, Default)]
pub struct Digraph {
    alive: Vec<bool>,
    arcs: Vec<ArcSlot>,
    // Adjacency lists may hold dead or redirected arcs; readers filter them.
    out: Vec<Vec<ArcId>>,
    inc: Vec<Vec<ArcId>>,
    pairs: HashMap<(NodeId, NodeId), ArcId>,
    live_nodes: usize,
    live_arcs: usize,
    ledger: ContractionLedger,
}

impl Digraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_nodes(n: usize) -> Self {
        let mut g = Self::new();
        for _ in 0..n {
            g.push_node(true);
        }
        g
    }

    /// Arc-less graph sharing the node id space of `template`, including dead
    /// and complex slots. Contractions applied to both in the same order
    /// produce identical complex node ids.
    pub fn with_node_slots(template: &Digraph) -> Self {
        let mut g = Self::new();
        for &alive in &template.alive {
            g.push_node(alive);
        }
        g
    }

    fn push_node(&mut self, alive: bool) -> NodeId {
        let id = NodeId(self.alive.len() as u32);
        self.alive.push(alive);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        self.ledger.parent.push(None);
        if alive {
            self.live_nodes += 1;
        }
        id
    }

    pub fn add_node(&mut self) -> Result<NodeId, GraphError> {
        if !self.ledger.is_empty() {
            return Err(GraphError::Frozen);
        }
        Ok(self.push_node(true))
    }

    /// Adds `tail -> head`. Requesting an existing arc returns its id.
    pub fn add_arc(&mut self, tail: NodeId, head: NodeId) -> Result<ArcId, GraphError> {
        if !self.ledger.is_empty() {
            return Err(GraphError::Frozen);
        }
        self.check_node(tail)?;
        self.check_node(head)?;
        if tail == head {
            return Err(GraphError::Loop(tail));
        }
        if let Some(&a) = self.pairs.get(&(tail, head)) {
            return Ok(a);
        }
        let id = ArcId(self.arcs.len() as u32);
        self.arcs.push(ArcSlot {
            tail,
            head,
            orig_tail: tail,
            orig_head: head,
            alive: true,
        });
        self.out[tail.index()].push(id);
        self.inc[head.index()].push(id);
        self.pairs.insert((tail, head), id);
        self.live_arcs += 1;
        Ok(id)
    }

    fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if self.is_alive_node(v) {
            Ok(())
        } else {
            Err(GraphError::DeadNode(v))
        }
    }

    fn check_arc(&self, a: ArcId) -> Result<(), GraphError> {
        if self.is_alive_arc(a) {
            Ok(())
        } else {
            Err(GraphError::DeadArc(a))
        }
    }

    /// Number of node slots ever allocated (alive or not).
    pub fn node_capacity(&self) -> usize {
        self.alive.len()
    }

    pub fn arc_capacity(&self) -> usize {
        self.arcs.len()
    }

    pub fn node_count(&self) -> usize {
        self.live_nodes
    }

    pub fn arc_count(&self) -> usize {
        self.live_arcs
    }

    pub fn is_alive_node(&self, v: NodeId) -> bool {
        self.alive.get(v.index()).copied().unwrap_or(false)
    }

    pub fn is_alive_arc(&self, a: ArcId) -> bool {
        self.arcs.get(a.index()).is_some_and(|s| s.alive)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.alive
            .iter()
            .enumerate()
            .filter(|(_, &alive)| alive)
            .map(|(i, _)| NodeId(i as u32))
    }

    pub fn arcs(&self) -> impl Iterator<Item = ArcId> + '_ {
        self.arcs
            .iter()
            .enumerate()
            .filter(|(_, s)| s.alive)
            .map(|(i, _)| ArcId(i as u32))
    }

    /// Current tail. For dead arcs this is the tail at the time of death.
    #[inline]
    pub fn tail(&self, a: ArcId) -> NodeId {
        self.arcs[a.index()].tail
    }

    #[inline]
    pub fn head(&self, a: ArcId) -> NodeId {
        self.arcs[a.index()].head
    }

    #[inline]
    pub fn endpoints(&self, a: ArcId) -> (NodeId, NodeId) {
        let s = &self.arcs[a.index()];
        (s.tail, s.head)
    }

    /// Endpoints at the time the arc was added.
    pub fn original_endpoints(&self, a: ArcId) -> (NodeId, NodeId) {
        let s = &self.arcs[a.index()];
        (s.orig_tail, s.orig_head)
    }

    pub fn out_arcs(&self, u: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.out[u.index()]
            .iter()
            .copied()
            .filter(move |&a| self.arcs[a.index()].alive && self.arcs[a.index()].tail == u)
    }

    pub fn in_arcs(&self, v: NodeId) -> impl Iterator<Item = ArcId> + '_ {
        self.inc[v.index()]
            .iter()
            .copied()
            .filter(move |&a| self.arcs[a.index()].alive && self.arcs[a.index()].head == v)
    }

    pub fn arc_between(&self, tail: NodeId, head: NodeId) -> Option<ArcId> {
        self.pairs.get(&(tail, head)).copied()
    }

    /// The alive reverse of `a`, if present.
    pub fn symmetric_of(&self, a: ArcId) -> Result<Option<ArcId>, GraphError> {
        self.check_arc(a)?;
        let (t, h) = self.endpoints(a);
        Ok(self.arc_between(h, t))
    }

    pub fn ledger(&self) -> &ContractionLedger {
        &self.ledger
    }

    /// Alive node currently containing `v` (identity for alive nodes).
    pub fn find(&self, v: NodeId) -> NodeId {
        self.ledger.find(v)
    }

    /// Contracts a simple cycle into a fresh complex node and returns it.
    ///
    /// `cycle_arcs[i]` must go from `cycle_nodes[i]` to `cycle_nodes[(i + 1) % k]`.
    /// Arcs inside the cycle's node set are dropped, boundary arcs are
    /// redirected, and parallel arcs are merged keeping the lowest id.
    pub fn contract(&mut self, cycle_nodes: &[NodeId], cycle_arcs: &[ArcId]) -> Result<NodeId, GraphError> {
        let k = cycle_nodes.len();
        if k < 2 || cycle_arcs.len() != k {
            return Err(GraphError::NotACycle(format!(
                "{} nodes with {} arcs",
                k,
                cycle_arcs.len()
            )));
        }
        let mut member = vec![false; self.node_capacity() + 1];
        for &x in cycle_nodes {
            self.check_node(x)?;
            if std::mem::replace(&mut member[x.index()], true) {
                return Err(GraphError::NotACycle(format!("node {x} repeated")));
            }
        }
        for (i, &a) in cycle_arcs.iter().enumerate() {
            self.check_arc(a)?;
            let expect = (cycle_nodes[i], cycle_nodes[(i + 1) % k]);
            if self.endpoints(a) != expect {
                return Err(GraphError::NotACycle(format!(
                    "arc {a} is not {} -> {}",
                    expect.0, expect.1
                )));
            }
        }
        let reverse_arcs = cycle_arcs
            .iter()
            .map(|&a| {
                let (t, h) = self.endpoints(a);
                self.arc_between(h, t)
            })
            .collect();

        let z = self.push_node(true);
        let mut leaving: HashMap<NodeId, Vec<ArcId>> = HashMap::new();
        let mut entering: HashMap<NodeId, Vec<ArcId>> = HashMap::new();

        for &x in cycle_nodes {
            for a in std::mem::take(&mut self.out[x.index()]) {
                let s = &self.arcs[a.index()];
                if !s.alive || s.tail != x {
                    continue;
                }
                let h = s.head;
                self.pairs.remove(&(x, h));
                if member[h.index()] {
                    self.kill(a);
                    continue;
                }
                self.arcs[a.index()].tail = z;
                leaving.entry(h).or_default().push(a);
            }
            for a in std::mem::take(&mut self.inc[x.index()]) {
                let s = &self.arcs[a.index()];
                if !s.alive || s.head != x {
                    continue;
                }
                let t = s.tail;
                self.pairs.remove(&(t, x));
                if t == z || member[t.index()] {
                    // already handled as an internal arc from the out pass
                    continue;
                }
                self.arcs[a.index()].head = z;
                entering.entry(t).or_default().push(a);
            }
        }
        let mut merged = Vec::new();
        let out_z = Self::keep_lowest(leaving, &mut merged);
        let in_z = Self::keep_lowest(entering, &mut merged);
        for &(loser, _) in &merged {
            self.kill(loser);
        }
        for (h, a) in out_z {
            self.pairs.insert((z, h), a);
            self.out[z.index()].push(a);
        }
        for (t, a) in in_z {
            self.pairs.insert((t, z), a);
            self.inc[z.index()].push(a);
        }
        for &x in cycle_nodes {
            self.alive[x.index()] = false;
            self.ledger.parent[x.index()] = Some(z);
        }
        self.live_nodes -= k;
        merged.sort();
        self.ledger.records.push(ContractionRecord {
            complex: z,
            members: cycle_nodes.to_vec(),
            cycle_arcs: cycle_arcs.to_vec(),
            reverse_arcs,
            merged,
        });
        Ok(z)
    }

    /// Picks the lowest arc id per far endpoint; the rest are recorded as merged into it.
    fn keep_lowest(
        groups: HashMap<NodeId, Vec<ArcId>>,
        merged: &mut Vec<(ArcId, ArcId)>,
    ) -> Vec<(NodeId, ArcId)> {
        let mut reps: Vec<(NodeId, ArcId)> = groups
            .into_iter()
            .map(|(x, arcs)| {
                let rep = *arcs.iter().min().unwrap();
                merged.extend(arcs.into_iter().filter(|&a| a != rep).map(|a| (a, rep)));
                (x, rep)
            })
            .collect();
        reps.sort();
        reps
    }

    fn kill(&mut self, a: ArcId) {
        let s = &mut self.arcs[a.index()];
        if s.alive {
            s.alive = false;
            self.live_arcs -= 1;
        }
    }

    /// Graphviz rendering of the alive part.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph G {\n");
        for v in self.nodes() {
            s.push_str(&format!("  {v};\n"));
        }
        for a in self.arcs() {
            let (t, h) = self.endpoints(a);
            s.push_str(&format!("  {t} -> {h} [label=\"{}\"];\n", a.0));
        }
        s.push_str("}\n");
        s
    }
}

/// Result of the conservative odd-cycle-symmetry check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Symmetry {
    Valid,
    /// A non-symmetric arc lying on an odd closed walk.
    PossiblyInvalid(ArcId),
}

/// Accepts `g` when no non-symmetric arc lies on a closed walk of odd length.
///
/// A closed walk through an arc stays inside one strongly connected component,
/// and inside a strongly connected component every arc lies on an odd closed
/// walk exactly when the component is not 2-colourable. So the check is one
/// SCC pass plus a 2-colouring per component.
pub fn validate_odd_cycle_symmetric(g: &Digraph) -> Symmetry {
    let comp = strongly_connected_components(g);
    let n = g.node_capacity();
    let mut colour: Vec<Option<bool>> = vec![None; n];
    let mut odd_component = vec![false; n];
    let mut queue = Vec::new();
    for s in g.nodes() {
        if colour[s.index()].is_some() {
            continue;
        }
        colour[s.index()] = Some(false);
        queue.push(s);
        let c = comp[s.index()];
        while let Some(x) = queue.pop() {
            let cx = colour[x.index()].unwrap();
            let nbrs = g
                .out_arcs(x)
                .map(|a| g.head(a))
                .chain(g.in_arcs(x).map(|a| g.tail(a)));
            for y in nbrs {
                if comp[y.index()] != c {
                    continue;
                }
                match colour[y.index()] {
                    None => {
                        colour[y.index()] = Some(!cx);
                        queue.push(y);
                    }
                    Some(cy) if cy == cx => odd_component[c] = true,
                    Some(_) => {}
                }
            }
        }
    }
    for a in g.arcs() {
        let (t, h) = g.endpoints(a);
        if comp[t.index()] == comp[h.index()]
            && odd_component[comp[t.index()]]
            && g.arc_between(h, t).is_none()
        {
            return Symmetry::PossiblyInvalid(a);
        }
    }
    Symmetry::Valid
}

/// Component index per node slot (dead slots get `usize::MAX`). Iterative Tarjan.
pub fn strongly_connected_components(g: &Digraph) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = g.node_capacity();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let succ: Vec<Vec<NodeId>> = (0..n)
        .map(|i| {
            let v = NodeId(i as u32);
            if g.is_alive_node(v) {
                g.out_arcs(v).map(|a| g.head(a)).collect()
            } else {
                Vec::new()
            }
        })
        .collect();
    for root in g.nodes() {
        if index[root.index()] != UNSEEN {
            continue;
        }
        let mut call: Vec<(NodeId, usize)> = vec![(root, 0)];
        index[root.index()] = next_index;
        low[root.index()] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root.index()] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v.index()].get(*pos) {
                *pos += 1;
                if index[w.index()] == UNSEEN {
                    index[w.index()] = next_index;
                    low[w.index()] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w.index()] = true;
                    call.push((w, 0));
                } else if on_stack[w.index()] {
                    low[v.index()] = low[v.index()].min(index[w.index()]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent.index()] = low[parent.index()].min(low[v.index()]);
            }
            if low[v.index()] == index[v.index()] {
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w.index()] = false;
                    comp[w.index()] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
