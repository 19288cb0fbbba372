//! Dynamic node-disjoint paths and cycles over a fixed node universe.
//!
//! Every path or cycle is an implicit-key treap holding its nodes in order;
//! a cycle is stored as a linear sequence plus a circular flag on the root.
//! `insert`, `remove` and `is_odd_cycle` cost `O(log n)` expected tree steps.
//! All mutations go through a journal so checkpoints can be rolled back.

use thiserror::Error;

const NIL: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("node {0} is outside the universe")]
    OutOfRange(u32),
    #[error("insert({0}, {1}): {0} is not the last node of a path")]
    NotPathEnd(u32, u32),
    #[error("insert({0}, {1}): {1} is not the first node of a path")]
    NotPathStart(u32, u32),
    #[error("arc ({0}, {1}) is not present")]
    ArcAbsent(u32, u32),
    #[error("checkpoint is not active (already rolled back or unknown)")]
    StaleCheckpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InsertOutcome {
    LinkedPaths,
    /// The arc closed a cycle with this many arcs.
    ClosedCycle { len: usize },
}

impl InsertOutcome {
    pub fn is_odd_cycle(self) -> bool {
        matches!(self, InsertOutcome::ClosedCycle { len } if len % 2 == 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StoreOp {
    Insert(u32, u32),
    Remove(u32, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Undo {
    Inserted(u32, u32),
    Removed(u32, u32),
}

/// Handle returned by [`PathCycleStore::checkpoint`].
#[derive(Debug, PartialEq, Eq)]
#[must_use]
pub struct Checkpoint {
    serial: u64,
}

/// Tree work counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StoreStats {
    /// Successful public operations (insert, remove, is_odd_cycle) plus undo steps.
    pub calls: u64,
    /// Tree nodes touched by splits, merges and root/rank walks.
    pub tree_steps: u64,
}

/// Canonical content: open paths as node sequences, cycles rotated to start at
/// their smallest node. Sorted, so equal states compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub paths: Vec<Vec<u32>>,
    pub cycles: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct PathCycleStore {
    left: Vec<u32>,
    right: Vec<u32>,
    parent: Vec<u32>,
    size: Vec<u32>,
    prio: Vec<u64>,
    circular: Vec<bool>,
    succ: Vec<u32>,
    pred: Vec<u32>,
    journal: Vec<Undo>,
    marks: Vec<(u64, usize)>,
    next_serial: u64,
    stats: StoreStats,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl PathCycleStore {
    /// `n` singleton paths.
    pub fn new(n: usize) -> Self {
        PathCycleStore {
            left: vec![NIL; n],
            right: vec![NIL; n],
            parent: vec![NIL; n],
            size: vec![1; n],
            prio: (0..n as u64).map(splitmix).collect(),
            circular: vec![false; n],
            succ: vec![NIL; n],
            pred: vec![NIL; n],
            journal: Vec::new(),
            marks: Vec::new(),
            next_serial: 0,
            stats: StoreStats::default(),
        }
    }

    pub fn universe(&self) -> usize {
        self.size.len()
    }

    pub fn stats(&self) -> StoreStats {
        self.stats
    }

    pub fn successor(&self, u: u32) -> Option<u32> {
        self.succ.get(u as usize).copied().filter(|&s| s != NIL)
    }

    pub fn predecessor(&self, u: u32) -> Option<u32> {
        self.pred.get(u as usize).copied().filter(|&s| s != NIL)
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        self.successor(u) == Some(v)
    }

    fn check(&self, u: u32) -> Result<(), StoreError> {
        if (u as usize) < self.universe() {
            Ok(())
        } else {
            Err(StoreError::OutOfRange(u))
        }
    }

    #[inline]
    fn sz(&self, t: u32) -> u32 {
        if t == NIL {
            0
        } else {
            self.size[t as usize]
        }
    }

    fn pull(&mut self, t: u32) {
        let (l, r) = (self.left[t as usize], self.right[t as usize]);
        self.size[t as usize] = 1 + self.sz(l) + self.sz(r);
        if l != NIL {
            self.parent[l as usize] = t;
        }
        if r != NIL {
            self.parent[r as usize] = t;
        }
    }

    fn root(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != NIL {
            x = self.parent[x as usize];
            self.stats.tree_steps += 1;
        }
        x
    }

    /// Zero-based position of `x` in its sequence.
    fn rank(&mut self, x: u32) -> u32 {
        let mut r = self.sz(self.left[x as usize]);
        let mut cur = x;
        while self.parent[cur as usize] != NIL {
            let p = self.parent[cur as usize];
            if self.right[p as usize] == cur {
                r += self.sz(self.left[p as usize]) + 1;
            }
            cur = p;
            self.stats.tree_steps += 1;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        self.stats.tree_steps += 1;
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.prio[a as usize] > self.prio[b as usize] {
            let r = self.merge(self.right[a as usize], b);
            self.right[a as usize] = r;
            self.pull(a);
            self.parent[a as usize] = NIL;
            a
        } else {
            let l = self.merge(a, self.left[b as usize]);
            self.left[b as usize] = l;
            self.pull(b);
            self.parent[b as usize] = NIL;
            b
        }
    }

    /// Splits `t` into its first `k` elements and the rest.
    fn split(&mut self, t: u32, k: u32) -> (u32, u32) {
        self.stats.tree_steps += 1;
        if t == NIL {
            return (NIL, NIL);
        }
        let ls = self.sz(self.left[t as usize]);
        if k <= ls {
            let (a, b) = self.split(self.left[t as usize], k);
            self.left[t as usize] = b;
            self.pull(t);
            self.parent[t as usize] = NIL;
            if a != NIL {
                self.parent[a as usize] = NIL;
            }
            (a, t)
        } else {
            let (a, b) = self.split(self.right[t as usize], k - ls - 1);
            self.right[t as usize] = a;
            self.pull(t);
            self.parent[t as usize] = NIL;
            if b != NIL {
                self.parent[b as usize] = NIL;
            }
            (t, b)
        }
    }

    fn raw_insert(&mut self, u: u32, v: u32) -> Result<InsertOutcome, StoreError> {
        self.check(u)?;
        self.check(v)?;
        if self.succ[u as usize] != NIL {
            return Err(StoreError::NotPathEnd(u, v));
        }
        if self.pred[v as usize] != NIL {
            return Err(StoreError::NotPathStart(u, v));
        }
        let ru = self.root(u);
        let rv = self.root(v);
        self.succ[u as usize] = v;
        self.pred[v as usize] = u;
        if ru == rv {
            self.circular[ru as usize] = true;
            Ok(InsertOutcome::ClosedCycle {
                len: self.size[ru as usize] as usize,
            })
        } else {
            self.circular[ru as usize] = false;
            self.circular[rv as usize] = false;
            let r = self.merge(ru, rv);
            self.circular[r as usize] = false;
            Ok(InsertOutcome::LinkedPaths)
        }
    }

    fn raw_remove(&mut self, u: u32, v: u32) -> Result<(), StoreError> {
        self.check(u)?;
        self.check(v)?;
        if self.succ[u as usize] != v {
            return Err(StoreError::ArcAbsent(u, v));
        }
        self.succ[u as usize] = NIL;
        self.pred[v as usize] = NIL;
        let r = self.root(u);
        let k = self.rank(v);
        if self.circular[r as usize] {
            self.circular[r as usize] = false;
            if k != 0 {
                let (a, b) = self.split(r, k);
                let r2 = self.merge(b, a);
                self.circular[r2 as usize] = false;
            }
        } else {
            let (a, b) = self.split(r, k);
            self.circular[a as usize] = false;
            self.circular[b as usize] = false;
        }
        Ok(())
    }

    /// Links path end `u` to path start `v`.
    pub fn insert(&mut self, u: u32, v: u32) -> Result<InsertOutcome, StoreError> {
        let out = self.raw_insert(u, v)?;
        self.stats.calls += 1;
        self.journal.push(Undo::Inserted(u, v));
        Ok(out)
    }

    /// Deletes arc `(u, v)`; a cycle opens into a path from `v` to `u`.
    pub fn remove(&mut self, u: u32, v: u32) -> Result<(), StoreError> {
        self.raw_remove(u, v)?;
        self.stats.calls += 1;
        self.journal.push(Undo::Removed(u, v));
        Ok(())
    }

    /// Whether arc `(u, v)` lies on an odd cycle. An arc on a path is never odd.
    pub fn is_odd_cycle(&mut self, u: u32, v: u32) -> Result<bool, StoreError> {
        self.check(u)?;
        if self.succ[u as usize] != v {
            return Err(StoreError::ArcAbsent(u, v));
        }
        self.stats.calls += 1;
        let r = self.root(u);
        Ok(self.circular[r as usize] && self.size[r as usize] % 2 == 1)
    }

    /// Nodes of the cycle through `u` in order starting from `u`, if `u` is on a cycle.
    pub fn cycle_nodes(&mut self, u: u32) -> Option<Vec<u32>> {
        let r = self.root(u);
        if !self.circular[r as usize] {
            return None;
        }
        let mut nodes = vec![u];
        let mut x = self.succ[u as usize];
        while x != u {
            nodes.push(x);
            x = self.succ[x as usize];
        }
        Some(nodes)
    }

    pub fn checkpoint(&mut self) -> Checkpoint {
        let serial = self.next_serial;
        self.next_serial += 1;
        self.marks.push((serial, self.journal.len()));
        Checkpoint { serial }
    }

    /// Undoes everything since `cp` (and any later checkpoints).
    pub fn rollback(&mut self, cp: Checkpoint) -> Result<(), StoreError> {
        let idx = self
            .marks
            .iter()
            .rposition(|&(s, _)| s == cp.serial)
            .ok_or(StoreError::StaleCheckpoint)?;
        let len = self.marks[idx].1;
        self.marks.truncate(idx);
        while self.journal.len() > len {
            self.stats.calls += 1;
            match self.journal.pop().unwrap() {
                Undo::Inserted(u, v) => self.raw_remove(u, v).expect("journal replay"),
                Undo::Removed(u, v) => {
                    self.raw_insert(u, v).expect("journal replay");
                }
            }
        }
        Ok(())
    }

    /// Applies `ops` under a fresh checkpoint. On failure the partial work is
    /// undone and the error returned.
    pub fn speculate(&mut self, ops: &[StoreOp]) -> Result<(Checkpoint, Vec<Option<InsertOutcome>>), StoreError> {
        let cp = self.checkpoint();
        let mut outcomes = Vec::with_capacity(ops.len());
        for &op in ops {
            let r = match op {
                StoreOp::Insert(u, v) => self.insert(u, v).map(Some),
                StoreOp::Remove(u, v) => self.remove(u, v).map(|_| None),
            };
            match r {
                Ok(o) => outcomes.push(o),
                Err(e) => {
                    self.rollback(cp).expect("fresh checkpoint");
                    return Err(e);
                }
            }
        }
        Ok((cp, outcomes))
    }

    fn in_order(&self, root: u32, out: &mut Vec<u32>) {
        let mut stack = Vec::new();
        let mut cur = root;
        while cur != NIL || !stack.is_empty() {
            while cur != NIL {
                stack.push(cur);
                cur = self.left[cur as usize];
            }
            let t = stack.pop().unwrap();
            out.push(t);
            cur = self.right[t as usize];
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut paths = Vec::new();
        let mut cycles = Vec::new();
        for r in 0..self.universe() as u32 {
            if self.parent[r as usize] != NIL {
                continue;
            }
            let mut seq = Vec::new();
            self.in_order(r, &mut seq);
            if self.circular[r as usize] {
                let m = seq.iter().enumerate().min_by_key(|(_, &x)| x).unwrap().0;
                seq.rotate_left(m);
                cycles.push(seq);
            } else {
                paths.push(seq);
            }
        }
        paths.sort();
        cycles.sort();
        Snapshot { paths, cycles }
    }

    /// Full consistency scan; returns a description of the first problem.
    pub fn check_invariants(&self) -> Result<(), String> {
        let n = self.universe();
        let mut seen = vec![false; n];
        for r in 0..n as u32 {
            if self.parent[r as usize] != NIL {
                continue;
            }
            let mut seq = Vec::new();
            self.in_order(r, &mut seq);
            if seq.len() as u32 != self.size[r as usize] {
                return Err(format!("size mismatch at root {r}"));
            }
            for w in seq.windows(2) {
                if self.succ[w[0] as usize] != w[1] || self.pred[w[1] as usize] != w[0] {
                    return Err(format!("adjacency {} -> {} not recorded", w[0], w[1]));
                }
            }
            let (first, last) = (seq[0], *seq.last().unwrap());
            if self.circular[r as usize] {
                if self.succ[last as usize] != first {
                    return Err(format!("cycle at root {r} not closed"));
                }
            } else if self.pred[first as usize] != NIL || self.succ[last as usize] != NIL {
                return Err(format!("path at root {r} has dangling ends"));
            }
            for x in seq {
                if std::mem::replace(&mut seen[x as usize], true) {
                    return Err(format!("node {x} appears twice"));
                }
            }
        }
        if let Some(x) = seen.iter().position(|&s| !s) {
            return Err(format!("node {x} is missing"));
        }
        Ok(())
    }
}

/// O(n)-per-operation reference used in differential tests.
#[derive(Clone, Debug)]
pub struct NaiveStore {
    /// Each container: node order and circular flag.
    containers: Vec<(Vec<u32>, bool)>,
    undo: Vec<Vec<(Vec<u32>, bool)>>,
}

impl NaiveStore {
    pub fn new(n: usize) -> Self {
        NaiveStore {
            containers: (0..n as u32).map(|x| (vec![x], false)).collect(),
            undo: Vec::new(),
        }
    }

    fn locate(&self, x: u32) -> Option<(usize, usize)> {
        self.containers
            .iter()
            .enumerate()
            .find_map(|(i, (seq, _))| seq.iter().position(|&y| y == x).map(|p| (i, p)))
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        match (self.locate(u), self.locate(v)) {
            (Some((i, p)), Some((j, q))) if i == j => {
                let (seq, circ) = &self.containers[i];
                q == p + 1 || (*circ && p + 1 == seq.len() && q == 0)
            }
            _ => false,
        }
    }

    pub fn insert(&mut self, u: u32, v: u32) -> Result<InsertOutcome, StoreError> {
        let (i, p) = self.locate(u).ok_or(StoreError::OutOfRange(u))?;
        let (j, q) = self.locate(v).ok_or(StoreError::OutOfRange(v))?;
        if self.containers[i].1 || p + 1 != self.containers[i].0.len() {
            return Err(StoreError::NotPathEnd(u, v));
        }
        if self.containers[j].1 || q != 0 {
            return Err(StoreError::NotPathStart(u, v));
        }
        if i == j {
            self.containers[i].1 = true;
            return Ok(InsertOutcome::ClosedCycle {
                len: self.containers[i].0.len(),
            });
        }
        let tail = std::mem::take(&mut self.containers[j].0);
        self.containers[i].0.extend(tail);
        self.containers.swap_remove(j);
        Ok(InsertOutcome::LinkedPaths)
    }

    pub fn remove(&mut self, u: u32, v: u32) -> Result<(), StoreError> {
        if !self.has_arc(u, v) {
            return Err(StoreError::ArcAbsent(u, v));
        }
        let (j, q) = self.locate(v).unwrap();
        let (seq, circ) = &mut self.containers[j];
        if *circ {
            seq.rotate_left(q);
            *circ = false;
        } else {
            let rest = seq.split_off(q);
            self.containers.push((rest, false));
        }
        Ok(())
    }

    pub fn is_odd_cycle(&self, u: u32, v: u32) -> Result<bool, StoreError> {
        if !self.has_arc(u, v) {
            return Err(StoreError::ArcAbsent(u, v));
        }
        let (i, _) = self.locate(u).unwrap();
        let (seq, circ) = &self.containers[i];
        Ok(*circ && seq.len() % 2 == 1)
    }

    pub fn checkpoint(&mut self) {
        self.undo.push(self.containers.clone());
    }

    pub fn rollback(&mut self) {
        self.containers = self.undo.pop().expect("checkpoint");
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut paths = Vec::new();
        let mut cycles = Vec::new();
        for (seq, circ) in &self.containers {
            let mut seq = seq.clone();
            if *circ {
                let m = seq.iter().enumerate().min_by_key(|(_, &x)| x).unwrap().0;
                seq.rotate_left(m);
                cycles.push(seq);
            } else {
                paths.push(seq);
            }
        }
        paths.sort();
        cycles.sort();
        Snapshot { paths, cycles }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn insert_links_paths() {
        let mut d = PathCycleStore::new(3);
        d.insert(0, 1).unwrap();
        assert_eq!(d.insert(1, 2), Ok(InsertOutcome::LinkedPaths));
        assert_eq!(d.snapshot().paths, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn insert_closes_even_and_odd_cycles() {
        let mut d = PathCycleStore::new(2);
        d.insert(0, 1).unwrap();
        assert_eq!(d.insert(1, 0), Ok(InsertOutcome::ClosedCycle { len: 2 }));
        assert_eq!(d.is_odd_cycle(1, 0), Ok(false));

        let mut d = PathCycleStore::new(3);
        d.insert(0, 1).unwrap();
        d.insert(1, 2).unwrap();
        let out = d.insert(2, 0).unwrap();
        assert!(out.is_odd_cycle());
        assert_eq!(d.is_odd_cycle(0, 1), Ok(true));
    }

    #[test]
    fn arc_on_path_is_not_odd_cycle() {
        let mut d = PathCycleStore::new(3);
        d.insert(0, 1).unwrap();
        d.insert(1, 2).unwrap();
        assert_eq!(d.is_odd_cycle(0, 1), Ok(false));
        assert_eq!(d.is_odd_cycle(0, 2), Err(StoreError::ArcAbsent(0, 2)));
    }

    #[test]
    fn remove_splits_path_and_opens_cycle() {
        let mut d = PathCycleStore::new(3);
        d.insert(0, 1).unwrap();
        d.insert(1, 2).unwrap();
        d.remove(0, 1).unwrap();
        assert_eq!(d.snapshot().paths, vec![vec![0], vec![1, 2]]);

        let mut d = PathCycleStore::new(2);
        d.insert(0, 1).unwrap();
        d.insert(1, 0).unwrap();
        d.remove(0, 1).unwrap();
        assert_eq!(d.snapshot().paths, vec![vec![1, 0]]);
        d.check_invariants().unwrap();
    }

    #[test]
    fn precondition_errors() {
        let mut d = PathCycleStore::new(3);
        d.insert(0, 1).unwrap();
        assert_eq!(d.insert(0, 2), Err(StoreError::NotPathEnd(0, 2)));
        assert_eq!(d.insert(2, 1), Err(StoreError::NotPathStart(2, 1)));
        assert_eq!(d.remove(1, 2), Err(StoreError::ArcAbsent(1, 2)));
        assert_eq!(d.insert(0, 9), Err(StoreError::OutOfRange(9)));
    }

    #[test]
    fn speculate_then_rollback_restores() {
        let mut d = PathCycleStore::new(4);
        d.insert(0, 1).unwrap();
        d.insert(2, 3).unwrap();
        let before = d.snapshot();
        let (cp, _) = d.speculate(&[StoreOp::Insert(1, 2)]).unwrap();
        assert_ne!(d.snapshot(), before);
        d.rollback(cp).unwrap();
        assert_eq!(d.snapshot(), before);
    }

    #[test]
    fn double_rollback_is_an_error() {
        let mut d = PathCycleStore::new(2);
        let cp = d.checkpoint();
        let again = Checkpoint { serial: cp.serial };
        d.rollback(cp).unwrap();
        assert_eq!(d.rollback(again), Err(StoreError::StaleCheckpoint));
    }

    #[test]
    fn double_step_probe() {
        // current factor: w=2 -> v=1 ; probe insert(u=0, v=1) after removing (2, 1)
        let mut d = PathCycleStore::new(3);
        d.insert(2, 1).unwrap();
        d.insert(1, 0).unwrap();
        let before = d.snapshot();
        let (cp, outs) = d.speculate(&[StoreOp::Remove(2, 1), StoreOp::Insert(0, 1)]).unwrap();
        // 1 -> 0 -> 1 is an even cycle
        assert_eq!(outs[1], Some(InsertOutcome::ClosedCycle { len: 2 }));
        assert_eq!(d.is_odd_cycle(0, 1), Ok(false));
        d.rollback(cp).unwrap();
        assert_eq!(d.snapshot(), before);
    }

    #[test]
    fn failed_speculation_leaves_state_untouched() {
        let mut d = PathCycleStore::new(3);
        d.insert(0, 1).unwrap();
        let before = d.snapshot();
        assert!(d.speculate(&[StoreOp::Insert(1, 2), StoreOp::Remove(0, 2)]).is_err());
        assert_eq!(d.snapshot(), before);
    }

    #[test]
    fn random_speculate_rollback_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40u32;
        let mut d = PathCycleStore::new(n as usize);
        let mut naive = NaiveStore::new(n as usize);
        for _ in 0..10_000 {
            let before = d.snapshot();
            let cp = d.checkpoint();
            naive.checkpoint();
            for _ in 0..rng.gen_range(1..4) {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if rng.gen_bool(0.5) {
                    assert_eq!(d.insert(u, v), naive.insert(u, v));
                } else {
                    let v = d.successor(u).unwrap_or(v);
                    assert_eq!(d.remove(u, v), naive.remove(u, v));
                }
            }
            assert_eq!(d.snapshot(), naive.snapshot());
            if rng.gen_bool(0.7) {
                d.rollback(cp).unwrap();
                naive.rollback();
                assert_eq!(d.snapshot(), before);
            } else {
                naive.undo.pop();
                let _ = cp;
                d.marks.pop();
            }
        }
        d.check_invariants().unwrap();
    }
}
