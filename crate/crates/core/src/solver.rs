//! Options, statistics and errors shared by both solvers.

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::digraph::{ArcId, Digraph, GraphError, NodeId};
use crate::evenfactor::{EvenFactor, LiftError, Violation};
use crate::seqstore::StoreError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub enum CheckLevel {
    /// No runtime assertions beyond what the data structures enforce.
    Off,
    /// Per-contraction and per-recovery checks, linear in the graph size.
    #[default]
    Cheap,
    /// Adds a full scan-invariant check before every arc fetch. Quadratic; small inputs only.
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Assertion {
    /// A scanned non-member arc points to an unreached second copy.
    ScanInvariant,
    /// The matching before an odd cycle appears does not fit that cycle.
    FitsBeforeContract,
    /// Adding one step created zero or several odd cycles.
    UniqueOddCycle,
    /// Lifting changed the deficiency.
    LiftDeficiency,
    /// The search stopped although an augmenting path exists.
    Completeness,
    /// A recovered forest path is no longer feasible.
    RecoveredForest,
    /// The recovery subgraph is too large or not odd-cycle symmetric.
    SparseSubgraph,
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Assertion::ScanInvariant => "scan invariant",
            Assertion::FitsBeforeContract => "fits before contract",
            Assertion::UniqueOddCycle => "unique odd cycle",
            Assertion::LiftDeficiency => "lift preserves deficiency",
            Assertion::Completeness => "search completeness",
            Assertion::RecoveredForest => "recovered forest feasibility",
            Assertion::SparseSubgraph => "sparse subgraph shape",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("assertion failed: {kind}: {detail}")]
    Assertion { kind: Assertion, detail: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Violation(#[from] Violation),
    #[error(transparent)]
    Store(#[from] StoreError),
}

impl SolveError {
    pub fn assertion(kind: Assertion, detail: impl Into<String>) -> Self {
        SolveError::Assertion {
            kind,
            detail: detail.into(),
        }
    }

    pub fn assertion_kind(&self) -> Option<Assertion> {
        match self {
            SolveError::Assertion { kind, .. } => Some(*kind),
            SolveError::Lift(LiftError::Deficiency { .. }) => Some(Assertion::LiftDeficiency),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Pap,
    Fast,
}

impl std::str::FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pap" => Ok(Algorithm::Pap),
            "fast" => Ok(Algorithm::Fast),
            _ => Err(format!("unknown algorithm `{s}` (expected pap or fast)")),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Pap => "pap",
            Algorithm::Fast => "fast",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    pub check: CheckLevel,
    pub trace: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent {
    Scan { arc: ArcId, tail: NodeId, head: NodeId },
    Extend { tail: NodeId, head: NodeId, mate: NodeId },
    Contract { nodes: Vec<NodeId>, complex: NodeId },
    Recover { complexes: Vec<NodeId>, unscanned: usize },
    Breakthrough { deficiency: usize },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Scan { arc, tail, head } => write!(f, "scan {arc} {tail}->{head}"),
            TraceEvent::Extend { tail, head, mate } => write!(f, "extend {tail}->{head} via {mate}"),
            TraceEvent::Contract { nodes, complex } => {
                write!(f, "contract")?;
                for v in nodes {
                    write!(f, " {v}")?;
                }
                write!(f, " into {complex}")
            }
            TraceEvent::Recover { complexes, unscanned } => {
                write!(f, "recover {} complex node(s), {unscanned} arc(s) unscanned", complexes.len())
            }
            TraceEvent::Breakthrough { deficiency } => write!(f, "breakthrough deficiency {deficiency}"),
        }
    }
}

/// Work done by one outermost augmentation call.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CallRecord {
    pub nodes: usize,
    pub arcs: usize,
    pub arc_scans: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub arc_scans: u64,
    pub contractions: u64,
    pub recoveries: u64,
    pub augmentations: u64,
    pub calls: Vec<CallRecord>,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub factor: EvenFactor,
    pub stats: SolveStats,
    pub trace: Vec<TraceEvent>,
    pub elapsed: Duration,
}

/// Mutable bookkeeping threaded through a solve.
#[derive(Debug, Default)]
pub(crate) struct Context {
    pub opts: SolveOptions,
    pub stats: SolveStats,
    pub trace: Vec<TraceEvent>,
}

impl Context {
    pub fn new(opts: SolveOptions) -> Self {
        Context {
            opts,
            ..Default::default()
        }
    }

    pub fn emit(&mut self, ev: impl FnOnce() -> TraceEvent) {
        if self.opts.trace {
            self.trace.push(ev());
        }
    }

    pub fn cheap(&self) -> bool {
        self.opts.check >= CheckLevel::Cheap
    }

    pub fn full(&self) -> bool {
        self.opts.check >= CheckLevel::Full
    }
}

/// Runs the chosen solver.
pub fn solve(g: &Digraph, algo: Algorithm, opts: SolveOptions) -> Result<Solution, SolveError> {
    match algo {
        Algorithm::Pap => crate::pap::solve_pap_with(g, opts),
        Algorithm::Fast => crate::fastaugment::solve_fast_with(g, opts),
    }
}
