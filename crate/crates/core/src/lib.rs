//! Maximum even factors in odd-cycle symmetric digraphs.
//!
//! Two solvers are provided: [`pap::solve_pap`], a direct augment-and-contract
//! reference, and [`fastaugment::solve_fast`], which recovers the alternating
//! forest after each contraction from a sparse subgraph instead of restarting
//! the search. Both return certificates that [`evenfactor::verify`] checks
//! independently.

pub mod cli;
pub mod digraph;
pub mod evenfactor;
pub mod fastaugment;
pub mod io;
pub mod pap;
pub mod seqstore;
pub mod solver;
pub mod testkit;

pub use digraph::{ArcId, Digraph, GraphError, NodeId};
pub use evenfactor::{EvenFactor, PathCycleMatching, Violation};
pub use fastaugment::solve_fast;
pub use pap::solve_pap;
pub use solver::{solve, Algorithm, CheckLevel, Solution, SolveError, SolveOptions};
