//! Reference augment-and-contract solver.
//!
//! Each augmentation works on a fresh copy of the input: it searches the
//! auxiliary digraph breadth first, and whenever the augmenting path would
//! create an odd cycle it locates the shortest infeasible prefix by binary
//! search, contracts that cycle and searches again.

use std::collections::VecDeque;
use std::time::Instant;

use crate::digraph::Digraph;
use crate::evenfactor::{fits, lift_all, rebase, symmetric_difference, AltPath, AuxView, Cycle, EvenFactor, PathCycleMatching};
use crate::solver::{Assertion, CallRecord, Context, Solution, SolveError, SolveOptions, TraceEvent};

/// Shortest augmenting path in the auxiliary digraph, searching from all
/// sources in increasing node order. `scans` counts examined arcs.
pub fn find_augmenting_path(g: &Digraph, m: &PathCycleMatching, scans: &mut u64) -> Option<AltPath> {
    let aux = AuxView::new(g, m);
    let cap = g.node_capacity();
    // how each copy was reached: first copies by a member arc, second by a non-member arc
    let mut via1 = vec![None; cap];
    let mut via2 = vec![None; cap];
    let mut seen1 = vec![false; cap];
    let mut seen2 = vec![false; cap];
    let mut queue = VecDeque::new();
    for u in g.nodes() {
        if aux.is_source(u) {
            seen1[u.index()] = true;
            queue.push_back(u);
        }
    }
    while let Some(u) = queue.pop_front() {
        for (a, v) in aux.successors_of_first(u) {
            *scans += 1;
            if seen2[v.index()] {
                continue;
            }
            seen2[v.index()] = true;
            via2[v.index()] = Some(a);
            match aux.successor_of_second(v) {
                None => {
                    let mut arcs = vec![a];
                    let mut x = u;
                    while let Some(b) = via1[x.index()] {
                        let prev = via2[g.head(b).index()].expect("second copy reached before its mate");
                        arcs.push(b);
                        arcs.push(prev);
                        x = g.tail(prev);
                    }
                    arcs.reverse();
                    return Some(AltPath { arcs });
                }
                Some((b, w)) => {
                    if !seen1[w.index()] {
                        seen1[w.index()] = true;
                        via1[w.index()] = Some(b);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    None
}

fn is_even(g: &Digraph, m: &PathCycleMatching, path: &AltPath, i: usize) -> Result<bool, SolveError> {
    let mi = symmetric_difference(g, m, path.prefix(i))?;
    Ok(mi.odd_cycles(g).is_empty())
}

/// Largest `i` with `M △ A(P_i)` even and `M △ A(P_{i+1})` not, where `P_i`
/// is the first `2i` arcs. Requires `M` even and `M △ A(P)` not.
pub fn find_infeasible_prefix(g: &Digraph, m: &PathCycleMatching, path: &AltPath) -> Result<usize, SolveError> {
    let (mut lo, mut hi) = (0, path.len() / 2 + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if is_even(g, m, path, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug)]
pub enum AugmentOutcome {
    /// An even factor of the input with one more arc than before.
    Augmented(EvenFactor),
    Maximum,
}

/// One augmentation of the even factor `m` of `original`.
pub fn simple_augment(original: &Digraph, m: &PathCycleMatching) -> Result<AugmentOutcome, SolveError> {
    let mut ctx = Context::new(SolveOptions::default());
    simple_augment_in(original, m, &mut ctx)
}

pub(crate) fn simple_augment_in(
    original: &Digraph,
    m: &PathCycleMatching,
    ctx: &mut Context,
) -> Result<AugmentOutcome, SolveError> {
    let mut g = original.clone();
    let mut cur = m.clone();
    loop {
        let Some(path) = find_augmenting_path(&g, &cur, &mut ctx.stats.arc_scans) else {
            return Ok(AugmentOutcome::Maximum);
        };
        let whole = symmetric_difference(&g, &cur, &path.arcs)?;
        if whole.odd_cycles(&g).is_empty() {
            let lifted = lift_all(original, &g, &whole)?;
            ctx.emit(|| TraceEvent::Breakthrough {
                deficiency: lifted.deficiency(original),
            });
            return Ok(AugmentOutcome::Augmented(lifted));
        }
        let i = find_infeasible_prefix(&g, &cur, &path)?;
        let before = symmetric_difference(&g, &cur, path.prefix(i))?;
        let after = symmetric_difference(&g, &cur, path.prefix(i + 1))?;
        let mut odd = after.odd_cycles(&g);
        if odd.len() != 1 && ctx.cheap() {
            return Err(SolveError::assertion(
                Assertion::UniqueOddCycle,
                format!("step {i} created {} odd cycles", odd.len()),
            ));
        }
        let cycle: Cycle = odd.swap_remove(0);
        if ctx.cheap() && !fits(&g, &before, &cycle) {
            return Err(SolveError::assertion(
                Assertion::FitsBeforeContract,
                format!("cycle through {:?}", cycle.nodes),
            ));
        }
        let z = g.contract(&cycle.nodes, &cycle.arcs)?;
        ctx.stats.contractions += 1;
        ctx.emit(|| TraceEvent::Contract {
            nodes: cycle.nodes.clone(),
            complex: z,
        });
        cur = rebase(&g, &before, &g)?;
    }
}

/// Maximum even factor of `g`, which must be odd-cycle symmetric.
pub fn solve_pap(g: &Digraph) -> Result<Solution, SolveError> {
    solve_pap_with(g, SolveOptions::default())
}

pub fn solve_pap_with(g: &Digraph, opts: SolveOptions) -> Result<Solution, SolveError> {
    let start = Instant::now();
    let mut ctx = Context::new(opts);
    let mut f = EvenFactor::empty(g);
    loop {
        let scans_before = ctx.stats.arc_scans;
        let out = simple_augment_in(g, f.matching(), &mut ctx)?;
        ctx.stats.calls.push(CallRecord {
            nodes: g.node_count(),
            arcs: g.arc_count(),
            arc_scans: ctx.stats.arc_scans - scans_before,
        });
        match out {
            AugmentOutcome::Augmented(next) => {
                ctx.stats.augmentations += 1;
                f = next;
            }
            AugmentOutcome::Maximum => break,
        }
    }
    Ok(Solution {
        factor: f,
        stats: ctx.stats,
        trace: ctx.trace,
        elapsed: start.elapsed(),
    })
}
