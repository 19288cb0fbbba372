use std::collections::HashSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;

use evenfactor_core::digraph::{validate_odd_cycle_symmetric, Symmetry};
use evenfactor_core::evenfactor::{lift_all, symmetric_difference, verify, AuxView, PathCycleMatching};
use evenfactor_core::seqstore::{NaiveStore, PathCycleStore};
use evenfactor_core::testkit;
use evenfactor_core::{solve, Algorithm, ArcId, CheckLevel, Digraph, NodeId, SolveOptions};

#[derive(Clone, Debug)]
enum Op {
    Insert(u32, u32),
    Remove(u32, u32),
    RemoveSucc(u32),
    Odd(u32),
    Checkpoint,
    Rollback,
}

fn op(n: u32) -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0..n, 0..n).prop_map(|(u, v)| Op::Insert(u, v)),
        1 => (0..n, 0..n).prop_map(|(u, v)| Op::Remove(u, v)),
        2 => (0..n).prop_map(Op::RemoveSucc),
        2 => (0..n).prop_map(Op::Odd),
        1 => Just(Op::Checkpoint),
        1 => Just(Op::Rollback),
    ]
}

fn small_graph() -> impl Strategy<Value = Digraph> {
    any::<u64>().prop_map(|s| testkit::small_mixed(9, 20, &mut testkit::rng(s)))
}

fn checked() -> SolveOptions {
    SolveOptions {
        check: CheckLevel::Full,
        trace: false,
    }
}

/// Greedy even factor over a shuffled arc order.
fn greedy_even(g: &Digraph, seed: u64) -> PathCycleMatching {
    let mut arcs: Vec<ArcId> = g.arcs().collect();
    arcs.shuffle(&mut testkit::rng(seed));
    let mut m = PathCycleMatching::empty(g);
    for a in arcs {
        if m.insert(g, a).is_ok() && !m.odd_cycles(g).is_empty() {
            m.remove(g, a);
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn store_agrees_with_naive_model(ops in prop::collection::vec(op(24), 1..400)) {
        let mut d = PathCycleStore::new(24);
        let mut naive = NaiveStore::new(24);
        let mut marks = Vec::new();
        for o in ops {
            match o {
                Op::Insert(u, v) => prop_assert_eq!(d.insert(u, v), naive.insert(u, v)),
                Op::Remove(u, v) => prop_assert_eq!(d.remove(u, v), naive.remove(u, v)),
                Op::RemoveSucc(u) => {
                    if let Some(v) = d.successor(u) {
                        prop_assert_eq!(d.remove(u, v), naive.remove(u, v));
                    }
                }
                Op::Odd(u) => {
                    let v = d.successor(u).unwrap_or(u);
                    prop_assert_eq!(d.is_odd_cycle(u, v), naive.is_odd_cycle(u, v));
                }
                Op::Checkpoint => {
                    marks.push(d.checkpoint());
                    naive.checkpoint();
                }
                Op::Rollback => {
                    if let Some(cp) = marks.pop() {
                        d.rollback(cp).unwrap();
                        naive.rollback();
                    }
                }
            }
            prop_assert_eq!(d.snapshot(), naive.snapshot());
        }
        prop_assert!(d.check_invariants().is_ok());
    }

    #[test]
    fn solutions_verify_and_agree(g in small_graph()) {
        let f = solve(&g, Algorithm::Fast, checked()).unwrap();
        let p = solve(&g, Algorithm::Pap, checked()).unwrap();
        prop_assert!(verify(&g, f.factor.arcs()).is_ok());
        prop_assert!(verify(&g, p.factor.arcs()).is_ok());
        prop_assert_eq!(f.factor.len(), p.factor.len());
        prop_assert_eq!(f.factor.deficiency(&g), g.node_count() - f.factor.len());
    }

    #[test]
    fn removing_member_arcs_is_an_involution(g in small_graph(), pick in any::<u64>()) {
        let f = solve(&g, Algorithm::Pap, SolveOptions::default()).unwrap().factor.into_matching();
        let mut sub = f.arcs();
        sub.shuffle(&mut testkit::rng(pick));
        sub.truncate(sub.len() / 2);
        let smaller = symmetric_difference(&g, &f, &sub).unwrap();
        prop_assert_eq!(smaller.len(), f.len() - sub.len());
        let back = symmetric_difference(&g, &smaller, &sub).unwrap();
        prop_assert_eq!(back.arcs(), f.arcs());
    }

    #[test]
    fn decomposition_covers_exactly_the_members(g in small_graph(), s in any::<u64>()) {
        let m = greedy_even(&g, s);
        let d = m.decompose(&g);
        let mut got = d.arcs();
        got.sort();
        let mut want = m.arcs();
        want.sort();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn aux_view_second_layer_has_out_degree_at_most_one(g in small_graph(), s in any::<u64>()) {
        let m = greedy_even(&g, s);
        let aux = AuxView::new(&g, &m);
        for v in g.nodes() {
            match aux.successor_of_second(v) {
                Some((a, w)) => {
                    prop_assert_eq!(m.in_arc(v), Some(a));
                    prop_assert_eq!(g.tail(a), w);
                    prop_assert!(!aux.is_sink(v));
                }
                None => prop_assert!(aux.is_sink(v)),
            }
            for (a, _) in aux.successors_of_first(v) {
                prop_assert!(m.out_arc(v) != Some(a));
            }
        }
    }

    #[test]
    fn validator_matches_walk_oracle(n in 1usize..7, mask in any::<u64>()) {
        let pairs = n * (n - 1);
        let mask = if pairs >= 64 { mask } else { mask & ((1u64 << pairs) - 1) };
        let g = testkit::digraph_from_mask(n, mask);
        let valid = validate_odd_cycle_symmetric(&g) == Symmetry::Valid;
        prop_assert_eq!(valid, !testkit::has_asymmetric_arc_on_odd_walk(&g));
    }

    #[test]
    fn contracting_a_triangle_keeps_simple_and_lifts(s in any::<u64>(), pick in any::<u64>()) {
        let mut r = testkit::rng(s);
        let n = 6;
        let edges = testkit::random_undirected(n, 0.6, &mut r);
        let g = testkit::symmetrize(n, &edges);
        let tri = (0..n as u32).flat_map(|a| (a + 1..n as u32).flat_map(move |b| (b + 1..n as u32).map(move |c| (a, b, c))))
            .find(|&(a, b, c)| {
                let e = |x: u32, y: u32| g.arc_between(NodeId(x), NodeId(y)).is_some();
                e(a, b) && e(b, c) && e(c, a)
            });
        prop_assume!(tri.is_some());
        let (a, b, c) = tri.unwrap();
        let nodes = [NodeId(a), NodeId(b), NodeId(c)];
        let arcs: Vec<ArcId> = (0..3).map(|i| g.arc_between(nodes[i], nodes[(i + 1) % 3]).unwrap()).collect();
        let mut h = g.clone();
        let z = h.contract(&nodes, &arcs).unwrap();
        prop_assert_eq!(h.node_count(), n - 2);
        let mut seen = HashSet::new();
        for x in h.arcs() {
            let (t, hd) = h.endpoints(x);
            prop_assert!(t != hd);
            prop_assert!(seen.insert((t, hd)), "parallel arcs at {:?}", (t, hd));
        }
        prop_assert!(h.is_alive_node(z));
        let upper = greedy_even(&h, pick);
        let lifted = lift_all(&g, &h, &upper).unwrap();
        prop_assert_eq!(lifted.deficiency(&g), upper.deficiency(&h));
    }
}
