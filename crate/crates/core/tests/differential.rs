use evenfactor_core::evenfactor::verify;
use evenfactor_core::testkit::{self, oracle_max_even_factor, FamilyTag, InstanceFamily};
use evenfactor_core::{solve, Algorithm, CheckLevel, Digraph, SolveOptions};

fn full() -> SolveOptions {
    SolveOptions {
        check: CheckLevel::Full,
        trace: false,
    }
}

fn dump(g: &Digraph) -> String {
    evenfactor_core::io::write_instance(g)
}

#[test]
fn small_mixed_against_oracle() {
    let mut r = testkit::rng(11);
    for i in 0..3000 {
        let g = testkit::small_mixed(9, 18, &mut r);
        let (best, _) = oracle_max_even_factor(&g).unwrap();
        for algo in [Algorithm::Pap, Algorithm::Fast] {
            let s = solve(&g, algo, full()).unwrap_or_else(|e| panic!("case {i} {algo}: {e}\n{}", dump(&g)));
            assert_eq!(s.factor.len(), best, "case {i} {algo}\n{}", dump(&g));
            verify(&g, s.factor.arcs()).unwrap();
        }
    }
}

#[test]
fn families_fast_matches_pap() {
    for tag in [FamilyTag::SymmetrizedUndirected, FamilyTag::MixedSymmetric, FamilyTag::BipartiteDigraph] {
        for seed in 0..60 {
            let n = 10 + (seed as usize % 30);
            let g = testkit::gen(&InstanceFamily::with_default_density(tag, n, seed));
            let p = solve(&g, Algorithm::Pap, SolveOptions::default()).unwrap();
            let f = solve(&g, Algorithm::Fast, SolveOptions::default())
                .unwrap_or_else(|e| panic!("{tag} seed {seed}: {e}\n{}", dump(&g)));
            assert_eq!(p.factor.len(), f.factor.len(), "{tag} seed {seed}\n{}", dump(&g));
        }
    }
}
