mod common;

use common::{all_selections, gaussian_costs, instance, rel_close, rng};
use jointsc::blp::{
    default_alpha, direct_relaxation, lp_bound, oracle_enumerate, oracle_enumerate_instance, read_instance, solve,
    write_instance, BlpInstance, Fixings, LpEngine, SolveOptions, SolveStatus, Var,
};
use jointsc::blp::simplex::LpStatus;
use jointsc::{CandidateComplex, CostVectors, TriangleMeasure};
use proptest::prelude::*;
use rand::Rng;

fn uniform_instance(n0: usize, c1: usize, c2: usize, seed: u64) -> BlpInstance {
    let cx = CandidateComplex::new(n0).unwrap();
    let mut r = rng(seed);
    BlpInstance {
        h1: (0..cx.n_edges()).map(|_| r.random::<f64>() * 3.0).collect(),
        h2: (0..cx.n_triangles()).map(|_| r.random::<f64>()).collect(),
        c1,
        c2,
        triangle_edges: cx.all_triangle_edges().to_vec(),
        alpha: default_alpha(n0),
    }
}

fn direct() -> SolveOptions {
    SolveOptions {
        engine: LpEngine::Direct,
        ..SolveOptions::default()
    }
}

#[test]
fn exhaustive_points_at_four_nodes() {
    let cx = CandidateComplex::new(4).unwrap();
    let costs = gaussian_costs(&cx, 2, TriangleMeasure::Curl, 3);
    for c1 in 0..=6 {
        for c2 in 0..=4 {
            let inst = instance(&cx, &costs, c1, c2);
            let mut best = f64::INFINITY;
            for sel in all_selections(&cx) {
                assert_eq!(inst.satisfies_aggregated(&sel), inst.satisfies_linearized(&sel));
                if inst.is_feasible(&sel) {
                    best = best.min(inst.objective(&sel));
                }
            }
            let sol = solve(&inst, &SolveOptions::default()).unwrap();
            if best.is_finite() {
                assert_eq!(sol.status, SolveStatus::Optimal);
                assert!(rel_close(sol.objective, best, 1e-12), "c1={c1} c2={c2}");
                assert!(inst.is_feasible(&sol.selection));
            } else {
                assert_eq!(sol.status, SolveStatus::Infeasible);
            }
        }
    }
}

#[test]
fn branching_instances_match_oracle() {
    // unstructured costs leave the relaxation fractional often enough that
    // the tree is actually explored
    let mut branched = 0;
    for seed in 0..60 {
        let mut r = rng(1000 + seed);
        let inst = uniform_instance(7, r.random_range(0..=21), r.random_range(1..=4), seed);
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        let oracle = oracle_enumerate_instance(&inst).unwrap();
        assert!(rel_close(sol.objective, oracle.objective, 1e-9), "seed {seed}");
        assert!(sol.lower_bound <= sol.objective);
        assert!(inst.is_feasible(&sol.selection));
        if sol.nodes_explored > 1 {
            branched += 1;
        }
    }
    assert!(branched > 0, "no instance needed branching");
}

#[test]
fn node_limit_keeps_feasible_incumbent() {
    let inst = (0..50)
        .map(|s| uniform_instance(7, 10, 4, 500 + s))
        .find(|inst| solve(inst, &SolveOptions::default()).unwrap().nodes_explored > 3)
        .expect("some instance branches");
    let opts = SolveOptions {
        node_limit: 1,
        ..SolveOptions::default()
    };
    let sol = solve(&inst, &opts).unwrap();
    assert_eq!(sol.status, SolveStatus::NodeLimit);
    assert!(inst.is_feasible(&sol.selection));
    assert!(sol.lower_bound <= sol.objective);
    let exact = solve(&inst, &SolveOptions::default()).unwrap();
    assert!(sol.lower_bound <= exact.objective + 1e-9);
    assert!(sol.objective >= exact.objective - 1e-9);
}

#[test]
fn warm_start_does_not_change_optimum() {
    let cx = CandidateComplex::new(6).unwrap();
    let costs = gaussian_costs(&cx, 3, TriangleMeasure::Similarity, 8);
    let inst = instance(&cx, &costs, 8, 3);
    let cold = solve(&inst, &SolveOptions::default()).unwrap();
    let warm = solve(
        &inst,
        &SolveOptions {
            warm_start: Some(jointsc::Selection::full(&cx)),
            ..SolveOptions::default()
        },
    )
    .unwrap();
    assert_eq!(cold.selection, warm.selection);
}

#[test]
fn infeasible_cardinalities_are_reported() {
    let inst = uniform_instance(5, 11, 0, 1);
    assert_eq!(solve(&inst, &SolveOptions::default()).unwrap().status, SolveStatus::Infeasible);
    let inst = uniform_instance(5, 0, 11, 1);
    assert_eq!(solve(&inst, &SolveOptions::default()).unwrap().status, SolveStatus::Infeasible);
}

#[test]
fn lp_bound_rejects_contradictory_fixings() {
    let inst = uniform_instance(4, 2, 1, 4);
    let mut fix = Fixings::for_instance(&inst);
    fix.set(Var::Triangle(0), true);
    fix.set(Var::Edge(inst.triangle_edges[0][1]), false);
    assert_eq!(lp_bound(&inst, &fix).unwrap(), None);
    let wrong = Fixings::free(1, 1);
    assert!(lp_bound(&inst, &wrong).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solve_matches_oracle(n0 in 4usize..=6, seed in any::<u64>(), c1_frac in 0.0f64..=1.0, c2 in 0usize..=3, sim in any::<bool>()) {
        let cx = CandidateComplex::new(n0).unwrap();
        let measure = if sim { TriangleMeasure::Similarity } else { TriangleMeasure::Curl };
        let costs = gaussian_costs(&cx, 2, measure, seed);
        let c1 = (c1_frac * cx.n_edges() as f64).round() as usize;
        let oracle = oracle_enumerate(&cx, &costs, c1, c2).unwrap();
        let inst = instance(&cx, &costs, c1, c2);
        for opts in [SolveOptions::default(), direct()] {
            let sol = solve(&inst, &opts).unwrap();
            prop_assert_eq!(sol.status, SolveStatus::Optimal);
            prop_assert!(rel_close(sol.objective, oracle.objective, 1e-9));
            prop_assert_eq!(&sol.selection, &oracle.selection);
        }
    }

    #[test]
    fn decomposed_bound_equals_direct_lp(seed in any::<u64>(), c1 in 0usize..=15, c2 in 0usize..=6, fixes in prop::collection::vec((any::<bool>(), 0usize..35, any::<bool>()), 0..5)) {
        let inst = uniform_instance(6, c1, c2, seed);
        let mut fix = Fixings::for_instance(&inst);
        for (is_tri, idx, value) in fixes {
            if is_tri {
                fix.set(Var::Triangle(idx % inst.n_triangles()), value);
            } else {
                fix.set(Var::Edge(idx % inst.n_edges()), value);
            }
        }
        let dw = lp_bound(&inst, &fix).unwrap();
        let lp = direct_relaxation(&inst, &fix).unwrap();
        match dw {
            Some(bound) => {
                prop_assert_eq!(lp.status, LpStatus::Optimal);
                prop_assert!(rel_close(bound, lp.objective, 1e-7), "{} vs {}", bound, lp.objective);
            }
            None => prop_assert_eq!(lp.status, LpStatus::Infeasible),
        }
    }

    #[test]
    fn objective_monotone_in_bounds(seed in any::<u64>(), c1 in 0usize..=14, c2 in 0usize..=5) {
        let a = solve(&uniform_instance(6, c1, c2, seed), &SolveOptions::default()).unwrap();
        let b = solve(&uniform_instance(6, c1, c2 + 1, seed), &SolveOptions::default()).unwrap();
        let c = solve(&uniform_instance(6, c1 + 1, c2, seed), &SolveOptions::default()).unwrap();
        prop_assert!(b.objective >= a.objective - 1e-12);
        prop_assert!(c.objective >= a.objective - 1e-12);
    }

    #[test]
    fn optimum_invariant_under_node_relabeling(seed in any::<u64>(), perm_seed in any::<u64>(), c1 in 3usize..=12, c2 in 1usize..=4) {
        use rand::seq::SliceRandom;
        let n0 = 6;
        let cx = CandidateComplex::new(n0).unwrap();
        let inst = uniform_instance(n0, c1, c2, seed);
        let mut perm: Vec<usize> = (0..n0).collect();
        perm.shuffle(&mut rng(perm_seed));
        let mut h1 = vec![0.0; cx.n_edges()];
        for (e, &[i, j]) in cx.edges().iter().enumerate() {
            h1[cx.edge_index(perm[i], perm[j]).unwrap()] = inst.h1[e];
        }
        let mut h2 = vec![0.0; cx.n_triangles()];
        for (t, &[i, j, k]) in cx.triangles().iter().enumerate() {
            h2[cx.triangle_index([perm[i], perm[j], perm[k]]).unwrap()] = inst.h2[t];
        }
        let costs = CostVectors::from_raw(h1, h2, TriangleMeasure::Curl).unwrap();
        let relabeled = instance(&cx, &costs, c1, c2);
        let a = solve(&inst, &SolveOptions::default()).unwrap();
        let b = solve(&relabeled, &SolveOptions::default()).unwrap();
        prop_assert!(rel_close(a.objective, b.objective, 1e-12));
        let mapped: Vec<usize> = a.selection.edge_indices().iter().map(|&e| {
            let [i, j] = cx.edges()[e];
            cx.edge_index(perm[i], perm[j]).unwrap()
        }).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        prop_assert_eq!(mapped, b.selection.edge_indices());
    }

    #[test]
    fn dump_round_trips(seed in any::<u64>(), n0 in 3usize..=7, c1 in 0usize..5, c2 in 0usize..3) {
        let inst = uniform_instance(n0, c1, c2, seed);
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        let back = read_instance(buf.as_slice()).unwrap();
        prop_assert_eq!(back, inst);
    }

    #[test]
    fn solve_is_deterministic(seed in any::<u64>()) {
        let inst = uniform_instance(6, 7, 3, seed);
        let a = solve(&inst, &SolveOptions::default()).unwrap();
        let b = solve(&inst, &SolveOptions::default()).unwrap();
        prop_assert_eq!(a.selection, b.selection);
        prop_assert_eq!(a.nodes_explored, b.nodes_explored);
    }
}
