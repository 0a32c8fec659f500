//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{all_selections, gaussian, gaussian_costs, rel_close, rng};
use jointsc::blp::{build_joint_instance, default_alpha, oracle_enumerate, solve, SolveOptions, SolveStatus};
use jointsc::datagen::EdgePrior;
use jointsc::harness::{run_experiment, EvalReport, ExperimentConfig};
use jointsc::learners::{learn_hierarchical, learn_joint, Method};
use jointsc::smoothness::{
    h1_node_smoothness, h2_curl, h2_similarity, quadratic_form, similarity_edges_from_nodes,
};
use jointsc::{CandidateComplex, CostVectors, Selection, TriangleMeasure};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Oracle equivalence on 50 instances per triangle measure at n0 = 6.
fn criterion_1() -> Outcome {
    let cx = CandidateComplex::new(6).unwrap();
    let (mut agree, mut total, mut slowest) = (0, 0, 0.0f64);
    let mut failures = Vec::new();
    for seed in 0..50u64 {
        for measure in [TriangleMeasure::Curl, TriangleMeasure::Similarity] {
            total += 1;
            let costs = gaussian_costs(&cx, 4, measure, 7_000 + seed);
            let inst = build_joint_instance(&cx, &costs, 6, 2, default_alpha(6)).unwrap();
            let started = Instant::now();
            let sol = solve(&inst, &SolveOptions::default()).unwrap();
            let elapsed = started.elapsed().as_secs_f64();
            slowest = slowest.max(elapsed);
            let oracle = oracle_enumerate(&cx, &costs, 6, 2).unwrap();
            if sol.status == SolveStatus::Optimal
                && rel_close(sol.objective, oracle.objective, 1e-9)
                && sol.selection == oracle.selection
                && elapsed < 1.0
            {
                agree += 1;
            } else {
                failures.push(format!("seed {seed} {}", measure.as_str()));
            }
        }
    }
    outcome(
        agree == total,
        format!("{agree}/{total} instances match the oracle, slowest solve {slowest:.3}s {failures:?}"),
    )
}

/// Aggregated and linearized inclusion agree on every binary point at n0 = 4.
fn criterion_2() -> Outcome {
    let cx = CandidateComplex::new(4).unwrap();
    let costs = gaussian_costs(&cx, 1, TriangleMeasure::Curl, 2);
    let inst = build_joint_instance(&cx, &costs, 0, 0, default_alpha(4)).unwrap();
    let (mut points, mut agree, mut feasible) = (0, 0, 0);
    for sel in all_selections(&cx) {
        points += 1;
        let lin = inst.satisfies_linearized(&sel);
        if inst.satisfies_aggregated(&sel) == lin {
            agree += 1;
        }
        feasible += lin as usize;
    }
    outcome(
        points == 1 << 10 && agree == points,
        format!("{agree}/{points} points classified identically ({feasible} feasible)"),
    )
}

/// Cost vectors equal the Laplacian quadratic forms.
fn criterion_3() -> Outcome {
    let mut r = rng(33);
    let mut worst = 0.0f64;
    let mut ok = 0;
    for _ in 0..100 {
        let n0 = r.random_range(5..=10);
        let f = r.random_range(1..=5);
        let cx = CandidateComplex::new(n0).unwrap();
        let x0 = gaussian(n0, f, &mut r);
        let x1 = gaussian(cx.n_edges(), f, &mut r);
        let sel = Selection {
            s1: (0..cx.n_edges()).map(|_| r.random_bool(0.5)).collect(),
            s2: (0..cx.n_triangles()).map(|_| r.random_bool(0.5)).collect(),
        };
        let dot = |h: &[f64], s: &[bool]| h.iter().zip(s).filter(|p| *p.1).map(|p| p.0).sum::<f64>();
        let pairs = [
            (
                quadratic_form(&cx.laplacian_node(&sel.s1).unwrap(), &x0).unwrap(),
                dot(&h1_node_smoothness(&cx, &x0).unwrap(), &sel.s1),
            ),
            (
                quadratic_form(&cx.laplacian_upper_edge(&sel.s2).unwrap(), &x1).unwrap(),
                dot(&h2_curl(&cx, &x1).unwrap(), &sel.s2),
            ),
            (
                quadratic_form(&cx.similarity_laplacian(&sel.s2).unwrap(), &x1).unwrap(),
                dot(&h2_similarity(&cx, &x1).unwrap(), &sel.s2),
            ),
        ];
        let mut all = true;
        for (q, h) in pairs {
            let rel = (q - h).abs() / q.abs().max(h.abs()).max(1.0);
            worst = worst.max(rel);
            all &= rel <= 1e-9;
        }
        ok += all as usize;
    }
    outcome(ok == 100, format!("{ok}/100 checks, worst relative error {worst:.2e}"))
}

/// Boundary structure for n0 in 3..=12 and inclusion of every exact or
/// hierarchical output in the trend runs.
fn criterion_4(runs: &EvalReport) -> Outcome {
    let mut structural = true;
    for n0 in 3..=12 {
        let cx = CandidateComplex::new(n0).unwrap();
        structural &= cx.b1().product(cx.b2()).unwrap().iter().all(|&v| v == 0);
        structural &= (0..cx.n_edges()).all(|e| cx.b1().column(e).len() == 2);
        structural &= (0..cx.n_triangles()).all(|t| cx.b2().column(t).len() == 3);
    }
    let mut checked = 0;
    let mut violating = 0;
    for r in runs.records.iter().filter(|r| r.method != Method::Greedy) {
        let cx = CandidateComplex::new(r.n0).unwrap();
        let sel = r.estimate.to_selection(&cx).unwrap();
        checked += 1;
        if !cx.validate_inclusion(&sel).unwrap().is_empty() {
            violating += 1;
        }
    }
    outcome(
        structural && violating == 0,
        format!(
            "b1 b2 = 0 and column counts for n0 3..12: {structural}; {checked} joint/hierarchical outputs, {violating} with violations"
        ),
    )
}

fn trend_runs() -> EvalReport {
    let cfg = ExperimentConfig {
        n0: vec![10, 15, 20],
        seeds: (0..10).collect(),
        priors: vec![EdgePrior::LowCurl, EdgePrior::Similarity],
        ..ExperimentConfig::default()
    };
    run_experiment(&cfg).expect("trend experiment runs")
}

/// Joint beats hierarchical on mean F1 in every (n0, prior) cell.
fn criterion_5(runs: &EvalReport) -> Outcome {
    let mut pass = true;
    let mut cells = Vec::new();
    for n0 in [10, 15, 20] {
        for prior in [EdgePrior::LowCurl, EdgePrior::Similarity] {
            let measure = prior.matched_measure();
            let j = runs.aggregate_for(Method::Joint, measure, n0, prior.as_str()).unwrap();
            let h = runs.aggregate_for(Method::Hierarchical, measure, n0, prior.as_str()).unwrap();
            let (je, jt) = (j.metric("f1_edges").unwrap().mean, j.metric("f1_triangles").unwrap().mean);
            let (he, ht) = (h.metric("f1_edges").unwrap().mean, h.metric("f1_triangles").unwrap().mean);
            let ok = je >= he && jt >= ht && j.realizations == 10;
            pass &= ok;
            cells.push(format!(
                "n0={n0} {}: edges {je:.3} vs {he:.3}, triangles {jt:.3} vs {ht:.3}{}",
                prior.as_str(),
                if ok { "" } else { " FAIL" }
            ));
        }
    }
    let slowest = runs
        .records
        .iter()
        .filter(|r| r.method == Method::Joint)
        .map(|r| r.wall_time)
        .fold(0.0, f64::max);
    let limited = runs.records.iter().any(|r| r.solver_limit);
    pass &= slowest < 60.0 && !limited;
    outcome(
        pass,
        format!("joint vs hierarchical mean F1 [{}]; slowest joint solve {slowest:.2}s", cells.join("; ")),
    )
}

/// Greedy with default gamma equals hierarchical wherever c2 feasible
/// triangles exist.
fn criterion_6(runs: &EvalReport) -> Outcome {
    let (mut eligible, mut identical) = (0, 0);
    for h in runs.records.iter().filter(|r| r.method == Method::Hierarchical) {
        if h.relaxed_cardinality {
            continue;
        }
        eligible += 1;
        let g = runs
            .records
            .iter()
            .find(|g| {
                g.method == Method::Greedy
                    && g.n0 == h.n0
                    && g.prior == h.prior
                    && g.measure == h.measure
                    && g.realization == h.realization
            })
            .expect("greedy record for every realization");
        if g.estimate == h.estimate {
            identical += 1;
        }
    }
    outcome(
        eligible > 0 && identical == eligible,
        format!("{identical}/{eligible} eligible realizations identical"),
    )
}

/// The pairwise similarity form on edges equals the node smoothness costs.
fn criterion_7() -> Outcome {
    let mut r = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n0 = r.random_range(3..=12);
        let cx = CandidateComplex::new(n0).unwrap();
        let x0 = gaussian(n0, r.random_range(1..=6), &mut r);
        let a = similarity_edges_from_nodes(&cx, &x0).unwrap();
        let b = h1_node_smoothness(&cx, &x0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max entrywise difference {worst:.2e} over 50 instances"))
}

/// Hierarchical relaxes when stage one admits too few triangles; joint meets
/// the bound and matches the oracle.
fn criterion_8() -> Outcome {
    let n0 = 6;
    let cx = CandidateComplex::new(n0).unwrap();
    let mut r = rng(8);
    // cheap edges: triangle (0,1,2) plus the star 0-3, 0-4, 0-5
    let cheap = [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (0, 5)];
    let mut h1: Vec<f64> = (0..cx.n_edges()).map(|_| 2.0 + r.random::<f64>()).collect();
    for &(i, j) in &cheap {
        h1[cx.edge_index(i, j).unwrap()] = 0.1 * r.random::<f64>();
    }
    let h2: Vec<f64> = (0..cx.n_triangles()).map(|_| r.random::<f64>()).collect();
    let costs = CostVectors::from_raw(h1, h2, TriangleMeasure::Curl).unwrap();
    let (c1, c2) = (6, 2);

    let h = learn_hierarchical(&cx, &costs, c1, c2).unwrap();
    let feasible = jointsc::learners::feasible_triangles(&cx, &h.selection.s1).unwrap();
    let hier_ok = feasible.len() < c2 && h.relaxed_cardinality() && h.selection.triangle_indices() == feasible;

    let j = learn_joint(&cx, &costs, c1, c2, default_alpha(n0), &SolveOptions::default()).unwrap();
    let oracle = oracle_enumerate(&cx, &costs, c1, c2).unwrap();
    let joint_ok = cx.validate_inclusion(&j.selection).unwrap().is_empty()
        && j.selection.n_edges() >= c1
        && j.selection.n_triangles() >= c2
        && j.selection == oracle.selection
        && rel_close(j.objective, oracle.objective, 1e-9);
    outcome(
        hier_ok && joint_ok,
        format!(
            "hierarchical: {} feasible triangle(s), selected {:?}, relaxed {}; joint: {} triangles, objective {:.4} (oracle {:.4})",
            feasible.len(),
            h.selection.triangle_indices(),
            h.relaxed_cardinality(),
            j.selection.n_triangles(),
            j.objective,
            oracle.objective
        ),
    )
}

/// Repeated runs of the same config write byte-identical results.csv.
fn criterion_9() -> Outcome {
    let cfg = ExperimentConfig {
        n0: vec![8, 10],
        seeds: (0..4).collect(),
        priors: vec![EdgePrior::LowCurl, EdgePrior::Similarity],
        ..ExperimentConfig::default()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_experiment(&cfg).unwrap().write(a.path()).unwrap();
    run_experiment(&cfg).unwrap().write(b.path()).unwrap();
    let ca = std::fs::read(a.path().join("results.csv")).unwrap();
    let cb = std::fs::read(b.path().join("results.csv")).unwrap();
    outcome(ca == cb && !ca.is_empty(), format!("results.csv {} bytes, identical: {}", ca.len(), ca == cb))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let runs = trend_runs();
    let results = [
        ("1 oracle equivalence", criterion_1()),
        ("2 exhaustive feasibility equivalence", criterion_2()),
        ("3 linear/quadratic form equivalence", criterion_3()),
        ("4 structural invariants", criterion_4(&runs)),
        ("5 trend reproduction", criterion_5(&runs)),
        ("6 baseline equivalence", criterion_6(&runs)),
        ("7 similarity-measure reduction", criterion_7()),
        ("8 hierarchical relaxation path", criterion_8()),
        ("9 determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} [{name}] {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
