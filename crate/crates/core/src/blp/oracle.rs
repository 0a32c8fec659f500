//! Exhaustive reference solver.
//!
//! With nonnegative costs some optimum selects exactly `c2` triangles, and its
//! edges are the faces of those triangles topped up with the cheapest other
//! edges until there are `c1`. Enumerating every `c2`-subset of triangles
//! therefore finds the optimum. Subsets are visited in lexicographic order and
//! only a strictly better objective replaces the current best; the fill takes
//! edges by ascending `(h1, index)`.

use std::time::Instant;

use super::bnb::{BlpSolution, SolveStatus};
use super::instance::BlpInstance;
use crate::complex::{CandidateComplex, Selection};
use crate::error::{check_len, Error, Result};
use crate::smoothness::CostVectors;

/// Maximum number of triangle subsets the oracle will visit.
pub const ORACLE_BUDGET: u128 = 1_000_000;

pub fn oracle_enumerate(
    cx: &CandidateComplex,
    costs: &CostVectors,
    c1: usize,
    c2: usize,
) -> Result<BlpSolution> {
    check_len("h1 length", cx.n_edges(), costs.h1.len())?;
    check_len("h2 length", cx.n_triangles(), costs.h2.len())?;
    let inst = BlpInstance {
        h1: costs.h1.clone(),
        h2: costs.h2.clone(),
        c1,
        c2,
        triangle_edges: cx.all_triangle_edges().to_vec(),
        alpha: super::default_alpha(cx.n0()),
    };
    oracle_enumerate_instance(&inst)
}

pub fn oracle_enumerate_instance(inst: &BlpInstance) -> Result<BlpSolution> {
    let started = Instant::now();
    inst.validate()?;
    if inst.is_trivially_infeasible() {
        return Ok(BlpSolution::infeasible(inst, started));
    }
    let n1 = inst.n_edges();
    let n2 = inst.n_triangles();
    let k = inst.c2;
    let combos = binomial_u128(n2 as u128, k as u128);
    if combos > ORACLE_BUDGET {
        return Err(Error::BudgetExceeded {
            combinations: combos,
            budget: ORACLE_BUDGET,
        });
    }

    let mut by_cost: Vec<usize> = (0..n1).collect();
    by_cost.sort_by(|&a, &b| inst.h1[a].total_cmp(&inst.h1[b]).then(a.cmp(&b)));

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut subset: Vec<usize> = (0..k).collect();
    let mut forced = vec![false; n1];
    let mut visited = 0usize;
    loop {
        visited += 1;
        forced.iter_mut().for_each(|f| *f = false);
        let mut objective = 0.0;
        let mut n_forced = 0;
        for &t in &subset {
            objective += inst.h2[t];
            for &e in &inst.triangle_edges[t] {
                if !forced[e] {
                    forced[e] = true;
                    n_forced += 1;
                    objective += inst.h1[e];
                }
            }
        }
        let mut missing = inst.c1.saturating_sub(n_forced);
        for &e in &by_cost {
            if missing == 0 {
                break;
            }
            if !forced[e] {
                objective += inst.h1[e];
                missing -= 1;
            }
        }
        if best.as_ref().is_none_or(|(b, _)| objective < *b) {
            best = Some((objective, subset.clone()));
        }
        if !next_combination(&mut subset, n2) {
            break;
        }
    }

    let (_, triangles) = best.expect("at least one subset is visited");
    let mut s1 = vec![false; n1];
    let mut s2 = vec![false; n2];
    for &t in &triangles {
        s2[t] = true;
        for &e in &inst.triangle_edges[t] {
            s1[e] = true;
        }
    }
    let mut missing = inst.c1.saturating_sub(s1.iter().filter(|&&b| b).count());
    for &e in &by_cost {
        if missing == 0 {
            break;
        }
        if !s1[e] {
            s1[e] = true;
            missing -= 1;
        }
    }
    let selection = Selection { s1, s2 };
    // recompute in one pass so the value matches `BlpInstance::objective`
    let objective = inst.objective(&selection);
    Ok(BlpSolution {
        selection,
        objective,
        lower_bound: objective,
        status: SolveStatus::Optimal,
        nodes_explored: visited,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

/// Advance to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
        if acc > u64::MAX as u128 {
            return acc;
        }
    }
    acc
}
