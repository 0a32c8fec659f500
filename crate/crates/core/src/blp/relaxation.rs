//! LP relaxation of the joint program (variables in `[0, 1]`, per-triangle
//! inclusion rows, both cardinality rows).
//!
//! The inclusion rows alone describe an integral polytope whose vertices are
//! the closed selections, so the relaxation is solved by decomposition: a
//! three-row master over closure columns (convexity plus the two cardinality
//! rows), priced by [`min_cost_closure`]. Every pricing round yields the
//! Lagrangian bound `pi . c + min_closure(h - pi)`, which is a valid lower
//! bound even before convergence. [`direct_relaxation`] solves the same LP in
//! one piece with the tableau simplex and is used as an independent check.

use std::collections::HashSet;

use super::closure::{min_cost_closure, Closure};
use super::instance::BlpInstance;
use super::simplex::{self, LinearProgram, LpSolution, LpStatus, RowKind, SimplexOptions};
use super::Fixings;
use crate::complex::Selection;
use crate::error::{Error, Result};

const MAX_PRICING_ROUNDS: usize = 2_000;
const CONVERGENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Relaxation {
    /// Valid lower bound on every binary completion of the fixings.
    pub bound: f64,
    /// Objective of the final restricted master.
    pub master_objective: f64,
    pub converged: bool,
    /// Fractional optimum of the relaxation (convex combination of columns).
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
    pub rounds: usize,
    pub(crate) columns: Vec<Closure>,
}

struct Column {
    closure: Closure,
    cost: f64,
    n1: usize,
    n2: usize,
}

impl Column {
    fn new(inst: &BlpInstance, closure: Closure) -> Self {
        let n1 = closure.s1.iter().filter(|&&b| b).count();
        let n2 = closure.s2.iter().filter(|&&b| b).count();
        let cost = inst.objective(&Selection {
            s1: closure.s1.clone(),
            s2: closure.s2.clone(),
        });
        Self { closure, cost, n1, n2 }
    }
}

/// Lower bound from the LP relaxation under `fixed`, or `None` when no binary
/// completion is feasible.
pub fn lp_bound(inst: &BlpInstance, fixed: &Fixings) -> Result<Option<f64>> {
    inst.validate()?;
    check_fixings(inst, fixed)?;
    Ok(decomposed(inst, fixed, &[], f64::INFINITY).map(|r| r.bound))
}

fn check_fixings(inst: &BlpInstance, fixed: &Fixings) -> Result<()> {
    if fixed.edges.len() != inst.n_edges() || fixed.triangles.len() != inst.n_triangles() {
        return Err(Error::InvalidArgument("fixings do not match the instance size".into()));
    }
    Ok(())
}

/// Decomposition solve. Stops early once the bound reaches `cutoff`.
pub(crate) fn decomposed(
    inst: &BlpInstance,
    fix: &Fixings,
    seeds: &[&Selection],
    cutoff: f64,
) -> Option<Relaxation> {
    if !fix.is_consistent(&inst.triangle_edges) {
        return None;
    }
    let (max1, max2) = fix.maximal_closure(&inst.triangle_edges);
    let cap1 = max1.iter().filter(|&&b| b).count();
    let cap2 = max2.iter().filter(|&&b| b).count();
    if cap1 < inst.c1 || cap2 < inst.c2 {
        return None;
    }

    let mut seen: HashSet<(Vec<bool>, Vec<bool>)> = HashSet::new();
    let mut columns: Vec<Column> = Vec::new();
    let mut push = |closure: Closure, columns: &mut Vec<Column>| {
        if seen.insert((closure.s1.clone(), closure.s2.clone())) {
            columns.push(Column::new(inst, closure));
            true
        } else {
            false
        }
    };
    push(Closure { s1: max1, s2: max2, value: 0.0 }, &mut columns);
    for seed in seeds {
        if fix.honours(&seed.s1, &seed.s2) && inst.satisfies_linearized(seed) {
            push(
                Closure {
                    s1: seed.s1.clone(),
                    s2: seed.s2.clone(),
                    value: 0.0,
                },
                &mut columns,
            );
        }
    }

    let mut best_bound = f64::NEG_INFINITY;
    let mut rounds = 0;
    let mut converged = false;
    let mut w1 = vec![0.0; inst.n_edges()];
    let mut w2 = vec![0.0; inst.n_triangles()];
    let (weights, master_objective) = loop {
        rounds += 1;
        let master = solve_master(inst, &columns);
        if master.status != LpStatus::Optimal {
            // the maximal closure column keeps the master feasible and bounded
            debug_assert!(false, "restricted master not optimal: {:?}", master.status);
            break (master.x, f64::INFINITY);
        }
        let sigma = master.duals[0];
        let pi1 = master.duals[1].max(0.0);
        let pi2 = master.duals[2].max(0.0);
        for (w, h) in w1.iter_mut().zip(&inst.h1) {
            *w = h - pi1;
        }
        for (w, h) in w2.iter_mut().zip(&inst.h2) {
            *w = h - pi2;
        }
        let priced = min_cost_closure(&inst.triangle_edges, &w1, &w2, fix);
        let lagrangian = pi1 * inst.c1 as f64 + pi2 * inst.c2 as f64 + priced.value;
        best_bound = best_bound.max(lagrangian);

        let upper = master.objective;
        let tol = CONVERGENCE_TOL * upper.abs().max(1.0);
        if priced.value - sigma >= -tol || upper - best_bound <= tol {
            converged = true;
            break (master.x, upper);
        }
        if best_bound >= cutoff || rounds >= MAX_PRICING_ROUNDS {
            break (master.x, upper);
        }
        if !push(priced, &mut columns) {
            // pricing repeated a column: the reduced cost is numerical noise
            converged = true;
            break (master.x, upper);
        }
    };

    let mut s1 = vec![0.0; inst.n_edges()];
    let mut s2 = vec![0.0; inst.n_triangles()];
    for (col, &w) in columns.iter().zip(&weights) {
        if w <= 0.0 {
            continue;
        }
        for (acc, &b) in s1.iter_mut().zip(&col.closure.s1) {
            if b {
                *acc += w;
            }
        }
        for (acc, &b) in s2.iter_mut().zip(&col.closure.s2) {
            if b {
                *acc += w;
            }
        }
    }
    let bound = if converged {
        // the master optimum is the LP value; the Lagrangian estimate may
        // trail it by rounding
        best_bound.max(master_objective - CONVERGENCE_TOL * master_objective.abs().max(1.0))
    } else {
        best_bound
    };
    Some(Relaxation {
        bound,
        master_objective,
        converged,
        s1,
        s2,
        rounds,
        columns: columns.into_iter().map(|c| c.closure).collect(),
    })
}

fn solve_master(inst: &BlpInstance, columns: &[Column]) -> LpSolution {
    let mut lp = LinearProgram::default();
    for col in columns {
        lp.add_var(col.cost, 0.0, f64::INFINITY);
    }
    let k = columns.len();
    lp.add_row((0..k).map(|j| (j, 1.0)).collect(), RowKind::Eq, 1.0);
    lp.add_row(
        columns.iter().enumerate().map(|(j, c)| (j, c.n1 as f64)).collect(),
        RowKind::Ge,
        inst.c1 as f64,
    );
    lp.add_row(
        columns.iter().enumerate().map(|(j, c)| (j, c.n2 as f64)).collect(),
        RowKind::Ge,
        inst.c2 as f64,
    );
    simplex::solve(&lp, &SimplexOptions::default())
}

/// The relaxation as one LP: `n1 + n2` variables, `3 n2 + 2` rows. Fixed
/// variables are pinned through their bounds.
pub fn direct_relaxation(inst: &BlpInstance, fixed: &Fixings) -> Result<LpSolution> {
    inst.validate()?;
    check_fixings(inst, fixed)?;
    let mut lp = LinearProgram::default();
    let bounds = |f: Option<bool>| match f {
        Some(true) => (1.0, 1.0),
        Some(false) => (0.0, 0.0),
        None => (0.0, 1.0),
    };
    for (h, f) in inst.h1.iter().zip(&fixed.edges) {
        let (lo, hi) = bounds(*f);
        lp.add_var(*h, lo, hi);
    }
    let n1 = inst.n_edges();
    for (h, f) in inst.h2.iter().zip(&fixed.triangles) {
        let (lo, hi) = bounds(*f);
        lp.add_var(*h, lo, hi);
    }
    for (t, faces) in inst.triangle_edges.iter().enumerate() {
        for &e in faces {
            lp.add_row(vec![(n1 + t, 1.0), (e, -1.0)], RowKind::Le, 0.0);
        }
    }
    lp.add_row((0..n1).map(|e| (e, 1.0)).collect(), RowKind::Ge, inst.c1 as f64);
    lp.add_row(
        (0..inst.n_triangles()).map(|t| (n1 + t, 1.0)).collect(),
        RowKind::Ge,
        inst.c2 as f64,
    );
    Ok(simplex::solve(&lp, &SimplexOptions::default()))
}
