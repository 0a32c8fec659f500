//! Topology learners: the exact joint program and the two sequential
//! baselines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blp::{self, build_joint_instance, SolveOptions, SolveStatus};
use crate::complex::{CandidateComplex, Selection};
use crate::error::{check_len, Error, Result};
use crate::smoothness::CostVectors;

pub const DEFAULT_GREEDY_MAX_ITER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Joint,
    Hierarchical,
    Greedy,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Joint => "joint",
            Method::Hierarchical => "hierarchical",
            Method::Greedy => "greedy",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "joint" => Ok(Method::Joint),
            "hierarchical" => Ok(Method::Hierarchical),
            "greedy" => Ok(Method::Greedy),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LearnerOutput {
    pub selection: Selection,
    /// `h1 . s1 + h2 . s2`.
    pub objective: f64,
    pub method: Method,
    /// Set when the exact solver stopped at its node limit; `selection` is
    /// then the best incumbent found.
    pub solver_limit: bool,
    pub diagnostics: BTreeMap<String, Value>,
}

impl LearnerOutput {
    fn new(method: Method, costs: &CostVectors, selection: Selection) -> Self {
        Self {
            objective: costs.objective(&selection.s1, &selection.s2),
            selection,
            method,
            solver_limit: false,
            diagnostics: BTreeMap::new(),
        }
    }

    /// `true` when hierarchical had to select fewer than `c2` triangles.
    pub fn relaxed_cardinality(&self) -> bool {
        self.diagnostics
            .get("relaxed_cardinality")
            .and_then(Value::as_bool)
            .unwrap_or(false)
    }
}

fn check_inputs(cx: &CandidateComplex, costs: &CostVectors, c1: usize, c2: usize) -> Result<()> {
    check_len("h1 length", cx.n_edges(), costs.h1.len())?;
    check_len("h2 length", cx.n_triangles(), costs.h2.len())?;
    if c1 > cx.n_edges() {
        return Err(Error::InvalidArgument(format!(
            "c1 = {c1} exceeds the {} candidate edges",
            cx.n_edges()
        )));
    }
    if c2 > cx.n_triangles() {
        return Err(Error::InvalidArgument(format!(
            "c2 = {c2} exceeds the {} candidate triangles",
            cx.n_triangles()
        )));
    }
    Ok(())
}

/// Indices of the `k` smallest entries of `values`, ties by index, returned
/// in ascending index order.
fn k_smallest(values: &[f64], candidates: impl Iterator<Item = usize>, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = candidates.collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    order
}

/// Triangles whose three faces are all selected in `s1`.
pub fn feasible_triangles(cx: &CandidateComplex, s1: &[bool]) -> Result<Vec<usize>> {
    check_len("s1 length", cx.n_edges(), s1.len())?;
    Ok(cx
        .all_triangle_edges()
        .iter()
        .enumerate()
        .filter(|(_, faces)| faces.iter().all(|&e| s1[e]))
        .map(|(t, _)| t)
        .collect())
}

/// Edges first, then triangles among those the chosen edges admit.
pub fn learn_hierarchical(cx: &CandidateComplex, costs: &CostVectors, c1: usize, c2: usize) -> Result<LearnerOutput> {
    check_inputs(cx, costs, c1, c2)?;
    let mut sel = Selection::empty(cx);
    for e in k_smallest(&costs.h1, 0..cx.n_edges(), c1) {
        sel.s1[e] = true;
    }
    let feasible = feasible_triangles(cx, &sel.s1)?;
    let relaxed = feasible.len() < c2;
    for t in k_smallest(&costs.h2, feasible.iter().copied(), c2) {
        sel.s2[t] = true;
    }
    let mut out = LearnerOutput::new(Method::Hierarchical, costs, sel);
    out.diagnostics.insert("feasible_triangles".into(), json!(feasible.len()));
    out.diagnostics.insert("relaxed_cardinality".into(), json!(relaxed));
    Ok(out)
}

/// Exact optimum of the joint program. The hierarchical solution is used as
/// the starting incumbent unless `opts` already carries one.
pub fn learn_joint(
    cx: &CandidateComplex,
    costs: &CostVectors,
    c1: usize,
    c2: usize,
    alpha: f64,
    opts: &SolveOptions,
) -> Result<LearnerOutput> {
    check_inputs(cx, costs, c1, c2)?;
    let inst = build_joint_instance(cx, costs, c1, c2, alpha)?;
    let mut opts = opts.clone();
    if opts.warm_start.is_none() {
        opts.warm_start = Some(learn_hierarchical(cx, costs, c1, c2)?.selection);
    }
    let sol = blp::solve(&inst, &opts)?;
    if sol.status == SolveStatus::Infeasible {
        return Err(Error::InvalidArgument(format!(
            "no selection meets c1 = {c1} and c2 = {c2}"
        )));
    }
    let mut out = LearnerOutput::new(Method::Joint, costs, sol.selection);
    out.solver_limit = sol.status == SolveStatus::NodeLimit;
    let d = &mut out.diagnostics;
    d.insert("status".into(), json!(sol.status));
    d.insert("nodes".into(), json!(sol.nodes_explored));
    d.insert("lower_bound".into(), json!(sol.lower_bound));
    d.insert("solve_seconds".into(), json!(sol.wall_time));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreedyInit {
    /// `s2 = 0`; the first half-step chooses edges.
    #[default]
    EdgesFirst,
    /// `s1 = 1`; the first half-step chooses triangles.
    AllOnes,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GreedyOptions {
    /// Inclusion penalty; `None` means `10 (1 + max h2)`.
    pub gamma: Option<f64>,
    pub max_iter: usize,
    pub init: GreedyInit,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self {
            gamma: None,
            max_iter: DEFAULT_GREEDY_MAX_ITER,
            init: GreedyInit::EdgesFirst,
        }
    }
}

pub fn default_gamma(costs: &CostVectors) -> f64 {
    10.0 * (1.0 + costs.h2.iter().copied().fold(0.0, f64::max))
}

/// Number of (selected triangle, missing face) pairs.
pub fn inclusion_violations(cx: &CandidateComplex, sel: &Selection) -> usize {
    cx.all_triangle_edges()
        .iter()
        .zip(&sel.s2)
        .filter(|(_, &on)| on)
        .map(|(faces, _)| faces.iter().filter(|&&e| !sel.s1[e]).count())
        .sum()
}

/// `|s1| + |s2| + h1.s1 + h2.s2 + gamma * (1 - s1)^T |B2| s2`.
pub fn greedy_penalized_objective(cx: &CandidateComplex, costs: &CostVectors, gamma: f64, sel: &Selection) -> f64 {
    (sel.n_edges() + sel.n_triangles()) as f64
        + costs.objective(&sel.s1, &sel.s2)
        + gamma * inclusion_violations(cx, sel) as f64
}

fn greedy_triangle_step(cx: &CandidateComplex, costs: &CostVectors, gamma: f64, s1: &[bool], c2: usize) -> Vec<bool> {
    let score: Vec<f64> = cx
        .all_triangle_edges()
        .iter()
        .zip(&costs.h2)
        .map(|(faces, h)| {
            let missing = faces.iter().filter(|&&e| !s1[e]).count();
            // gamma = 0 must not turn 0 * inf into NaN
            if missing == 0 {
                *h
            } else {
                h + gamma * missing as f64
            }
        })
        .collect();
    let mut s2 = vec![false; cx.n_triangles()];
    for t in k_smallest(&score, 0..cx.n_triangles(), c2) {
        s2[t] = true;
    }
    s2
}

fn greedy_edge_step(cx: &CandidateComplex, costs: &CostVectors, gamma: f64, s2: &[bool], c1: usize) -> Vec<bool> {
    let mut coverage = vec![0usize; cx.n_edges()];
    for (faces, _) in cx.all_triangle_edges().iter().zip(s2).filter(|(_, &on)| on) {
        for &e in faces {
            coverage[e] += 1;
        }
    }
    let score: Vec<f64> = costs
        .h1
        .iter()
        .zip(&coverage)
        .map(|(h, &c)| if c == 0 { 1.0 + h } else { 1.0 + h - gamma * c as f64 })
        .collect();
    let mut s1: Vec<bool> = score.iter().map(|&v| v < 0.0).collect();
    let have = s1.iter().filter(|&&b| b).count();
    if have < c1 {
        let rest = (0..cx.n_edges()).filter(|&e| !s1[e]).collect::<Vec<_>>();
        for e in k_smallest(&score, rest.into_iter(), c1 - have) {
            s1[e] = true;
        }
    }
    s1
}

/// Alternating exact minimization of the penalized objective.
pub fn learn_greedy(
    cx: &CandidateComplex,
    costs: &CostVectors,
    c1: usize,
    c2: usize,
    opts: &GreedyOptions,
) -> Result<LearnerOutput> {
    check_inputs(cx, costs, c1, c2)?;
    let gamma = opts.gamma.unwrap_or_else(|| default_gamma(costs));
    if !gamma.is_finite() || gamma < 0.0 {
        return Err(Error::InvalidArgument(format!("gamma must be finite and nonnegative, got {gamma}")));
    }
    if opts.max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }

    let mut sel = match opts.init {
        GreedyInit::EdgesFirst => {
            let s2 = vec![false; cx.n_triangles()];
            Selection {
                s1: greedy_edge_step(cx, costs, gamma, &s2, c1),
                s2,
            }
        }
        GreedyInit::AllOnes => Selection {
            s1: vec![true; cx.n_edges()],
            s2: vec![false; cx.n_triangles()],
        },
    };
    // the starting point has no triangles and may miss c2, so the trace
    // begins at the first triangle step
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;
        let s2 = greedy_triangle_step(cx, costs, gamma, &sel.s1, c2);
        let half = Selection { s1: sel.s1.clone(), s2 };
        trace.push(greedy_penalized_objective(cx, costs, gamma, &half));
        let s1 = greedy_edge_step(cx, costs, gamma, &half.s2, c1);
        let next = Selection { s1, s2: half.s2 };
        trace.push(greedy_penalized_objective(cx, costs, gamma, &next));
        let repeated = next == sel;
        sel = next;
        if repeated {
            converged = true;
            break;
        }
    }

    let violations = inclusion_violations(cx, &sel);
    let mut out = LearnerOutput::new(Method::Greedy, costs, sel);
    let d = &mut out.diagnostics;
    d.insert("gamma".into(), json!(gamma));
    d.insert("init".into(), json!(opts.init));
    d.insert("iterations".into(), json!(iterations));
    d.insert("converged".into(), json!(converged));
    d.insert("inclusion_violations".into(), json!(violations));
    d.insert("penalized_trace".into(), json!(trace));
    Ok(out)
}
