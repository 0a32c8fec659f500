use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::instance::BlpInstance;
use super::relaxation::{decomposed, direct_relaxation, Relaxation};
use super::simplex::LpStatus;
use super::{Fixings, Var};
use crate::complex::Selection;
use crate::error::Result;

const INTEGRALITY_TOL: f64 = 1e-6;
const FRACTION_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpEngine {
    /// Column generation over closed selections (default).
    #[default]
    Decomposition,
    /// One dense simplex solve per node; practical only for small `n0`.
    Direct,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub node_limit: usize,
    /// Relative optimality gap.
    pub tolerance: f64,
    pub engine: LpEngine,
    /// Feasible starting incumbent, typically the hierarchical solution.
    #[serde(skip)]
    pub warm_start: Option<Selection>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            node_limit: 10_000_000,
            tolerance: 1e-6,
            engine: LpEngine::Decomposition,
            warm_start: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    NodeLimit,
}

#[derive(Debug, Clone)]
pub struct BlpSolution {
    pub selection: Selection,
    pub objective: f64,
    pub lower_bound: f64,
    pub status: SolveStatus,
    pub nodes_explored: usize,
    pub wall_time: f64,
}

impl BlpSolution {
    pub(crate) fn infeasible(inst: &BlpInstance, started: Instant) -> Self {
        Self {
            selection: Selection {
                s1: vec![false; inst.n_edges()],
                s2: vec![false; inst.n_triangles()],
            },
            objective: f64::INFINITY,
            lower_bound: f64::INFINITY,
            status: SolveStatus::Infeasible,
            nodes_explored: 0,
            wall_time: started.elapsed().as_secs_f64(),
        }
    }

    pub fn gap(&self) -> f64 {
        self.objective - self.lower_bound
    }
}

struct Node {
    bound: f64,
    id: u64,
    fixes: Vec<(Var, bool)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap: the smallest bound (then the oldest node) comes out first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Incumbent {
    selection: Selection,
    objective: f64,
}

impl Incumbent {
    fn offer(&mut self, inst: &BlpInstance, s1: &[bool], s2: &[bool]) {
        let candidate = Selection {
            s1: s1.to_vec(),
            s2: s2.to_vec(),
        };
        if !inst.is_feasible(&candidate) {
            return;
        }
        let objective = inst.objective(&candidate);
        // equal objectives (e.g. zero costs) favour the sparser selection
        let size = |s: &Selection| s.n_edges() + s.n_triangles();
        if objective < self.objective || (objective == self.objective && size(&candidate) < size(&self.selection)) {
            self.selection = candidate;
            self.objective = objective;
        }
    }
}

/// Best-first branch-and-bound over the LP relaxation.
///
/// Branching takes the most fractional variable; equally fractional triangles
/// go before edges and lower indices before higher. Open nodes are expanded
/// in order of parent bound, oldest first on ties, so runs are deterministic.
pub fn solve(inst: &BlpInstance, opts: &SolveOptions) -> Result<BlpSolution> {
    let started = Instant::now();
    inst.validate()?;
    if inst.is_trivially_infeasible() {
        return Ok(BlpSolution::infeasible(inst, started));
    }

    let full = Selection {
        s1: vec![true; inst.n_edges()],
        s2: vec![true; inst.n_triangles()],
    };
    let mut incumbent = Incumbent {
        objective: inst.objective(&full),
        selection: full,
    };
    if let Some(ws) = &opts.warm_start {
        if ws.s1.len() == inst.n_edges() && ws.s2.len() == inst.n_triangles() {
            incumbent.offer(inst, &ws.s1, &ws.s2);
        }
    }

    let gap = |obj: f64| opts.tolerance * obj.abs().max(1.0);
    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        fixes: Vec::new(),
    });
    let mut next_id = 1u64;
    let mut explored = 0usize;
    let mut closed_bound = f64::INFINITY;
    let mut status = SolveStatus::Optimal;

    while let Some(node) = heap.pop() {
        if node.bound >= incumbent.objective - gap(incumbent.objective) {
            // every remaining node is at least this bound
            closed_bound = closed_bound.min(node.bound);
            heap.clear();
            break;
        }
        if explored >= opts.node_limit {
            closed_bound = closed_bound.min(node.bound);
            heap.push(node);
            status = SolveStatus::NodeLimit;
            break;
        }
        explored += 1;

        let mut fix = Fixings::for_instance(inst);
        for &(var, value) in &node.fixes {
            fix.set(var, value);
        }
        let cutoff = incumbent.objective - gap(incumbent.objective);
        let Some(relax) = relax_node(inst, &fix, &incumbent.selection, cutoff, opts.engine) else {
            continue;
        };
        for col in &relax.columns {
            incumbent.offer(inst, &col.s1, &col.s2);
        }
        let bound = relax.bound.max(node.bound);
        if bound >= incumbent.objective - gap(incumbent.objective) {
            closed_bound = closed_bound.min(bound);
            continue;
        }

        if let Some(var) = branching_variable(&relax, &fix) {
            push_children(&mut heap, &mut next_id, &node, var, bound);
            continue;
        }
        // integral relaxation optimum
        let rounded = Selection {
            s1: relax.s1.iter().map(|&v| v > 0.5).collect(),
            s2: relax.s2.iter().map(|&v| v > 0.5).collect(),
        };
        if relax.converged && fix.honours(&rounded.s1, &rounded.s2) && inst.is_feasible(&rounded) {
            let objective = inst.objective(&rounded);
            incumbent.offer(inst, &rounded.s1, &rounded.s2);
            closed_bound = closed_bound.min(objective.max(bound));
        } else if let Some(var) = first_free(&fix) {
            push_children(&mut heap, &mut next_id, &node, var, bound);
        }
    }

    let open_min = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
    let lower_bound = closed_bound.min(open_min).min(incumbent.objective);
    if status == SolveStatus::Optimal && incumbent.objective - lower_bound > gap(incumbent.objective) {
        status = SolveStatus::NodeLimit;
    }
    Ok(BlpSolution {
        selection: incumbent.selection,
        objective: incumbent.objective,
        lower_bound,
        status,
        nodes_explored: explored,
        wall_time: started.elapsed().as_secs_f64(),
    })
}

fn push_children(heap: &mut BinaryHeap<Node>, next_id: &mut u64, parent: &Node, var: Var, bound: f64) {
    for value in [true, false] {
        let mut fixes = parent.fixes.clone();
        fixes.push((var, value));
        heap.push(Node {
            bound,
            id: *next_id,
            fixes,
        });
        *next_id += 1;
    }
}

fn relax_node(
    inst: &BlpInstance,
    fix: &Fixings,
    incumbent: &Selection,
    cutoff: f64,
    engine: LpEngine,
) -> Option<Relaxation> {
    match engine {
        LpEngine::Decomposition => decomposed(inst, fix, &[incumbent], cutoff),
        LpEngine::Direct => {
            if !fix.is_consistent(&inst.triangle_edges) {
                return None;
            }
            let lp = direct_relaxation(inst, fix).ok()?;
            if lp.status != LpStatus::Optimal {
                return None;
            }
            let n1 = inst.n_edges();
            let clamp = |v: f64| v.clamp(0.0, 1.0);
            Some(Relaxation {
                bound: lp.objective - 1e-9 * lp.objective.abs().max(1.0),
                master_objective: lp.objective,
                converged: true,
                s1: lp.x[..n1].iter().map(|&v| clamp(v)).collect(),
                s2: lp.x[n1..].iter().map(|&v| clamp(v)).collect(),
                rounds: lp.iterations,
                columns: Vec::new(),
            })
        }
    }
}

fn branching_variable(relax: &Relaxation, fix: &Fixings) -> Option<Var> {
    let mut best: Option<(Var, f64)> = None;
    let candidates = relax
        .s2
        .iter()
        .enumerate()
        .map(|(t, &v)| (Var::Triangle(t), v))
        .chain(relax.s1.iter().enumerate().map(|(e, &v)| (Var::Edge(e), v)));
    for (var, value) in candidates {
        if fix.get(var).is_some() {
            continue;
        }
        let frac = value.min(1.0 - value);
        if frac <= INTEGRALITY_TOL {
            continue;
        }
        if best.is_none_or(|(_, f)| frac > f + FRACTION_TIE) {
            best = Some((var, frac));
        }
    }
    best.map(|(v, _)| v)
}

fn first_free(fix: &Fixings) -> Option<Var> {
    fix.triangles
        .iter()
        .position(Option::is_none)
        .map(Var::Triangle)
        .or_else(|| fix.edges.iter().position(Option::is_none).map(Var::Edge))
}
