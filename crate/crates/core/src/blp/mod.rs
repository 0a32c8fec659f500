//! Exact solution of the joint edge/triangle binary program.
//!
//! [`solve`] is a best-first branch-and-bound whose node bounds come from the
//! LP relaxation. [`oracle_enumerate`] is an independent exhaustive solver for
//! small instances, used to cross-check it.

mod bnb;
mod closure;
mod dump;
mod instance;
mod oracle;
mod relaxation;
pub mod simplex;

pub use bnb::{solve, BlpSolution, LpEngine, SolveOptions, SolveStatus};
pub use dump::{read_instance, write_instance};
pub use instance::{build_joint_instance, default_alpha, BlpInstance};
pub use oracle::{oracle_enumerate, oracle_enumerate_instance, ORACLE_BUDGET};
pub use relaxation::{direct_relaxation, lp_bound, Relaxation};

/// A single binary decision variable of the program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    Edge(usize),
    Triangle(usize),
}

/// Partial assignment of the selection variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixings {
    pub edges: Vec<Option<bool>>,
    pub triangles: Vec<Option<bool>>,
}

impl Fixings {
    pub fn free(n_edges: usize, n_triangles: usize) -> Self {
        Self {
            edges: vec![None; n_edges],
            triangles: vec![None; n_triangles],
        }
    }

    pub fn for_instance(inst: &BlpInstance) -> Self {
        Self::free(inst.n_edges(), inst.n_triangles())
    }

    pub fn set(&mut self, var: Var, value: bool) {
        match var {
            Var::Edge(e) => self.edges[e] = Some(value),
            Var::Triangle(t) => self.triangles[t] = Some(value),
        }
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        match var {
            Var::Edge(e) => self.edges[e],
            Var::Triangle(t) => self.triangles[t],
        }
    }

    /// No triangle is fixed on while one of its faces is fixed off.
    pub fn is_consistent(&self, triangle_edges: &[[usize; 3]]) -> bool {
        triangle_edges.iter().zip(&self.triangles).all(|(faces, fixed)| {
            *fixed != Some(true) || faces.iter().all(|&e| self.edges[e] != Some(false))
        })
    }

    pub fn honours(&self, s1: &[bool], s2: &[bool]) -> bool {
        self.edges.iter().zip(s1).all(|(f, &v)| f.is_none_or(|f| f == v))
            && self.triangles.iter().zip(s2).all(|(f, &v)| f.is_none_or(|f| f == v))
    }

    /// Largest closed selection compatible with the fixings.
    pub(crate) fn maximal_closure(&self, triangle_edges: &[[usize; 3]]) -> (Vec<bool>, Vec<bool>) {
        let s1: Vec<bool> = self.edges.iter().map(|f| *f != Some(false)).collect();
        let s2 = triangle_edges
            .iter()
            .zip(&self.triangles)
            .map(|(faces, f)| *f != Some(false) && faces.iter().all(|&e| s1[e]))
            .collect();
        (s1, s2)
    }
}
