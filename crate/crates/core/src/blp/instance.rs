use serde::{Deserialize, Serialize};

use crate::complex::{CandidateComplex, Selection};
use crate::error::{check_len, Error, Result};
use crate::smoothness::{dot_selected, CostVectors};

/// The joint edge/triangle program: minimize `h1 . s1 + h2 . s2` over binary
/// selections that satisfy inclusion and both cardinality lower bounds.
///
/// Inclusion is stored per triangle (`s2[t] <= s1[e]` for each face `e`).
/// `alpha` is the coefficient of the aggregated form `s1 >= alpha B2+ s2`,
/// which has the same binary feasible set for `0 < alpha <= 1/(n0-2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlpInstance {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub c1: usize,
    pub c2: usize,
    pub triangle_edges: Vec<[usize; 3]>,
    pub alpha: f64,
}

pub fn default_alpha(n0: usize) -> f64 {
    1.0 / (n0.saturating_sub(2).max(1)) as f64
}

pub fn build_joint_instance(
    cx: &CandidateComplex,
    costs: &CostVectors,
    c1: usize,
    c2: usize,
    alpha: f64,
) -> Result<BlpInstance> {
    check_len("h1 length", cx.n_edges(), costs.h1.len())?;
    check_len("h2 length", cx.n_triangles(), costs.h2.len())?;
    let max_alpha = default_alpha(cx.n0());
    if !(alpha > 0.0 && alpha <= max_alpha * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, {max_alpha}], got {alpha}"
        )));
    }
    let inst = BlpInstance {
        h1: costs.h1.clone(),
        h2: costs.h2.clone(),
        c1,
        c2,
        triangle_edges: cx.all_triangle_edges().to_vec(),
        alpha,
    };
    inst.validate()?;
    Ok(inst)
}

impl BlpInstance {
    pub fn n_edges(&self) -> usize {
        self.h1.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.h2.len()
    }

    pub fn validate(&self) -> Result<()> {
        check_len("triangle list length", self.h2.len(), self.triangle_edges.len())?;
        for (i, v) in self.h1.iter().chain(&self.h2).enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "cost entry {i} must be finite and nonnegative, got {v}"
                )));
            }
        }
        for (t, faces) in self.triangle_edges.iter().enumerate() {
            if let Some(&e) = faces.iter().find(|&&e| e >= self.n_edges()) {
                return Err(Error::IndexOutOfRange {
                    what: "triangle face edge",
                    index: e,
                    limit: self.n_edges(),
                });
            }
            if faces[0] == faces[1] || faces[0] == faces[2] || faces[1] == faces[2] {
                return Err(Error::InvalidArgument(format!(
                    "triangle {t} has repeated face edges {faces:?}"
                )));
            }
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", self.alpha)));
        }
        Ok(())
    }

    /// Number of linearized inclusion rows.
    pub fn n_inclusion_rows(&self) -> usize {
        3 * self.n_triangles()
    }

    pub fn objective(&self, sel: &Selection) -> f64 {
        dot_selected(&self.h1, &sel.s1) + dot_selected(&self.h2, &sel.s2)
    }

    pub fn satisfies_linearized(&self, sel: &Selection) -> bool {
        self.triangle_edges
            .iter()
            .zip(&sel.s2)
            .all(|(faces, &on)| !on || faces.iter().all(|&e| sel.s1[e]))
    }

    /// The aggregated row form `s1[e] >= alpha * (number of selected triangles on e)`.
    pub fn satisfies_aggregated(&self, sel: &Selection) -> bool {
        let mut coverage = vec![0usize; self.n_edges()];
        for (faces, &on) in self.triangle_edges.iter().zip(&sel.s2) {
            if on {
                for &e in faces {
                    coverage[e] += 1;
                }
            }
        }
        coverage
            .iter()
            .zip(&sel.s1)
            .all(|(&c, &s)| (s as u8 as f64) >= self.alpha * c as f64 - 1e-12)
    }

    pub fn satisfies_cardinality(&self, sel: &Selection) -> bool {
        sel.n_edges() >= self.c1 && sel.n_triangles() >= self.c2
    }

    pub fn is_feasible(&self, sel: &Selection) -> bool {
        sel.s1.len() == self.n_edges()
            && sel.s2.len() == self.n_triangles()
            && self.satisfies_linearized(sel)
            && self.satisfies_cardinality(sel)
    }

    /// The cardinality bounds are the only way an instance can be infeasible.
    pub fn is_trivially_infeasible(&self) -> bool {
        self.c1 > self.n_edges() || self.c2 > self.n_triangles()
    }
}
