//! Linear cost vectors for edges and triangles derived from observed signals.
//!
//! Each cost is the per-simplex contribution to a Laplacian quadratic form, so
//! `h1 . s1 == tr(X0^T L0(s1) X0)` and likewise for the two triangle measures.
//! The costs are computed as explicit per-simplex sums; [`quadratic_form`] is
//! kept for checking that identity.

use serde::{Deserialize, Serialize};

use crate::complex::CandidateComplex;
use crate::error::{check_len, Error, Result};
use crate::matrix::DenseMatrix;

/// Residue below this is treated as rounding noise and clamped to zero.
const NEGATIVE_RESIDUE: f64 = -1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TriangleMeasure {
    Curl,
    Similarity,
}

impl TriangleMeasure {
    pub fn as_str(self) -> &'static str {
        match self {
            TriangleMeasure::Curl => "curl",
            TriangleMeasure::Similarity => "similarity",
        }
    }
}

impl std::str::FromStr for TriangleMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "curl" => Ok(TriangleMeasure::Curl),
            "similarity" => Ok(TriangleMeasure::Similarity),
            other => Err(Error::InvalidArgument(format!("unknown measure `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostVectors {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub h2_kind: TriangleMeasure,
}

impl CostVectors {
    pub fn new(cx: &CandidateComplex, x0: &DenseMatrix, x1bar: &DenseMatrix, kind: TriangleMeasure) -> Result<Self> {
        let h1 = h1_node_smoothness(cx, x0)?;
        let h2 = match kind {
            TriangleMeasure::Curl => h2_curl(cx, x1bar)?,
            TriangleMeasure::Similarity => h2_similarity(cx, x1bar)?,
        };
        Ok(Self { h1, h2, h2_kind: kind })
    }

    /// Assemble from precomputed vectors, clamping rounding residue to zero.
    pub fn from_raw(h1: Vec<f64>, h2: Vec<f64>, kind: TriangleMeasure) -> Result<Self> {
        Ok(Self {
            h1: clamp_costs(h1)?,
            h2: clamp_costs(h2)?,
            h2_kind: kind,
        })
    }

    pub fn objective(&self, s1: &[bool], s2: &[bool]) -> f64 {
        dot_selected(&self.h1, s1) + dot_selected(&self.h2, s2)
    }
}

pub(crate) fn dot_selected(h: &[f64], s: &[bool]) -> f64 {
    h.iter().zip(s).filter(|(_, &b)| b).map(|(v, _)| v).sum()
}

fn clamp_costs(mut h: Vec<f64>) -> Result<Vec<f64>> {
    for (i, v) in h.iter_mut().enumerate() {
        if !v.is_finite() || *v < NEGATIVE_RESIDUE {
            return Err(Error::InvalidArgument(format!(
                "cost entry {i} = {v} is not a finite nonnegative value"
            )));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(h)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `h1[e] = ||x0[j] - x0[i]||^2` for edge `e = (i, j)`.
pub fn h1_node_smoothness(cx: &CandidateComplex, x0: &DenseMatrix) -> Result<Vec<f64>> {
    check_len("node signal rows", cx.n0(), x0.rows())?;
    let h1 = cx
        .edges()
        .iter()
        .map(|&[i, j]| sq_dist(x0.row(i), x0.row(j)))
        .collect();
    clamp_costs(h1)
}

/// Squared signed circulation of the edge signals around each triangle.
pub fn h2_curl(cx: &CandidateComplex, x1bar: &DenseMatrix) -> Result<Vec<f64>> {
    check_len("edge signal rows", cx.n_edges(), x1bar.rows())?;
    let mut h2 = Vec::with_capacity(cx.n_triangles());
    for t in 0..cx.n_triangles() {
        let col = cx.b2().column(t);
        let mut acc = 0.0;
        for f in 0..x1bar.cols() {
            let curl: f64 = col.iter().map(|&(e, s)| s as f64 * x1bar[(e, f)]).sum();
            acc += curl * curl;
        }
        h2.push(acc);
    }
    clamp_costs(h2)
}

/// Sum of squared differences over the three pairs of face-edge signals.
pub fn h2_similarity(cx: &CandidateComplex, x1bar: &DenseMatrix) -> Result<Vec<f64>> {
    check_len("edge signal rows", cx.n_edges(), x1bar.rows())?;
    let h2 = cx
        .all_triangle_edges()
        .iter()
        .map(|&[a, b, c]| {
            let (ra, rb, rc) = (x1bar.row(a), x1bar.row(b), x1bar.row(c));
            sq_dist(ra, rb) + sq_dist(ra, rc) + sq_dist(rb, rc)
        })
        .collect();
    clamp_costs(h2)
}

/// The pairwise-difference similarity measure one level down: for each edge,
/// the squared difference of its two endpoint rows.
pub fn similarity_edges_from_nodes(cx: &CandidateComplex, x0: &DenseMatrix) -> Result<Vec<f64>> {
    check_len("node signal rows", cx.n0(), x0.rows())?;
    let faces_of_edge = |e: usize| cx.edges()[e];
    Ok((0..cx.n_edges())
        .map(|e| {
            let faces = faces_of_edge(e);
            let mut acc = 0.0;
            for (p, &f) in faces.iter().enumerate() {
                for &g in &faces[p + 1..] {
                    acc += sq_dist(x0.row(f), x0.row(g));
                }
            }
            acc
        })
        .collect())
}

/// `tr(X^T L X)`.
pub fn quadratic_form(l: &DenseMatrix, x: &DenseMatrix) -> Result<f64> {
    if !l.is_square() {
        return Err(Error::InvalidArgument(format!(
            "quadratic form needs a square operator, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    check_len("quadratic form signal rows", l.rows(), x.rows())?;
    let mut total = 0.0;
    for i in 0..l.rows() {
        let li = l.row(i);
        let xi = x.row(i);
        for (j, &lij) in li.iter().enumerate() {
            if lij == 0.0 {
                continue;
            }
            let dot: f64 = xi.iter().zip(x.row(j)).map(|(a, b)| a * b).sum();
            total += lij * dot;
        }
    }
    Ok(total)
}
