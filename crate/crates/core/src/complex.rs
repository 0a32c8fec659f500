//! Candidate simplices, incidence matrices and Laplacians over the complete
//! complex on `n0` nodes.
//!
//! Every module indexes edges and triangles in the lexicographic order of
//! their sorted vertex tuples. Edges are oriented from the lower to the higher
//! vertex; the boundary of triangle `(i, j, k)` is `+(j,k) - (i,k) + (i,j)`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::matrix::DenseMatrix;

pub type Edge = [usize; 2];
pub type Triangle = [usize; 3];

/// Largest node count for which [`IncidenceMatrix::to_dense`] is allowed.
pub const DENSE_LIMIT: usize = 32;

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All sorted `(k+1)`-subsets of `0..n0` in lexicographic order.
pub fn enumerate_simplices(n0: usize, k: usize) -> Result<Vec<Vec<usize>>> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "simplex order must be 1 or 2, got {k}"
        )));
    }
    if n0 < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} nodes for {k}-simplices, got {n0}",
            k + 1
        )));
    }
    let mut out = Vec::with_capacity(binomial(n0, k + 1));
    let mut current = Vec::with_capacity(k + 1);
    fn rec(start: usize, n0: usize, size: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == size {
            out.push(current.clone());
            return;
        }
        for v in start..n0 {
            current.push(v);
            rec(v + 1, n0, size, current, out);
            current.pop();
        }
    }
    rec(0, n0, k + 1, &mut current, &mut out);
    Ok(out)
}

/// Signed incidence matrix stored as per-column `(row, sign)` lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    columns: Vec<Vec<(usize, i8)>>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, c: usize) -> &[(usize, i8)] {
        &self.columns[c]
    }

    pub fn get(&self, r: usize, c: usize) -> i8 {
        self.columns[c]
            .iter()
            .find(|(row, _)| *row == r)
            .map_or(0, |(_, s)| *s)
    }

    pub fn abs(&self) -> Self {
        Self {
            rows: self.rows,
            columns: self
                .columns
                .iter()
                .map(|col| col.iter().map(|&(r, s)| (r, s.abs())).collect())
                .collect(),
        }
    }

    /// Row-major dense copy. Refused above [`DENSE_LIMIT`]-node complexes,
    /// where the column lists are the only representation.
    pub fn to_dense(&self) -> Result<Vec<i64>> {
        if self.rows * self.cols() > binomial(DENSE_LIMIT, 2) * binomial(DENSE_LIMIT, 3) {
            return Err(Error::InvalidArgument(
                "incidence matrix too large for dense storage".into(),
            ));
        }
        let mut out = vec![0i64; self.rows * self.cols()];
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, s) in col {
                out[r * self.cols() + c] = s as i64;
            }
        }
        Ok(out)
    }

    /// Exact integer product `self * other`, returned row-major.
    pub fn product(&self, other: &Self) -> Result<Vec<i64>> {
        check_len("incidence product inner dimension", self.cols(), other.rows)?;
        let mut out = vec![0i64; self.rows * other.cols()];
        for (c, col) in other.columns.iter().enumerate() {
            for &(mid, s_mid) in col {
                for &(r, s) in &self.columns[mid] {
                    out[r * other.cols() + c] += s as i64 * s_mid as i64;
                }
            }
        }
        Ok(out)
    }
}

/// The complete complex on `n0` nodes: every edge and triangle is a candidate.
#[derive(Debug, Clone)]
pub struct CandidateComplex {
    n0: usize,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
    b1: IncidenceMatrix,
    b2: IncidenceMatrix,
    b2_plus: IncidenceMatrix,
    triangle_edges: Vec<[usize; 3]>,
}

impl CandidateComplex {
    pub fn new(n0: usize) -> Result<Self> {
        if n0 < 3 {
            return Err(Error::InvalidArgument(format!(
                "candidate complex needs n0 >= 3, got {n0}"
            )));
        }
        let edges: Vec<Edge> = enumerate_simplices(n0, 1)?
            .into_iter()
            .map(|v| [v[0], v[1]])
            .collect();
        let triangles: Vec<Triangle> = enumerate_simplices(n0, 2)?
            .into_iter()
            .map(|v| [v[0], v[1], v[2]])
            .collect();

        let b1 = IncidenceMatrix {
            rows: n0,
            columns: edges.iter().map(|&[i, j]| vec![(i, -1), (j, 1)]).collect(),
        };

        let mut triangle_edges = Vec::with_capacity(triangles.len());
        let mut b2_cols = Vec::with_capacity(triangles.len());
        for &[i, j, k] in &triangles {
            let ij = edge_index(n0, i, j);
            let ik = edge_index(n0, i, k);
            let jk = edge_index(n0, j, k);
            triangle_edges.push([ij, ik, jk]);
            b2_cols.push(vec![(ij, 1), (ik, -1), (jk, 1)]);
        }
        let b2 = IncidenceMatrix {
            rows: edges.len(),
            columns: b2_cols,
        };
        let b2_plus = b2.abs();

        Ok(Self {
            n0,
            edges,
            triangles,
            b1,
            b2,
            b2_plus,
            triangle_edges,
        })
    }

    pub fn n0(&self) -> usize {
        self.n0
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn b1(&self) -> &IncidenceMatrix {
        &self.b1
    }

    pub fn b2(&self) -> &IncidenceMatrix {
        &self.b2
    }

    pub fn b2_plus(&self) -> &IncidenceMatrix {
        &self.b2_plus
    }

    /// Face edges of triangle `t` as `[(i,j), (i,k), (j,k)]` indices.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    pub fn all_triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    pub fn edge_index(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        (i != j && j < self.n0).then(|| edge_index(self.n0, i, j))
    }

    pub fn triangle_index(&self, mut v: [usize; 3]) -> Option<usize> {
        v.sort_unstable();
        if v[0] == v[1] || v[1] == v[2] || v[2] >= self.n0 {
            return None;
        }
        let n = self.n0;
        let [i, j, k] = v;
        let before_i: usize = (0..i).map(|a| binomial(n - 1 - a, 2)).sum();
        let before_j: usize = (i + 1..j).map(|b| n - 1 - b).sum();
        Some(before_i + before_j + (k - j - 1))
    }

    fn check_s1(&self, s1: &[bool]) -> Result<()> {
        check_len("edge selection length", self.n_edges(), s1.len())
    }

    fn check_s2(&self, s2: &[bool]) -> Result<()> {
        check_len("triangle selection length", self.n_triangles(), s2.len())
    }

    /// Every `(triangle, edge)` pair where the triangle is selected but the
    /// face edge is not. Empty exactly when the selection is a complex.
    pub fn validate_inclusion(&self, sel: &Selection) -> Result<Vec<InclusionViolation>> {
        self.check_s1(&sel.s1)?;
        self.check_s2(&sel.s2)?;
        let mut out = Vec::new();
        for (t, faces) in self.triangle_edges.iter().enumerate() {
            if !sel.s2[t] {
                continue;
            }
            for &e in faces {
                if !sel.s1[e] {
                    out.push(InclusionViolation {
                        triangle: t,
                        edge: e,
                    });
                }
            }
        }
        Ok(out)
    }

    /// `B1 diag(s1) B1^T`.
    pub fn laplacian_node(&self, s1: &[bool]) -> Result<DenseMatrix> {
        self.check_s1(s1)?;
        let mut l = DenseMatrix::zeros(self.n0, self.n0);
        for (e, &[i, j]) in self.edges.iter().enumerate() {
            if s1[e] {
                l[(i, i)] += 1.0;
                l[(j, j)] += 1.0;
                l[(i, j)] -= 1.0;
                l[(j, i)] -= 1.0;
            }
        }
        Ok(l)
    }

    /// `B2 diag(s2) B2^T` over the full candidate edge space.
    pub fn laplacian_upper_edge(&self, s2: &[bool]) -> Result<DenseMatrix> {
        self.check_s2(s2)?;
        let mut l = DenseMatrix::zeros(self.n_edges(), self.n_edges());
        for (t, col) in self.b2.columns.iter().enumerate() {
            if !s2[t] {
                continue;
            }
            for &(a, sa) in col {
                for &(b, sb) in col {
                    l[(a, b)] += (sa * sb) as f64;
                }
            }
        }
        Ok(l)
    }

    /// `B1^T B1` restricted to the selected edges, embedded in the candidate
    /// edge space (rows and columns of unselected edges are zero).
    pub fn laplacian_lower_edge(&self, s1: &[bool]) -> Result<DenseMatrix> {
        self.check_s1(s1)?;
        let m = self.n_edges();
        let mut l = DenseMatrix::zeros(m, m);
        // edges sharing a node interact; bucket by node to avoid an m^2 scan
        let mut incident: Vec<Vec<(usize, i8)>> = vec![Vec::new(); self.n0];
        for (e, col) in self.b1.columns.iter().enumerate() {
            if s1[e] {
                for &(node, s) in col {
                    incident[node].push((e, s));
                }
            }
        }
        for list in &incident {
            for &(a, sa) in list {
                for &(b, sb) in list {
                    l[(a, b)] += (sa * sb) as f64;
                }
            }
        }
        Ok(l)
    }

    /// Edge Hodge Laplacian: lower term from the selected edges plus the
    /// upper term from the selected triangles.
    pub fn hodge_laplacian_edge(&self, s1: &[bool], s2: &[bool]) -> Result<DenseMatrix> {
        let mut l = self.laplacian_lower_edge(s1)?;
        let up = self.laplacian_upper_edge(s2)?;
        for (dst, src) in l.values_mut().iter_mut().zip(up.values()) {
            *dst += src;
        }
        Ok(l)
    }

    /// Sum over selected triangles of `C_t^T L_tri C_t`, where `L_tri` is the
    /// Laplacian of the complete graph on the triangle's three edges.
    pub fn similarity_laplacian(&self, s2: &[bool]) -> Result<DenseMatrix> {
        self.check_s2(s2)?;
        let mut l = DenseMatrix::zeros(self.n_edges(), self.n_edges());
        for (t, faces) in self.triangle_edges.iter().enumerate() {
            if !s2[t] {
                continue;
            }
            for &a in faces {
                for &b in faces {
                    l[(a, b)] += if a == b { 2.0 } else { -1.0 };
                }
            }
        }
        Ok(l)
    }
}

/// Index of edge `(i, j)`, `i < j < n0`, in lexicographic order.
pub(crate) fn edge_index(n0: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n0);
    i * (2 * n0 - i - 1) / 2 + (j - i - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct InclusionViolation {
    pub triangle: usize,
    pub edge: usize,
}

/// Binary activation of candidate edges (`s1`) and triangles (`s2`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Selection {
    pub s1: Vec<bool>,
    pub s2: Vec<bool>,
}

impl Selection {
    pub fn empty(cx: &CandidateComplex) -> Self {
        Self {
            s1: vec![false; cx.n_edges()],
            s2: vec![false; cx.n_triangles()],
        }
    }

    pub fn full(cx: &CandidateComplex) -> Self {
        Self {
            s1: vec![true; cx.n_edges()],
            s2: vec![true; cx.n_triangles()],
        }
    }

    pub fn from_indices(cx: &CandidateComplex, edges: &[usize], triangles: &[usize]) -> Result<Self> {
        let mut sel = Self::empty(cx);
        for &e in edges {
            if e >= cx.n_edges() {
                return Err(Error::IndexOutOfRange {
                    what: "edge",
                    index: e,
                    limit: cx.n_edges(),
                });
            }
            sel.s1[e] = true;
        }
        for &t in triangles {
            if t >= cx.n_triangles() {
                return Err(Error::IndexOutOfRange {
                    what: "triangle",
                    index: t,
                    limit: cx.n_triangles(),
                });
            }
            sel.s2[t] = true;
        }
        Ok(sel)
    }

    pub fn edge_indices(&self) -> Vec<usize> {
        active(&self.s1)
    }

    pub fn triangle_indices(&self) -> Vec<usize> {
        active(&self.s2)
    }

    pub fn n_edges(&self) -> usize {
        self.s1.iter().filter(|&&b| b).count()
    }

    pub fn n_triangles(&self) -> usize {
        self.s2.iter().filter(|&&b| b).count()
    }
}

fn active(v: &[bool]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// On-disk form of a [`Selection`]: active simplex indices in the
/// lexicographic candidate order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub n0: usize,
    pub edges: Vec<usize>,
    pub triangles: Vec<usize>,
}

impl SelectionRecord {
    pub fn from_selection(n0: usize, sel: &Selection) -> Self {
        Self {
            n0,
            edges: sel.edge_indices(),
            triangles: sel.triangle_indices(),
        }
    }

    pub fn to_selection(&self, cx: &CandidateComplex) -> Result<Selection> {
        if cx.n0() != self.n0 {
            return Err(Error::DimensionMismatch {
                context: "selection node count",
                expected: cx.n0(),
                actual: self.n0,
            });
        }
        Selection::from_indices(cx, &self.edges, &self.triangles)
    }
}
