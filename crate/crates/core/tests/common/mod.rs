#![allow(dead_code)]

use jointsc::blp::{default_alpha, BlpInstance};
use jointsc::{CandidateComplex, CostVectors, DenseMatrix, Selection, TriangleMeasure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let values = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    DenseMatrix::from_row_major(rows, cols, values).unwrap()
}

/// Costs from Gaussian node and edge signals.
pub fn gaussian_costs(cx: &CandidateComplex, features: usize, measure: TriangleMeasure, seed: u64) -> CostVectors {
    let mut r = rng(seed);
    let x0 = gaussian(cx.n0(), features, &mut r);
    let x1 = gaussian(cx.n_edges(), features, &mut r);
    CostVectors::new(cx, &x0, &x1, measure).unwrap()
}

pub fn instance(cx: &CandidateComplex, costs: &CostVectors, c1: usize, c2: usize) -> BlpInstance {
    jointsc::blp::build_joint_instance(cx, costs, c1, c2, default_alpha(cx.n0())).unwrap()
}

/// Every binary point of a small complex, as `(s1, s2)` bit masks.
pub fn all_selections(cx: &CandidateComplex) -> impl Iterator<Item = Selection> + '_ {
    let n1 = cx.n_edges();
    let n2 = cx.n_triangles();
    (0u64..1 << (n1 + n2)).map(move |mask| Selection {
        s1: (0..n1).map(|e| mask >> e & 1 == 1).collect(),
        s2: (0..n2).map(|t| mask >> (n1 + t) & 1 == 1).collect(),
    })
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
