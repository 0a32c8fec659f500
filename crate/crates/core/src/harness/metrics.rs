use serde::{Deserialize, Serialize};

use crate::complex::Selection;
use crate::error::{check_len, Result};

/// Precision, recall and F1 of one binary selection against its truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl BinaryScore {
    /// Empty predictions have precision 0, empty truth recall 0, and F1 is 0
    /// whenever `precision + recall` is.
    pub fn compute(estimated: &[bool], truth: &[bool]) -> Result<Self> {
        check_len("selection length", truth.len(), estimated.len())?;
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        for (&e, &t) in estimated.iter().zip(truth) {
            match (e, t) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => {}
            }
        }
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Ok(Self { precision, recall, f1 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub edges: BinaryScore,
    pub triangles: BinaryScore,
}

impl Scores {
    pub fn f1_edges(&self) -> f64 {
        self.edges.f1
    }

    pub fn f1_triangles(&self) -> f64 {
        self.triangles.f1
    }
}

pub fn f1_scores(estimated: &Selection, truth: &Selection) -> Result<Scores> {
    Ok(Scores {
        edges: BinaryScore::compute(&estimated.s1, &truth.s1)?,
        triangles: BinaryScore::compute(&estimated.s2, &truth.s2)?,
    })
}
