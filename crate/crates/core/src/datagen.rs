//! Seeded synthetic ground truth and signals.
//!
//! Every stage draws from its own ChaCha8 stream of the configured seed
//! (`ChaCha8Rng::seed_from_u64(seed)` followed by `set_stream(tag)`):
//!
//! | stage            | tag |
//! |------------------|-----|
//! | edge truth       | 1   |
//! | triangle truth   | 2   |
//! | node signals     | 3   |
//! | edge signals     | 4   |

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::SymmetricEigen;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::complex::{CandidateComplex, Selection, SelectionRecord};
use crate::error::{check_len, Error, Result};
use crate::learners::feasible_triangles;
use crate::matrix::DenseMatrix;
use crate::smoothness::TriangleMeasure;

pub const STREAM_EDGES: u64 = 1;
pub const STREAM_TRIANGLES: u64 = 2;
pub const STREAM_NODE_SIGNALS: u64 = 3;
pub const STREAM_EDGE_SIGNALS: u64 = 4;

/// Generator for one stage of a realization.
pub fn stage_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgePrior {
    /// Edge signals are smooth under the upper edge Laplacian (low curl).
    #[default]
    LowCurl,
    /// Edge signals are smooth under the triangle similarity Laplacian.
    Similarity,
}

impl EdgePrior {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgePrior::LowCurl => "low_curl",
            EdgePrior::Similarity => "similarity",
        }
    }

    /// The triangle cost that matches this prior.
    pub fn matched_measure(self) -> TriangleMeasure {
        match self {
            EdgePrior::LowCurl => TriangleMeasure::Curl,
            EdgePrior::Similarity => TriangleMeasure::Similarity,
        }
    }
}

impl std::str::FromStr for EdgePrior {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low_curl" => Ok(EdgePrior::LowCurl),
            "similarity" => Ok(EdgePrior::Similarity),
            other => Err(Error::InvalidArgument(format!("unknown prior `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    /// `g(lambda) = 1 / (1 + lambda)`.
    #[default]
    InvOnePlusLambda,
}

impl FilterKind {
    pub fn response(self, lambda: f64) -> f64 {
        match self {
            FilterKind::InvOnePlusLambda => 1.0 / (1.0 + lambda),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub n0: usize,
    pub er_p: f64,
    pub triangle_fraction: f64,
    pub f0: usize,
    pub f1: usize,
    pub filter_kind: FilterKind,
    pub noise_sigma: f64,
    pub seed: u64,
    pub edge_prior: EdgePrior,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n0: 10,
            er_p: 0.6,
            triangle_fraction: 0.5,
            f0: 100,
            f1: 100,
            filter_kind: FilterKind::InvOnePlusLambda,
            noise_sigma: 0.0,
            seed: 0,
            edge_prior: EdgePrior::LowCurl,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n0 < 3 {
            return Err(Error::InvalidArgument(format!("n0 must be at least 3, got {}", self.n0)));
        }
        if !(self.er_p > 0.0 && self.er_p <= 1.0) {
            return Err(Error::InvalidArgument(format!("er_p must lie in (0, 1], got {}", self.er_p)));
        }
        if !(0.0..=1.0).contains(&self.triangle_fraction) {
            return Err(Error::InvalidArgument(format!(
                "triangle_fraction must lie in [0, 1], got {}",
                self.triangle_fraction
            )));
        }
        if self.f0 == 0 || self.f1 == 0 {
            return Err(Error::InvalidArgument("feature counts must be positive".into()));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "noise_sigma must be finite and nonnegative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Each candidate edge independently with probability `p`.
pub fn sample_er_selection<R: Rng>(n0: usize, p: f64, rng: &mut R) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("edge probability must lie in [0, 1], got {p}")));
    }
    let n1 = n0 * n0.saturating_sub(1) / 2;
    Ok((0..n1).map(|_| rng.random::<f64>() < p).collect())
}

/// `floor(fraction * |T(s1)|)` triangles drawn uniformly without replacement
/// from those whose faces are all in `s1`.
pub fn sample_triangle_truth<R: Rng>(
    cx: &CandidateComplex,
    s1: &[bool],
    fraction: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidArgument(format!("fraction must lie in [0, 1], got {fraction}")));
    }
    let feasible = feasible_triangles(cx, s1)?;
    let k = (fraction * feasible.len() as f64).floor() as usize;
    let mut s2 = vec![false; cx.n_triangles()];
    for i in rand::seq::index::sample(rng, feasible.len(), k) {
        s2[feasible[i]] = true;
    }
    Ok(s2)
}

fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    let values = (0..rows * cols).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    DenseMatrix::from_row_major(rows, cols, values).expect("finite gaussian draws")
}

/// `U g(Lambda) U^T W + sigma E` for `L = U Lambda U^T`, with `W` and `E`
/// standard Gaussian `n x f` matrices drawn in that order.
pub fn filtered_signals<R: Rng>(
    l: &DenseMatrix,
    f: usize,
    noise_sigma: f64,
    filter: FilterKind,
    rng: &mut R,
) -> Result<DenseMatrix> {
    if !l.is_square() {
        return Err(Error::InvalidArgument(format!(
            "operator must be square, got {}x{}",
            l.rows(),
            l.cols()
        )));
    }
    let scale = l.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if l.max_asymmetry() > 1e-9 * scale {
        return Err(Error::InvalidArgument("operator is not symmetric".into()));
    }
    if !noise_sigma.is_finite() || noise_sigma < 0.0 {
        return Err(Error::InvalidArgument(format!("noise_sigma must be nonnegative, got {noise_sigma}")));
    }
    let n = l.rows();
    let eig = SymmetricEigen::new(l.to_nalgebra());
    let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if n > 0 && min_eig < -1e-8 * scale {
        return Err(Error::InvalidArgument(format!(
            "operator is not positive semidefinite (eigenvalue {min_eig})"
        )));
    }
    let gains = nalgebra::DVector::from_iterator(n, eig.eigenvalues.iter().map(|&v| filter.response(v.max(0.0))));
    let u = &eig.eigenvectors;
    let h = u * nalgebra::DMatrix::from_diagonal(&gains) * u.transpose();

    let w = gaussian_matrix(n, f, rng);
    let e = gaussian_matrix(n, f, rng);
    let mut x = DenseMatrix::from_nalgebra(&(h * w.to_nalgebra()));
    for (xv, ev) in x.values_mut().iter_mut().zip(e.values()) {
        *xv += noise_sigma * ev;
    }
    Ok(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignalBundle {
    pub x0: DenseMatrix,
    pub x1bar: DenseMatrix,
    pub truth: Selection,
    pub config: SynthConfig,
}

pub fn make_bundle(config: &SynthConfig) -> Result<SignalBundle> {
    config.validate()?;
    let cx = CandidateComplex::new(config.n0)?;
    let s1 = sample_er_selection(config.n0, config.er_p, &mut stage_rng(config.seed, STREAM_EDGES))?;
    let s2 = sample_triangle_truth(
        &cx,
        &s1,
        config.triangle_fraction,
        &mut stage_rng(config.seed, STREAM_TRIANGLES),
    )?;
    let x0 = filtered_signals(
        &cx.laplacian_node(&s1)?,
        config.f0,
        config.noise_sigma,
        config.filter_kind,
        &mut stage_rng(config.seed, STREAM_NODE_SIGNALS),
    )?;
    let prior = match config.edge_prior {
        EdgePrior::LowCurl => cx.laplacian_upper_edge(&s2)?,
        EdgePrior::Similarity => cx.similarity_laplacian(&s2)?,
    };
    let x1bar = filtered_signals(
        &prior,
        config.f1,
        config.noise_sigma,
        config.filter_kind,
        &mut stage_rng(config.seed, STREAM_EDGE_SIGNALS),
    )?;
    Ok(SignalBundle {
        x0,
        x1bar,
        truth: Selection { s1, s2 },
        config: config.clone(),
    })
}

#[derive(Serialize, Deserialize)]
struct BundleMeta {
    config: SynthConfig,
    truth: SelectionRecord,
}

pub const BUNDLE_META: &str = "meta.json";
pub const BUNDLE_TRUTH: &str = "truth.json";
pub const BUNDLE_X0: &str = "x0.csv";
pub const BUNDLE_X1BAR: &str = "x1bar.csv";

impl SignalBundle {
    /// Writes `meta.json`, `truth.json`, `x0.csv` and `x1bar.csv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let truth = SelectionRecord::from_selection(self.config.n0, &self.truth);
        let meta = BundleMeta {
            config: self.config.clone(),
            truth: truth.clone(),
        };
        let mut out = BufWriter::new(File::create(dir.join(BUNDLE_META))?);
        serde_json::to_writer_pretty(&mut out, &meta)?;
        writeln!(out)?;
        let mut out = BufWriter::new(File::create(dir.join(BUNDLE_TRUTH))?);
        serde_json::to_writer_pretty(&mut out, &truth)?;
        writeln!(out)?;
        self.x0.write_csv(File::create(dir.join(BUNDLE_X0))?)?;
        self.x1bar.write_csv(File::create(dir.join(BUNDLE_X1BAR))?)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let meta: BundleMeta = serde_json::from_reader(BufReader::new(File::open(dir.join(BUNDLE_META))?))?;
        meta.config.validate()?;
        let cx = CandidateComplex::new(meta.config.n0)?;
        let truth = meta.truth.to_selection(&cx)?;
        let x0 = DenseMatrix::read_csv(File::open(dir.join(BUNDLE_X0))?)?;
        let x1bar = DenseMatrix::read_csv(File::open(dir.join(BUNDLE_X1BAR))?)?;
        check_len("x0 rows", cx.n0(), x0.rows())?;
        check_len("x1bar rows", cx.n_edges(), x1bar.rows())?;
        if let Some(v) = cx.validate_inclusion(&truth)?.first() {
            return Err(Error::InclusionViolation {
                triangle: v.triangle,
                edge: v.edge,
            });
        }
        Ok(Self {
            x0,
            x1bar,
            truth,
            config: meta.config,
        })
    }
}
