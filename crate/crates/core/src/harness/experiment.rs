use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::dataset::{load_real_dataset, Normalize};
use super::metrics::{f1_scores, Scores};
use crate::blp::{default_alpha, SolveOptions};
use crate::complex::{CandidateComplex, Selection, SelectionRecord};
use crate::datagen::{make_bundle, EdgePrior, FilterKind, SynthConfig};
use crate::error::{Error, Result};
use crate::learners::{
    inclusion_violations, learn_greedy, learn_hierarchical, learn_joint, GreedyOptions, LearnerOutput, Method,
};
use crate::matrix::DenseMatrix;
use crate::smoothness::{CostVectors, TriangleMeasure};

pub const REPORT_FILE: &str = "report.json";
pub const RESULTS_FILE: &str = "results.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentMode {
    #[default]
    Synthetic,
    Real,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub mode: ExperimentMode,
    pub n0: Vec<usize>,
    pub seeds: Vec<u64>,
    pub priors: Vec<EdgePrior>,
    /// Triangle costs to evaluate. Empty means the measure matched to each
    /// prior in synthetic mode and both measures in real mode.
    pub measures: Vec<TriangleMeasure>,
    pub methods: Vec<Method>,
    pub er_p: f64,
    pub triangle_fraction: f64,
    pub f0: usize,
    pub f1: usize,
    pub noise_sigma: f64,
    pub filter_kind: FilterKind,
    pub greedy: GreedyOptions,
    pub solver: SolveOptions,
    pub normalize: Normalize,
    /// Multiplies the ground-truth counts used as cardinality bounds.
    pub cardinality_scale: f64,
    /// Dataset directories for real mode.
    pub datasets: Vec<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let synth = SynthConfig::default();
        Self {
            mode: ExperimentMode::Synthetic,
            n0: vec![10],
            seeds: (0..10).collect(),
            priors: vec![EdgePrior::LowCurl],
            measures: Vec::new(),
            methods: vec![Method::Joint, Method::Hierarchical, Method::Greedy],
            er_p: synth.er_p,
            triangle_fraction: synth.triangle_fraction,
            f0: synth.f0,
            f1: synth.f1,
            noise_sigma: synth.noise_sigma,
            filter_kind: synth.filter_kind,
            greedy: GreedyOptions::default(),
            solver: SolveOptions::default(),
            normalize: Normalize::None,
            cardinality_scale: 1.0,
            datasets: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let cfg: Self = serde_json::from_reader(std::io::BufReader::new(File::open(path)?))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidArgument("no methods requested".into()));
        }
        if !self.cardinality_scale.is_finite() || self.cardinality_scale < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "cardinality_scale must be finite and nonnegative, got {}",
                self.cardinality_scale
            )));
        }
        match self.mode {
            ExperimentMode::Synthetic => {
                if self.n0.is_empty() || self.seeds.is_empty() || self.priors.is_empty() {
                    return Err(Error::InvalidArgument(
                        "synthetic mode needs at least one n0, seed and prior".into(),
                    ));
                }
                for &n0 in &self.n0 {
                    self.synth_config(n0, self.priors[0], self.seeds[0]).validate()?;
                }
            }
            ExperimentMode::Real => {
                if self.datasets.is_empty() {
                    return Err(Error::InvalidArgument("real mode needs at least one dataset".into()));
                }
            }
        }
        Ok(())
    }

    fn synth_config(&self, n0: usize, prior: EdgePrior, seed: u64) -> SynthConfig {
        SynthConfig {
            n0,
            er_p: self.er_p,
            triangle_fraction: self.triangle_fraction,
            f0: self.f0,
            f1: self.f1,
            filter_kind: self.filter_kind,
            noise_sigma: self.noise_sigma,
            seed,
            edge_prior: prior,
        }
    }

    fn measures_for(&self, prior: Option<EdgePrior>) -> Vec<TriangleMeasure> {
        if !self.measures.is_empty() {
            return self.measures.clone();
        }
        match prior {
            Some(p) => vec![p.matched_measure()],
            None => vec![TriangleMeasure::Curl, TriangleMeasure::Similarity],
        }
    }

    fn bound(&self, truth_count: usize, limit: usize) -> usize {
        ((truth_count as f64 * self.cardinality_scale).round() as usize).min(limit)
    }
}

/// One learner run on one realization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub method: Method,
    pub measure: TriangleMeasure,
    /// Signal prior, or `real` for loaded datasets.
    pub prior: String,
    pub n0: usize,
    /// Seed in synthetic mode, dataset path in real mode.
    pub realization: String,
    pub c1: usize,
    pub c2: usize,
    pub scores: Scores,
    pub objective: f64,
    pub relaxed_cardinality: bool,
    pub solver_limit: bool,
    pub inclusion_violations: usize,
    pub estimate: SelectionRecord,
    pub truth: SelectionRecord,
    /// Seconds spent in the learner call; excluded from `results.csv`.
    pub wall_time: f64,
    pub diagnostics: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single realization.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self { mean: f64::NAN, std: f64::NAN };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub measure: TriangleMeasure,
    pub n0: usize,
    pub prior: String,
    pub realizations: usize,
    pub metrics: BTreeMap<String, MeanStd>,
}

impl Aggregate {
    pub fn metric(&self, name: &str) -> Option<MeanStd> {
        self.metrics.get(name).copied()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

/// Metrics written to `results.csv`, in column order.
pub const METRICS: [&str; 7] = [
    "f1_edges",
    "f1_triangles",
    "precision_edges",
    "recall_edges",
    "precision_triangles",
    "recall_triangles",
    "objective",
];

fn metric_value(r: &RunRecord, name: &str) -> f64 {
    match name {
        "f1_edges" => r.scores.edges.f1,
        "f1_triangles" => r.scores.triangles.f1,
        "precision_edges" => r.scores.edges.precision,
        "recall_edges" => r.scores.edges.recall,
        "precision_triangles" => r.scores.triangles.precision,
        "recall_triangles" => r.scores.triangles.recall,
        "objective" => r.objective,
        _ => unreachable!("unknown metric {name}"),
    }
}

/// Signals and truth of one realization, before costs.
struct Realization {
    label: String,
    prior: Option<EdgePrior>,
    x0: DenseMatrix,
    x1bar: DenseMatrix,
    truth: Selection,
}

fn run_realization(cfg: &ExperimentConfig, real: &Realization) -> Result<Vec<RunRecord>> {
    let cx = CandidateComplex::new(real.x0.rows())?;
    let x0 = cfg.normalize.apply(&real.x0);
    let x1bar = cfg.normalize.apply(&real.x1bar);
    let c1 = cfg.bound(real.truth.n_edges(), cx.n_edges());
    let c2 = cfg.bound(real.truth.n_triangles(), cx.n_triangles());
    let truth_record = SelectionRecord::from_selection(cx.n0(), &real.truth);
    let prior = real.prior.map_or("real", EdgePrior::as_str).to_string();

    let mut records = Vec::new();
    for measure in cfg.measures_for(real.prior) {
        let costs = CostVectors::new(&cx, &x0, &x1bar, measure)?;
        for &method in &cfg.methods {
            let started = Instant::now();
            let out: LearnerOutput = match method {
                Method::Joint => learn_joint(&cx, &costs, c1, c2, default_alpha(cx.n0()), &cfg.solver)?,
                Method::Hierarchical => learn_hierarchical(&cx, &costs, c1, c2)?,
                Method::Greedy => learn_greedy(&cx, &costs, c1, c2, &cfg.greedy)?,
            };
            let wall_time = started.elapsed().as_secs_f64();
            records.push(RunRecord {
                method,
                measure,
                prior: prior.clone(),
                n0: cx.n0(),
                realization: real.label.clone(),
                c1,
                c2,
                scores: f1_scores(&out.selection, &real.truth)?,
                objective: out.objective,
                relaxed_cardinality: out.relaxed_cardinality(),
                solver_limit: out.solver_limit,
                inclusion_violations: inclusion_violations(&cx, &out.selection),
                estimate: SelectionRecord::from_selection(cx.n0(), &out.selection),
                truth: truth_record.clone(),
                wall_time,
                diagnostics: out.diagnostics,
            });
        }
    }
    Ok(records)
}

enum Task {
    Synthetic { n0: usize, prior: EdgePrior, seed: u64 },
    Real(PathBuf),
}

impl Task {
    fn load(&self, cfg: &ExperimentConfig) -> Result<Realization> {
        match self {
            Task::Synthetic { n0, prior, seed } => {
                let b = make_bundle(&cfg.synth_config(*n0, *prior, *seed))?;
                Ok(Realization {
                    label: seed.to_string(),
                    prior: Some(*prior),
                    x0: b.x0,
                    x1bar: b.x1bar,
                    truth: b.truth,
                })
            }
            Task::Real(path) => {
                let d = load_real_dataset(path)?;
                Ok(Realization {
                    label: path.display().to_string(),
                    prior: None,
                    x1bar: d.edge_signals(),
                    x0: d.node_features,
                    truth: d.truth,
                })
            }
        }
    }
}

/// Runs every requested learner on every realization. Realizations run in
/// parallel; records keep the order n0, prior, seed (or dataset), measure,
/// method.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<EvalReport> {
    cfg.validate()?;
    let tasks: Vec<Task> = match cfg.mode {
        ExperimentMode::Synthetic => cfg
            .n0
            .iter()
            .flat_map(|&n0| {
                cfg.priors
                    .iter()
                    .flat_map(move |&prior| cfg.seeds.iter().map(move |&seed| Task::Synthetic { n0, prior, seed }))
            })
            .collect(),
        ExperimentMode::Real => cfg.datasets.iter().cloned().map(Task::Real).collect(),
    };
    let per_task: Vec<Vec<RunRecord>> = tasks
        .par_iter()
        .map(|task| run_realization(cfg, &task.load(cfg)?))
        .collect::<Result<_>>()?;
    let records: Vec<RunRecord> = per_task.into_iter().flatten().collect();
    let aggregates = aggregate(&records);
    Ok(EvalReport {
        config: cfg.clone(),
        seeds: match cfg.mode {
            ExperimentMode::Synthetic => cfg.seeds.clone(),
            ExperimentMode::Real => Vec::new(),
        },
        records,
        aggregates,
    })
}

fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut groups: BTreeMap<(Method, &'static str, usize, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.method, r.measure.as_str(), r.n0, r.prior.as_str()))
            .or_default()
            .push(r);
    }
    groups
        .into_values()
        .map(|rs| {
            let metrics = METRICS
                .iter()
                .map(|&m| {
                    let values: Vec<f64> = rs.iter().map(|r| metric_value(r, m)).collect();
                    (m.to_string(), MeanStd::of(&values))
                })
                .collect();
            Aggregate {
                method: rs[0].method,
                measure: rs[0].measure,
                n0: rs[0].n0,
                prior: rs[0].prior.clone(),
                realizations: rs.len(),
                metrics,
            }
        })
        .collect()
}

impl EvalReport {
    pub fn aggregate_for(&self, method: Method, measure: TriangleMeasure, n0: usize, prior: &str) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.method == method && a.measure == measure && a.n0 == n0 && a.prior == prior)
    }

    /// Tidy table `method,measure,n0,prior,metric,mean,std`.
    pub fn write_results_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["method", "measure", "n0", "prior", "metric", "mean", "std"])?;
        for a in &self.aggregates {
            for m in METRICS {
                let v = a.metrics[m];
                w.write_record([
                    a.method.as_str(),
                    a.measure.as_str(),
                    &a.n0.to_string(),
                    &a.prior,
                    m,
                    &format!("{:?}", v.mean),
                    &format!("{:?}", v.std),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Writes `report.json` and `results.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut out = BufWriter::new(File::create(dir.join(REPORT_FILE))?);
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        out.flush()?;
        self.write_results_csv(BufWriter::new(File::create(dir.join(RESULTS_FILE))?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_std() {
        let s = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 1.0).abs() < 1e-15);
        assert_eq!(MeanStd::of(&[4.0]).std, 0.0);
    }

    #[test]
    fn config_defaults_parse() {
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"n0": [6], "seeds": [1, 2]}"#).unwrap();
        assert_eq!(cfg.n0, vec![6]);
        assert_eq!(cfg.methods.len(), 3);
        cfg.validate().unwrap();
        let bad: ExperimentConfig = serde_json::from_str(r#"{"mode": "real"}"#).unwrap();
        assert!(bad.validate().is_err());
    }
}
