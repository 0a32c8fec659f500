//! Evaluation: scoring, real-data ingestion and the experiment runner.

pub mod dataset;
pub mod experiment;
pub mod metrics;

pub use dataset::{edge_signals_from_nodes, load_real_dataset, Normalize, RealDataset};
pub use experiment::{run_experiment, Aggregate, EvalReport, ExperimentConfig, ExperimentMode, MeanStd, RunRecord};
pub use metrics::{f1_scores, BinaryScore, Scores};
