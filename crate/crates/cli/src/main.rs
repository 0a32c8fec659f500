use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use jointsc::blp::{self, build_joint_instance, default_alpha, LpEngine, SolveOptions, SolveStatus};
use jointsc::datagen::{make_bundle, EdgePrior, SignalBundle, SynthConfig};
use jointsc::harness::{f1_scores, run_experiment, ExperimentConfig};
use jointsc::{CandidateComplex, CostVectors, SelectionRecord, TriangleMeasure};

const EXIT_INVALID: u8 = 1;
const EXIT_SOLVER_LIMIT: u8 = 2;

#[derive(Parser)]
#[command(name = "jointsc", version, about = "Joint edge and triangle learning from signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic signal bundle.
    Synth {
        #[arg(long)]
        n0: usize,
        /// Edge probability of the ground-truth graph.
        #[arg(long, default_value_t = 0.6)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "low_curl")]
        prior: EdgePrior,
        /// Share of feasible triangles kept in the ground truth.
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(long, default_value_t = 100)]
        f0: usize,
        #[arg(long, default_value_t = 100)]
        f1: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score an estimated selection against a ground-truth selection.
    Eval {
        #[arg(long)]
        estimate: PathBuf,
        #[arg(long)]
        truth: PathBuf,
    },
    /// Solve a dumped binary program.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        node_limit: Option<usize>,
        #[arg(long, default_value = "decomposition")]
        engine: String,
    },
    /// Dump the joint program of a synthetic bundle, with ground-truth
    /// cardinality bounds.
    Instance {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, default_value = "curl")]
        measure: TriangleMeasure,
        #[arg(long)]
        out: PathBuf,
    },
}

fn read_selection(path: &Path) -> Result<SelectionRecord> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Synth {
            n0,
            p,
            seed,
            prior,
            fraction,
            f0,
            f1,
            sigma,
            out,
        } => {
            let config = SynthConfig {
                n0,
                er_p: p,
                triangle_fraction: fraction,
                f0,
                f1,
                noise_sigma: sigma,
                seed,
                edge_prior: prior,
                ..SynthConfig::default()
            };
            let bundle = make_bundle(&config)?;
            bundle.save(&out).with_context(|| format!("writing bundle to {}", out.display()))?;
            print_json(&json!({
                "out": out,
                "edges": bundle.truth.n_edges(),
                "triangles": bundle.truth.n_triangles(),
            }))?;
            Ok(0)
        }
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::from_json_file(&config)
                .with_context(|| format!("reading config {}", config.display()))?;
            let report = run_experiment(&cfg)?;
            report.write(&out).with_context(|| format!("writing results to {}", out.display()))?;
            let limited = report.records.iter().filter(|r| r.solver_limit).count();
            print_json(&json!({
                "out": out,
                "records": report.records.len(),
                "solver_limit_records": limited,
            }))?;
            Ok(if limited > 0 { EXIT_SOLVER_LIMIT } else { 0 })
        }
        Command::Eval { estimate, truth } => {
            let est = read_selection(&estimate)?;
            let tru = read_selection(&truth)?;
            let cx = CandidateComplex::new(tru.n0)?;
            let scores = f1_scores(&est.to_selection(&cx)?, &tru.to_selection(&cx)?)?;
            print_json(&serde_json::to_value(scores)?)?;
            Ok(0)
        }
        Command::Solve {
            instance,
            node_limit,
            engine,
        } => {
            let file = File::open(&instance).with_context(|| format!("opening {}", instance.display()))?;
            let inst = blp::read_instance(BufReader::new(file))?;
            let engine = match engine.as_str() {
                "decomposition" => LpEngine::Decomposition,
                "direct" => LpEngine::Direct,
                other => anyhow::bail!("unknown engine `{other}` (decomposition|direct)"),
            };
            let mut opts = SolveOptions {
                engine,
                ..SolveOptions::default()
            };
            if let Some(limit) = node_limit {
                opts.node_limit = limit;
            }
            let sol = blp::solve(&inst, &opts)?;
            let finite = |v: f64| if v.is_finite() { json!(v) } else { json!(null) };
            print_json(&json!({
                "status": sol.status,
                "objective": finite(sol.objective),
                "lower_bound": finite(sol.lower_bound),
                "nodes": sol.nodes_explored,
                "edges": sol.selection.edge_indices(),
                "triangles": sol.selection.triangle_indices(),
            }))?;
            Ok(match sol.status {
                SolveStatus::Optimal => 0,
                SolveStatus::Infeasible => EXIT_INVALID,
                SolveStatus::NodeLimit => EXIT_SOLVER_LIMIT,
            })
        }
        Command::Instance { bundle, measure, out } => {
            let b = SignalBundle::load(&bundle).with_context(|| format!("loading bundle {}", bundle.display()))?;
            let cx = CandidateComplex::new(b.config.n0)?;
            let costs = CostVectors::new(&cx, &b.x0, &b.x1bar, measure)?;
            let inst = build_joint_instance(
                &cx,
                &costs,
                b.truth.n_edges(),
                b.truth.n_triangles(),
                default_alpha(cx.n0()),
            )?;
            let file = File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            let mut w = BufWriter::new(file);
            blp::write_instance(&inst, &mut w)?;
            w.flush()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // clap's own usage-error code (2) is reserved for solver limits here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}
