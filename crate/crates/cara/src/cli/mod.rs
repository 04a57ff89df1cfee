//! Batch front-end: config ingestion, region export, simulation sweeps,
//! analysis-vs-simulation comparison reports and dominance checks.
//!
//! Experiments are described by a JSON config with `system`, `task`, `grid`,
//! `sim` and `output` sections; the `cara` binary loads one, applies flag
//! overrides and executes the task. Datasets are written as RFC-4180 CSV or
//! JSON arrays in deterministic grid order, with a human summary on stdout.
//!
//! ```json
//! {
//!   "task": "compare",
//!   "system": { "two_node": {
//!     "node1": { "pi_good": 0.8, "eps_good": 0.2, "eps_bad": 0.2 },
//!     "node2": { "pi_good": 0.7, "eps_good": 0.2, "eps_bad": 0.2 },
//!     "reception": { "q1_solo": 1.0, "q1_with_bad": 0.2, "q1_with_good": 0.1,
//!                    "q2_solo": 0.9, "q2_with_bad": 0.2, "q2_with_good": 0.1 }
//!   } },
//!   "grid": { "lambda1": { "start": 0.0, "stop": 0.3, "count": 20 },
//!             "lambda2": { "start": 0.0, "stop": 0.3, "count": 20 } },
//!   "sim": { "policy": "cara", "p": { "p1": 0.5, "p2": 0.5 },
//!            "horizon": 500000, "seed": 7 },
//!   "output": { "path": "compare.csv", "format": "csv" }
//! }
//! ```

use crate::analysis::{self, polyline_distance, BoundaryVertex, RatePoint, SegmentKind};
use crate::model::{ArrivalRates, LcqSystemParams, SystemParams, TransmitProbs, ValidationOptions};
use crate::sim::{
    self, ChannelProcessSpec, PolicyKind, SimConfig, SimParams, SimStats, Verdict,
    VerdictThresholds,
};
use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad config file or parameter validation failure. Exits with code 2.
    #[error("{0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Analysis(#[from] analysis::AnalysisError),
    #[error("{0}")]
    Sim(#[from] sim::SimError),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Command-line flags. Everything except `--config` overrides the file.
#[derive(Debug, Clone, Parser)]
#[command(
    name = "cara",
    about = "Stability regions and simulation of channel-aware random access",
    version
)]
pub struct CliArgs {
    /// Path to the JSON experiment config.
    #[arg(long)]
    pub config: PathBuf,
    /// Override the configured task.
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    /// Override the base random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for grid tasks (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Override the output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the output format.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Samples along the curved frontier piece in region exports.
    #[arg(long, default_value_t = 512)]
    pub boundary_samples: usize,
    /// Width of the frontier band excluded from comparison summaries.
    #[arg(long, default_value_t = 0.02)]
    pub band: f64,
}

/// What the run should do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    /// Export the channel-aware closure (at the configured and at zero error
    /// rates), the no-CSI baseline and the two-node scheduler frontiers.
    Region,
    /// Export only the no-CSI baseline frontier.
    AlohaRegion,
    /// Export only the two-node scheduler frontier.
    LcqRegion,
    /// One simulation run.
    Simulate,
    /// Simulated verdicts over an arrival-rate grid.
    Sweep,
    /// Sweep plus analytic membership and an agreement summary.
    Compare,
    /// Coupled dominance checks across seeds.
    DominanceCheck,
}

/// System parameters: either the two-node model or the N-node scheduler one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSection {
    TwoNode(SystemParams),
    Lcq(LcqSystemParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    /// Number of grid points; zero yields an empty grid.
    pub count: u32,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }

    fn validate(&self, name: &str) -> Result<(), CliError> {
        if !(0.0..=1.0).contains(&self.start)
            || !(0.0..=1.0).contains(&self.stop)
            || self.start > self.stop
        {
            return Err(config_err(format!(
                "grid.{name}: range [{}, {}] must satisfy 0 <= start <= stop <= 1",
                self.start, self.stop
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lambda1: AxisSpec,
    pub lambda2: AxisSpec,
}

impl GridSpec {
    /// All grid points in deterministic order: lambda1 outer, lambda2 inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let l2 = self.lambda2.values();
        self.lambda1
            .values()
            .into_iter()
            .flat_map(|a| l2.iter().map(move |&b| (a, b)))
            .collect()
    }
}

/// Simulation settings shared by the sim-driven tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub policy: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<TransmitProbs>,
    /// Per-node arrival rates; grid tasks take rates from the grid instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    pub horizon: u64,
    /// Defaults to 1% of the horizon.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warmup: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    /// Explicit seed list for multi-seed tasks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    /// Alternative to `seeds`: use `seed, seed+1, ..`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelProcessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub queue_cap: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<VerdictThresholds>,
    /// Debug switch: sever the shared streams in dominance checks so the
    /// violation detector has something to find.
    #[serde(default)]
    pub decouple: bool,
}

impl SimSection {
    fn seed_list(&self) -> Vec<u64> {
        if let Some(seeds) = &self.seeds {
            seeds.clone()
        } else if let Some(count) = self.seed_count {
            (0..count as u64).map(|i| self.seed.wrapping_add(i)).collect()
        } else {
            vec![self.seed]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    pub format: OutputFormat,
}

/// A parsed experiment. Serializing and re-parsing yields an identical value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub task: Task,
    pub system: SystemSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Accept reception probabilities that only weakly obey the ordering
    /// chain, for degenerate experiments.
    #[serde(default)]
    pub allow_degenerate: bool,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| config_err(format!("config parse error: {e}")))
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialization cannot fail")
    }

    /// Validate the parameter sections; task-specific requirements are
    /// checked when the task runs.
    pub fn validate(&self) -> Result<(), CliError> {
        let opts = ValidationOptions { allow_degenerate: self.allow_degenerate };
        let report = match &self.system {
            SystemSection::TwoNode(params) => crate::model::validate(params, &opts),
            SystemSection::Lcq(params) => params.validate(),
        };
        if !report.is_ok() {
            return Err(config_err(format!("invalid system parameters:\n{report}")));
        }
        if let Some(grid) = &self.grid {
            grid.lambda1.validate("lambda1")?;
            grid.lambda2.validate("lambda2")?;
        }
        Ok(())
    }

    fn two_node(&self) -> Result<&SystemParams, CliError> {
        match &self.system {
            SystemSection::TwoNode(params) => Ok(params),
            SystemSection::Lcq(_) => Err(config_err("this task needs a two_node system section")),
        }
    }

    fn scheduler_params(&self) -> Result<LcqSystemParams, CliError> {
        match &self.system {
            SystemSection::TwoNode(params) => Ok(params.scheduler_view()),
            SystemSection::Lcq(params) => Ok(params.clone()),
        }
    }

    fn sim_section(&self) -> Result<&SimSection, CliError> {
        self.sim.as_ref().ok_or_else(|| config_err("this task needs a sim section"))
    }

    fn grid_section(&self) -> Result<&GridSpec, CliError> {
        self.grid.as_ref().ok_or_else(|| config_err("this task needs a grid section"))
    }

    fn output_section(&self) -> Result<&OutputSpec, CliError> {
        self.output
            .as_ref()
            .ok_or_else(|| config_err("this task writes a dataset and needs an output section"))
    }

    /// Assemble a [`SimConfig`] for the given arrival rates. A two-node
    /// system with the scheduler policy is projected onto scheduler params.
    pub fn sim_config(&self, rates: Vec<f64>) -> Result<SimConfig, CliError> {
        let section = self.sim_section()?;
        let params = match (&self.system, section.policy) {
            (_, PolicyKind::Lcq) => SimParams::Lcq(self.scheduler_params()?),
            (SystemSection::TwoNode(params), _) => SimParams::TwoNode(*params),
            (SystemSection::Lcq(_), policy) => {
                return Err(config_err(format!(
                    "policy {policy:?} needs a two_node system section"
                )));
            }
        };
        let horizon = section.horizon;
        let config = SimConfig {
            params,
            policy: section.policy,
            p: section.p.unwrap_or(TransmitProbs { p1: 0.0, p2: 0.0 }),
            rates,
            channel: section.channel.clone().unwrap_or(ChannelProcessSpec::IidStationary),
            horizon,
            warmup: section.warmup.unwrap_or(horizon / 100),
            seed: section.seed,
            queue_cap: section.queue_cap.unwrap_or(sim::DEFAULT_QUEUE_CAP),
            thresholds: section.thresholds.unwrap_or_default(),
        };
        config.validate().map_err(|e| config_err(e.to_string()))?;
        Ok(config)
    }
}

/// Runtime knobs that come from flags rather than the config file.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub boundary_samples: usize,
    pub band: f64,
    pub workers: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { boundary_samples: 512, band: 0.02, workers: None }
    }
}

/// Entry point used by the binary: load, override, validate, dispatch.
pub fn run_cli(args: &CliArgs) -> Result<(), CliError> {
    let mut config = ExperimentConfig::from_path(&args.config)?;
    apply_overrides(&mut config, args);
    config.validate()?;
    let opts = RunOptions {
        boundary_samples: args.boundary_samples,
        band: args.band,
        workers: args.workers,
    };
    execute(&config, &opts, &mut std::io::stdout())
}

fn apply_overrides(config: &mut ExperimentConfig, args: &CliArgs) {
    if let Some(task) = args.task {
        config.task = task;
    }
    if let Some(seed) = args.seed {
        if let Some(sim) = config.sim.as_mut() {
            sim.seed = seed;
        }
    }
    if let Some(out) = &args.out {
        match config.output.as_mut() {
            Some(output) => output.path = out.clone(),
            None => {
                config.output = Some(OutputSpec {
                    path: out.clone(),
                    format: args.format.unwrap_or(OutputFormat::Csv),
                })
            }
        }
    }
    if let Some(format) = args.format {
        if let Some(output) = config.output.as_mut() {
            output.format = format;
        }
    }
}

/// Run a task, writing the summary to `summary` (stdout in the binary).
pub fn execute(
    config: &ExperimentConfig,
    opts: &RunOptions,
    summary: &mut dyn Write,
) -> Result<(), CliError> {
    match config.task {
        Task::Region => cmd_region(config, opts, summary),
        Task::AlohaRegion => cmd_aloha_region(config, opts, summary),
        Task::LcqRegion => cmd_lcq_region(config, summary),
        Task::Simulate => cmd_simulate(config, summary),
        Task::Sweep => cmd_sweep(config, opts, summary),
        Task::Compare => cmd_compare(config, opts, summary),
        Task::DominanceCheck => cmd_dominance(config, summary),
    }
}

// ---------------------------------------------------------------------------
// Region export
// ---------------------------------------------------------------------------

/// One frontier vertex row. Column order is part of the file format.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryRow {
    pub segment_tag: SegmentKind,
    pub lambda1: f64,
    pub lambda2: f64,
    pub region_label: String,
}

fn boundary_rows(label: &str, vertices: &[BoundaryVertex]) -> Vec<BoundaryRow> {
    vertices
        .iter()
        .map(|v| BoundaryRow {
            segment_tag: v.segment,
            lambda1: v.lambda1,
            lambda2: v.lambda2,
            region_label: label.to_string(),
        })
        .collect()
}

fn cmd_region(
    config: &ExperimentConfig,
    opts: &RunOptions,
    summary: &mut dyn Write,
) -> Result<(), CliError> {
    let params = config.two_node()?;
    let n = opts.boundary_samples;
    let mut rows = Vec::new();

    let eps = analysis::closure_boundary(params);
    rows.extend(boundary_rows("cara_eps", &eps.sample(n)));
    let perfect = analysis::closure_boundary(&params.with_perfect_csi());
    rows.extend(boundary_rows("cara_perfect", &perfect.sample(n)));
    let aloha = analysis::aloha_boundary(params)?;
    rows.extend(boundary_rows("aloha", &aloha.sample(n)));
    let lcq = analysis::lcq_two_node_vertices(&params.scheduler_view())?;
    rows.extend(boundary_rows("lcq", &lcq));

    write_rows(&rows, config.output_section()?)?;
    writeln!(summary, "shape: {:?}", analysis::classify_shape(params))?;
    for (label, boundary) in [("cara_eps", &eps), ("cara_perfect", &perfect), ("aloha", &aloha)] {
        writeln!(
            summary,
            "{label}: PX=({:.6}, 0) PY=(0, {:.6}) {}",
            boundary.p_x.lambda1,
            boundary.p_y.lambda2,
            shape_note(boundary)
        )?;
    }
    writeln!(summary, "wrote {} vertices", rows.len())?;
    Ok(())
}

fn shape_note(boundary: &analysis::RegionBoundary) -> String {
    match boundary.shape {
        analysis::BoundaryShape::CurvedThreeSegment { p1, p2 } => format!(
            "curve from ({:.6}, {:.6}) to ({:.6}, {:.6})",
            p1.lambda1, p1.lambda2, p2.lambda1, p2.lambda2
        ),
        analysis::BoundaryShape::TwoLine { p3 } => {
            format!("corner at ({:.6}, {:.6})", p3.lambda1, p3.lambda2)
        }
    }
}

fn cmd_aloha_region(
    config: &ExperimentConfig,
    opts: &RunOptions,
    summary: &mut dyn Write,
) -> Result<(), CliError> {
    let params = config.two_node()?;
    let boundary = analysis::aloha_boundary(params)?;
    let rows = boundary_rows("aloha", &boundary.sample(opts.boundary_samples));
    write_rows(&rows, config.output_section()?)?;
    writeln!(summary, "aloha: {}, {} vertices", shape_note(&boundary), rows.len())?;
    Ok(())
}

fn cmd_lcq_region(config: &ExperimentConfig, summary: &mut dyn Write) -> Result<(), CliError> {
    let params = config.scheduler_params()?;
    let rows = boundary_rows("lcq", &analysis::lcq_two_node_vertices(&params)?);
    write_rows(&rows, config.output_section()?)?;
    writeln!(summary, "lcq: {} vertices", rows.len())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Simulation tasks
// ---------------------------------------------------------------------------

/// Per-node stats row for simulate output.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateRow {
    pub node: usize,
    pub arrival_rate: f64,
    pub service_rate: f64,
    pub empty_fraction: f64,
    pub mean_queue: f64,
    pub queue_slope: f64,
    pub verdict: Verdict,
    pub arrivals: u64,
    pub departures: u64,
    pub final_queue: u64,
}

fn simulate_rows(stats: &SimStats) -> Vec<SimulateRow> {
    stats
        .nodes
        .iter()
        .enumerate()
        .map(|(i, n)| SimulateRow {
            node: i + 1,
            arrival_rate: n.arrival_rate,
            service_rate: n.service_rate,
            empty_fraction: n.empty_fraction,
            mean_queue: n.mean_queue,
            queue_slope: n.queue_slope,
            verdict: n.verdict,
            arrivals: n.arrivals,
            departures: n.departures,
            final_queue: n.final_queue,
        })
        .collect()
}

fn cmd_simulate(config: &ExperimentConfig, summary: &mut dyn Write) -> Result<(), CliError> {
    let section = config.sim_section()?;
    let rates =
        section.rates.clone().ok_or_else(|| config_err("simulate needs sim.rates"))?;
    let sim_config = config.sim_config(rates)?;
    let stats = sim::run(&sim_config)?;
    if let Some(output) = &config.output {
        match output.format {
            OutputFormat::Csv => write_rows(&simulate_rows(&stats), output)?,
            OutputFormat::Json => write_json(&stats, &output.path)?,
        }
    }
    for (i, node) in stats.nodes.iter().enumerate() {
        writeln!(
            summary,
            "node {}: arrivals/slot {:.5} service {:.5} empty {:.4} slope {:+.3e} -> {:?}",
            i + 1,
            node.arrival_rate,
            node.service_rate,
            node.empty_fraction,
            node.queue_slope,
            node.verdict
        )?;
    }
    if let Some(hit) = stats.cap_hit {
        writeln!(summary, "queue cap hit by node {} at slot {}", hit.node + 1, hit.slot)?;
    }
    writeln!(summary, "verdict: {:?}", stats.verdict)?;
    Ok(())
}

/// Per-grid-point row for sweep output.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda1: f64,
    pub lambda2: f64,
    pub verdict: Verdict,
    pub service_rate_1: f64,
    pub service_rate_2: f64,
    pub queue_slope_1: f64,
    pub queue_slope_2: f64,
    pub empty_fraction_1: f64,
    pub empty_fraction_2: f64,
}

fn in_worker_pool<T: Send>(
    workers: Option<usize>,
    job: impl FnOnce() -> T + Send,
) -> Result<T, CliError> {
    match workers {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| config_err(format!("worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Grid points paired with per-point run outcomes, in grid order.
type GridOutcomes = (Vec<(f64, f64)>, Vec<Result<SimStats, CliError>>);

fn run_grid(config: &ExperimentConfig, opts: &RunOptions) -> Result<GridOutcomes, CliError> {
    use rayon::prelude::*;
    let points = config.grid_section()?.points();
    if !points.is_empty() {
        // Surface config errors once before fanning out.
        config.sim_config(vec![points[0].0, points[0].1])?;
    }
    let results = in_worker_pool(opts.workers, || {
        points
            .par_iter()
            .map(|&(l1, l2)| {
                let sim_config = config.sim_config(vec![l1, l2])?;
                Ok(sim::run(&sim_config)?)
            })
            .collect::<Vec<Result<SimStats, CliError>>>()
    })?;
    Ok((points, results))
}

fn cmd_sweep(
    config: &ExperimentConfig,
    opts: &RunOptions,
    summary: &mut dyn Write,
) -> Result<(), CliError> {
    let (points, results) = run_grid(config, opts)?;
    let mut rows = Vec::with_capacity(points.len());
    let mut counts = [0usize; 3];
    for (&(l1, l2), result) in points.iter().zip(results) {
        let stats = result?;
        counts[verdict_index(stats.verdict)] += 1;
        rows.push(SweepRow {
            lambda1: l1,
            lambda2: l2,
            verdict: stats.verdict,
            service_rate_1: stats.nodes[0].service_rate,
            service_rate_2: stats.nodes[1].service_rate,
            queue_slope_1: stats.nodes[0].queue_slope,
            queue_slope_2: stats.nodes[1].queue_slope,
            empty_fraction_1: stats.nodes[0].empty_fraction,
            empty_fraction_2: stats.nodes[1].empty_fraction,
        });
    }
    write_rows(&rows, config.output_section()?)?;
    writeln!(
        summary,
        "{} points: {} stable, {} unstable, {} inconclusive",
        rows.len(),
        counts[0],
        counts[1],
        counts[2]
    )?;
    Ok(())
}

fn verdict_index(v: Verdict) -> usize {
    match v {
        Verdict::Stable => 0,
        Verdict::Unstable => 1,
        Verdict::Inconclusive => 2,
    }
}

/// Per-grid-point row for compare output.
#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Fixed-`p` membership (the analytic ground truth being validated).
    pub analytic_stable: bool,
    /// Closure membership at the configured error rates, for context.
    pub closure_stable: bool,
    pub verdict: Verdict,
    /// Euclidean distance to the fixed-`p` frontier.
    pub frontier_distance: f64,
    pub in_band: bool,
    pub agree: bool,
}

fn cmd_compare(
    config: &ExperimentConfig,
    opts: &RunOptions,
    summary: &mut dyn Write,
) -> Result<(), CliError> {
    let params = *config.two_node()?;
    let section = config.sim_section()?;
    if section.policy != PolicyKind::Cara {
        return Err(config_err(
            "compare validates the channel-aware policy; set sim.policy = \"cara\"",
        ));
    }
    let p = section.p.ok_or_else(|| config_err("compare needs sim.p"))?;
    let frontier: Vec<RatePoint> = analysis::fixed_p_frontier_vertices(&params, p).to_vec();

    let (points, results) = run_grid(config, opts)?;
    let mut rows = Vec::with_capacity(points.len());
    let mut agree = 0usize;
    let mut judged = 0usize;
    let mut failures = 0usize;
    for (&(l1, l2), result) in points.iter().zip(results) {
        let rates = ArrivalRates::new(l1, l2);
        let analytic = analysis::fixed_p_region_contains(&params, p, rates);
        let point = RatePoint::new(l1, l2);
        let distance = polyline_distance(&frontier, point);
        let in_band = distance < opts.band;
        let (verdict, ok) = match result {
            Ok(stats) => (stats.verdict, true),
            Err(_) => (Verdict::Inconclusive, false),
        };
        if !ok {
            failures += 1;
        }
        let agrees = (analytic && verdict == Verdict::Stable)
            || (!analytic && verdict == Verdict::Unstable);
        if !in_band && ok {
            judged += 1;
            agree += agrees as usize;
        }
        rows.push(CompareRow {
            lambda1: l1,
            lambda2: l2,
            analytic_stable: analytic,
            closure_stable: analysis::closure_region_contains(&params, rates),
            verdict,
            frontier_distance: distance,
            in_band,
            agree: agrees,
        });
    }
    write_rows(&rows, config.output_section()?)?;
    let rate = if judged > 0 { agree as f64 / judged as f64 } else { 1.0 };
    writeln!(
        summary,
        "agreement {:.1}% ({agree}/{judged} points outside a {}-wide band; {} in band; {failures} run failures)",
        100.0 * rate,
        opts.band,
        rows.len() - judged - failures,
    )?;
    Ok(())
}

/// Per-seed row for dominance-check output.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceRow {
    pub seed: u64,
    pub holds: bool,
    pub max_gap: u64,
    pub violation_slot: Option<u64>,
    pub violation_node: Option<usize>,
}

fn cmd_dominance(config: &ExperimentConfig, summary: &mut dyn Write) -> Result<(), CliError> {
    let section = config.sim_section()?;
    let rates =
        section.rates.clone().ok_or_else(|| config_err("dominance-check needs sim.rates"))?;
    let dominant_policy = match section.policy {
        PolicyKind::CaraDominant { node } => PolicyKind::CaraDominant { node },
        PolicyKind::Cara => PolicyKind::CaraDominant { node: 2 },
        other => {
            return Err(config_err(format!(
                "dominance-check couples the channel-aware policy with its dummy-packet variant, not {other:?}"
            )));
        }
    };

    let mut rows = Vec::new();
    let mut all_hold = true;
    let mut equality = true;
    for seed in section.seed_list() {
        let mut original = config.sim_config(rates.clone())?;
        original.policy = PolicyKind::Cara;
        original.seed = seed;
        let mut dominant = original.clone();
        dominant.policy = dominant_policy;
        let report = sim::run_coupled_dominance(&original, &dominant, section.decouple)?;
        all_hold &= report.holds;
        equality &= report.max_gap == 0;
        writeln!(
            summary,
            "seed {seed}: {} (max gap {}){}",
            if report.holds { "dominance held" } else { "VIOLATION" },
            report.max_gap,
            report
                .first_violation
                .map(|v| format!(
                    " first at slot {} node {} ({} < {})",
                    v.slot, v.node, v.dominant, v.original
                ))
                .unwrap_or_default()
        )?;
        rows.push(DominanceRow {
            seed,
            holds: report.holds,
            max_gap: report.max_gap,
            violation_slot: report.first_violation.map(|v| v.slot),
            violation_node: report.first_violation.map(|v| v.node),
        });
    }
    if let Some(output) = &config.output {
        write_rows(&rows, output)?;
    }
    let note = if equality { " (trajectories identical)" } else { "" };
    writeln!(
        summary,
        "{}/{} seeds passed{note}",
        rows.iter().filter(|r| r.holds).count(),
        rows.len()
    )?;
    if section.decouple {
        writeln!(summary, "streams were deliberately decoupled")?;
    } else if !all_hold {
        writeln!(summary, "WARNING: coupled dominance violated; this indicates a bug")?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Output writers
// ---------------------------------------------------------------------------

fn write_rows<T: Serialize>(rows: &[T], output: &OutputSpec) -> Result<(), CliError> {
    match output.format {
        OutputFormat::Csv => {
            let mut writer = csv::Writer::from_path(&output.path)?;
            for row in rows {
                writer.serialize(row)?;
            }
            writer.flush()?;
            Ok(())
        }
        OutputFormat::Json => write_json(&rows, &output.path),
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<(), CliError> {
    let file = fs::File::create(path)?;
    serde_json::to_writer_pretty(&file, value)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    fn sample_config() -> ExperimentConfig {
        ExperimentConfig {
            task: Task::Region,
            system: SystemSection::TwoNode(presets::nonconvex()),
            grid: Some(GridSpec {
                lambda1: AxisSpec { start: 0.0, stop: 0.3, count: 4 },
                lambda2: AxisSpec { start: 0.0, stop: 0.3, count: 4 },
            }),
            sim: Some(SimSection {
                policy: PolicyKind::Cara,
                p: Some(TransmitProbs { p1: 0.5, p2: 0.5 }),
                rates: Some(vec![0.1, 0.05]),
                horizon: 10_000,
                warmup: None,
                seed: 7,
                seeds: None,
                seed_count: None,
                channel: None,
                queue_cap: None,
                thresholds: None,
                decouple: false,
            }),
            output: None,
            allow_degenerate: false,
        }
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = sample_config();
        let text = config.to_json_string();
        let reparsed = ExperimentConfig::from_json_str(&text).unwrap();
        assert_eq!(config, reparsed);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let mut value: serde_json::Value =
            serde_json::from_str(&sample_config().to_json_string()).unwrap();
        value["grid"]["lambda1"]["step"] = serde_json::json!(0.1);
        let err = ExperimentConfig::from_json_str(&value.to_string()).unwrap_err();
        assert!(matches!(err, CliError::Config(_)));
    }

    #[test]
    fn axis_values_cover_range() {
        let axis = AxisSpec { start: 0.0, stop: 0.3, count: 4 };
        let values = axis.values();
        assert_eq!(values.len(), 4);
        assert_eq!(values[0], 0.0);
        assert_eq!(values[3], 0.3);
        assert!(AxisSpec { start: 0.0, stop: 0.0, count: 0 }.values().is_empty());
        assert_eq!(AxisSpec { start: 0.2, stop: 0.9, count: 1 }.values(), vec![0.2]);
    }

    #[test]
    fn grid_points_are_ordered() {
        let grid = GridSpec {
            lambda1: AxisSpec { start: 0.0, stop: 1.0, count: 2 },
            lambda2: AxisSpec { start: 0.0, stop: 1.0, count: 2 },
        };
        assert_eq!(grid.points(), vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)]);
    }

    #[test]
    fn invalid_params_fail_validation() {
        let mut config = sample_config();
        let SystemSection::TwoNode(params) = &mut config.system else { unreachable!() };
        params.node1.pi_good = 1.7;
        let err = config.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn grid_range_checked() {
        let mut config = sample_config();
        config.grid.as_mut().unwrap().lambda1.stop = 1.4;
        assert!(config.validate().is_err());
    }

    #[test]
    fn seed_list_variants() {
        let mut section = sample_config().sim.unwrap();
        assert_eq!(section.seed_list(), vec![7]);
        section.seed_count = Some(3);
        assert_eq!(section.seed_list(), vec![7, 8, 9]);
        section.seeds = Some(vec![4, 2]);
        assert_eq!(section.seed_list(), vec![4, 2]);
    }

    #[test]
    fn lcq_policy_projects_two_node_params() {
        let mut config = sample_config();
        let section = config.sim.as_mut().unwrap();
        section.policy = PolicyKind::Lcq;
        let sim_config = config.sim_config(vec![0.1, 0.1]).unwrap();
        assert!(matches!(sim_config.params, SimParams::Lcq(ref p) if p.len() == 2));
    }
}
