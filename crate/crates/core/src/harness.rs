//! Experiment orchestration: rho sweeps, network suites and CSV output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::algorithms::{
    comm_steps_total, d_admm, metropolis_weights, mm_gauss_seidel, subgradient, zhu_admm, AlgorithmError,
    InnerRule, NodeProblem, RunTrace, StepSchedule, StopRule,
};
use crate::graph::{greedy_color, Coloring, Graph, GraphError, NetworkModel};
use crate::problems::{
    gen_gaussian_cs, gen_partial_dct_cs, gen_separable_svm, BpdnInstance, ConsensusInstance, CsData, Instance,
    LassoInstance, ProblemError, SvmInstance,
};
use crate::solvers::SolverError;

pub const RHO_GRID: [f64; 7] = [1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2];
pub const DEFAULT_TOLERANCE: f64 = 1e-4;
pub const DEFAULT_MAX_STEPS: usize = 1000;
pub const SVM_MAX_STEPS: usize = 10_000;
pub const SUMMARY_HEADER: &str = "network,algorithm,rho,steps,final_rel_error,messages";

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("nothing to run")]
    NothingToRun,
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
}

impl HarnessError {
    /// Whether the failure comes from user input rather than from running.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            HarnessError::Config(_)
                | HarnessError::NothingToRun
                | HarnessError::Problem(ProblemError::InvalidParameter(_) | ProblemError::Parse(_))
                | HarnessError::Graph(GraphError::InvalidParameter(_) | GraphError::Parse(_))
        )
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.to_path_buf(), source }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "d-admm")]
    DAdmm,
    #[serde(rename = "zhu")]
    Zhu,
    #[serde(rename = "mm-ngs")]
    MmNgs,
    #[serde(rename = "subgradient")]
    Subgradient,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::DAdmm, Algorithm::Zhu, Algorithm::MmNgs, Algorithm::Subgradient];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::DAdmm => "d-admm",
            Algorithm::Zhu => "zhu",
            Algorithm::MmNgs => "mm-ngs",
            Algorithm::Subgradient => "subgradient",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }
}

// ---------------------------------------------------------------- config

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    /// Benchmark network `1..=7`; alternative to `model`.
    pub number: Option<usize>,
    /// `erdos-renyi`, `watts-strogatz`, `barabasi-albert`, `geometric` or `lattice`.
    pub model: Option<String>,
    pub nodes: usize,
    #[serde(default)]
    pub seed: u64,
    pub p: Option<f64>,
    pub neighbors: Option<usize>,
    pub radius: Option<f64>,
}

impl NetworkSpec {
    pub fn numbered(number: usize, nodes: usize, seed: u64) -> Self {
        Self { number: Some(number), model: None, nodes, seed, p: None, neighbors: None, radius: None }
    }

    pub fn resolve(&self) -> Result<NetworkModel, HarnessError> {
        match (self.number, self.model.as_deref()) {
            (Some(n), None) => NetworkModel::numbered(n)
                .ok_or_else(|| HarnessError::Config(format!("network number {n} not in 1..=7"))),
            (None, Some(name)) => model_from_name(name, self.p, self.neighbors, self.radius),
            (Some(_), Some(_)) => Err(HarnessError::Config("give either network.number or network.model".into())),
            (None, None) => Err(HarnessError::Config("network.number or network.model is required".into())),
        }
    }

    /// Label used in file names and the summary's `network` column.
    pub fn label(&self) -> Result<String, HarnessError> {
        let model = model_label(&self.resolve()?);
        Ok(match self.number {
            Some(n) => format!("{n}-{model}"),
            None => model,
        })
    }

    pub fn build(&self) -> Result<(Graph, Coloring), HarnessError> {
        let g = self.resolve()?.generate(self.nodes, self.seed)?;
        let col = greedy_color(&g);
        Ok((g, col))
    }
}

/// Model from its name, with the benchmark defaults for missing parameters.
pub fn model_from_name(
    name: &str,
    p: Option<f64>,
    neighbors: Option<usize>,
    radius: Option<f64>,
) -> Result<NetworkModel, HarnessError> {
    let unused = |what: &str, present: bool| {
        if present {
            Err(HarnessError::Config(format!("parameter '{what}' does not apply to {name}")))
        } else {
            Ok(())
        }
    };
    Ok(match name {
        "erdos-renyi" => {
            unused("neighbors", neighbors.is_some())?;
            unused("radius", radius.is_some())?;
            NetworkModel::ErdosRenyi { p: p.unwrap_or(0.25) }
        }
        "watts-strogatz" => {
            unused("radius", radius.is_some())?;
            NetworkModel::WattsStrogatz { neighbors: neighbors.unwrap_or(2), p: p.unwrap_or(0.8) }
        }
        "barabasi-albert" | "lattice" => {
            unused("p", p.is_some())?;
            unused("neighbors", neighbors.is_some())?;
            unused("radius", radius.is_some())?;
            if name == "lattice" {
                NetworkModel::Lattice
            } else {
                NetworkModel::BarabasiAlbert
            }
        }
        "geometric" => {
            unused("p", p.is_some())?;
            unused("neighbors", neighbors.is_some())?;
            NetworkModel::Geometric { radius: radius.unwrap_or(0.2) }
        }
        other => return Err(HarnessError::Config(format!("unknown network model '{other}'"))),
    })
}

pub fn model_label(model: &NetworkModel) -> String {
    match *model {
        NetworkModel::ErdosRenyi { p } => format!("erdos-renyi-p{p}"),
        NetworkModel::WattsStrogatz { neighbors, p } => format!("watts-strogatz-n{neighbors}-p{p}"),
        NetworkModel::BarabasiAlbert => "barabasi-albert".into(),
        NetworkModel::Geometric { radius } => format!("geometric-d{radius}"),
        NetworkModel::Lattice => "lattice".into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Consensus,
    Bpdn,
    Lasso,
    Svm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Gaussian,
    Dct,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub family: Family,
    #[serde(default = "one")]
    pub seed: u64,
    pub matrix: Option<MatrixKind>,
    pub rows: Option<usize>,
    pub cols: Option<usize>,
    pub sparsity: Option<usize>,
    pub noise_std: Option<f64>,
    pub beta: Option<f64>,
    pub sigma: Option<f64>,
    pub delta: Option<f64>,
    pub points: Option<usize>,
    pub features: Option<usize>,
    pub margin: Option<f64>,
}

fn one() -> u64 {
    1
}

impl ProblemSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        Self {
            family,
            seed,
            matrix: None,
            rows: None,
            cols: None,
            sparsity: None,
            noise_std: None,
            beta: None,
            sigma: None,
            delta: None,
            points: None,
            features: None,
            margin: None,
        }
    }

    /// Builds the instance for `nodes` nodes. Compressed-sensing defaults:
    /// BPDN uses a 60x256 Gaussian matrix with beta = 1, LASSO a 50x250
    /// partial DCT with sigma = 0.1 and delta = 1e-3; both use 5 nonzeros and
    /// noise with standard deviation `sigma / sqrt(rows)` (sigma = 0.5 for
    /// Gaussian, 0.1 for DCT). SVM defaults to 100 points, 4 features, margin 1.
    pub fn build(&self, nodes: usize) -> Result<Instance, HarnessError> {
        let cs = |default: MatrixKind| -> Result<(CsData, f64), HarnessError> {
            let kind = self.matrix.unwrap_or(default);
            let (rows, cols, sigma) = match kind {
                MatrixKind::Gaussian => (60, 256, 0.5),
                MatrixKind::Dct => (50, 250, 0.1),
            };
            let rows = self.rows.unwrap_or(rows);
            let cols = self.cols.unwrap_or(cols);
            let sigma = self.sigma.unwrap_or(sigma);
            let k = self.sparsity.unwrap_or(5);
            let noise = self.noise_std.unwrap_or(sigma / (rows as f64).sqrt());
            let data = match kind {
                MatrixKind::Gaussian => gen_gaussian_cs(rows, cols, k, noise, self.seed)?,
                MatrixKind::Dct => gen_partial_dct_cs(rows, cols, k, noise, self.seed)?,
            };
            Ok((data, sigma))
        };
        Ok(match self.family {
            Family::Consensus => Instance::Consensus(ConsensusInstance::generate(nodes, self.seed)),
            Family::Bpdn => {
                let (d, _) = cs(MatrixKind::Gaussian)?;
                let beta = self.beta.unwrap_or(match self.matrix.unwrap_or(MatrixKind::Gaussian) {
                    MatrixKind::Gaussian => 1.0,
                    MatrixKind::Dct => 0.3,
                });
                Instance::Bpdn(BpdnInstance::new(d.a, d.b, beta, nodes)?)
            }
            Family::Lasso => {
                let (d, sigma) = cs(MatrixKind::Dct)?;
                Instance::Lasso(LassoInstance::new(d.a, d.b, sigma, self.delta.unwrap_or(1e-3), nodes)?)
            }
            Family::Svm => {
                let data = gen_separable_svm(
                    self.points.unwrap_or(100),
                    self.features.unwrap_or(4),
                    self.margin.unwrap_or(1.0),
                    self.seed,
                )?;
                Instance::Svm(SvmInstance::new(data, nodes)?)
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub algorithms: Vec<Algorithm>,
    #[serde(default = "default_grid")]
    pub rho: Vec<f64>,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub max_steps: Option<usize>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_grid() -> Vec<f64> {
    RHO_GRID.to_vec()
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSpec,
    pub problem: ProblemSpec,
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.run.rho.is_empty() || self.run.rho.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(HarnessError::Config("rho grid must be nonempty and positive".into()));
        }
        if !(self.run.tolerance > 0.0 && self.run.tolerance < 1.0) {
            return Err(HarnessError::Config(format!("tolerance {} not in (0, 1)", self.run.tolerance)));
        }
        if self.run.max_steps == Some(0) {
            return Err(HarnessError::Config("max_steps must be at least 1".into()));
        }
        self.network.resolve()?;
        Ok(())
    }

    pub fn max_steps(&self) -> usize {
        self.run.max_steps.unwrap_or(match self.problem.family {
            Family::Svm => SVM_MAX_STEPS,
            _ => DEFAULT_MAX_STEPS,
        })
    }
}

// ---------------------------------------------------------------- running

/// Outcome of one `(algorithm, rho)` cell.
#[derive(Clone, Debug)]
pub struct CellResult {
    pub algorithm: Algorithm,
    pub rho: f64,
    pub steps: usize,
    pub final_rel_error: f64,
    pub messages: usize,
    pub reached: bool,
    pub error: Option<String>,
    pub trace: Option<RunTrace>,
}

#[derive(Clone, Debug)]
pub struct BestCell {
    pub algorithm: Algorithm,
    pub rho: f64,
    pub steps: usize,
    pub messages: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub network: String,
    pub edges: usize,
    pub max_steps: usize,
    /// Sorted by `(algorithm, rho)`.
    pub cells: Vec<CellResult>,
}

impl ExperimentResult {
    /// Fewest steps among cells that reached the tolerance; ties go to the
    /// smaller rho.
    pub fn best(&self, algorithm: Algorithm) -> Option<BestCell> {
        self.cells
            .iter()
            .filter(|c| c.algorithm == algorithm && c.reached)
            .min_by(|a, b| a.steps.cmp(&b.steps).then(a.rho.total_cmp(&b.rho)))
            .map(|c| BestCell { algorithm, rho: c.rho, steps: c.steps, messages: c.messages })
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        let mut algs: Vec<Algorithm> = self.cells.iter().map(|c| c.algorithm).collect();
        algs.dedup();
        algs
    }
}

/// Shared pieces of one experiment: topology, node problems and reference.
pub struct Setup {
    pub label: String,
    pub graph: Graph,
    pub coloring: Coloring,
    pub nodes: Vec<Box<dyn NodeProblem>>,
    pub reference: DVector<f64>,
}

impl Setup {
    pub fn new(label: String, graph: Graph, instance: &Instance) -> Result<Self, HarnessError> {
        if instance.node_count() != graph.node_count() {
            return Err(HarnessError::Config(format!(
                "instance has {} nodes, network has {}",
                instance.node_count(),
                graph.node_count()
            )));
        }
        let coloring = greedy_color(&graph);
        Ok(Self { label, coloring, nodes: instance.nodes(), reference: instance.reference()?, graph })
    }

    /// Runs one cell; for the subgradient method `rho` is the initial step size.
    pub fn run_cell(&self, algorithm: Algorithm, rho: f64, stop: &StopRule) -> Result<RunTrace, AlgorithmError> {
        let nodes = &self.nodes;
        match algorithm {
            Algorithm::DAdmm => d_admm(nodes, &self.graph, &self.coloring, rho, stop),
            Algorithm::Zhu => zhu_admm(nodes, &self.graph, rho, stop),
            Algorithm::MmNgs => mm_gauss_seidel(nodes, &self.graph, &self.coloring, rho, InnerRule::default(), stop),
            Algorithm::Subgradient => {
                let w = metropolis_weights(&self.graph);
                subgradient(nodes, &self.graph, &w, StepSchedule::InverseSqrt(rho), stop)
            }
        }
    }

    /// Runs every `(algorithm, rho)` cell. Cell failures are recorded, not
    /// propagated.
    pub fn sweep(&self, algorithms: &[Algorithm], grid: &[f64], tolerance: f64, max_steps: usize) -> Result<ExperimentResult, HarnessError> {
        if algorithms.is_empty() {
            return Err(HarnessError::NothingToRun);
        }
        let stop = StopRule::new(self.reference.clone(), tolerance, max_steps)?;
        let mut jobs: Vec<(Algorithm, f64)> =
            algorithms.iter().flat_map(|&a| grid.iter().map(move |&r| (a, r))).collect();
        jobs.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        jobs.dedup();
        let edges = self.graph.edge_count();
        let cells = jobs
            .into_par_iter()
            .map(|(algorithm, rho)| match self.run_cell(algorithm, rho, &stop) {
                Ok(trace) => CellResult {
                    algorithm,
                    rho,
                    steps: trace.steps(),
                    final_rel_error: trace.final_error(),
                    messages: comm_steps_total(&trace, &self.graph),
                    reached: trace.reached_tol(),
                    error: None,
                    trace: Some(trace),
                },
                Err(e) => CellResult {
                    algorithm,
                    rho,
                    steps: max_steps,
                    final_rel_error: f64::NAN,
                    messages: 2 * edges * max_steps,
                    reached: false,
                    error: Some(e.to_string()),
                    trace: None,
                },
            })
            .collect();
        Ok(ExperimentResult { network: self.label.clone(), edges, max_steps, cells })
    }
}

/// Appends one summary row per cell, sorted by algorithm name and rho.
pub fn summary_rows(result: &ExperimentResult, out: &mut String) {
    let mut cells: Vec<&CellResult> = result.cells.iter().collect();
    cells.sort_by(|a, b| a.algorithm.name().cmp(b.algorithm.name()).then(a.rho.total_cmp(&b.rho)));
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{:e},{},{:.8e},{}",
            result.network,
            c.algorithm.name(),
            c.rho,
            c.steps,
            c.final_rel_error,
            c.messages
        );
    }
}

/// Summary CSV text for several results, rows sorted by `(network, algorithm, rho)`.
pub fn summary_csv(results: &[ExperimentResult]) -> String {
    let mut sorted: Vec<&ExperimentResult> = results.iter().collect();
    sorted.sort_by(|a, b| a.network.cmp(&b.network));
    let mut out = format!("{SUMMARY_HEADER}\n");
    for r in sorted {
        summary_rows(r, &mut out);
    }
    out
}

pub fn emit_summary_csv(results: &[ExperimentResult], path: &Path) -> Result<(), HarnessError> {
    fs::write(path, summary_csv(results)).map_err(io_err(path))
}

pub fn trace_file_name(network: &str, algorithm: Algorithm, rho: f64) -> String {
    format!("{network}_{}_rho{rho:e}.csv", algorithm.name())
}

/// Writes one trace CSV per successful cell and an `errors.txt` listing
/// failed cells, if any.
pub fn emit_traces(result: &ExperimentResult, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut errors = String::new();
    for c in &result.cells {
        if let Some(trace) = &c.trace {
            let path = dir.join(trace_file_name(&result.network, c.algorithm, c.rho));
            fs::write(&path, trace.to_csv()).map_err(io_err(&path))?;
        }
        if let Some(e) = &c.error {
            let _ = writeln!(errors, "{} {} rho={:e}: {e}", result.network, c.algorithm.name(), c.rho);
        }
    }
    if !errors.is_empty() {
        let path = dir.join("errors.txt");
        fs::write(&path, errors).map_err(io_err(&path))?;
    }
    Ok(())
}

/// Builds the network, instance and reference, sweeps the grid and writes
/// `summary.csv` plus the traces into the configured output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    if cfg.run.algorithms.is_empty() {
        return Err(HarnessError::NothingToRun);
    }
    let (graph, _) = cfg.network.build()?;
    let instance = cfg.problem.build(cfg.network.nodes)?;
    let setup = Setup::new(cfg.network.label()?, graph, &instance)?;
    let result = setup.sweep(&cfg.run.algorithms, &cfg.run.rho, cfg.run.tolerance, cfg.max_steps())?;
    let dir = &cfg.run.output_dir;
    emit_traces(&result, dir)?;
    emit_summary_csv(std::slice::from_ref(&result), &dir.join("summary.csv"))?;
    Ok(result)
}

// ---------------------------------------------------------------- suites

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub tolerance: f64,
    pub max_steps: usize,
    pub grid: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            max_steps: DEFAULT_MAX_STEPS,
            grid: RHO_GRID.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
        }
    }
}

/// Best-rho step counts per benchmark network.
#[derive(Clone, Debug)]
pub struct SuiteTable {
    pub results: Vec<ExperimentResult>,
}

impl SuiteTable {
    pub fn best(&self, network: usize, algorithm: Algorithm) -> Option<BestCell> {
        self.results.get(network - 1).and_then(|r| r.best(algorithm))
    }

    /// Schizas et al. baseline, taken as twice the synchronous ADMM count.
    pub fn schizas_steps(&self, network: usize) -> Option<usize> {
        self.best(network, Algorithm::Zhu).map(|b| 2 * b.steps)
    }

    /// `network,model,algorithm,best_rho,steps` with `steps` empty when no
    /// grid value reached the tolerance.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("network,model,algorithm,best_rho,steps\n");
        for (i, r) in self.results.iter().enumerate() {
            let number = i + 1;
            for alg in r.algorithms() {
                match r.best(alg) {
                    Some(b) => {
                        let _ = writeln!(out, "{number},{},{},{:e},{}", r.network, alg.name(), b.rho, b.steps);
                    }
                    None => {
                        let _ = writeln!(out, "{number},{},{},,", r.network, alg.name());
                    }
                }
            }
            if let Some(b) = r.best(Algorithm::Zhu) {
                let _ = writeln!(out, "{number},{},schizas,{:e},{}", r.network, b.rho, 2 * b.steps);
            }
        }
        out
    }
}

/// Runs `family` on benchmark networks 1-7 with `nodes` nodes. Network `k`
/// uses seed `opts.seed`, the problem instance seed `opts.seed + 1`.
pub fn run_suite(family: Family, nodes: usize, opts: &SuiteOptions) -> Result<SuiteTable, HarnessError> {
    let problem = ProblemSpec::new(family, opts.seed.wrapping_add(1));
    let instance = problem.build(nodes)?;
    let mut results = Vec::with_capacity(7);
    for number in 1..=7 {
        let spec = NetworkSpec::numbered(number, nodes, opts.seed);
        let (graph, _) = spec.build()?;
        let setup = Setup::new(spec.label()?, graph, &instance)?;
        results.push(setup.sweep(&opts.algorithms, &opts.grid, opts.tolerance, opts.max_steps)?);
    }
    Ok(SuiteTable { results })
}

/// Consensus on benchmark networks 1-7 with every algorithm.
pub fn suite_figure2(nodes: usize, opts: &SuiteOptions) -> Result<SuiteTable, HarnessError> {
    run_suite(Family::Consensus, nodes, opts)
}

/// Writes `summary.csv`, `figure2.csv` and all traces under `dir`.
pub fn emit_suite(table: &SuiteTable, dir: &Path) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for r in &table.results {
        emit_traces(r, &dir.join("traces"))?;
    }
    emit_summary_csv(&table.results, &dir.join("summary.csv"))?;
    let path = dir.join("figure2.csv");
    fs::write(&path, table.to_csv()).map_err(io_err(&path))
}
