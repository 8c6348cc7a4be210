//! Command-line front end: `run`, `suite`, `gen-network`, `gen-instance` and
//! `solve-reference`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dadmm::harness::{
    emit_suite, model_from_name, run_experiment, run_suite, Algorithm, ExperimentConfig, ExperimentResult, Family,
    HarnessError, ProblemSpec, SuiteOptions, SuiteTable, DEFAULT_MAX_STEPS, SVM_MAX_STEPS,
};
use dadmm::problems::Instance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dadmm", version, about = "Distributed ADMM experiment driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Network seed; problem instances use seed + 1.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds to run, each into its own subdirectory.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    max_steps: Option<usize>,
    /// Relative-error tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Runs the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Runs a problem family on benchmark networks 1-7.
    Suite {
        suite: SuiteKind,
        #[arg(long)]
        nodes: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Generates a network and writes it as an edge list.
    GenNetwork {
        /// erdos-renyi, watts-strogatz, barabasi-albert, geometric or lattice.
        model: String,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        neighbors: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generates a problem instance with the default generator settings.
    GenInstance {
        family: FamilyArg,
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solves an instance file centrally and prints the reference solution.
    SolveReference {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteKind {
    /// Consensus with every algorithm.
    Figure2,
    Bpdn,
    Lasso,
    Svm,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    Consensus,
    Bpdn,
    Lasso,
    Svm,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Consensus => Family::Consensus,
            FamilyArg::Bpdn => Family::Bpdn,
            FamilyArg::Lasso => Family::Lasso,
            FamilyArg::Svm => Family::Svm,
        }
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        if e.is_configuration() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Returns
/// 0 on success, 1 on usage or configuration errors, 2 on runtime failures.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, overrides } => run(&config, &overrides),
        Command::Suite { suite, nodes, overrides } => suite_cmd(suite, nodes, &overrides),
        Command::GenNetwork { model, nodes, seed, p, neighbors, radius, out } => {
            let model = model_from_name(&model, p, neighbors, radius)?;
            let g = model.generate(nodes, seed).map_err(HarnessError::from)?;
            write_output(out.as_deref(), &g.to_edge_list())
        }
        Command::GenInstance { family, nodes, seed, out } => {
            let inst = ProblemSpec::new(family.into(), seed).build(nodes)?;
            write_output(out.as_deref(), &inst.to_text())
        }
        Command::SolveReference { instance, out } => {
            let text = fs::read_to_string(&instance)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", instance.display())))?;
            let inst = Instance::from_text(&text).map_err(|e| Failure::Config(e.to_string()))?;
            let x = inst.reference().map_err(|e| Failure::Runtime(e.to_string()))?;
            let mut body = String::new();
            for v in x.iter() {
                let _ = writeln!(body, "{v:.16e}");
            }
            write_output(out.as_deref(), &body)
        }
    }
}

fn write_output(path: Option<&Path>, body: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, body).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn check_overrides(o: &Overrides) -> Result<(), Failure> {
    if o.seeds == 0 {
        return Err(Failure::Config("--seeds must be at least 1".into()));
    }
    if o.max_steps == Some(0) {
        return Err(Failure::Config("--max-steps must be at least 1".into()));
    }
    if let Some(t) = o.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Failure::Config(format!("--tol {t} not in (0, 1)")));
        }
    }
    Ok(())
}

/// Output directory for `seed`; repetitions get one subdirectory each.
fn seed_dir(base: &Path, seed: u64, o: &Overrides) -> PathBuf {
    if o.seeds > 1 {
        base.join(format!("seed{seed}"))
    } else {
        base.to_path_buf()
    }
}

fn run(path: &Path, o: &Overrides) -> Result<(), Failure> {
    check_overrides(o)?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(t) = o.tol {
        cfg.run.tolerance = t;
    }
    if let Some(m) = o.max_steps {
        cfg.run.max_steps = Some(m);
    }
    let base = o.out_dir.clone().unwrap_or_else(|| cfg.run.output_dir.clone());
    let first = o.seed.unwrap_or(cfg.network.seed);
    for seed in first..first + o.seeds {
        if o.seed.is_some() || o.seeds > 1 {
            cfg.network.seed = seed;
            cfg.problem.seed = seed.wrapping_add(1);
        }
        cfg.run.output_dir = seed_dir(&base, seed, o);
        let result = run_experiment(&cfg)?;
        print!("{}", best_table(&result));
        println!("wrote {}", cfg.run.output_dir.join("summary.csv").display());
    }
    Ok(())
}

fn best_table(result: &ExperimentResult) -> String {
    let mut out = String::new();
    for alg in result.algorithms() {
        match result.best(alg) {
            Some(b) => {
                let _ = writeln!(out, "{} {}: best rho {:e}, {} steps", result.network, alg.name(), b.rho, b.steps);
            }
            None => {
                let _ = writeln!(out, "{} {}: tolerance not reached in {} steps", result.network, alg.name(), result.max_steps);
            }
        }
    }
    let failed = result.cells.iter().filter(|c| c.error.is_some()).count();
    if failed > 0 {
        let _ = writeln!(out, "{failed} cells failed; see errors.txt");
    }
    out
}

fn suite_cmd(kind: SuiteKind, nodes: usize, o: &Overrides) -> Result<(), Failure> {
    check_overrides(o)?;
    let (family, algorithms, name) = match kind {
        SuiteKind::Figure2 => (Family::Consensus, Algorithm::ALL.to_vec(), "figure2"),
        SuiteKind::Bpdn => (Family::Bpdn, vec![Algorithm::DAdmm, Algorithm::Zhu], "bpdn"),
        SuiteKind::Lasso => (Family::Lasso, vec![Algorithm::DAdmm, Algorithm::Zhu], "lasso"),
        SuiteKind::Svm => (Family::Svm, vec![Algorithm::DAdmm, Algorithm::Zhu], "svm"),
    };
    let default_steps = if family == Family::Svm { SVM_MAX_STEPS } else { DEFAULT_MAX_STEPS };
    let base = o.out_dir.clone().unwrap_or_else(|| PathBuf::from("results").join(name));
    let first = o.seed.unwrap_or(0);
    for seed in first..first + o.seeds {
        let mut opts = SuiteOptions { seed, algorithms: algorithms.clone(), max_steps: default_steps, ..Default::default() };
        if let Some(t) = o.tol {
            opts.tolerance = t;
        }
        if let Some(m) = o.max_steps {
            opts.max_steps = m;
        }
        let table: SuiteTable = run_suite(family, nodes, &opts)?;
        let dir = seed_dir(&base, seed, o);
        emit_suite(&table, &dir)?;
        print!("{}", table.to_csv());
        println!("wrote {}", dir.join("summary.csv").display());
    }
    Ok(())
}
