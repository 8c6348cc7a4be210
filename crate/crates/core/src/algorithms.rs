//! Distributed optimizers over a simulated synchronous network.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::graph::{Coloring, Graph};
use crate::solvers::SolverError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("node problems do not provide a {0} oracle")]
    MissingOracle(&'static str),
    #[error("node {node} failed at iteration {iteration}: {source}")]
    NodeSolve {
        node: usize,
        iteration: usize,
        #[source]
        source: SolverError,
    },
}

/// Private data of one node: `f_p` and `X_p`, reached through oracles.
pub trait NodeProblem: Send + Sync {
    /// Dimension of the local copy.
    fn dim(&self) -> usize;

    /// `argmin_{x in X_p} f_p(x) + v^T x + c ||x||^2`. `warm` is a starting
    /// hint for iterative solvers and must not change the minimizer.
    fn solve(
        &self,
        v: &DVector<f64>,
        c: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<DVector<f64>, SolverError>;

    /// A subgradient of `f_p` at `x`.
    fn subgradient(&self, _x: &DVector<f64>) -> Option<DVector<f64>> {
        None
    }

    /// Projection onto `X_p`.
    fn project(&self, _x: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        None
    }
}

impl<T: NodeProblem + ?Sized> NodeProblem for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn solve(
        &self,
        v: &DVector<f64>,
        c: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<DVector<f64>, SolverError> {
        (**self).solve(v, c, warm)
    }
    fn subgradient(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        (**self).subgradient(x)
    }
    fn project(&self, x: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        (**self).project(x)
    }
}

impl<T: NodeProblem + ?Sized> NodeProblem for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn solve(
        &self,
        v: &DVector<f64>,
        c: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<DVector<f64>, SolverError> {
        (**self).solve(v, c, warm)
    }
    fn subgradient(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        (**self).subgradient(x)
    }
    fn project(&self, x: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        (**self).project(x)
    }
}

/// Termination test on the stacked-copy relative error.
#[derive(Clone, Debug)]
pub struct StopRule {
    pub reference: DVector<f64>,
    pub tolerance: f64,
    pub max_steps: usize,
}

impl StopRule {
    pub fn new(reference: DVector<f64>, tolerance: f64, max_steps: usize) -> Result<Self, AlgorithmError> {
        if !(tolerance > 0.0) {
            return Err(AlgorithmError::InvalidParameter(format!("tolerance {tolerance} must be positive")));
        }
        if max_steps == 0 {
            return Err(AlgorithmError::InvalidParameter("max steps must be at least 1".into()));
        }
        Ok(Self { reference, tolerance, max_steps })
    }

    pub fn rel_error(&self, estimates: &[DVector<f64>]) -> f64 {
        rel_error(estimates, &self.reference)
    }
}

/// `||x - 1 (x) x*|| / (sqrt(P) ||x*||)`; the denominator drops `||x*||`
/// when the reference is zero.
pub fn rel_error(estimates: &[DVector<f64>], reference: &DVector<f64>) -> f64 {
    if estimates.is_empty() {
        return 0.0;
    }
    let num: f64 = estimates.iter().map(|x| (x - reference).norm_squared()).sum::<f64>().sqrt();
    let scale = reference.norm();
    let scale = if scale > 0.0 { scale } else { 1.0 };
    num / ((estimates.len() as f64).sqrt() * scale)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    ReachedTol,
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct RunTrace {
    /// `(communication step, relative error)`, one entry per step from 1.
    pub records: Vec<(usize, f64)>,
    pub termination: Termination,
    pub estimates: Vec<DVector<f64>>,
    /// Largest `||sum_p gamma_p||` seen, for methods with dual accumulators.
    pub max_gamma_sum: Option<f64>,
}

impl RunTrace {
    pub fn steps(&self) -> usize {
        self.records.last().map_or(0, |r| r.0)
    }

    pub fn final_error(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.1)
    }

    pub fn reached_tol(&self) -> bool {
        self.termination == Termination::ReachedTol
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,rel_error\n");
        for (step, err) in &self.records {
            let _ = writeln!(out, "{step},{err:.8e}");
        }
        out
    }
}

/// Total directed messages: `2 E` per communication step.
pub fn comm_steps_total(trace: &RunTrace, g: &Graph) -> usize {
    2 * g.edge_count() * trace.steps()
}

/// One communication step of a distributed method.
pub trait Iterate {
    fn advance(&mut self) -> Result<(), AlgorithmError>;
    fn estimates(&self) -> &[DVector<f64>];
    fn gamma_sum_norm(&self) -> Option<f64> {
        None
    }
}

/// Advances `it` until the relative error drops to the tolerance or the step
/// budget runs out, recording the error after every step.
pub fn run<I: Iterate + ?Sized>(it: &mut I, stop: &StopRule) -> Result<RunTrace, AlgorithmError> {
    let mut records = Vec::with_capacity(stop.max_steps.min(1 << 16));
    let mut max_gamma_sum = it.gamma_sum_norm();
    let mut termination = Termination::MaxSteps;
    for step in 1..=stop.max_steps {
        it.advance()?;
        let err = stop.rel_error(it.estimates());
        records.push((step, err));
        if let Some(s) = it.gamma_sum_norm() {
            max_gamma_sum = Some(max_gamma_sum.map_or(s, |m: f64| m.max(s)));
        }
        if err <= stop.tolerance {
            termination = Termination::ReachedTol;
            break;
        }
    }
    Ok(RunTrace { records, termination, estimates: it.estimates().to_vec(), max_gamma_sum })
}

fn check_rho(rho: f64) -> Result<(), AlgorithmError> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(AlgorithmError::InvalidParameter(format!("rho {rho} must be positive")))
    }
}

fn check_sizes<N: NodeProblem>(problems: &[N], g: &Graph) -> Result<usize, AlgorithmError> {
    if problems.len() != g.node_count() {
        return Err(AlgorithmError::InvalidParameter(format!(
            "{} node problems for {} nodes",
            problems.len(),
            g.node_count()
        )));
    }
    let n = problems.first().map_or(0, |p| p.dim());
    if problems.iter().any(|p| p.dim() != n) {
        return Err(AlgorithmError::InvalidParameter("node dimensions differ".into()));
    }
    Ok(n)
}

fn neighbor_sum(g: &Graph, x: &[DVector<f64>], p: usize, n: usize) -> DVector<f64> {
    let mut sum = DVector::zeros(n);
    for &j in g.neighbors(p) {
        sum += &x[j];
    }
    sum
}

fn gamma_sum(gamma: &[DVector<f64>]) -> f64 {
    let n = gamma.first().map_or(0, |g| g.len());
    gamma.iter().fold(DVector::zeros(n), |acc, g| acc + g).norm()
}

/// D-ADMM state. Colour classes update in order; within a class the nodes
/// are independent, so in-place updates make every node see its neighbours'
/// newest estimates.
pub struct DAdmm<'a, N: NodeProblem> {
    problems: &'a [N],
    graph: &'a Graph,
    coloring: &'a Coloring,
    rho: f64,
    x: Vec<DVector<f64>>,
    gamma: Vec<DVector<f64>>,
    iteration: usize,
}

impl<'a, N: NodeProblem> DAdmm<'a, N> {
    pub fn new(problems: &'a [N], graph: &'a Graph, coloring: &'a Coloring, rho: f64) -> Result<Self, AlgorithmError> {
        check_rho(rho)?;
        let n = check_sizes(problems, graph)?;
        if coloring.colors().len() != graph.node_count() || !coloring.is_proper(graph) {
            return Err(AlgorithmError::InvalidParameter("coloring is not proper for this graph".into()));
        }
        let p = graph.node_count();
        Ok(Self {
            problems,
            graph,
            coloring,
            rho,
            x: vec![DVector::zeros(n); p],
            gamma: vec![DVector::zeros(n); p],
            iteration: 0,
        })
    }

    pub fn gammas(&self) -> &[DVector<f64>] {
        &self.gamma
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }
}

impl<N: NodeProblem> Iterate for DAdmm<'_, N> {
    fn advance(&mut self) -> Result<(), AlgorithmError> {
        self.iteration += 1;
        let n = self.x.first().map_or(0, |x| x.len());
        for class in self.coloring.classes() {
            for &p in class {
                let v = &self.gamma[p] - neighbor_sum(self.graph, &self.x, p, n) * self.rho;
                let c = self.graph.degree(p) as f64 * self.rho / 2.0;
                self.x[p] = self.problems[p]
                    .solve(&v, c, Some(&self.x[p]))
                    .map_err(|source| AlgorithmError::NodeSolve { node: p, iteration: self.iteration, source })?;
            }
        }
        for p in 0..self.x.len() {
            let mut diff = DVector::zeros(n);
            for &j in self.graph.neighbors(p) {
                diff += &self.x[p] - &self.x[j];
            }
            self.gamma[p] += diff * self.rho;
        }
        Ok(())
    }

    fn estimates(&self) -> &[DVector<f64>] {
        &self.x
    }

    fn gamma_sum_norm(&self) -> Option<f64> {
        Some(gamma_sum(&self.gamma))
    }
}

pub fn d_admm<N: NodeProblem>(
    problems: &[N],
    g: &Graph,
    col: &Coloring,
    rho: f64,
    stop: &StopRule,
) -> Result<RunTrace, AlgorithmError> {
    run(&mut DAdmm::new(problems, g, col, rho)?, stop)
}

/// Linear term of the synchronous ADMM node update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZhuVariant {
    /// `v_p = gamma_p - rho sum_{j in N_p} (x_p + x_j)`, the fixed point of
    /// which is the solution.
    #[default]
    Standard,
    /// `v_p = gamma_p - rho sum_{j in N_p u {p}} x_j`, which converges to a
    /// biased point whenever the degrees differ from 1.
    AsPrinted,
}

/// Synchronous ADMM: every node solves from the previous round's estimates.
pub struct Zhu<'a, N: NodeProblem> {
    problems: &'a [N],
    graph: &'a Graph,
    rho: f64,
    variant: ZhuVariant,
    x: Vec<DVector<f64>>,
    gamma: Vec<DVector<f64>>,
    iteration: usize,
}

impl<'a, N: NodeProblem> Zhu<'a, N> {
    pub fn new(problems: &'a [N], graph: &'a Graph, rho: f64, variant: ZhuVariant) -> Result<Self, AlgorithmError> {
        check_rho(rho)?;
        let n = check_sizes(problems, graph)?;
        let p = graph.node_count();
        Ok(Self {
            problems,
            graph,
            rho,
            variant,
            x: vec![DVector::zeros(n); p],
            gamma: vec![DVector::zeros(n); p],
            iteration: 0,
        })
    }

    pub fn gammas(&self) -> &[DVector<f64>] {
        &self.gamma
    }
}

impl<N: NodeProblem> Iterate for Zhu<'_, N> {
    fn advance(&mut self) -> Result<(), AlgorithmError> {
        self.iteration += 1;
        let n = self.x.first().map_or(0, |x| x.len());
        let mut next = Vec::with_capacity(self.x.len());
        for p in 0..self.x.len() {
            let degree = self.graph.degree(p) as f64;
            let own = match self.variant {
                ZhuVariant::Standard => &self.x[p] * degree,
                ZhuVariant::AsPrinted => self.x[p].clone(),
            };
            let v = &self.gamma[p] - (neighbor_sum(self.graph, &self.x, p, n) + own) * self.rho;
            let x = self.problems[p]
                .solve(&v, self.rho * degree, Some(&self.x[p]))
                .map_err(|source| AlgorithmError::NodeSolve { node: p, iteration: self.iteration, source })?;
            next.push(x);
        }
        self.x = next;
        for p in 0..self.x.len() {
            let mut diff = DVector::zeros(n);
            for &j in self.graph.neighbors(p) {
                diff += &self.x[p] - &self.x[j];
            }
            self.gamma[p] += diff * self.rho;
        }
        Ok(())
    }

    fn estimates(&self) -> &[DVector<f64>] {
        &self.x
    }

    fn gamma_sum_norm(&self) -> Option<f64> {
        Some(gamma_sum(&self.gamma))
    }
}

pub fn zhu_admm<N: NodeProblem>(problems: &[N], g: &Graph, rho: f64, stop: &StopRule) -> Result<RunTrace, AlgorithmError> {
    zhu_admm_variant(problems, g, rho, ZhuVariant::Standard, stop)
}

pub fn zhu_admm_variant<N: NodeProblem>(
    problems: &[N],
    g: &Graph,
    rho: f64,
    variant: ZhuVariant,
    stop: &StopRule,
) -> Result<RunTrace, AlgorithmError> {
    run(&mut Zhu::new(problems, g, rho, variant)?, stop)
}

/// `a_ij = 1 / (1 + max(D_i, D_j))` on edges, the remainder on the diagonal.
pub fn metropolis_weights(g: &Graph) -> DMatrix<f64> {
    let p = g.node_count();
    let mut w = DMatrix::zeros(p, p);
    for &(i, j) in g.edges() {
        let a = 1.0 / (1.0 + g.degree(i).max(g.degree(j)) as f64);
        w[(i, j)] = a;
        w[(j, i)] = a;
    }
    for i in 0..p {
        let off: f64 = g.neighbors(i).iter().map(|&j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    w
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    /// `alpha_k = alpha_0 / sqrt(k)`.
    InverseSqrt(f64),
    Constant(f64),
}

impl StepSchedule {
    pub fn step(&self, k: usize) -> f64 {
        match *self {
            StepSchedule::InverseSqrt(a0) => a0 / (k as f64).sqrt(),
            StepSchedule::Constant(a) => a,
        }
    }
}

const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Projected subgradient with weight mixing.
pub struct Subgradient<'a, N: NodeProblem> {
    problems: &'a [N],
    graph: &'a Graph,
    weights: &'a DMatrix<f64>,
    schedule: StepSchedule,
    x: Vec<DVector<f64>>,
    iteration: usize,
}

impl<'a, N: NodeProblem> Subgradient<'a, N> {
    pub fn new(
        problems: &'a [N],
        graph: &'a Graph,
        weights: &'a DMatrix<f64>,
        schedule: StepSchedule,
    ) -> Result<Self, AlgorithmError> {
        let n = check_sizes(problems, graph)?;
        let p = graph.node_count();
        if weights.nrows() != p || weights.ncols() != p {
            return Err(AlgorithmError::InvalidParameter("weight matrix has the wrong size".into()));
        }
        for i in 0..p {
            let row: f64 = weights.row(i).sum();
            let col: f64 = weights.column(i).sum();
            if (row - 1.0).abs() > WEIGHT_TOLERANCE || (col - 1.0).abs() > WEIGHT_TOLERANCE {
                return Err(AlgorithmError::InvalidParameter("weights are not doubly stochastic".into()));
            }
            for j in 0..p {
                let w = weights[(i, j)];
                if w < 0.0 || (w != 0.0 && i != j && !graph.has_edge(i, j)) {
                    return Err(AlgorithmError::InvalidParameter(format!(
                        "weight ({i}, {j}) does not match the graph"
                    )));
                }
            }
        }
        let zero = DVector::zeros(n);
        for pr in problems {
            if pr.subgradient(&zero).is_none() {
                return Err(AlgorithmError::MissingOracle("subgradient"));
            }
            if pr.project(&zero).is_none() {
                return Err(AlgorithmError::MissingOracle("projection"));
            }
        }
        Ok(Self { problems, graph, weights, schedule, x: vec![zero; p], iteration: 0 })
    }
}

impl<N: NodeProblem> Iterate for Subgradient<'_, N> {
    fn advance(&mut self) -> Result<(), AlgorithmError> {
        self.iteration += 1;
        let alpha = self.schedule.step(self.iteration);
        let mut next = Vec::with_capacity(self.x.len());
        for p in 0..self.x.len() {
            let mut mixed = &self.x[p] * self.weights[(p, p)];
            for &j in self.graph.neighbors(p) {
                mixed += &self.x[j] * self.weights[(p, j)];
            }
            let node = &self.problems[p];
            let g = node.subgradient(&mixed).ok_or(AlgorithmError::MissingOracle("subgradient"))?;
            let x = node
                .project(&(mixed - g * alpha))
                .ok_or(AlgorithmError::MissingOracle("projection"))?
                .map_err(|source| AlgorithmError::NodeSolve { node: p, iteration: self.iteration, source })?;
            next.push(x);
        }
        self.x = next;
        Ok(())
    }

    fn estimates(&self) -> &[DVector<f64>] {
        &self.x
    }
}

pub fn subgradient<N: NodeProblem>(
    problems: &[N],
    g: &Graph,
    weights: &DMatrix<f64>,
    schedule: StepSchedule,
    stop: &StopRule,
) -> Result<RunTrace, AlgorithmError> {
    run(&mut Subgradient::new(problems, g, weights, schedule)?, stop)
}

/// Inner-loop termination of the double-looped method.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerRule {
    /// Stop when `||x_new - x_old|| <= tolerance ||x_new||` over one sweep.
    pub tolerance: f64,
    pub max_sweeps: usize,
}

impl Default for InnerRule {
    fn default() -> Self {
        Self { tolerance: 1e-6, max_sweeps: 50 }
    }
}

/// Method of multipliers with nonlinear Gauss-Seidel inner sweeps. One
/// sweep is one communication step.
pub struct MmGaussSeidel<'a, N: NodeProblem> {
    problems: &'a [N],
    graph: &'a Graph,
    coloring: &'a Coloring,
    rho: f64,
    inner: InnerRule,
    x: Vec<DVector<f64>>,
    lambda: Vec<DVector<f64>>,
    gamma: Vec<DVector<f64>>,
    sweeps: usize,
    iteration: usize,
}

impl<'a, N: NodeProblem> MmGaussSeidel<'a, N> {
    pub fn new(
        problems: &'a [N],
        graph: &'a Graph,
        coloring: &'a Coloring,
        rho: f64,
        inner: InnerRule,
    ) -> Result<Self, AlgorithmError> {
        check_rho(rho)?;
        let n = check_sizes(problems, graph)?;
        if inner.max_sweeps == 0 || !(inner.tolerance >= 0.0) {
            return Err(AlgorithmError::InvalidParameter("inner rule needs at least one sweep".into()));
        }
        if coloring.colors().len() != graph.node_count() || !coloring.is_proper(graph) {
            return Err(AlgorithmError::InvalidParameter("coloring is not proper for this graph".into()));
        }
        let p = graph.node_count();
        Ok(Self {
            problems,
            graph,
            coloring,
            rho,
            inner,
            x: vec![DVector::zeros(n); p],
            lambda: vec![DVector::zeros(n); graph.edge_count()],
            gamma: vec![DVector::zeros(n); p],
            sweeps: 0,
            iteration: 0,
        })
    }

    /// Per-edge multipliers, indexed like `Graph::edges`.
    pub fn lambdas(&self) -> &[DVector<f64>] {
        &self.lambda
    }

    pub fn gammas(&self) -> &[DVector<f64>] {
        &self.gamma
    }

    fn refresh_gamma(&mut self) {
        for g in &mut self.gamma {
            g.fill(0.0);
        }
        for (e, &(i, j)) in self.graph.edges().iter().enumerate() {
            self.gamma[i] += &self.lambda[e];
            self.gamma[j] -= &self.lambda[e];
        }
    }
}

impl<N: NodeProblem> Iterate for MmGaussSeidel<'_, N> {
    fn advance(&mut self) -> Result<(), AlgorithmError> {
        if self.sweeps == 0 {
            self.iteration += 1;
        }
        self.sweeps += 1;
        let n = self.x.first().map_or(0, |x| x.len());
        let mut change = 0.0;
        let mut size = 0.0;
        for class in self.coloring.classes() {
            for &p in class {
                let v = &self.gamma[p] - neighbor_sum(self.graph, &self.x, p, n) * self.rho;
                let c = self.graph.degree(p) as f64 * self.rho / 2.0;
                let x = self.problems[p]
                    .solve(&v, c, Some(&self.x[p]))
                    .map_err(|source| AlgorithmError::NodeSolve { node: p, iteration: self.iteration, source })?;
                change += (&x - &self.x[p]).norm_squared();
                size += x.norm_squared();
                self.x[p] = x;
            }
        }
        if change.sqrt() <= self.inner.tolerance * size.sqrt() || self.sweeps >= self.inner.max_sweeps {
            for (e, &(i, j)) in self.graph.edges().iter().enumerate() {
                self.lambda[e] += (&self.x[i] - &self.x[j]) * self.rho;
            }
            self.refresh_gamma();
            self.sweeps = 0;
        }
        Ok(())
    }

    fn estimates(&self) -> &[DVector<f64>] {
        &self.x
    }

    fn gamma_sum_norm(&self) -> Option<f64> {
        Some(gamma_sum(&self.gamma))
    }
}

pub fn mm_gauss_seidel<N: NodeProblem>(
    problems: &[N],
    g: &Graph,
    col: &Coloring,
    rho: f64,
    inner: InnerRule,
    stop: &StopRule,
) -> Result<RunTrace, AlgorithmError> {
    run(&mut MmGaussSeidel::new(problems, g, col, rho, inner)?, stop)
}
