//! Application problem families, synthetic data and centralized references.

use std::fmt::Write as _;
use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use thiserror::Error;

use crate::algorithms::NodeProblem;
use crate::solvers::{
    fista, lipschitz_bound, phi_gradient, phi_value, project_soc, qp_solve, qp_solve_detailed, soft_threshold,
    spectral_norm_squared, x_of_lambda, ProxProblem, SocPoint, SolverError, FISTA_MAX_ITERATIONS, FISTA_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("parse error: {0}")]
    Parse(String),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- consensus

/// `argmin (x - theta)^2 + v x + c x^2`.
pub fn consensus_node_solve(theta: f64, v: f64, c: f64) -> f64 {
    (2.0 * theta - v) / (2.0 * (1.0 + c))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsensusNode {
    pub theta: f64,
}

impl NodeProblem for ConsensusNode {
    fn dim(&self) -> usize {
        1
    }

    fn solve(&self, v: &DVector<f64>, c: f64, _: Option<&DVector<f64>>) -> Result<DVector<f64>, SolverError> {
        Ok(DVector::from_element(1, consensus_node_solve(self.theta, v[0], c)))
    }

    fn subgradient(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        Some(x.map(|xi| 2.0 * (xi - self.theta)))
    }

    fn project(&self, x: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        Some(Ok(x.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsensusInstance {
    pub theta: Vec<f64>,
}

impl ConsensusInstance {
    /// `theta_p ~ Normal(10, 100^2)`.
    pub fn generate(nodes: usize, seed: u64) -> Self {
        let normal = Normal::new(10.0, 100.0).expect("valid normal");
        let mut r = rng(seed);
        Self { theta: (0..nodes).map(|_| normal.sample(&mut r)).collect() }
    }

    pub fn nodes(&self) -> Vec<ConsensusNode> {
        self.theta.iter().map(|&theta| ConsensusNode { theta }).collect()
    }

    pub fn reference(&self) -> f64 {
        reference_consensus(&self.theta)
    }
}

pub fn reference_consensus(theta: &[f64]) -> f64 {
    theta.iter().sum::<f64>() / theta.len() as f64
}

// ---------------------------------------------------------------- partitions

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PartitionPattern {
    #[default]
    Contiguous,
}

/// Contiguous index blocks whose sizes differ by at most one, larger first.
pub fn block_ranges(len: usize, parts: usize) -> Result<Vec<Range<usize>>, ProblemError> {
    if parts == 0 || parts > len {
        return Err(ProblemError::InvalidParameter(format!("cannot split {len} items into {parts} blocks")));
    }
    let (base, extra) = (len / parts, len % parts);
    let mut start = 0;
    Ok((0..parts)
        .map(|p| {
            let size = base + usize::from(p < extra);
            let r = start..start + size;
            start += size;
            r
        })
        .collect())
}

pub fn partition_rows(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    parts: usize,
    _pattern: PartitionPattern,
) -> Result<Vec<(DMatrix<f64>, DVector<f64>)>, ProblemError> {
    if a.nrows() != b.len() {
        return Err(ProblemError::InvalidParameter("A and b have different row counts".into()));
    }
    Ok(block_ranges(a.nrows(), parts)?
        .into_iter()
        .map(|r| (a.rows(r.start, r.len()).into_owned(), b.rows(r.start, r.len()).into_owned()))
        .collect())
}

pub fn partition_cols(
    a: &DMatrix<f64>,
    parts: usize,
    _pattern: PartitionPattern,
) -> Result<Vec<DMatrix<f64>>, ProblemError> {
    Ok(block_ranges(a.ncols(), parts)?
        .into_iter()
        .map(|r| a.columns(r.start, r.len()).into_owned())
        .collect())
}

// ---------------------------------------------------------------- data

/// Compressed-sensing data `b = A x_true + noise`.
#[derive(Clone, Debug, PartialEq)]
pub struct CsData {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub x_true: DVector<f64>,
}

fn check_cs_dims(m: usize, n: usize, k: usize) -> Result<(), ProblemError> {
    if !(k < m && m < n) {
        return Err(ProblemError::InvalidParameter(format!("need k < m < n, got k={k}, m={m}, n={n}")));
    }
    Ok(())
}

fn finish_cs(a: DMatrix<f64>, k: usize, noise_std: f64, r: &mut ChaCha8Rng) -> CsData {
    let n = a.ncols();
    let mut x_true = DVector::zeros(n);
    let mut support = index::sample(r, n, k).into_vec();
    support.sort_unstable();
    for i in support {
        x_true[i] = if r.random::<bool>() { 1.0 } else { -1.0 };
    }
    let mut b = &a * &x_true;
    if noise_std > 0.0 {
        for bi in b.iter_mut() {
            let z: f64 = StandardNormal.sample(r);
            *bi += noise_std * z;
        }
    }
    CsData { a, b, x_true }
}

/// i.i.d. `Normal(0, 1) / sqrt(m)` sensing matrix.
pub fn gen_gaussian_cs(m: usize, n: usize, k: usize, noise_std: f64, seed: u64) -> Result<CsData, ProblemError> {
    check_cs_dims(m, n, k)?;
    let mut r = rng(seed);
    let scale = 1.0 / (m as f64).sqrt();
    let a = DMatrix::from_fn(m, n, |_, _| {
        let z: f64 = StandardNormal.sample(&mut r);
        z * scale
    });
    Ok(finish_cs(a, k, noise_std, &mut r))
}

/// Orthonormal `n x n` DCT-II matrix.
pub fn dct_matrix(n: usize) -> DMatrix<f64> {
    let nf = n as f64;
    DMatrix::from_fn(n, n, |k, j| {
        let s = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        s * (std::f64::consts::PI * (2 * j + 1) as f64 * k as f64 / (2.0 * nf)).cos()
    })
}

/// `m` distinct rows of the orthonormal DCT-II matrix, chosen uniformly.
pub fn gen_partial_dct_cs(m: usize, n: usize, k: usize, noise_std: f64, seed: u64) -> Result<CsData, ProblemError> {
    check_cs_dims(m, n, k)?;
    let mut r = rng(seed);
    let mut rows = index::sample(&mut r, n, m).into_vec();
    rows.sort_unstable();
    let full = dct_matrix(n);
    let a = full.select_rows(rows.iter());
    Ok(finish_cs(a, k, noise_std, &mut r))
}

/// Labelled points; `labels[i]` is `+1` or `-1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmData {
    pub a: DMatrix<f64>,
    pub labels: Vec<f64>,
}

/// Two unit-variance Gaussian clusters at `+-(margin + 1) u` for a random unit
/// `u`; every point satisfies `label * u^T a >= margin`. Labels alternate.
pub fn gen_separable_svm(m: usize, n: usize, margin: f64, seed: u64) -> Result<SvmData, ProblemError> {
    if !(margin > 0.0) || n == 0 || m < 2 {
        return Err(ProblemError::InvalidParameter("need margin > 0, n >= 1 and m >= 2".into()));
    }
    let mut r = rng(seed);
    let u = loop {
        let u = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut r));
        let norm: f64 = u.norm();
        if norm > 1e-8 {
            break u / norm;
        }
    };
    let mut a = DMatrix::zeros(m, n);
    let mut labels = Vec::with_capacity(m);
    for i in 0..m {
        let label = if i % 2 == 0 { 1.0 } else { -1.0 };
        let point = loop {
            let noise = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut r));
            let point = &u * (label * (margin + 1.0)) + noise;
            if label * u.dot(&point) >= margin {
                break point;
            }
        };
        a.set_row(i, &point.transpose());
        labels.push(label);
    }
    Ok(SvmData { a, labels })
}

// ---------------------------------------------------------------- BPDN

pub const BPDN_MAX_ITERATIONS: usize = FISTA_MAX_ITERATIONS;

/// `||A_p x - b_p||^2 + tau ||x||_1` with `tau = beta / P`.
#[derive(Clone, Debug)]
pub struct BpdnNode {
    /// `A_p^T`, so that products with the short rows of `A_p` stay contiguous.
    at: DMatrix<f64>,
    b: DVector<f64>,
    tau: f64,
    sigma_sq: f64,
    tolerance: f64,
    max_iterations: usize,
}

impl BpdnNode {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, tau: f64) -> Self {
        let sigma_sq = spectral_norm_squared(&a);
        Self { at: a.transpose(), b, tau, sigma_sq, tolerance: FISTA_TOLERANCE, max_iterations: BPDN_MAX_ITERATIONS }
    }

    pub fn with_limits(mut self, tolerance: f64, max_iterations: usize) -> Self {
        self.tolerance = tolerance;
        self.max_iterations = max_iterations;
        self
    }

    pub fn solve_from(&self, v: &DVector<f64>, c: f64, start: DVector<f64>) -> Result<DVector<f64>, SolverError> {
        let (at, b, tau) = (&self.at, &self.b, self.tau);
        // Gradient 2 A^T A x + 2 c x + (v - 2 A^T b), with the constant part hoisted.
        let mut linear = at * b;
        linear.axpy(1.0, v, -2.0);
        let gradient = |x: &DVector<f64>| {
            let mut g = at * at.tr_mul(x);
            g.axpy(1.0, &linear, 2.0);
            g.axpy(2.0 * c, x, 1.0);
            g
        };
        let objective = |x: &DVector<f64>| {
            let mut fit = at.tr_mul(x);
            fit -= b;
            let tail: f64 = x.iter().zip(v.iter()).map(|(xi, vi)| xi * vi + c * xi * xi + tau * xi.abs()).sum();
            fit.norm_squared() + tail
        };
        let prox = |x: &DVector<f64>, step: f64| soft_threshold(x, tau * step);
        let out = fista(&ProxProblem {
            gradient: &gradient,
            objective: &objective,
            prox: &prox,
            lipschitz: 2.0 * self.sigma_sq + 2.0 * c,
            start,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            accelerated: true,
        })?;
        if !out.converged {
            let last = &out.x - prox(&(&out.x - gradient(&out.x) / (2.0 * self.sigma_sq + 2.0 * c)), 1.0 / (2.0 * self.sigma_sq + 2.0 * c));
            return Err(SolverError::Budget { iterations: out.iterations, residual: last.norm(), best: out.x });
        }
        Ok(out.x)
    }
}

impl NodeProblem for BpdnNode {
    fn dim(&self) -> usize {
        self.at.nrows()
    }

    fn solve(&self, v: &DVector<f64>, c: f64, warm: Option<&DVector<f64>>) -> Result<DVector<f64>, SolverError> {
        let start = warm.cloned().unwrap_or_else(|| DVector::zeros(self.dim()));
        self.solve_from(v, c, start)
    }

    fn subgradient(&self, x: &DVector<f64>) -> Option<DVector<f64>> {
        Some(&self.at * (self.at.tr_mul(x) - &self.b) * 2.0 + x.map(|xi| self.tau * xi.signum() * f64::from(xi != 0.0)))
    }

    fn project(&self, x: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        Some(Ok(x.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpdnInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub beta: f64,
    pub parts: usize,
}

impl BpdnInstance {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, beta: f64, parts: usize) -> Result<Self, ProblemError> {
        if !(beta > 0.0) {
            return Err(ProblemError::InvalidParameter(format!("beta {beta} must be positive")));
        }
        block_ranges(a.nrows(), parts)?;
        if a.nrows() != b.len() {
            return Err(ProblemError::InvalidParameter("A and b have different row counts".into()));
        }
        Ok(Self { a, b, beta, parts })
    }

    pub fn nodes(&self) -> Vec<BpdnNode> {
        let tau = self.beta / self.parts as f64;
        partition_rows(&self.a, &self.b, self.parts, PartitionPattern::Contiguous)
            .expect("validated partition")
            .into_iter()
            .map(|(a, b)| BpdnNode::new(a, b, tau))
            .collect()
    }

    pub fn reference(&self) -> Result<DVector<f64>, SolverError> {
        reference_bpdn(&self.a, &self.b, self.beta)
    }
}

/// Centralized `min ||Ax - b||^2 + beta ||x||_1`.
pub fn reference_bpdn(a: &DMatrix<f64>, b: &DVector<f64>, beta: f64) -> Result<DVector<f64>, SolverError> {
    BpdnNode::new(a.clone(), b.clone(), beta)
        .with_limits(1e-13, 1_000_000)
        .solve_from(&DVector::zeros(a.ncols()), 0.0, DVector::zeros(a.ncols()))
}

// ---------------------------------------------------------------- LASSO

/// Node share of the dual of `min ||x||_1 + (delta/2)||x||^2 s.t. ||Ax - b|| <= sigma`
/// under a column partition: `phi_p(lambda) + b^T lambda / P + (sigma / P) ||lambda||`.
#[derive(Debug)]
pub struct LassoNode {
    a: DMatrix<f64>,
    b_share: DVector<f64>,
    sigma_share: f64,
    delta: f64,
    sigma_sq: f64,
    tolerance: f64,
    max_iterations: usize,
    budget_warnings: AtomicUsize,
}

impl Clone for LassoNode {
    fn clone(&self) -> Self {
        Self {
            a: self.a.clone(),
            b_share: self.b_share.clone(),
            sigma_share: self.sigma_share,
            delta: self.delta,
            sigma_sq: self.sigma_sq,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            budget_warnings: AtomicUsize::new(self.budget_warnings()),
        }
    }
}

impl LassoNode {
    pub fn new(a: DMatrix<f64>, b: &DVector<f64>, sigma: f64, delta: f64, parts: usize) -> Self {
        let sigma_sq = spectral_norm_squared(&a);
        Self {
            a,
            b_share: b / parts as f64,
            sigma_share: sigma / parts as f64,
            delta,
            sigma_sq,
            tolerance: FISTA_TOLERANCE,
            max_iterations: FISTA_MAX_ITERATIONS,
            budget_warnings: AtomicUsize::new(0),
        }
    }

    pub fn with_limits(mut self, tolerance: f64, max_iterations: usize) -> Self {
        self.tolerance = tolerance;
        self.max_iterations = max_iterations;
        self
    }

    /// Number of solves that hit the iteration cap and returned their last iterate.
    pub fn budget_warnings(&self) -> usize {
        self.budget_warnings.load(Ordering::Relaxed)
    }

    /// Local objective `g_p(lambda) + v^T lambda + c ||lambda||^2`.
    pub fn objective(&self, lambda: &DVector<f64>, v: &DVector<f64>, c: f64) -> f64 {
        phi_value(&self.a, lambda, self.delta)
            + self.b_share.dot(lambda)
            + self.sigma_share * lambda.norm()
            + v.dot(lambda)
            + c * lambda.norm_squared()
    }

    /// Primal block `x_p(lambda)`.
    pub fn primal(&self, lambda: &DVector<f64>) -> DVector<f64> {
        x_of_lambda(&self.a, lambda, self.delta)
    }

    /// FISTA on the epigraph form over `(lambda, t)` with `||lambda|| <= t`.
    /// Returns the `lambda` part and whether the stopping test was met.
    pub fn solve_detailed(
        &self,
        v: &DVector<f64>,
        c: f64,
        warm: Option<&DVector<f64>>,
    ) -> Result<(DVector<f64>, bool), SolverError> {
        let m = self.a.nrows();
        let lambda0 = warm.cloned().unwrap_or_else(|| DVector::zeros(m));
        let t0 = lambda0.norm();
        let start = SocPoint::new(lambda0, t0).to_vector();
        let split = |y: &DVector<f64>| y.rows(0, m).into_owned();
        let gradient = |y: &DVector<f64>| {
            let lambda = split(y);
            let g = phi_gradient(&self.a, &lambda, self.delta) + &self.b_share + v + &lambda * (2.0 * c);
            SocPoint::new(g, self.sigma_share).to_vector()
        };
        let objective = |y: &DVector<f64>| {
            let lambda = split(y);
            phi_value(&self.a, &lambda, self.delta)
                + self.b_share.dot(&lambda)
                + self.sigma_share * y[m]
                + v.dot(&lambda)
                + c * lambda.norm_squared()
        };
        let prox = |y: &DVector<f64>, _: f64| project_soc(&SocPoint::from_vector(y)).to_vector();
        let out = fista(&ProxProblem {
            gradient: &gradient,
            objective: &objective,
            prox: &prox,
            lipschitz: self.sigma_sq / self.delta + 2.0 * c,
            start,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            accelerated: true,
        })?;
        if !out.converged {
            self.budget_warnings.fetch_add(1, Ordering::Relaxed);
        }
        Ok((split(&out.x), out.converged))
    }

    pub fn lipschitz(&self, c: f64) -> f64 {
        lipschitz_bound(&self.a, self.delta, c)
    }
}

impl NodeProblem for LassoNode {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn solve(&self, v: &DVector<f64>, c: f64, warm: Option<&DVector<f64>>) -> Result<DVector<f64>, SolverError> {
        self.solve_detailed(v, c, warm).map(|(lambda, _)| lambda)
    }

    fn subgradient(&self, lambda: &DVector<f64>) -> Option<DVector<f64>> {
        let norm = lambda.norm();
        let cone = if norm > 0.0 { lambda * (self.sigma_share / norm) } else { DVector::zeros(lambda.len()) };
        Some(phi_gradient(&self.a, lambda, self.delta) + &self.b_share + cone)
    }

    fn project(&self, x: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        Some(Ok(x.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LassoReference {
    pub lambda: DVector<f64>,
    pub x: DVector<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LassoInstance {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub sigma: f64,
    pub delta: f64,
    pub parts: usize,
}

impl LassoInstance {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, sigma: f64, delta: f64, parts: usize) -> Result<Self, ProblemError> {
        if !(sigma > 0.0 && delta > 0.0) {
            return Err(ProblemError::InvalidParameter("sigma and delta must be positive".into()));
        }
        if a.nrows() != b.len() {
            return Err(ProblemError::InvalidParameter("A and b have different row counts".into()));
        }
        block_ranges(a.ncols(), parts)?;
        Ok(Self { a, b, sigma, delta, parts })
    }

    pub fn nodes(&self) -> Vec<LassoNode> {
        partition_cols(&self.a, self.parts, PartitionPattern::Contiguous)
            .expect("validated partition")
            .into_iter()
            .map(|a| LassoNode::new(a, &self.b, self.sigma, self.delta, self.parts))
            .collect()
    }

    pub fn reference(&self) -> Result<LassoReference, SolverError> {
        reference_lasso(&self.a, &self.b, self.sigma, self.delta)
    }

    /// Stacks each node's primal block, computed from its own dual copy.
    pub fn primal_from_copies(&self, lambdas: &[DVector<f64>]) -> DVector<f64> {
        let blocks: Vec<DVector<f64>> =
            self.nodes().iter().zip(lambdas).map(|(node, lambda)| node.primal(lambda)).collect();
        let mut x = DVector::zeros(self.a.ncols());
        let mut offset = 0;
        for blk in blocks {
            x.rows_mut(offset, blk.len()).copy_from(&blk);
            offset += blk.len();
        }
        x
    }
}

/// Centralized dual solve with a single node (tolerance 1e-10, 1e5 iterations),
/// primal recovered through `x(lambda)`.
pub fn reference_lasso(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    sigma: f64,
    delta: f64,
) -> Result<LassoReference, SolverError> {
    let node = LassoNode::new(a.clone(), b, sigma, delta, 1).with_limits(1e-10, 100_000);
    let zero = DVector::zeros(a.nrows());
    let (lambda, converged) = node.solve_detailed(&zero, 0.0, None)?;
    if !converged {
        return Err(SolverError::Budget { iterations: 100_000, residual: f64::NAN, best: lambda });
    }
    let x = node.primal(&lambda);
    Ok(LassoReference { lambda, x })
}

// ---------------------------------------------------------------- SVM

pub const SVM_NODE_TOLERANCE: f64 = 1e-11;

/// `min ||s||^2 s.t. D_p (A_p s - 1 r) >= 1` over `z = (s, r)`.
#[derive(Clone, Debug)]
pub struct SvmNode {
    g: DMatrix<f64>,
    n: usize,
    tolerance: f64,
}

fn svm_constraints(a: &DMatrix<f64>, labels: &[f64]) -> DMatrix<f64> {
    let n = a.ncols();
    DMatrix::from_fn(a.nrows(), n + 1, |i, j| if j < n { labels[i] * a[(i, j)] } else { -labels[i] })
}

impl SvmNode {
    pub fn new(a: &DMatrix<f64>, labels: &[f64]) -> Self {
        Self { g: svm_constraints(a, labels), n: a.ncols(), tolerance: SVM_NODE_TOLERANCE }
    }
}

impl NodeProblem for SvmNode {
    fn dim(&self) -> usize {
        self.n + 1
    }

    fn solve(&self, v: &DVector<f64>, c: f64, _: Option<&DVector<f64>>) -> Result<DVector<f64>, SolverError> {
        if !(c > 0.0) {
            return Err(SolverError::InvalidInput(format!("quadratic coefficient {c} must be positive")));
        }
        let q_diag = DVector::from_fn(self.n + 1, |i, _| if i < self.n { 2.0 * (1.0 + c) } else { 2.0 * c });
        let h = DVector::from_element(self.g.nrows(), 1.0);
        qp_solve(&q_diag, v, &self.g, &h, self.tolerance)
    }

    fn subgradient(&self, z: &DVector<f64>) -> Option<DVector<f64>> {
        Some(DVector::from_fn(self.n + 1, |i, _| if i < self.n { 2.0 * z[i] } else { 0.0 }))
    }

    fn project(&self, z: &DVector<f64>) -> Option<Result<DVector<f64>, SolverError>> {
        let q_diag = DVector::from_element(self.n + 1, 2.0);
        let h = DVector::from_element(self.g.nrows(), 1.0);
        Some(qp_solve(&q_diag, &(-z * 2.0), &self.g, &h, self.tolerance))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmInstance {
    pub a: DMatrix<f64>,
    pub labels: Vec<f64>,
    pub parts: usize,
}

impl SvmInstance {
    pub fn new(data: SvmData, parts: usize) -> Result<Self, ProblemError> {
        if data.labels.len() != data.a.nrows() {
            return Err(ProblemError::InvalidParameter("one label per point required".into()));
        }
        if data.labels.iter().any(|&l| l != 1.0 && l != -1.0) {
            return Err(ProblemError::InvalidParameter("labels must be +1 or -1".into()));
        }
        block_ranges(data.a.nrows(), parts)?;
        Ok(Self { a: data.a, labels: data.labels, parts })
    }

    pub fn nodes(&self) -> Vec<SvmNode> {
        block_ranges(self.a.nrows(), self.parts)
            .expect("validated partition")
            .into_iter()
            .map(|r| SvmNode::new(&self.a.rows(r.start, r.len()).into_owned(), &self.labels[r]))
            .collect()
    }

    pub fn reference(&self) -> Result<DVector<f64>, SolverError> {
        reference_svm(&self.a, &self.labels)
    }

    /// Smallest `d_i (s^T a_i - r)` over the data.
    pub fn min_margin(&self, z: &DVector<f64>) -> f64 {
        let n = self.a.ncols();
        let s = z.rows(0, n);
        (0..self.a.nrows())
            .map(|i| self.labels[i] * (self.a.row(i).transpose().dot(&s) - z[n]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether `sign(s^T a_i - r)` matches every label.
    pub fn classifies_all(&self, z: &DVector<f64>) -> bool {
        self.min_margin(z) > 0.0
    }
}

const SVM_PROX_WEIGHT: f64 = 1.0;
const SVM_PROX_ITERATIONS: usize = 100_000;

/// Centralized hard-margin SVM. The objective has no curvature in `r`, so the
/// dual QP solver runs inside proximal-point iterations
/// `z <- argmin ||s||^2 + w ||z - z_k||^2 s.t. D (A s - 1 r) >= 1`.
pub fn reference_svm(a: &DMatrix<f64>, labels: &[f64]) -> Result<DVector<f64>, SolverError> {
    let n = a.ncols();
    let g = svm_constraints(a, labels);
    let h = DVector::from_element(g.nrows(), 1.0);
    let w = SVM_PROX_WEIGHT;
    let q_diag = DVector::from_fn(n + 1, |i, _| if i < n { 2.0 * (1.0 + w) } else { 2.0 * w });
    let mut z = DVector::zeros(n + 1);
    for _ in 0..SVM_PROX_ITERATIONS {
        let next = qp_solve_detailed(&q_diag, &(&z * (-2.0 * w)), &g, &h, 1e-12, 1_000_000)?.z;
        let change = (&next - &z).norm();
        z = next;
        if change <= 1e-12 * (1.0 + z.norm()) {
            return Ok(z);
        }
    }
    Err(SolverError::Budget { iterations: SVM_PROX_ITERATIONS, residual: f64::NAN, best: z })
}

// ---------------------------------------------------------------- instances

/// A problem family instance together with its node count.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Consensus(ConsensusInstance),
    Bpdn(BpdnInstance),
    Lasso(LassoInstance),
    Svm(SvmInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Consensus(_) => "consensus",
            Instance::Bpdn(_) => "bpdn",
            Instance::Lasso(_) => "lasso",
            Instance::Svm(_) => "svm",
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Instance::Consensus(c) => c.theta.len(),
            Instance::Bpdn(b) => b.parts,
            Instance::Lasso(l) => l.parts,
            Instance::Svm(s) => s.parts,
        }
    }

    pub fn nodes(&self) -> Vec<Box<dyn NodeProblem>> {
        fn boxed<N: NodeProblem + 'static>(v: Vec<N>) -> Vec<Box<dyn NodeProblem>> {
            v.into_iter().map(|n| Box::new(n) as Box<dyn NodeProblem>).collect()
        }
        match self {
            Instance::Consensus(c) => boxed(c.nodes()),
            Instance::Bpdn(b) => boxed(b.nodes()),
            Instance::Lasso(l) => boxed(l.nodes()),
            Instance::Svm(s) => boxed(s.nodes()),
        }
    }

    /// Centralized solution of the shared variable (the dual `lambda` for LASSO).
    pub fn reference(&self) -> Result<DVector<f64>, SolverError> {
        match self {
            Instance::Consensus(c) => Ok(DVector::from_element(1, c.reference())),
            Instance::Bpdn(b) => b.reference(),
            Instance::Lasso(l) => l.reference().map(|r| r.lambda),
            Instance::Svm(s) => s.reference(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("instance {}\nnodes {}\n", self.kind(), self.node_count());
        match self {
            Instance::Consensus(c) => write_vector(&mut out, "theta", c.theta.iter().copied()),
            Instance::Bpdn(b) => {
                write_param(&mut out, "beta", b.beta);
                write_matrix(&mut out, "A", &b.a);
                write_vector(&mut out, "b", b.b.iter().copied());
            }
            Instance::Lasso(l) => {
                write_param(&mut out, "sigma", l.sigma);
                write_param(&mut out, "delta", l.delta);
                write_matrix(&mut out, "A", &l.a);
                write_vector(&mut out, "b", l.b.iter().copied());
            }
            Instance::Svm(s) => {
                write_matrix(&mut out, "A", &s.a);
                write_vector(&mut out, "labels", s.labels.iter().copied());
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ProblemError> {
        let mut r = Reader { lines: text.lines().filter(|l| !l.trim().is_empty()), line: 0 };
        let kind = r.keyed("instance")?;
        let nodes: usize = parse(&r.keyed("nodes")?, "node count")?;
        let inst = match kind.as_str() {
            "consensus" => {
                let theta = r.vector("theta")?;
                if theta.len() != nodes {
                    return Err(ProblemError::Parse("theta length differs from node count".into()));
                }
                Instance::Consensus(ConsensusInstance { theta: theta.iter().copied().collect() })
            }
            "bpdn" => {
                let beta = r.param("beta")?;
                let a = r.matrix("A")?;
                let b = r.vector("b")?;
                Instance::Bpdn(BpdnInstance::new(a, b, beta, nodes)?)
            }
            "lasso" => {
                let sigma = r.param("sigma")?;
                let delta = r.param("delta")?;
                let a = r.matrix("A")?;
                let b = r.vector("b")?;
                Instance::Lasso(LassoInstance::new(a, b, sigma, delta, nodes)?)
            }
            "svm" => {
                let a = r.matrix("A")?;
                let labels = r.vector("labels")?;
                Instance::Svm(SvmInstance::new(SvmData { a, labels: labels.iter().copied().collect() }, nodes)?)
            }
            other => return Err(ProblemError::Parse(format!("unknown instance kind '{other}'"))),
        };
        if let Some(extra) = r.lines.next() {
            return Err(ProblemError::Parse(format!("unexpected trailing line '{extra}'")));
        }
        Ok(inst)
    }
}

fn write_param(out: &mut String, name: &str, value: f64) {
    let _ = writeln!(out, "param {name} {value:.16e}");
}

fn write_row(out: &mut String, values: impl Iterator<Item = f64>) {
    let row: Vec<String> = values.map(|v| format!("{v:.16e}")).collect();
    out.push_str(&row.join(" "));
    out.push('\n');
}

fn write_matrix(out: &mut String, name: &str, a: &DMatrix<f64>) {
    let _ = writeln!(out, "matrix {name} {} {}", a.nrows(), a.ncols());
    for row in a.row_iter() {
        write_row(out, row.iter().copied());
    }
}

fn write_vector(out: &mut String, name: &str, values: impl ExactSizeIterator<Item = f64> + Clone) {
    let _ = writeln!(out, "vector {name} {}", values.len());
    write_row(out, values);
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, ProblemError> {
    s.trim().parse().map_err(|_| ProblemError::Parse(format!("invalid {what} '{s}'")))
}

struct Reader<I> {
    lines: I,
    line: usize,
}

impl<'a, I: Iterator<Item = &'a str>> Reader<I> {
    fn next(&mut self, what: &str) -> Result<&'a str, ProblemError> {
        self.line += 1;
        self.lines.next().ok_or_else(|| ProblemError::Parse(format!("missing {what}")))
    }

    fn header(&mut self, key: &str, name: &str) -> Result<Vec<&'a str>, ProblemError> {
        let line = self.next(&format!("{key} {name}"))?;
        let mut words = line.split_whitespace();
        if words.next() != Some(key) || words.next() != Some(name) {
            return Err(ProblemError::Parse(format!("expected '{key} {name}', found '{line}'")));
        }
        Ok(words.collect())
    }

    fn keyed(&mut self, key: &str) -> Result<String, ProblemError> {
        let line = self.next(key)?;
        match line.split_once(char::is_whitespace) {
            Some((k, v)) if k == key => Ok(v.trim().to_string()),
            _ => Err(ProblemError::Parse(format!("expected '{key}', found '{line}'"))),
        }
    }

    fn param(&mut self, name: &str) -> Result<f64, ProblemError> {
        match self.header("param", name)?.as_slice() {
            [v] => parse(v, name),
            _ => Err(ProblemError::Parse(format!("malformed parameter {name}"))),
        }
    }

    fn row(&mut self, len: usize, what: &str) -> Result<Vec<f64>, ProblemError> {
        let line = self.next(what)?;
        let values: Vec<f64> = line.split_whitespace().map(|w| parse(w, what)).collect::<Result<_, _>>()?;
        if values.len() != len {
            return Err(ProblemError::Parse(format!("{what}: expected {len} values, found {}", values.len())));
        }
        Ok(values)
    }

    fn vector(&mut self, name: &str) -> Result<DVector<f64>, ProblemError> {
        let len: usize = match self.header("vector", name)?.as_slice() {
            [n] => parse(n, "length")?,
            _ => return Err(ProblemError::Parse(format!("malformed vector header {name}"))),
        };
        Ok(DVector::from_vec(self.row(len, name)?))
    }

    fn matrix(&mut self, name: &str) -> Result<DMatrix<f64>, ProblemError> {
        let (rows, cols): (usize, usize) = match self.header("matrix", name)?.as_slice() {
            [r, c] => (parse(r, "rows")?, parse(c, "columns")?),
            _ => return Err(ProblemError::Parse(format!("malformed matrix header {name}"))),
        };
        let mut data = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            data.extend(self.row(cols, name)?);
        }
        Ok(DMatrix::from_row_slice(rows, cols, &data))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consensus_closed_form() {
        assert_eq!(consensus_node_solve(10.0, 0.0, 0.0), 10.0);
        assert_eq!(consensus_node_solve(3.0, 2.0, 1.0), 1.0);
        assert_eq!(consensus_node_solve(0.0, 0.0, 5.0), 0.0);
        for (theta, v, c) in [(1.5, -2.0, 0.3), (-40.0, 7.0, 12.0)] {
            let x = consensus_node_solve(theta, v, c);
            assert!((2.0 * (x - theta) + v + 2.0 * c * x).abs() < 1e-12);
        }
        assert_eq!(reference_consensus(&[0.0, 10.0]), 5.0);
    }

    #[test]
    fn blocks() {
        assert_eq!(block_ranges(5, 2).unwrap(), vec![0..3, 3..5]);
        assert_eq!(block_ranges(4, 2).unwrap(), vec![0..2, 2..4]);
        assert!(block_ranges(3, 4).is_err());
        assert!(block_ranges(3, 0).is_err());
        let a = DMatrix::from_fn(5, 3, |i, j| (i * 3 + j) as f64);
        let b = DVector::from_fn(5, |i, _| i as f64);
        let parts = partition_rows(&a, &b, 2, PartitionPattern::Contiguous).unwrap();
        assert_eq!(parts[0].0.nrows(), 3);
        let mut stacked = DMatrix::zeros(0, 3);
        for (blk, _) in &parts {
            let r = stacked.nrows();
            stacked = stacked.resize_vertically(r + blk.nrows(), 0.0);
            stacked.rows_mut(r, blk.nrows()).copy_from(blk);
        }
        assert_eq!(stacked, a);
        let cols = partition_cols(&a, 3, PartitionPattern::Contiguous).unwrap();
        assert!(cols.iter().all(|c| c.ncols() == 1));
        assert!(partition_cols(&a, 4, PartitionPattern::Contiguous).is_err());
    }

    #[test]
    fn dct_rows_are_orthonormal() {
        let d = gen_partial_dct_cs(20, 64, 3, 0.0, 4).unwrap();
        assert!((&d.a * d.a.transpose() - DMatrix::identity(20, 20)).amax() < 1e-12);
        let full = dct_matrix(8);
        assert!((full.transpose() * &full - DMatrix::identity(8, 8)).amax() < 1e-12);
    }

    #[test]
    fn noiseless_single_spike() {
        let d = gen_gaussian_cs(10, 30, 1, 0.0, 9).unwrap();
        let i = d.x_true.iter().position(|v| *v != 0.0).unwrap();
        assert_eq!(d.b, d.a.column(i) * d.x_true[i]);
        assert_eq!(d.x_true.iter().filter(|v| **v != 0.0).count(), 1);
        assert!(gen_gaussian_cs(10, 8, 1, 0.0, 0).is_err());
    }

    #[test]
    fn gaussian_columns_near_unit_norm() {
        let d = gen_gaussian_cs(100, 200, 5, 0.0, 1).unwrap();
        for col in d.a.column_iter() {
            assert!((col.norm() - 1.0).abs() < 0.3);
        }
    }

    #[test]
    fn bpdn_identity_soft_threshold() {
        let node = BpdnNode::new(DMatrix::identity(2, 2), DVector::from_vec(vec![3.0, 0.0]), 2.0);
        let x = node.solve(&DVector::zeros(2), 0.0, None).unwrap();
        assert!((x - DVector::from_vec(vec![2.0, 0.0])).norm() < 1e-7);
        let a = DMatrix::from_fn(3, 4, |i, j| ((i + 1) * (j + 2)) as f64 % 5.0 - 2.0);
        let node = BpdnNode::new(a, DVector::zeros(3), 0.7);
        assert_eq!(node.solve(&DVector::zeros(4), 0.5, None).unwrap(), DVector::zeros(4));
    }

    #[test]
    fn bpdn_reference_identity() {
        let b = DVector::from_vec(vec![3.0, -0.01, 0.5, -2.0]);
        let x = reference_bpdn(&DMatrix::identity(4, 4), &b, 0.1).unwrap();
        let expect = soft_threshold(&b, 0.05);
        assert!((x - expect).norm() < 1e-10);
    }

    #[test]
    fn lasso_zero_data_gives_zero() {
        let node = LassoNode::new(DMatrix::zeros(3, 2), &DVector::zeros(3), 0.5, 1e-3, 2);
        let lambda = node.solve(&DVector::zeros(3), 1.0, None).unwrap();
        assert!(lambda.norm() < 1e-12);
    }

    #[test]
    fn svm_single_point_and_symmetry() {
        let node = SvmNode::new(&DMatrix::from_element(1, 1, 1.0), &[1.0]);
        // min 2 s^2 + r^2 s.t. s - r >= 1: active, s = 1/3, r = -2/3.
        let z = node.solve(&DVector::zeros(2), 1.0, None).unwrap();
        assert!((z[0] - 1.0 / 3.0).abs() < 1e-9 && (z[1] + 2.0 / 3.0).abs() < 1e-9);
        let v = DVector::from_vec(vec![-40.0, 0.0]);
        let z = node.solve(&v, 1.0, None).unwrap();
        assert!((z[0] - 10.0).abs() < 1e-12 && z[1].abs() < 1e-12);
        assert!(node.solve(&v, 0.0, None).is_err());

        let data = SvmData { a: DMatrix::from_row_slice(2, 2, &[1.0, 2.0, -1.0, -2.0]), labels: vec![1.0, -1.0] };
        let inst = SvmInstance::new(data, 1).unwrap();
        let z = inst.reference().unwrap();
        assert!(z[2].abs() < 1e-8);
        assert!(inst.classifies_all(&z));
        assert!((inst.min_margin(&z) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn separable_generator() {
        let d = gen_separable_svm(40, 3, 1.0, 2).unwrap();
        assert!(d.labels.iter().all(|l| *l == 1.0 || *l == -1.0));
        let inst = SvmInstance::new(d, 4).unwrap();
        let z = inst.reference().unwrap();
        assert!(z.iter().all(|v| v.is_finite()));
        assert!(inst.min_margin(&z) >= 1.0 - 1e-8);
        assert!(gen_separable_svm(10, 2, 0.0, 0).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = gen_gaussian_cs(6, 10, 2, 0.1, 3).unwrap();
        let inst = Instance::Bpdn(BpdnInstance::new(d.a, d.b, 0.3, 3).unwrap());
        let text = inst.to_text();
        assert!(text.starts_with("instance bpdn\nnodes 3\nparam beta 2.9999999999999999e-1\nmatrix A 6 10\n"));
        assert_eq!(Instance::from_text(&text).unwrap(), inst);
        let c = Instance::Consensus(ConsensusInstance::generate(4, 1));
        assert_eq!(Instance::from_text(&c.to_text()).unwrap(), c);
        assert!(Instance::from_text("instance nope\nnodes 2\n").is_err());
        assert!(Instance::from_text("instance consensus\nnodes 2\nvector theta 2\n1 x\n").is_err());
    }
}
