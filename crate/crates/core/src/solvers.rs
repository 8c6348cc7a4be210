//! Numerical kernels shared by the node subproblems.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("non-finite value in {0} at iteration {1}")]
    NonFinite(&'static str, usize),
    #[error("iteration budget of {iterations} exhausted (residual {residual:e})")]
    Budget {
        iterations: usize,
        residual: f64,
        best: DVector<f64>,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Composite problem `min f(x) + g(x)` for FISTA: `f` smooth with
/// `lipschitz`-continuous gradient, `g` accessed through its proximal map.
pub struct ProxProblem<'a> {
    pub gradient: &'a dyn Fn(&DVector<f64>) -> DVector<f64>,
    /// Full composite objective `f + g`, used for restarts and for the
    /// monotone check of the plain iteration.
    pub objective: &'a dyn Fn(&DVector<f64>) -> f64,
    /// `prox(eta, step)` = argmin_z g(z) + ||z - eta||^2 / (2 step).
    pub prox: &'a dyn Fn(&DVector<f64>, f64) -> DVector<f64>,
    pub lipschitz: f64,
    pub start: DVector<f64>,
    pub max_iterations: usize,
    /// Stop once `||x_{k+1} - x_k|| <= tolerance (1 + ||x_k||)`.
    pub tolerance: f64,
    /// `false` runs the plain proximal-gradient iteration.
    pub accelerated: bool,
}

#[derive(Clone, Debug)]
pub struct FistaOutcome {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
}

pub const FISTA_TOLERANCE: f64 = 1e-8;
pub const FISTA_MAX_ITERATIONS: usize = 500;

/// Accelerated proximal gradient with momentum
/// `t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2` and restart whenever the
/// objective increases.
pub fn fista(p: &ProxProblem<'_>) -> Result<FistaOutcome, SolverError> {
    if !(p.lipschitz > 0.0 && p.lipschitz.is_finite()) {
        return Err(SolverError::InvalidInput(format!(
            "Lipschitz constant {} must be positive",
            p.lipschitz
        )));
    }
    let step = 1.0 / p.lipschitz;
    let mut x = p.start.clone();
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut value = (p.objective)(&x);
    if !value.is_finite() {
        return Err(SolverError::NonFinite("objective", 0));
    }
    for k in 1..=p.max_iterations {
        let mut eta = (p.gradient)(&y);
        if eta.iter().any(|g| !g.is_finite()) {
            return Err(SolverError::NonFinite("gradient", k));
        }
        eta.axpy(1.0, &y, -step);
        let next = (p.prox)(&eta, step);
        let next_value = (p.objective)(&next);
        if !next_value.is_finite() || next.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite("prox", k));
        }
        let change = next.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let scale = 1.0 + x.norm();
        y.copy_from(&next);
        if p.accelerated {
            if next_value > value {
                t = 1.0;
            } else {
                let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
                let beta = (t - 1.0) / t_next;
                y.axpy(-beta, &x, 1.0 + beta);
                t = t_next;
            }
        }
        x = next;
        value = next_value;
        if change <= p.tolerance * scale {
            return Ok(FistaOutcome { x, iterations: k, converged: true });
        }
    }
    Ok(FistaOutcome { x, iterations: p.max_iterations, converged: false })
}

/// Proximal map of `tau ||.||_1`: componentwise `sign(x) max(|x| - tau, 0)`.
pub fn soft_threshold(x: &DVector<f64>, tau: f64) -> DVector<f64> {
    x.map(|v| {
        let m = v.abs() - tau;
        if m > 0.0 {
            m.copysign(v)
        } else {
            0.0
        }
    })
}

/// Point `(lambda, t)` of `R^m x R`.
#[derive(Clone, Debug, PartialEq)]
pub struct SocPoint {
    pub lambda: DVector<f64>,
    pub t: f64,
}

impl SocPoint {
    pub fn new(lambda: DVector<f64>, t: f64) -> Self {
        Self { lambda, t }
    }

    /// Stacks `(lambda, t)` into one vector.
    pub fn to_vector(&self) -> DVector<f64> {
        let m = self.lambda.len();
        DVector::from_fn(m + 1, |i, _| if i < m { self.lambda[i] } else { self.t })
    }

    pub fn from_vector(v: &DVector<f64>) -> Self {
        let m = v.len() - 1;
        Self { lambda: v.rows(0, m).into_owned(), t: v[m] }
    }
}

/// Euclidean projection onto the second-order cone `{(lambda, t) : ||lambda|| <= t}`.
pub fn project_soc(q: &SocPoint) -> SocPoint {
    let norm = q.lambda.norm();
    if q.t >= norm {
        q.clone()
    } else if q.t <= -norm {
        SocPoint::new(DVector::zeros(q.lambda.len()), 0.0)
    } else {
        let scale = (q.t + norm) / 2.0;
        let lambda = &q.lambda * (scale / norm);
        // Rounding can leave ||lambda|| an ulp above scale; lifting t keeps the
        // result inside the cone so a second projection returns it unchanged.
        let t = scale.max(lambda.norm());
        SocPoint::new(lambda, t)
    }
}

/// Minimizer of `||x||_1 + r^T x + (delta/2) ||x||^2` for `r = A^T lambda`.
pub fn x_of_lambda(a: &DMatrix<f64>, lambda: &DVector<f64>, delta: f64) -> DVector<f64> {
    let r = a.tr_mul(lambda);
    r.map(|ri| {
        if ri < -1.0 {
            -(ri + 1.0) / delta
        } else if ri > 1.0 {
            -(ri - 1.0) / delta
        } else {
            0.0
        }
    })
}

/// `phi(lambda) = -inf_x ||x||_1 + (A^T lambda)^T x + (delta/2)||x||^2`
/// `= sum_i max(|r_i| - 1, 0)^2 / (2 delta)`.
pub fn phi_value(a: &DMatrix<f64>, lambda: &DVector<f64>, delta: f64) -> f64 {
    a.tr_mul(lambda)
        .iter()
        .map(|ri| (ri.abs() - 1.0).max(0.0).powi(2))
        .sum::<f64>()
        / (2.0 * delta)
}

/// Gradient of [`phi_value`]: `-A x(lambda)`.
pub fn phi_gradient(a: &DMatrix<f64>, lambda: &DVector<f64>, delta: f64) -> DVector<f64> {
    -(a * x_of_lambda(a, lambda, delta))
}

const POWER_ITERATIONS: usize = 200;
const POWER_TOLERANCE: f64 = 1e-10;

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration from the all-ones vector. If the ones vector is (numerically)
/// annihilated, the iteration restarts from a fixed irregular vector.
pub fn largest_eigenvalue_psd(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let scale = m.amax();
    if scale == 0.0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    if (m * &v).norm() <= 1e-12 * scale {
        v = DVector::from_fn(n, |i, _| 1.0 + ((i as f64 + 1.0) * 0.618_033_988_75).fract());
        v.normalize_mut();
    }
    let mut estimate = 0.0;
    for _ in 0..POWER_ITERATIONS {
        let w = m * &v;
        let next = v.dot(&w);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        v = w / norm;
        let settled = (next - estimate).abs() <= POWER_TOLERANCE * next.abs();
        estimate = next;
        if settled {
            break;
        }
    }
    estimate
}

/// `sigma_max(A)^2`, computed on the smaller of the two Gram matrices.
pub fn spectral_norm_squared(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    if a.nrows() < a.ncols() {
        largest_eigenvalue_psd(&(a * a.transpose()))
    } else {
        largest_eigenvalue_psd(&a.tr_mul(a))
    }
}

/// Lipschitz constant of the LASSO node gradient: `sigma_max(A)^2 / delta + 2c`.
pub fn lipschitz_bound(a: &DMatrix<f64>, delta: f64, c: f64) -> f64 {
    spectral_norm_squared(a) / delta + 2.0 * c
}

pub const QP_MAX_ITERATIONS: usize = 200_000;
const POLISH_EVERY: usize = 8;

/// Solves the equality-constrained problem on the support of `mu`, giving
/// the exact KKT point when that support is the optimal active set.
fn polish(
    mu: &DVector<f64>,
    q_diag: &DVector<f64>,
    q_inv: &DVector<f64>,
    q: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
) -> Option<(DVector<f64>, DVector<f64>)> {
    let active: Vec<usize> = (0..mu.len()).filter(|&i| mu[i] > 0.0).collect();
    if active.is_empty() || active.len() > q_diag.len() {
        return None;
    }
    let ga = g.select_rows(&active);
    let mut scaled = ga.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= q_inv[j];
    }
    let lhs = &scaled * ga.transpose();
    let rhs = h.select_rows(&active) + &scaled * q;
    let mu_a = lhs.cholesky()?.solve(&rhs);
    if mu_a.iter().any(|m| !(*m >= 0.0)) {
        return None;
    }
    let mut full = DVector::zeros(mu.len());
    for (k, &i) in active.iter().enumerate() {
        full[i] = mu_a[k];
    }
    let z = (g.tr_mul(&full) - q).component_mul(q_inv);
    Some((full, z))
}

/// Diagnostics of [`qp_solve`].
#[derive(Clone, Debug)]
pub struct QpSolution {
    pub z: DVector<f64>,
    pub multipliers: DVector<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Minimizes `1/2 z^T diag(q_diag) z + q^T z` subject to `G z >= h`.
///
/// Runs accelerated projected gradient ascent on the Lagrange dual from
/// `mu = 0` with step `1 / ||G Q^-1 G^T||_2`, recovering
/// `z = Q^-1 (G^T mu - q)`, until the KKT residual (primal infeasibility and complementary slackness, both in
/// max-norm) drops to `tol`. Every few iterations the equality-constrained
/// problem on the current support of `mu` is solved directly and accepted if
/// it passes the same test.
pub fn qp_solve(
    q_diag: &DVector<f64>,
    q: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
    tol: f64,
) -> Result<DVector<f64>, SolverError> {
    qp_solve_detailed(q_diag, q, g, h, tol, QP_MAX_ITERATIONS).map(|s| s.z)
}

pub fn qp_solve_detailed(
    q_diag: &DVector<f64>,
    q: &DVector<f64>,
    g: &DMatrix<f64>,
    h: &DVector<f64>,
    tol: f64,
    max_iterations: usize,
) -> Result<QpSolution, SolverError> {
    let n = q_diag.len();
    if q.len() != n || g.ncols() != n || g.nrows() != h.len() {
        return Err(SolverError::InvalidInput("dimension mismatch".into()));
    }
    if q_diag.iter().any(|d| !(*d > 0.0)) {
        return Err(SolverError::InvalidInput("Q must have a positive diagonal".into()));
    }
    let q_inv = q_diag.map(|d| 1.0 / d);
    let recover = |mu: &DVector<f64>| (g.tr_mul(mu) - q).component_mul(&q_inv);
    let residual = |mu: &DVector<f64>, gz: &DVector<f64>| {
        let mut worst = 0.0_f64;
        for i in 0..h.len() {
            let slack = gz[i] - h[i];
            worst = worst.max((-slack).max(0.0)).max((mu[i] * slack).abs());
        }
        worst
    };

    let mut mu = DVector::zeros(h.len());
    let mut z = recover(&mu);
    let mut gz = g * &z;
    let mut res = residual(&mu, &gz);
    if res <= tol {
        return Ok(QpSolution { z, multipliers: mu, iterations: 0, residual: res });
    }
    let mut scaled = g.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= q_inv[j].sqrt();
    }
    let dual_lipschitz = largest_eigenvalue_psd(&(&scaled * scaled.transpose()));
    let step = 1.0 / dual_lipschitz;
    let dual_value = |mu: &DVector<f64>, z: &DVector<f64>| h.dot(mu) - 0.5 * z.component_mul(q_diag).dot(z);

    // Nesterov extrapolation, restarted whenever the dual objective drops.
    let mut y = mu.clone();
    let mut t = 1.0_f64;
    let mut value = dual_value(&mu, &z);
    for k in 1..=max_iterations {
        let gy = g * recover(&y);
        let mut next = y.clone();
        for i in 0..next.len() {
            next[i] = (y[i] + step * (h[i] - gy[i])).max(0.0);
        }
        z = recover(&next);
        gz = g * &z;
        if z.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite("qp primal", k));
        }
        res = residual(&next, &gz);
        if res <= tol {
            return Ok(QpSolution { z, multipliers: next, iterations: k, residual: res });
        }
        if k % POLISH_EVERY == 0 {
            if let Some((mu_p, z_p)) = polish(&next, q_diag, &q_inv, q, g, h) {
                let gz_p = g * &z_p;
                let res_p = residual(&mu_p, &gz_p);
                if res_p <= tol {
                    return Ok(QpSolution { z: z_p, multipliers: mu_p, iterations: k, residual: res_p });
                }
            }
        }
        let next_value = dual_value(&next, &z);
        if next_value < value {
            t = 1.0;
            y.copy_from(&next);
        } else {
            let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
            let beta = (t - 1.0) / t_next;
            y.copy_from(&next);
            y.axpy(-beta, &mu, 1.0 + beta);
            t = t_next;
        }
        value = next_value;
        mu = next;
    }
    Err(SolverError::Budget { iterations: max_iterations, residual: res, best: z })
}
