//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use dadmm::graph::{Coloring, Graph};
use dadmm::problems::consensus_node_solve;
use dadmm::solvers::SocPoint;
use nalgebra::{DMatrix, DVector};

/// Minimizer of a convex function on `[lo, hi]` by a dense scan followed by
/// golden-section refinement.
pub fn brute_min_1d(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    const GRID: usize = 2000;
    let h = (hi - lo) / GRID as f64;
    let best = (0..=GRID)
        .map(|i| lo + h * i as f64)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    let (mut a, mut b) = ((best - h).max(lo), (best + h).min(hi));
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..200 {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
        if b - a < 1e-14 * (1.0 + a.abs()) {
            break;
        }
    }
    let mid = (a + b) / 2.0;
    [best, mid].into_iter().min_by(|x, y| f(*x).total_cmp(&f(*y))).unwrap()
}

/// Projection onto the second-order cone by 1-D search over the boundary ray
/// through the point's direction, compared against the apex and the point itself.
pub fn brute_soc_projection(q: &SocPoint) -> SocPoint {
    let norm = q.lambda.norm();
    if norm <= q.t {
        return q.clone();
    }
    let u = &q.lambda / norm;
    let dist = |s: f64| (&u * s - &q.lambda).norm_squared() + (s - q.t).powi(2);
    let s = brute_min_1d(dist, 0.0, norm + q.t.abs() + 1.0);
    SocPoint::new(&u * s, s)
}

/// `1/2 z^T Q z + q^T z` for diagonal `Q`.
pub fn qp_objective(q_diag: &DVector<f64>, q: &DVector<f64>, z: &DVector<f64>) -> f64 {
    0.5 * z.component_mul(q_diag).dot(z) + q.dot(z)
}

/// Solves `min 1/2 z^T diag(q_diag) z + q^T z  s.t.  G z >= h` by enumerating
/// every active set and keeping the best KKT point.
pub fn active_set_qp(q_diag: &DVector<f64>, q: &DVector<f64>, g: &DMatrix<f64>, h: &DVector<f64>) -> Option<DVector<f64>> {
    let n = q_diag.len();
    let m = g.nrows();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = active.len();
        let mut kkt = DMatrix::zeros(n + k, n + k);
        let mut rhs = DVector::zeros(n + k);
        for i in 0..n {
            kkt[(i, i)] = q_diag[i];
            rhs[i] = -q[i];
        }
        for (r, &row) in active.iter().enumerate() {
            for j in 0..n {
                kkt[(j, n + r)] = -g[(row, j)];
                kkt[(n + r, j)] = g[(row, j)];
            }
            rhs[n + r] = h[row];
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        let z = sol.rows(0, n).into_owned();
        let dual_ok = (0..k).all(|r| sol[n + r] >= -1e-10);
        let primal_ok = (0..m).all(|i| g.row(i).transpose().dot(&z) >= h[i] - 1e-10);
        if dual_ok && primal_ok {
            let f = qp_objective(q_diag, q, &z);
            if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                best = Some((f, z));
            }
        }
    }
    best.map(|(_, z)| z)
}

/// Central finite-difference gradient.
pub fn central_difference(f: impl Fn(&DVector<f64>) -> f64, x: &DVector<f64>, h: f64) -> DVector<f64> {
    DVector::from_fn(x.len(), |i, _| {
        let mut up = x.clone();
        let mut down = x.clone();
        up[i] += h;
        down[i] -= h;
        (f(&up) - f(&down)) / (2.0 * h)
    })
}

/// Iterates of a direct transcription of bipartite D-ADMM for scalar
/// consensus: the first colour class solves, then the second, then every
/// node updates its dual. Returns `(x, gamma)` after each iteration.
pub fn bipartite_consensus_transcription(
    theta: &[f64],
    g: &Graph,
    coloring: &Coloring,
    rho: f64,
    iterations: usize,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    assert_eq!(coloring.num_colors(), 2);
    let p = theta.len();
    let first: Vec<usize> = (0..p).filter(|&i| coloring.color(i) == 0).collect();
    let second: Vec<usize> = (0..p).filter(|&i| coloring.color(i) == 1).collect();
    let mut x = vec![0.0; p];
    let mut gamma = vec![0.0; p];
    let mut out = Vec::with_capacity(iterations);
    for _ in 0..iterations {
        for class in [&first, &second] {
            for &i in class {
                let mut sum = 0.0;
                for &j in g.neighbors(i) {
                    sum += x[j];
                }
                let v = gamma[i] - sum * rho;
                let c = g.degree(i) as f64 * rho / 2.0;
                x[i] = consensus_node_solve(theta[i], v, c);
            }
        }
        for i in 0..p {
            let mut diff = 0.0;
            for &j in g.neighbors(i) {
                diff += x[i] - x[j];
            }
            gamma[i] += diff * rho;
        }
        out.push((x.clone(), gamma.clone()));
    }
    out
}

/// Stacked edge residual `r = (B^T (x) I) x`, edge `(i, j)` with `i < j`
/// contributing `x_i - x_j`.
pub fn edge_residual(g: &Graph, x: &[DVector<f64>]) -> Vec<DVector<f64>> {
    g.edges().iter().map(|&(i, j)| &x[i] - &x[j]).collect()
}

pub fn stacked_norm_squared(v: &[DVector<f64>]) -> f64 {
    v.iter().map(|e| e.norm_squared()).sum()
}

/// `V = (1/rho) ||lambda - lambda*||^2 + rho ||A_2 (x_2 - x_2*)||^2` where
/// `A_2` is the incidence block of the second colour class.
pub fn lyapunov(
    g: &Graph,
    coloring: &Coloring,
    rho: f64,
    lambda: &[DVector<f64>],
    lambda_star: &[DVector<f64>],
    x: &[DVector<f64>],
    x_star: &DVector<f64>,
) -> f64 {
    let dual: f64 = lambda.iter().zip(lambda_star).map(|(l, s)| (l - s).norm_squared()).sum();
    let n = x_star.len();
    let second = |p: usize| coloring.color(p) == 1;
    let mut primal = 0.0;
    for &(i, j) in g.edges() {
        let mut e = DVector::zeros(n);
        if second(i) {
            e += &x[i] - x_star;
        }
        if second(j) {
            e -= &x[j] - x_star;
        }
        primal += e.norm_squared();
    }
    dual / rho + rho * primal
}
