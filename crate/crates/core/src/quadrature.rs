//! Gauss–Legendre rules and Jacobi polynomial evaluation.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes come out in ascending order. Newton iteration on `P_n` from the
/// Tricomi initial guess; converged to machine precision for `n` up to a few
/// thousand.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "gauss_legendre needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (t, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        t.iter().map(|&ti| mid + half * ti).collect(),
        w.iter().map(|&wi| half * wi).collect(),
    )
}

/// Values of `P_k^{(α,β)}(t)` for `k = 0..n`.
pub fn jacobi_values(n: usize, alpha: f64, beta: f64, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    if n == 1 {
        return out;
    }
    out.push(0.5 * (alpha - beta + (alpha + beta + 2.0) * t));
    for k in 2..n {
        let kf = k as f64;
        let s = 2.0 * kf + alpha + beta;
        let a1 = 2.0 * kf * (kf + alpha + beta) * (s - 2.0);
        let a2 = (s - 1.0) * (alpha * alpha - beta * beta);
        let a3 = (s - 2.0) * (s - 1.0) * s;
        let a4 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * s;
        let next = ((a2 + a3 * t) * out[k - 1] - a4 * out[k - 2]) / a1;
        out.push(next);
    }
    out
}

/// `P_k^{(α,β)}` and its first two derivatives at `t`, for `k = 0..n`.
///
/// Uses `d/dt P_k^{(α,β)} = (k+α+β+1)/2 · P_{k-1}^{(α+1,β+1)}`.
pub fn jacobi_with_derivatives(
    n: usize,
    alpha: f64,
    beta: f64,
    t: f64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let p = jacobi_values(n, alpha, beta, t);
    let p1 = jacobi_values(n.saturating_sub(1), alpha + 1.0, beta + 1.0, t);
    let p2 = jacobi_values(n.saturating_sub(2), alpha + 2.0, beta + 2.0, t);
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for k in 1..n {
        let kf = k as f64;
        d1[k] = 0.5 * (kf + alpha + beta + 1.0) * p1[k - 1];
        if k >= 2 {
            d2[k] = 0.25 * (kf + alpha + beta + 1.0) * (kf + alpha + beta + 2.0) * p2[k - 2];
        }
    }
    (p, d1, d2)
}
