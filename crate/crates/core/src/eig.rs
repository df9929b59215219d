//! Dense solver for `(A − λB + λ²C)x = 0`.
//!
//! `A` and `C` are positive definite for every assembled pencil, so `λ = 0`
//! is never an eigenvalue and `μ = 1/λ` solves `C − μB + μ²A`. With
//! `A = LLᵀ` this is the monic problem `Ĉ − μB̂ + μ²I`, linearised as
//!
//! ```text
//! K = [[0, I], [−Ĉ, B̂]],   Ĉ = L⁻¹CL⁻ᵀ,  B̂ = L⁻¹BL⁻ᵀ,
//! ```
//!
//! and solved by a real Schur decomposition. The small `|λ|` that matter are
//! the dominant `|μ|`, which the decomposition resolves to full relative
//! accuracy even when `‖A‖` is huge (spectral bases). Eigenvectors come from
//! inverse iteration on `T(λ)`.

use nalgebra::{Cholesky, DMatrix, DVector, Schur};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cnorm;
use crate::pencil::DiscretePencil;

/// Default relative tolerance for grouping eigenvalues into clusters.
pub const DEFAULT_CLUSTER_TOL: f64 = 2e-3;

const SCHUR_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub lambda: Complex64,
    /// Backward error of the stored eigenpair.
    pub residual: f64,
    /// Angular mode, `-1` on an interval.
    pub mode: i64,
    pub mesh_n: usize,
    pub stable: bool,
    /// Number of computed eigenvalues merged into this record.
    #[serde(default = "one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

/// First companion form: `M = blockdiag(A, I)`, `L = [[B, −C], [I, 0]]`, so
/// that `Mx = λLx` with `x = (v, λv)`.
pub fn linearize(p: &DiscretePencil) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if Cholesky::new(p.c.clone()).is_none() {
        return Err(Error::NotPositiveDefinite("C"));
    }
    let n = p.n;
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    let mut l = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&p.a);
    l.view_mut((0, 0), (n, n)).copy_from(&p.b);
    l.view_mut((0, n), (n, n)).copy_from(&(-&p.c));
    for i in 0..n {
        m[(n + i, n + i)] = 1.0;
        l[(n + i, i)] = 1.0;
    }
    Ok((m, l))
}

/// Eigenvalues of `[[0, I], [−L⁻¹YL⁻ᵀ, L⁻¹XL⁻ᵀ]]` where `LLᵀ` factors `lead`,
/// i.e. the roots `μ` of `μ²·lead − μX + Y`.
fn companion_roots(lead: &DMatrix<f64>, x: &DMatrix<f64>, y: &DMatrix<f64>, name: &'static str) -> Result<Vec<Complex64>> {
    let n = lead.nrows();
    let chol = Cholesky::new(lead.clone()).ok_or(Error::NotPositiveDefinite(name))?;
    let linv = chol.l().try_inverse().ok_or(Error::Singular(0.0))?;
    let yh = &linv * y * linv.transpose();
    let xh = &linv * x * linv.transpose();
    let mut k = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        k[(i, n + i)] = 1.0;
    }
    k.view_mut((n, 0), (n, n)).copy_from(&(-yh));
    k.view_mut((n, n), (n, n)).copy_from(&xh);
    if !k.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("companion matrix"));
    }
    let schur = Schur::try_new(k, f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::NoConvergence {
        iterations: SCHUR_MAX_ITER,
        found: 0,
        total: 2 * n,
    })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// All `2N` eigenvalues of the pencil, unordered.
///
/// With `A ≻ 0` (every assembled pencil) the reversed polynomial
/// `μ²A − μB + C`, `μ = 1/λ`, is solved, which keeps the small eigenvalues
/// accurate. Otherwise the forward form is factored through `C`.
pub fn pencil_eigenvalues(p: &DiscretePencil) -> Result<Vec<Complex64>> {
    if Cholesky::new(p.c.clone()).is_none() {
        return Err(Error::NotPositiveDefinite("C"));
    }
    if Cholesky::new(p.a.clone()).is_none() {
        return companion_roots(&p.c, &p.b, &p.a, "C");
    }
    companion_roots(&p.a, &p.b, &p.c, "A")?
        .into_iter()
        .map(|m| if m.norm() == 0.0 { Err(Error::Singular(0.0)) } else { Ok(1.0 / m) })
        .collect()
}

fn lu_solve(t: &DMatrix<Complex64>, rhs: &DVector<Complex64>) -> Option<DVector<Complex64>> {
    t.clone().lu().solve(rhs).filter(|x| x.iter().all(|v| v.is_finite()))
}

/// Eigenvector at `λ` by inverse iteration, with its backward error.
pub fn eigenvector(p: &DiscretePencil, lambda: Complex64) -> (DVector<Complex64>, f64) {
    let n = p.n;
    let t_exact = p.eval(lambda);
    let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + 0.37 * (i as f64).sin(), 0.11 * i as f64 % 1.0));
    let mut t = t_exact.clone();
    for it in 0..4 {
        match lu_solve(&t, &v) {
            Some(x) => {
                let nx = cnorm(&x);
                v = x / Complex64::new(nx, 0.0);
            }
            None => {
                let shift = 1e-14 * (1.0 + lambda.norm()) * (it + 1) as f64;
                t = p.eval(lambda + shift);
            }
        }
    }
    let r = cnorm(&(&t_exact * &v));
    (v.clone(), r / (p.scale_at(lambda) * cnorm(&v)))
}

/// Backward error `‖T(λ)v‖ / ((‖A‖ + |λ|‖B‖ + |λ|²‖C‖)‖v‖)`.
pub fn backward_error(p: &DiscretePencil, lambda: Complex64, v: &DVector<Complex64>) -> f64 {
    cnorm(&(p.eval(lambda) * v)) / (p.scale_at(lambda) * cnorm(v))
}

/// All `2N` eigenvalues with residuals, sorted by modulus; `stable` is
/// `residual ≤ tol`. Each record has multiplicity 1.
pub fn solve_quadratic(p: &DiscretePencil, tol: f64) -> Result<Vec<EigenvalueRecord>> {
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1e-4], got {tol}")));
    }
    let mut lambdas = pencil_eigenvalues(p)?;
    sort_by_modulus(&mut lambdas);
    let mode = p.mode();
    Ok(lambdas
        .par_iter()
        .map(|&lambda| {
            let (_, residual) = eigenvector(p, lambda);
            EigenvalueRecord { lambda, residual, mode, mesh_n: p.n, stable: residual <= tol, multiplicity: 1 }
        })
        .collect())
}

fn sort_by_modulus(v: &mut [Complex64]) {
    v.sort_by(|a, b| {
        a.norm()
            .total_cmp(&b.norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm()).max(1.0)
}

/// Merge eigenvalues closer than `rel_tol·max(|λ|, 1)` (single linkage) into
/// one record carrying the mean, the worst residual and the group size.
pub fn cluster_eigenvalues(records: &[EigenvalueRecord], rel_tol: f64) -> Vec<EigenvalueRecord> {
    let n = records.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if records[i].mode == records[j].mode && close(records[i].lambda, records[j].lambda, rel_tol) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut out: Vec<EigenvalueRecord> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        let r = &records[i];
        if slot[root] == usize::MAX {
            slot[root] = out.len();
            out.push(EigenvalueRecord { lambda: r.lambda * r.multiplicity as f64, ..r.clone() });
        } else {
            let o = &mut out[slot[root]];
            o.lambda += r.lambda * r.multiplicity as f64;
            o.multiplicity += r.multiplicity;
            o.residual = o.residual.max(r.residual);
            o.stable &= r.stable;
        }
    }
    for o in &mut out {
        o.lambda /= o.multiplicity as f64;
        if o.lambda.im.abs() <= 1e-12 * o.lambda.norm() {
            o.lambda.im = 0.0;
        }
    }
    out.sort_by(|a, b| {
        a.lambda
            .norm()
            .total_cmp(&b.lambda.norm())
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    out
}

/// Keeps the coarse records; a record stays stable only if it was stable and
/// some fine record of the same mode lies within `match_tol·(1 + |λ|)`.
pub fn filter_converged(coarse: &[EigenvalueRecord], fine: &[EigenvalueRecord], match_tol: f64) -> Vec<EigenvalueRecord> {
    coarse
        .iter()
        .map(|c| {
            let partner = fine
                .iter()
                .any(|f| f.mode == c.mode && (f.lambda - c.lambda).norm() <= match_tol * (1.0 + c.lambda.norm()));
            EigenvalueRecord { stable: c.stable && partner, ..c.clone() }
        })
        .collect()
}

/// Largest distance from an eigenvalue to the conjugate of its nearest
/// partner, relative to `1 + |λ|`.
pub fn conjugate_closure_defect(lambdas: &[Complex64]) -> f64 {
    lambdas
        .iter()
        .map(|l| {
            lambdas
                .iter()
                .map(|m| (l.conj() - m).norm())
                .fold(f64::INFINITY, f64::min)
                / (1.0 + l.norm())
        })
        .fold(0.0, f64::max)
}

/// Largest `N` accepted by [`det_polynomial_eigenvalues`].
pub const DET_ORACLE_MAX_N: usize = 6;

/// Eigenvalues as the roots of `det T(λ)`, for small pencils only.
///
/// The degree-`2N` polynomial is interpolated from determinants at `2N + 1`
/// points on a circle of radius `ρ = (det A / det C)^{1/2N}` and its roots
/// are found by Aberth iteration in `λ/ρ`. Independent of the linearisation.
pub fn det_polynomial_eigenvalues(p: &DiscretePencil) -> Result<Vec<Complex64>> {
    if p.n == 0 || p.n > DET_ORACLE_MAX_N {
        return Err(Error::InvalidArgument(format!("determinant oracle needs 1 <= N <= {DET_ORACLE_MAX_N}, got {}", p.n)));
    }
    let d = 2 * p.n;
    let det_c = p.c.determinant();
    let det_a = p.a.determinant();
    if !(det_c.abs() > 0.0 && det_a.abs() > 0.0) {
        return Err(Error::Singular(det_c.abs().min(det_a.abs())));
    }
    let rho = (det_a / det_c).abs().powf(1.0 / d as f64);
    let m = d + 1;
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
    let values: Vec<Complex64> = (0..m).map(|k| p.eval(omega(k) * rho).determinant()).collect();
    // coefficients of P(μ) = det T(ρμ), lowest degree first
    let coeffs: Vec<Complex64> = (0..=d)
        .map(|j| values.iter().enumerate().map(|(k, v)| v * omega(j * k % m).conj()).sum::<Complex64>() / m as f64)
        .collect();
    let lead = coeffs[d];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let horner = |z: Complex64| {
        let mut v = Complex64::new(0.0, 0.0);
        let mut dv = Complex64::new(0.0, 0.0);
        for c in monic.iter().rev() {
            dv = dv * z + v;
            v = v * z + c;
        }
        (v, dv)
    };
    let mut roots: Vec<Complex64> =
        (0..d).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64 + 0.4)).collect();
    for _ in 0..500 {
        let mut biggest: f64 = 0.0;
        for i in 0..d {
            let (v, dv) = horner(roots[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| 1.0 / (roots[i] - roots[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            roots[i] -= step;
            biggest = biggest.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if biggest < 1e-16 {
            break;
        }
    }
    let mut out: Vec<Complex64> = roots.iter().map(|r| r * rho).collect();
    sort_by_modulus(&mut out);
    Ok(out)
}
