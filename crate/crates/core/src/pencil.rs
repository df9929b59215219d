//! Galerkin assembly of the quadratic pencil `T(λ) = A − λB + λ²C`.
//!
//! Weak forms (real symmetric, since every basis function is real):
//!
//! ```text
//! A  ↔ ∫ q P₀u P₀φ           B1 ↔ ∫ q (P₀u φ + u P₀φ)      B2 = S ↔ ∫ ∇u·∇φ
//! C  ↔ ∫ (1+q) u φ           Sq ↔ ∫ q ∇u·∇φ                M ↔ ∫ u φ
//! G  ↔ ∫ (∇u·∇q) φ           (u = basis column, φ = basis row)
//! ```
//!
//! Integrating `∫ q P₀u φ` by parts on clamped functions gives
//! `B1 = 2 Sq + G + Gᵀ`, which is checked by [`ibp_identity_residual`].
//!
//! On a disk each angular mode `u = U(r) e^{ilθ}` is treated separately, with
//! `P₀ → −(∂ᵣ² + r⁻¹∂ᵣ − l²/r²)` and measure `r dr` (the common factor `2π` is
//! dropped).
//!
//! Bases:
//! * interval, spectral: `(1 − t²)² P_k^{(2,2)}(t)` on the reference segment;
//! * interval, Hermite: clamped cubic Hermite elements;
//! * disk mode: `ρ^l (1 − ρ²)² P_k^{(4,l)}(2ρ² − 1)`, `ρ = r/R`.
//!
//! The spectral and disk bases are orthonormalised against `M` through a
//! Cholesky factor, so `M = I` after assembly.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bilinear, cnorm, spd_condition, sym_min_eig, symmetry_defect, symmetrize};
use crate::profile::RefractiveProfile;
use crate::quadrature::{gauss_legendre, jacobi_with_derivatives};

/// Largest accepted condition number of the (diagonally scaled) Gram matrix.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { a: f64, b: f64 },
    DiskMode { r: f64, l: u32 },
    /// Matrices supplied directly.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalBasis {
    #[default]
    Spectral,
    Hermite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuxForms {
    pub s: DMatrix<f64>,
    pub sq: DMatrix<f64>,
    pub m: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub b1: DMatrix<f64>,
    pub b2: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePencil {
    pub n: usize,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    pub domain: Domain,
    pub aux: Option<AuxForms>,
    /// `‖∇q‖_∞` of the profile the pencil was assembled from.
    pub grad_q_sup: f64,
}

impl DiscretePencil {
    /// Pencil from explicit matrices; `C` must be symmetric positive definite.
    pub fn from_matrices(a: DMatrix<f64>, b: DMatrix<f64>, c: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        for m in [&a, &b, &c] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.ncols().max(m.nrows()) });
            }
        }
        if Cholesky::new(c.clone()).is_none() {
            return Err(Error::NotPositiveDefinite("C"));
        }
        Ok(DiscretePencil { n, a, b, c, domain: Domain::Raw, aux: None, grad_q_sup: 0.0 })
    }

    /// `T(λ) = A − λB + λ²C`.
    pub fn eval(&self, lambda: Complex64) -> DMatrix<Complex64> {
        let mut t = DMatrix::from_element(self.n, self.n, Complex64::new(0.0, 0.0));
        let l2 = lambda * lambda;
        for j in 0..self.n {
            for i in 0..self.n {
                t[(i, j)] = self.a[(i, j)] - lambda * self.b[(i, j)] + l2 * self.c[(i, j)];
            }
        }
        t
    }

    /// Frobenius norms `(‖A‖, ‖B‖, ‖C‖)`.
    pub fn norms(&self) -> (f64, f64, f64) {
        (self.a.norm(), self.b.norm(), self.c.norm())
    }

    /// `‖A‖ + |λ|‖B‖ + |λ|²‖C‖`.
    pub fn scale_at(&self, lambda: Complex64) -> f64 {
        let (na, nb, nc) = self.norms();
        let r = lambda.norm();
        na + r * nb + r * r * nc
    }

    /// Largest relative symmetry defect over `A`, `B`, `C`.
    pub fn hermitian_residual(&self) -> f64 {
        [&self.a, &self.b, &self.c].iter().map(|m| symmetry_defect(m)).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of `A = T(0)`.
    pub fn t0_min_eigenvalue(&self) -> f64 {
        sym_min_eig(&self.a)
    }

    pub fn mode(&self) -> i64 {
        match self.domain {
            Domain::DiskMode { l, .. } => l as i64,
            _ => -1,
        }
    }
}

/// Basis data tabulated at quadrature nodes (rows) for each basis function
/// (columns).
struct Tabulation {
    w: Vec<f64>,
    q: Vec<f64>,
    /// `q'` (radial derivative on a disk).
    dq: Vec<f64>,
    val: DMatrix<f64>,
    /// Radial (or `x`) derivative.
    d1: DMatrix<f64>,
    /// Angular gradient part `l u / r` (zero on an interval).
    ang: DMatrix<f64>,
    lap: DMatrix<f64>,
}

fn weighted(left: &DMatrix<f64>, right: &DMatrix<f64>, w: &[f64]) -> DMatrix<f64> {
    let mut scaled = right.clone();
    for (i, wi) in w.iter().enumerate() {
        scaled.row_mut(i).scale_mut(*wi);
    }
    left.transpose() * scaled
}

fn combine(w: &[f64], f: impl Fn(usize) -> f64) -> Vec<f64> {
    w.iter().enumerate().map(|(i, wi)| wi * f(i)).collect()
}

fn assemble(tab: Tabulation, domain: Domain, grad_q_sup: f64, orthonormalize: bool) -> Result<DiscretePencil> {
    let w = &tab.w;
    let wq = combine(w, |i| tab.q[i]);
    let w1q = combine(w, |i| 1.0 + tab.q[i]);
    let wdq = combine(w, |i| tab.dq[i]);
    let mut a = weighted(&tab.lap, &tab.lap, &wq);
    let lap_val = weighted(&tab.lap, &tab.val, &wq);
    let mut b1 = &lap_val + lap_val.transpose();
    let mut s = weighted(&tab.d1, &tab.d1, w) + weighted(&tab.ang, &tab.ang, w);
    let mut sq = weighted(&tab.d1, &tab.d1, &wq) + weighted(&tab.ang, &tab.ang, &wq);
    let mut c = weighted(&tab.val, &tab.val, &w1q);
    let mut m = weighted(&tab.val, &tab.val, w);
    let mut g = weighted(&tab.val, &tab.d1, &wdq);
    for x in [&mut a, &mut b1, &mut s, &mut sq, &mut c, &mut m] {
        symmetrize(x);
    }
    if orthonormalize {
        let n = m.nrows();
        let d = DVector::from_iterator(n, (0..n).map(|k| 1.0 / m[(k, k)].sqrt()));
        let dm = DMatrix::from_diagonal(&d);
        let scaled = &dm * &m * &dm;
        let cond = spd_condition(&scaled)?;
        if cond > GRAM_CONDITION_LIMIT {
            return Err(Error::Conditioning(cond));
        }
        let chol = Cholesky::new(scaled).ok_or(Error::NotPositiveDefinite("gram matrix"))?;
        let linv = chol.l().try_inverse().ok_or(Error::Singular(0.0))?;
        let t = &dm * linv.transpose();
        let tt = t.transpose();
        for x in [&mut a, &mut b1, &mut s, &mut sq, &mut c, &mut m, &mut g] {
            *x = &tt * &*x * &t;
        }
        for x in [&mut a, &mut b1, &mut s, &mut sq, &mut c, &mut m] {
            symmetrize(x);
        }
    }
    let b2 = s.clone();
    let b = &b1 + &b2;
    let n = a.nrows();
    if Cholesky::new(c.clone()).is_none() {
        return Err(Error::NotPositiveDefinite("C"));
    }
    Ok(DiscretePencil {
        n,
        a,
        b,
        c,
        domain,
        aux: Some(AuxForms { s, sq, m, g, b1, b2 }),
        grad_q_sup,
    })
}

fn extra_nodes(profile: &RefractiveProfile) -> usize {
    if profile.is_constant() {
        0
    } else {
        48
    }
}

fn check_profile(profile: &RefractiveProfile, lo: f64, hi: f64) -> Result<()> {
    let tol = 1e-12 * (1.0 + hi.abs().max(lo.abs()));
    if profile.lo > lo + tol || profile.hi < hi - tol {
        return Err(Error::InvalidArgument(format!(
            "profile is defined on [{}, {}] but the domain is [{lo}, {hi}]",
            profile.lo, profile.hi
        )));
    }
    Ok(())
}

/// Spectral interval pencil on `(a, b)`.
pub fn assemble_interval(profile: &RefractiveProfile, n: usize, a: f64, b: f64) -> Result<DiscretePencil> {
    assemble_interval_with(profile, n, a, b, IntervalBasis::Spectral)
}

/// Interval pencil with an explicit basis. For [`IntervalBasis::Hermite`]
/// `n` must be even; the mesh has `n/2 + 1` uniform elements.
pub fn assemble_interval_with(
    profile: &RefractiveProfile,
    n: usize,
    a: f64,
    b: f64,
    basis: IntervalBasis,
) -> Result<DiscretePencil> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("basis size must be at least 4, got {n}")));
    }
    if !(b > a) {
        return Err(Error::InvalidArgument(format!("empty interval ({a}, {b})")));
    }
    check_profile(profile, a, b)?;
    let tab = match basis {
        IntervalBasis::Spectral => tabulate_spectral(profile, n, a, b)?,
        IntervalBasis::Hermite => {
            if n % 2 != 0 {
                return Err(Error::InvalidArgument(format!("Hermite basis size must be even, got {n}")));
            }
            tabulate_hermite(profile, n / 2 + 1, a, b)?
        }
    };
    assemble(tab, Domain::Interval { a, b }, profile.grad_q_sup(), basis == IntervalBasis::Spectral)
}

fn finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("profile value at a quadrature node"))
    }
}

/// Values, first and second `t`-derivatives of `(1 − t²)² P_k^{(2,2)}(t)`.
pub fn interval_basis_at(n: usize, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let (p, p1, p2) = jacobi_with_derivatives(n, 2.0, 2.0, t);
    let one = 1.0 - t * t;
    let (w, w1, w2) = (one * one, -4.0 * t * one, 12.0 * t * t - 4.0);
    let v = (0..n).map(|k| w * p[k]).collect();
    let d1 = (0..n).map(|k| w1 * p[k] + w * p1[k]).collect();
    let d2 = (0..n).map(|k| w2 * p[k] + 2.0 * w1 * p1[k] + w * p2[k]).collect();
    (v, d1, d2)
}

fn tabulate_spectral(profile: &RefractiveProfile, n: usize, a: f64, b: f64) -> Result<Tabulation> {
    let nq = n + 14 + extra_nodes(profile);
    let (t, wt) = gauss_legendre(nq);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut tab = Tabulation {
        w: wt.iter().map(|w| w * half).collect(),
        q: Vec::with_capacity(nq),
        dq: Vec::with_capacity(nq),
        val: DMatrix::zeros(nq, n),
        d1: DMatrix::zeros(nq, n),
        ang: DMatrix::zeros(nq, n),
        lap: DMatrix::zeros(nq, n),
    };
    for (i, &ti) in t.iter().enumerate() {
        let d = profile.q_derivatives(mid + half * ti, 1);
        tab.q.push(d[0]);
        tab.dq.push(d[1]);
        let (v, v1, v2) = interval_basis_at(n, ti);
        for k in 0..n {
            tab.val[(i, k)] = v[k];
            tab.d1[(i, k)] = v1[k] / half;
            tab.lap[(i, k)] = -v2[k] / (half * half);
        }
    }
    finite(&tab.q)?;
    Ok(tab)
}

fn tabulate_hermite(profile: &RefractiveProfile, elements: usize, a: f64, b: f64) -> Result<Tabulation> {
    let n = 2 * (elements - 1);
    let he = (b - a) / elements as f64;
    let per = 8 + extra_nodes(profile) / 4;
    let (t, wt) = gauss_legendre(per);
    let rows = per * elements;
    let mut tab = Tabulation {
        w: Vec::with_capacity(rows),
        q: Vec::with_capacity(rows),
        dq: Vec::with_capacity(rows),
        val: DMatrix::zeros(rows, n),
        d1: DMatrix::zeros(rows, n),
        ang: DMatrix::zeros(rows, n),
        lap: DMatrix::zeros(rows, n),
    };
    for e in 0..elements {
        // global dofs of the left and right node: (value, slope); boundary nodes are clamped
        let left = if e == 0 { None } else { Some(2 * (e - 1)) };
        let right = if e + 1 == elements { None } else { Some(2 * e) };
        for (j, (&tj, &wj)) in t.iter().zip(&wt).enumerate() {
            let xi = 0.5 * (tj + 1.0);
            let row = e * per + j;
            let x = a + he * (e as f64 + xi);
            let d = profile.q_derivatives(x, 1);
            tab.w.push(0.5 * wj * he);
            tab.q.push(d[0]);
            tab.dq.push(d[1]);
            let (x2, x3) = (xi * xi, xi * xi * xi);
            let shapes = [
                (1.0 - 3.0 * x2 + 2.0 * x3, -6.0 * xi + 6.0 * x2, -6.0 + 12.0 * xi),
                (he * (xi - 2.0 * x2 + x3), he * (1.0 - 4.0 * xi + 3.0 * x2), he * (-4.0 + 6.0 * xi)),
                (3.0 * x2 - 2.0 * x3, 6.0 * xi - 6.0 * x2, 6.0 - 12.0 * xi),
                (he * (-x2 + x3), he * (-2.0 * xi + 3.0 * x2), he * (-2.0 + 6.0 * xi)),
            ];
            let dofs = [left, left.map(|k| k + 1), right, right.map(|k| k + 1)];
            for (dof, (v, v1, v2)) in dofs.iter().zip(shapes) {
                if let Some(k) = dof {
                    tab.val[(row, *k)] = v;
                    tab.d1[(row, *k)] = v1 / he;
                    tab.lap[(row, *k)] = -v2 / (he * he);
                }
            }
        }
    }
    finite(&tab.q)?;
    Ok(tab)
}

/// Values and `ρ`-derivatives of `ρ^l (1 − ρ²)² P_k^{(4,l)}(2ρ² − 1)` at `ρ`.
pub fn disk_basis_at(l: u32, n: usize, rho: f64) -> (Vec<f64>, Vec<f64>) {
    let s = rho * rho;
    let (g, g1, _) = radial_profile(l, n, s);
    let lf = l as f64;
    let rl = rho.powi(l as i32);
    let v = (0..n).map(|k| rl * g[k]).collect();
    // d/dρ [ρ^l g(ρ²)] = ρ^{l−1}(l g + 2 s g')
    let d = (0..n)
        .map(|k| {
            let core = lf * g[k] + 2.0 * s * g1[k];
            if l == 0 {
                2.0 * rho * g1[k]
            } else {
                rho.powi(l as i32 - 1) * core
            }
        })
        .collect();
    (v, d)
}

/// `g_k(s) = (1 − s)² P_k^{(4,l)}(2s − 1)` with `s`-derivatives.
fn radial_profile(l: u32, n: usize, s: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let t = 2.0 * s - 1.0;
    let (p, p1, p2) = jacobi_with_derivatives(n, 4.0, l as f64, t);
    let one = 1.0 - s;
    let g = (0..n).map(|k| one * one * p[k]).collect();
    let g1 = (0..n).map(|k| -2.0 * one * p[k] + 2.0 * one * one * p1[k]).collect();
    let g2 = (0..n).map(|k| 2.0 * p[k] - 8.0 * one * p1[k] + 4.0 * one * one * p2[k]).collect();
    (g, g1, g2)
}

/// Pencil of angular mode `l` on the disk of radius `radius`; the profile is
/// radial, defined on `[0, radius]`.
pub fn assemble_disk_mode(profile: &RefractiveProfile, l: u32, n: usize, radius: f64) -> Result<DiscretePencil> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("basis size must be at least 4, got {n}")));
    }
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")));
    }
    check_profile(profile, 0.0, radius)?;
    let nq = n + l as usize + 14 + extra_nodes(profile);
    let (t, wt) = gauss_legendre(nq);
    let lf = l as f64;
    let r2 = radius * radius;
    let mut tab = Tabulation {
        w: Vec::with_capacity(nq),
        q: Vec::with_capacity(nq),
        dq: Vec::with_capacity(nq),
        val: DMatrix::zeros(nq, n),
        d1: DMatrix::zeros(nq, n),
        ang: DMatrix::zeros(nq, n),
        lap: DMatrix::zeros(nq, n),
    };
    for (i, (&ti, &wi)) in t.iter().zip(&wt).enumerate() {
        let s = 0.5 * (ti + 1.0);
        let rho = s.sqrt();
        let r = radius * rho;
        // r dr = R² ds / 2 = R² dt / 4
        tab.w.push(0.25 * r2 * wi);
        let d = profile.q_derivatives(r, 1);
        tab.q.push(d[0]);
        tab.dq.push(d[1]);
        let (g, g1, g2) = radial_profile(l, n, s);
        let rl = rho.powi(l as i32);
        for k in 0..n {
            tab.val[(i, k)] = rl * g[k];
            let du = if l == 0 { 2.0 * rho * g1[k] } else { rho.powi(l as i32 - 1) * (lf * g[k] + 2.0 * s * g1[k]) };
            tab.d1[(i, k)] = du / radius;
            tab.ang[(i, k)] = lf * rl * g[k] / r;
            // P₀ₗ(ρ^l g(ρ²)) = −4 ρ^l [(l+1) g' + s g''] / R²
            tab.lap[(i, k)] = -4.0 * rl * ((lf + 1.0) * g1[k] + s * g2[k]) / r2;
        }
    }
    finite(&tab.q)?;
    assemble(tab, Domain::DiskMode { r: radius, l }, profile.grad_q_sup(), true)
}

/// `x*(A − λB + λ²C)x`.
pub fn quadratic_form_t(p: &DiscretePencil, lambda: Complex64, x: &DVector<Complex64>) -> Result<Complex64> {
    if x.len() != p.n {
        return Err(Error::DimensionMismatch { expected: p.n, got: x.len() });
    }
    Ok(bilinear(&p.a, x, x) - lambda * bilinear(&p.b, x, x) + lambda * lambda * bilinear(&p.c, x, x))
}

/// `|Re x*T(λ)x − [x*Ax + |Re λ|(x*B1x + x*B2x) + ((Re λ)² − (Im λ)²) x*Cx]|`
/// for `Re λ < 0`.
pub fn realpart_identity_check(p: &DiscretePencil, lambda: Complex64, x: &DVector<Complex64>) -> Result<f64> {
    let aux = p.aux.as_ref().ok_or_else(|| Error::Precondition("pencil has no auxiliary forms".into()))?;
    if !(lambda.re < 0.0) {
        return Err(Error::Precondition(format!("Re λ must be negative, got {lambda}")));
    }
    let lhs = quadratic_form_t(p, lambda, x)?.re;
    let r = lambda.re.abs();
    let rhs = bilinear(&p.a, x, x).re
        + r * bilinear(&aux.b1, x, x).re
        + r * bilinear(&aux.b2, x, x).re
        + (lambda.re * lambda.re - lambda.im * lambda.im) * bilinear(&p.c, x, x).re;
    Ok((lhs - rhs).abs())
}

/// Scale used to normalise [`realpart_identity_check`]:
/// `(‖A‖ + |λ|‖B‖ + |λ|²‖C‖)‖x‖²`.
pub fn identity_scale(p: &DiscretePencil, lambda: Complex64, x: &DVector<Complex64>) -> f64 {
    p.scale_at(lambda) * cnorm(x).powi(2)
}

/// `‖B1 − (2Sq + G + Gᵀ)‖ / ‖B1‖`: the two discretisations of `2Re(P₀u, qu)`.
pub fn ibp_identity_residual(p: &DiscretePencil) -> Result<f64> {
    let aux = p.aux.as_ref().ok_or_else(|| Error::Precondition("pencil has no auxiliary forms".into()))?;
    let other = &aux.sq * 2.0 + &aux.g + aux.g.transpose();
    Ok((&aux.b1 - other).norm() / aux.b1.norm().max(f64::MIN_POSITIVE))
}

/// `‖B − (B1 + B2)‖`.
pub fn split_residual(p: &DiscretePencil) -> Result<f64> {
    let aux = p.aux.as_ref().ok_or_else(|| Error::Precondition("pencil has no auxiliary forms".into()))?;
    Ok((&p.b - (&aux.b1 + &aux.b2)).norm())
}
