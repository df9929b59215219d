//! Interior parametrix of the rescaled pencil in one space dimension.
//!
//! # Full symbol
//!
//! With `λ = z/h²` and `P₀ = −∂ₓ²`, the rescaled operator is
//!
//! ```text
//! T = h⁴T(λ) = (h²P₀ − z(1+m)) · q · (h²P₀ − z),     q = 1/m.
//! ```
//!
//! Applying it to the plane wave `e(x) = e^{ixξ/h}`: the right factor gives
//! `(ξ² − z)e`, multiplication by `q` gives `q(ξ² − z)e`, and
//! `−h²∂ₓ²(q e) = (ξ²q − 2ihξq' − h²q'')e`. Since `(1+m)q = q + 1`,
//!
//! ```text
//! t(x, ξ) = e^{−ixξ/h} T e^{ixξ/h}
//!         = (ξ² − z)(qξ² − z(q+1) − 2ihξq' − h²q'')
//!         = t₀ + (ξ² − z)(−2ihξq' − h²q''),
//! t₀      = (ξ² − z)(qξ² − z(q+1)) = q(z − ξ²)(κz − ξ²),   κ = (q+1)/q,
//! ```
//!
//! so `h·t₁ = (ξ² − z)(−2ihξq' − h²q'')`. `T` is a differential operator, so
//! `T = Op_h(t)` exactly and `t # b = Σ_{k≤4} hᵏ/(iᵏk!) ∂_ξᵏt ∂ₓᵏb` with no
//! remainder.
//!
//! # Recursion
//!
//! `r₀ = 1/t₀`, `c₀ = h t₁ r₀ + Σ_{k=1}^{4} hᵏ/(iᵏk!) ∂_ξᵏt ∂ₓᵏr₀`,
//! `r₁ = −h⁻¹ t₀⁻¹ c₀`, giving `t # (r₀ + h r₁) − 1 = O(h²)`.
//!
//! All symbols are evaluated as [`Jet2`]s, so every derivative is exact up to
//! rounding.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::checks::CheckResult;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::profile::RefractiveProfile;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A symbol `a(x, ξ)` that can produce its Taylor jet at any point.
pub trait Symbol1D {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2;
}

impl<F: Fn(f64, f64, usize, usize) -> Jet2> Symbol1D for F {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        self(x, xi, nx, nxi)
    }
}

/// Evaluation data for the one-dimensional symbol recursion.
#[derive(Debug, Clone, Copy)]
pub struct SymbolField1D<'a> {
    pub profile: &'a RefractiveProfile,
    pub x: f64,
    pub xi: f64,
    pub z: Complex64,
    pub h: f64,
    pub delta: f64,
}

impl<'a> SymbolField1D<'a> {
    pub fn new(profile: &'a RefractiveProfile, x: f64, xi: f64, z: Complex64, h: f64, delta: f64) -> Result<Self> {
        if !(z.im > 0.0) {
            return Err(Error::InvalidArgument(format!("Im z must be positive, got {z}")));
        }
        if !(0.0..1.0).contains(&h) {
            return Err(Error::InvalidArgument(format!("h must lie in [0, 1), got {h}")));
        }
        if !(0.0..0.5).contains(&delta) {
            return Err(Error::InvalidArgument(format!("delta must lie in [0, 1/2), got {delta}")));
        }
        Ok(SymbolField1D { profile, x, xi, z, h, delta })
    }

    /// Whether `Im z ≥ h^{δ/2}` (the working region of the scaling claims).
    pub fn in_working_region(&self) -> bool {
        self.z.im >= self.h.powf(0.5 * self.delta)
    }
}

fn q_jets(profile: &RefractiveProfile, x: f64, nx: usize, nxi: usize) -> (Jet2, Jet2, Jet2) {
    let d = profile.q_derivatives(x, nx + 2);
    (
        Jet2::from_x_derivatives(&d, nx, nxi),
        Jet2::from_x_derivatives(&d[1..], nx, nxi),
        Jet2::from_x_derivatives(&d[2..], nx, nxi),
    )
}

/// Principal symbol `t₀`.
#[derive(Debug, Clone, Copy)]
pub struct PrincipalSymbol<'a> {
    pub profile: &'a RefractiveProfile,
    pub z: Complex64,
}

impl Symbol1D for PrincipalSymbol<'_> {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        let (q, _, _) = q_jets(self.profile, x, nx, nxi);
        let xi2 = Jet2::xi_variable(xi, nx, nxi).powu(2);
        let left = &xi2 + (-self.z);
        let right = &(&(&q * &xi2) - &(&q * self.z)) + (-self.z);
        &left * &right
    }
}

/// Full symbol `t = t₀ + h t₁`.
#[derive(Debug, Clone, Copy)]
pub struct FullSymbol<'a> {
    pub profile: &'a RefractiveProfile,
    pub z: Complex64,
    pub h: f64,
}

impl Symbol1D for FullSymbol<'_> {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        let (q, q1, q2) = q_jets(self.profile, x, nx, nxi);
        let xiv = Jet2::xi_variable(xi, nx, nxi);
        let xi2 = xiv.powu(2);
        let left = &xi2 + (-self.z);
        let mut right = &(&(&q * &xi2) - &(&q * self.z)) + (-self.z);
        right = &right - &(&(&xiv * &q1) * (2.0 * I * self.h));
        right = &right - &(&q2 * (self.h * self.h));
        &left * &right
    }
}

/// `r₀ = 1/t₀`.
#[derive(Debug, Clone, Copy)]
pub struct InversePrincipal<'a> {
    pub profile: &'a RefractiveProfile,
    pub z: Complex64,
}

impl Symbol1D for InversePrincipal<'_> {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        PrincipalSymbol { profile: self.profile, z: self.z }.jet(x, xi, nx, nxi).recip()
    }
}

/// Coefficient of `Σ_{k} hᵏ/(iᵏ k!)` in the composition expansion.
fn composition_weight(h: f64, k: usize) -> Complex64 {
    let fact = (1..=k).fold(1.0, |acc, j| acc * j as f64);
    h.powi(k as i32) / (I.powu(k as u32) * fact)
}

/// First remainder `c₀` with `t # r₀ = 1 + c₀`.
#[derive(Debug, Clone, Copy)]
pub struct FirstRemainder<'a> {
    pub profile: &'a RefractiveProfile,
    pub z: Complex64,
    pub h: f64,
}

impl Symbol1D for FirstRemainder<'_> {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        let t = FullSymbol { profile: self.profile, z: self.z, h: self.h }.jet(x, xi, nx, nxi + 4);
        let t0 = PrincipalSymbol { profile: self.profile, z: self.z }.jet(x, xi, nx + 4, nxi);
        let r0 = t0.recip();
        let ht1 = &t.truncate(nx, nxi) - &t0.truncate(nx, nxi);
        let mut c0 = &ht1 * &r0.truncate(nx, nxi);
        for k in 1..=4 {
            let dt = t.differentiate(0, k).truncate(nx, nxi);
            let dr = r0.differentiate(k, 0).truncate(nx, nxi);
            c0 = &c0 + &(&(&dt * &dr) * composition_weight(self.h, k));
        }
        c0
    }
}

/// First correction `r₁ = −h⁻¹ t₀⁻¹ c₀`.
#[derive(Debug, Clone, Copy)]
pub struct FirstCorrection<'a> {
    pub profile: &'a RefractiveProfile,
    pub z: Complex64,
    pub h: f64,
}

impl Symbol1D for FirstCorrection<'_> {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        let c0 = FirstRemainder { profile: self.profile, z: self.z, h: self.h }.jet(x, xi, nx, nxi);
        let r0 = InversePrincipal { profile: self.profile, z: self.z }.jet(x, xi, nx, nxi);
        &(&c0 * &r0) * Complex64::new(-1.0 / self.h, 0.0)
    }
}

/// Truncated parametrix `r^{(N)} = Σ_{j≤N} hʲ rⱼ` for `N ∈ {0, 1}`.
#[derive(Debug, Clone, Copy)]
pub struct Parametrix<'a> {
    pub profile: &'a RefractiveProfile,
    pub z: Complex64,
    pub h: f64,
    pub order: usize,
}

impl Symbol1D for Parametrix<'_> {
    fn jet(&self, x: f64, xi: f64, nx: usize, nxi: usize) -> Jet2 {
        let r0 = InversePrincipal { profile: self.profile, z: self.z }.jet(x, xi, nx, nxi);
        if self.order == 0 {
            return r0;
        }
        let r1 = FirstCorrection { profile: self.profile, z: self.z, h: self.h }.jet(x, xi, nx, nxi);
        &r0 + &(&r1 * self.h)
    }
}

/// Full symbol `t(x, ξ)`.
pub fn full_symbol(f: &SymbolField1D) -> Complex64 {
    FullSymbol { profile: f.profile, z: f.z, h: f.h }.jet(f.x, f.xi, 0, 0).value()
}

/// `∂ₓᵃ∂_ξᵇ (1/t₀)`.
pub fn r0_derivatives(f: &SymbolField1D, a: usize, b: usize) -> Result<Complex64> {
    let t0 = PrincipalSymbol { profile: f.profile, z: f.z }.jet(f.x, f.xi, 0, 0).value();
    if !(t0.norm() > 0.0) {
        return Err(Error::Singular(t0.norm()));
    }
    Ok(InversePrincipal { profile: f.profile, z: f.z }.jet(f.x, f.xi, a, b).derivative(a, b))
}

pub fn c0_symbol(f: &SymbolField1D) -> Complex64 {
    FirstRemainder { profile: f.profile, z: f.z, h: f.h }.jet(f.x, f.xi, 0, 0).value()
}

pub fn r1_symbol(f: &SymbolField1D) -> Complex64 {
    FirstCorrection { profile: f.profile, z: f.z, h: f.h }.jet(f.x, f.xi, 0, 0).value()
}

/// `Σ_{k≤K} hᵏ/k! · ∂_ξᵏa · Dₓᵏb` at `(x, ξ)`, `D = −i∂`.
pub fn compose_truncated<A: Symbol1D + ?Sized, B: Symbol1D + ?Sized>(
    a: &A,
    b: &B,
    order: usize,
    x: f64,
    xi: f64,
    h: f64,
) -> Complex64 {
    let ja = a.jet(x, xi, 0, order);
    let jb = b.jet(x, xi, order, 0);
    (0..=order)
        .map(|k| {
            let fact = (1..=k).fold(1.0, |acc, j| acc * j as f64);
            let dk = (-I).powu(k as u32);
            ja.derivative(0, k) * jb.derivative(k, 0) * dk * (h.powi(k as i32) / fact)
        })
        .sum()
}

/// `t # r^{(N)} − 1` at one point.
pub fn parametrix_residual(profile: &RefractiveProfile, z: Complex64, h: f64, order: usize, x: f64, xi: f64) -> Complex64 {
    let t = FullSymbol { profile, z, h };
    let r = Parametrix { profile, z, h, order };
    compose_truncated(&t, &r, 4 * (order + 1), x, xi, h) - 1.0
}

/// Scan point; `z` is placed on `|z| = 1` with `Im z = h^{δ/2}` and the sign
/// of `Re z` given by `re_sign`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: f64,
    pub xi: f64,
    pub re_sign: f64,
}

/// Spectral parameter on the edge of the working region.
pub fn edge_z(h: f64, delta: f64, re_sign: f64) -> Complex64 {
    let im = h.powf(0.5 * delta);
    Complex64::new(re_sign.signum() * (1.0 - im * im).max(0.0).sqrt(), im)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualScan {
    pub order: usize,
    pub delta: f64,
    pub h: Vec<f64>,
    /// `max |t # r^{(N)} − 1|` over the point set, per `h`.
    pub residual: Vec<f64>,
    /// Least-squares slope of `log residual` against `log h`; `None` when a
    /// residual vanishes exactly.
    pub slope: Option<f64>,
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() < 3 || x.len() != y.len() {
        return Err(Error::DegenerateFit(x.len().min(y.len())));
    }
    if y.iter().any(|&v| !(v > 0.0)) {
        return Ok(None);
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(Some(sxy / sxx))
}

pub fn parametrix_residual_scan(
    profile: &RefractiveProfile,
    points: &[ScanPoint],
    delta: f64,
    order: usize,
    h_list: &[f64],
) -> Result<ResidualScan> {
    if order > 1 {
        return Err(Error::InvalidArgument(format!("parametrix order must be 0 or 1, got {order}")));
    }
    if h_list.len() < 3 {
        return Err(Error::DegenerateFit(h_list.len()));
    }
    let residual: Vec<f64> = h_list
        .iter()
        .map(|&h| {
            points
                .iter()
                .map(|p| parametrix_residual(profile, edge_z(h, delta, p.re_sign), h, order, p.x, p.xi).norm())
                .fold(0.0, f64::max)
        })
        .collect();
    let slope = loglog_slope(h_list, &residual)?;
    Ok(ResidualScan { order, delta, h: h_list.to_vec(), residual, slope })
}

/// Default scan points: a few positions, frequencies on both sides of the
/// characteristic set `ξ² = Re z`, and both signs of `Re z`.
pub fn default_scan_points(lo: f64, hi: f64) -> Vec<ScanPoint> {
    let mut pts = Vec::new();
    for fx in [0.25, 0.45, 0.6, 0.8] {
        for xi in [0.0, 0.5, 1.0, 1.5, 3.0] {
            for re_sign in [1.0, -1.0] {
                pts.push(ScanPoint { x: lo + fx * (hi - lo), xi, re_sign });
            }
        }
    }
    pts
}

/// Dyadic h-values `2^{-4} … 2^{-12}`.
pub fn default_h_list() -> Vec<f64> {
    (4..=12).map(|k| 2f64.powi(-k)).collect()
}

/// Parametrix checks used by the CLI: residual slopes for `N = 0, 1`, the
/// constant-profile exactness and the defining recursion.
pub fn verify_parametrix(profile: &RefractiveProfile, delta: f64) -> Result<Vec<CheckResult>> {
    let points = default_scan_points(profile.lo, profile.hi);
    let hs = default_h_list();
    let mut checks = Vec::new();
    for order in [0usize, 1] {
        let scan = parametrix_residual_scan(profile, &points, delta, order, &hs)?;
        let needed = ((order + 1) as f64 * (1.0 - 2.0 * delta) - 0.2).max(if order == 0 { 0.8 } else { 1.5 });
        match scan.slope {
            Some(s) => checks.push(CheckResult::at_least(format!("residual slope N={order}"), s, needed, vec![])),
            None => {
                let worst = scan.residual.iter().cloned().fold(0.0, f64::max);
                checks.push(CheckResult::at_most(format!("residual N={order} (exact)"), worst, 1e-13, vec![]));
            }
        }
    }
    let flat = RefractiveProfile::constant(3.0, profile.lo, profile.hi)?;
    let flat_scan = parametrix_residual_scan(&flat, &points, delta, 0, &hs)?;
    checks.push(CheckResult::at_most(
        "constant-q residual",
        flat_scan.residual.iter().cloned().fold(0.0, f64::max),
        1e-13,
        vec![],
    ));
    let mut worst = 0.0f64;
    for &h in &hs {
        for p in &points {
            let z = edge_z(h, delta, p.re_sign);
            let f = SymbolField1D::new(profile, p.x, p.xi, z, h, delta)?;
            let t0 = PrincipalSymbol { profile, z }.jet(p.x, p.xi, 0, 0).value();
            let c0 = c0_symbol(&f);
            let defect = (c0 + h * t0 * r1_symbol(&f)).norm() / c0.norm().max(1.0);
            worst = worst.max(defect);
        }
    }
    checks.push(CheckResult::at_most("recursion c0 + h t0 r1 = 0", worst, 1e-13, vec![]));
    Ok(checks)
}
