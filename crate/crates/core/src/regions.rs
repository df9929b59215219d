//! Spectral regions: the semiclassical change of variables `λ = z/h²`, the
//! parabolic enclosure `Re λ > 0, |Im λ| ≤ C|λ|^{1−δ}` for large `|λ|`, and
//! the left half-plane `Re λ < −2‖∇q‖²_∞`, certified on discrete pencils
//! through the Hermitian part of `T(λ)`.
//!
//! Discrete certificates only exclude eigenvalues of the discrete pencil; they
//! say nothing quantitative about the continuum problem.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::CheckResult;
use crate::eig::EigenvalueRecord;
use crate::error::{Error, Result};
use crate::linalg::sym_min_eig;
use crate::pencil::{identity_scale, realpart_identity_check, DiscretePencil};
use crate::profile::RefractiveProfile;

/// Default exponent of the parabola.
pub const DEFAULT_DELTA: f64 = 1.0 / 25.0;
/// Default constant, which doubles as the modulus cutoff of the test.
pub const DEFAULT_C: f64 = 10.0;

/// `λ = z/h²`.
pub fn lambda_of(z: Complex64, h: f64) -> Result<Complex64> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("h must be positive, got {h}")));
    }
    Ok(z / (h * h))
}

/// Inverse of [`lambda_of`] normalised by `|z| = 1`: returns `(z, h)` with
/// `h = |λ|^{−1/2}`.
pub fn to_semiclassical(lambda: Complex64) -> Result<(Complex64, f64)> {
    let r = lambda.norm();
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("λ must be nonzero and finite, got {lambda}")));
    }
    Ok((lambda / r, r.powf(-0.5)))
}

/// One row of [`semiclassical_region_map`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionMapRow {
    pub h: f64,
    pub z: Complex64,
    /// `Im λ − |λ|^{1−δ/4}`.
    pub margin: f64,
    /// `Im λ / |λ|^{1−δ/4}`.
    pub ratio: f64,
}

/// Samples `|z| = 1`, `Im z ≥ h^{δ/2}` for every `h` and tabulates how far
/// `λ = z/h²` lies above the curve `Im λ = |λ|^{1−δ/4}`. The first sample of
/// each `h` sits on `Im z = h^{δ/2}`, where the ratio is exactly 1.
pub fn semiclassical_region_map(delta: f64, h_list: &[f64]) -> Result<Vec<RegionMapRow>> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::InvalidArgument(format!("δ must lie in (0, 1/2), got {delta}")));
    }
    let mut rows = Vec::new();
    for &h in h_list {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidArgument(format!("h must lie in (0, 1), got {h}")));
        }
        let floor = h.powf(delta / 2.0);
        for j in 0..8 {
            let im = floor + (1.0 - floor) * j as f64 / 7.0;
            let re = (1.0 - im * im).max(0.0).sqrt();
            for z in [Complex64::new(re, im), Complex64::new(-re, im)] {
                let lambda = lambda_of(z, h)?;
                let curve = lambda.norm().powf(1.0 - delta / 4.0);
                rows.push(RegionMapRow { h, z, margin: lambda.im - curve, ratio: lambda.im / curve });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParabolicRegion {
    pub c: f64,
    pub delta: f64,
}

impl Default for ParabolicRegion {
    fn default() -> Self {
        ParabolicRegion { c: DEFAULT_C, delta: DEFAULT_DELTA }
    }
}

impl ParabolicRegion {
    pub fn new(c: f64, delta: f64) -> Result<Self> {
        if !(c > 1.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("parabola constant must exceed 1, got {c}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidArgument(format!("δ must lie in (0, 1), got {delta}")));
        }
        Ok(ParabolicRegion { c, delta })
    }

    /// Whether the membership test applies (`|λ| > C`).
    pub fn applies(&self, lambda: Complex64) -> bool {
        lambda.norm() > self.c
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        lambda.re > 0.0 && lambda.im.abs() <= self.c * lambda.norm().powf(1.0 - self.delta)
    }

    /// Upper branch `Im λ = C|λ|^{1−δ}` as a function of `Re λ`.
    pub fn boundary_im(&self, re: f64) -> f64 {
        boundary_im(self.c, self.delta, re)
    }
}

/// `y ≥ 0` with `y = c (x² + y²)^{(1−δ)/2}`.
///
/// Solved for `u = ln|λ|` by bisection on `2u = ln(x² + c²e^{(2−2δ)u})`,
/// which has a single root; saturates at `f64::MAX`.
pub fn boundary_im(c: f64, delta: f64, x: f64) -> f64 {
    if !(c > 0.0) {
        return 0.0;
    }
    let lc = c.ln();
    let x = x.abs();
    let below = |u: f64| {
        // ln(x² + c² r^{2−2δ}) − 2u via log-sum-exp
        let a = 2.0 * lc + (2.0 - 2.0 * delta) * u;
        let b = if x > 0.0 { 2.0 * x.ln() } else { f64::NEG_INFINITY };
        let m = a.max(b);
        let lse = m + ((a - m).exp() + (b - m).exp()).ln();
        lse > 2.0 * u
    };
    let mut lo = if x > 0.0 { x.ln() } else { lc };
    while !below(lo) {
        lo -= 1.0;
    }
    let mut hi = lo + 1.0;
    while below(hi) {
        hi += (hi - lo).max(1.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lc + (1.0 - delta) * 0.5 * (lo + hi)).exp().min(f64::MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    /// Number of stable records with `|λ| > cutoff`.
    pub tested: usize,
    pub violations: Vec<EigenvalueRecord>,
    /// `max |Im λ| / |λ|^{1−δ}` over the tested records (0 when none).
    pub fitted_c: f64,
    pub delta_used: f64,
    pub c_used: f64,
    pub cutoff: f64,
    pub left_bound: f64,
    /// Stable records with `Re λ < left_bound`.
    pub left_violations: Vec<EigenvalueRecord>,
    pub caveat: String,
}

impl RegionReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty() && self.left_violations.is_empty()
    }
}

pub const DISCRETE_CAVEAT: &str =
    "checks apply to the discrete pencils only; the distance between discrete and continuum eigenvalue-free regions is not quantified";

/// Tests the stable records with `|λ| > C` against the parabola and fits the
/// smallest constant that would contain them. The left bound is left at 0
/// with no left violations; see [`region_report`].
pub fn parabola_check(records: &[EigenvalueRecord], region: &ParabolicRegion) -> RegionReport {
    let exponent = 1.0 - region.delta;
    let mut tested = 0;
    let mut fitted: f64 = 0.0;
    let mut violations = Vec::new();
    for r in records.iter().filter(|r| r.stable && region.applies(r.lambda)) {
        tested += 1;
        fitted = fitted.max(r.lambda.im.abs() / r.lambda.norm().powf(exponent));
        if !region.contains(r.lambda) {
            violations.push(r.clone());
        }
    }
    RegionReport {
        tested,
        violations,
        fitted_c: fitted,
        delta_used: region.delta,
        c_used: region.c,
        cutoff: region.c,
        left_bound: 0.0,
        left_violations: vec![],
        caveat: DISCRETE_CAVEAT.to_string(),
    }
}

/// `−2‖∇q‖²_∞`.
pub fn left_halfplane_bound(profile: &RefractiveProfile) -> f64 {
    let g = profile.grad_q_sup();
    -2.0 * g * g
}

/// Stable records strictly left of `bound`.
pub fn left_violations(records: &[EigenvalueRecord], bound: f64) -> Vec<EigenvalueRecord> {
    records.iter().filter(|r| r.stable && r.lambda.re < bound).cloned().collect()
}

/// [`parabola_check`] plus the left half-plane test against the profile bound.
pub fn region_report(records: &[EigenvalueRecord], region: &ParabolicRegion, profile: &RefractiveProfile) -> RegionReport {
    let mut report = parabola_check(records, region);
    report.left_bound = left_halfplane_bound(profile);
    report.left_violations = left_violations(records, report.left_bound);
    report
}

/// Smallest eigenvalue of the Hermitian part `A − Re λ·B + Re(λ²)·C` of
/// `T(λ)`, after checking `Re λ ≤ −2‖∇q‖² − margin` and `|Re λ| ≥ 2|Im λ|`.
pub fn left_halfplane_min_eig(p: &DiscretePencil, lambda: Complex64, margin: f64) -> Result<f64> {
    if !(margin >= 0.0) {
        return Err(Error::InvalidArgument(format!("margin must be nonnegative, got {margin}")));
    }
    let bound = -2.0 * p.grad_q_sup * p.grad_q_sup;
    if !(lambda.re <= bound - margin) {
        return Err(Error::Precondition(format!("Re λ = {} is not left of {} − {margin}", lambda.re, bound)));
    }
    if !(lambda.re.abs() >= 2.0 * lambda.im.abs()) {
        return Err(Error::Precondition(format!("λ = {lambda} lies outside the cone |Re λ| ≥ 2|Im λ|")));
    }
    let l2 = lambda * lambda;
    let h = &p.a - &p.b * lambda.re + &p.c * l2.re;
    Ok(sym_min_eig(&h))
}

/// True iff the Hermitian part of `T(λ)` is positive semidefinite, which
/// rules out a discrete eigenvalue at `λ`.
pub fn certify_left_halfplane(p: &DiscretePencil, lambda: Complex64, margin: f64) -> Result<bool> {
    Ok(left_halfplane_min_eig(p, lambda, margin)? >= 0.0)
}

/// `n × n` grid with `Re λ` from `bound − 1` down to `bound − 1 − span` and
/// `|Im λ| ≤ |Re λ|/10`.
pub fn certificate_grid(bound: f64, span: f64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n * n);
    let steps = (n.max(2) - 1) as f64;
    for i in 0..n {
        let re = bound - 1.0 - span * i as f64 / steps;
        for j in 0..n {
            let t = -1.0 + 2.0 * j as f64 / steps;
            out.push(Complex64::new(re, t * re.abs() / 10.0));
        }
    }
    out
}

/// Inputs for [`verify_regions`].
#[derive(Debug, Clone)]
pub struct RegionCase<'a> {
    pub name: String,
    pub profile: &'a RefractiveProfile,
    pub pencils: &'a [DiscretePencil],
    pub records: &'a [EigenvalueRecord],
}

/// Settings for [`verify_regions`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionScanConfig {
    pub region: ParabolicRegion,
    pub seed: u64,
    pub identity_samples: usize,
    pub grid_n: usize,
    pub grid_span: f64,
    pub margin: f64,
}

impl Default for RegionScanConfig {
    fn default() -> Self {
        RegionScanConfig {
            region: ParabolicRegion::default(),
            seed: 20100,
            identity_samples: 100,
            grid_n: 10,
            grid_span: 50.0,
            margin: 1.0,
        }
    }
}

/// Parabola and left-bound tests on the records, the real-part identity on
/// random vectors, and the certificate grid with its consistency against the
/// computed spectrum, for every case.
pub fn verify_regions(cases: &[RegionCase], cfg: &RegionScanConfig) -> Result<(Vec<CheckResult>, Vec<RegionReport>)> {
    let mut checks = Vec::new();
    let mut reports = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for case in cases {
        let report = region_report(case.records, &cfg.region, case.profile);
        let describe = |r: &EigenvalueRecord| format!("λ = {} (mode {}, N = {})", r.lambda, r.mode, r.mesh_n);
        checks.push(CheckResult::at_most(
            format!("{}: parabola violations beyond |λ| > {}", case.name, report.cutoff),
            report.violations.len() as f64,
            0.0,
            report.violations.iter().map(describe).collect(),
        ));
        checks.push(CheckResult::at_most(
            format!("{}: fitted parabola constant is finite", case.name),
            report.fitted_c,
            f64::MAX,
            vec![],
        ));
        checks.push(CheckResult::at_most(
            format!("{}: stable eigenvalues left of {}", case.name, report.left_bound),
            report.left_violations.len() as f64,
            0.0,
            report.left_violations.iter().map(describe).collect(),
        ));

        let mut worst_identity: f64 = 0.0;
        let mut worst_cert = f64::INFINITY;
        let mut cert_violations = Vec::new();
        let mut consistency = Vec::new();
        for p in case.pencils.iter().filter(|p| p.aux.is_some()) {
            for _ in 0..cfg.identity_samples {
                let x = DVector::from_fn(p.n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                let lambda = Complex64::new(-rng.gen_range(0.0..100.0), rng.gen_range(-100.0..100.0));
                let res = realpart_identity_check(p, lambda, &x)?;
                worst_identity = worst_identity.max(res / identity_scale(p, lambda, &x));
            }
            let bound = -2.0 * p.grad_q_sup * p.grad_q_sup;
            let grid = certificate_grid(bound, cfg.grid_span, cfg.grid_n);
            let mins = grid.par_iter().map(|&l| left_halfplane_min_eig(p, l, cfg.margin)).collect::<Result<Vec<_>>>()?;
            for (l, m) in grid.iter().zip(&mins) {
                worst_cert = worst_cert.min(*m);
                if *m < 0.0 {
                    cert_violations.push(format!("certificate fails at λ = {l} (mode {}, N = {})", p.mode(), p.n));
                } else if let Some(r) = case
                    .records
                    .iter()
                    .find(|r| r.stable && r.mode == p.mode() && r.mesh_n == p.n && (r.lambda - l).norm() <= 1e-8)
                {
                    consistency.push(format!("certified λ = {l} has a computed eigenvalue {}", r.lambda));
                }
            }
        }
        if case.pencils.iter().any(|p| p.aux.is_some()) {
            checks.push(CheckResult::at_most(
                format!("{}: real-part identity residual / scale", case.name),
                worst_identity,
                1e-12,
                vec![],
            ));
            checks.push(CheckResult::at_least(
                format!("{}: smallest Hermitian-part eigenvalue on the certificate grid", case.name),
                worst_cert,
                0.0,
                cert_violations,
            ));
            checks.push(CheckResult::at_most(
                format!("{}: certified points carrying an eigenvalue", case.name),
                consistency.len() as f64,
                0.0,
                consistency,
            ));
        }
        reports.push(report);
    }
    Ok((checks, reports))
}
