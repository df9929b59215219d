//! Boundary symbol algebra of the rescaled pencil.
//!
//! With `p₀ = ξₙ² + s` (normal frequency `ξₙ`, tangential symbol `s ≥ 0`) the
//! principal symbol of `h⁴T(z/h²)` is
//!
//! ```text
//! t₀ = q p₀² − z(2q+1) p₀ + z²(q+1) = q (z − p₀)(κz − p₀),   κ = (q+1)/q.
//! ```
//!
//! For `Im z > 0` it has the four simple roots `±σ₁, ±σ₂` with
//! `σ₁ = √(z − s)`, `σ₂ = √(κz − s)` on the upper branch. Everything the
//! boundary reduction needs (residue sums, the 2×2 boundary matrix and its
//! determinant) is then a closed-form function of `(q, s, z)`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::checks::CheckResult;
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Evaluation site of the boundary symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPoint {
    pub q: f64,
    pub s: f64,
    pub z: Complex64,
}

impl SymbolPoint {
    pub fn new(q: f64, s: f64, z: Complex64) -> Result<Self> {
        if !(q > 0.0 && q.is_finite()) {
            return Err(Error::InvalidArgument(format!("q must be positive, got {q}")));
        }
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("s must be nonnegative, got {s}")));
        }
        if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::InvalidArgument(format!("Im z must be positive, got z = {z}")));
        }
        Ok(SymbolPoint { q, s, z })
    }

    /// `κ = (q+1)/q`.
    pub fn kappa(&self) -> f64 {
        (self.q + 1.0) / self.q
    }
}

/// The roots `σ₁±, σ₂±` of `ξₙ ↦ t₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootQuadruple {
    pub sigma1_plus: Complex64,
    pub sigma2_plus: Complex64,
    pub sigma1_minus: Complex64,
    pub sigma2_minus: Complex64,
}

impl RootQuadruple {
    pub fn plus(&self) -> [Complex64; 2] {
        [self.sigma1_plus, self.sigma2_plus]
    }

    pub fn all(&self) -> [Complex64; 4] {
        [self.sigma1_plus, self.sigma2_plus, self.sigma1_minus, self.sigma2_minus]
    }
}

/// Square-root branch used for the plus-roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Branch {
    /// Positive imaginary part.
    #[default]
    Upper,
    /// Deliberately wrong branch; negative control for the verification scans.
    Flipped,
}

/// Square root with positive imaginary part (principal root, negated when
/// its imaginary part is negative).
pub fn upper_sqrt(w: Complex64) -> Complex64 {
    let r = w.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// `t₀ = q (z − p₀)(κz − p₀)`.
pub fn eval_t0(q: f64, p0: Complex64, z: Complex64) -> Complex64 {
    let kappa = (q + 1.0) / q;
    q * (z - p0) * (kappa * z - p0)
}

/// `t₀` in expanded form `q p₀² − z(2q+1)p₀ + z²(q+1)`.
pub fn eval_t0_expanded(q: f64, p0: Complex64, z: Complex64) -> Complex64 {
    q * p0 * p0 - z * (2.0 * q + 1.0) * p0 + z * z * (q + 1.0)
}

pub fn sigma_roots(pt: &SymbolPoint) -> RootQuadruple {
    sigma_roots_with_branch(pt, Branch::Upper)
}

pub fn sigma_roots_with_branch(pt: &SymbolPoint, branch: Branch) -> RootQuadruple {
    let mut s1 = upper_sqrt(pt.z - pt.s);
    let mut s2 = upper_sqrt(pt.kappa() * pt.z - pt.s);
    if branch == Branch::Flipped {
        s1 = -s1;
        s2 = -s2;
    }
    RootQuadruple { sigma1_plus: s1, sigma2_plus: s2, sigma1_minus: -s1, sigma2_minus: -s2 }
}

/// `t₀` at the boundary frequency `ξₙ`, i.e. with `p₀ = ξₙ² + s`.
pub fn t0_boundary(pt: &SymbolPoint, xi_n: Complex64) -> Complex64 {
    eval_t0(pt.q, xi_n * xi_n + pt.s, pt.z)
}

/// `q (ξₙ − σ₁⁺)(ξₙ − σ₂⁺)(ξₙ − σ₁⁻)(ξₙ − σ₂⁻)`.
pub fn t0_factored(pt: &SymbolPoint, roots: &RootQuadruple, xi_n: Complex64) -> Complex64 {
    roots.all().iter().fold(Complex64::new(pt.q, 0.0), |acc, &r| acc * (xi_n - r))
}

/// `∂t₀/∂ξₙ = 2qξₙ[(p₀ − z) + (p₀ − κz)]`.
pub fn dpartial_t0(pt: &SymbolPoint, xi_n: Complex64) -> Complex64 {
    let p0 = xi_n * xi_n + pt.s;
    2.0 * pt.q * xi_n * ((p0 - pt.z) + (p0 - pt.kappa() * pt.z))
}

/// `Σ_{ν=1,2} (σν⁺)^j / ∂t₀(σν⁺)`.
///
/// The derivative at a root is taken from the factored form,
/// `∂t₀(σν) = 2qσν(σν − σμ)(σν + σμ)`; the expanded form would carry the
/// rounding of `σν² + s − z` (of order `eps·s`) into a sum that cancels.
pub fn residue_sum(j: u32, pt: &SymbolPoint) -> Complex64 {
    residue_sum_with_roots(j, pt, &sigma_roots(pt))
}

fn residue_sum_with_roots(j: u32, pt: &SymbolPoint, roots: &RootQuadruple) -> Complex64 {
    let [s1, s2] = roots.plus();
    let d1 = 2.0 * pt.q * s1 * ((s1 - s2) * (s1 + s2));
    let d2 = 2.0 * pt.q * s2 * ((s2 - s1) * (s2 + s1));
    s1.powu(j) / d1 + s2.powu(j) / d2
}

/// Closed forms of [`residue_sum`] for `j ≤ 3`, derived from
/// `∂t₀(σ₁⁺) = −2σ₁⁺z`, `∂t₀(σ₂⁺) = 2σ₂⁺z` and `σ₂² − σ₁² = z/q`:
///
/// * `j = 0`: `(σ₁ − σ₂)/(2zσ₁σ₂) = −1/(2qσ₁σ₂(σ₁+σ₂))`
/// * `j = 1`: `0`
/// * `j = 2`: `(σ₂ − σ₁)/(2z) = 1/(2q(σ₁+σ₂))`
/// * `j = 3`: `1/(2q)`
///
/// The right-hand forms avoid the cancellation in `σ₂ − σ₁` for large `s`.
pub fn residue_sum_closed_form(j: u32, pt: &SymbolPoint) -> Result<Complex64> {
    let r = sigma_roots(pt);
    let (s1, s2) = (r.sigma1_plus, r.sigma2_plus);
    let q = pt.q;
    match j {
        0 => Ok(-1.0 / (2.0 * q * s1 * s2 * (s1 + s2))),
        1 => Ok(Complex64::new(0.0, 0.0)),
        2 => Ok(1.0 / (2.0 * q * (s1 + s2))),
        3 => Ok(Complex64::new(0.5 / q, 0.0)),
        _ => Err(Error::InvalidArgument(format!("closed form only for j <= 3, got {j}"))),
    }
}

/// Axis-aligned rectangle in the complex plane.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Rect { re_min, re_max, im_min, im_max }
    }

    /// Smallest rectangle around the plus-roots with margin equal to half
    /// their minimal distance to the real axis.
    pub fn enclosing_upper_roots(roots: &RootQuadruple) -> Self {
        let [a, b] = roots.plus();
        let margin = 0.5 * a.im.min(b.im);
        Rect {
            re_min: a.re.min(b.re) - margin,
            re_max: a.re.max(b.re) + margin,
            im_min: margin,
            im_max: a.im.max(b.im) + margin,
        }
    }

    /// Scale width and height by `factor`, keeping the bottom edge fixed and
    /// the horizontal centre.
    pub fn enlarged(&self, factor: f64) -> Self {
        let cx = 0.5 * (self.re_min + self.re_max);
        let half = 0.5 * factor * (self.re_max - self.re_min);
        Rect {
            re_min: cx - half,
            re_max: cx + half,
            im_min: self.im_min,
            im_max: self.im_min + factor * (self.im_max - self.im_min),
        }
    }

    pub fn contains(&self, w: Complex64) -> bool {
        w.re > self.re_min && w.re < self.re_max && w.im > self.im_min && w.im < self.im_max
    }

    pub fn diameter(&self) -> f64 {
        (self.re_max - self.re_min).hypot(self.im_max - self.im_min)
    }

    /// Distance from `w` to the boundary.
    pub fn boundary_distance(&self, w: Complex64) -> f64 {
        let dx = if w.re < self.re_min {
            self.re_min - w.re
        } else if w.re > self.re_max {
            w.re - self.re_max
        } else {
            0.0
        };
        let dy = if w.im < self.im_min {
            self.im_min - w.im
        } else if w.im > self.im_max {
            w.im - self.im_max
        } else {
            0.0
        };
        if dx > 0.0 || dy > 0.0 {
            dx.hypot(dy)
        } else {
            (w.re - self.re_min)
                .min(self.re_max - w.re)
                .min(w.im - self.im_min)
                .min(self.im_max - w.im)
        }
    }

    /// Corners in counter-clockwise order starting bottom-left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

const PANEL_ORDER: usize = 10;

/// Adaptive composite Gauss–Legendre integral of `f` along the segment `a → b`.
pub(crate) fn segment_integral<F: Fn(Complex64) -> Complex64>(f: &F, a: Complex64, b: Complex64, tol: f64) -> Complex64 {
    let (nodes, weights) = gauss_legendre(PANEL_ORDER);
    let panel = |p: Complex64, q: Complex64| -> Complex64 {
        let mid = 0.5 * (p + q);
        let half = 0.5 * (q - p);
        nodes.iter().zip(&weights).map(|(&t, &w)| w * f(mid + half * t)).sum::<Complex64>() * half
    };
    let total_len = (b - a).norm();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut stack = vec![(a, b, panel(a, b), 0usize)];
    while let Some((p, q, coarse, depth)) = stack.pop() {
        let m = 0.5 * (p + q);
        let left = panel(p, m);
        let right = panel(m, q);
        let fine = left + right;
        let local_tol = tol * ((q - p).norm() / total_len).max(1e-6);
        if (fine - coarse).norm() <= local_tol || depth >= 48 {
            acc += fine;
        } else {
            stack.push((p, m, left, depth + 1));
            stack.push((m, q, right, depth + 1));
        }
    }
    acc
}

/// `(1/2πi) ∮ ξₙ^j / t₀(ξₙ) dξₙ` around `rect`, counter-clockwise.
///
/// Fails with [`Error::RootOnContour`] unless both plus-roots lie strictly
/// inside and both minus-roots strictly outside, each at least
/// `1e-8·(1 + diam)` from the boundary.
pub fn contour_residue_oracle(j: u32, pt: &SymbolPoint, rect: &Rect) -> Result<Complex64> {
    let roots = sigma_roots(pt);
    let threshold = 1e-8 * (1.0 + rect.diameter());
    for r in roots.plus() {
        let d = rect.boundary_distance(r);
        if !rect.contains(r) || d < threshold {
            return Err(Error::RootOnContour(if rect.contains(r) { d } else { -d }));
        }
    }
    for r in [roots.sigma1_minus, roots.sigma2_minus] {
        let d = rect.boundary_distance(r);
        if rect.contains(r) || d < threshold {
            return Err(Error::RootOnContour(d));
        }
    }
    let f = |xi: Complex64| xi.powu(j) / t0_boundary(pt, xi);
    let scale = residue_sum_with_roots(0, pt, &roots).norm().max(residue_sum_with_roots(2, pt, &roots).norm());
    let tol = 1e-14 * scale.max(1e-300) * 2.0 * PI;
    let c = rect.corners();
    let mut total = Complex64::new(0.0, 0.0);
    for k in 0..4 {
        total += segment_integral(&f, c[k], c[(k + 1) % 4], tol);
    }
    Ok(total / Complex64::new(0.0, 2.0 * PI))
}

/// The 2×2 principal boundary symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryMatrix {
    pub entries: Matrix2<Complex64>,
    pub det: Complex64,
}

pub fn boundary_symbol_matrix(pt: &SymbolPoint) -> BoundaryMatrix {
    let roots = sigma_roots(pt);
    let a11 = residue_sum_with_roots(0, pt, &roots);
    let a12 = residue_sum_with_roots(1, pt, &roots);
    let a22 = residue_sum_with_roots(2, pt, &roots);
    let entries = Matrix2::new(a11, a12, a12, a22);
    BoundaryMatrix { entries, det: a11 * a22 - a12 * a12 }
}

/// `(σ₂⁺ − σ₁⁺)² / (∂t₀(σ₁⁺)·∂t₀(σ₂⁺))`.
pub fn vandermonde_det(pt: &SymbolPoint) -> Complex64 {
    let r = sigma_roots(pt);
    let (s1, s2) = (r.sigma1_plus, r.sigma2_plus);
    (s2 - s1) * (s2 - s1) / (dpartial_t0(pt, s1) * dpartial_t0(pt, s2))
}

pub fn invert_boundary_matrix(a: &BoundaryMatrix) -> Result<Matrix2<Complex64>> {
    let m = &a.entries;
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    if !(det.norm() > 1e-300) {
        return Err(Error::Singular(det.norm()));
    }
    Ok(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)]) / det)
}

/// Outcome of [`det_bounds_scan`].
#[derive(Debug, Clone, PartialEq)]
pub struct DetBoundsReport {
    /// `min |det a|·(1+s)²` over the large-`s` grid.
    pub scaled_min: f64,
    /// `max |det a|·(1+s)²` over the large-`s` grid.
    pub scaled_max: f64,
    /// `min |det a|` over the bounded-`s` grid.
    pub bounded_min: f64,
    /// Count of sampled `(s, ξₙ ∈ ℝ)` with `|t₀| < (Im z)²`.
    pub t0_violations: usize,
    pub t0_samples: usize,
}

impl DetBoundsReport {
    /// Both the decay band ratio and the bounded-range floor lie within
    /// `[1/K, K]`, and the `|t₀|` floor held everywhere.
    pub fn passes(&self, k: f64) -> bool {
        self.scaled_max / self.scaled_min <= k && self.bounded_min >= 1.0 / k && self.t0_violations == 0
    }
}

/// Scan `|det a|` over a large-`s` grid (decay `∼ ⟨ξ'⟩⁻⁴ = (1+s)⁻²`) and a
/// bounded-`s` grid (floor), checking `|t₀| ≥ (Im z)²` on real `ξₙ` on both.
pub fn det_bounds_scan(q: f64, z: Complex64, large_s: &[f64], bounded_s: &[f64]) -> Result<DetBoundsReport> {
    let mut report = DetBoundsReport {
        scaled_min: f64::INFINITY,
        scaled_max: 0.0,
        bounded_min: f64::INFINITY,
        t0_violations: 0,
        t0_samples: 0,
    };
    let floor = z.im * z.im;
    let t0_side = |pt: &SymbolPoint, report: &mut DetBoundsReport| {
        let reach = 4.0 * (1.0 + pt.s + z.norm()).sqrt();
        for i in 0..=200 {
            let xi = -reach + 2.0 * reach * i as f64 / 200.0;
            report.t0_samples += 1;
            if t0_boundary(pt, Complex64::new(xi, 0.0)).norm() < floor {
                report.t0_violations += 1;
            }
        }
    };
    for &s in large_s {
        let pt = SymbolPoint::new(q, s, z)?;
        let d = boundary_symbol_matrix(&pt).det.norm() * (1.0 + s) * (1.0 + s);
        report.scaled_min = report.scaled_min.min(d);
        report.scaled_max = report.scaled_max.max(d);
        t0_side(&pt, &mut report);
    }
    for &s in bounded_s {
        let pt = SymbolPoint::new(q, s, z)?;
        report.bounded_min = report.bounded_min.min(boundary_symbol_matrix(&pt).det.norm());
        t0_side(&pt, &mut report);
    }
    Ok(report)
}

/// Fitted constant `K` in `Im σⱼ⁺ ≥ h^{δ/2}/K` for `Im z = h^{δ/2}`, `|z| = 1`,
/// over `q ∈ qs`, `s ∈ ss` and both signs of `Re z`.
pub fn root_imaginary_constant(delta: f64, h_list: &[f64], qs: &[f64], ss: &[f64]) -> Result<f64> {
    let mut k = 0.0f64;
    for &h in h_list {
        let im = h.powf(0.5 * delta);
        let re = (1.0 - im * im).max(0.0).sqrt();
        for sign in [1.0, -1.0] {
            let z = Complex64::new(sign * re, im);
            for &q in qs {
                for &s in ss {
                    let r = sigma_roots(&SymbolPoint::new(q, s, z)?);
                    let min_im = r.sigma1_plus.im.min(r.sigma2_plus.im);
                    k = k.max(im / min_im);
                }
            }
        }
    }
    Ok(k)
}

/// Seeded random evaluation site with `q ∈ [0.2, 5]`, `s ∈ [0, 100]`,
/// `|z| ∈ [0.5, 2]`, `arg z ∈ (0, π)`.
pub fn random_point<R: Rng>(rng: &mut R) -> SymbolPoint {
    let q = rng.gen_range(0.2..=5.0);
    let s = rng.gen_range(0.0..=100.0);
    let modulus = rng.gen_range(0.5..=2.0);
    let arg = loop {
        let a: f64 = rng.gen_range(0.0..PI);
        if a > 0.0 {
            break a;
        }
    };
    SymbolPoint { q, s, z: Complex64::from_polar(modulus, arg) }
}

/// Settings for [`verify_symbols`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolScanConfig {
    pub seed: u64,
    pub samples: usize,
    pub branch: Branch,
}

impl Default for SymbolScanConfig {
    fn default() -> Self {
        SymbolScanConfig { seed: 20100, samples: 1000, branch: Branch::Upper }
    }
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// The symbol-level checks: branch, factorisation, residues against closed
/// forms and against contour quadrature, Vandermonde determinant, the `|t₀|`
/// floor and the large-`s` determinant band.
pub fn verify_symbols(cfg: &SymbolScanConfig) -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_branch = f64::INFINITY;
    let mut worst_root = 0.0f64;
    let mut worst_fact = 0.0f64;
    let mut worst_res1 = 0.0f64;
    let mut worst_res3 = 0.0f64;
    let mut worst_closed = 0.0f64;
    let mut worst_contour = 0.0f64;
    let mut worst_contour1 = 0.0f64;
    let mut worst_vdm = 0.0f64;
    let mut t0_floor_violations = Vec::new();
    let mut branch_violations = Vec::new();
    let mut contour_errors = Vec::new();
    for i in 0..cfg.samples {
        let pt = random_point(&mut rng);
        let roots = sigma_roots_with_branch(&pt, cfg.branch);
        let min_im = roots.sigma1_plus.im.min(roots.sigma2_plus.im);
        worst_branch = worst_branch.min(min_im);
        if !(min_im > 0.0) {
            branch_violations.push(format!("sample {i}: Im sigma+ = {min_im:e}"));
        }
        let scale = 1e-12 * (1.0 + pt.z.norm_sqr());
        for r in roots.all() {
            let v = eval_t0(pt.q, r * r + pt.s, pt.z).norm() * 1e-12 / scale;
            worst_root = worst_root.max(v);
        }
        for _ in 0..3 {
            let xi = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            let direct = t0_boundary(&pt, xi);
            worst_fact = worst_fact.max(rel(t0_factored(&pt, &roots, xi), direct));
            let real_xi = Complex64::new(xi.re, 0.0);
            if t0_boundary(&pt, real_xi).norm() < pt.z.im * pt.z.im {
                t0_floor_violations.push(format!("sample {i}: xi = {}", xi.re));
            }
        }
        let sums: Vec<Complex64> = (0..4).map(|j| residue_sum_with_roots(j, &pt, &roots)).collect();
        worst_res1 = worst_res1.max(sums[1].norm());
        worst_res3 = worst_res3.max(rel(sums[3], Complex64::new(0.5 / pt.q, 0.0)));
        for j in [0usize, 2] {
            worst_closed = worst_closed.max(rel(sums[j], residue_sum_closed_form(j as u32, &pt)?));
        }
        let bm = {
            let a11 = sums[0];
            let a12 = sums[1];
            let a22 = sums[2];
            a11 * a22 - a12 * a12
        };
        let (s1, s2) = (roots.sigma1_plus, roots.sigma2_plus);
        let vdm = (s2 - s1) * (s2 - s1) / (dpartial_t0(&pt, s1) * dpartial_t0(&pt, s2));
        worst_vdm = worst_vdm.max(rel(bm, vdm));
        // quadrature oracle on the correctly-branched rectangle
        let rect = Rect::enclosing_upper_roots(&sigma_roots(&pt));
        for j in 0..4u32 {
            match contour_residue_oracle(j, &pt, &rect) {
                Ok(v) => {
                    if j == 1 {
                        worst_contour1 = worst_contour1.max(v.norm());
                    } else {
                        let closed = residue_sum_closed_form(j, &pt)?;
                        worst_contour = worst_contour.max(rel(v, closed));
                    }
                }
                Err(e) => contour_errors.push(format!("sample {i}, j = {j}: {e}")),
            }
        }
    }
    let det = det_bounds_scan(
        1.0,
        Complex64::new(0.0, 1.0),
        &(0..=80).map(|i| 10f64.powf(4.0 + 4.0 * i as f64 / 80.0)).collect::<Vec<_>>(),
        &(0..=100).map(|i| i as f64 / 10.0).collect::<Vec<_>>(),
    )?;
    Ok(vec![
        CheckResult::at_least("root branch: min Im sigma+ > 0", worst_branch, f64::MIN_POSITIVE, branch_violations),
        CheckResult::at_most("roots annihilate t0 (units of 1e-12(1+|z|^2))", worst_root, 1.0, vec![]),
        CheckResult::at_most("factorization relative error", worst_fact, 1e-12, vec![]),
        CheckResult::at_most("residue_sum(1) magnitude", worst_res1, 1e-10, vec![]),
        CheckResult::at_most("residue_sum(3) vs 1/(2q)", worst_res3, 1e-12, vec![]),
        CheckResult::at_most("residue_sum(0,2) vs closed forms", worst_closed, 1e-10, vec![]),
        CheckResult::at_most("contour oracle vs closed forms (j=0,2,3)", worst_contour, 1e-8, contour_errors.clone()),
        CheckResult::at_most("contour oracle j=1 magnitude", worst_contour1, 1e-10, contour_errors),
        CheckResult::at_most("Vandermonde determinant relative error", worst_vdm, 1e-12, vec![]),
        CheckResult::at_most("|t0| >= (Im z)^2 violations", t0_floor_violations.len() as f64, 0.0, t0_floor_violations),
        CheckResult::at_most(
            "|det a|(1+s)^2 band ratio over s in [1e4, 1e8]",
            det.scaled_max / det.scaled_min,
            100.0,
            vec![],
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn t0_examples() {
        assert!(close(eval_t0(1.0, c(0.0, 0.0), c(0.0, 1.0)), c(-2.0, 0.0), 1e-15));
        assert!(close(eval_t0(1.0, c(1.0, 0.0), c(1.0, 0.0)), c(0.0, 0.0), 1e-15));
        assert!(close(eval_t0(2.0, c(3.0, 0.0), c(0.0, 1.0)), c(15.0, -15.0), 1e-13));
    }

    #[test]
    fn t0_factored_equals_expanded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let q = rng.gen_range(0.2..5.0);
            let p0 = c(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(0.01..2.0));
            assert!(rel(eval_t0(q, p0, z), eval_t0_expanded(q, p0, z)) < 1e-14);
        }
    }

    #[test]
    fn sigma_examples() {
        let r = sigma_roots(&SymbolPoint::new(3.0, 0.0, c(0.0, 1.0)).unwrap());
        let h = 0.5f64.sqrt();
        assert!(close(r.sigma1_plus, c(h, h), 1e-15));
        let r = sigma_roots(&SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap());
        assert!(close(r.sigma2_plus, c(1.0, 1.0), 1e-15));
        let r = sigma_roots(&SymbolPoint::new(1.0, 1.0, c(0.0, 2.0)).unwrap());
        // polar-form square root of −1 + 4i
        let modulus = 17f64.sqrt();
        let re = ((modulus - 1.0) / 2.0).sqrt();
        let im = 4.0 / (2.0 * re);
        assert!(close(r.sigma2_plus, c(re, im), 1e-14));
        assert!((re - 1.2496).abs() < 1e-4 && (im - 1.6005).abs() < 1e-4);
        assert_eq!(r.sigma1_minus, -r.sigma1_plus);
        assert_eq!(r.sigma2_minus, -r.sigma2_plus);
    }

    #[test]
    fn t0_boundary_examples() {
        let pt = SymbolPoint::new(2.0, 1.0, c(0.0, 1.0)).unwrap();
        assert!(close(t0_boundary(&pt, c(2.0, 0.0)), c(47.0, -25.0), 1e-12));
        let r = sigma_roots(&pt);
        assert!(t0_boundary(&pt, r.sigma1_plus).norm() < 1e-13);
    }

    #[test]
    fn dpartial_examples() {
        let pt = SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap();
        assert_eq!(dpartial_t0(&pt, c(0.0, 0.0)), c(0.0, 0.0));
        let r = sigma_roots(&pt);
        let d1 = dpartial_t0(&pt, r.sigma1_plus);
        assert!(close(d1, -2.0 * r.sigma1_plus * pt.z, 1e-14));
        assert!(close(d1, c(2f64.sqrt(), -(2f64.sqrt())), 1e-14));
        assert!(close(dpartial_t0(&pt, r.sigma2_plus), 2.0 * r.sigma2_plus * pt.z, 1e-14));
    }

    #[test]
    fn dpartial_matches_central_difference() {
        let pt = SymbolPoint::new(0.7, 3.0, c(0.4, 0.9)).unwrap();
        for xi in [c(0.3, 0.1), c(-2.0, 0.5), c(1.7, -0.2)] {
            let eps = 1e-6;
            let fd = (t0_boundary(&pt, xi + eps) - t0_boundary(&pt, xi - eps)) / (2.0 * eps);
            assert!(rel(fd, dpartial_t0(&pt, xi)) < 1e-6);
        }
    }

    #[test]
    fn residue_examples() {
        let pt = SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap();
        assert!(residue_sum(1, &pt).norm() < 1e-13);
        let r3 = residue_sum(3, &SymbolPoint::new(2.0, 5.0, c(0.3, 0.8)).unwrap());
        assert!(close(r3, c(0.25, 0.0), 1e-12), "{r3}");
        // (σ₁ − σ₂)/(2zσ₁σ₂) with σ₁ = (1+i)/√2, σ₂ = 1+i: (1+i)(1 − 1/√2)/(2√2)
        let expect = (1.0 - 0.5f64.sqrt()) / (2.0 * 2f64.sqrt());
        assert!(close(residue_sum(0, &pt), c(expect, expect), 1e-14));
        assert!((expect - 0.1036).abs() < 1e-4);
    }

    #[test]
    fn residue_sum_survives_large_s() {
        // s/|z/q| ≈ 1000: the two residues cancel to three digits
        for z in [c(0.2, 0.45), c(-0.49, 0.05), c(1.5, 1.3)] {
            let pt = SymbolPoint::new(5.0, 100.0, z).unwrap();
            assert!(close(residue_sum(3, &pt), c(0.1, 0.0), 1e-12));
            assert!(residue_sum(1, &pt).norm() < 1e-13);
            for j in [0, 2] {
                let closed = residue_sum_closed_form(j, &pt).unwrap();
                assert!(close(residue_sum(j, &pt), closed, 1e-11));
            }
        }
    }

    #[test]
    fn contour_oracle_examples() {
        let pt = SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap();
        let rect = Rect::enclosing_upper_roots(&sigma_roots(&pt));
        let v0 = contour_residue_oracle(0, &pt, &rect).unwrap();
        assert!(rel(v0, residue_sum(0, &pt)) < 1e-8);
        assert!(contour_residue_oracle(1, &pt, &rect).unwrap().norm() < 1e-10);
        let big = contour_residue_oracle(0, &pt, &rect.enlarged(2.0)).unwrap();
        assert!(rel(big, v0) < 1e-8);
    }

    #[test]
    fn contour_oracle_rejects_bad_rectangles() {
        let pt = SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap();
        let r = sigma_roots(&pt);
        // bottom edge through σ₁⁺
        let rect = Rect::new(-3.0, 3.0, r.sigma1_plus.im, 4.0);
        assert!(matches!(contour_residue_oracle(0, &pt, &rect), Err(Error::RootOnContour(_))));
        // encloses the minus roots too
        let rect = Rect::new(-3.0, 3.0, -3.0, 3.0);
        assert!(matches!(contour_residue_oracle(0, &pt, &rect), Err(Error::RootOnContour(_))));
    }

    #[test]
    fn boundary_matrix_examples() {
        let pt = SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap();
        let a = boundary_symbol_matrix(&pt);
        let r = sigma_roots(&pt);
        let a22 = (r.sigma2_plus - r.sigma1_plus) / (2.0 * pt.z);
        assert!(close(a.entries[(1, 1)], a22, 1e-14));
        assert!((a22.re - 0.1464).abs() < 1e-4 && (a22.im + 0.1464).abs() < 1e-4);
        assert_eq!(a.entries[(0, 1)], a.entries[(1, 0)]);
        let expect = 2.0 * ((1.0 - 0.5f64.sqrt()) / (2.0 * 2f64.sqrt())) * ((2f64.sqrt() - 1.0) / 2f64.sqrt() / 2.0);
        assert!(close(a.det, c(expect, 0.0), 1e-14));
        assert!((a.det.re - 0.03033).abs() < 1e-5);
        assert!(rel(vandermonde_det(&pt), a.det) < 1e-12);
    }

    #[test]
    fn inverse_examples() {
        let diag = BoundaryMatrix {
            entries: Matrix2::new(c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 4.0)),
            det: c(0.0, 8.0),
        };
        let inv = invert_boundary_matrix(&diag).unwrap();
        assert!(close(inv[(0, 0)], c(0.5, 0.0), 1e-15));
        assert!(close(inv[(1, 1)], c(0.0, -0.25), 1e-15));
        let a = boundary_symbol_matrix(&SymbolPoint::new(1.0, 0.0, c(0.0, 1.0)).unwrap());
        let prod = a.entries * invert_boundary_matrix(&a).unwrap();
        assert!((prod - Matrix2::identity()).norm() < 1e-12);
        let singular = BoundaryMatrix { entries: Matrix2::zeros(), det: c(0.0, 0.0) };
        assert!(matches!(invert_boundary_matrix(&singular), Err(Error::Singular(_))));
    }

    #[test]
    fn inverse_matches_cofactor_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut g = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let (p, o, d) = (g(), g(), g());
            let m = Matrix2::new(p, o, o, d);
            let bm = BoundaryMatrix { entries: m, det: p * d - o * o };
            let inv = invert_boundary_matrix(&bm).unwrap();
            let det = p * d - o * o;
            assert!(close(inv[(0, 0)], d / det, 1e-12 * (1.0 + inv.norm())));
            assert!(close(inv[(0, 1)], -o / det, 1e-12 * (1.0 + inv.norm())));
        }
    }

    #[test]
    fn det_bounds_examples() {
        let large: Vec<f64> = (0..=40).map(|i| 10f64.powf(4.0 + i as f64 / 10.0)).collect();
        // floor on the bounded range: the scan gives ≈ 6.1e-4 at s = 10
        let bounded: Vec<f64> = (0..=100).map(|i| i as f64 / 10.0).collect();
        let r = det_bounds_scan(1.0, c(0.0, 1.0), &large, &bounded).unwrap();
        assert!(r.scaled_max / r.scaled_min <= 100.0);
        assert!(r.bounded_min >= 5e-4, "bounded min {}", r.bounded_min);
        assert_eq!(r.t0_violations, 0);
        // asymptote |det|(1+s)² → 1/(16q²)
        assert!((r.scaled_max - 1.0 / 16.0).abs() < 1e-3);
        assert!(r.passes(2000.0));
    }

    #[test]
    fn root_imaginary_constant_is_moderate() {
        let hs: Vec<f64> = (4..=12).map(|k| 2f64.powi(-k)).collect();
        let k = root_imaginary_constant(0.04, &hs, &[0.2, 1.0, 5.0], &[0.0, 0.5, 1.0, 2.0, 5.0]).unwrap();
        assert!(k.is_finite() && k > 0.0 && k < 2.0 * (1.0f64 + 5.0).sqrt() + 1e-9, "K = {k}");
    }

    #[test]
    fn flipped_branch_is_detected() {
        let cfg = SymbolScanConfig { samples: 20, branch: Branch::Flipped, ..Default::default() };
        let checks = verify_symbols(&cfg).unwrap();
        assert!(!crate::checks::all_passed(&checks));
    }
}
