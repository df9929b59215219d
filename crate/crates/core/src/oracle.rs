//! Dispersion relations for constant `m` and an argument-principle root
//! finder.
//!
//! Separation of variables reduces the transmission problem to the zeros of
//! an entire function `d(k)`, with eigenvalue `λ = k²`:
//!
//! * interval `(0, L)`: the 4×4 determinant of the clamped conditions on
//!   `v − w` over the fundamental systems `{cos kx, sin kx}` and
//!   `{cos nkx, sin nkx}`;
//! * disk of radius `R`, angular mode `l`:
//!   `d_l(k) = J_l(kR)·nk·J_l'(nkR) − k·J_l'(kR)·J_l(nkR)`.
//!
//! Both are evaluated in double-double arithmetic and rounded at the end, so
//! the function values keep full relative accuracy even at high-order zeros.
//! `d` is even in `k` in both cases; the search is restricted to `Re k > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::Cdd;
use crate::error::{Error, Result};
use crate::symbols::{segment_integral, Rect};

/// Largest `|ζ|` accepted by [`bessel_j`].
pub const BESSEL_MAX_ARG: f64 = 40.0;

fn bessel_series(l: u32, zeta: Cdd) -> Cdd {
    let half = zeta * 0.5;
    let mut term = Cdd::ONE;
    for k in 1..=l {
        term = term * half / k as f64;
    }
    let w = -(half * half);
    let mut sum = term;
    let mut max = term.norm();
    let mut m = 0u32;
    loop {
        m += 1;
        term = term * w / (m as f64 * (m + l) as f64);
        sum = sum + term;
        let t = term.norm();
        max = max.max(t);
        // terms decay once m exceeds |ζ|/2; stop when they are negligible
        // against both the largest term and the running sum
        if (m as f64) > 0.5 * zeta.norm() && t <= 1e-32 * max && t <= 1e-18 * sum.norm() {
            break;
        }
        if t == 0.0 || m > 400 {
            break;
        }
    }
    sum
}

fn check_domain(zeta: Complex64) -> Result<()> {
    if !(zeta.norm() <= BESSEL_MAX_ARG) {
        return Err(Error::DomainExceeded(zeta.norm()));
    }
    Ok(())
}

/// `J_l(ζ)` by its power series, summed in double-double.
pub fn bessel_j(l: u32, zeta: Complex64) -> Result<Complex64> {
    check_domain(zeta)?;
    Ok(bessel_series(l, zeta.into()).to_c64())
}

fn bessel_jp_dd(l: u32, zeta: Cdd) -> Cdd {
    if l == 0 {
        -bessel_series(1, zeta)
    } else {
        (bessel_series(l - 1, zeta) - bessel_series(l + 1, zeta)) * 0.5
    }
}

/// `J_l'(ζ)`: `(J_{l−1} − J_{l+1})/2`, and `−J₁` for `l = 0`.
pub fn bessel_jp(l: u32, zeta: Complex64) -> Result<Complex64> {
    check_domain(zeta)?;
    Ok(bessel_jp_dd(l, zeta.into()).to_c64())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DispersionDomain {
    Interval { length: f64 },
    Disk { radius: f64, l: u32 },
}

/// Constant-index problem: `n² = 1 + m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionProblem {
    pub domain: DispersionDomain,
    pub n: f64,
}

impl DispersionProblem {
    pub fn new(domain: DispersionDomain, n: f64) -> Result<Self> {
        if !(n > 1.0) {
            return Err(Error::InvalidArgument(format!("index n must exceed 1, got {n}")));
        }
        match domain {
            DispersionDomain::Interval { length } if !(length > 0.0) => {
                return Err(Error::InvalidArgument(format!("interval length must be positive, got {length}")))
            }
            DispersionDomain::Disk { radius, .. } if !(radius > 0.0) => {
                return Err(Error::InvalidArgument(format!("disk radius must be positive, got {radius}")))
            }
            _ => {}
        }
        Ok(DispersionProblem { domain, n })
    }

    /// Index `n = √(1 + m)` of a constant perturbation `m`.
    pub fn from_m(domain: DispersionDomain, m: f64) -> Result<Self> {
        Self::new(domain, (1.0 + m).sqrt())
    }

    pub fn eval(&self, k: Complex64) -> Result<Complex64> {
        match self.domain {
            DispersionDomain::Interval { length } => interval_dispersion(k, self.n, length),
            DispersionDomain::Disk { radius, l } => disk_dispersion(k, self.n, radius, l),
        }
    }
}

fn det4(m: &[[Cdd; 4]; 4]) -> Cdd {
    // Laplace expansion along the first row with 2×2 minors of rows 2, 3
    let minor2 = |a: usize, b: usize, i: usize, j: usize| m[a][i] * m[b][j] - m[a][j] * m[b][i];
    let minor3 = |cols: [usize; 3]| {
        let [x, y, z] = cols;
        m[1][x] * minor2(2, 3, y, z) - m[1][y] * minor2(2, 3, x, z) + m[1][z] * minor2(2, 3, x, y)
    };
    let mut det = Cdd::ZERO;
    for c in 0..4 {
        let rest: Vec<usize> = (0..4).filter(|&j| j != c).collect();
        let term = m[0][c] * minor3([rest[0], rest[1], rest[2]]);
        det = if c % 2 == 0 { det + term } else { det - term };
    }
    det
}

/// Interval determinant; rows are `(v−w)(0)`, `(v−w)'(0)`, `(v−w)(L)`,
/// `(v−w)'(L)`, columns `cos kx`, `sin kx`, `−cos nkx`, `−sin nkx`.
pub fn interval_dispersion(k: Complex64, n: f64, length: f64) -> Result<Complex64> {
    if k.norm() == 0.0 {
        return Err(Error::InvalidArgument("k = 0 gives a degenerate fundamental system".into()));
    }
    let k = Cdd::from(k);
    let nk = k * n;
    let (s1, c1) = (k * length).sin_cos();
    let (s2, c2) = (nk * length).sin_cos();
    let (one, zero) = (Cdd::ONE, Cdd::ZERO);
    let m = [
        [one, zero, -one, zero],
        [zero, k, zero, -nk],
        [c1, s1, -c2, -s2],
        [-(k * s1), k * c1, nk * s2, -(nk * c2)],
    ];
    Ok(det4(&m).to_c64())
}

/// Disk dispersion function of angular mode `l`.
pub fn disk_dispersion(k: Complex64, n: f64, radius: f64, l: u32) -> Result<Complex64> {
    if k.norm() == 0.0 {
        return Err(Error::InvalidArgument("k = 0 gives a degenerate fundamental system".into()));
    }
    check_domain(k * n * radius)?;
    let kd = Cdd::from(k);
    let a = kd * radius;
    let b = kd * (n * radius);
    let d = bessel_series(l, a) * (kd * n) * bessel_jp_dd(l, b) - kd * bessel_jp_dd(l, a) * bessel_series(l, b);
    Ok(d.to_c64())
}

/// A zero of an analytic function with its winding-number multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub k: Complex64,
    pub multiplicity: usize,
    /// `|f(k)|` divided by the local scale of `f`.
    pub residual: f64,
}

const EDGE_SAMPLES: usize = 48;
const MAX_EDGE_DEPTH: usize = 40;
const SPLIT_RATIOS: [f64; 6] = [0.5137, 0.4711, 0.5629, 0.4282, 0.6047, 0.3871];

struct Finder<'a, F> {
    f: &'a F,
}

fn rect_center(r: &Rect) -> Complex64 {
    Complex64::new(0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max))
}

fn arg_step(a: Complex64, b: Complex64) -> f64 {
    (b / a).arg()
}

impl<F: Fn(Complex64) -> Result<Complex64> + Sync> Finder<'_, F> {
    fn eval(&self, k: Complex64) -> Result<Complex64> {
        let v = (self.f)(k)?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite("function value on the search contour"));
        }
        Ok(v)
    }

    fn edge_arg(&self, a: Complex64, b: Complex64, fa: Complex64, fb: Complex64, depth: usize, diam: f64) -> Result<f64> {
        if fa.norm() == 0.0 || fb.norm() == 0.0 {
            return Err(Error::RootOnContour(0.0));
        }
        let m = 0.5 * (a + b);
        let fm = self.eval(m)?;
        if fm.norm() == 0.0 {
            return Err(Error::RootOnContour(0.0));
        }
        let (d1, d2) = (arg_step(fa, fm), arg_step(fm, fb));
        if d1.abs() < 0.25 * PI && d2.abs() < 0.25 * PI && (d1 + d2 - arg_step(fa, fb)).abs() < 1e-9 {
            return Ok(d1 + d2);
        }
        if depth >= MAX_EDGE_DEPTH || (b - a).norm() < 1e-12 * diam {
            return Err(Error::RootOnContour((b - a).norm()));
        }
        Ok(self.edge_arg(a, m, fa, fm, depth + 1, diam)? + self.edge_arg(m, b, fm, fb, depth + 1, diam)?)
    }

    fn winding(&self, rect: &Rect) -> Result<usize> {
        let c = rect.corners();
        let diam = rect.diameter();
        let mut total = 0.0;
        for e in 0..4 {
            let (a, b) = (c[e], c[(e + 1) % 4]);
            let pts: Vec<Complex64> = (0..=EDGE_SAMPLES).map(|i| a + (b - a) * (i as f64 / EDGE_SAMPLES as f64)).collect();
            let vals = pts.iter().map(|&p| self.eval(p)).collect::<Result<Vec<_>>>()?;
            for i in 0..EDGE_SAMPLES {
                total += self.edge_arg(pts[i], pts[i + 1], vals[i], vals[i + 1], 0, diam)?;
            }
        }
        let w = total / (2.0 * PI);
        if (w - w.round()).abs() > 0.05 || w.round() < 0.0 {
            return Err(Error::NonIntegerWinding(w));
        }
        Ok(w.round() as usize)
    }

    /// `f'(k)` by the fourth-order central difference with step `h`.
    fn derivative(&self, k: Complex64, h: f64) -> Result<Complex64> {
        let f1 = self.eval(k + h)? - self.eval(k - h)?;
        let f2 = self.eval(k + 2.0 * h)? - self.eval(k - 2.0 * h)?;
        Ok((8.0 * f1 - f2) / (12.0 * h))
    }

    /// `(1/2πi) ∮ (k − c)^p f'/f dk` over the boundary of `rect` about its
    /// centre `c`, for `p = 1, …, count − 1` (slot 0 is left at zero).
    fn moments(&self, rect: &Rect, rel_tol: f64, count: usize) -> Result<[Complex64; 3]> {
        let c0 = rect_center(rect);
        let diam = rect.diameter();
        let h = 1e-4 * diam;
        let corners = rect.corners();
        let mut out = [Complex64::new(0.0, 0.0); 3];
        let failure = std::cell::Cell::new(None);
        for (p, slot) in out.iter_mut().enumerate().take(count).skip(1) {
            let g = |k: Complex64| -> Complex64 {
                match (self.eval(k), self.derivative(k, h)) {
                    (Ok(v), Ok(d)) => (k - c0).powu(p as u32) * d / v,
                    (Err(e), _) | (_, Err(e)) => {
                        failure.set(Some(e));
                        Complex64::new(0.0, 0.0)
                    }
                }
            };
            let tol = rel_tol * diam.powi(p as i32).max(1e-300) * 2.0 * PI;
            let mut total = Complex64::new(0.0, 0.0);
            for e in 0..4 {
                total += segment_integral(&g, corners[e], corners[(e + 1) % 4], tol);
            }
            if let Some(e) = failure.take() {
                return Err(e);
            }
            *slot = total / Complex64::new(0.0, 2.0 * PI);
        }
        Ok(out)
    }

    /// `max |f|` on four points at distance `1e-3(1 + |k|)`.
    fn local_scale(&self, k: Complex64) -> Result<f64> {
        let r = 1e-3 * (1.0 + k.norm());
        let mut s: f64 = 0.0;
        for d in [Complex64::new(r, 0.0), Complex64::new(-r, 0.0), Complex64::new(0.0, r), Complex64::new(0.0, -r)] {
            s = s.max(self.eval(k + d)?.norm());
        }
        Ok(s)
    }

    fn newton(&self, start: Complex64) -> Result<Complex64> {
        let mut k = start;
        for _ in 0..60 {
            let h = 1e-6 * (1.0 + k.norm());
            let v = self.eval(k)?;
            let d = (self.eval(k + h)? - self.eval(k - h)?) / (2.0 * h);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            k -= step;
            if step.norm() <= 1e-15 * (1.0 + k.norm()) {
                break;
            }
        }
        Ok(k)
    }

    fn accept(&self, k: Complex64, multiplicity: usize) -> Result<Option<Zero>> {
        let scale = self.local_scale(k)?;
        let residual = self.eval(k)?.norm() / scale.max(f64::MIN_POSITIVE);
        Ok((residual <= 1e-9).then_some(Zero { k, multiplicity, residual }))
    }

    fn split(&self, rect: &Rect, ratio: f64) -> (Rect, Rect) {
        let (w, h) = (rect.re_max - rect.re_min, rect.im_max - rect.im_min);
        if w >= h {
            let x = rect.re_min + ratio * w;
            (Rect::new(rect.re_min, x, rect.im_min, rect.im_max), Rect::new(x, rect.re_max, rect.im_min, rect.im_max))
        } else {
            let y = rect.im_min + ratio * h;
            (Rect::new(rect.re_min, rect.re_max, rect.im_min, y), Rect::new(rect.re_min, rect.re_max, y, rect.im_max))
        }
    }

    fn search(&self, rect: &Rect, winding: usize, depth: usize, maxdepth: usize) -> Result<Vec<Zero>> {
        if winding == 0 {
            return Ok(vec![]);
        }
        let cell_error = || Error::MaxDepthExceeded {
            re_min: rect.re_min,
            re_max: rect.re_max,
            im_min: rect.im_min,
            im_max: rect.im_max,
        };
        let tiny = rect.diameter() < 1e-12 * (1.0 + rect.corners()[0].norm());
        let slack = 1e-9 * rect.diameter();
        let grown = Rect::new(rect.re_min - slack, rect.re_max + slack, rect.im_min - slack, rect.im_max + slack);
        if winding == 1 {
            // cheap attempt from the centre, then from the moment centroid
            let k = self.newton(rect_center(rect))?;
            if grown.contains(k) {
                if let Some(z) = self.accept(k, 1)? {
                    return Ok(vec![z]);
                }
            }
            let [_, m1, _] = self.moments(rect, 1e-6, 2)?;
            let k = self.newton(rect_center(rect) + m1)?;
            if grown.contains(k) {
                if let Some(z) = self.accept(k, 1)? {
                    return Ok(vec![z]);
                }
            }
        } else {
            // a loose spread estimate decides whether the cluster is worth resolving
            let w = winding as f64;
            let spread_of = |m: [Complex64; 3]| (m[2] / w - (m[1] / w).powu(2)).norm().sqrt();
            let coarse = self.moments(rect, 1e-6, 3)?;
            if spread_of(coarse) <= 1e-3 * rect.diameter() {
                let fine = self.moments(rect, 1e-13, 3)?;
                let mean = rect_center(rect) + fine[1] / w;
                if spread_of(fine) <= 1e-8 * (1.0 + mean.norm()) {
                    if let Some(z) = self.accept(mean, winding)? {
                        return Ok(vec![z]);
                    }
                }
            }
        }
        if depth >= maxdepth || tiny {
            return Err(cell_error());
        }
        let mut last = None;
        for &ratio in &SPLIT_RATIOS {
            let (a, b) = self.split(rect, ratio);
            let (wa, wb) = match (self.winding(&a), self.winding(&b)) {
                (Ok(x), Ok(y)) => (x, y),
                (Err(e), _) | (_, Err(e)) => {
                    last = Some(e);
                    continue;
                }
            };
            if wa + wb != winding {
                last = Some(Error::NonIntegerWinding((wa + wb) as f64));
                continue;
            }
            let (za, zb) = rayon::join(|| self.search(&a, wa, depth + 1, maxdepth), || self.search(&b, wb, depth + 1, maxdepth));
            let mut out = za?;
            out.extend(zb?);
            return Ok(out);
        }
        Err(last.unwrap_or_else(cell_error))
    }
}

/// Winding number of `f` around `rect`.
pub fn winding_number<F: Fn(Complex64) -> Result<Complex64> + Sync>(f: &F, rect: &Rect) -> Result<usize> {
    Finder { f }.winding(rect)
}

/// All zeros of `f` inside `rect`, sorted by real then imaginary part.
///
/// The rectangle is grown by `1e-6` of its diameter (a few times) when a zero
/// sits on its boundary.
pub fn find_zeros_rectangle<F: Fn(Complex64) -> Result<Complex64> + Sync>(f: &F, rect: &Rect, maxdepth: usize) -> Result<Vec<Zero>> {
    if !(rect.re_max > rect.re_min && rect.im_max > rect.im_min) {
        return Err(Error::InvalidArgument("search rectangle is empty".into()));
    }
    let finder = Finder { f };
    let mut r = *rect;
    let mut last = None;
    for attempt in 0..4 {
        match finder.winding(&r) {
            Ok(w) => {
                let mut zeros = finder.search(&r, w, 0, maxdepth)?;
                zeros.sort_by(|a, b| a.k.re.total_cmp(&b.k.re).then(a.k.im.total_cmp(&b.k.im)));
                return Ok(zeros);
            }
            Err(Error::RootOnContour(d)) => {
                last = Some(Error::RootOnContour(d));
                let pad = 1e-6 * rect.diameter() * (attempt + 1) as f64;
                r = Rect::new(r.re_min - pad, r.re_max + pad, r.im_min - pad, r.im_max + pad);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::RootOnContour(0.0)))
}

/// Transmission eigenvalue from the dispersion relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleEigenvalue {
    pub lambda: Complex64,
    pub k: Complex64,
    pub multiplicity: usize,
    /// `|d(k)|` over the local scale of `d`.
    pub residual: f64,
}

/// Zeros of the dispersion function in `searchbox` (which must lie in
/// `Re k > 0`) mapped to `λ = k²`, sorted by `|λ|`.
pub fn oracle_eigenvalues(prob: &DispersionProblem, searchbox: &Rect, maxdepth: usize) -> Result<Vec<OracleEigenvalue>> {
    if !(searchbox.re_min > 0.0) {
        return Err(Error::Precondition("search box must lie in the open right half-plane Re k > 0".into()));
    }
    let f = |k: Complex64| prob.eval(k);
    let zeros = find_zeros_rectangle(&f, searchbox, maxdepth)?;
    let mut out: Vec<OracleEigenvalue> =
        zeros.iter().map(|z| OracleEigenvalue { lambda: z.k * z.k, k: z.k, multiplicity: z.multiplicity, residual: z.residual }).collect();
    out.sort_by(|a, b| {
        a.lambda
            .norm()
            .total_cmp(&b.lambda.norm())
            .then(a.lambda.re.total_cmp(&b.lambda.re))
            .then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    Ok(out)
}

/// Default `k`-plane search boxes.
pub fn default_search_box(domain: &DispersionDomain) -> Rect {
    match domain {
        DispersionDomain::Interval { .. } => Rect::new(0.5, 20.0, -3.0, 3.0),
        DispersionDomain::Disk { .. } => Rect::new(0.5, 12.0, -3.0, 3.0),
    }
}

/// Real zeros of a function that is real on the real axis.
///
/// Scans `samples` points of `[a, b]`. Sign changes of `f` are bisected
/// directly. Even-order zeros (no sign change) show up as sign changes of
/// `f'` at points where `|f|` is tiny against its neighbours; those are
/// bisected on `f'` (central differences, step `1e-6(1+|k|)`).
pub fn real_axis_zeros<F: Fn(f64) -> Result<f64>>(f: &F, a: f64, b: f64, samples: usize) -> Result<Vec<f64>> {
    if !(b > a) || samples < 3 {
        return Err(Error::InvalidArgument("real scan needs b > a and at least 3 samples".into()));
    }
    let xs: Vec<f64> = (0..samples).map(|i| a + (b - a) * i as f64 / (samples - 1) as f64).collect();
    let ys = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let deriv = |x: f64| -> Result<f64> {
        let h = 1e-6 * (1.0 + x.abs());
        Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
    };
    let bisect = |g: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64| -> Result<f64> {
        let mut glo = g(lo)?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let gm = g(mid)?;
            if gm == 0.0 {
                return Ok(mid);
            }
            if (gm > 0.0) == (glo > 0.0) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };
    let mut zeros = Vec::new();
    for i in 0..samples - 1 {
        if ys[i] == 0.0 {
            zeros.push(xs[i]);
        } else if (ys[i] > 0.0) != (ys[i + 1] > 0.0) && ys[i + 1] != 0.0 {
            zeros.push(bisect(f, xs[i], xs[i + 1])?);
        }
    }
    // touching zeros: local minima of |f| that are much deeper than the neighbours
    for i in 1..samples - 1 {
        let (l, c, r) = (ys[i - 1], ys[i], ys[i + 1]);
        if (l > 0.0) == (c > 0.0) && (c > 0.0) == (r > 0.0) && c.abs() < l.abs() && c.abs() <= r.abs() {
            let (lo, hi) = (xs[i - 1], xs[i + 1]);
            let (dl, dh) = (deriv(lo)?, deriv(hi)?);
            if (dl > 0.0) == (dh > 0.0) {
                continue;
            }
            let x = bisect(&deriv, lo, hi)?;
            let fx = f(x)?.abs();
            if fx <= 1e-9 * l.abs().max(r.abs()) {
                zeros.push(x);
            }
        }
    }
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn bessel_reference_values() {
        assert_eq!(bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        assert_eq!(bessel_j(1, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        let cases = [
            (0, c(1.0, 0.0), c(0.7651976865579666, 0.0)),
            (1, c(1.0, 0.0), c(0.4400505857449335, 0.0)),
            (0, c(10.0, 0.0), c(-0.24593576445134835, 0.0)),
            (0, c(30.0, 0.0), c(-0.08636798358104021, 0.0)),
            (3, c(20.0, 0.0), c(-0.09890139456044968, 0.0)),
            (5, c(39.5, 0.0), c(0.12375556686343922, 0.0)),
            (0, c(3.0, 2.0), c(-1.2492348796074222, -0.9479837920577348)),
            (2, c(-4.0, 7.0), c(93.35961701441919, 83.08351372637456)),
            (1, c(0.0, 25.0), c(0.0, 5657865129.878701)),
            (4, c(12.5, -1.0), c(0.3370550325817684, -0.04121958455441285)),
        ];
        for (l, z, expect) in cases {
            let got = bessel_j(l, z).unwrap();
            assert!(rel(got, expect) < 1e-12, "J_{l}({z}) = {got}, expected {expect}");
        }
        assert!(matches!(bessel_j(0, c(40.5, 0.0)), Err(Error::DomainExceeded(_))));
    }

    #[test]
    fn bessel_derivative_relations() {
        let z = c(2.3, 0.4);
        assert_eq!(bessel_jp(0, z).unwrap(), -bessel_j(1, z).unwrap());
        let h = 1e-5;
        for l in 0..4 {
            let fd = (bessel_j(l, z + h).unwrap() - bessel_j(l, z - h).unwrap()) / (2.0 * h);
            assert!((fd - bessel_jp(l, z).unwrap()).norm() < 1e-9);
        }
    }

    #[test]
    fn first_zero_of_j0_by_bisection() {
        let f = |x: f64| Ok(bessel_j(0, c(x, 0.0))?.re);
        let zeros = real_axis_zeros(&f, 1.0, 3.0, 21).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0] - 2.404825557695773).abs() < 1e-9);
    }

    #[test]
    fn interval_dispersion_properties() {
        assert!(interval_dispersion(c(0.0, 0.0), 2.0, 1.0).is_err());
        for k in [c(0.7, 0.1), c(3.3, -1.2), c(9.0, 2.0)] {
            assert!(interval_dispersion(k, 1.0, 1.0).unwrap().norm() < 1e-12 * (1.0 + k.norm()).powi(4));
            let d = interval_dispersion(k, 2.0, 1.0).unwrap();
            assert!(rel(interval_dispersion(-k, 2.0, 1.0).unwrap(), d) < 1e-13);
            assert!(rel(interval_dispersion(k.conj(), 2.0, 1.0).unwrap(), d.conj()) < 1e-13);
            // n = 2, L = 1 closed form 2k²(cos k − 1)²(cos k + 2), up to sign
            let closed = 2.0 * k * k * (k.cos() - 1.0).powu(2) * (k.cos() + 2.0);
            assert!(rel(d, closed) < 1e-10 || rel(d, -closed) < 1e-10, "{d} vs {closed}");
        }
    }

    #[test]
    fn disk_dispersion_properties() {
        for k in [c(1.1, 0.2), c(4.0, -0.7)] {
            for l in 0..3 {
                assert!(disk_dispersion(k, 1.0, 1.0, l).unwrap().norm() < 1e-13);
                let d = disk_dispersion(k, 2.0, 1.0, l).unwrap();
                assert!(rel(disk_dispersion(k.conj(), 2.0, 1.0, l).unwrap(), d.conj()) < 1e-13);
            }
        }
        assert!(matches!(disk_dispersion(c(25.0, 0.0), 2.0, 1.0, 0), Err(Error::DomainExceeded(_))));
    }

    #[test]
    fn finder_simple_examples() {
        let f = |z: Complex64| Ok(z * z + 1.0);
        let zeros = find_zeros_rectangle(&f, &Rect::new(-2.0, 2.0, 0.0, 2.0), 30).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].k - c(0.0, 1.0)).norm() < 1e-12);
        let g = |z: Complex64| Ok((z - c(1.0, 1.0)) * (z - 3.0) * (z + c(0.0, 2.0)));
        let zeros = find_zeros_rectangle(&g, &Rect::new(-4.0, 4.0, -4.0, 4.0), 30).unwrap();
        assert_eq!(zeros.len(), 3);
        for expect in [c(1.0, 1.0), c(3.0, 0.0), c(0.0, -2.0)] {
            assert!(zeros.iter().any(|z| (z.k - expect).norm() < 1e-10 && z.multiplicity == 1));
        }
    }

    #[test]
    fn finder_reports_multiplicity() {
        let f = |z: Complex64| Ok((z - c(0.3, 0.2)).powu(3) * (z + 1.0));
        let zeros = find_zeros_rectangle(&f, &Rect::new(-2.0, 2.0, -1.0, 1.0), 30).unwrap();
        assert_eq!(zeros.len(), 2);
        let triple = zeros.iter().find(|z| z.multiplicity == 3).unwrap();
        assert!((triple.k - c(0.3, 0.2)).norm() < 1e-8);
    }

    #[test]
    fn finder_handles_zero_on_boundary() {
        let f = |z: Complex64| Ok(z - c(1.0, 0.5));
        let zeros = find_zeros_rectangle(&f, &Rect::new(1.0, 2.0, 0.0, 1.0), 30).unwrap();
        assert_eq!(zeros.len(), 1);
        assert!((zeros[0].k - c(1.0, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn winding_counts() {
        let f = |z: Complex64| Ok((z - c(0.5, 0.5)) * (z - c(5.0, 0.0)));
        assert_eq!(winding_number(&f, &Rect::new(0.0, 1.0, 0.0, 1.0)).unwrap(), 1);
        assert_eq!(winding_number(&f, &Rect::new(1.0, 2.0, 0.0, 1.0)).unwrap(), 0);
        assert_eq!(winding_number(&f, &Rect::new(0.0, 6.0, -1.0, 1.0)).unwrap(), 2);
    }

    #[test]
    fn dispersion_is_analytic() {
        // Cauchy–Riemann: derivative along the real and imaginary directions agree
        let h = 1e-6;
        for k in [c(2.1, 0.7), c(7.5, -1.9)] {
            let p = DispersionProblem::new(DispersionDomain::Interval { length: 1.0 }, 2.0).unwrap();
            let q = DispersionProblem::new(DispersionDomain::Disk { radius: 1.0, l: 2 }, 2.0).unwrap();
            for prob in [p, q] {
                let dx = (prob.eval(k + h).unwrap() - prob.eval(k - h).unwrap()) / (2.0 * h);
                let dy = (prob.eval(k + c(0.0, h)).unwrap() - prob.eval(k - c(0.0, h)).unwrap()) / (2.0 * c(0.0, h));
                assert!((dx - dy).norm() < 1e-7 * dx.norm(), "{dx} vs {dy}");
            }
        }
    }

    #[test]
    fn problem_validation() {
        assert!(DispersionProblem::new(DispersionDomain::Interval { length: 1.0 }, 1.0).is_err());
        assert!(DispersionProblem::new(DispersionDomain::Disk { radius: 0.0, l: 0 }, 2.0).is_err());
        let p = DispersionProblem::from_m(DispersionDomain::Interval { length: 1.0 }, 3.0).unwrap();
        assert_eq!(p.n, 2.0);
        assert!(matches!(oracle_eigenvalues(&p, &Rect::new(0.0, 4.0, -1.0, 1.0), 20), Err(Error::Precondition(_))));
    }
}
