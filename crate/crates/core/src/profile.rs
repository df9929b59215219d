//! Refractive perturbation profiles `m(x) > 0` and their reciprocal `q = 1/m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Functional form of the perturbation. Gaussian and polynomial families are
/// parameterised through `q = 1/m`, which is what every assembled form
/// consumes; their `q`-derivatives are available in closed form to any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileKind {
    /// `m(x) = m`.
    Constant { m: f64 },
    /// `q(x) = q0 + amplitude · exp(−((x − center)/width)²)`.
    Gaussian {
        q0: f64,
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `q(x) = Σ q_coeffs[k] · x^k`.
    Polynomial { q_coeffs: Vec<f64> },
}

/// A perturbation profile bound to the closed domain `[lo, hi]` it is used on
/// (an interval, or the radial segment `[0, R]` of a disk).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefractiveProfile {
    pub kind: ProfileKind,
    pub lo: f64,
    pub hi: f64,
    grad_q_sup: f64,
    m_min: f64,
}

const SAMPLES: usize = 4001;

impl RefractiveProfile {
    pub fn new(kind: ProfileKind, lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("profile domain [{lo}, {hi}] is empty")));
        }
        match &kind {
            ProfileKind::Constant { m } if !(*m > 0.0 && m.is_finite()) => {
                return Err(Error::InvalidArgument(format!("constant m must be positive, got {m}")));
            }
            ProfileKind::Gaussian { width, .. } if !(*width > 0.0) => {
                return Err(Error::InvalidArgument(format!("gaussian width must be positive, got {width}")));
            }
            ProfileKind::Polynomial { q_coeffs } if q_coeffs.is_empty() => {
                return Err(Error::InvalidArgument("polynomial profile needs coefficients".into()));
            }
            _ => {}
        }
        let mut profile = RefractiveProfile { kind, lo, hi, grad_q_sup: 0.0, m_min: 0.0 };
        let mut q_max = f64::NEG_INFINITY;
        let mut q_min = f64::INFINITY;
        for i in 0..SAMPLES {
            let x = lo + (hi - lo) * i as f64 / (SAMPLES - 1) as f64;
            let q = profile.q(x);
            if !q.is_finite() {
                return Err(Error::NonFinite("profile q"));
            }
            q_max = q_max.max(q);
            q_min = q_min.min(q);
        }
        if !(q_min > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "q = 1/m must stay positive on [{lo}, {hi}] (min sampled q = {q_min})"
            )));
        }
        profile.m_min = 1.0 / q_max;
        profile.grad_q_sup = profile.sample_grad_sup();
        Ok(profile)
    }

    pub fn constant(m: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(ProfileKind::Constant { m }, lo, hi)
    }

    pub fn gaussian(q0: f64, amplitude: f64, center: f64, width: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(ProfileKind::Gaussian { q0, amplitude, center, width }, lo, hi)
    }

    pub fn polynomial(q_coeffs: Vec<f64>, lo: f64, hi: f64) -> Result<Self> {
        Self::new(ProfileKind::Polynomial { q_coeffs }, lo, hi)
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            ProfileKind::Constant { .. } => true,
            ProfileKind::Gaussian { amplitude, .. } => *amplitude == 0.0,
            ProfileKind::Polynomial { q_coeffs } => q_coeffs[1..].iter().all(|&c| c == 0.0),
        }
    }

    pub fn q(&self, x: f64) -> f64 {
        self.q_derivatives(x, 0)[0]
    }

    pub fn m(&self, x: f64) -> f64 {
        1.0 / self.q(x)
    }

    /// Lower bound of `m` over the domain (from the sampling grid).
    pub fn m_min(&self) -> f64 {
        self.m_min
    }

    /// `‖∇q‖_{L∞}` over the domain.
    pub fn grad_q_sup(&self) -> f64 {
        self.grad_q_sup
    }

    /// `[q(x), q'(x), …, q^{(order)}(x)]`.
    pub fn q_derivatives(&self, x: f64, order: usize) -> Vec<f64> {
        let mut out = vec![0.0; order + 1];
        match &self.kind {
            ProfileKind::Constant { m } => out[0] = 1.0 / m,
            ProfileKind::Gaussian { q0, amplitude, center, width } => {
                let u = (x - center) / width;
                let e = (-u * u).exp();
                // d^k/dx^k e^{-u²} = (−1)^k H_k(u) e^{-u²} / width^k (physicists' Hermite)
                let (mut h_prev, mut h) = (0.0, 1.0);
                let mut scale = 1.0;
                for (k, slot) in out.iter_mut().enumerate() {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    *slot = amplitude * sign * h * e * scale;
                    let h_next = 2.0 * u * h - 2.0 * k as f64 * h_prev;
                    h_prev = h;
                    h = h_next;
                    scale /= width;
                }
                out[0] += q0;
            }
            ProfileKind::Polynomial { q_coeffs } => {
                // repeated synthetic differentiation
                let mut coeffs = q_coeffs.clone();
                for slot in out.iter_mut() {
                    if coeffs.is_empty() {
                        break;
                    }
                    *slot = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
                    coeffs = coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect();
                }
            }
        }
        out
    }

    /// `α·q`, i.e. `m ↦ m/α`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        let kind = match &self.kind {
            ProfileKind::Constant { m } => ProfileKind::Constant { m: m / alpha },
            ProfileKind::Gaussian { q0, amplitude, center, width } => ProfileKind::Gaussian {
                q0: alpha * q0,
                amplitude: alpha * amplitude,
                center: *center,
                width: *width,
            },
            ProfileKind::Polynomial { q_coeffs } => ProfileKind::Polynomial {
                q_coeffs: q_coeffs.iter().map(|c| alpha * c).collect(),
            },
        };
        Self::new(kind, self.lo, self.hi)
    }

    fn slope(&self, x: f64) -> f64 {
        self.q_derivatives(x, 1)[1].abs()
    }

    fn sample_grad_sup(&self) -> f64 {
        if self.is_constant() {
            return 0.0;
        }
        let h = (self.hi - self.lo) / (SAMPLES - 1) as f64;
        let mut best = (self.lo, self.slope(self.lo));
        for i in 1..SAMPLES {
            let x = self.lo + h * i as f64;
            let s = self.slope(x);
            if s > best.1 {
                best = (x, s);
            }
        }
        // golden-section refinement of the sampled maximum
        let (mut a, mut b) = ((best.0 - h).max(self.lo), (best.0 + h).min(self.hi));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        for _ in 0..80 {
            if self.slope(c) > self.slope(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        best.1.max(self.slope(0.5 * (a + b)))
    }
}
