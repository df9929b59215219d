//! Truncated bivariate Taylor series ("jets") in `(x, ξ)`.
//!
//! A [`Jet2`] of order `(nx, nxi)` stores normalised coefficients
//! `c[i][j] = ∂ₓⁱ∂_ξʲ f / (i! j!)` at a base point, for `i ≤ nx`, `j ≤ nxi`.
//! Products and reciprocals are exact on the retained coefficients, so
//! rational expressions in symbol coefficients are differentiated without
//! finite differences.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    nx: usize,
    nxi: usize,
    c: Vec<Complex64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Jet2 {
    pub fn zeros(nx: usize, nxi: usize) -> Self {
        Jet2 { nx, nxi, c: vec![Complex64::new(0.0, 0.0); (nx + 1) * (nxi + 1)] }
    }

    pub fn constant(value: Complex64, nx: usize, nxi: usize) -> Self {
        let mut j = Self::zeros(nx, nxi);
        j.c[0] = value;
        j
    }

    /// Jet of a function of `x` alone from its derivatives `[f, f', f'', …]`.
    pub fn from_x_derivatives(derivs: &[f64], nx: usize, nxi: usize) -> Self {
        let mut j = Self::zeros(nx, nxi);
        for (i, d) in derivs.iter().enumerate().take(nx + 1) {
            j.set(i, 0, Complex64::new(d / factorial(i), 0.0));
        }
        j
    }

    /// Jet of the coordinate `ξ` at base value `xi`.
    pub fn xi_variable(xi: f64, nx: usize, nxi: usize) -> Self {
        let mut j = Self::constant(Complex64::new(xi, 0.0), nx, nxi);
        if nxi >= 1 {
            j.set(0, 1, Complex64::new(1.0, 0.0));
        }
        j
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.nx, self.nxi)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.nxi + 1) + j
    }

    /// Normalised coefficient `∂ₓⁱ∂_ξʲ f / (i! j!)`.
    pub fn coeff(&self, i: usize, j: usize) -> Complex64 {
        if i > self.nx || j > self.nxi {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[self.idx(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        let k = self.idx(i, j);
        self.c[k] = v;
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    /// `∂ₓᵃ∂_ξᵇ f` at the base point.
    pub fn derivative(&self, a: usize, b: usize) -> Complex64 {
        self.coeff(a, b) * (factorial(a) * factorial(b))
    }

    /// Jet of `∂ₓᵃ∂_ξᵇ f`, of order `(nx − a, nxi − b)`.
    pub fn differentiate(&self, a: usize, b: usize) -> Jet2 {
        assert!(a <= self.nx && b <= self.nxi, "jet too short to differentiate");
        let mut out = Jet2::zeros(self.nx - a, self.nxi - b);
        for i in 0..=out.nx {
            for j in 0..=out.nxi {
                let scale = factorial(i + a) / factorial(i) * factorial(j + b) / factorial(j);
                out.set(i, j, self.coeff(i + a, j + b) * scale);
            }
        }
        out
    }

    /// Drop coefficients beyond `(nx, nxi)`.
    pub fn truncate(&self, nx: usize, nxi: usize) -> Jet2 {
        let mut out = Jet2::zeros(nx, nxi);
        for i in 0..=nx.min(self.nx) {
            for j in 0..=nxi.min(self.nxi) {
                out.set(i, j, self.coeff(i, j));
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Jet2 {
        Jet2 { nx: self.nx, nxi: self.nxi, c: self.c.iter().map(|v| v * s).collect() }
    }

    /// `1/f`; requires `f(base) ≠ 0`.
    pub fn recip(&self) -> Jet2 {
        let f00 = self.c[0];
        let mut g = Jet2::zeros(self.nx, self.nxi);
        for i in 0..=self.nx {
            for j in 0..=self.nxi {
                let mut acc = if i == 0 && j == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                for k in 0..=i {
                    for l in 0..=j {
                        if k == 0 && l == 0 {
                            continue;
                        }
                        acc -= self.coeff(k, l) * g.coeff(i - k, j - l);
                    }
                }
                g.set(i, j, acc / f00);
            }
        }
        g
    }

    pub fn powu(&self, n: u32) -> Jet2 {
        let mut out = Jet2::constant(Complex64::new(1.0, 0.0), self.nx, self.nxi);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    fn binary<F: Fn(Complex64, Complex64) -> Complex64>(&self, rhs: &Jet2, f: F) -> Jet2 {
        let nx = self.nx.min(rhs.nx);
        let nxi = self.nxi.min(rhs.nxi);
        let mut out = Jet2::zeros(nx, nxi);
        for i in 0..=nx {
            for j in 0..=nxi {
                out.set(i, j, f(self.coeff(i, j), rhs.coeff(i, j)));
            }
        }
        out
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.binary(rhs, |a, b| a + b)
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.binary(rhs, |a, b| a - b)
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Add<Complex64> for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Complex64) -> Jet2 {
        let mut out = self.clone();
        out.c[0] += rhs;
        out
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        let nx = self.nx.min(rhs.nx);
        let nxi = self.nxi.min(rhs.nxi);
        let mut out = Jet2::zeros(nx, nxi);
        for i in 0..=nx {
            for j in 0..=nxi {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..=i {
                    for l in 0..=j {
                        acc += self.coeff(k, l) * rhs.coeff(i - k, j - l);
                    }
                }
                out.set(i, j, acc);
            }
        }
        out
    }
}

impl Mul<Complex64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Complex64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
