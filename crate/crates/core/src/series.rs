//! Truncated Taylor arithmetic for extracting cumulants from log-MGFs.
//!
//! A [`Taylor`] holds the coefficients of `w^0..w^8`, enough for cumulants
//! up to order eight; every operation drops higher powers. Models whose
//! log-MGF is an explicit composition of polynomials with `ln` or `exp`
//! get exact (up to rounding) cumulants this way, with no step-size tuning.

use core::ops::{Add, Div, Mul, Sub};
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Highest power carried by a [`Taylor`].
pub const ORDER: usize = 8;

const LEN: usize = ORDER + 1;

pub(crate) const FACTORIAL: [f64; LEN] =
    [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0, 40320.0];

/// Polynomial in one variable truncated at degree [`ORDER`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Taylor {
    /// `c[n]` is the coefficient of `w^n`.
    pub c: [f64; LEN],
}

impl Taylor {
    pub const ZERO: Taylor = Taylor { c: [0.0; LEN] };

    /// The constant series `x`.
    pub fn constant(x: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = x;
        Taylor { c }
    }

    /// The linear series `scale * w`.
    pub fn linear(scale: f64) -> Self {
        let mut c = [0.0; LEN];
        c[1] = scale;
        Taylor { c }
    }

    /// The quadratic series `scale * w^2`.
    pub fn quadratic(scale: f64) -> Self {
        let mut c = [0.0; LEN];
        c[2] = scale;
        Taylor { c }
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut c = self.c;
        for v in &mut c {
            *v *= s;
        }
        Taylor { c }
    }

    /// `-ln(1 - p)` for a series `p` with no constant term.
    pub fn neg_ln_one_minus(&self) -> Self {
        debug_assert_eq!(self.c[0], 0.0);
        let mut out = *self;
        let mut power = *self;
        for j in 2..=ORDER {
            power = power * *self;
            out = out + power.scaled(1.0 / j as f64);
        }
        out
    }

    /// `exp(g) - 1` for a series `g` with no constant term.
    pub fn exp_minus_one(&self) -> Self {
        debug_assert_eq!(self.c[0], 0.0);
        let mut out = *self;
        let mut power = *self;
        for j in 2..=ORDER {
            power = power * *self;
            out = out + power.scaled(1.0 / FACTORIAL[j]);
        }
        out
    }

    /// Square root; the constant term must be positive.
    pub fn sqrt(&self) -> Self {
        assert!(self.c[0] > 0.0, "sqrt needs a positive constant term");
        let mut c = [0.0; LEN];
        c[0] = self.c[0].sqrt();
        for k in 1..LEN {
            let mut s = self.c[k];
            for j in 1..k {
                s -= c[j] * c[k - j];
            }
            c[k] = s / (2.0 * c[0]);
        }
        Taylor { c }
    }

    /// `exp(self)`, any constant term.
    pub fn exp(&self) -> Self {
        let mut c = [0.0; LEN];
        c[0] = self.c[0].exp();
        for k in 1..LEN {
            let mut s = 0.0;
            for j in 1..=k {
                s += j as f64 * self.c[j] * c[k - j];
            }
            c[k] = s / k as f64;
        }
        Taylor { c }
    }

    /// `ln(self)`; the constant term must be positive.
    pub fn ln(&self) -> Self {
        assert!(self.c[0] > 0.0, "ln needs a positive constant term");
        let mut c = [0.0; LEN];
        c[0] = self.c[0].ln();
        for k in 1..LEN {
            let mut s = k as f64 * self.c[k];
            for j in 1..k {
                s -= j as f64 * c[j] * self.c[k - j];
            }
            c[k] = s / (k as f64 * self.c[0]);
        }
        Taylor { c }
    }

    /// Cumulant of order `n` when the series is a log-MGF in `w`.
    pub fn cumulant(&self, n: usize) -> f64 {
        FACTORIAL[n] * self.c[n]
    }
}

impl Add for Taylor {
    type Output = Taylor;
    fn add(self, rhs: Taylor) -> Taylor {
        let mut c = self.c;
        for (v, r) in c.iter_mut().zip(rhs.c) {
            *v += r;
        }
        Taylor { c }
    }
}

impl Sub for Taylor {
    type Output = Taylor;
    fn sub(self, rhs: Taylor) -> Taylor {
        let mut c = self.c;
        for (v, r) in c.iter_mut().zip(rhs.c) {
            *v -= r;
        }
        Taylor { c }
    }
}

impl Mul for Taylor {
    type Output = Taylor;
    fn mul(self, rhs: Taylor) -> Taylor {
        let mut c = [0.0; LEN];
        for i in 0..LEN {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..LEN - i {
                c[i + j] += self.c[i] * rhs.c[j];
            }
        }
        Taylor { c }
    }
}

impl Div for Taylor {
    type Output = Taylor;
    fn div(self, rhs: Taylor) -> Taylor {
        assert!(rhs.c[0] != 0.0, "divisor needs a nonzero constant term");
        let mut c = [0.0; LEN];
        for k in 0..LEN {
            let mut s = self.c[k];
            for j in 0..k {
                s -= c[j] * rhs.c[k - j];
            }
            c[k] = s / rhs.c[0];
        }
        Taylor { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn products_truncate_cleanly() {
        // (1 + w)^2 = 1 + 2w + w^2
        let p = Taylor::constant(1.0) + Taylor::linear(1.0);
        let sq = p * p;
        assert_eq!(sq.c[0], 1.0);
        assert_eq!(sq.c[1], 2.0);
        assert_eq!(sq.c[2], 1.0);
        assert_eq!(sq.c[3], 0.0);
    }

    #[test]
    fn log_series_coefficients() {
        // -ln(1 - w) = sum w^j / j
        let s = Taylor::linear(1.0).neg_ln_one_minus();
        for j in 1..=ORDER {
            assert_relative_eq!(s.c[j], 1.0 / j as f64, max_relative = 1e-15);
        }
    }

    #[test]
    fn exp_series_coefficients() {
        // exp(w) - 1 = sum w^j / j!
        let s = Taylor::linear(1.0).exp_minus_one();
        for j in 1..=ORDER {
            assert_relative_eq!(s.c[j], 1.0 / FACTORIAL[j], max_relative = 1e-15);
        }
    }

    #[test]
    fn exp_inverts_log() {
        // exp(-ln(1 - p)) - 1 = p / (1 - p) = p + p^2 + ...
        let p = Taylor::linear(0.3) + Taylor::quadratic(-0.1);
        let roundtrip = p.neg_ln_one_minus().exp_minus_one();
        let mut geometric = p;
        let mut power = p;
        for _ in 2..=ORDER {
            power = power * p;
            geometric = geometric + power;
        }
        for j in 0..=ORDER {
            assert_relative_eq!(roundtrip.c[j], geometric.c[j], epsilon = 1e-14);
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let p = Taylor::constant(0.7) + Taylor::linear(-1.3) + Taylor::quadratic(0.4);
        let q = Taylor::constant(2.0) + Taylor::linear(0.5) + Taylor::quadratic(-0.9);
        let back = (p * q) / q;
        for j in 0..=ORDER {
            assert_relative_eq!(back.c[j], p.c[j], epsilon = 1e-13);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let p = Taylor::constant(4.0) + Taylor::linear(1.1) + Taylor::quadratic(-0.6);
        let r = p.sqrt();
        assert_eq!(r.c[0], 2.0);
        let sq = r * r;
        for j in 0..=ORDER {
            assert_relative_eq!(sq.c[j], p.c[j], epsilon = 1e-13);
        }
    }

    #[test]
    fn exp_and_ln_are_inverse_with_constant_terms() {
        let p = Taylor::constant(0.8) + Taylor::linear(-0.4) + Taylor::quadratic(0.15);
        let roundtrip = p.exp().ln();
        for j in 0..=ORDER {
            assert_relative_eq!(roundtrip.c[j], p.c[j], epsilon = 1e-13);
        }
        // exp(w) has coefficients 1/j!
        let e = Taylor::linear(1.0).exp();
        for j in 0..=ORDER {
            assert_relative_eq!(e.c[j], 1.0 / FACTORIAL[j], max_relative = 1e-15);
        }
    }

    #[test]
    fn gamma_time_changed_log_mgf_cumulants() {
        // log MGF (T/nu) * (-ln(1 - theta nu w - sigma^2 nu w^2 / 2)) for
        // sigma=0.12, theta=-0.14, nu=0.2, T=1; reference cumulants from a
        // 50-digit computation.
        let (sigma, theta, nu, t) = (0.12, -0.14, 0.2, 1.0);
        let p = Taylor::linear(theta * nu) + Taylor::quadratic(sigma * sigma * nu / 2.0);
        let log_mgf = p.neg_ln_one_minus().scaled(t / nu);
        assert_relative_eq!(log_mgf.cumulant(2), 0.01832, max_relative = 1e-14);
        assert_relative_eq!(log_mgf.cumulant(4), 0.00027833088, max_relative = 1e-14);
        assert_relative_eq!(log_mgf.cumulant(6), 1.58374846464e-5, max_relative = 1e-13);
        assert_relative_eq!(log_mgf.cumulant(8), 1.95239543054e-6, max_relative = 1e-12);
    }
}
