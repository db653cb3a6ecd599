//! Market models for the log price of an asset.
//!
//! Every model exposes the characteristic function of `log S_T` under the
//! risk-neutral measure, built from its moment generating function on the
//! complex plane so damped transforms can evaluate it off the real axis.
//! Where the cumulants of `log S_T` have closed forms they are provided
//! exactly; the Heston model only has them through order two, and reports
//! that higher orders need a numeric fallback.

use crate::series::Taylor;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Deterministic market data shared by all models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarketContext {
    /// Spot price of the underlying, positive.
    pub s0: f64,
    /// Continuously compounded risk-free rate.
    pub r: f64,
    /// Time to maturity in years, positive.
    pub t: f64,
}

impl MarketContext {
    pub fn new(s0: f64, r: f64, t: f64) -> Result<Self, ModelError> {
        if !(s0 > 0.0 && s0.is_finite()) {
            return Err(ModelError::new("s0", "must be positive and finite"));
        }
        if !r.is_finite() {
            return Err(ModelError::new("r", "must be finite"));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(ModelError::new("t", "must be positive and finite"));
        }
        Ok(Self { s0, r, t })
    }
}

/// A model parameter rejected at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelError {
    /// Offending parameter.
    pub name: &'static str,
    /// Constraint it violates.
    pub requirement: &'static str,
}

impl ModelError {
    fn new(name: &'static str, requirement: &'static str) -> Self {
        Self { name, requirement }
    }
}

impl core::fmt::Display for ModelError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "parameter `{}` {}", self.name, self.requirement)
    }
}

impl core::error::Error for ModelError {}

/// Cumulants that cannot be produced in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CumulantError {
    /// The model has no closed form at this order; estimate the moment
    /// numerically instead.
    NumericFallbackRequired { model: &'static str, order: u32 },
    /// Orders above eight (or order zero) are never available.
    UnsupportedOrder { order: u32 },
}

impl core::fmt::Display for CumulantError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::NumericFallbackRequired { model, order } => write!(
                f,
                "{model} cumulants of order {order} have no closed form; use a numeric estimator"
            ),
            Self::UnsupportedOrder { order } => {
                write!(f, "cumulant order {order} is outside the supported range 1..=8")
            }
        }
    }
}

impl core::error::Error for CumulantError {}

/// Risk-neutral dynamics of the log price.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModelSpec {
    /// Geometric Brownian motion with volatility `sigma`.
    BlackScholes { sigma: f64 },
    /// Log price Laplace-distributed around the martingale-corrected mean
    /// with scale `sigma / sqrt(2)`; needs `sigma < sqrt(2)` for the price
    /// to have finite expectation.
    Laplace { sigma: f64 },
    /// Square-root stochastic variance: mean reversion speed `kappa`,
    /// long-run variance `eta`, vol-of-vol `theta`, initial variance `v0`,
    /// spot-variance correlation `rho`.
    Heston { kappa: f64, eta: f64, theta: f64, v0: f64, rho: f64 },
    /// Brownian motion with drift `theta` and volatility `sigma`, run on a
    /// gamma clock with variance rate `nu`.
    VarianceGamma { sigma: f64, theta: f64, nu: f64 },
    /// Tempered-stable jump model: overall level `c`, left and right
    /// tempering rates `g` and `m`, activity index `y`.
    Cgmy { c: f64, g: f64, m: f64, y: f64 },
    /// Lognormal jump diffusion: diffusion volatility `sigma`, jump
    /// intensity `intensity` per year, mean relative jump `mean_jump`
    /// (greater than -1), lognormal jump width `jump_vol`.
    MertonJump { sigma: f64, intensity: f64, mean_jump: f64, jump_vol: f64 },
}

impl ModelSpec {
    pub fn black_scholes(sigma: f64) -> Result<Self, ModelError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ModelError::new("sigma", "must be positive and finite"));
        }
        Ok(Self::BlackScholes { sigma })
    }

    pub fn laplace(sigma: f64) -> Result<Self, ModelError> {
        if !(sigma > 0.0) {
            return Err(ModelError::new("sigma", "must be positive"));
        }
        if !(sigma < core::f64::consts::SQRT_2) {
            return Err(ModelError::new("sigma", "must be below sqrt(2) for E[S_T] to exist"));
        }
        Ok(Self::Laplace { sigma })
    }

    pub fn heston(kappa: f64, eta: f64, theta: f64, v0: f64, rho: f64) -> Result<Self, ModelError> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(ModelError::new("kappa", "must be positive and finite"));
        }
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(ModelError::new("eta", "must be positive and finite"));
        }
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(ModelError::new("theta", "must be positive and finite"));
        }
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(ModelError::new("v0", "must be positive and finite"));
        }
        if !(rho > -1.0 && rho < 1.0) {
            return Err(ModelError::new("rho", "must lie strictly inside (-1, 1)"));
        }
        Ok(Self::Heston { kappa, eta, theta, v0, rho })
    }

    pub fn variance_gamma(sigma: f64, theta: f64, nu: f64) -> Result<Self, ModelError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ModelError::new("sigma", "must be positive and finite"));
        }
        if !theta.is_finite() {
            return Err(ModelError::new("theta", "must be finite"));
        }
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(ModelError::new("nu", "must be positive and finite"));
        }
        if 1.0 - theta * nu - sigma * sigma * nu / 2.0 <= 0.0 {
            return Err(ModelError::new(
                "nu",
                "must satisfy 1 - theta*nu - sigma^2*nu/2 > 0 for E[S_T] to exist",
            ));
        }
        Ok(Self::VarianceGamma { sigma, theta, nu })
    }

    pub fn cgmy(c: f64, g: f64, m: f64, y: f64) -> Result<Self, ModelError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(ModelError::new("c", "must be positive and finite"));
        }
        if !(g > 0.0 && g.is_finite()) {
            return Err(ModelError::new("g", "must be positive and finite"));
        }
        if !(m > 1.0 && m.is_finite()) {
            return Err(ModelError::new("m", "must exceed 1 for E[S_T] to exist"));
        }
        if !(y > 0.0 && y < 2.0) {
            return Err(ModelError::new("y", "must lie in (0, 2)"));
        }
        if y == 1.0 {
            return Err(ModelError::new("y", "must differ from 1 (gamma-function pole)"));
        }
        Ok(Self::Cgmy { c, g, m, y })
    }

    pub fn merton_jump(
        sigma: f64,
        intensity: f64,
        mean_jump: f64,
        jump_vol: f64,
    ) -> Result<Self, ModelError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ModelError::new("sigma", "must be positive and finite"));
        }
        if !(intensity >= 0.0 && intensity.is_finite()) {
            return Err(ModelError::new("intensity", "must be non-negative and finite"));
        }
        if !(mean_jump > -1.0 && mean_jump.is_finite()) {
            return Err(ModelError::new("mean_jump", "must exceed -1"));
        }
        if !(jump_vol >= 0.0 && jump_vol.is_finite()) {
            return Err(ModelError::new("jump_vol", "must be non-negative and finite"));
        }
        Ok(Self::MertonJump { sigma, intensity, mean_jump, jump_vol })
    }

    /// Short model name for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Self::BlackScholes { .. } => "black-scholes",
            Self::Laplace { .. } => "laplace",
            Self::Heston { .. } => "heston",
            Self::VarianceGamma { .. } => "variance-gamma",
            Self::Cgmy { .. } => "cgmy",
            Self::MertonJump { .. } => "merton-jump",
        }
    }

    /// Log moment generating function of `log S_T` evaluated at complex
    /// `w`, so that the characteristic function is `exp(log_mgf(i u))`.
    fn log_mgf(&self, ctx: &MarketContext, w: Complex64) -> Complex64 {
        let t = ctx.t;
        let base = ctx.s0.ln() + ctx.r * t;
        match *self {
            Self::BlackScholes { sigma } => {
                let var = sigma * sigma * t;
                w * (base - var / 2.0) + w * w * (var / 2.0)
            }
            Self::Laplace { sigma } => {
                let b2 = sigma * sigma / 2.0;
                let mean = base + (1.0 - b2).ln();
                w * mean - (1.0 - b2 * w * w).ln()
            }
            Self::Heston { kappa, eta, theta, v0, rho } => {
                let beta = kappa - rho * theta * w;
                let d = (beta * beta - theta * theta * (w * w - w)).sqrt();
                let g = (beta - d) / (beta + d);
                let e = (-d * t).exp();
                w * base
                    + (v0 / (theta * theta)) * (beta - d) * (1.0 - e) / (1.0 - g * e)
                    + (kappa * eta / (theta * theta))
                        * ((beta - d) * t - 2.0 * ((1.0 - g * e) / (1.0 - g)).ln())
            }
            Self::VarianceGamma { sigma, theta, nu } => {
                let omega = (1.0 - theta * nu - sigma * sigma * nu / 2.0).ln() / nu;
                let mean = base + omega * t;
                w * mean - (1.0 - theta * nu * w - sigma * sigma * nu / 2.0 * w * w).ln() * (t / nu)
            }
            Self::Cgmy { c, g, m, y } => {
                let gam = crate::special::gamma(-y);
                let omega =
                    -c * gam * ((m - 1.0).powf(y) - m.powf(y) + (g + 1.0).powf(y) - g.powf(y));
                let mean = base + omega * t;
                let jumps = (Complex64::from(m) - w).powf(y) - m.powf(y)
                    + (Complex64::from(g) + w).powf(y)
                    - g.powf(y);
                w * mean + jumps * (t * c * gam)
            }
            Self::MertonJump { sigma, intensity, mean_jump, jump_vol } => {
                let mu_j = (1.0 + mean_jump).ln() - jump_vol * jump_vol / 2.0;
                let mean = base + (-sigma * sigma / 2.0 - intensity * mean_jump) * t;
                w * mean
                    + w * w * (sigma * sigma * t / 2.0)
                    + ((w * mu_j + w * w * (jump_vol * jump_vol / 2.0)).exp() - 1.0)
                        * (intensity * t)
            }
        }
    }

    /// Characteristic function `E[exp(i u log S_T)]` for real `u`.
    pub fn char_fn(&self, ctx: &MarketContext, u: f64) -> Complex64 {
        self.log_mgf(ctx, Complex64::new(0.0, u)).exp()
    }

    /// Characteristic function continued to complex arguments; needed by
    /// damped transforms that integrate along a shifted contour.
    pub fn char_fn_complex(&self, ctx: &MarketContext, u: Complex64) -> Complex64 {
        self.log_mgf(ctx, u * Complex64::i()).exp()
    }

    /// Characteristic function of `log S_T - E[log S_T]`.
    pub fn centered_char_fn(&self, ctx: &MarketContext, u: f64) -> Complex64 {
        let mean = self.mean_log_price(ctx);
        (self.log_mgf(ctx, Complex64::new(0.0, u)) - Complex64::new(0.0, u * mean)).exp()
    }

    /// `E[log S_T]` in closed form.
    pub fn mean_log_price(&self, ctx: &MarketContext) -> f64 {
        let t = ctx.t;
        let base = ctx.s0.ln() + ctx.r * t;
        match *self {
            Self::BlackScholes { sigma } => base - sigma * sigma * t / 2.0,
            Self::Laplace { sigma } => base + (1.0 - sigma * sigma / 2.0).ln(),
            Self::Heston { kappa, eta, v0, .. } => {
                let decay = (-kappa * t).exp();
                // E[log S_T] = base - E[integrated variance] / 2
                base - (eta * t + (v0 - eta) * (1.0 - decay) / kappa) / 2.0
            }
            Self::VarianceGamma { sigma, theta, nu } => {
                base + (1.0 - theta * nu - sigma * sigma * nu / 2.0).ln() / nu * t + theta * t
            }
            Self::Cgmy { c, g, m, y } => {
                let gam = crate::special::gamma(-y);
                let omega =
                    -c * gam * ((m - 1.0).powf(y) - m.powf(y) + (g + 1.0).powf(y) - g.powf(y));
                base + omega * t + t * c * gam * y * (g.powf(y - 1.0) - m.powf(y - 1.0))
            }
            Self::MertonJump { sigma, intensity, mean_jump, jump_vol } => {
                let mu_j = (1.0 + mean_jump).ln() - jump_vol * jump_vol / 2.0;
                base + (-sigma * sigma / 2.0 - intensity * mean_jump + intensity * mu_j) * t
            }
        }
    }

    /// Cumulants `kappa_1..kappa_max_order` of `log S_T`.
    ///
    /// Closed forms exist for every model except Heston, which is exact
    /// through order two and asks the caller to fall back to a numeric
    /// moment estimator above that.
    pub fn cumulants(&self, ctx: &MarketContext, max_order: u32) -> Result<Vec<f64>, CumulantError> {
        if max_order == 0 || max_order > 8 {
            return Err(CumulantError::UnsupportedOrder { order: max_order });
        }
        let t = ctx.t;
        let n = max_order as usize;
        let mut ks = Vec::with_capacity(n);
        match *self {
            Self::BlackScholes { sigma } => {
                ks.push(self.mean_log_price(ctx));
                if n >= 2 {
                    ks.push(sigma * sigma * t);
                }
                ks.resize(n, 0.0);
            }
            Self::Laplace { sigma } => {
                // Even cumulants of a Laplace(b) variable: 2 (k-1)! b^k.
                let b = sigma / core::f64::consts::SQRT_2;
                ks.push(self.mean_log_price(ctx));
                let mut fact = 1.0; // (k-1)! running value
                let mut bk = b;
                for k in 2..=n {
                    fact *= (k - 1) as f64;
                    bk *= b;
                    ks.push(if k % 2 == 0 { 2.0 * fact * bk } else { 0.0 });
                }
            }
            Self::Heston { kappa, eta, theta, v0, rho } => {
                if n > 2 {
                    return Err(CumulantError::NumericFallbackRequired {
                        model: "heston",
                        order: max_order,
                    });
                }
                ks.push(self.mean_log_price(ctx));
                if n == 2 {
                    // Var(log S_T) = Var(I)/4 + E[I] - Cov(I, integral of
                    // sqrt(v) dW), with I the integrated variance.
                    let e1 = (-kappa * t).exp();
                    let mean_i = eta * t + (v0 - eta) * (1.0 - e1) / kappa;
                    let cov = theta * rho / kappa
                        * (eta * t - eta * (1.0 - e1) / kappa
                            + (v0 - eta) * (1.0 - e1 * (1.0 + kappa * t)) / kappa);
                    let var_i = 2.0 * theta * theta / kappa
                        * (eta / 2.0 * (t - (1.0 - e1) / kappa) / kappa
                            + (v0 - eta) * (1.0 - e1 * (1.0 + kappa * t)) / (kappa * kappa)
                            + (eta / 2.0 - v0)
                                * ((1.0 - e1) / kappa
                                    - (1.0 - (-2.0 * kappa * t).exp()) / (2.0 * kappa))
                                / kappa);
                    ks.push(var_i / 4.0 + mean_i - cov);
                }
            }
            Self::VarianceGamma { sigma, theta, nu } => {
                let p = Taylor::linear(theta * nu) + Taylor::quadratic(sigma * sigma * nu / 2.0);
                let tail = p.neg_ln_one_minus().scaled(t / nu);
                ks.push(self.mean_log_price(ctx));
                for k in 2..=n {
                    ks.push(tail.cumulant(k));
                }
            }
            Self::Cgmy { c, g, m, y } => {
                let gam = crate::special::gamma(-y);
                ks.push(self.mean_log_price(ctx));
                for k in 2..=n {
                    let mut falling = 1.0;
                    for i in 0..k {
                        falling *= y - i as f64;
                    }
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    ks.push(
                        t * c
                            * gam
                            * falling
                            * (sign * m.powf(y - k as f64) + g.powf(y - k as f64)),
                    );
                }
            }
            Self::MertonJump { sigma, intensity, mean_jump, jump_vol } => {
                let mu_j = (1.0 + mean_jump).ln() - jump_vol * jump_vol / 2.0;
                let jump_exponent =
                    Taylor::linear(mu_j) + Taylor::quadratic(jump_vol * jump_vol / 2.0);
                let log_mgf = Taylor::linear(self.mean_log_price(ctx) - intensity * mu_j * t)
                    + Taylor::quadratic(sigma * sigma * t / 2.0)
                    + jump_exponent.exp_minus_one().scaled(intensity * t);
                for k in 1..=n {
                    ks.push(log_mgf.cumulant(k));
                }
            }
        }
        Ok(ks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn m1() -> (ModelSpec, MarketContext) {
        (
            ModelSpec::merton_jump(0.1, 0.001, -0.5, 0.2).unwrap(),
            MarketContext::new(100.0, 0.0, 0.1).unwrap(),
        )
    }

    fn m2() -> (ModelSpec, MarketContext) {
        let mean_jump = (-6.98f64).exp() - 1.0;
        (
            ModelSpec::merton_jump(0.1, 1e-5, mean_jump, 0.2).unwrap(),
            MarketContext::new(100.0, 0.0, 0.01).unwrap(),
        )
    }

    fn m3() -> (ModelSpec, MarketContext) {
        (
            ModelSpec::cgmy(0.005, 1.5, 1.5, 1.5).unwrap(),
            MarketContext::new(100.0, 0.0, 0.1).unwrap(),
        )
    }

    fn m4() -> (ModelSpec, MarketContext) {
        (
            ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -0.75).unwrap(),
            MarketContext::new(100.0, 0.0, 0.5).unwrap(),
        )
    }

    fn all_models() -> [(ModelSpec, MarketContext); 6] {
        let ctx = MarketContext::new(100.0, 0.03, 1.0).unwrap();
        [
            (ModelSpec::black_scholes(0.2).unwrap(), ctx),
            (ModelSpec::laplace(0.2).unwrap(), ctx),
            (ModelSpec::heston(1.5768, 0.0398, 0.5751, 0.0175, -0.5711).unwrap(), ctx),
            (ModelSpec::variance_gamma(0.12, -0.14, 0.2).unwrap(), ctx),
            (ModelSpec::cgmy(1.0, 5.0, 5.0, 0.5).unwrap(), ctx),
            (ModelSpec::merton_jump(0.15, 0.5, -0.1, 0.25).unwrap(), ctx),
        ]
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(ModelSpec::black_scholes(0.0).is_err());
        assert!(ModelSpec::black_scholes(-0.1).is_err());
        assert!(ModelSpec::laplace(core::f64::consts::SQRT_2).is_err());
        assert!(ModelSpec::heston(1.0, 0.05, 2.0, 0.01, -1.0).is_err());
        assert!(ModelSpec::heston(0.0, 0.05, 2.0, 0.01, 0.0).is_err());
        assert!(ModelSpec::variance_gamma(0.12, -0.14, -0.2).is_err());
        // MGF of the gamma clock must converge at w = 1
        assert!(ModelSpec::variance_gamma(2.0, 0.0, 1.0).is_err());
        assert!(ModelSpec::cgmy(0.005, 1.5, 0.9, 1.5).is_err());
        assert!(ModelSpec::cgmy(0.005, 1.5, 1.5, 1.0).is_err());
        assert!(ModelSpec::cgmy(0.005, 1.5, 1.5, 2.0).is_err());
        assert!(ModelSpec::merton_jump(0.1, -0.5, -0.5, 0.2).is_err());
        assert!(ModelSpec::merton_jump(0.1, 0.5, -1.0, 0.2).is_err());
        assert!(MarketContext::new(0.0, 0.0, 1.0).is_err());
        assert!(MarketContext::new(100.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn char_fn_is_one_at_zero() {
        for (model, ctx) in all_models() {
            let phi = model.char_fn(&ctx, 0.0);
            assert_eq!(phi.re, 1.0, "{}", model.name());
            assert_eq!(phi.im, 0.0, "{}", model.name());
        }
    }

    #[test]
    fn char_fn_is_a_martingale_at_minus_i() {
        // E[S_T] = s0 e^{rT}: evaluate the MGF at w = 1.
        for (model, ctx) in all_models() {
            let expected = ctx.s0.ln() + ctx.r * ctx.t;
            let got = model.log_mgf(&ctx, Complex64::new(1.0, 0.0));
            assert_relative_eq!(got.re, expected, max_relative = 1e-12);
            assert!(got.im.abs() < 1e-12, "{}", model.name());
        }
    }

    #[test]
    fn black_scholes_char_fn_matches_closed_form() {
        let ctx = MarketContext::new(100.0, 0.05, 2.0).unwrap();
        let model = ModelSpec::black_scholes(0.3).unwrap();
        for u in [0.1, 1.0, 7.5] {
            let mean = ctx.s0.ln() + (0.05 - 0.045) * 2.0;
            let var = 0.09 * 2.0;
            let want = Complex64::new(0.0, u * mean).exp() * (-var * u * u / 2.0).exp();
            let got = model.char_fn(&ctx, u);
            assert_relative_eq!(got.re, want.re, max_relative = 1e-13);
            assert_relative_eq!(got.im, want.im, max_relative = 1e-13);
        }
    }

    #[test]
    fn laplace_char_fn_matches_closed_form() {
        let ctx = MarketContext::new(100.0, 0.0, 1.0).unwrap();
        let model = ModelSpec::laplace(0.2).unwrap();
        let mean = model.mean_log_price(&ctx);
        assert_relative_eq!(mean, 4.58496747867057192, max_relative = 1e-15);
        for u in [0.5, 2.0, 11.0] {
            let want = Complex64::new(0.0, u * mean).exp() / (1.0 + 0.02 * u * u);
            let got = model.char_fn(&ctx, u);
            assert_relative_eq!(got.re, want.re, max_relative = 1e-13);
            assert_relative_eq!(got.im, want.im, max_relative = 1e-13);
        }
    }

    #[test]
    fn centered_char_fn_has_zero_phase_slope() {
        // d/du arg phi_centered at 0 is the residual mean; estimate it with
        // a central difference and make sure it vanishes.
        for (model, ctx) in all_models() {
            let h = 1e-4;
            let slope = (model.centered_char_fn(&ctx, h).arg()
                - model.centered_char_fn(&ctx, -h).arg())
                / (2.0 * h);
            assert!(slope.abs() < 1e-9, "{}: residual mean {slope}", model.name());
        }
    }

    #[test]
    fn merton_cumulants_match_references() {
        let (model, ctx) = m1();
        let ks = model.cumulants(&ctx, 8).unwrap();
        let want = [
            4.60464887127003537,
            0.00105485789011405992,
            -4.48269271107886937e-5,
            3.85511434959123229e-5,
            -3.46649476291979376e-5,
            3.24314383652031342e-5,
            -3.14479762626557621e-5,
            3.15078383482859204e-5,
        ];
        for (k, w) in ks.iter().zip(want) {
            assert_relative_eq!(*k, w, max_relative = 1e-13);
        }

        let (model, ctx) = m2();
        let ks = model.cumulants(&ctx, 8).unwrap();
        assert_relative_eq!(ks[0], 4.60511958589506105, max_relative = 1e-13);
        assert_relative_eq!(ks[1], 0.000104904, max_relative = 1e-13);
        assert_relative_eq!(ks[3], 0.00024127648, max_relative = 1e-12);
        assert_relative_eq!(ks[5], 0.011909312896, max_relative = 1e-12);
        assert_relative_eq!(ks[7], 0.58973759333888, max_relative = 1e-12);
    }

    #[test]
    fn cgmy_cumulants_match_references() {
        let (model, ctx) = m3();
        let ks = model.cumulants(&ctx, 8).unwrap();
        assert_relative_eq!(ks[1], 0.00144720250911653532, max_relative = 1e-13);
        assert_relative_eq!(ks[3], 0.00048240083637217844, max_relative = 1e-13);
        assert_relative_eq!(ks[5], 0.00187600325255847171, max_relative = 1e-13);
        assert_relative_eq!(ks[7], 0.0206360357781431888, max_relative = 1e-13);
    }

    #[test]
    fn variance_gamma_cumulants_match_references() {
        let ctx = MarketContext::new(100.0, 0.1, 1.0).unwrap();
        let model = ModelSpec::variance_gamma(0.12, -0.14, 0.2).unwrap();
        let ks = model.cumulants(&ctx, 8).unwrap();
        assert_relative_eq!(ks[1], 0.01832, max_relative = 1e-13);
        assert_relative_eq!(ks[3], 0.00027833088, max_relative = 1e-13);
        assert_relative_eq!(ks[5], 1.58374846464e-5, max_relative = 1e-12);
        assert_relative_eq!(ks[7], 1.95239543054e-6, max_relative = 1e-11);
    }

    #[test]
    fn laplace_cumulants_match_references() {
        let ctx = MarketContext::new(100.0, 0.0, 1.0).unwrap();
        let model = ModelSpec::laplace(0.2).unwrap();
        let ks = model.cumulants(&ctx, 8).unwrap();
        assert_relative_eq!(ks[1], 0.04, max_relative = 1e-15);
        assert_relative_eq!(ks[3], 0.0048, max_relative = 1e-15);
        assert_relative_eq!(ks[5], 0.00192, max_relative = 1e-15);
        assert_relative_eq!(ks[7], 0.0016128, max_relative = 1e-15);
        assert_eq!(ks[2], 0.0);
        assert_eq!(ks[4], 0.0);
    }

    #[test]
    fn heston_low_order_cumulants_match_references() {
        let (model, ctx) = m4();
        let ks = model.cumulants(&ctx, 2).unwrap();
        assert_relative_eq!(ks[0], 4.6005395727938387, max_relative = 1e-14);
        assert_relative_eq!(ks[1], 0.012271269218430166, max_relative = 1e-14);

        let model = ModelSpec::heston(1.5768, 0.0398, 0.5751, 0.0175, -0.5711).unwrap();
        let ctx1 = MarketContext::new(100.0, 0.0, 1.0).unwrap();
        let ks = model.cumulants(&ctx1, 2).unwrap();
        assert_relative_eq!(ks[0], 4.590880292972, max_relative = 1e-12);
        assert_relative_eq!(ks[1], 0.031571152012823, max_relative = 1e-12);
        let ctx10 = MarketContext::new(100.0, 0.0, 10.0).unwrap();
        let ks = model.cumulants(&ctx10, 2).unwrap();
        assert_relative_eq!(ks[0], 4.4132414685969, max_relative = 1e-12);
        assert_relative_eq!(ks[1], 0.47006200220126, max_relative = 1e-12);
    }

    #[test]
    fn heston_higher_cumulants_escalate() {
        let (model, ctx) = m4();
        assert_eq!(
            model.cumulants(&ctx, 4).unwrap_err(),
            CumulantError::NumericFallbackRequired { model: "heston", order: 4 }
        );
        assert!(matches!(
            model.cumulants(&ctx, 9),
            Err(CumulantError::UnsupportedOrder { order: 9 })
        ));
    }

    #[test]
    fn mean_log_price_matches_first_cumulant() {
        for (model, ctx) in all_models() {
            let k1 = model.cumulants(&ctx, 1).unwrap()[0];
            assert_relative_eq!(model.mean_log_price(&ctx), k1, max_relative = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn char_fn_is_bounded_and_conjugate_symmetric(u in 0.0f64..200.0) {
            for (model, ctx) in all_models() {
                let plus = model.char_fn(&ctx, u);
                let minus = model.char_fn(&ctx, -u);
                prop_assert!(plus.norm() <= 1.0 + 1e-12);
                prop_assert!((plus - minus.conj()).norm() < 1e-12);
            }
        }

        #[test]
        fn centering_preserves_modulus(u in -150.0f64..150.0) {
            for (model, ctx) in all_models() {
                let a = model.char_fn(&ctx, u).norm();
                let b = model.centered_char_fn(&ctx, u).norm();
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
            }
        }
    }
}
