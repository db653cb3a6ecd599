//! Reference pricers independent of the cosine expansion.
//!
//! Four ways to price the same contracts: the Black-Scholes closed form,
//! a piecewise-exponential closed form for the Laplace model, the Merton
//! jump-diffusion series, and the Carr-Madan damped Fourier integral.
//! The expansion engine is validated against these, never against itself.

use crate::cos::OptionKind;
use crate::models::{MarketContext, ModelSpec};
use crate::special::norm_cdf;
use crate::sum::Neumaier;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Damped-integral settings: damping factor, truncated Fourier domain
/// `[0, u_max]`, and the Simpson panel count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CarrMadanConfig {
    pub alpha: f64,
    pub u_max: f64,
    pub n_points: usize,
}

impl Default for CarrMadanConfig {
    fn default() -> Self {
        Self { alpha: 0.1, u_max: 1200.0, n_points: 1 << 17 }
    }
}

/// A reference pricer refused the request.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleError {
    /// The Laplace moment-generating function diverges at 1, so no
    /// martingale drift exists for this volatility.
    MgfDiverges { sigma: f64 },
    /// The damped transform still carries mass at the end of the Fourier
    /// domain, so the truncated integral cannot be trusted.
    IntegralNotDecayed { tail_ratio: f64 },
}

impl core::fmt::Display for OracleError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            Self::MgfDiverges { sigma } => {
                write!(f, "no martingale drift for Laplace volatility {sigma} >= sqrt(2)")
            }
            Self::IntegralNotDecayed { tail_ratio } => write!(
                f,
                "damped transform magnitude at the domain end is {tail_ratio:e} of its peak"
            ),
        }
    }
}

impl core::error::Error for OracleError {}

/// Textbook Black-Scholes price.
pub fn bs_price(s0: f64, strike: f64, r: f64, sigma: f64, t: f64, kind: OptionKind) -> f64 {
    assert!(s0 > 0.0 && strike > 0.0 && sigma > 0.0 && t > 0.0, "inputs must be positive");
    let vol = sigma * t.sqrt();
    let d1 = ((s0 / strike).ln() + (r + sigma * sigma / 2.0) * t) / vol;
    let d2 = d1 - vol;
    let disc = (-r * t).exp();
    match kind {
        OptionKind::Call => s0 * norm_cdf(d1) - strike * disc * norm_cdf(d2),
        OptionKind::Put => strike * disc * norm_cdf(-d2) - s0 * norm_cdf(-d1),
    }
}

/// Closed-form price when the centered log return is Laplace distributed
/// with variance `sigma^2`.
///
/// The drift `m = log(s0) + r t + log(1 - sigma^2/2)` makes the discounted
/// stock a martingale; it exists only for `sigma < sqrt(2)`. The payoff
/// integral against the two-sided exponential density splits at the mean
/// and solves in elementary terms on each side.
pub fn laplace_price(
    s0: f64,
    strike: f64,
    r: f64,
    sigma: f64,
    t: f64,
    kind: OptionKind,
) -> Result<f64, OracleError> {
    assert!(s0 > 0.0 && strike > 0.0 && sigma > 0.0 && t > 0.0, "inputs must be positive");
    if sigma * sigma >= 2.0 {
        return Err(OracleError::MgfDiverges { sigma });
    }
    let b = sigma / core::f64::consts::SQRT_2;
    let m = s0.ln() + r * t + (-sigma * sigma / 2.0).ln_1p();
    let d = strike.ln() - m;
    let disc = (-r * t).exp();
    let value = match kind {
        OptionKind::Put => {
            // Mass below min(d, 0), plus the stretch up to d when the
            // clipped strike sits above the mean.
            let y = d.min(0.0);
            let mut v = strike / 2.0 * (y / b).exp() - (m + y * (1.0 + 1.0 / b)).exp() / (2.0 * (1.0 + b));
            if d > 0.0 {
                v += strike / 2.0 * (1.0 - (-d / b).exp())
                    - m.exp() / 2.0 * ((d * (1.0 - 1.0 / b)).exp() - 1.0) / (b - 1.0);
            }
            v
        }
        OptionKind::Call => {
            let y = d.max(0.0);
            let mut v = (m + y * (1.0 - 1.0 / b)).exp() / (2.0 * (1.0 - b)) - strike / 2.0 * (-y / b).exp();
            if d < 0.0 {
                v += m.exp() * (1.0 - (d * (1.0 + 1.0 / b)).exp()) / (2.0 * (1.0 + b))
                    - strike / 2.0 * (1.0 - (d / b).exp());
            }
            v
        }
    };
    Ok(disc * value)
}

/// Merton jump-diffusion series: a Poisson-weighted sum of Black-Scholes
/// prices with per-term jump-adjusted rate and variance.
pub fn merton_price(
    s0: f64,
    strike: f64,
    r: f64,
    sigma: f64,
    eta: f64,
    kappa: f64,
    delta: f64,
    t: f64,
    kind: OptionKind,
    terms: usize,
) -> f64 {
    assert!(terms >= 1, "the series needs at least one term");
    assert!(kappa > -1.0, "mean percentage jump must keep prices positive");
    assert!(eta >= 0.0, "jump intensity cannot be negative");
    let lambda_t = eta * (1.0 + kappa) * t;
    let log_gross = kappa.ln_1p();
    let mut weight = (-lambda_t).exp();
    let mut sum = Neumaier::new();
    for j in 0..terms {
        if j > 0 {
            weight *= lambda_t / j as f64;
        }
        let rj = r - eta * kappa + j as f64 * log_gross / t;
        let sj = (sigma * sigma + j as f64 * delta * delta / t).sqrt();
        sum.add(weight * bs_price(s0, strike, rj, sj, t, kind));
    }
    sum.total()
}

/// Carr-Madan damped Fourier integral for a single-strike call.
///
/// The damped call transform is integrated over `[0, u_max]` with
/// composite Simpson; puts follow from parity at the call site. The
/// transform magnitude must have decayed at the domain end or the
/// truncation is unsound and the request fails.
pub fn carr_madan_price(
    model: &ModelSpec,
    ctx: &MarketContext,
    strike: f64,
    cfg: &CarrMadanConfig,
) -> Result<f64, OracleError> {
    assert!(cfg.alpha > 0.0, "damping factor must be positive");
    assert!(cfg.u_max > 0.0, "Fourier domain must be nonempty");
    assert!(cfg.n_points >= 2 && cfg.n_points % 2 == 0, "Simpson needs an even panel count");
    let log_strike = strike.ln();
    let disc = (-ctx.r * ctx.t).exp();
    let h = cfg.u_max / cfg.n_points as f64;
    let mut acc = Neumaier::new();
    let mut peak = 0.0f64;
    let mut tail = 0.0f64;
    for i in 0..=cfg.n_points {
        let u = i as f64 * h;
        let phi = model.char_fn_complex(ctx, Complex64::new(u, -(cfg.alpha + 1.0)));
        let den = Complex64::new(
            cfg.alpha * cfg.alpha + cfg.alpha - u * u,
            (2.0 * cfg.alpha + 1.0) * u,
        );
        let damped = disc * phi / den;
        let mag = damped.norm();
        peak = peak.max(mag);
        if i == cfg.n_points {
            tail = mag;
        }
        let edge = i == 0 || i == cfg.n_points;
        let w = if edge { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        // Re{e^(-iu log K) damped}
        let (s, c) = (u * log_strike).sin_cos();
        acc.add(w * (damped.re * c + damped.im * s));
    }
    let tail_ratio = tail / peak;
    if tail_ratio > 1e-12 {
        return Err(OracleError::IntegralNotDecayed { tail_ratio });
    }
    Ok((-cfg.alpha * log_strike).exp() / core::f64::consts::PI * acc.total() * h / 3.0)
}
