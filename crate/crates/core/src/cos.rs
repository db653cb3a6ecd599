//! The cosine-expansion pricer.
//!
//! Density coefficients on a window `[-l, l]`, put payoff coefficients on
//! `[-m, m]`, price assembly with compensated summation, density
//! reconstruction, and a doubling rule for the number of expansion terms.
//! Calls are always settled through put-call parity because the error
//! guarantee attached to a truncation window needs a bounded payoff.

use crate::models::{MarketContext, ModelSpec};
use crate::sum::Neumaier;
use crate::truncation::TruncationRange;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Cosine coefficients `c_0..c_n` of a centered density on `[-l, l]`.
#[derive(Clone, Debug)]
pub struct CosExpansion {
    /// Window half-width.
    pub l: f64,
    /// Highest retained mode index.
    pub n: usize,
    /// Coefficients; `c[0]` equals `1/l` because the density has mass one.
    pub c: Vec<f64>,
}

/// Put payoff projected on the same cosine basis, `v_0..v_n`.
#[derive(Clone, Debug)]
pub struct PayoffCoefficients {
    /// Payoff window half-width.
    pub m: f64,
    /// Expansion window half-width, at least `m`.
    pub l: f64,
    /// Highest retained mode index.
    pub n: usize,
    /// Coefficients of the clipped put payoff.
    pub v: Vec<f64>,
    /// Upper integration limit `min(log(strike) - mean_log, m)`.
    pub d: f64,
    /// Strike in currency units.
    pub strike: f64,
    /// Mean of the log price the window is centered on.
    pub mean_log: f64,
}

/// Which side of the payoff a request prices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptionKind {
    Put,
    Call,
}

/// A priced request together with the window and term count that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriceResult {
    /// Discounted price in currency units.
    pub price: f64,
    /// Number of the highest expansion mode used.
    pub n_used: usize,
    /// Window the expansion ran on.
    pub range: TruncationRange,
    /// Whether a doubling run stabilized; direct pricing sets it.
    pub converged: bool,
}

/// Reconstruction or convergence failure of the expansion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CosError {
    /// A density query outside the expansion window.
    OutOfRange { x: f64, l: f64 },
    /// Doubling hit the term cap with successive prices still apart.
    NoConvergence { last_delta: f64, epsilon: f64 },
}

impl core::fmt::Display for CosError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match *self {
            Self::OutOfRange { x, l } => {
                write!(f, "x = {x} lies outside the expansion window [-{l}, {l}]")
            }
            Self::NoConvergence { last_delta, epsilon } => write!(
                f,
                "successive prices still {last_delta:e} apart at the term cap (budget {epsilon:e})"
            ),
        }
    }
}

impl core::error::Error for CosError {}

/// Highest term count the doubling rule will try.
pub const N_CAP: usize = 1 << 21;

/// Cosine coefficients of the density behind a centered characteristic
/// function: `c_k = (1/l) Re{phi(k pi / (2l)) i^k}`.
pub fn cos_coefficients<F: Fn(f64) -> Complex64>(phi: F, l: f64, n: usize) -> CosExpansion {
    assert!(l > 0.0, "window half-width must be positive");
    assert!(n >= 1, "the expansion needs at least modes 0 and 1");
    let freq = core::f64::consts::PI / (2.0 * l);
    let mut c = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let z = phi(k as f64 * freq);
        // Re{z i^k} cycles through the components of z with period four.
        let re = match k % 4 {
            0 => z.re,
            1 => -z.im,
            2 => -z.re,
            _ => z.im,
        };
        c.push(re / l);
    }
    debug_assert!((c[0] * l - 1.0).abs() <= 1e-12, "a characteristic function is 1 at zero");
    CosExpansion { l, n, c }
}

impl CosExpansion {
    /// Density reconstruction at `x`, the half-weighted cosine series.
    pub fn density_at(&self, x: f64) -> Result<f64, CosError> {
        if x.abs() > self.l {
            return Err(CosError::OutOfRange { x, l: self.l });
        }
        let step = core::f64::consts::PI * (x + self.l) / (2.0 * self.l);
        let mut sum = Neumaier::new();
        sum.add(0.5 * self.c[0]);
        for k in 1..=self.n {
            sum.add(self.c[k] * (k as f64 * step).cos());
        }
        Ok(sum.total())
    }
}

/// One-call density reconstruction from a characteristic function.
pub fn density<F: Fn(f64) -> Complex64>(phi: F, l: f64, n: usize, x: f64) -> Result<f64, CosError> {
    cos_coefficients(phi, l, n).density_at(x)
}

/// Cosine coefficients of the put payoff `(strike - e^(x + mean_log))^+`
/// clipped to `[-m, d]`, expanded on `[-l, l]`.
///
/// The closed form is evaluated in a regrouped arrangement: the mode angle
/// at `d` is split as `k pi/2` plus a small remainder, and the strike-scale
/// parts of the two payoff pieces are cancelled analytically. Large trig
/// arguments and strike-sized cancellations then never enter, which keeps
/// the coefficients accurate out to millions of modes.
pub fn put_coefficients(
    strike: f64,
    mean_log: f64,
    m: f64,
    l: f64,
    n: usize,
) -> PayoffCoefficients {
    assert!(0.0 < m && m <= l, "payoff window must sit inside the expansion window");
    assert!(strike > 0.0, "strike must be positive");
    assert!(n >= 1, "the expansion needs at least modes 0 and 1");
    let d = (strike.ln() - mean_log).min(m);
    let mut v = alloc::vec![0.0; n + 1];
    if d >= -m {
        let freq = core::f64::consts::PI / (2.0 * l);
        let a = (mean_log + d).exp();
        let b = (mean_log - m).exp();
        // strike - a and strike - b without subtractive cancellation; the
        // first is exactly zero whenever the strike sits inside the window.
        let ka = -strike * (mean_log + d - strike.ln()).exp_m1();
        let kb = -strike * (mean_log - m - strike.ln()).exp_m1();
        v[0] = strike * (d + m) - (a - b);
        for k in 1..=n {
            let omega = k as f64 * freq;
            // Angle at the upper limit is k pi/2 + psi with psi small
            // whenever the strike is near the center.
            let psi = k as f64 * (freq * d);
            let (sp, cp) = psi.sin_cos();
            let (s1, c1) = match k % 4 {
                0 => (sp, cp),
                1 => (cp, -sp),
                2 => (-sp, -cp),
                _ => (-cp, sp),
            };
            // Angle at the lower limit vanishes identically when m = l.
            let chi = k as f64 * (freq * (l - m));
            let (s2, c2) = chi.sin_cos();
            let den = 1.0 + omega * omega;
            v[k] = (s1 * (strike + ka * omega * omega) - s2 * (strike + kb * omega * omega))
                / (omega * den)
                - (a * c1 - b * c2) / den;
        }
    }
    PayoffCoefficients { m, l, n, v, d, strike, mean_log }
}

fn assemble_put(expansion: &CosExpansion, payoff: &PayoffCoefficients, discount: f64) -> f64 {
    debug_assert_eq!(expansion.n, payoff.n);
    let mut dot = Neumaier::new();
    dot.add(0.5 * expansion.c[0] * payoff.v[0]);
    for k in 1..=expansion.n {
        dot.add(expansion.c[k] * payoff.v[k]);
    }
    discount * dot.total()
}

/// Prices one option with `n` expansion modes on the given window.
///
/// Puts come from the half-weighted coefficient dot product; calls are the
/// put plus the forward minus the discounted strike, never a direct
/// expansion of the unbounded call payoff.
pub fn price(
    model: &ModelSpec,
    ctx: &MarketContext,
    strike: f64,
    kind: OptionKind,
    range: TruncationRange,
    n: usize,
) -> PriceResult {
    let mean = model.mean_log_price(ctx);
    let expansion = cos_coefficients(|u| model.centered_char_fn(ctx, u), range.l, n);
    let payoff = put_coefficients(strike, mean, range.m, range.l, n);
    let discount = (-ctx.r * ctx.t).exp();
    let put = assemble_put(&expansion, &payoff, discount);
    let price = match kind {
        OptionKind::Put => put,
        // One rounded parity shift keeps call - put an exact identity.
        OptionKind::Call => put + (ctx.s0 - strike * discount),
    };
    PriceResult { price, n_used: n, range, converged: true }
}

/// Running put prices by expansion prefix: entry `k` is the price using
/// modes `0..=k`. The last entry equals [`price`] at the same `n` bit for
/// bit, which makes minimal-term searches consistent with direct pricing.
pub fn put_price_prefixes(
    model: &ModelSpec,
    ctx: &MarketContext,
    strike: f64,
    range: TruncationRange,
    n: usize,
) -> Vec<f64> {
    let mean = model.mean_log_price(ctx);
    let expansion = cos_coefficients(|u| model.centered_char_fn(ctx, u), range.l, n);
    let payoff = put_coefficients(strike, mean, range.m, range.l, n);
    let discount = (-ctx.r * ctx.t).exp();
    let mut out = Vec::with_capacity(n + 1);
    let mut dot = Neumaier::new();
    dot.add(0.5 * expansion.c[0] * payoff.v[0]);
    out.push(discount * dot.total());
    for k in 1..=n {
        dot.add(expansion.c[k] * payoff.v[k]);
        out.push(discount * dot.total());
    }
    out
}

/// Doubles the term count from 64 until two successive prices agree to a
/// tenth of `epsilon`, then returns the finer one.
///
/// Stability of the doubling ladder is a heuristic, not a certificate: on
/// a window that misses density mass the ladder stabilizes on a wrong
/// value, so the window rule carries the error guarantee, never this stop
/// rule alone.
pub fn adaptive_n(
    model: &ModelSpec,
    ctx: &MarketContext,
    strike: f64,
    kind: OptionKind,
    range: TruncationRange,
    epsilon: f64,
) -> Result<PriceResult, CosError> {
    assert!(epsilon > 0.0, "tolerance must be positive");
    let mut prev = price(model, ctx, strike, kind, range, 64);
    let mut n = 128;
    let mut last_delta = f64::INFINITY;
    while n <= N_CAP {
        let cur = price(model, ctx, strike, kind, range, n);
        last_delta = (cur.price - prev.price).abs();
        if last_delta < epsilon / 10.0 {
            return Ok(PriceResult { converged: true, ..cur });
        }
        prev = cur;
        n *= 2;
    }
    Err(CosError::NoConvergence { last_delta, epsilon })
}
