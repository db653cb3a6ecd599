//! Truncation ranges for the cosine expansion.
//!
//! Two sizing rules: the cumulant rule of thumb (fast, no guarantee) and
//! the moment/tail-bound rule built on Markov's inequality (guarantees the
//! pricing error once the payoff is bounded). Also a tail-energy
//! diagnostic that measures how much cosine-coefficient mass a density
//! leaves outside a candidate window.

use crate::models::{MarketContext, ModelSpec};
use crate::moments::{heston_cumulants, MomentError, MomentProvider};
use crate::sum::Neumaier;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Which rule produced a range, with the inputs that parameterized it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RangeProvenance {
    Markov { epsilon: f64, n: u32 },
    Cumulants { n_c: u32 },
    Manual,
}

/// A truncation window pair: the payoff lives on `[-m, m]`, the density
/// expansion on `[-l, l]`, in centered log-price coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationRange {
    /// Payoff window half-width.
    pub m: f64,
    /// Density window half-width, always at least `m`.
    pub l: f64,
    pub provenance: RangeProvenance,
}

impl TruncationRange {
    /// A hand-picked symmetric window with `m = l`.
    pub fn manual(half_width: f64) -> Self {
        assert!(half_width > 0.0, "window half-width must be positive");
        Self { m: half_width, l: half_width, provenance: RangeProvenance::Manual }
    }
}

/// Error budget for the Markov rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceSpec {
    /// Target absolute pricing error.
    pub epsilon: f64,
    /// Supremum of the payoff, e.g. the strike for a put.
    pub k_bound: f64,
}

impl ToleranceSpec {
    pub fn new(epsilon: f64, k_bound: f64) -> Self {
        assert!(epsilon > 0.0, "tolerance must be positive");
        assert!(k_bound > 0.0, "payoff bound must be positive");
        Self { epsilon, k_bound }
    }
}

/// The cumulant inputs cannot feed the requested rule branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InvalidCumulant {
    pub requirement: &'static str,
}

impl core::fmt::Display for InvalidCumulant {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "cumulant range needs {}", self.requirement)
    }
}

impl core::error::Error for InvalidCumulant {}

/// Rule-of-thumb window from low-order cumulants of the centered log
/// price: `l = 12 sqrt(c2)` for `n_c = 2`, `10 sqrt(c2 + sqrt(c4))` for
/// `n_c = 4`, `10 sqrt(c2 + sqrt(c4 + sqrt(c6)))` for `n_c = 6`. One
/// interval serves both windows (`m = l`). No error guarantee attaches to
/// the result; the returned window can sit entirely inside a relevant
/// density mode.
pub fn cumulant_range(
    c1: f64,
    c2: f64,
    c4: f64,
    c6: f64,
    n_c: u32,
) -> Result<TruncationRange, InvalidCumulant> {
    assert!(matches!(n_c, 2 | 4 | 6), "rule branches exist for n_c in {{2, 4, 6}}");
    if c1 != 0.0 {
        return Err(InvalidCumulant { requirement: "a centered law (c1 = 0)" });
    }
    if !(c2 > 0.0) {
        return Err(InvalidCumulant { requirement: "positive variance" });
    }
    let radicand = match n_c {
        2 => return range_of(12.0 * c2.sqrt(), n_c),
        4 => {
            if c4 < 0.0 {
                return Err(InvalidCumulant { requirement: "c4 >= 0" });
            }
            c2 + c4.sqrt()
        }
        _ => {
            if c6 < 0.0 {
                return Err(InvalidCumulant { requirement: "c6 >= 0" });
            }
            let inner = c4 + c6.sqrt();
            if inner < 0.0 {
                return Err(InvalidCumulant { requirement: "c4 + sqrt(c6) >= 0" });
            }
            c2 + inner.sqrt()
        }
    };
    range_of(10.0 * radicand.sqrt(), n_c)
}

fn range_of(l: f64, n_c: u32) -> Result<TruncationRange, InvalidCumulant> {
    Ok(TruncationRange { m: l, l, provenance: RangeProvenance::Cumulants { n_c } })
}

/// Payoff half-width from Markov's inequality: the smallest `m` with
/// `k_bound * mu_n / m^n <= epsilon / 2`, i.e.
/// `(2 k_bound mu_n / epsilon)^(1/n)`.
pub fn markov_m(tol: &ToleranceSpec, mu_n: f64, n: u32) -> f64 {
    assert!(mu_n > 0.0, "even central moments of non-degenerate laws are positive");
    assert!(n >= 2 && n % 2 == 0, "the tail bound uses an even moment order");
    (2.0 * tol.k_bound * mu_n / tol.epsilon).powf(1.0 / n as f64)
}

/// Density half-width: the maximum of `m` and two logarithmic terms that
/// bound the expansion's tail leakage through a Laplace majorant with
/// scale `sigma` (matched to the standard deviation).
pub fn markov_l(m: f64, sigma: f64, tol: &ToleranceSpec) -> f64 {
    assert!(m > 0.0 && sigma > 0.0);
    let root2 = core::f64::consts::SQRT_2;
    let pi = core::f64::consts::PI;
    let pref = -sigma / (2.0 * root2);
    let kk = tol.k_bound * tol.k_bound;
    let eps2 = tol.epsilon * tol.epsilon;
    let t3 = pref * (2.0 * root2 * sigma * eps2 / (72.0 * m * kk)).ln();
    let poly = sigma * sigma / (m * m) + 2.0 * root2 * sigma / m + 4.0;
    let t2 = pref * ((root2 * sigma * eps2 / (72.0 * m * kk)) * (12.0 / (pi * pi)) / poly).ln();
    m.max(t2).max(t3)
}

/// Guaranteed-error window: `sigma = sqrt(mu_2)`, `m` from [`markov_m`]
/// with the provider's `mu_n`, `l` from [`markov_l`]. The pricing error of
/// the cosine expansion on this window is at most `tol.epsilon` for
/// payoffs bounded by `tol.k_bound`.
pub fn markov_range(
    model: &ModelSpec,
    ctx: &MarketContext,
    tol: &ToleranceSpec,
    n: u32,
    provider: &dyn MomentProvider,
) -> Result<TruncationRange, MomentError> {
    markov_range_with_sigma_safety(model, ctx, tol, n, 1.0, provider)
}

/// [`markov_range`] with the majorant scale widened by `sigma_safety`
/// (>= 1) for laws whose tails might not be dominated at the matched
/// scale.
pub fn markov_range_with_sigma_safety(
    model: &ModelSpec,
    ctx: &MarketContext,
    tol: &ToleranceSpec,
    n: u32,
    sigma_safety: f64,
    provider: &dyn MomentProvider,
) -> Result<TruncationRange, MomentError> {
    assert!(sigma_safety >= 1.0, "safety multiplier cannot shrink the majorant");
    let mu2 = provider.central_moment(model, ctx, 2)?.value;
    let mu_n = if n == 2 { mu2 } else { provider.central_moment(model, ctx, n)?.value };
    let m = markov_m(tol, mu_n, n);
    let l = markov_l(m, sigma_safety * mu2.sqrt(), tol);
    Ok(TruncationRange { m, l, provenance: RangeProvenance::Markov { epsilon: tol.epsilon, n } })
}

/// The tail sum never stabilized: the density leaks coefficient energy
/// beyond `k_max`, typically because it has a discontinuity or very slow
/// decay outside the window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TailError {
    SlowDecay { ratio: f64 },
}

impl core::fmt::Display for TailError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let Self::SlowDecay { ratio } = self;
        write!(f, "tail coefficient sum still moving by {ratio:.2e} at the cap")
    }
}

impl core::error::Error for TailError {}

/// Tail coefficient energy of `density` outside `[-l, l]`: the sum over
/// `k <= k_max` of `(1/l) |integral of f(x) cos(k pi (x+l)/(2l)) over the
/// tails|^2`, each tail integrated over `tail_width` beyond the window
/// (pick it so the density's mass further out is negligible, e.g. 40
/// standard deviations). Small values mean the window loses almost
/// nothing: the quantity vanishes as `l` grows for any integrable
/// density whose expansion converges.
///
/// Both tails are sampled once on a uniform grid fine enough for the
/// highest mode (12 points per period) and for the shortest density
/// feature (a tenth of `tail_width / 40`); every mode then reuses the
/// same weighted samples, which keeps each coefficient accurate relative
/// to its own size even when the tail mass is hundreds of orders of
/// magnitude below one.
pub fn tail_energy(
    density: impl Fn(f64) -> f64,
    l: f64,
    k_max: u32,
    tail_width: f64,
) -> Result<f64, TailError> {
    assert!(l > 0.0 && tail_width > 0.0);
    assert!(k_max >= 64, "too few terms to judge stabilization");
    let pi = core::f64::consts::PI;
    let h = (l / (3.0 * k_max as f64)).min(tail_width / 400.0);
    let mut n = (tail_width / h).ceil() as usize;
    n += n % 2;
    let h = tail_width / n as f64;
    // Simpson-weighted tail samples; the mode-k weight at x = +-(l + t)
    // collapses to cos(k pi t / (2l)), up to a sign (-1)^k on the right.
    let mut right = Vec::with_capacity(n + 1);
    let mut left = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let edge = j == 0 || j == n;
        let w = if edge { 1.0 } else if j % 2 == 1 { 4.0 } else { 2.0 } * h / 3.0;
        right.push(w * density(l + j as f64 * h));
        left.push(w * density(-l - j as f64 * h));
    }
    let mut sum = Neumaier::new();
    let (mut at_quarter, mut at_half) = (0.0, 0.0);
    for k in 0..=k_max {
        let theta = k as f64 * pi * h / (2.0 * l);
        let doubled = 2.0 * theta.cos();
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let mut coeff = Neumaier::new();
        let (mut two_back, mut one_back) = (0.0, 0.0);
        for j in 0..=n {
            // Three-term cosine recurrence, re-anchored every 256 steps
            // so rounding cannot build up over long grids.
            let c = if j % 256 <= 1 {
                (theta * j as f64).cos()
            } else {
                doubled * one_back - two_back
            };
            coeff.add(c * (sign * right[j] + left[j]));
            two_back = one_back;
            one_back = c;
        }
        let ik = coeff.total();
        sum.add(ik * ik / l);
        if k == k_max / 4 {
            at_quarter = sum.total();
        }
        if k == k_max / 2 {
            at_half = sum.total();
        }
    }
    let total = sum.total();
    if total == 0.0 {
        return Ok(0.0);
    }
    // Geometric residue estimate from the dyadic increments: when block
    // sums shrink by a factor rho per doubling of k, the remainder past
    // k_max is about d1 / (rho - 1). No measurable shrinkage means the
    // series is still wide open.
    let d0 = at_half - at_quarter;
    let d1 = total - at_half;
    if d1 <= 0.0 {
        return Ok(total);
    }
    let rho = d0 / d1;
    let residue = if rho > 1.0 { d1 / (rho - 1.0) } else { d1 };
    let ratio = residue / total;
    if ratio > 1e-3 {
        return Err(TailError::SlowDecay { ratio });
    }
    Ok(total)
}

/// Cumulants `c2`, `c4`, `c6` of the centered log price for feeding
/// [`cumulant_range`], taken from the model's closed forms where they
/// exist and from log-MGF series composition for Heston.
pub fn centered_cumulants(
    model: &ModelSpec,
    ctx: &MarketContext,
    n_c: u32,
) -> Result<(f64, f64, f64), MomentError> {
    assert!(matches!(n_c, 2 | 4 | 6));
    let ks = match *model {
        ModelSpec::Heston { kappa, eta, theta, v0, rho } => {
            heston_cumulants(kappa, eta, theta, v0, rho, ctx, n_c)
        }
        _ => model.cumulants(ctx, n_c)?,
    };
    let pick = |order: u32| if n_c >= order { ks[order as usize - 1] } else { 0.0 };
    Ok((pick(2), pick(4), pick(6)))
}
