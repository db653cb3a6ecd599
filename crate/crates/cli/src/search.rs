//! Drivers shared by the experiments: window construction from either
//! rule, the minimal-term search against a reference price, and wall-clock
//! medians.

use std::time::Instant;

use cospricer_core::cos::{put_price_prefixes, OptionKind};
use cospricer_core::models::{MarketContext, ModelSpec};
use cospricer_core::moments::{AutoMoments, MomentError};
use cospricer_core::truncation::{
    centered_cumulants, cumulant_range, markov_range, InvalidCumulant, ToleranceSpec,
    TruncationRange,
};

/// Rule-of-thumb window for any catalog model, from the closed cumulants
/// of the centered log price.
pub fn cumulant_window(
    model: &ModelSpec,
    ctx: &MarketContext,
    n_c: u32,
) -> Result<TruncationRange, InvalidCumulant> {
    let (c2, c4, c6) = centered_cumulants(model, ctx, n_c.max(2))
        .expect("every supported family has closed cumulants to order six");
    cumulant_range(0.0, c2, c4, c6, n_c)
}

/// Guaranteed-error window with the payoff bounded by the strike; valid
/// for calls as well because the engine prices them through exact parity
/// with the put.
pub fn markov_window(
    model: &ModelSpec,
    ctx: &MarketContext,
    epsilon: f64,
    strike: f64,
    n_m: u32,
) -> Result<TruncationRange, MomentError> {
    let tol = ToleranceSpec::new(epsilon, strike);
    markov_range(model, ctx, &tol, n_m, &AutoMoments::default())
}

/// Result of scanning term counts against a reference price.
#[derive(Clone, Copy, Debug)]
pub struct SearchOutcome {
    /// Smallest grid point whose error is within tolerance, `None` when
    /// every grid point up to the cap misses.
    pub minimal_n: Option<usize>,
    /// Price at `minimal_n`, or at the cap when the search fails. A failed
    /// search thus still reports where the expansion settles.
    pub price: f64,
}

/// Finds the smallest term count `n` on the grid `step, 2*step, ..`, up to
/// `cap`, with `|price(n) - reference| <= epsilon`, provided the expansion
/// also settles inside the band at the cap. Without the settling check a
/// partial sum sweeping through the band on its way to a wrong limit (a
/// too-narrow window) would count as converged. Scanning prefix sums of
/// one long expansion makes the whole grid one pass. Past `n` the error
/// may still leave the band again before the cap when coefficients decay
/// slowly; the search reports the first entry, matching how convergence
/// tables count terms.
pub fn minimal_terms(
    model: &ModelSpec,
    ctx: &MarketContext,
    strike: f64,
    kind: OptionKind,
    range: TruncationRange,
    reference: f64,
    epsilon: f64,
    cap: usize,
    step: usize,
) -> SearchOutcome {
    assert!(step >= 1 && cap >= step, "the grid needs at least one point");
    let grid_max = cap - cap % step;
    let prefixes = put_price_prefixes(model, ctx, strike, range, grid_max);
    let shift = match kind {
        OptionKind::Put => 0.0,
        OptionKind::Call => ctx.s0 - strike * (-ctx.r * ctx.t).exp(),
    };
    let price_at = |n: usize| prefixes[n] + shift;
    let settles = (price_at(grid_max) - reference).abs() <= epsilon;
    let minimal = if settles {
        (step..=grid_max).step_by(step).find(|&n| (price_at(n) - reference).abs() <= epsilon)
    } else {
        None
    };
    SearchOutcome { minimal_n: minimal, price: price_at(minimal.unwrap_or(grid_max)) }
}

/// Median of `reps` wall-clock timings in microseconds, after one warm-up
/// run. Timings are machine- and load-dependent; nothing downstream may
/// assert on them.
pub fn median_time_us(reps: usize, mut work: impl FnMut()) -> f64 {
    assert!(reps >= 1);
    work();
    let mut samples: Vec<f64> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            work();
            start.elapsed().as_secs_f64() * 1e6
        })
        .collect();
    samples.sort_by(|a, b| a.total_cmp(b));
    samples[samples.len() / 2]
}

/// Smallest `x` in `[lo, hi]` with `f(x) <= 0`, for `f` decreasing; used
/// to invert tail masses into quantile half-widths.
pub fn bisect_decreasing(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    assert!(lo < hi && f(lo) > 0.0 && f(hi) <= 0.0, "the root must be bracketed");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
