//! Central moments of the log price.
//!
//! Exact conversion from cumulants where those exist, numeric estimators
//! where they do not, and a precomputed interpolation surrogate for
//! calibration-style workloads that query the same model family many
//! times. Estimators escalate explicitly: analytic cumulants first, then
//! step-halved finite differences, then Monte Carlo; nothing falls back
//! silently.

use crate::models::{CumulantError, MarketContext, ModelSpec};
use crate::series::Taylor;
use crate::sum::Neumaier;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
#[cfg(feature = "std")]
use rayon::prelude::*;

/// How a moment value was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentMethod {
    Analytic,
    FiniteDifference,
    MonteCarlo,
    Surrogate,
}

/// A central moment with provenance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    /// Bootstrap standard error where the estimator is stochastic.
    pub std_error: Option<f64>,
    pub method: MomentMethod,
}

/// Failure of a moment computation, carrying the estimator that gave up.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MomentError {
    /// The cumulant list stops before the requested order.
    MissingCumulant { order: u32 },
    /// Cumulant input must be centered (first cumulant zero).
    NotCentered,
    Cumulant(CumulantError),
    Fd(FdError),
    Mc(McError),
    Surrogate(SurrogateEvalError),
}

impl core::fmt::Display for MomentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::MissingCumulant { order } => {
                write!(f, "cumulant of order {order} missing from input")
            }
            Self::NotCentered => write!(f, "cumulant input must have kappa_1 = 0"),
            Self::Cumulant(e) => write!(f, "{e}"),
            Self::Fd(e) => write!(f, "{e}"),
            Self::Mc(e) => write!(f, "{e}"),
            Self::Surrogate(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MomentError {}

impl From<CumulantError> for MomentError {
    fn from(e: CumulantError) -> Self {
        Self::Cumulant(e)
    }
}

impl From<FdError> for MomentError {
    fn from(e: FdError) -> Self {
        Self::Fd(e)
    }
}

impl From<McError> for MomentError {
    fn from(e: McError) -> Self {
        Self::Mc(e)
    }
}

impl From<SurrogateEvalError> for MomentError {
    fn from(e: SurrogateEvalError) -> Self {
        Self::Surrogate(e)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Central moment `mu_n` from the cumulants `kappa_1..kappa_n` of a
/// centered law (`kappas[j]` holds `kappa_{j+1}`, and `kappa_1` must be
/// zero). Uses the complete-Bell-polynomial recursion.
pub fn moments_from_cumulants(kappas: &[f64]) -> Result<f64, MomentError> {
    if kappas.len() < 2 {
        return Err(MomentError::MissingCumulant { order: 2 });
    }
    if kappas[0] != 0.0 {
        return Err(MomentError::NotCentered);
    }
    let n = kappas.len();
    let mut mu = Vec::with_capacity(n + 1);
    mu.push(1.0);
    for m in 1..=n {
        let mut acc = Neumaier::new();
        for j in 1..=m {
            acc.add(binomial(m - 1, j - 1) * kappas[j - 1] * mu[m - j]);
        }
        mu.push(acc.total());
    }
    Ok(mu[n])
}

/// Cumulants `kappa_1..kappa_{max_order}` of `log S_T` under Heston
/// dynamics, by truncated power-series composition of the log-MGF. The
/// model itself exposes closed forms only up to order two; this evaluates
/// the same expression tree in [`Taylor`] arithmetic, so every returned
/// cumulant is exact up to rounding.
pub fn heston_cumulants(
    kappa: f64,
    eta: f64,
    theta: f64,
    v0: f64,
    rho: f64,
    ctx: &MarketContext,
    max_order: u32,
) -> Vec<f64> {
    assert!((1..=8).contains(&max_order), "series carries cumulants up to order 8");
    let t = ctx.t;
    let one = Taylor::constant(1.0);
    let beta = Taylor::constant(kappa) + Taylor::linear(-rho * theta);
    // beta^2 - theta^2 (w^2 - w)
    let radicand =
        beta * beta + Taylor::linear(theta * theta) + Taylor::quadratic(-theta * theta);
    let d = radicand.sqrt();
    let shrink = beta - d;
    let g = shrink / (beta + d);
    let decay = d.scaled(-t).exp();
    let wet = one - g * decay;
    let drift = Taylor::linear(ctx.s0.ln() + ctx.r * t);
    let log_mgf = drift
        + (shrink * (one - decay) / wet).scaled(v0 / (theta * theta))
        + (shrink.scaled(t) - (wet / (one - g)).ln().scaled(2.0))
            .scaled(kappa * eta / (theta * theta));
    (1..=max_order as usize).map(|j| log_mgf.cumulant(j)).collect()
}

/// Finite differencing gave up: the step-halving disagreement (or the
/// imaginary residue fraction) exceeded its gate, so the value would be
/// noise. Callers should escalate to Monte Carlo.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FdError {
    IllConditioned { ratio: f64 },
}

impl core::fmt::Display for FdError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let Self::IllConditioned { ratio } = self;
        write!(f, "finite difference ill-conditioned (disagreement ratio {ratio:.2e})")
    }
}

impl core::error::Error for FdError {}

fn stencil(phi: &impl Fn(f64) -> Complex64, n: u32, h: f64) -> Complex64 {
    let mut re = Neumaier::new();
    let mut im = Neumaier::new();
    for j in 0..=n {
        let coeff = binomial(n as usize, j as usize) * if j % 2 == 0 { 1.0 } else { -1.0 };
        let x = (n as f64 / 2.0 - j as f64) * h;
        let v = phi(x);
        re.add(coeff * v.re);
        im.add(coeff * v.im);
    }
    Complex64::new(re.total(), im.total()) / h.powi(n as i32)
}

/// Central moment `mu_n` from an `n`-th order central difference of the
/// centered characteristic function at zero, with one Richardson halving.
///
/// `n` must be even in `2..=8` and `h` in `(0, 0.1]`. The two step sizes
/// must agree to `1e-3` relative after extrapolation and the imaginary
/// residue must be negligible, otherwise the estimate is rejected as
/// [`FdError::IllConditioned`] rather than returned as noise.
pub fn fd_moment(phi: impl Fn(f64) -> Complex64, n: u32, h: f64) -> Result<f64, FdError> {
    assert!((2..=8).contains(&n) && n % 2 == 0, "order must be even and within 2..=8");
    assert!(h > 0.0 && h <= 0.1, "step must lie in (0, 0.1]");
    let d_full = stencil(&phi, n, h);
    let d_half = stencil(&phi, n, h / 2.0);
    let refined = (4.0 * d_half - d_full) / 3.0;
    let scale = refined.norm();
    let ratio = (d_full - d_half).norm() / scale;
    if ratio > 1e-3 {
        return Err(FdError::IllConditioned { ratio });
    }
    if refined.im.abs() > 1e-6 * scale {
        return Err(FdError::IllConditioned { ratio: refined.im.abs() / scale });
    }
    let sign = if n % 4 == 0 { 1.0 } else { -1.0 };
    Ok(sign * refined.re)
}

/// Monte Carlo failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum McError {
    /// Only the Heston model needs simulated moments; everything else has
    /// an analytic path.
    UnsupportedModel { model: &'static str },
    /// A variance path left any plausible region (above 1e6); the
    /// parameters are too extreme for the discretization.
    VarianceBlowup,
}

impl core::fmt::Display for McError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::UnsupportedModel { model } => {
                write!(f, "monte carlo moments not supported for {model}")
            }
            Self::VarianceBlowup => write!(f, "variance path exceeded 1e6"),
        }
    }
}

impl core::error::Error for McError {}

const BLOCK_PATHS: u64 = 1024;
const BOOTSTRAP_RESAMPLES: usize = 200;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn stream_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(seed ^ splitmix64(stream))
}

fn next_unit(rng: &mut ChaCha12Rng) -> f64 {
    // (0, 1], safe inside ln
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

fn normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let radius = (-2.0 * next_unit(rng).ln()).sqrt();
    let angle = 2.0 * core::f64::consts::PI * next_unit(rng);
    (radius * angle.cos(), radius * angle.sin())
}

#[derive(Clone, Copy, Debug, Default)]
struct BlockSums {
    count: f64,
    /// Power sums of the shifted terminal log price, orders 1..=8.
    s: [f64; 8],
}

impl BlockSums {
    fn absorb(&mut self, other: &BlockSums) {
        self.count += other.count;
        for (a, b) in self.s.iter_mut().zip(other.s) {
            *a += b;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn simulate_block(
    kappa: f64,
    eta: f64,
    theta: f64,
    v0: f64,
    rho: f64,
    ctx: &MarketContext,
    shift: f64,
    steps: u32,
    paths: u64,
    seed: u64,
) -> Result<BlockSums, McError> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let dt = ctx.t / steps as f64;
    let rho_perp = (1.0 - rho * rho).sqrt();
    let x0 = ctx.s0.ln();
    let mut sums = BlockSums { count: paths as f64, s: [0.0; 8] };
    for _ in 0..paths {
        let mut x = x0;
        let mut v = v0;
        for _ in 0..steps {
            let (z_spot, z_indep) = normal_pair(&mut rng);
            let z_var = rho * z_spot + rho_perp * z_indep;
            let v_plus = v.max(0.0);
            let vol = (v_plus * dt).sqrt();
            x += (ctx.r - 0.5 * v_plus) * dt + vol * z_spot;
            v += kappa * (eta - v_plus) * dt + theta * vol * z_var;
            if v > 1e6 {
                return Err(McError::VarianceBlowup);
            }
        }
        let dev = x - shift;
        let mut power = 1.0;
        for slot in &mut sums.s {
            power *= dev;
            *slot += power;
        }
    }
    Ok(sums)
}

fn central_from_sums(total: &BlockSums, n: usize) -> f64 {
    let mean = total.s[0] / total.count;
    let mut acc = Neumaier::new();
    for j in 0..=n {
        let raw = if j == 0 { 1.0 } else { total.s[j - 1] / total.count };
        acc.add(binomial(n, j) * raw * (-mean).powi((n - j) as i32));
    }
    acc.total()
}

/// Sample central moment `mu_n` of `log S_T` under Heston dynamics by
/// full-truncation Euler simulation, with a block-bootstrap standard
/// error. Deterministic for a given seed: paths are generated in fixed
/// blocks with per-block seeded streams and combined in block order, so
/// the result does not depend on how blocks were scheduled.
///
/// `n` must be even in `2..=8`, `paths >= 10_000`, `steps >= 1`.
pub fn mc_moment(
    model: &ModelSpec,
    ctx: &MarketContext,
    n: u32,
    paths: u64,
    steps: u32,
    seed: u64,
) -> Result<MomentEstimate, McError> {
    let ModelSpec::Heston { kappa, eta, theta, v0, rho } = *model else {
        return Err(McError::UnsupportedModel { model: model.name() });
    };
    assert!((2..=8).contains(&n) && n % 2 == 0, "order must be even and within 2..=8");
    assert!(paths >= 10_000, "need at least 1e4 paths");
    assert!(steps >= 1, "need at least one time step");
    let shift = model.mean_log_price(ctx);
    let blocks_total = paths.div_ceil(BLOCK_PATHS);
    let block_run = |b: u64| -> Result<BlockSums, McError> {
        let in_block = BLOCK_PATHS.min(paths - b * BLOCK_PATHS);
        simulate_block(
            kappa,
            eta,
            theta,
            v0,
            rho,
            ctx,
            shift,
            steps,
            in_block,
            stream_seed(seed, b),
        )
    };
    #[cfg(feature = "std")]
    let blocks: Vec<BlockSums> = (0..blocks_total)
        .into_par_iter()
        .map(block_run)
        .collect::<Result<_, _>>()?;
    #[cfg(not(feature = "std"))]
    let blocks: Vec<BlockSums> = (0..blocks_total).map(block_run).collect::<Result<_, _>>()?;

    let mut total = BlockSums::default();
    for b in &blocks {
        total.absorb(b);
    }
    let value = central_from_sums(&total, n as usize);

    let mut boot_rng = ChaCha12Rng::seed_from_u64(stream_seed(seed, u64::MAX));
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..BOOTSTRAP_RESAMPLES {
        let mut resampled = BlockSums::default();
        for _ in 0..blocks.len() {
            let pick = (boot_rng.next_u64() % blocks_total) as usize;
            resampled.absorb(&blocks[pick]);
        }
        let v = central_from_sums(&resampled, n as usize);
        // Welford running variance over resample values
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let se = (m2 / (BOOTSTRAP_RESAMPLES - 1) as f64).sqrt();

    Ok(MomentEstimate { value, std_error: Some(se), method: MomentMethod::MonteCarlo })
}

/// Query failure against a [`SurrogateGrid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurrogateEvalError {
    /// The point leaves the grid's bounding box on this axis.
    OutOfDomain { axis: usize },
    /// The point has the wrong number of coordinates.
    DimensionMismatch { expected: usize, got: usize },
    /// The grid stores a different moment order than requested.
    OrderMismatch { stored: u32, requested: u32 },
}

impl core::fmt::Display for SurrogateEvalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::OutOfDomain { axis } => write!(f, "query outside the grid domain on axis {axis}"),
            Self::DimensionMismatch { expected, got } => {
                write!(f, "query has {got} coordinates, grid has {expected} axes")
            }
            Self::OrderMismatch { stored, requested } => {
                write!(f, "grid stores order {stored}, caller asked for {requested}")
            }
        }
    }
}

impl core::error::Error for SurrogateEvalError {}

/// Failure while building or deserializing a [`SurrogateGrid`].
#[derive(Clone, Debug, PartialEq)]
pub enum SurrogateBuildError {
    /// Axis knots must be finite, strictly increasing, at least two.
    InvalidAxis { axis: usize },
    /// Even moments of non-degenerate laws are positive and finite.
    InvalidValue { index: usize },
    Estimator(MomentError),
    /// Text form did not parse at this (1-based) line.
    Parse { line: usize },
}

impl core::fmt::Display for SurrogateBuildError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Self::InvalidAxis { axis } => write!(
                f,
                "axis {axis} must hold at least two strictly increasing finite knots"
            ),
            Self::InvalidValue { index } => {
                write!(f, "estimated moment at grid index {index} is not a positive real")
            }
            Self::Estimator(e) => write!(f, "grid estimator failed: {e}"),
            Self::Parse { line } => write!(f, "unparsable grid text at line {line}"),
        }
    }
}

impl core::error::Error for SurrogateBuildError {}

/// Moment values precomputed on a rectangular grid and interpolated
/// multilinearly between knots. Queries cost a few dozen flops, so pricing
/// loops that need the same moment for many nearby parameter sets can
/// avoid re-running a simulation per query.
#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateGrid {
    order: u32,
    axes: Vec<Vec<f64>>,
    /// Row-major over the knot tensor, last axis fastest.
    values: Vec<f64>,
}

impl SurrogateGrid {
    /// Evaluates `estimator` at every knot combination. Under `std` the
    /// knots are filled in parallel; the stored result is identical either
    /// way because values land at their grid index.
    pub fn build<F>(order: u32, axes: Vec<Vec<f64>>, estimator: F) -> Result<Self, SurrogateBuildError>
    where
        F: Fn(&[f64]) -> Result<f64, MomentError> + Sync,
    {
        for (i, axis) in axes.iter().enumerate() {
            let increasing = axis.windows(2).all(|w| w[0] < w[1]);
            if axis.len() < 2 || !increasing || axis.iter().any(|k| !k.is_finite()) {
                return Err(SurrogateBuildError::InvalidAxis { axis: i });
            }
        }
        let total: usize = axes.iter().map(|a| a.len()).product();
        let at = |mut flat: usize| -> Vec<f64> {
            let mut point = alloc::vec![0.0; axes.len()];
            for (coord, axis) in point.iter_mut().zip(&axes).rev() {
                *coord = axis[flat % axis.len()];
                flat /= axis.len();
            }
            point
        };
        let fill = |flat: usize| -> Result<f64, SurrogateBuildError> {
            let v = estimator(&at(flat)).map_err(SurrogateBuildError::Estimator)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(SurrogateBuildError::InvalidValue { index: flat });
            }
            Ok(v)
        };
        #[cfg(feature = "std")]
        let values: Vec<f64> = (0..total).into_par_iter().map(fill).collect::<Result<_, _>>()?;
        #[cfg(not(feature = "std"))]
        let values: Vec<f64> = (0..total).map(fill).collect::<Result<_, _>>()?;
        Ok(Self { order, axes, values })
    }

    /// Moment order the grid stores.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Multilinear interpolation at `point`; exact at knots.
    pub fn eval(&self, point: &[f64]) -> Result<f64, SurrogateEvalError> {
        let dims = self.axes.len();
        if point.len() != dims {
            return Err(SurrogateEvalError::DimensionMismatch { expected: dims, got: point.len() });
        }
        // Per axis: lower knot index and the interpolation weight toward
        // the upper knot.
        let mut cells = Vec::with_capacity(dims);
        for (axis, (&x, knots)) in point.iter().zip(&self.axes).enumerate() {
            let last = knots.len() - 1;
            if !x.is_finite() || x < knots[0] || x > knots[last] {
                return Err(SurrogateEvalError::OutOfDomain { axis });
            }
            let hi = knots.partition_point(|&k| k < x).clamp(1, last);
            let lo = hi - 1;
            cells.push((lo, (x - knots[lo]) / (knots[hi] - knots[lo])));
        }
        let mut strides = alloc::vec![1usize; dims];
        for axis in (0..dims.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * self.axes[axis + 1].len();
        }
        let mut acc = 0.0;
        for corner in 0..1usize << dims {
            let mut weight = 1.0;
            let mut index = 0usize;
            for axis in 0..dims {
                let (lo, w) = cells[axis];
                if corner >> axis & 1 == 1 {
                    weight *= w;
                    index += (lo + 1) * strides[axis];
                } else {
                    weight *= 1.0 - w;
                    index += lo * strides[axis];
                }
            }
            acc += weight * self.values[index];
        }
        Ok(acc)
    }

    /// Plain-text form: a header, one line per axis, then the value tensor
    /// row-major, one value per line. Values round-trip exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("moment-grid v1\n");
        out.push_str(&format!("order {}\n", self.order));
        out.push_str(&format!("axes {}\n", self.axes.len()));
        for axis in &self.axes {
            out.push_str("axis");
            for k in axis {
                out.push_str(&format!(" {k}"));
            }
            out.push('\n');
        }
        out.push_str(&format!("values {}\n", self.values.len()));
        for v in &self.values {
            out.push_str(&format!("{v}\n"));
        }
        out
    }

    /// Parses the [`Self::to_text`] format.
    pub fn from_text(text: &str) -> Result<Self, SurrogateBuildError> {
        let mut lines = text.lines().enumerate();
        let mut expect = |prefix: &str| -> Result<(usize, String), SurrogateBuildError> {
            let (i, line) = lines.next().ok_or(SurrogateBuildError::Parse { line: 0 })?;
            let rest = line
                .strip_prefix(prefix)
                .ok_or(SurrogateBuildError::Parse { line: i + 1 })?;
            Ok((i + 1, String::from(rest.trim())))
        };
        expect("moment-grid v1")?;
        let (line, order) = expect("order")?;
        let order: u32 = order.parse().map_err(|_| SurrogateBuildError::Parse { line })?;
        let (line, count) = expect("axes")?;
        let count: usize = count.parse().map_err(|_| SurrogateBuildError::Parse { line })?;
        let mut axes = Vec::with_capacity(count);
        for i in 0..count {
            let (line, knots) = expect("axis")?;
            let axis = knots
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| SurrogateBuildError::Parse { line })?;
            let increasing = axis.windows(2).all(|w| w[0] < w[1]);
            if axis.len() < 2 || !increasing {
                return Err(SurrogateBuildError::InvalidAxis { axis: i });
            }
            axes.push(axis);
        }
        let (line, total) = expect("values")?;
        let total: usize = total.parse().map_err(|_| SurrogateBuildError::Parse { line })?;
        if total != axes.iter().map(|a| a.len()).product::<usize>() {
            return Err(SurrogateBuildError::Parse { line });
        }
        let mut values = Vec::with_capacity(total);
        for (i, line) in lines {
            let v: f64 = line.trim().parse().map_err(|_| SurrogateBuildError::Parse { line: i + 1 })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(SurrogateBuildError::InvalidValue { index: values.len() });
            }
            values.push(v);
        }
        if values.len() != total {
            return Err(SurrogateBuildError::Parse { line: 0 });
        }
        Ok(Self { order, axes, values })
    }
}

/// Source of central moments of `log S_T` for a model and market.
pub trait MomentProvider {
    fn central_moment(
        &self,
        model: &ModelSpec,
        ctx: &MarketContext,
        n: u32,
    ) -> Result<MomentEstimate, MomentError>;
}

/// Default provider: analytic cumulants first; models that expose only
/// low-order closed forms (Heston) get the rest from
/// [`heston_cumulants`] series composition; anything else escalates to
/// finite differences and then Monte Carlo. Each escalation happens only
/// on the explicit failure of the previous estimator.
#[derive(Clone, Copy, Debug)]
pub struct AutoMoments {
    /// Finite-difference base step.
    pub fd_step: f64,
    /// Monte Carlo path count.
    pub mc_paths: u64,
    /// Simulation steps per year of maturity.
    pub mc_steps_per_year: f64,
    /// Stream seed for the simulation fallback.
    pub mc_seed: u64,
}

impl Default for AutoMoments {
    fn default() -> Self {
        Self { fd_step: 1e-2, mc_paths: 400_000, mc_steps_per_year: 250.0, mc_seed: 0x0005_EED5 }
    }
}

impl AutoMoments {
    fn mc_steps(&self, ctx: &MarketContext) -> u32 {
        let steps = (self.mc_steps_per_year * ctx.t).ceil();
        if steps < 1.0 {
            1
        } else {
            steps as u32
        }
    }
}

impl MomentProvider for AutoMoments {
    fn central_moment(
        &self,
        model: &ModelSpec,
        ctx: &MarketContext,
        n: u32,
    ) -> Result<MomentEstimate, MomentError> {
        assert!((2..=8).contains(&n) && n % 2 == 0, "order must be even and within 2..=8");
        match model.cumulants(ctx, n) {
            Ok(mut kappas) => {
                kappas[0] = 0.0;
                let value = moments_from_cumulants(&kappas)?;
                Ok(MomentEstimate { value, std_error: None, method: MomentMethod::Analytic })
            }
            Err(CumulantError::NumericFallbackRequired { .. }) => {
                if let ModelSpec::Heston { kappa, eta, theta, v0, rho } = *model {
                    let mut ks = heston_cumulants(kappa, eta, theta, v0, rho, ctx, n);
                    ks[0] = 0.0;
                    let value = moments_from_cumulants(&ks)?;
                    return Ok(MomentEstimate {
                        value,
                        std_error: None,
                        method: MomentMethod::Analytic,
                    });
                }
                match fd_moment(|u| model.centered_char_fn(ctx, u), n, self.fd_step) {
                    Ok(value) => Ok(MomentEstimate {
                        value,
                        std_error: None,
                        method: MomentMethod::FiniteDifference,
                    }),
                    Err(FdError::IllConditioned { .. }) => {
                        let est =
                            mc_moment(model, ctx, n, self.mc_paths, self.mc_steps(ctx), self.mc_seed)?;
                        Ok(est)
                    }
                }
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Serves Heston moments from a prebuilt grid over
/// `(kappa, eta, theta, v0, rho, t)`, in that axis order.
#[derive(Clone, Debug)]
pub struct HestonSurrogate {
    pub grid: SurrogateGrid,
}

impl MomentProvider for HestonSurrogate {
    fn central_moment(
        &self,
        model: &ModelSpec,
        ctx: &MarketContext,
        n: u32,
    ) -> Result<MomentEstimate, MomentError> {
        let ModelSpec::Heston { kappa, eta, theta, v0, rho } = *model else {
            return Err(McError::UnsupportedModel { model: model.name() }.into());
        };
        if n != self.grid.order() {
            return Err(SurrogateEvalError::OrderMismatch { stored: self.grid.order(), requested: n }
                .into());
        }
        let value = self.grid.eval(&[kappa, eta, theta, v0, rho, ctx.t])?;
        Ok(MomentEstimate { value, std_error: None, method: MomentMethod::Surrogate })
    }
}
