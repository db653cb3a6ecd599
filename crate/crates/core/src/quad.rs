//! Simpson quadrature, fixed-grid and adaptive.

use crate::sum::Neumaier;

/// Composite Simpson rule over `[a, b]` with an even number of equal
/// subintervals. Node sums are compensated so very fine grids do not lose
/// accuracy to accumulation error.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, subintervals: usize) -> f64 {
    assert!(
        subintervals >= 2 && subintervals % 2 == 0,
        "composite Simpson needs an even subinterval count"
    );
    let h = (b - a) / subintervals as f64;
    let mut acc = Neumaier::new();
    acc.add(f(a));
    for i in 1..subintervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + i as f64 * h));
    }
    acc.add(f(b));
    acc.total() * h / 3.0
}

/// Adaptive Simpson rule to absolute tolerance `tol`.
///
/// Panels are split until the Richardson estimate of the local error is
/// below the panel's share of `tol`; `max_depth` bounds the recursion so a
/// non-integrable feature cannot hang the caller.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(&f, a, m, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let halves = left + right;
    if depth == 0 || (halves - whole).abs() <= 15.0 * tol {
        return halves + (halves - whole) / 15.0;
    }
    refine(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
