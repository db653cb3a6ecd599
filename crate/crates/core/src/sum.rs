//! Compensated summation.
//!
//! Fourier partial sums mix terms of wildly different magnitudes and signs;
//! plain accumulation would cap the reachable accuracy well above the
//! tolerances this crate guarantees. Sums go through Neumaier's variant of
//! Kahan summation and dot products additionally split each product into a
//! rounded part and its exact FMA remainder, so results match twice the
//! working precision.

#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Running sum with a Neumaier correction term.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self { sum: 0.0, comp: 0.0 }
    }

    /// Adds one value, capturing the rounding error of the addition.
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Compensated total so far.
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums a slice with compensation.
pub fn sum_compensated(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    for &x in xs {
        acc.add(x);
    }
    acc.total()
}

/// Splits `a * b` into its rounded value and the exact remainder.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dot product with exact product splitting and compensated accumulation.
pub fn dot_compensated(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut acc = Neumaier::new();
    for (&x, &y) in a.iter().zip(b) {
        let (p, e) = two_prod(x, y);
        acc.add(p);
        acc.add(e);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_that_breaks_plain_sums() {
        // 1 + 1e100 - 1e100 + 1 in sequence: plain f64 gives 1, not 2.
        let xs = [1.0, 1e100, 1.0, -1e100];
        let plain: f64 = xs.iter().sum();
        assert_eq!(plain, 0.0);
        assert_eq!(sum_compensated(&xs), 2.0);
    }

    #[test]
    fn matches_exact_fraction_sums() {
        // sum of 0.1 a million times is exactly 1e5 * (value of the 0.1
        // bit pattern); compensation should get within one rounding of it.
        let mut acc = Neumaier::new();
        for _ in 0..1_000_000 {
            acc.add(0.1);
        }
        assert!((acc.total() - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn dot_handles_ill_conditioned_products() {
        // a.b constructed so the two large products cancel exactly and the
        // answer is carried entirely by the rounding remainders.
        let x = 1.0 + 2f64.powi(-27);
        let a = [x, -x, 1e-30];
        let b = [x, x - 2f64.powi(-26), 1.0];
        // a[0]*b[0] + a[1]*b[1] = x * (x - (x - 2^-26)) ... expand exactly:
        // x^2 - x^2 + x*2^-26 = x * 2^-26
        let exact = x * 2f64.powi(-26) + 1e-30;
        assert!((dot_compensated(&a, &b) - exact).abs() <= f64::EPSILON * exact);
    }

    #[test]
    fn dot_agrees_with_plain_on_benign_data() {
        let a: alloc::vec::Vec<f64> = (0..100).map(|i| (i as f64).sin()).collect();
        let b: alloc::vec::Vec<f64> = (0..100).map(|i| (i as f64).cos()).collect();
        let plain: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot_compensated(&a, &b) - plain).abs() < 1e-12);
    }
}
