//! Shared oracles for the integration suites.
//!
//! Everything here is deliberately independent of the library's own
//! evaluation paths: the Caputo oracle integrates the defining kernel with
//! tanh-sinh quadrature and uses a Stirling-series log-gamma, so agreement
//! with the closed-form power rule is a genuine cross-check.

#![allow(dead_code)]

use fracspec_core::OrderFunction;

/// Deterministic xorshift generator for reproducible randomized tests.
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [lo, hi).
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

/// log Gamma by the Stirling series with recurrence promotion, accurate to
/// ~1e-13 relative for x > 0.
pub fn ln_gamma_stirling(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma_stirling requires x > 0");
    let mut shift = 0.0;
    let mut z = x;
    while z < 12.0 {
        shift -= z.ln();
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let series = inv
        * (1.0 / 12.0
            + inv2 * (-1.0 / 360.0 + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 / 1188.0))));
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series + shift
}

pub fn gamma_stirling(x: f64) -> f64 {
    ln_gamma_stirling(x).exp()
}

/// Tanh-sinh quadrature of `f(sigma, 1 - sigma)` over sigma in (0, 1).
///
/// The integrand receives both `sigma` and `1 - sigma` computed without
/// cancellation, so algebraic endpoint singularities at either end are
/// integrated accurately.
pub fn tanh_sinh_unit<F>(f: F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let h = 1.0 / 128.0;
    let half_pi = 0.5 * std::f64::consts::PI;
    let mut total = 0.0;
    // A wide window: near-endpoint singularities close to exponent -1 decay
    // slowly in the transformed variable. Underflowed endpoint offsets make
    // the integrand non-finite and are skipped; the dropped tail is
    // negligible for exponents above -1.
    let steps = (6.5 / h) as i64;
    for k in -steps..=steps {
        let u = k as f64 * h;
        let s = half_pi * u.sinh();
        // sigma = (1 + tanh(s)) / 2, 1 - sigma = 1 / (1 + e^{2 s})
        let e2 = (2.0 * s).exp();
        let sigma = e2 / (1.0 + e2);
        let one_minus = 1.0 / (1.0 + e2);
        let weight = half_pi * u.cosh() / (s.cosh() * s.cosh()) * 0.5;
        if weight < 1e-300 || sigma <= 0.0 || one_minus <= 0.0 {
            continue;
        }
        let v = f(sigma, one_minus);
        if v.is_finite() {
            total += weight * v * h;
        }
    }
    total
}

/// Variable-order Caputo derivative of `t^p` evaluated by quadrature of the
/// defining integral, with the kernel's endpoint singularities handled by
/// the tanh-sinh substitution:
///
/// ```text
/// D^{alpha(t)} t^p = 1 / Gamma(m - alpha(t)) *
///     integral_0^t  [p (p-1) ... (p-m+1) tau^{p-m}] (t - tau)^{m-1-alpha(t)} dtau
/// ```
pub fn caputo_power_quadrature(p: f64, order: &OrderFunction, t: f64) -> f64 {
    let m = order.ceiling();
    let alpha = order.order_at(t);
    let mut falling = 1.0;
    for i in 0..m {
        falling *= p - i as f64;
    }
    if falling == 0.0 {
        return 0.0;
    }
    let kernel_pow = m as f64 - 1.0 - alpha;
    let tau_pow = p - m as f64;
    // tau = t sigma, dtau = t dsigma.
    let integral = tanh_sinh_unit(|sigma, one_minus| {
        (t * sigma).powf(tau_pow) * (t * one_minus).powf(kernel_pow)
    }) * t;
    falling * integral / gamma_stirling(m as f64 - alpha)
}
