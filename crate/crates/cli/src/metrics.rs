//! Error metrics for the benchmark suite.
//!
//! `Merr` is the maximum absolute deviation at the final time over uniform
//! interior test points. `Rerr` aggregates squared deviations over a
//! space-time test grid relative to the squared field; the tabulated value
//! is the square root of that ratio (a relative RMS error), which is the
//! scale the published accuracy figures use. The raw squared ratio is also
//! exposed.

use num_complex::Complex64;

use fracspec_core::{Error, Result};

/// Maximum absolute deviation between two sampled fields.
pub fn merr(exact: &[Complex64], approx: &[Complex64]) -> f64 {
    assert_eq!(exact.len(), approx.len());
    exact
        .iter()
        .zip(approx)
        .map(|(e, a)| (e - a).norm())
        .fold(0.0, f64::max)
}

/// Maximum absolute deviations of the real and imaginary parts separately.
pub fn merr_parts(exact: &[Complex64], approx: &[Complex64]) -> (f64, f64) {
    assert_eq!(exact.len(), approx.len());
    let mut re: f64 = 0.0;
    let mut im: f64 = 0.0;
    for (e, a) in exact.iter().zip(approx) {
        re = re.max((e.re - a.re).abs());
        im = im.max((e.im - a.im).abs());
    }
    (re, im)
}

/// Accumulator for the relative error ratio over a space-time test grid.
#[derive(Debug, Clone, Copy, Default)]
pub struct RerrAccumulator {
    squared_deviation: f64,
    squared_reference: f64,
}

impl RerrAccumulator {
    pub fn add_samples(&mut self, exact: &[Complex64], approx: &[Complex64]) {
        assert_eq!(exact.len(), approx.len());
        for (e, a) in exact.iter().zip(approx) {
            self.squared_deviation += (e - a).norm_sqr();
            self.squared_reference += e.norm_sqr();
        }
    }

    /// Squared ratio `sum |e - a|^2 / sum |e|^2`.
    pub fn squared_ratio(&self) -> Result<f64> {
        if self.squared_reference == 0.0 {
            return Err(Error::Domain(
                "relative error is undefined for an identically zero reference field".into(),
            ));
        }
        Ok(self.squared_deviation / self.squared_reference)
    }

    /// Relative RMS error `sqrt(sum |e - a|^2 / sum |e|^2)`, the tabulated
    /// convention.
    pub fn rms_ratio(&self) -> Result<f64> {
        Ok(self.squared_ratio()?.sqrt())
    }
}

/// Approximation order `log(err) / log(1/k)` for a `k`-term fit.
pub fn ao(error: f64, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain("approximation order needs k >= 2".into()));
    }
    if error < 0.0 {
        return Err(Error::Domain(format!("negative error {error}")));
    }
    if error == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(error.ln() / (1.0 / k as f64).ln())
}

/// Convergence order `log2(err(n/2) / err(n))` between successive
/// resolutions.
pub fn co(error_half: f64, error_full: f64) -> Result<f64> {
    let valid = error_half > 0.0 && error_full >= 0.0;
    if !valid {
        return Err(Error::Domain(format!(
            "convergence order needs positive errors, got {error_half}, {error_full}"
        )));
    }
    if error_full == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok((error_half / error_full).log2())
}

/// Uniform interior test points along one axis: `i L / (n + 1)`, `i = 1..n`.
pub fn interior_axis(length: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| length * i as f64 / (n + 1) as f64).collect()
}

/// Uniform time samples `j T / k`, `j = 1..k`, spanning `(0, T]`. The last
/// sample is pinned to `T` exactly so rounding cannot push it outside the
/// solution's domain.
pub fn time_samples(t_end: f64, k: usize) -> Vec<f64> {
    (1..=k)
        .map(|j| {
            if j == k {
                t_end
            } else {
                t_end * j as f64 / k as f64
            }
        })
        .collect()
}

/// One benchmark measurement with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub merr: f64,
    /// Imaginary-part maximum error, reported separately for complex fields.
    pub merr_im: Option<f64>,
    pub rerr: f64,
    pub ao: Option<f64>,
    pub co: Option<f64>,
    pub n_t: usize,
    pub k_t: usize,
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub t_end: f64,
}
