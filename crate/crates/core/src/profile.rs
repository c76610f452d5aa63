//! Power profiles and their variable-order Caputo derivatives.
//!
//! A [`PowerProfile`] is a finite sum `sum_p c_p t^p` with real exponents
//! `p >= 0` and complex coefficients. Profiles are the one class of time
//! dependence on which the variable-order Caputo derivative has a closed
//! form, which is what makes the whole collocation scheme semi-analytical:
//! basis functions, homogeneous parts and boundary-lift time factors are all
//! profiles, and their fractional images are evaluated exactly through
//! [`caputo_power`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gamma::gamma_positive;
use crate::order::OrderFunction;

/// Coefficients below this magnitude are dropped during canonicalization.
pub const COEFFICIENT_TOLERANCE: f64 = 1e-300;
/// Exponents closer than this are merged during canonicalization.
pub const EXPONENT_MERGE_TOLERANCE: f64 = 1e-12;

/// One term `c * t^p` of a power profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub exponent: f64,
    pub coefficient: Complex64,
}

/// A finite sum of power terms, kept canonical: exponents strictly
/// increasing, duplicates merged, negligible coefficients dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerProfile {
    terms: Vec<PowerTerm>,
}

impl PowerProfile {
    /// Builds a profile from `(exponent, coefficient)` pairs and
    /// canonicalizes it.
    pub fn new<I, C>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, C)>,
        C: Into<Complex64>,
    {
        let mut collected: Vec<PowerTerm> = Vec::new();
        for (exponent, coefficient) in terms {
            let coefficient = coefficient.into();
            if !exponent.is_finite() || exponent < 0.0 {
                return Err(Error::Domain(format!(
                    "power profile exponents must be finite and >= 0, got {exponent}"
                )));
            }
            if !coefficient.re.is_finite() || !coefficient.im.is_finite() {
                return Err(Error::Domain(format!(
                    "power profile coefficient for t^{exponent} is not finite"
                )));
            }
            collected.push(PowerTerm {
                exponent,
                coefficient,
            });
        }
        collected.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut terms: Vec<PowerTerm> = Vec::with_capacity(collected.len());
        for term in collected {
            match terms.last_mut() {
                Some(last) if (term.exponent - last.exponent).abs() <= EXPONENT_MERGE_TOLERANCE => {
                    last.coefficient += term.coefficient;
                }
                _ => terms.push(term),
            }
        }
        terms.retain(|t| t.coefficient.norm() >= COEFFICIENT_TOLERANCE);
        Ok(Self { terms })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// The single term `c * t^p`.
    pub fn monomial(exponent: f64, coefficient: impl Into<Complex64>) -> Result<Self> {
        Self::new([(exponent, coefficient.into())])
    }

    pub fn constant(value: impl Into<Complex64>) -> Self {
        Self::new([(0.0, value.into())]).expect("constant profile is always valid")
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates the profile at `t >= 0`, with the convention `0^0 = 1`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            acc += term.coefficient * t.powf(term.exponent);
        }
        acc
    }

    pub fn scaled(&self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm {
                    exponent: t.exponent,
                    coefficient: t.coefficient * factor,
                })
                .filter(|t| t.coefficient.norm() >= COEFFICIENT_TOLERANCE)
                .collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.exponent, t.coefficient)),
        )
        .expect("canonical inputs stay valid under addition")
    }

    /// Union of the exponents of several profiles, merged within tolerance.
    pub fn exponent_union<'a>(profiles: impl IntoIterator<Item = &'a Self>) -> Vec<f64> {
        let mut exps: Vec<f64> = profiles
            .into_iter()
            .flat_map(|p| p.terms.iter().map(|t| t.exponent))
            .collect();
        exps.sort_by(f64::total_cmp);
        exps.dedup_by(|a, b| (*a - *b).abs() <= EXPONENT_MERGE_TOLERANCE);
        exps
    }

    /// The coefficient of `t^p`, zero if the exponent is absent.
    pub fn coefficient_of(&self, exponent: f64) -> Complex64 {
        self.terms
            .iter()
            .find(|t| (t.exponent - exponent).abs() <= EXPONENT_MERGE_TOLERANCE)
            .map(|t| t.coefficient)
            .unwrap_or_else(|| Complex64::new(0.0, 0.0))
    }
}

fn as_nonnegative_integer(p: f64) -> Option<u32> {
    let rounded = p.round();
    if (p - rounded).abs() <= EXPONENT_MERGE_TOLERANCE && rounded >= 0.0 {
        Some(rounded as u32)
    } else {
        None
    }
}

/// Variable-order Caputo derivative of `t^p` at time `t > 0`.
///
/// With `m` the ceiling attached to `order`, integer exponents `p < m` are
/// annihilated; otherwise the power rule applies:
///
/// ```text
/// D^{alpha(t)} t^p = Gamma(p + 1) / Gamma(p + 1 - alpha(t)) * t^{p - alpha(t)}
/// ```
///
/// Non-integer exponents with `p <= m - 1` are rejected: the rule does not
/// define them and silently returning zero would mask modelling mistakes.
///
/// When `alpha(t) >= p + 1` the denominator argument leaves the positive
/// axis. Read through the entire reciprocal gamma function the prefactor
/// passes continuously through zero at the crossing, and past it the formula
/// grows without bound; this implementation saturates the whole regime to
/// zero. Only order functions that overshoot the exponent range ever land
/// here (long-horizon problems with growing orders), and the convention keeps
/// assembly and manufactured right-hand sides consistent with each other.
pub fn caputo_power(p: f64, order: &OrderFunction, t: f64) -> Result<f64> {
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!(
            "Caputo derivative requires t > 0, got {t}"
        )));
    }
    if !p.is_finite() || p < 0.0 {
        return Err(Error::Domain(format!(
            "Caputo power rule requires exponent >= 0, got {p}"
        )));
    }
    let m = order.ceiling();
    match as_nonnegative_integer(p) {
        Some(k) if k < m => return Ok(0.0),
        Some(_) => {}
        None => {
            if p <= m as f64 - 1.0 {
                return Err(Error::UnsupportedExponent {
                    exponent: p,
                    ceiling: m,
                });
            }
        }
    }
    let alpha = order.order_at(t);
    let g = p + 1.0 - alpha;
    if g <= 0.0 {
        return Ok(0.0);
    }
    Ok(gamma_positive(p + 1.0) / gamma_positive(g) * t.powf(p - alpha))
}

/// Termwise variable-order Caputo derivative of a power profile.
pub fn caputo_profile(
    profile: &PowerProfile,
    order: &OrderFunction,
    t: f64,
) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for term in profile.terms() {
        let d = caputo_power(term.exponent, order, t).map_err(|e| match e {
            Error::Domain(msg) => {
                Error::Domain(format!("{msg} (term t^{})", term.exponent))
            }
            other => other,
        })?;
        acc += term.coefficient * d;
    }
    Ok(acc)
}

/// k-th classical time derivative of a power profile.
///
/// Integer exponents below `k` vanish. A non-integer exponent `p < k` is an
/// error: such a profile has unbounded derivatives at `t = 0` and cannot
/// serve as a boundary lift with finite initial data.
pub fn derivative_profile(profile: &PowerProfile, k: u32) -> Result<PowerProfile> {
    let mut terms: Vec<(f64, Complex64)> = Vec::with_capacity(profile.terms().len());
    for term in profile.terms() {
        let p = term.exponent;
        match as_nonnegative_integer(p) {
            Some(int_p) if int_p < k => continue,
            Some(_) => {}
            None => {
                if p < k as f64 {
                    return Err(Error::UnsupportedExponent {
                        exponent: p,
                        ceiling: k,
                    });
                }
            }
        }
        let mut factor = 1.0;
        for i in 0..k {
            factor *= p - i as f64;
        }
        terms.push((p - k as f64, term.coefficient * factor));
    }
    PowerProfile::new(terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    fn re(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn canonicalization_merges_and_drops() {
        let p = PowerProfile::new([(2.0, re(1.0)), (2.0 + 1e-13, re(3.0)), (1.0, re(0.0))])
            .unwrap();
        assert_eq!(p.terms().len(), 1);
        assert_eq!(p.terms()[0].exponent, 2.0);
        assert_eq!(p.terms()[0].coefficient, re(4.0));
    }

    #[test]
    fn rejects_bad_terms() {
        assert!(PowerProfile::new([(-0.5, re(1.0))]).is_err());
        assert!(PowerProfile::new([(f64::NAN, re(1.0))]).is_err());
        assert!(PowerProfile::new([(1.0, C::new(f64::INFINITY, 0.0))]).is_err());
    }

    #[test]
    fn eval_uses_zero_power_convention() {
        let p = PowerProfile::new([(0.0, re(3.0)), (2.0, re(1.0))]).unwrap();
        assert_eq!(p.eval(0.0), re(3.0));
        assert_eq!(p.eval(2.0), re(7.0));
    }

    #[test]
    fn caputo_power_first_integer_order() {
        // D^1 t = 1 for alpha identically 1.
        let order = OrderFunction::constant(1.0, 1.0).unwrap();
        let v = caputo_power(1.0, &order, 0.7).unwrap();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn caputo_power_annihilates_low_integer_exponents() {
        // p = 1 < m = 2 vanishes regardless of t.
        let order = OrderFunction::new(2, 1.0, |t| 1.25 + t * t / 20.0).unwrap();
        assert_eq!(caputo_power(1.0, &order, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn caputo_power_matches_gamma_ratio() {
        // alpha(t) = 0.5 + 0.1 t at t = 1: Gamma(3.5) / Gamma(2.9).
        let order = OrderFunction::new(1, 1.0, |t| 0.5 + 0.1 * t).unwrap();
        let v = caputo_power(2.5, &order, 1.0).unwrap();
        let expected = 1.818_667_321_795_460_5;
        assert!((v - expected).abs() < 1e-13 * expected);
    }

    #[test]
    fn caputo_power_rejects_undefined_case() {
        let order = OrderFunction::new(2, 1.0, |_| 1.5).unwrap();
        let err = caputo_power(0.5, &order, 0.5);
        assert!(matches!(
            err,
            Err(Error::UnsupportedExponent { ceiling: 2, .. })
        ));
    }

    #[test]
    fn caputo_power_rejects_nonpositive_time() {
        let order = OrderFunction::constant(0.5, 1.0).unwrap();
        assert!(matches!(
            caputo_power(2.0, &order, 0.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn caputo_power_saturates_past_exponent_range() {
        // Growing order overtakes p + 1 partway through the horizon; the
        // value decays to zero at the crossing and stays zero beyond it.
        let order =
            OrderFunction::with_declared_ceiling(3, 10.0, |t| 2.0 + 0.1 * t.exp()).unwrap();
        // alpha(ln 30) = 5 crosses p + 1 for p = 4; 1/Gamma pulls the value
        // to zero as the crossing approaches.
        let before = caputo_power(4.0, &order, 3.3).unwrap();
        assert!(before.is_finite());
        let near = caputo_power(4.0, &order, 3.401).unwrap();
        assert!(near.is_finite() && near.abs() < 0.05, "near = {near}");
        assert!(near.abs() < before.abs());
        assert_eq!(caputo_power(4.0, &order, 3.6).unwrap(), 0.0);
        assert_eq!(caputo_power(4.0, &order, 9.9).unwrap(), 0.0);
    }

    #[test]
    fn caputo_profile_is_linear_and_handles_classics() {
        // D^2 (3 t^2) = 6 for alpha identically 2.
        let order = OrderFunction::constant(2.0, 1.0).unwrap();
        let p = PowerProfile::monomial(2.0, re(3.0)).unwrap();
        let v = caputo_profile(&p, &order, 0.3).unwrap();
        assert!((v.re - 6.0).abs() < 1e-12);
        assert!(v.im.abs() < 1e-15);
        // Empty profile gives zero.
        let z = caputo_profile(&PowerProfile::zero(), &order, 0.3).unwrap();
        assert_eq!(z, re(0.0));
    }

    #[test]
    fn derivative_profile_examples() {
        // d/dt t^2 = 2t
        let p = PowerProfile::monomial(2.0, re(1.0)).unwrap();
        let d = derivative_profile(&p, 1).unwrap();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.terms()[0].exponent, 1.0);
        assert_eq!(d.terms()[0].coefficient, re(2.0));

        // d2/dt2 (t^3 + t) = 6t
        let p = PowerProfile::new([(3.0, re(1.0)), (1.0, re(1.0))]).unwrap();
        let d = derivative_profile(&p, 2).unwrap();
        assert_eq!(d.terms().len(), 1);
        assert_eq!(d.terms()[0].exponent, 1.0);
        assert_eq!(d.terms()[0].coefficient, re(6.0));

        // d/dt 1 = 0
        let d = derivative_profile(&PowerProfile::constant(re(1.0)), 1).unwrap();
        assert!(d.is_zero());

        // Fractional exponent below the derivative count is rejected.
        let p = PowerProfile::monomial(0.5, re(1.0)).unwrap();
        assert!(derivative_profile(&p, 1).is_err());
    }
}
