//! Time-dependent fractional order with a declared integer ceiling.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of uniform samples used to validate an order function on [0, T].
pub const ORDER_VALIDATION_SAMPLES: usize = 1024;

/// A fractional order `alpha(t)` on `[0, T]` paired with the integer ceiling
/// `m` used by the power rule: `m - 1 < alpha(t) <= m`.
///
/// The ceiling fixes how many initial conditions the operator consumes and
/// which integer powers it annihilates, so it is stored explicitly instead of
/// being recomputed pointwise.
///
/// Construction samples `alpha` on a uniform 1024-point grid over `[0, T]`;
/// violations between samples are the caller's responsibility.
#[derive(Clone)]
pub struct OrderFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    ceiling: u32,
    domain_end: f64,
}

impl OrderFunction {
    /// Builds an order function, enforcing `m - 1 < alpha(t) <= m` on the
    /// validation grid.
    pub fn new<F>(ceiling: u32, domain_end: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let this = Self::with_declared_ceiling(ceiling, domain_end, eval)?;
        let lo = ceiling as f64 - 1.0;
        let hi = ceiling as f64;
        for i in 0..ORDER_VALIDATION_SAMPLES {
            let t = domain_end * i as f64 / (ORDER_VALIDATION_SAMPLES - 1) as f64;
            let a = (this.eval)(t);
            if !(a > lo && a <= hi) {
                return Err(Error::Validation(format!(
                    "order function leaves ({lo}, {hi}] at t = {t}: alpha(t) = {a}"
                )));
            }
        }
        Ok(this)
    }

    /// Builds an order function that trusts the declared ceiling, checking
    /// only that `alpha` is finite on the validation grid.
    ///
    /// Equations are sometimes posed with a nominal ceiling that the order
    /// function drifts out of over part of a long horizon (an oscillatory
    /// order dipping below `m - 1`, or a growing order exceeding `m`). The
    /// power rule stays well defined there through the saturating convention
    /// in [`crate::profile::caputo_power`], so such operators are accepted as
    /// long as the caller fixes the ceiling deliberately.
    pub fn with_declared_ceiling<F>(ceiling: u32, domain_end: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if ceiling < 1 {
            return Err(Error::Validation("order ceiling must be >= 1".into()));
        }
        if !(domain_end.is_finite() && domain_end > 0.0) {
            return Err(Error::Validation(format!(
                "order domain end must be finite and positive, got {domain_end}"
            )));
        }
        for i in 0..ORDER_VALIDATION_SAMPLES {
            let t = domain_end * i as f64 / (ORDER_VALIDATION_SAMPLES - 1) as f64;
            let a = eval(t);
            if !a.is_finite() {
                return Err(Error::Validation(format!(
                    "order function is not finite at t = {t}: alpha(t) = {a}"
                )));
            }
        }
        Ok(Self {
            eval: Arc::new(eval),
            ceiling,
            domain_end,
        })
    }

    /// A constant order `alpha`, with ceiling `ceil(alpha)` (or `alpha`
    /// itself when integer).
    pub fn constant(alpha: f64, domain_end: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Validation(format!(
                "constant order must be positive, got {alpha}"
            )));
        }
        let ceiling = alpha.ceil() as u32;
        Self::new(ceiling, domain_end, move |_| alpha)
    }

    pub fn order_at(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    /// The integer `m` with `m - 1 < alpha(t) <= m`.
    pub fn ceiling(&self) -> u32 {
        self.ceiling
    }

    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }
}

impl fmt::Debug for OrderFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderFunction")
            .field("ceiling", &self.ceiling)
            .field("domain_end", &self.domain_end)
            .finish_non_exhaustive()
    }
}
