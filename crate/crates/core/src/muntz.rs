//! Backward-substitution collocation for multi-term variable-order
//! time-fractional ODEs over a Müntz power basis.
//!
//! A problem
//!
//! ```text
//! D^{alpha(t)} w(t) = sum_i beta_i(t) D^{alpha_i(t)} w(t) + beta_0(t) w(t) + theta(t)
//! w^(i)(0) = h_i,  i = 0 .. m-1
//! ```
//!
//! is solved by positing `w = wbar + sum_k q_k Phi_k` where `wbar` carries the
//! initial data and is annihilated by the leading operator, and
//! `Phi_k(t) = t^{delta_k}` with `delta_k = m + delta (k - 1)`. Each basis
//! function has a closed-form image `varphi_k = D^{alpha(t)} Phi_k`, so
//! substituting back and collocating at Gauss-Chebyshev points yields a small
//! least-squares system for the coefficients `q`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lstsq, CMatrix};
use crate::order::OrderFunction;
use crate::profile::{caputo_power, caputo_profile, derivative_profile, PowerProfile};

/// Complex-valued coefficient or forcing as a function of time.
pub type TimeFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Wraps a real-valued closure as a [`TimeFn`].
pub fn real_time_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> TimeFn {
    Arc::new(move |t| Complex64::new(f(t), 0.0))
}

/// Wraps a constant as a [`TimeFn`].
pub fn const_time_fn(value: impl Into<Complex64>) -> TimeFn {
    let value = value.into();
    Arc::new(move |_| value)
}

/// Müntz power basis `Phi_k(t) = t^{delta_k}`, `delta_k = alpha0 + delta (k - 1)`.
///
/// The offset `alpha0` is the ceiling of the leading order, which makes every
/// `Phi_k` vanish to order `m - 1` at zero (so the fitted coefficients never
/// disturb the initial conditions) and gives it the closed-form fractional
/// image implemented by [`MuntzBasis::varphi`].
#[derive(Debug, Clone, PartialEq)]
pub struct MuntzBasis {
    count: usize,
    delta: f64,
    alpha0: f64,
    t_end: f64,
}

/// Default Müntz exponent spacing.
pub const DEFAULT_DELTA: f64 = 0.25;

impl MuntzBasis {
    pub fn new(count: usize, delta: f64, alpha0: f64, t_end: f64) -> Result<Self> {
        if count < 1 {
            return Err(Error::Validation("basis needs at least one function".into()));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Validation(format!(
                "Müntz spacing must lie in (0, 1], got {delta}"
            )));
        }
        if !(alpha0.is_finite() && alpha0 >= 1.0) {
            return Err(Error::Validation(format!(
                "Müntz offset must be >= 1, got {alpha0}"
            )));
        }
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::Validation(format!(
                "basis horizon must be positive, got {t_end}"
            )));
        }
        Ok(Self {
            count,
            delta,
            alpha0,
            t_end,
        })
    }

    /// Basis sized for a problem with the given leading order: offset at the
    /// order's ceiling, horizon at its domain end.
    pub fn for_order(order: &OrderFunction, count: usize, delta: f64) -> Result<Self> {
        Self::new(count, delta, order.ceiling() as f64, order.domain_end())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// `delta_k` for 1-based `k`.
    pub fn exponent(&self, k: usize) -> Result<f64> {
        if k < 1 || k > self.count {
            return Err(Error::Domain(format!(
                "basis index {k} outside 1..={}",
                self.count
            )));
        }
        Ok(self.alpha0 + self.delta * (k - 1) as f64)
    }

    /// `Phi_k(t) = t^{delta_k}` for `t` in `[0, T]`.
    pub fn phi(&self, k: usize, t: f64) -> Result<f64> {
        let dk = self.exponent(k)?;
        if !(0.0..=self.t_end).contains(&t) {
            return Err(Error::Domain(format!(
                "basis evaluation point {t} outside [0, {}]",
                self.t_end
            )));
        }
        Ok(t.powf(dk))
    }

    /// `varphi_k(t) = D^{alpha(t)} Phi_k(t)`, the leading-order image.
    pub fn varphi(&self, k: usize, order: &OrderFunction, t: f64) -> Result<f64> {
        let dk = self.exponent(k)?;
        caputo_power(dk, order, t)
    }
}

/// Gauss-Chebyshev collocation points on (0, T), decreasing in j.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationGrid {
    points: Vec<f64>,
    t_end: f64,
}

/// `t_j = T/2 (1 + cos(pi (2j - 1) / (2 N_c)))`, `j = 1..N_c`.
pub fn gc_points(n_c: usize, t_end: f64) -> Result<CollocationGrid> {
    if n_c < 1 {
        return Err(Error::Domain("collocation count must be >= 1".into()));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Domain(format!(
            "collocation horizon must be positive, got {t_end}"
        )));
    }
    let points = (1..=n_c)
        .map(|j| {
            0.5 * t_end
                * (1.0 + (std::f64::consts::PI * (2 * j - 1) as f64 / (2 * n_c) as f64).cos())
        })
        .collect();
    Ok(CollocationGrid { points, t_end })
}

impl CollocationGrid {
    /// A grid from explicit points, all strictly inside (0, T).
    pub fn from_points(points: Vec<f64>, t_end: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("collocation grid must not be empty".into()));
        }
        if points.iter().any(|&t| !(t > 0.0 && t < t_end)) {
            return Err(Error::Domain(
                "collocation points must lie strictly inside (0, T)".into(),
            ));
        }
        Ok(Self { points, t_end })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }
}

/// One lower-order term `beta_i(t) D^{alpha_i(t)} w`.
#[derive(Clone)]
pub struct LowerTerm {
    pub order: OrderFunction,
    pub coefficient: TimeFn,
}

/// A multi-term variable-order time-fractional ODE with initial data.
#[derive(Clone)]
pub struct VotfOdeProblem {
    pub leading_order: OrderFunction,
    pub lower_terms: Vec<LowerTerm>,
    /// Optional zeroth-order term `beta_0(t) w(t)`.
    pub reaction: Option<TimeFn>,
    pub forcing: TimeFn,
    pub initial_values: Vec<Complex64>,
    pub t_end: f64,
}

impl VotfOdeProblem {
    pub fn validate(&self) -> Result<()> {
        let m = self.leading_order.ceiling();
        if self.initial_values.len() != m as usize {
            return Err(Error::Validation(format!(
                "expected {} initial values for ceiling {m}, got {}",
                m,
                self.initial_values.len()
            )));
        }
        if !(self.t_end > 0.0 && self.t_end <= self.leading_order.domain_end()) {
            return Err(Error::Validation(format!(
                "horizon {} outside the leading order's domain (0, {}]",
                self.t_end,
                self.leading_order.domain_end()
            )));
        }
        for (i, term) in self.lower_terms.iter().enumerate() {
            if term.order.ceiling() > m {
                return Err(Error::Validation(format!(
                    "lower term {i} has ceiling {} above the leading ceiling {m}",
                    term.order.ceiling()
                )));
            }
            if term.order.domain_end() < self.t_end {
                return Err(Error::Validation(format!(
                    "lower term {i} order is only defined up to t = {}",
                    term.order.domain_end()
                )));
            }
        }
        Ok(())
    }
}

/// The polynomial `wbar(t) = sum_i h_i / i! t^i` matching the initial data.
///
/// Every exponent is an integer below the ceiling, so the leading operator
/// annihilates it, and the `1 / i!` normalization makes the i-th derivative
/// at zero equal `h_i`.
pub fn homogeneous_part(initial_values: &[Complex64]) -> Result<PowerProfile> {
    if initial_values.is_empty() {
        return Err(Error::Domain(
            "at least one initial value is required".into(),
        ));
    }
    let mut factorial = 1.0;
    let mut terms = Vec::with_capacity(initial_values.len());
    for (i, h) in initial_values.iter().enumerate() {
        if i > 0 {
            factorial *= i as f64;
        }
        terms.push((i as f64, h / factorial));
    }
    PowerProfile::new(terms)
}

/// Collocation matrix and right-hand side for the backward-substitution
/// system. Row j, column k reads
///
/// ```text
/// A[j,k] = varphi_k(t_j) - sum_i beta_i(t_j) D^{alpha_i} Phi_k (t_j) - beta_0(t_j) Phi_k(t_j)
/// b[j]   = theta(t_j) + sum_i beta_i(t_j) D^{alpha_i} wbar (t_j) + beta_0(t_j) wbar(t_j)
/// ```
pub fn assemble_system(
    problem: &VotfOdeProblem,
    basis: &MuntzBasis,
    grid: &CollocationGrid,
) -> Result<(CMatrix, Vec<Complex64>)> {
    if grid.len() < basis.count() {
        return Err(Error::Validation(format!(
            "need at least {} collocation points for {} basis functions, got {}",
            basis.count(),
            basis.count(),
            grid.len()
        )));
    }
    assemble_rows(problem, basis, grid.points())
}

fn assemble_rows(
    problem: &VotfOdeProblem,
    basis: &MuntzBasis,
    points: &[f64],
) -> Result<(CMatrix, Vec<Complex64>)> {
    problem.validate()?;
    let wbar = homogeneous_part(&problem.initial_values)?;
    let k_count = basis.count();
    let mut a = CMatrix::zeros(points.len(), k_count);
    let mut b = vec![Complex64::new(0.0, 0.0); points.len()];

    let context = |j: usize, k: usize, e: Error| -> Error {
        match e {
            Error::Domain(msg) => Error::Domain(format!("row {j}, basis {k}: {msg}")),
            other => other,
        }
    };

    for (j, &t) in points.iter().enumerate() {
        let betas: Vec<Complex64> = problem
            .lower_terms
            .iter()
            .map(|term| (term.coefficient)(t))
            .collect();
        let beta0 = problem.reaction.as_ref().map(|r| r(t));

        for k in 1..=k_count {
            let dk = basis.exponent(k)?;
            let varphi = basis
                .varphi(k, &problem.leading_order, t)
                .map_err(|e| context(j, k, e))?;
            let mut entry = Complex64::new(varphi, 0.0);
            for (term, beta) in problem.lower_terms.iter().zip(&betas) {
                let d = caputo_power(dk, &term.order, t).map_err(|e| context(j, k, e))?;
                entry -= beta * d;
            }
            if let Some(b0) = beta0 {
                entry -= b0 * t.powf(dk);
            }
            a.set(j, k - 1, entry);
        }

        let mut rhs = (problem.forcing)(t);
        for (term, beta) in problem.lower_terms.iter().zip(&betas) {
            let d = caputo_profile(&wbar, &term.order, t).map_err(|e| context(j, 0, e))?;
            rhs += beta * d;
        }
        if let Some(b0) = beta0 {
            rhs += b0 * wbar.eval(t);
        }
        b[j] = rhs;
    }

    if !a.is_finite() || !b.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Numerical(
            "collocation system contains non-finite entries".into(),
        ));
    }
    Ok((a, b))
}

/// Solution of one fractional ODE: homogeneous polynomial plus fitted Müntz
/// coefficients.
#[derive(Debug, Clone)]
pub struct VotfOdeSolution {
    pub homogeneous_poly: PowerProfile,
    pub basis: MuntzBasis,
    pub coefficients: Vec<Complex64>,
    pub residual_norm: f64,
    pub rank: usize,
    pub ill_conditioned: bool,
}

impl VotfOdeSolution {
    /// `w(t) = wbar(t) + sum_k q_k t^{delta_k}` for `t` in `[0, T]`.
    pub fn eval(&self, t: f64) -> Result<Complex64> {
        if !(0.0..=self.basis.t_end()).contains(&t) {
            return Err(Error::Domain(format!(
                "evaluation point {t} outside [0, {}]",
                self.basis.t_end()
            )));
        }
        let mut acc = self.homogeneous_poly.eval(t);
        for (k, q) in self.coefficients.iter().enumerate() {
            acc += q * t.powf(self.basis.exponent(k + 1)?);
        }
        Ok(acc)
    }

    /// i-th classical time derivative, differentiated termwise.
    pub fn eval_derivative(&self, t: f64, i: u32) -> Result<Complex64> {
        if !(0.0..=self.basis.t_end()).contains(&t) {
            return Err(Error::Domain(format!(
                "evaluation point {t} outside [0, {}]",
                self.basis.t_end()
            )));
        }
        let mut acc = derivative_profile(&self.homogeneous_poly, i)?.eval(t);
        for (k, q) in self.coefficients.iter().enumerate() {
            let dk = self.basis.exponent(k + 1)?;
            let mut factor = 1.0;
            for step in 0..i {
                factor *= dk - step as f64;
            }
            let e = dk - i as f64;
            // delta_k >= m >= 1, so e < 0 only when differentiating past the
            // basis smoothness; that is a caller error surfaced as domain.
            if e < 0.0 {
                return Err(Error::Domain(format!(
                    "derivative order {i} exceeds basis exponent {dk}"
                )));
            }
            if t == 0.0 {
                if e == 0.0 {
                    acc += q * factor;
                }
            } else {
                acc += q * factor * t.powf(e);
            }
        }
        Ok(acc)
    }

    /// Residual of the collocated operator equation at an arbitrary point in
    /// (0, T], useful for checking the fit away from the collocation grid.
    pub fn residual_at(&self, problem: &VotfOdeProblem, t: f64) -> Result<Complex64> {
        if !(t > 0.0 && t <= problem.t_end) {
            return Err(Error::Domain(format!(
                "residual point {t} outside (0, {}]",
                problem.t_end
            )));
        }
        let (a, b) = assemble_rows(problem, &self.basis, &[t])?;
        let mut lhs = Complex64::new(0.0, 0.0);
        for (k, q) in self.coefficients.iter().enumerate() {
            lhs += a.get(0, k) * q;
        }
        Ok(lhs - b[0])
    }
}

/// Solves the ODE with `N_c = 2 K` Gauss-Chebyshev collocation points.
pub fn solve_votfode(problem: &VotfOdeProblem, basis: &MuntzBasis) -> Result<VotfOdeSolution> {
    let grid = gc_points(2 * basis.count(), problem.t_end)?;
    solve_votfode_on_grid(problem, basis, &grid)
}

/// Solves the ODE on an explicit collocation grid (the `N_c = 2K` default can
/// be overridden this way).
pub fn solve_votfode_on_grid(
    problem: &VotfOdeProblem,
    basis: &MuntzBasis,
    grid: &CollocationGrid,
) -> Result<VotfOdeSolution> {
    let (a, b) = assemble_system(problem, basis, grid)?;
    let fit = lstsq(&a, &b)?;
    Ok(VotfOdeSolution {
        homogeneous_poly: homogeneous_part(&problem.initial_values)?,
        basis: basis.clone(),
        coefficients: fit.solution,
        residual_norm: fit.residual_norm,
        rank: fit.rank,
        ill_conditioned: fit.ill_conditioned,
    })
}
