//! Independent finite-difference reference solver for single-term
//! variable-order subdiffusion problems (order in (0, 1), one spatial
//! dimension, Dirichlet data).
//!
//! The fractional derivative is discretized by the L1 rule with the order
//! evaluated at the current time level, space by centered second differences,
//! coupled implicitly and solved by the Thomas algorithm. First order plus in
//! time, second order in space: this is a low-order cross-check for the
//! spectral solver, not a precision method.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::order::OrderFunction;

pub type RealTimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type RealSpaceFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type RealSpaceTimeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `D^{alpha(t)} u = kappa(t) u_xx + f(x, t)` on `[0, L] x [0, T]` with
/// Dirichlet data and one initial field.
#[derive(Clone)]
pub struct DiffusionProblem {
    pub length: f64,
    pub t_end: f64,
    pub order: OrderFunction,
    pub diffusivity: RealTimeFn,
    pub forcing: RealSpaceTimeFn,
    pub left: RealTimeFn,
    pub right: RealTimeFn,
    pub initial: RealSpaceFn,
}

/// Uniform space-time grid: `h = L / n_x`, `tau = T / n_t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FdmGrid {
    pub n_x: usize,
    pub n_t: usize,
}

/// Nodal values at every time level; `values[n][i]` is `u(x_i, t_n)`.
#[derive(Debug, Clone)]
pub struct FdmSolution {
    pub values: Vec<Vec<f64>>,
    pub h: f64,
    pub tau: f64,
}

impl FdmSolution {
    pub fn final_time_values(&self) -> &[f64] {
        self.values.last().expect("at least the initial level")
    }

    pub fn node(&self, i: usize) -> f64 {
        self.h * i as f64
    }
}

/// Implicit L1 scheme for [`DiffusionProblem`].
pub fn solve_diffusion_l1(problem: &DiffusionProblem, grid: FdmGrid) -> Result<FdmSolution> {
    if problem.order.ceiling() != 1 {
        return Err(Error::Validation(
            "the L1 oracle covers orders in (0, 1) only".into(),
        ));
    }
    if grid.n_x < 2 || grid.n_t < 1 {
        return Err(Error::Validation(format!(
            "grid too small: n_x = {}, n_t = {}",
            grid.n_x, grid.n_t
        )));
    }
    let h = problem.length / grid.n_x as f64;
    let tau = problem.t_end / grid.n_t as f64;
    let n_inner = grid.n_x - 1;

    let mut values = Vec::with_capacity(grid.n_t + 1);
    let level0: Vec<f64> = (0..=grid.n_x)
        .map(|i| (problem.initial)(h * i as f64))
        .collect();
    values.push(level0);

    let mut lower = vec![0.0; n_inner];
    let mut diag = vec![0.0; n_inner];
    let mut upper = vec![0.0; n_inner];
    let mut rhs = vec![0.0; n_inner];

    for n in 1..=grid.n_t {
        let t_n = tau * n as f64;
        // At alpha = 1 the weights collapse to backward Euler, so the upper
        // endpoint is harmless.
        let alpha = problem.order.order_at(t_n);
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Validation(format!(
                "order left (0, 1] at t = {t_n}: alpha = {alpha}"
            )));
        }
        let kappa = (problem.diffusivity)(t_n);
        // L1 weights with the order frozen at the evaluation time, matching
        // the outer-time order of the Caputo kernel.
        let scale = tau.powf(-alpha) / gamma(2.0 - alpha)?;
        let weight = |j: usize| -> f64 {
            // The j = 0 term is (1 - 0^{1-alpha}); the zero power must take
            // the continuous branch 0 even when alpha reaches 1, where IEEE
            // 0^0 would return 1.
            let older = if j == 0 {
                0.0
            } else {
                (j as f64).powf(1.0 - alpha)
            };
            scale * ((j as f64 + 1.0).powf(1.0 - alpha) - older)
        };

        // History sum: sum_{j=1}^{n-1} b_j (u^{n-j} - u^{n-j-1}).
        let mut history = vec![0.0; n_inner];
        for j in 1..n {
            let b = weight(j);
            let newer = &values[n - j];
            let older = &values[n - j - 1];
            for i in 0..n_inner {
                history[i] += b * (newer[i + 1] - older[i + 1]);
            }
        }

        let b0 = weight(0);
        let r = kappa / (h * h);
        let g_left = (problem.left)(t_n);
        let g_right = (problem.right)(t_n);
        let prev = &values[n - 1];
        for i in 0..n_inner {
            let x = h * (i + 1) as f64;
            lower[i] = -r;
            diag[i] = b0 + 2.0 * r;
            upper[i] = -r;
            rhs[i] = b0 * prev[i + 1] - history[i] + (problem.forcing)(x, t_n);
        }
        rhs[0] += r * g_left;
        rhs[n_inner - 1] += r * g_right;

        let inner = thomas(&lower, &mut diag.clone(), &upper, &mut rhs.clone())?;
        let mut level = Vec::with_capacity(grid.n_x + 1);
        level.push(g_left);
        level.extend(inner);
        level.push(g_right);
        values.push(level);
    }

    Ok(FdmSolution { values, h, tau })
}

/// Tridiagonal solve by forward elimination and back substitution.
fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 {
            return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
        }
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    if diag[n - 1] == 0.0 {
        return Err(Error::Numerical("zero pivot in tridiagonal solve".into()));
    }
    let mut x = vec![0.0; n];
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    }
    Ok(x)
}

/// Solves on the given grid and on a grid with the time step halved, and
/// returns the finer solution together with a Richardson-style error
/// estimate: the maximum nodal difference at the final time, which bounds the
/// discretization error of a first-order-in-time scheme up to a modest
/// constant.
pub fn solve_with_error_estimate(
    problem: &DiffusionProblem,
    grid: FdmGrid,
) -> Result<(FdmSolution, f64)> {
    let coarse = solve_diffusion_l1(problem, grid)?;
    let fine = solve_diffusion_l1(
        problem,
        FdmGrid {
            n_x: grid.n_x,
            n_t: grid.n_t * 2,
        },
    )?;
    let estimate = coarse
        .final_time_values()
        .iter()
        .zip(fine.final_time_values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0_f64, f64::max);
    Ok((fine, estimate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_problem(order: OrderFunction) -> DiffusionProblem {
        DiffusionProblem {
            length: 1.0,
            t_end: 1.0,
            order,
            diffusivity: Arc::new(|_| 1.0),
            forcing: Arc::new(|_, _| 0.0),
            left: Arc::new(|_| 0.0),
            right: Arc::new(|_| 0.0),
            initial: Arc::new(|_| 0.0),
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let order = OrderFunction::new(1, 1.0, |t| 0.5 + 0.2 * t).unwrap();
        let sol = solve_diffusion_l1(&zero_problem(order), FdmGrid { n_x: 10, n_t: 20 }).unwrap();
        for level in &sol.values {
            for v in level {
                assert_eq!(*v, 0.0);
            }
        }
    }

    #[test]
    fn nonnegative_data_respects_maximum_principle() {
        // Pure subdiffusion of a bump: values stay within the data range.
        let order = OrderFunction::new(1, 1.0, |t| 0.4 + 0.3 * t).unwrap();
        let mut problem = zero_problem(order);
        problem.initial = Arc::new(|x: f64| (std::f64::consts::PI * x).sin());
        let sol = solve_diffusion_l1(&problem, FdmGrid { n_x: 20, n_t: 50 }).unwrap();
        for level in &sol.values {
            for v in level {
                assert!(*v >= -1e-12 && *v <= 1.0 + 1e-12, "v = {v}");
            }
        }
    }

    #[test]
    fn rejects_wave_regime_orders() {
        let order = OrderFunction::new(2, 1.0, |_| 1.5).unwrap();
        let problem = zero_problem(order);
        assert!(solve_diffusion_l1(&problem, FdmGrid { n_x: 4, n_t: 4 }).is_err());
    }
}
