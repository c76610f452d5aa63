//! The benchmark problem suite: one fractional ODE and seven PDEs with
//! closed-form solutions, spanning single-harmonic diffusion, multi-term
//! wave-diffusion, a complex Schrödinger-type equation, 2d problems with
//! multiquadric boundary lifts, and a 2d biharmonic equation.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use fracspec_core::muntz::{const_time_fn, LowerTerm, MuntzBasis, TimeFn};
use fracspec_core::pipeline::{
    real_space_fn, real_space_time_fn, shift_space_time_fn, space_time_fn,
    BoundarySpec, PdeProblem, PdeTerm, RbfCondition, SolveConfig, TermSide,
};
use fracspec_core::{
    caputo_power, caputo_profile, solve_pde, solve_votfode, BoxDomain, ConditionKind, Error,
    OrderFunction, PdeSolution, PowerProfile, Result, SpatialSymbol, VotfOdeProblem,
    VotfOdeSolution,
};

use crate::metrics::{interior_axis, merr, merr_parts, time_samples, RerrAccumulator};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Default Müntz spacing used across the suite unless overridden.
pub const DEFAULT_DELTA: f64 = 0.25;
/// Default spatial test-grid size per dimension.
pub const DEFAULT_NT: usize = 101;
/// Default number of time samples for relative errors.
pub const DEFAULT_KT: usize = 101;

/// Common parameter overrides accepted by every benchmark runner.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub t_end: Option<f64>,
    pub quadrature: Option<usize>,
    pub n_t: Option<usize>,
    pub k_t: Option<usize>,
}

// ---------------------------------------------------------------------------
// Benchmark 1: a four-term variable-order fractional ODE with oscillatory
// orders and a reaction term; exact solution t^6 + t^4 + t^2 + 1.
// ---------------------------------------------------------------------------

pub struct OdeBenchmark {
    pub problem: VotfOdeProblem,
    pub exact: PowerProfile,
}

/// Builds the four-term ODE on [0, T].
///
/// The declared ceilings follow the equation's nominal structure (4 initial
/// values). On long horizons the oscillatory and growing order functions
/// leave their nominal bands, so the orders are constructed with declared
/// ceilings rather than strict band validation; the power rule's saturating
/// convention keeps every evaluation finite.
pub fn ode_benchmark(t_end: f64) -> Result<OdeBenchmark> {
    let leading = OrderFunction::with_declared_ceiling(4, t_end, |t| 3.2 + 0.5 * t.sin())?;
    let order1 = OrderFunction::with_declared_ceiling(1, t_end, |t| 0.1 + 0.5 * t.sin())?;
    let order2 = OrderFunction::with_declared_ceiling(2, t_end, |t| 1.0 + t.cos())?;
    let order3 = OrderFunction::with_declared_ceiling(3, t_end, |t| 2.0 + 0.1 * t.exp())?;

    let beta1: TimeFn = Arc::new(|t: f64| c(-t.sin()));
    let beta2: TimeFn = Arc::new(|t: f64| c(-t.cos()));
    let beta3: TimeFn = Arc::new(|t: f64| c(-(-t).exp()));
    let beta0: TimeFn = Arc::new(|t: f64| c(1.0 + t * t));

    let exact = PowerProfile::new([
        (6.0, c(1.0)),
        (4.0, c(1.0)),
        (2.0, c(1.0)),
        (0.0, c(1.0)),
    ])?;
    let initial = vec![c(1.0), c(0.0), c(2.0), c(0.0)];

    let lower = vec![
        LowerTerm {
            order: order1,
            coefficient: beta1,
        },
        LowerTerm {
            order: order2,
            coefficient: beta2,
        },
        LowerTerm {
            order: order3,
            coefficient: beta3,
        },
    ];

    // Manufactured right-hand side: theta = D^alpha w - sum beta_i D^{alpha_i} w - beta_0 w.
    let forcing: TimeFn = {
        let exact = exact.clone();
        let leading = leading.clone();
        let lower = lower.clone();
        let beta0 = beta0.clone();
        Arc::new(move |t| {
            let mut value = caputo_profile(&exact, &leading, t).expect("profile in rule domain");
            for term in &lower {
                value -= (term.coefficient)(t)
                    * caputo_profile(&exact, &term.order, t).expect("profile in rule domain");
            }
            value - beta0(t) * exact.eval(t)
        })
    };

    Ok(OdeBenchmark {
        problem: VotfOdeProblem {
            leading_order: leading,
            lower_terms: lower,
            reaction: Some(beta0),
            forcing,
            initial_values: initial,
            t_end,
        },
        exact,
    })
}

/// Solves the ODE benchmark and returns the solution.
pub fn ode_solve(t_end: f64, k: usize, delta: f64) -> Result<VotfOdeSolution> {
    let bench = ode_benchmark(t_end)?;
    let basis = MuntzBasis::new(k, delta, 4.0, t_end)?;
    solve_votfode(&bench.problem, &basis)
}

/// Relative RMS error of the ODE benchmark over `k_t` time samples.
pub fn ode_rerr(t_end: f64, k: usize, delta: f64, k_t: usize) -> Result<f64> {
    let bench = ode_benchmark(t_end)?;
    let basis = MuntzBasis::new(k, delta, 4.0, t_end)?;
    let sol = solve_votfode(&bench.problem, &basis)?;
    let mut acc = RerrAccumulator::default();
    for t in time_samples(t_end, k_t) {
        acc.add_samples(&[bench.exact.eval(t)], &[sol.eval(t)?]);
    }
    acc.rms_ratio()
}

// ---------------------------------------------------------------------------
// Shared helpers for the PDE benchmarks.
// ---------------------------------------------------------------------------

/// Exact solutions are supplied as closures for error measurement.
pub type ExactFn = Arc<dyn Fn(&[f64], f64) -> Complex64 + Send + Sync>;

pub struct PdeBenchmark {
    pub problem: PdeProblem,
    pub exact: ExactFn,
    /// Exact spatial gradient along axis 0 where a benchmark measures it.
    pub exact_dx: Option<ExactFn>,
}

fn rhs_laplacian(coefficient: impl Into<Complex64>) -> PdeTerm {
    PdeTerm {
        side: TermSide::RhsSpatial,
        order: None,
        coefficient: const_time_fn(coefficient.into()),
        symbol: SpatialSymbol::Laplacian,
    }
}

/// Measures Merr at the final time on the uniform interior grid.
pub fn pde_merr(bench: &PdeBenchmark, sol: &PdeSolution, n_t: usize) -> Result<f64> {
    let (exact, approx) = final_time_fields(bench, sol, n_t)?;
    Ok(merr(&exact, &approx))
}

/// Real/imaginary split of Merr for complex-valued fields.
pub fn pde_merr_parts(bench: &PdeBenchmark, sol: &PdeSolution, n_t: usize) -> Result<(f64, f64)> {
    let (exact, approx) = final_time_fields(bench, sol, n_t)?;
    Ok(merr_parts(&exact, &approx))
}

fn test_axes(domain: &BoxDomain, n_t: usize) -> Vec<Vec<f64>> {
    (0..domain.dim())
        .map(|a| interior_axis(domain.length(a), n_t))
        .collect()
}

fn exact_on_grid(exact: &ExactFn, axes: &[Vec<f64>], t: f64) -> Vec<Complex64> {
    match axes.len() {
        1 => axes[0].iter().map(|&x| exact(&[x], t)).collect(),
        2 => {
            let mut out = Vec::with_capacity(axes[0].len() * axes[1].len());
            for &x1 in &axes[0] {
                for &x2 in &axes[1] {
                    out.push(exact(&[x1, x2], t));
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

fn final_time_fields(
    bench: &PdeBenchmark,
    sol: &PdeSolution,
    n_t: usize,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let axes = test_axes(&bench.problem.domain, n_t);
    let approx = sol.eval_on_grid(&axes, sol.t_end)?;
    let exact = exact_on_grid(&bench.exact, &axes, sol.t_end);
    Ok((exact, approx))
}

/// Relative RMS error over the space-time test grid.
pub fn pde_rerr(bench: &PdeBenchmark, sol: &PdeSolution, n_t: usize, k_t: usize) -> Result<f64> {
    let axes = test_axes(&bench.problem.domain, n_t);
    let mut acc = RerrAccumulator::default();
    for t in time_samples(sol.t_end, k_t) {
        let approx = sol.eval_on_grid(&axes, t)?;
        let exact = exact_on_grid(&bench.exact, &axes, t);
        acc.add_samples(&exact, &approx);
    }
    acc.rms_ratio()
}

/// Relative RMS error of the axis-0 spatial gradient.
pub fn pde_rerr_gradient(
    bench: &PdeBenchmark,
    sol: &PdeSolution,
    n_t: usize,
    k_t: usize,
) -> Result<f64> {
    let exact_dx = bench
        .exact_dx
        .as_ref()
        .ok_or_else(|| Error::Validation("benchmark has no gradient reference".into()))?;
    let axes = test_axes(&bench.problem.domain, n_t);
    let mut acc = RerrAccumulator::default();
    for t in time_samples(sol.t_end, k_t) {
        let approx = sol.eval_gradient_on_grid(&axes, t, 0)?;
        let exact = exact_on_grid(exact_dx, &axes, t);
        acc.add_samples(&exact, &approx);
    }
    acc.rms_ratio()
}

/// Solves a benchmark with the given discretization parameters.
pub fn solve_benchmark(
    bench: &PdeBenchmark,
    n_per_dim: usize,
    k: usize,
    delta: f64,
    quadrature: usize,
) -> Result<PdeSolution> {
    let basis = MuntzBasis::for_order(&bench.problem.leading_order, k, delta)?;
    solve_pde(
        &bench.problem,
        &basis,
        &SolveConfig::new(n_per_dim, quadrature),
    )
}

/// Quadrature order that resolves every mode at the given truncation.
pub fn quadrature_for(domain_dim: usize, n_per_dim: usize, requested: Option<usize>) -> usize {
    if let Some(q) = requested {
        return q;
    }
    let floor = if domain_dim == 1 { 64 } else { 32 };
    floor.max(n_per_dim + 16)
}

// ---------------------------------------------------------------------------
// Benchmark 2: single-harmonic subdiffusion, exact solution t^2 sin(pi x / L).
// ---------------------------------------------------------------------------

pub fn diffusion_single_harmonic(t_end: f64) -> Result<PdeBenchmark> {
    let length = 10.0;
    let kappa = 0.01;
    let order = OrderFunction::new(1, t_end, move |t| 0.8 + 0.2 * t / t_end)?;
    let forcing = {
        let order = order.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let fractional = caputo_power(2.0, &order, t).expect("t > 0 at sample points");
            (fractional + kappa * PI * PI * t * t / (length * length))
                * (PI * x[0] / length).sin()
        })
    };
    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::interval(length)?,
            t_end,
            leading_order: order,
            terms: vec![rhs_laplacian(kappa)],
            forcing,
            boundary: BoundarySpec::HomogeneousDirichlet,
            initial: vec![real_space_fn(|_| 0.0)],
        },
        exact: Arc::new(move |x, t| c(t * t * (PI * x[0] / length).sin())),
        exact_dx: None,
    })
}

// ---------------------------------------------------------------------------
// Benchmark 3: subdiffusion with cubic initial data, exact solution
// 10 x^2 (1 - x) (t + 1)^2.
// ---------------------------------------------------------------------------

pub fn diffusion_cubic_data(t_end: f64) -> Result<PdeBenchmark> {
    let order = OrderFunction::new(1, t_end, |t| (2.0 + t.sin()) / 4.0)?;
    let forcing = {
        let order = order.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let d2 = caputo_power(2.0, &order, t).expect("t > 0 at sample points");
            let d1 = caputo_power(1.0, &order, t).expect("t > 0 at sample points");
            let shape = 10.0 * x[0] * x[0] * (1.0 - x[0]);
            let tp1 = (t + 1.0) * (t + 1.0);
            shape * (d2 + 2.0 * d1) - 20.0 * (1.0 - 3.0 * x[0]) * tp1
        })
    };
    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::interval(1.0)?,
            t_end,
            leading_order: order,
            terms: vec![rhs_laplacian(1.0)],
            forcing,
            boundary: BoundarySpec::HomogeneousDirichlet,
            initial: vec![real_space_fn(|x| 10.0 * x[0] * x[0] * (1.0 - x[0]))],
        },
        exact: Arc::new(move |x, t| {
            c(10.0 * x[0] * x[0] * (1.0 - x[0]) * (t + 1.0) * (t + 1.0))
        }),
        exact_dx: None,
    })
}

// ---------------------------------------------------------------------------
// Benchmark 4: four-term wave-diffusion posed on [-1, 1] and shifted onto
// [0, 2]; exact solution [sech(x - 0.1) + sech(x + 0.1)] t^2.
// ---------------------------------------------------------------------------

pub fn multiterm_sech(t_end: f64) -> Result<PdeBenchmark> {
    let leading = OrderFunction::new(2, t_end, |t| 1.25 + t * t / 20.0)?;
    let lowers = [
        OrderFunction::new(2, t_end, |t| 1.2 + t.cos() / 20.0)?,
        OrderFunction::new(2, t_end, |t| 1.15 + t / 20.0)?,
        OrderFunction::new(2, t_end, |t| 1.1 + t.sin() / 20.0)?,
    ];

    let shape = |x: f64| 1.0 / (x - 0.1).cosh() + 1.0 / (x + 0.1).cosh();
    let shape_dd = |x: f64| {
        let part = |z: f64| {
            let s = 1.0 / z.cosh();
            s * (1.0 - 2.0 * s * s)
        };
        part(x - 0.1) + part(x + 0.1)
    };

    // Forcing stated in the original frame, relocated by the shift wrapper.
    let forcing_original = {
        let leading = leading.clone();
        let lowers = lowers.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let mut fractional = caputo_power(2.0, &leading, t).expect("t > 0");
            for order in &lowers {
                fractional += caputo_power(2.0, order, t).expect("t > 0");
            }
            shape(x[0]) * fractional - shape_dd(x[0]) * t * t
        })
    };
    let forcing = shift_space_time_fn(vec![-1.0], forcing_original);

    // The sech pair is symmetric about the origin, so both endpoints carry
    // the same trace.
    let endpoint = shape(-1.0);
    let profile = PowerProfile::monomial(2.0, c(endpoint))?;

    let terms = lowers
        .iter()
        .map(|order| PdeTerm {
            side: TermSide::LhsTime,
            order: Some(order.clone()),
            coefficient: const_time_fn(1.0),
            symbol: SpatialSymbol::Identity,
        })
        .chain([rhs_laplacian(1.0)])
        .collect();

    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::interval(2.0)?,
            t_end,
            leading_order: leading,
            terms,
            forcing,
            boundary: BoundarySpec::Dirichlet1d {
                left: profile.clone(),
                right: profile,
            },
            initial: vec![real_space_fn(|_| 0.0), real_space_fn(|_| 0.0)],
        },
        exact: Arc::new(move |x, t| c(shape(x[0] - 1.0) * t * t)),
        exact_dx: None,
    })
}

// ---------------------------------------------------------------------------
// Benchmark 5: Schrödinger-type equation sqrt(-1) D^alpha u + u_xx = f on
// [0, 2 pi]; exact solution t^2 (cos x + i sin x). Normalized by dividing
// through by the imaginary unit at ingestion.
// ---------------------------------------------------------------------------

/// Time-order choices for the Schrödinger benchmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchrodingerOrder {
    Constant(f64),
    /// alpha(t) = 4^(t-1)
    PowerOfFour,
    /// alpha(t) = e^t / 3
    ExpThird,
}

pub fn schrodinger(order_kind: SchrodingerOrder, t_end: f64) -> Result<PdeBenchmark> {
    let order = match order_kind {
        SchrodingerOrder::Constant(a) => OrderFunction::constant(a, t_end)?,
        SchrodingerOrder::PowerOfFour => {
            OrderFunction::new(1, t_end, |t| 4.0_f64.powf(t - 1.0))?
        }
        SchrodingerOrder::ExpThird => OrderFunction::new(1, t_end, |t| t.exp() / 3.0)?,
    };
    let length = 2.0 * PI;
    let i = Complex64::new(0.0, 1.0);

    // Original forcing of i D^alpha u + u_xx = f; the solver consumes -i f
    // after the equation is divided by i.
    let forcing = {
        let order = order.clone();
        space_time_fn(move |x: &[f64], t: f64| {
            let d = caputo_power(2.0, &order, t).expect("t > 0");
            let f = c(-d * x[0].sin() - t * t * x[0].cos())
                + i * c(d * x[0].cos() - t * t * x[0].sin());
            -i * f
        })
    };

    let profile = PowerProfile::monomial(2.0, c(1.0))?;
    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::interval(length)?,
            t_end,
            leading_order: order,
            terms: vec![PdeTerm {
                side: TermSide::RhsSpatial,
                order: None,
                coefficient: const_time_fn(i),
                symbol: SpatialSymbol::Laplacian,
            }],
            forcing,
            boundary: BoundarySpec::Dirichlet1d {
                left: profile.clone(),
                right: profile,
            },
            initial: vec![real_space_fn(|_| 0.0)],
        },
        exact: Arc::new(move |x, t| {
            Complex64::new(t * t * x[0].cos(), t * t * x[0].sin())
        }),
        exact_dx: None,
    })
}

// ---------------------------------------------------------------------------
// Benchmark 6: two-term wave-diffusion with a narrow Gaussian profile,
// exact solution t^2 e^{-100 (x - 0.2)^2}.
// ---------------------------------------------------------------------------

/// The two published order pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianOrderPair {
    /// alpha_1(t) = 1.6 + sin(t) / 5
    SineUpper,
    /// alpha_1(t) = 0.6 + cos(t) / 5
    CosineLower,
}

pub fn gaussian_profile(pair: GaussianOrderPair, t_end: f64) -> Result<PdeBenchmark> {
    let leading = OrderFunction::new(2, t_end, |t| 1.9 + t / 20.0)?;
    let lower = match pair {
        GaussianOrderPair::SineUpper => OrderFunction::new(2, t_end, |t| 1.6 + t.sin() / 5.0)?,
        GaussianOrderPair::CosineLower => {
            OrderFunction::new(1, t_end, |t| 0.6 + t.cos() / 5.0)?
        }
    };
    let bump = |x: f64| (-100.0 * (x - 0.2) * (x - 0.2)).exp();
    let bump_dd = move |x: f64| (-200.0 + 40_000.0 * (x - 0.2) * (x - 0.2)) * bump(x);

    let forcing = {
        let leading = leading.clone();
        let lower = lower.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let fractional =
                caputo_power(2.0, &leading, t).expect("t > 0") + caputo_power(2.0, &lower, t).expect("t > 0");
            bump(x[0]) * fractional - bump_dd(x[0]) * t * t
        })
    };

    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::interval(1.0)?,
            t_end,
            leading_order: leading,
            terms: vec![
                PdeTerm {
                    side: TermSide::LhsTime,
                    order: Some(lower),
                    coefficient: const_time_fn(1.0),
                    symbol: SpatialSymbol::Identity,
                },
                rhs_laplacian(1.0),
            ],
            forcing,
            boundary: BoundarySpec::Dirichlet1d {
                left: PowerProfile::monomial(2.0, c(bump(0.0)))?,
                right: PowerProfile::monomial(2.0, c(bump(1.0)))?,
            },
            initial: vec![real_space_fn(|_| 0.0), real_space_fn(|_| 0.0)],
        },
        exact: Arc::new(move |x, t| c(t * t * bump(x[0]))),
        exact_dx: None,
    })
}

// ---------------------------------------------------------------------------
// Benchmark 7: 2d damped wave-diffusion with a multiquadric boundary lift,
// exact solution t^3 e^{x1 + x2}.
// ---------------------------------------------------------------------------

pub fn damped_wave_2d(t_end: f64) -> Result<PdeBenchmark> {
    let leading = OrderFunction::new(2, t_end, |t| 1.85 + t.sin() / 20.0)?;
    let damping = OrderFunction::constant(1.0, t_end)?;
    let forcing = {
        let leading = leading.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let d = caputo_power(3.0, &leading, t).expect("t > 0");
            (d + 3.0 * t * t - 2.0 * t * t * t) * (x[0] + x[1]).exp()
        })
    };
    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::square(1.0)?,
            t_end,
            leading_order: leading,
            terms: vec![
                PdeTerm {
                    side: TermSide::LhsTime,
                    order: Some(damping),
                    coefficient: const_time_fn(1.0),
                    symbol: SpatialSymbol::Identity,
                },
                rhs_laplacian(1.0),
            ],
            forcing,
            boundary: BoundarySpec::Rbf2d {
                conditions: vec![RbfCondition {
                    kind: ConditionKind::Value,
                    datum: Arc::new(|x: &[f64]| {
                        PowerProfile::monomial(3.0, c((x[0] + x[1]).exp()))
                            .expect("valid profile")
                    }),
                }],
                c_mq: 4.0,
            },
            initial: vec![real_space_fn(|_| 0.0), real_space_fn(|_| 0.0)],
        },
        exact: Arc::new(move |x, t| c(t * t * t * (x[0] + x[1]).exp())),
        exact_dx: Some(Arc::new(move |x, t| {
            c(t * t * t * (x[0] + x[1]).exp())
        })),
    })
}

// ---------------------------------------------------------------------------
// Benchmark 8: 2d biharmonic wave-diffusion with value and Laplacian-trace
// boundary data, exact solution e^{x1 + x2} (t^{alpha_hat + 3} + t) with
// alpha_hat = 1.5.
// ---------------------------------------------------------------------------

pub const BIHARMONIC_ALPHA_HAT: f64 = 1.5;

pub fn biharmonic_2d(t_end: f64) -> Result<PdeBenchmark> {
    let leading = OrderFunction::new(2, t_end, |t| 1.4 + t / 10.0)?;
    let p_high = 3.0 + BIHARMONIC_ALPHA_HAT;
    let forcing = {
        let leading = leading.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let d = caputo_power(p_high, &leading, t).expect("t > 0");
            (d + 4.0 * t.powf(p_high) + 4.0 * t) * (x[0] + x[1]).exp()
        })
    };
    Ok(PdeBenchmark {
        problem: PdeProblem {
            domain: BoxDomain::square(1.0)?,
            t_end,
            leading_order: leading,
            terms: vec![PdeTerm {
                side: TermSide::RhsSpatial,
                order: None,
                coefficient: const_time_fn(-1.0),
                symbol: SpatialSymbol::Bilaplacian,
            }],
            forcing,
            boundary: BoundarySpec::Rbf2d {
                conditions: vec![
                    RbfCondition {
                        kind: ConditionKind::Value,
                        datum: Arc::new(move |x: &[f64]| {
                            let e = (x[0] + x[1]).exp();
                            PowerProfile::new([(p_high, c(e)), (1.0, c(e))])
                                .expect("valid profile")
                        }),
                    },
                    RbfCondition {
                        kind: ConditionKind::Laplacian,
                        datum: Arc::new(move |x: &[f64]| {
                            let e = 2.0 * (x[0] + x[1]).exp();
                            PowerProfile::new([(p_high, c(e)), (1.0, c(e))])
                                .expect("valid profile")
                        }),
                    },
                ],
                c_mq: 8.0,
            },
            initial: vec![
                real_space_fn(|_| 0.0),
                real_space_fn(|x| (x[0] + x[1]).exp()),
            ],
        },
        exact: Arc::new(move |x, t| {
            c((x[0] + x[1]).exp() * (t.powf(p_high) + t))
        }),
        exact_dx: None,
    })
}

/// Measures one solve into an [`ErrorReport`], with the imaginary part
/// reported separately when the benchmark's field is complex.
pub fn measure_pde(
    bench: &PdeBenchmark,
    sol: &PdeSolution,
    n: usize,
    k: usize,
    delta: f64,
    n_t: usize,
    k_t: usize,
) -> Result<crate::metrics::ErrorReport> {
    let (exact, approx) = final_time_fields(bench, sol, n_t)?;
    let complex_field = exact.iter().any(|v| v.im != 0.0);
    let (merr_value, merr_im) = if complex_field {
        let (re, im) = merr_parts(&exact, &approx);
        (re, Some(im))
    } else {
        (merr(&exact, &approx), None)
    };
    let rerr = pde_rerr(bench, sol, n_t, k_t)?;
    Ok(crate::metrics::ErrorReport {
        merr: merr_value,
        merr_im,
        rerr,
        ao: if k >= 2 {
            Some(crate::metrics::ao(rerr, k)?)
        } else {
            None
        },
        co: None,
        n_t,
        k_t,
        n,
        k,
        delta,
        t_end: sol.t_end,
    })
}

/// Spatial distribution of the final-time error for a 2d benchmark.
#[derive(Debug, Clone, Copy)]
pub struct RegionErrorStats {
    /// Maximum over the whole interior test grid.
    pub max_interior: f64,
    /// Maximum over the central quarter (both coordinates in the middle
    /// half of their range).
    pub max_central: f64,
    /// Maximum over a boundary-adjacent frame (either coordinate within a
    /// tenth of the side length of the boundary).
    pub max_frame: f64,
}

pub fn region_error_stats(
    bench: &PdeBenchmark,
    sol: &PdeSolution,
    n_t: usize,
) -> Result<RegionErrorStats> {
    let domain = &bench.problem.domain;
    if domain.dim() != 2 {
        return Err(Error::Validation(
            "region statistics are defined for 2d benchmarks".into(),
        ));
    }
    let axes = test_axes(domain, n_t);
    let t = sol.t_end;
    let approx = sol.eval_on_grid(&axes, t)?;
    let mut stats = RegionErrorStats {
        max_interior: 0.0,
        max_central: 0.0,
        max_frame: 0.0,
    };
    for (i1, &x1) in axes[0].iter().enumerate() {
        for (i2, &x2) in axes[1].iter().enumerate() {
            let err = ((bench.exact)(&[x1, x2], t) - approx[i1 * axes[1].len() + i2]).norm();
            stats.max_interior = stats.max_interior.max(err);
            let (l1, l2) = (domain.length(0), domain.length(1));
            let central = (0.25 * l1..=0.75 * l1).contains(&x1)
                && (0.25 * l2..=0.75 * l2).contains(&x2);
            let frame = x1 < 0.1 * l1 || x1 > 0.9 * l1 || x2 < 0.1 * l2 || x2 > 0.9 * l2;
            if central {
                stats.max_central = stats.max_central.max(err);
            }
            if frame {
                stats.max_frame = stats.max_frame.max(err);
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ode_benchmark_forcing_is_consistent_with_exact_solution() {
        // The assembled right-hand side must equal the operator applied to
        // the exact profile; spot-check the identity at a few times.
        let bench = ode_benchmark(1.0).unwrap();
        for &t in &[0.2, 0.6, 0.95] {
            let theta = (bench.problem.forcing)(t);
            let mut lhs =
                caputo_profile(&bench.exact, &bench.problem.leading_order, t).unwrap();
            for term in &bench.problem.lower_terms {
                lhs -= (term.coefficient)(t) * caputo_profile(&bench.exact, &term.order, t).unwrap();
            }
            lhs -= (bench.problem.reaction.as_ref().unwrap())(t) * bench.exact.eval(t);
            assert!((theta - lhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
        }
    }

    #[test]
    fn sech_benchmark_boundary_data_matches_exact_trace() {
        let bench = multiterm_sech(1.0).unwrap();
        let t = 0.7;
        for x in [0.0, 2.0] {
            let want = (bench.exact)(&[x], t);
            let got = match &bench.problem.boundary {
                BoundarySpec::Dirichlet1d { left, right } => {
                    if x == 0.0 {
                        left.eval(t)
                    } else {
                        right.eval(t)
                    }
                }
                _ => unreachable!(),
            };
            assert!((got - want).norm() < 1e-14 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn schrodinger_boundary_and_initial_data_match_exact_solution() {
        let bench = schrodinger(SchrodingerOrder::Constant(0.3), 1.0).unwrap();
        let ex = &bench.exact;
        assert!((ex(&[0.0], 0.5) - c(0.25)).norm() < 1e-15);
        assert!((ex(&[2.0 * PI], 0.5) - c(0.25)).norm() < 1e-12);
        assert!(ex(&[1.0], 0.0).norm() < 1e-15);
    }

    #[test]
    fn biharmonic_initial_velocity_matches_exact_derivative() {
        // d/dt [e^{x1+x2} (t^{4.5} + t)] at t = 0 is e^{x1+x2}.
        let bench = biharmonic_2d(1.0).unwrap();
        let x = [0.3, 0.8];
        let h = 1e-6;
        let fd = ((bench.exact)(&x, h) - (bench.exact)(&x, 0.0)) / h;
        let declared = (bench.problem.initial[1])(&x);
        assert!((fd - declared).norm() < 1e-4 * (1.0 + declared.norm()));
    }
}
