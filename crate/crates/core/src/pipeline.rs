//! Full PDE solves: validate the problem, absorb boundary data into a lift,
//! homogenize, split into independent per-mode fractional ODEs, solve each
//! with the Müntz collocation solver, and reassemble the field.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lift::{
    build_linear_lift_1d, build_rbf_lift, perimeter_centers, BoundarySample, ConditionKind,
    LiftFunction,
};
use crate::muntz::{
    gc_points, solve_votfode_on_grid, LowerTerm, MuntzBasis, TimeFn, VotfOdeProblem,
    VotfOdeSolution,
};
use crate::order::OrderFunction;
use crate::profile::PowerProfile;
use crate::spectral::{enumerate_modes, BoxDomain, ProjectionPlan, SineMode, SpatialSymbol};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Complex scalar field over space.
pub type SpaceFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
/// Complex scalar field over space and time.
pub type SpaceTimeFn = Arc<dyn Fn(&[f64], f64) -> Complex64 + Send + Sync>;

pub fn space_fn(f: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static) -> SpaceFn {
    Arc::new(f)
}

pub fn real_space_fn(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> SpaceFn {
    Arc::new(move |x| Complex64::new(f(x), 0.0))
}

pub fn space_time_fn(
    f: impl Fn(&[f64], f64) -> Complex64 + Send + Sync + 'static,
) -> SpaceTimeFn {
    Arc::new(f)
}

pub fn real_space_time_fn(
    f: impl Fn(&[f64], f64) -> f64 + Send + Sync + 'static,
) -> SpaceTimeFn {
    Arc::new(move |x, t| Complex64::new(f(x, t), 0.0))
}

/// Rewrites a spatial closure posed on a shifted box (origin at `offsets`)
/// into the solver's native frame with the origin at zero.
pub fn shift_space_fn(offsets: Vec<f64>, f: SpaceFn) -> SpaceFn {
    Arc::new(move |x| {
        let shifted: Vec<f64> = x.iter().zip(&offsets).map(|(a, b)| a + b).collect();
        f(&shifted)
    })
}

/// Space-time variant of [`shift_space_fn`].
pub fn shift_space_time_fn(offsets: Vec<f64>, f: SpaceTimeFn) -> SpaceTimeFn {
    Arc::new(move |x, t| {
        let shifted: Vec<f64> = x.iter().zip(&offsets).map(|(a, b)| a + b).collect();
        f(&shifted, t)
    })
}

/// Which side of the equation a term was written on.
///
/// Left-hand terms sit with the leading derivative
/// (`... + a(t) D^{alpha_i} u`); right-hand terms act through a spatial
/// operator (`... = a(t) D^{alpha_i} S u + f`). Ingestion keeps the side
/// explicit so all sign bookkeeping happens in one place when the per-mode
/// coefficients are formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermSide {
    LhsTime,
    RhsSpatial,
}

/// One term of the PDE beyond the leading fractional derivative.
///
/// `order` is `None` for terms with no time-fractional factor (a plain
/// diffusion or reaction term); those become zeroth-order couplings in the
/// mode equations.
#[derive(Clone)]
pub struct PdeTerm {
    pub side: TermSide,
    pub order: Option<OrderFunction>,
    pub coefficient: TimeFn,
    pub symbol: SpatialSymbol,
}

/// Time profile of a boundary datum at a boundary point.
pub type BoundaryDatumFn = Arc<dyn Fn(&[f64]) -> PowerProfile + Send + Sync>;

/// One boundary condition for a multiquadric lift.
#[derive(Clone)]
pub struct RbfCondition {
    pub kind: ConditionKind,
    pub datum: BoundaryDatumFn,
}

/// Boundary data for the solve.
///
/// Data must be separable into spatial snapshots with power-profile time
/// dependence: the homogenization step needs exact fractional derivatives of
/// the lift, which exist in closed form only for power profiles.
#[derive(Clone)]
pub enum BoundarySpec {
    HomogeneousDirichlet,
    /// Two-endpoint Dirichlet data on an interval.
    Dirichlet1d {
        left: PowerProfile,
        right: PowerProfile,
    },
    /// Dirichlet (and optionally Laplacian-trace) data on a 2d box fitted by
    /// multiquadric radial basis functions centered on the perimeter.
    Rbf2d {
        conditions: Vec<RbfCondition>,
        c_mq: f64,
    },
    /// Declared for completeness; the sine basis cannot satisfy Neumann
    /// data, so validation rejects it.
    Neumann,
}

/// A multi-term variable-order time-fractional PDE on a box.
#[derive(Clone)]
pub struct PdeProblem {
    pub domain: BoxDomain,
    pub t_end: f64,
    pub leading_order: OrderFunction,
    pub terms: Vec<PdeTerm>,
    pub forcing: SpaceTimeFn,
    pub boundary: BoundarySpec,
    pub initial: Vec<SpaceFn>,
}

impl PdeProblem {
    pub fn validate(&self) -> Result<()> {
        let m = self.leading_order.ceiling();
        if self.initial.len() != m as usize {
            return Err(Error::Validation(format!(
                "expected {m} initial fields for leading ceiling {m}, got {}",
                self.initial.len()
            )));
        }
        if !(self.t_end > 0.0 && self.t_end <= self.leading_order.domain_end()) {
            return Err(Error::Validation(format!(
                "horizon {} outside the leading order's domain (0, {}]",
                self.t_end,
                self.leading_order.domain_end()
            )));
        }
        for (i, term) in self.terms.iter().enumerate() {
            match (term.side, term.symbol) {
                (TermSide::LhsTime, SpatialSymbol::Identity) => {}
                (TermSide::LhsTime, _) => {
                    return Err(Error::Validation(format!(
                        "term {i}: left-hand time terms carry the identity symbol"
                    )));
                }
                (TermSide::RhsSpatial, SpatialSymbol::Identity) => {
                    return Err(Error::Validation(format!(
                        "term {i}: right-hand terms need a laplacian or bilaplacian symbol"
                    )));
                }
                (TermSide::RhsSpatial, _) => {}
            }
            if let Some(order) = &term.order {
                if order.ceiling() > m {
                    return Err(Error::Validation(format!(
                        "term {i} has ceiling {} above the leading ceiling {m}",
                        order.ceiling()
                    )));
                }
                if order.domain_end() < self.t_end {
                    return Err(Error::Validation(format!(
                        "term {i} order is only defined up to t = {}",
                        order.domain_end()
                    )));
                }
            }
        }
        match &self.boundary {
            BoundarySpec::HomogeneousDirichlet => {}
            BoundarySpec::Dirichlet1d { .. } => {
                if self.domain.dim() != 1 {
                    return Err(Error::Validation(
                        "two-endpoint Dirichlet data needs a 1d domain".into(),
                    ));
                }
            }
            BoundarySpec::Rbf2d { conditions, c_mq } => {
                if self.domain.dim() != 2 {
                    return Err(Error::Validation(
                        "multiquadric boundary fitting needs a 2d domain".into(),
                    ));
                }
                if conditions.is_empty() {
                    return Err(Error::Validation(
                        "multiquadric boundary data needs at least one condition".into(),
                    ));
                }
                if !(c_mq.is_finite() && *c_mq > 0.0) {
                    return Err(Error::Validation(format!(
                        "multiquadric shape parameter must be positive, got {c_mq}"
                    )));
                }
            }
            BoundarySpec::Neumann => {
                return Err(Error::Validation(
                    "Neumann data is not supported: sine modes cannot match normal \
                     derivatives on the boundary"
                        .into(),
                ));
            }
        }
        Ok(())
    }

    /// Builds the boundary lift for a given truncation level.
    pub fn build_lift(&self, n_per_dim: usize) -> Result<LiftFunction> {
        match &self.boundary {
            BoundarySpec::HomogeneousDirichlet => Ok(LiftFunction::zero()),
            BoundarySpec::Dirichlet1d { left, right } => {
                build_linear_lift_1d(left, right, &self.domain)
            }
            BoundarySpec::Rbf2d { conditions, c_mq } => {
                let n_side = n_per_dim.max(2);
                let centers = perimeter_centers(&self.domain, n_side)?;
                // Mixed value/Laplacian data uses the augmented kernel basis
                // (one extra family plus a constant), so the conditions are
                // collocated on the midpoint-refined perimeter to keep the
                // fit overdetermined; plain Dirichlet data is collocated at
                // the centers themselves.
                let mixed = conditions.iter().any(|c| c.kind == ConditionKind::Laplacian);
                let sample_points = if mixed {
                    perimeter_centers(&self.domain, 2 * n_side)?
                } else {
                    centers.clone()
                };
                let mut samples =
                    Vec::with_capacity(conditions.len() * sample_points.len());
                for condition in conditions {
                    for point in &sample_points {
                        samples.push(BoundarySample {
                            point: point.clone(),
                            kind: condition.kind,
                            datum: (condition.datum)(point),
                        });
                    }
                }
                build_rbf_lift(&samples, &centers, *c_mq, self.domain.dim())
            }
            BoundarySpec::Neumann => Err(Error::Validation(
                "Neumann data is not supported".into(),
            )),
        }
    }
}

/// Transformed forcing and initial data after subtracting the lift.
pub struct Homogenized {
    /// `Theta(x, t) = f - (operator applied to the lift)`.
    pub theta: SpaceTimeFn,
    /// `v_i(x) = h_i(x) - (d/dt)^i s(x, 0)`.
    pub initial: Vec<SpaceFn>,
}

fn nan_c() -> Complex64 {
    Complex64::new(f64::NAN, f64::NAN)
}

/// Subtracts the lift's image under the full operator from the forcing and
/// its initial traces from the initial data.
pub fn homogenize(problem: &PdeProblem, lift: &LiftFunction) -> Result<Homogenized> {
    problem.validate()?;
    let dim = problem.domain.dim();

    // Fail fast if any lift profile violates a power-rule precondition, so
    // the evaluation closures below cannot.
    lift.check_caputo_preconditions(&problem.leading_order)?;
    for term in &problem.terms {
        if let Some(order) = &term.order {
            lift.check_caputo_preconditions(order)?;
        }
    }

    let theta: SpaceTimeFn = {
        let lift = lift.clone();
        let leading = problem.leading_order.clone();
        let terms = problem.terms.clone();
        let forcing = problem.forcing.clone();
        Arc::new(move |x: &[f64], t: f64| {
            let mut value = forcing(x, t);
            if !lift.is_zero() {
                value -= lift
                    .caputo_term(&leading, SpatialSymbol::Identity, x, t, dim)
                    .unwrap_or_else(|_| nan_c());
                for term in &terms {
                    let a = (term.coefficient)(t);
                    let image = match &term.order {
                        Some(order) => lift
                            .caputo_term(order, term.symbol, x, t, dim)
                            .unwrap_or_else(|_| nan_c()),
                        None => lift.eval_symbol(term.symbol, x, t, dim),
                    };
                    match term.side {
                        TermSide::LhsTime => value -= a * image,
                        TermSide::RhsSpatial => value += a * image,
                    }
                }
            }
            value
        })
    };

    let m = problem.leading_order.ceiling();
    let mut initial = Vec::with_capacity(m as usize);
    for (i, h) in problem.initial.iter().enumerate() {
        let h = h.clone();
        if lift.is_zero() {
            initial.push(h);
            continue;
        }
        let coeffs = lift.time_derivative_at_zero(i as u32)?;
        let shapes = lift.shapes().to_vec();
        initial.push(space_fn(move |x: &[f64]| {
            let mut value = h(x);
            for (shape, c) in shapes.iter().zip(&coeffs) {
                value -= c * shape.eval(x);
            }
            value
        }) as SpaceFn);
    }

    Ok(Homogenized { theta, initial })
}

/// Shared cache of `Theta` samples on the quadrature grid, keyed by time.
/// Every mode projects against the same rows, so each collocation time is
/// sampled exactly once per solve.
struct ThetaSampleCache {
    plan: Arc<ProjectionPlan>,
    theta: SpaceTimeFn,
    rows: Mutex<HashMap<u64, Arc<Vec<Complex64>>>>,
}

impl ThetaSampleCache {
    fn row(&self, t: f64) -> Arc<Vec<Complex64>> {
        if let Some(row) = self.rows.lock().unwrap().get(&t.to_bits()) {
            return row.clone();
        }
        let theta = &self.theta;
        let samples = self
            .plan
            .sample(|x| Ok(theta(x, t)))
            .unwrap_or_else(|_| vec![nan_c(); self.plan.node_count()]);
        let row = Arc::new(samples);
        self.rows
            .lock()
            .unwrap()
            .entry(t.to_bits())
            .or_insert(row)
            .clone()
    }
}

/// The fractional ODE satisfied by one mode's coefficient function.
///
/// Left-hand time terms enter with negated coefficients, right-hand spatial
/// terms with their coefficient times the symbol eigenvalue; terms without a
/// fractional order combine into the zeroth-order reaction coefficient.
pub fn mode_problem(
    problem: &PdeProblem,
    homogenized: &Homogenized,
    mode: &SineMode,
    quadrature_order: usize,
) -> Result<VotfOdeProblem> {
    let plan = Arc::new(ProjectionPlan::new(
        &problem.domain,
        mode.indices().iter().copied().max().unwrap_or(1),
        quadrature_order,
    )?);
    let cache = Arc::new(ThetaSampleCache {
        plan: plan.clone(),
        theta: homogenized.theta.clone(),
        rows: Mutex::new(HashMap::new()),
    });
    mode_problem_cached(problem, homogenized, mode, &plan, &cache)
}

fn mode_problem_cached(
    problem: &PdeProblem,
    homogenized: &Homogenized,
    mode: &SineMode,
    plan: &Arc<ProjectionPlan>,
    cache: &Arc<ThetaSampleCache>,
) -> Result<VotfOdeProblem> {
    let mut lower_terms = Vec::new();
    let mut reaction_parts: Vec<TimeFn> = Vec::new();
    for term in &problem.terms {
        let lambda = term.symbol.eigenvalue(mode);
        let coefficient = term.coefficient.clone();
        let signed: TimeFn = match term.side {
            TermSide::LhsTime => Arc::new(move |t| -coefficient(t)),
            TermSide::RhsSpatial => Arc::new(move |t| coefficient(t) * lambda),
        };
        match &term.order {
            Some(order) => lower_terms.push(LowerTerm {
                order: order.clone(),
                coefficient: signed,
            }),
            None => reaction_parts.push(signed),
        }
    }
    let reaction: Option<TimeFn> = if reaction_parts.is_empty() {
        None
    } else {
        Some(Arc::new(move |t| {
            reaction_parts.iter().map(|p| p(t)).sum::<Complex64>()
        }))
    };

    let forcing: TimeFn = {
        let cache = cache.clone();
        let plan = plan.clone();
        let mode = mode.clone();
        Arc::new(move |t| plan.project(&cache.row(t), &mode))
    };

    let mut initial_values = Vec::with_capacity(homogenized.initial.len());
    for (i, v) in homogenized.initial.iter().enumerate() {
        let samples = plan.sample(|x| Ok(v(x))).map_err(|e| match e {
            Error::Numerical(msg) => Error::Numerical(format!(
                "initial field {i}, mode {:?}: {msg}",
                mode.indices()
            )),
            other => other,
        })?;
        initial_values.push(plan.project(&samples, mode));
    }

    Ok(VotfOdeProblem {
        leading_order: problem.leading_order.clone(),
        lower_terms,
        reaction,
        forcing,
        initial_values,
        t_end: problem.t_end,
    })
}

/// Solver configuration knobs.
#[derive(Debug, Clone)]
pub struct SolveConfig {
    /// Modes per spatial dimension.
    pub n_per_dim: usize,
    /// Gauss-Legendre order per dimension for projections.
    pub quadrature_order: usize,
    /// Collocation point count; defaults to twice the basis size.
    pub collocation_count: Option<usize>,
}

impl SolveConfig {
    pub fn new(n_per_dim: usize, quadrature_order: usize) -> Self {
        Self {
            n_per_dim,
            quadrature_order,
            collocation_count: None,
        }
    }
}

/// Per-solve diagnostics.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    pub n_per_dim: usize,
    pub quadrature_order: usize,
    pub basis_count: usize,
    pub basis_delta: f64,
    pub max_mode_residual: f64,
    pub ill_conditioned_modes: usize,
    pub lift_fit_residual: f64,
}

/// Assembled solution: lift plus per-mode fractional ODE solutions.
#[derive(Clone)]
pub struct PdeSolution {
    pub lift: LiftFunction,
    pub modes: Vec<(SineMode, VotfOdeSolution)>,
    pub domain: BoxDomain,
    pub t_end: f64,
    pub diagnostics: SolveDiagnostics,
}

/// Solves the PDE, running independent mode solves in parallel when the
/// `parallel` feature is enabled (results are identical to the sequential
/// path; modes never interact).
pub fn solve_pde(
    problem: &PdeProblem,
    basis: &MuntzBasis,
    config: &SolveConfig,
) -> Result<PdeSolution> {
    solve_pde_impl(problem, basis, config, cfg!(feature = "parallel"))
}

/// Sequential mode loop regardless of features, for benchmarking and for
/// schedule-independence checks.
pub fn solve_pde_serial(
    problem: &PdeProblem,
    basis: &MuntzBasis,
    config: &SolveConfig,
) -> Result<PdeSolution> {
    solve_pde_impl(problem, basis, config, false)
}

fn solve_pde_impl(
    problem: &PdeProblem,
    basis: &MuntzBasis,
    config: &SolveConfig,
    parallel: bool,
) -> Result<PdeSolution> {
    problem.validate()?;
    if basis.alpha0() != problem.leading_order.ceiling() as f64 {
        return Err(Error::Validation(format!(
            "basis offset {} must equal the leading ceiling {}",
            basis.alpha0(),
            problem.leading_order.ceiling()
        )));
    }
    if (basis.t_end() - problem.t_end).abs() > 1e-12 * problem.t_end {
        return Err(Error::Validation(format!(
            "basis horizon {} does not match the problem horizon {}",
            basis.t_end(),
            problem.t_end
        )));
    }

    let lift = problem.build_lift(config.n_per_dim)?;
    let homogenized = homogenize(problem, &lift)?;
    let plan = Arc::new(ProjectionPlan::new(
        &problem.domain,
        config.n_per_dim,
        config.quadrature_order,
    )?);
    let cache = Arc::new(ThetaSampleCache {
        plan: plan.clone(),
        theta: homogenized.theta.clone(),
        rows: Mutex::new(HashMap::new()),
    });
    let n_c = config.collocation_count.unwrap_or(2 * basis.count());
    let grid = gc_points(n_c, problem.t_end)?;

    // Warm the cache sequentially so parallel workers only read.
    for &t in grid.points() {
        cache.row(t);
    }

    let modes = enumerate_modes(&problem.domain, config.n_per_dim)?;
    let solve_one = |mode: &SineMode| -> Result<(SineMode, VotfOdeSolution)> {
        let ode = mode_problem_cached(problem, &homogenized, mode, &plan, &cache)?;
        let solution = solve_votfode_on_grid(&ode, basis, &grid).map_err(|e| match e {
            Error::Numerical(msg) => {
                Error::Numerical(format!("mode {:?}: {msg}", mode.indices()))
            }
            Error::Domain(msg) => Error::Domain(format!("mode {:?}: {msg}", mode.indices())),
            other => other,
        })?;
        Ok((mode.clone(), solution))
    };

    let solved: Result<Vec<_>> = if parallel {
        #[cfg(feature = "parallel")]
        {
            modes.par_iter().map(solve_one).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            modes.iter().map(solve_one).collect()
        }
    } else {
        modes.iter().map(solve_one).collect()
    };
    let solved = solved?;

    let max_mode_residual = solved
        .iter()
        .map(|(_, s)| s.residual_norm)
        .fold(0.0_f64, f64::max);
    let ill_conditioned_modes = solved.iter().filter(|(_, s)| s.ill_conditioned).count();
    Ok(PdeSolution {
        diagnostics: SolveDiagnostics {
            n_per_dim: config.n_per_dim,
            quadrature_order: config.quadrature_order,
            basis_count: basis.count(),
            basis_delta: basis.delta(),
            max_mode_residual,
            ill_conditioned_modes,
            lift_fit_residual: lift.fit_residual(),
        },
        lift,
        modes: solved,
        domain: problem.domain.clone(),
        t_end: problem.t_end,
    })
}

impl PdeSolution {
    fn check_point(&self, x: &[f64], t: f64) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::Domain(format!(
                "point {x:?} outside the domain {:?}",
                self.domain.lengths()
            )));
        }
        if !(0.0..=self.t_end).contains(&t) {
            return Err(Error::Domain(format!(
                "time {t} outside [0, {}]",
                self.t_end
            )));
        }
        Ok(())
    }

    /// `u(x, t) = s(x, t) + sum_modes w(t) prod_i sin(n_i pi x_i / L_i)`.
    pub fn eval(&self, x: &[f64], t: f64) -> Result<Complex64> {
        self.check_point(x, t)?;
        let mut acc = self.lift.eval(x, t);
        for (mode, sol) in &self.modes {
            acc += sol.eval(t)? * mode.eval(x);
        }
        Ok(acc)
    }

    /// Spatial partial derivative along `axis`.
    pub fn eval_gradient(&self, x: &[f64], t: f64, axis: usize) -> Result<Complex64> {
        self.check_point(x, t)?;
        let mut acc = self.lift.gradient(x, t, axis);
        for (mode, sol) in &self.modes {
            acc += sol.eval(t)? * mode.eval_derivative(x, axis);
        }
        Ok(acc)
    }

    /// Mode coefficient values at time `t`, in mode enumeration order.
    pub fn mode_values(&self, t: f64) -> Result<Vec<Complex64>> {
        self.modes.iter().map(|(_, s)| s.eval(t)).collect()
    }

    /// Evaluates the field on a tensor grid (row-major over axes) using
    /// per-axis sine tables; equivalent to calling [`PdeSolution::eval`]
    /// pointwise but far cheaper for dense grids.
    pub fn eval_on_grid(&self, axes: &[Vec<f64>], t: f64) -> Result<Vec<Complex64>> {
        self.eval_grid_impl(axes, t, None)
    }

    /// Gradient variant of [`PdeSolution::eval_on_grid`].
    pub fn eval_gradient_on_grid(
        &self,
        axes: &[Vec<f64>],
        t: f64,
        axis: usize,
    ) -> Result<Vec<Complex64>> {
        self.eval_grid_impl(axes, t, Some(axis))
    }

    fn eval_grid_impl(
        &self,
        axes: &[Vec<f64>],
        t: f64,
        gradient_axis: Option<usize>,
    ) -> Result<Vec<Complex64>> {
        let dim = self.domain.dim();
        if axes.len() != dim {
            return Err(Error::Domain(format!(
                "expected {dim} coordinate axes, got {}",
                axes.len()
            )));
        }
        for (a, xs) in axes.iter().enumerate() {
            for &x in xs {
                if !(0.0..=self.domain.length(a)).contains(&x) {
                    return Err(Error::Domain(format!(
                        "grid coordinate {x} outside [0, {}] on axis {a}",
                        self.domain.length(a)
                    )));
                }
            }
        }
        let w = self.mode_values(t)?;
        let n = self
            .modes
            .iter()
            .map(|(m, _)| m.indices().iter().copied().max().unwrap_or(1))
            .max()
            .unwrap_or(1);

        // Per-axis factor tables: factor[axis][(k - 1) * len + i].
        let mut tables: Vec<Vec<f64>> = Vec::with_capacity(dim);
        for (a, xs) in axes.iter().enumerate() {
            let length = self.domain.length(a);
            let mut table = vec![0.0; n * xs.len()];
            for k in 1..=n {
                let wave = k as f64 * std::f64::consts::PI / length;
                for (i, &x) in xs.iter().enumerate() {
                    table[(k - 1) * xs.len() + i] = if gradient_axis == Some(a) {
                        wave * (wave * x).cos()
                    } else {
                        (wave * x).sin()
                    };
                }
            }
            tables.push(table);
        }

        match dim {
            1 => {
                let xs = &axes[0];
                let mut out = Vec::with_capacity(xs.len());
                for (i, &x) in xs.iter().enumerate() {
                    let mut acc = match gradient_axis {
                        Some(axis) => self.lift.gradient(&[x], t, axis),
                        None => self.lift.eval(&[x], t),
                    };
                    for ((mode, _), wv) in self.modes.iter().zip(&w) {
                        let k = mode.indices()[0];
                        acc += wv * tables[0][(k - 1) * xs.len() + i];
                    }
                    out.push(acc);
                }
                Ok(out)
            }
            2 => {
                let (xs1, xs2) = (&axes[0], &axes[1]);
                let (g1, g2) = (xs1.len(), xs2.len());
                // Contract the second axis first: partial[(k1 - 1) * g2 + i2].
                let mut partial = vec![Complex64::new(0.0, 0.0); n * g2];
                for ((mode, _), wv) in self.modes.iter().zip(&w) {
                    let (k1, k2) = (mode.indices()[0], mode.indices()[1]);
                    for i2 in 0..g2 {
                        partial[(k1 - 1) * g2 + i2] += wv * tables[1][(k2 - 1) * g2 + i2];
                    }
                }
                let mut out = vec![Complex64::new(0.0, 0.0); g1 * g2];
                for i1 in 0..g1 {
                    for i2 in 0..g2 {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k1 in 1..=n {
                            acc += partial[(k1 - 1) * g2 + i2] * tables[0][(k1 - 1) * g1 + i1];
                        }
                        let x = [xs1[i1], xs2[i2]];
                        acc += match gradient_axis {
                            Some(axis) => self.lift.gradient(&x, t, axis),
                            None => self.lift.eval(&x, t),
                        };
                        out[i1 * g2 + i2] = acc;
                    }
                }
                Ok(out)
            }
            _ => unreachable!(),
        }
    }
}
