//! Semi-analytical solver for multi-term variable-order time-fractional
//! PDEs on boxes.
//!
//! The scheme separates space and time: inhomogeneous boundary data is
//! absorbed by a lift (linear in 1d, multiquadric RBF in 2d), the remainder
//! is expanded in a sine series, and each mode's coefficient function solves
//! an independent multi-term variable-order fractional ODE. Those ODEs are
//! solved by backward substitution over a Müntz power basis, whose
//! variable-order Caputo images are known in closed form, with coefficients
//! fitted by least squares at Gauss-Chebyshev collocation points.
//!
//! Modules:
//! - [`gamma`], [`order`], [`profile`]: variable-order Caputo calculus over
//!   power profiles.
//! - [`muntz`]: the fractional-ODE collocation solver.
//! - [`quadrature`], [`spectral`], [`lift`]: sine modes, projections and
//!   boundary lifting.
//! - [`pipeline`]: the full PDE solve.
//! - [`oracle`]: an independent L1 finite-difference reference solver for
//!   subdiffusion problems.

pub mod error;
pub mod gamma;
pub mod lift;
pub mod linalg;
pub mod muntz;
pub mod oracle;
pub mod order;
pub mod pipeline;
pub mod profile;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use gamma::gamma;
pub use lift::{
    build_linear_lift_1d, build_rbf_lift, perimeter_centers, BoundarySample, ConditionKind,
    LiftFunction, LiftKind, LiftShape,
};
pub use muntz::{
    gc_points, homogeneous_part, solve_votfode, solve_votfode_on_grid, CollocationGrid,
    LowerTerm, MuntzBasis, TimeFn, VotfOdeProblem, VotfOdeSolution, DEFAULT_DELTA,
};
pub use order::OrderFunction;
pub use pipeline::{
    homogenize, mode_problem, solve_pde, solve_pde_serial, BoundarySpec, PdeProblem, PdeSolution,
    PdeTerm, RbfCondition, SolveConfig, SpaceFn, SpaceTimeFn, TermSide,
};
pub use profile::{caputo_power, caputo_profile, derivative_profile, PowerProfile, PowerTerm};
pub use spectral::{
    enumerate_modes, project_onto_mode, BoxDomain, ProjectionPlan, SineMode, SpatialSymbol,
};

pub use num_complex::Complex64;
