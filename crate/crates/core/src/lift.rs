//! Boundary lifting: auxiliary fields `s(x, t) = sum_i psi_i(x) gamma_i(t)`
//! that absorb inhomogeneous boundary data so the remainder satisfies
//! homogeneous Dirichlet conditions compatible with the sine basis.
//!
//! Time factors are [`PowerProfile`]s, so every fractional derivative of the
//! lift needed during homogenization is available in closed form. Spatial
//! shapes are either endpoint ramps (1d) or multiquadric radial kernels (2d),
//! both with closed-form Laplacian, bilaplacian and gradient.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lstsq_multi, CMatrix};
use crate::order::OrderFunction;
use crate::profile::{caputo_profile, derivative_profile, PowerProfile};
use crate::spectral::{BoxDomain, SpatialSymbol};

/// A spatial shape with closed-form images under the supported symbols.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftShape {
    /// `x / L` on an interval of length `L`.
    RampUp { length: f64 },
    /// `1 - x / L` on an interval of length `L`.
    RampDown { length: f64 },
    /// `sqrt(|x - center|^2 + c^2)`.
    Multiquadric { center: Vec<f64>, c: f64 },
    /// The multiquadric potential: the radial function whose 2d Laplacian is
    /// the multiquadric kernel, centered to vanish at the origin:
    ///
    /// ```text
    /// chi(r) = s^3/9 + c^2 s/3 - (c^3/3) ln(s + c) - chi(0),  s = sqrt(r^2 + c^2)
    /// ```
    ///
    /// Evaluated through differences like `s^3 - c^3 = r^2 (s^2 + s c + c^2) / (s + c)`
    /// so the centering never cancels catastrophically for flat kernels.
    MultiquadricPotential { center: Vec<f64>, c: f64 },
    /// Real or imaginary part of `((x1 - cx) + i (x2 - cy))^k / scale^k`,
    /// harmonic by construction.
    Harmonic {
        degree: u32,
        imaginary: bool,
        center: Vec<f64>,
        scale: f64,
    },
    /// `|x - center|^2 H / (4 (k + 1))` for the harmonic `H` of the same
    /// parameters: its 2d Laplacian is `H` (by Euler's identity for the
    /// homogeneous `H`) and its bilaplacian vanishes. Degree 0 is the
    /// paraboloid `|x - center|^2 / 4` with unit Laplacian.
    BiharmonicPoly {
        degree: u32,
        imaginary: bool,
        center: Vec<f64>,
        scale: f64,
    },
}

fn mq_potential_centered(r_sqr: f64, c: f64) -> f64 {
    let s = (r_sqr + c * c).sqrt();
    let s_plus_c = s + c;
    // (s^3 - c^3)/9 + c^2 (s - c)/3 - (c^3/3) ln((s + c)/(2c)), each piece
    // written with the O(r^2) difference made explicit.
    r_sqr * (s * s + s * c + c * c) / (9.0 * s_plus_c) + c * c * r_sqr / (3.0 * s_plus_c)
        - c * c * c / 3.0 * (r_sqr / (2.0 * c * s_plus_c)).ln_1p()
}

impl LiftShape {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            LiftShape::RampUp { length } => x[0] / length,
            LiftShape::RampDown { length } => 1.0 - x[0] / length,
            LiftShape::Multiquadric { center, c } => (dist_sqr(x, center) + c * c).sqrt(),
            LiftShape::MultiquadricPotential { center, c } => {
                mq_potential_centered(dist_sqr(x, center), *c)
            }
            LiftShape::Harmonic {
                degree,
                imaginary,
                center,
                scale,
            } => harmonic_parts(x, center, *scale, *degree).pick(*imaginary),
            LiftShape::BiharmonicPoly {
                degree,
                imaginary,
                center,
                scale,
            } => {
                dist_sqr(x, center) * harmonic_parts(x, center, *scale, *degree).pick(*imaginary)
                    / (4.0 * (*degree as f64 + 1.0))
            }
        }
    }

    /// Laplacian in `dim` spatial dimensions.
    pub fn laplacian(&self, x: &[f64], dim: usize) -> f64 {
        match self {
            LiftShape::RampUp { .. } | LiftShape::RampDown { .. } | LiftShape::Harmonic { .. } => {
                0.0
            }
            LiftShape::Multiquadric { center, c } => {
                let q = dist_sqr(x, center) + c * c;
                ((dim as f64 - 1.0) * q + c * c) / (q * q.sqrt())
            }
            LiftShape::MultiquadricPotential { center, c } => {
                debug_assert_eq!(dim, 2, "potential kernel is the 2d antiderivative");
                (dist_sqr(x, center) + c * c).sqrt()
            }
            LiftShape::BiharmonicPoly {
                degree,
                imaginary,
                center,
                scale,
            } => {
                debug_assert_eq!(dim, 2, "biharmonic polynomials normalized for 2d");
                harmonic_parts(x, center, *scale, *degree).pick(*imaginary)
            }
        }
    }

    /// Bilaplacian; the multiquadric kernels implement the 2d forms.
    pub fn bilaplacian(&self, x: &[f64], dim: usize) -> f64 {
        match self {
            LiftShape::RampUp { .. }
            | LiftShape::RampDown { .. }
            | LiftShape::BiharmonicPoly { .. }
            | LiftShape::Harmonic { .. } => 0.0,
            LiftShape::Multiquadric { center, c } => {
                debug_assert_eq!(dim, 2, "multiquadric bilaplacian implemented for 2d");
                let c2 = c * c;
                let q = dist_sqr(x, center) + c2;
                let q3 = q * q * q;
                (q * q + 6.0 * c2 * q - 15.0 * c2 * c2) / (q3 * q.sqrt())
            }
            LiftShape::MultiquadricPotential { center, c } => {
                // Delta^2 chi = Delta psi.
                let q = dist_sqr(x, center) + c * c;
                (q + c * c) / (q * q.sqrt())
            }
        }
    }

    pub fn gradient(&self, x: &[f64], axis: usize) -> f64 {
        match self {
            LiftShape::RampUp { length } => {
                if axis == 0 {
                    1.0 / length
                } else {
                    0.0
                }
            }
            LiftShape::RampDown { length } => {
                if axis == 0 {
                    -1.0 / length
                } else {
                    0.0
                }
            }
            LiftShape::Multiquadric { center, c } => {
                let q = dist_sqr(x, center) + c * c;
                (x[axis] - center[axis]) / q.sqrt()
            }
            LiftShape::MultiquadricPotential { center, c } => {
                // chi'(r)/r = (s^3 - c^3)/(3 r^2) = (s^2 + s c + c^2)/(3 (s + c)),
                // which is regular through r = 0 (limit c/2).
                let s = (dist_sqr(x, center) + c * c).sqrt();
                (s * s + s * c + c * c) / (3.0 * (s + c)) * (x[axis] - center[axis])
            }
            LiftShape::Harmonic {
                degree,
                imaginary,
                center,
                scale,
            } => harmonic_gradient(x, center, *scale, *degree, *imaginary, axis),
            LiftShape::BiharmonicPoly {
                degree,
                imaginary,
                center,
                scale,
            } => {
                let h = harmonic_parts(x, center, *scale, *degree).pick(*imaginary);
                let dh = harmonic_gradient(x, center, *scale, *degree, *imaginary, axis);
                (2.0 * (x[axis] - center[axis]) * h + dist_sqr(x, center) * dh)
                    / (4.0 * (*degree as f64 + 1.0))
            }
        }
    }

    pub fn apply_symbol(&self, symbol: SpatialSymbol, x: &[f64], dim: usize) -> f64 {
        match symbol {
            SpatialSymbol::Identity => self.eval(x),
            SpatialSymbol::Laplacian => self.laplacian(x, dim),
            SpatialSymbol::Bilaplacian => self.bilaplacian(x, dim),
        }
    }
}

fn dist_sqr(x: &[f64], center: &[f64]) -> f64 {
    x.iter()
        .zip(center)
        .map(|(a, b)| (a - b) * (a - b))
        .sum()
}

struct HarmonicParts {
    re: f64,
    im: f64,
}

impl HarmonicParts {
    fn pick(&self, imaginary: bool) -> f64 {
        if imaginary {
            self.im
        } else {
            self.re
        }
    }
}

/// Real and imaginary parts of `((x1 - cx) + i (x2 - cy))^k / scale^k`.
fn harmonic_parts(x: &[f64], center: &[f64], scale: f64, degree: u32) -> HarmonicParts {
    let zr = (x[0] - center[0]) / scale;
    let zi = (x[1] - center[1]) / scale;
    let mut re = 1.0;
    let mut im = 0.0;
    for _ in 0..degree {
        let nr = re * zr - im * zi;
        im = re * zi + im * zr;
        re = nr;
    }
    HarmonicParts { re, im }
}

/// `d/dx_axis` of the scaled harmonic: `d z^k = k z^{k-1} dz` with
/// `dz/dx1 = 1` and `dz/dx2 = i`.
fn harmonic_gradient(
    x: &[f64],
    center: &[f64],
    scale: f64,
    degree: u32,
    imaginary: bool,
    axis: usize,
) -> f64 {
    if degree == 0 {
        return 0.0;
    }
    let lower = harmonic_parts(x, center, scale, degree - 1);
    let k = degree as f64 / scale;
    match (axis, imaginary) {
        (0, false) => k * lower.re,
        (0, true) => k * lower.im,
        (1, false) => -k * lower.im,
        (1, true) => k * lower.re,
        _ => 0.0,
    }
}

/// How a lift was constructed, plus its fit quality.
#[derive(Debug, Clone, PartialEq)]
pub enum LiftKind {
    Zero,
    Linear1d,
    MqRbf { c_mq: f64, centers: usize },
}

/// A separable boundary lift with power-profile time factors.
#[derive(Debug, Clone)]
pub struct LiftFunction {
    shapes: Vec<LiftShape>,
    time_profiles: Vec<PowerProfile>,
    kind: LiftKind,
    fit_residual: f64,
    ill_conditioned: bool,
}

impl LiftFunction {
    pub fn zero() -> Self {
        Self {
            shapes: Vec::new(),
            time_profiles: Vec::new(),
            kind: LiftKind::Zero,
            fit_residual: 0.0,
            ill_conditioned: false,
        }
    }

    pub fn kind(&self) -> &LiftKind {
        &self.kind
    }

    /// Residual of the boundary fit recorded at construction.
    pub fn fit_residual(&self) -> f64 {
        self.fit_residual
    }

    pub fn ill_conditioned(&self) -> bool {
        self.ill_conditioned
    }

    pub fn shapes(&self) -> &[LiftShape] {
        &self.shapes
    }

    pub fn time_profiles(&self) -> &[PowerProfile] {
        &self.time_profiles
    }

    pub fn is_zero(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn eval(&self, x: &[f64], t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (shape, profile) in self.shapes.iter().zip(&self.time_profiles) {
            acc += profile.eval(t) * shape.eval(x);
        }
        acc
    }

    /// `sum_i (symbol psi_i)(x) gamma_i(t)`.
    pub fn eval_symbol(&self, symbol: SpatialSymbol, x: &[f64], t: f64, dim: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (shape, profile) in self.shapes.iter().zip(&self.time_profiles) {
            acc += profile.eval(t) * shape.apply_symbol(symbol, x, dim);
        }
        acc
    }

    /// Spatial gradient along one axis.
    pub fn gradient(&self, x: &[f64], t: f64, axis: usize) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (shape, profile) in self.shapes.iter().zip(&self.time_profiles) {
            acc += profile.eval(t) * shape.gradient(x, axis);
        }
        acc
    }

    /// `sum_i (symbol psi_i)(x) D^{alpha(t)} gamma_i (t)`: the lift's
    /// contribution to one operator term during homogenization.
    pub fn caputo_term(
        &self,
        order: &OrderFunction,
        symbol: SpatialSymbol,
        x: &[f64],
        t: f64,
        dim: usize,
    ) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, (shape, profile)) in self.shapes.iter().zip(&self.time_profiles).enumerate() {
            let d = caputo_profile(profile, order, t).map_err(|e| match e {
                Error::Domain(msg) => Error::Domain(format!("lift profile {i}: {msg}")),
                other => other,
            })?;
            acc += d * shape.apply_symbol(symbol, x, dim);
        }
        Ok(acc)
    }

    /// Coefficients of the k-th time derivative at `t = 0`, one per shape.
    pub fn time_derivative_at_zero(&self, k: u32) -> Result<Vec<Complex64>> {
        self.time_profiles
            .iter()
            .enumerate()
            .map(|(i, profile)| {
                derivative_profile(profile, k)
                    .map(|d| d.eval(0.0))
                    .map_err(|e| match e {
                        Error::UnsupportedExponent { exponent, .. } => Error::Validation(format!(
                            "lift profile {i} has exponent {exponent} with unbounded \
                             derivative {k} at t = 0"
                        )),
                        other => other,
                    })
            })
            .collect()
    }

    /// Checks every profile against the power-rule preconditions of an order
    /// so later pointwise evaluation cannot fail.
    pub fn check_caputo_preconditions(&self, order: &OrderFunction) -> Result<()> {
        let probe = 0.5 * order.domain_end();
        for (i, profile) in self.time_profiles.iter().enumerate() {
            caputo_profile(profile, order, probe).map_err(|e| match e {
                Error::UnsupportedExponent { exponent, ceiling } => Error::Validation(format!(
                    "lift profile {i} has exponent {exponent} outside the power rule's \
                     domain for ceiling {ceiling}"
                )),
                other => other,
            })?;
        }
        Ok(())
    }
}

/// Lift for two-endpoint Dirichlet data on an interval:
/// `s(x, t) = g_left(t) (1 - x/L) + g_right(t) (x/L)`.
///
/// Matches the boundary profiles exactly at both endpoints (the ramps are 0
/// and 1 there by construction) and has zero Laplacian.
pub fn build_linear_lift_1d(
    g_left: &PowerProfile,
    g_right: &PowerProfile,
    domain: &BoxDomain,
) -> Result<LiftFunction> {
    if domain.dim() != 1 {
        return Err(Error::Validation(
            "linear lifts are defined on intervals".into(),
        ));
    }
    if g_left.is_zero() && g_right.is_zero() {
        return Ok(LiftFunction::zero());
    }
    let length = domain.length(0);
    Ok(LiftFunction {
        shapes: vec![
            LiftShape::RampDown { length },
            LiftShape::RampUp { length },
        ],
        time_profiles: vec![g_left.clone(), g_right.clone()],
        kind: LiftKind::Linear1d,
        fit_residual: 0.0,
        ill_conditioned: false,
    })
}

/// Which trace a boundary condition constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditionKind {
    /// `s = datum` on the boundary.
    Value,
    /// `laplacian(s) = datum` on the boundary.
    Laplacian,
}

/// One boundary collocation equation: at `point`, the `kind` trace of the
/// lift must match the power profile `datum`.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    pub point: Vec<f64>,
    pub kind: ConditionKind,
    pub datum: PowerProfile,
}

/// Fits a multiquadric lift to boundary samples, one least-squares solve per
/// power exponent appearing in the data (each fitting matrix is time
/// independent, so it is factored once and reused across exponents).
///
/// Value-only data uses one multiquadric kernel per center,
/// `s(x,t) = sum_i psi(|x - s_i|) gamma_i(t)`. When Laplacian-trace
/// conditions are present as well, a single kernel family cannot carry both
/// traces (the Laplacian of a flat kernel is nearly constant), so the fit is
/// staged: the Laplacian trace is matched first by potential kernels and a
/// paraboloid, whose Laplacians are the multiquadrics and the constant; the
/// remaining value trace is then matched by harmonic polynomials, which
/// cannot disturb the Laplacian trace.
///
/// Exponent sets of different samples are unioned; a sample missing an
/// exponent contributes a zero right-hand side for it.
pub fn build_rbf_lift(
    samples: &[BoundarySample],
    centers: &[Vec<f64>],
    c_mq: f64,
    dim: usize,
) -> Result<LiftFunction> {
    if centers.is_empty() {
        return Err(Error::Validation("RBF lift needs at least one center".into()));
    }
    if !(c_mq.is_finite() && c_mq > 0.0) {
        return Err(Error::Validation(format!(
            "multiquadric shape parameter must be positive, got {c_mq}"
        )));
    }
    let exponents = PowerProfile::exponent_union(samples.iter().map(|s| &s.datum));
    if exponents.is_empty() {
        return Ok(LiftFunction::zero());
    }
    let mixed = samples.iter().any(|s| s.kind == ConditionKind::Laplacian);
    if mixed {
        build_staged_lift(samples, centers, c_mq, dim, &exponents)
    } else {
        build_value_lift(samples, centers, c_mq, &exponents)
    }
}

/// Per-shape rows of (exponent, coefficient) pairs from a multi-exponent fit.
type CoefficientRows = Vec<Vec<(f64, Complex64)>>;

/// Solves one least-squares system per exponent against the given samples'
/// datum coefficients and appends the solutions to the running profiles.
fn fit_exponents(
    a: &CMatrix,
    samples: &[BoundarySample],
    exponents: &[f64],
) -> Result<(CoefficientRows, f64, bool)> {
    let rhs: Vec<Vec<Complex64>> = exponents
        .iter()
        .map(|&p| samples.iter().map(|s| s.datum.coefficient_of(p)).collect())
        .collect();
    let fits = lstsq_multi(a, &rhs)?;
    let mut coefficient_rows = vec![Vec::new(); a.ncols()];
    let mut fit_residual = 0.0_f64;
    let mut ill_conditioned = false;
    for (fit, &p) in fits.iter().zip(exponents) {
        fit_residual = fit_residual.max(fit.residual_norm);
        ill_conditioned |= fit.ill_conditioned;
        for (i, gamma) in fit.solution.iter().enumerate() {
            coefficient_rows[i].push((p, *gamma));
        }
    }
    Ok((coefficient_rows, fit_residual, ill_conditioned))
}

fn build_value_lift(
    samples: &[BoundarySample],
    centers: &[Vec<f64>],
    c_mq: f64,
    exponents: &[f64],
) -> Result<LiftFunction> {
    if samples.len() < centers.len() {
        return Err(Error::Validation(format!(
            "RBF lift needs at least as many samples ({}) as centers ({})",
            samples.len(),
            centers.len()
        )));
    }
    let shapes: Vec<LiftShape> = centers
        .iter()
        .map(|center| LiftShape::Multiquadric {
            center: center.clone(),
            c: c_mq,
        })
        .collect();
    let mut a = CMatrix::zeros(samples.len(), shapes.len());
    for (row, sample) in samples.iter().enumerate() {
        for (col, shape) in shapes.iter().enumerate() {
            a.set(row, col, Complex64::new(shape.eval(&sample.point), 0.0));
        }
    }
    let (rows, fit_residual, ill_conditioned) = fit_exponents(&a, samples, exponents)?;
    let time_profiles: Vec<PowerProfile> =
        rows.into_iter().map(PowerProfile::new).collect::<Result<_>>()?;
    Ok(LiftFunction {
        shapes,
        time_profiles,
        kind: LiftKind::MqRbf {
            c_mq,
            centers: centers.len(),
        },
        fit_residual,
        ill_conditioned,
    })
}

/// Two-stage fit for simultaneous value and Laplacian-trace data.
fn build_staged_lift(
    samples: &[BoundarySample],
    centers: &[Vec<f64>],
    c_mq: f64,
    dim: usize,
    exponents: &[f64],
) -> Result<LiftFunction> {
    if dim != 2 {
        return Err(Error::Validation(
            "Laplacian-trace boundary data is supported on 2d domains".into(),
        ));
    }
    let laplacian_samples: Vec<BoundarySample> = samples
        .iter()
        .filter(|s| s.kind == ConditionKind::Laplacian)
        .cloned()
        .collect();
    let value_samples: Vec<BoundarySample> = samples
        .iter()
        .filter(|s| s.kind == ConditionKind::Value)
        .cloned()
        .collect();
    let n_centers = centers.len();
    if laplacian_samples.len() < 2 * n_centers || value_samples.len() < n_centers {
        return Err(Error::Validation(format!(
            "staged RBF lift needs >= {} Laplacian and >= {} value samples, got {} and {}",
            2 * n_centers,
            n_centers,
            laplacian_samples.len(),
            value_samples.len()
        )));
    }

    // Geometry for the polynomial shapes: centered at the centroid of the
    // kernel centers, scaled by their spread.
    let mut centroid = vec![0.0; dim];
    for center in centers {
        for (acc, &v) in centroid.iter_mut().zip(center) {
            *acc += v / n_centers as f64;
        }
    }
    let spread = centers
        .iter()
        .map(|c| dist_sqr(c, &centroid).sqrt())
        .fold(0.0_f64, f64::max)
        .max(1e-12);
    let polynomial_family = |count: usize, biharmonic: bool| -> Vec<LiftShape> {
        let mut shapes = Vec::with_capacity(count);
        let mut degree = 0_u32;
        while shapes.len() < count {
            for &imaginary in &[false, true] {
                if degree == 0 && imaginary {
                    continue;
                }
                if shapes.len() == count {
                    break;
                }
                shapes.push(if biharmonic {
                    LiftShape::BiharmonicPoly {
                        degree,
                        imaginary,
                        center: centroid.clone(),
                        scale: spread,
                    }
                } else {
                    LiftShape::Harmonic {
                        degree,
                        imaginary,
                        center: centroid.clone(),
                        scale: spread,
                    }
                });
            }
            degree += 1;
        }
        shapes
    };

    // Stage 1: match the Laplacian trace with biharmonic polynomials (whose
    // Laplacians are harmonics, carrying the smooth bulk of the trace) plus
    // the potential kernels (Laplacians are the multiquadrics, entered with
    // the flat part c folded into the degree-0 polynomial for conditioning).
    let mut stage1_shapes = polynomial_family(n_centers, true);
    let n_poly = stage1_shapes.len();
    stage1_shapes.extend(centers.iter().map(|center| LiftShape::MultiquadricPotential {
        center: center.clone(),
        c: c_mq,
    }));
    let mut a1 = CMatrix::zeros(laplacian_samples.len(), stage1_shapes.len());
    for (row, sample) in laplacian_samples.iter().enumerate() {
        for (col, shape) in stage1_shapes.iter().enumerate() {
            let mut v = shape.laplacian(&sample.point, dim);
            if col >= n_poly {
                v -= c_mq;
            }
            a1.set(row, col, Complex64::new(v, 0.0));
        }
    }
    let (stage1_rows, residual1, ill1) = fit_exponents(&a1, &laplacian_samples, exponents)?;
    // Undo the centering: the degree-0 polynomial (with unit Laplacian)
    // absorbs -c times the kernel coefficients.
    let mut stage1_rows = stage1_rows;
    for (e_idx, _) in exponents.iter().enumerate() {
        let correction: Complex64 = stage1_rows[n_poly..]
            .iter()
            .map(|row| row[e_idx].1)
            .sum::<Complex64>()
            * c_mq;
        stage1_rows[0][e_idx].1 -= correction;
    }

    // Stage 2: harmonic polynomials absorb the remaining value trace without
    // feeding back into the Laplacian trace.
    let stage1_profiles: Vec<PowerProfile> = stage1_rows
        .iter()
        .map(|row| PowerProfile::new(row.iter().copied()))
        .collect::<Result<_>>()?;
    let harmonic_shapes = polynomial_family(n_centers, false);
    let mut a2 = CMatrix::zeros(value_samples.len(), harmonic_shapes.len());
    for (row, sample) in value_samples.iter().enumerate() {
        for (col, shape) in harmonic_shapes.iter().enumerate() {
            a2.set(row, col, Complex64::new(shape.eval(&sample.point), 0.0));
        }
    }
    // Residual value data after subtracting the stage-1 contribution.
    let adjusted: Vec<BoundarySample> = value_samples
        .iter()
        .map(|sample| {
            let mut datum = sample.datum.clone();
            for (shape, profile) in stage1_shapes.iter().zip(&stage1_profiles) {
                datum = datum.plus(&profile.scaled(-shape.eval(&sample.point)));
            }
            BoundarySample {
                point: sample.point.clone(),
                kind: sample.kind,
                datum,
            }
        })
        .collect();
    let (stage2_rows, residual2, ill2) = fit_exponents(&a2, &adjusted, exponents)?;

    let mut shapes = stage1_shapes;
    shapes.extend(harmonic_shapes);
    let mut time_profiles = stage1_profiles;
    for row in stage2_rows {
        time_profiles.push(PowerProfile::new(row)?);
    }
    Ok(LiftFunction {
        shapes,
        time_profiles,
        kind: LiftKind::MqRbf {
            c_mq,
            centers: n_centers,
        },
        fit_residual: residual1.max(residual2),
        ill_conditioned: ill1 || ill2,
    })
}

/// Uniformly spaced points on the perimeter of a box: the boundary nodes of
/// an `n_side x n_side` lattice, `4 n_side - 4` in total.
pub fn perimeter_centers(domain: &BoxDomain, n_side: usize) -> Result<Vec<Vec<f64>>> {
    if domain.dim() != 2 {
        return Err(Error::Validation(
            "perimeter centers are defined for 2d domains".into(),
        ));
    }
    if n_side < 2 {
        return Err(Error::Validation("need at least a 2 x 2 lattice".into()));
    }
    let (l1, l2) = (domain.length(0), domain.length(1));
    let coord = |i: usize, l: f64| l * i as f64 / (n_side - 1) as f64;
    let mut points = Vec::with_capacity(4 * n_side - 4);
    for i1 in 0..n_side {
        for i2 in 0..n_side {
            if i1 == 0 || i1 == n_side - 1 || i2 == 0 || i2 == n_side - 1 {
                points.push(vec![coord(i1, l1), coord(i2, l2)]);
            }
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn linear_lift_interpolates_endpoints_exactly() {
        let domain = BoxDomain::interval(10.0).unwrap();
        let left = PowerProfile::monomial(2.0, c(3.0)).unwrap();
        let right = PowerProfile::new([(2.0, c(-1.0)), (0.0, c(4.0))]).unwrap();
        let lift = build_linear_lift_1d(&left, &right, &domain).unwrap();
        for &t in &[0.0, 0.3, 1.7] {
            assert_eq!(lift.eval(&[0.0], t), left.eval(t));
            assert_eq!(lift.eval(&[10.0], t), right.eval(t));
        }
        // Affine in x: the Laplacian vanishes identically.
        assert_eq!(
            lift.eval_symbol(SpatialSymbol::Laplacian, &[4.2], 1.0, 1),
            c(0.0)
        );
    }

    #[test]
    fn equal_endpoint_profiles_make_constant_lift() {
        let domain = BoxDomain::interval(2.0).unwrap();
        let g = PowerProfile::monomial(2.0, c(1.0)).unwrap();
        let lift = build_linear_lift_1d(&g, &g, &domain).unwrap();
        for &x in &[0.0, 0.4, 1.3, 2.0] {
            assert!((lift.eval(&[x], 0.5) - c(0.25)).norm() < 1e-15);
        }
    }

    #[test]
    fn zero_data_gives_zero_lift() {
        let domain = BoxDomain::interval(1.0).unwrap();
        let z = PowerProfile::zero();
        let lift = build_linear_lift_1d(&z, &z, &domain).unwrap();
        assert!(lift.is_zero());
        assert_eq!(lift.eval(&[0.5], 0.7), c(0.0));
    }

    #[test]
    fn lift_caputo_term_matches_closed_form() {
        // s = t^2 constant in space: D^{alpha(t)} s = 2 t^{2 - alpha} / Gamma(3 - alpha).
        let domain = BoxDomain::interval(1.0).unwrap();
        let g = PowerProfile::monomial(2.0, c(1.0)).unwrap();
        let lift = build_linear_lift_1d(&g, &g, &domain).unwrap();
        let order = OrderFunction::new(1, 1.0, |t| 0.8 + 0.2 * t).unwrap();
        let t = 0.6;
        let alpha = order.order_at(t);
        let expected = 2.0 * t.powf(2.0 - alpha) / crate::gamma::gamma(3.0 - alpha).unwrap();
        let got = lift
            .caputo_term(&order, SpatialSymbol::Identity, &[0.37], t, 1)
            .unwrap();
        assert!((got.re - expected).abs() < 1e-13 * expected.abs());
        // Laplacian of an affine lift contributes nothing.
        let zero = lift
            .caputo_term(&order, SpatialSymbol::Laplacian, &[0.37], t, 1)
            .unwrap();
        assert_eq!(zero, c(0.0));
    }

    #[test]
    fn multiquadric_spatial_derivatives_match_finite_differences() {
        let shape = LiftShape::Multiquadric {
            center: vec![0.25, 0.8],
            c: 1.7,
        };
        let x = [0.6, 0.35];
        let h = 1e-5;
        // Laplacian via 5-point stencil.
        let mut lap = -4.0 * shape.eval(&x);
        for (axis, _) in x.iter().enumerate() {
            let mut xp = x;
            xp[axis] += h;
            let mut xm = x;
            xm[axis] -= h;
            lap += shape.eval(&xp) + shape.eval(&xm);
        }
        lap /= h * h;
        assert!((lap - shape.laplacian(&x, 2)).abs() < 1e-5);

        // Gradient via central differences.
        for axis in 0..2 {
            let mut xp = x;
            xp[axis] += h;
            let mut xm = x;
            xm[axis] -= h;
            let fd = (shape.eval(&xp) - shape.eval(&xm)) / (2.0 * h);
            assert!((fd - shape.gradient(&x, axis)).abs() < 1e-9);
        }

        // Bilaplacian via nested Laplacian stencils of the closed-form
        // Laplacian.
        let h = 1e-4;
        let mut bilap = -4.0 * shape.laplacian(&x, 2);
        for axis in 0..2 {
            let mut xp = x;
            xp[axis] += h;
            let mut xm = x;
            xm[axis] -= h;
            bilap += shape.laplacian(&xp, 2) + shape.laplacian(&xm, 2);
        }
        bilap /= h * h;
        assert!(
            (bilap - shape.bilaplacian(&x, 2)).abs() < 1e-5 * (1.0 + bilap.abs()),
            "fd {bilap} vs closed form {}",
            shape.bilaplacian(&x, 2)
        );
    }

    #[test]
    fn potential_kernel_matches_its_defining_relations() {
        let center = vec![0.1, 0.9];
        let c_mq = 8.0;
        let chi = LiftShape::MultiquadricPotential {
            center: center.clone(),
            c: c_mq,
        };
        let psi = LiftShape::Multiquadric {
            center,
            c: c_mq,
        };
        let x = [0.7, 0.4];
        let h = 1e-5;

        // Laplacian(chi) = psi via 5-point stencil.
        let mut lap = -4.0 * chi.eval(&x);
        for axis in 0..2 {
            let mut xp = x;
            xp[axis] += h;
            let mut xm = x;
            xm[axis] -= h;
            lap += chi.eval(&xp) + chi.eval(&xm);
        }
        lap /= h * h;
        assert!((lap - psi.eval(&x)).abs() < 1e-4, "{lap} vs {}", psi.eval(&x));
        assert!((chi.laplacian(&x, 2) - psi.eval(&x)).abs() < 1e-12);

        // Bilaplacian(chi) = Laplacian(psi).
        assert!((chi.bilaplacian(&x, 2) - psi.laplacian(&x, 2)).abs() < 1e-12);

        // Gradient by central differences, including the center itself.
        for axis in 0..2 {
            let mut xp = x;
            xp[axis] += h;
            let mut xm = x;
            xm[axis] -= h;
            let fd = (chi.eval(&xp) - chi.eval(&xm)) / (2.0 * h);
            assert!((fd - chi.gradient(&x, axis)).abs() < 1e-7);
        }
        assert_eq!(chi.gradient(&[0.1, 0.9], 0), 0.0);

        // Centered at the origin point of its own center.
        assert!(chi.eval(&[0.1, 0.9]).abs() < 1e-14);
    }

    #[test]
    fn rbf_lift_reproduces_fitted_conditions() {
        let domain = BoxDomain::square(1.0).unwrap();
        let centers = perimeter_centers(&domain, 4).unwrap();
        assert_eq!(centers.len(), 12);
        // Value data t^3 e^{x1 + x2} sampled at the centers themselves.
        let samples: Vec<BoundarySample> = centers
            .iter()
            .map(|p| BoundarySample {
                point: p.clone(),
                kind: ConditionKind::Value,
                datum: PowerProfile::monomial(3.0, c((p[0] + p[1]).exp())).unwrap(),
            })
            .collect();
        let lift = build_rbf_lift(&samples, &centers, 4.0, 2).unwrap();
        for sample in &samples {
            for &t in &[0.2, 1.0] {
                let got = lift.eval(&sample.point, t);
                let want = sample.datum.eval(t);
                assert!(
                    (got - want).norm() <= 1e-8 * (1.0 + want.norm()),
                    "{got} vs {want}"
                );
            }
        }
        assert!(matches!(lift.kind(), LiftKind::MqRbf { centers: 12, .. }));
    }

    #[test]
    fn rbf_lift_zero_data_is_zero() {
        let domain = BoxDomain::square(1.0).unwrap();
        let centers = perimeter_centers(&domain, 3).unwrap();
        let samples: Vec<BoundarySample> = centers
            .iter()
            .map(|p| BoundarySample {
                point: p.clone(),
                kind: ConditionKind::Value,
                datum: PowerProfile::zero(),
            })
            .collect();
        let lift = build_rbf_lift(&samples, &centers, 2.0, 2).unwrap();
        assert!(lift.is_zero() || lift.eval(&[0.5, 0.5], 1.0).norm() < 1e-14);
    }

    #[test]
    fn rbf_single_center_single_condition() {
        let samples = vec![BoundarySample {
            point: vec![0.0, 0.0],
            kind: ConditionKind::Value,
            datum: PowerProfile::monomial(1.0, c(5.0)).unwrap(),
        }];
        let centers = vec![vec![0.0, 0.0]];
        let lift = build_rbf_lift(&samples, &centers, 3.0, 2).unwrap();
        // psi(0) = c_mq, so gamma = 5 / 3 at exponent 1.
        let got = lift.eval(&[0.0, 0.0], 1.0);
        assert!((got - c(5.0)).norm() < 1e-12);
    }

    #[test]
    fn perimeter_center_counts() {
        let domain = BoxDomain::square(1.0).unwrap();
        assert_eq!(perimeter_centers(&domain, 5).unwrap().len(), 16);
        assert_eq!(perimeter_centers(&domain, 6).unwrap().len(), 20);
    }
}
