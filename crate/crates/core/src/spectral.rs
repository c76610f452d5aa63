//! Sine-series machinery: modes on a box, spatial symbols, and Fourier
//! projection by tensor-product Gauss-Legendre quadrature.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Default quadrature order per dimension for 1d problems.
pub const DEFAULT_QUADRATURE_1D: usize = 64;
/// Default quadrature order per dimension for 2d problems.
pub const DEFAULT_QUADRATURE_2D: usize = 32;

/// An axis-aligned box `prod_i [0, L_i]` in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDomain {
    lengths: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lengths: &[f64]) -> Result<Self> {
        if lengths.is_empty() || lengths.len() > 2 {
            return Err(Error::Validation(format!(
                "box domains support 1 or 2 dimensions, got {}",
                lengths.len()
            )));
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::Validation(format!(
                "box side lengths must be positive, got {lengths:?}"
            )));
        }
        Ok(Self {
            lengths: lengths.to_vec(),
        })
    }

    pub fn interval(length: f64) -> Result<Self> {
        Self::new(&[length])
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(&[side, side])
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.lengths[axis]
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.lengths)
                .all(|(&xi, &li)| (0.0..=li).contains(&xi))
    }
}

/// One sine mode `prod_i sin(n_i pi x_i / L_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SineMode {
    indices: Vec<usize>,
    domain: BoxDomain,
}

impl SineMode {
    pub fn new(indices: &[usize], domain: &BoxDomain) -> Result<Self> {
        if indices.len() != domain.dim() {
            return Err(Error::Validation(format!(
                "mode index has {} components for a {}d domain",
                indices.len(),
                domain.dim()
            )));
        }
        if indices.iter().any(|&n| n < 1) {
            return Err(Error::Validation("mode indices start at 1".into()));
        }
        Ok(Self {
            indices: indices.to_vec(),
            domain: domain.clone(),
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Wave number `n_i pi / L_i` along one axis.
    pub fn wave_number(&self, axis: usize) -> f64 {
        self.indices[axis] as f64 * PI / self.domain.length(axis)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (0..self.indices.len())
            .map(|axis| (self.wave_number(axis) * x[axis]).sin())
            .product()
    }

    /// Partial derivative of the mode function along `axis`.
    pub fn eval_derivative(&self, x: &[f64], axis: usize) -> f64 {
        (0..self.indices.len())
            .map(|a| {
                let k = self.wave_number(a);
                if a == axis {
                    k * (k * x[a]).cos()
                } else {
                    (k * x[a]).sin()
                }
            })
            .product()
    }
}

/// Scalar action of a spatial operator on a sine mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpatialSymbol {
    Identity,
    Laplacian,
    Bilaplacian,
}

impl SpatialSymbol {
    /// Eigenvalue of the operator on the given mode: 1 for identity,
    /// `-sum_j (n_j pi / L_j)^2` for the Laplacian and its square for the
    /// bilaplacian.
    pub fn eigenvalue(&self, mode: &SineMode) -> f64 {
        match self {
            SpatialSymbol::Identity => 1.0,
            SpatialSymbol::Laplacian => {
                -(0..mode.indices().len())
                    .map(|a| mode.wave_number(a).powi(2))
                    .sum::<f64>()
            }
            SpatialSymbol::Bilaplacian => (0..mode.indices().len())
                .map(|a| mode.wave_number(a).powi(2))
                .sum::<f64>()
                .powi(2),
        }
    }
}

/// All modes with `1 <= n_i <= n_per_dim`, in lexicographic order.
pub fn enumerate_modes(domain: &BoxDomain, n_per_dim: usize) -> Result<Vec<SineMode>> {
    if n_per_dim < 1 {
        return Err(Error::Validation("mode truncation must be >= 1".into()));
    }
    let mut modes = Vec::with_capacity(n_per_dim.pow(domain.dim() as u32));
    match domain.dim() {
        1 => {
            for n in 1..=n_per_dim {
                modes.push(SineMode::new(&[n], domain)?);
            }
        }
        2 => {
            for n1 in 1..=n_per_dim {
                for n2 in 1..=n_per_dim {
                    modes.push(SineMode::new(&[n1, n2], domain)?);
                }
            }
        }
        _ => unreachable!("BoxDomain enforces dim in {{1, 2}}"),
    }
    Ok(modes)
}

/// Fourier-sine coefficient of `f` for one mode:
/// `(2^d / prod L_i) * integral of f(x) prod sin(n_i pi x_i / L_i)`,
/// by tensor-product Gauss-Legendre quadrature of the given order.
pub fn project_onto_mode<F>(f: F, mode: &SineMode, quadrature_order: usize) -> Result<Complex64>
where
    F: Fn(&[f64]) -> Complex64,
{
    let plan = ProjectionPlan::new(
        mode.domain(),
        *mode.indices().iter().max().expect("non-empty indices"),
        quadrature_order,
    )?;
    let samples = plan.sample(|x| Ok(f(x)))?;
    Ok(plan.project(&samples, mode))
}

/// Precomputed quadrature nodes, weights and sine tables shared by every
/// projection at a fixed truncation level.
#[derive(Debug, Clone)]
pub struct ProjectionPlan {
    domain: BoxDomain,
    n_per_dim: usize,
    order: usize,
    nodes: Vec<Vec<f64>>,
    // Quadrature weights premultiplied by the 2/L_i normalization.
    weights: Vec<Vec<f64>>,
    // sine_tables[axis][(n - 1) * order + q] = sin(n pi x_q / L)
    sine_tables: Vec<Vec<f64>>,
}

impl ProjectionPlan {
    pub fn new(domain: &BoxDomain, n_per_dim: usize, quadrature_order: usize) -> Result<Self> {
        if n_per_dim < 1 {
            return Err(Error::Validation("mode truncation must be >= 1".into()));
        }
        if quadrature_order < 1 {
            return Err(Error::Validation("quadrature order must be >= 1".into()));
        }
        let rule = gauss_legendre(quadrature_order)?;
        let mut nodes = Vec::with_capacity(domain.dim());
        let mut weights = Vec::with_capacity(domain.dim());
        let mut sine_tables = Vec::with_capacity(domain.dim());
        for axis in 0..domain.dim() {
            let length = domain.length(axis);
            let (xs, ws) = rule.mapped(0.0, length);
            let ws: Vec<f64> = ws.iter().map(|w| w * 2.0 / length).collect();
            let mut table = vec![0.0; n_per_dim * quadrature_order];
            for n in 1..=n_per_dim {
                for (q, &x) in xs.iter().enumerate() {
                    table[(n - 1) * quadrature_order + q] = (n as f64 * PI * x / length).sin();
                }
            }
            nodes.push(xs);
            weights.push(ws);
            sine_tables.push(table);
        }
        Ok(Self {
            domain: domain.clone(),
            n_per_dim,
            order: quadrature_order,
            nodes,
            weights,
            sine_tables,
        })
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn n_per_dim(&self) -> usize {
        self.n_per_dim
    }

    pub fn node_count(&self) -> usize {
        self.order.pow(self.domain.dim() as u32)
    }

    /// Samples `f` at every tensor quadrature node (row-major over axes),
    /// rejecting non-finite values with the offending location.
    pub fn sample<F>(&self, mut f: F) -> Result<Vec<Complex64>>
    where
        F: FnMut(&[f64]) -> Result<Complex64>,
    {
        let mut out = Vec::with_capacity(self.node_count());
        match self.domain.dim() {
            1 => {
                for &x in &self.nodes[0] {
                    let v = f(&[x])?;
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::Numerical(format!(
                            "non-finite field sample at x = {x}"
                        )));
                    }
                    out.push(v);
                }
            }
            2 => {
                for &x1 in &self.nodes[0] {
                    for &x2 in &self.nodes[1] {
                        let v = f(&[x1, x2])?;
                        if !v.re.is_finite() || !v.im.is_finite() {
                            return Err(Error::Numerical(format!(
                                "non-finite field sample at ({x1}, {x2})"
                            )));
                        }
                        out.push(v);
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(out)
    }

    /// Projects pre-sampled field values onto one mode.
    pub fn project(&self, samples: &[Complex64], mode: &SineMode) -> Complex64 {
        assert_eq!(samples.len(), self.node_count());
        let q = self.order;
        match self.domain.dim() {
            1 => {
                let n = mode.indices()[0];
                let table = &self.sine_tables[0][(n - 1) * q..n * q];
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..q {
                    acc += samples[i] * (self.weights[0][i] * table[i]);
                }
                acc
            }
            2 => {
                let n1 = mode.indices()[0];
                let n2 = mode.indices()[1];
                let t1 = &self.sine_tables[0][(n1 - 1) * q..n1 * q];
                let t2 = &self.sine_tables[1][(n2 - 1) * q..n2 * q];
                let mut acc = Complex64::new(0.0, 0.0);
                for i1 in 0..q {
                    let w1 = self.weights[0][i1] * t1[i1];
                    let row = &samples[i1 * q..(i1 + 1) * q];
                    let mut inner = Complex64::new(0.0, 0.0);
                    for i2 in 0..q {
                        inner += row[i2] * (self.weights[1][i2] * t2[i2]);
                    }
                    acc += inner * w1;
                }
                acc
            }
            _ => unreachable!(),
        }
    }
}
