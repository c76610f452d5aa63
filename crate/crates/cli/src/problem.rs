//! JSON problem files for the `solve` subcommand.
//!
//! The schema mirrors the solver's problem model. Time dependence of
//! boundary data and forcing factors is restricted to power profiles (and
//! their fractional images), the class the solver handles in closed form;
//! spatial functions come from a registered expression set.
//!
//! ```json
//! {
//!   "domain": [10.0],
//!   "t_end": 0.5,
//!   "leading_order": { "ceiling": 1, "shape": { "affine": { "a": 0.8, "b": 0.4 } } },
//!   "terms": [
//!     { "side": "rhs_spatial", "symbol": "laplacian",
//!       "coefficient": { "re": 0.01, "im": 0.0 }, "order": null }
//!   ],
//!   "forcing": [
//!     { "spatial": { "sine": { "terms": [ { "scale": 1.0, "mode": [1] } ] } },
//!       "time": { "caputo": { "profile": [[2.0, 1.0, 0.0]],
//!                  "order": { "ceiling": 1, "shape": { "affine": { "a": 0.8, "b": 0.4 } } } } } }
//!   ],
//!   "boundary": "homogeneous_dirichlet",
//!   "initial": [ { "polynomial": { "terms": [ { "powers": [0], "scale": 0.0 } ] } } ],
//!   "solver": { "n": 8, "k": 5, "delta": 0.25 }
//! }
//! ```

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use fracspec_core::muntz::TimeFn;
use fracspec_core::pipeline::{space_fn, space_time_fn, BoundarySpec, PdeProblem, PdeTerm, RbfCondition, TermSide};
use fracspec_core::{
    caputo_profile, BoxDomain, ConditionKind, Error, OrderFunction, PowerProfile, Result,
    SpatialSymbol,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemFile {
    pub domain: Vec<f64>,
    pub t_end: f64,
    pub leading_order: OrderSpec,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub forcing: Vec<SeparableTerm>,
    pub boundary: BoundaryFileSpec,
    pub initial: Vec<SpatialExpr>,
    #[serde(default)]
    pub solver: SolverDefaults,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SolverDefaults {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub delta: Option<f64>,
    pub quadrature: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderSpec {
    pub ceiling: u32,
    pub shape: OrderShape,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderShape {
    /// alpha(t) = value
    Constant(f64),
    /// alpha(t) = a + b t
    Affine { a: f64, b: f64 },
    /// alpha(t) = a + b t^2
    Quadratic { a: f64, b: f64 },
    /// alpha(t) = a + b sin(c t)
    Sin { a: f64, b: f64, c: f64 },
    /// alpha(t) = a + b cos(c t)
    Cos { a: f64, b: f64, c: f64 },
    /// alpha(t) = a + b e^{c t}
    Exp { a: f64, b: f64, c: f64 },
}

impl OrderSpec {
    pub fn build(&self, t_end: f64) -> Result<OrderFunction> {
        let shape = self.shape.clone();
        let eval = move |t: f64| match shape {
            OrderShape::Constant(v) => v,
            OrderShape::Affine { a, b } => a + b * t,
            OrderShape::Quadratic { a, b } => a + b * t * t,
            OrderShape::Sin { a, b, c } => a + b * (c * t).sin(),
            OrderShape::Cos { a, b, c } => a + b * (c * t).cos(),
            OrderShape::Exp { a, b, c } => a + b * (c * t).exp(),
        };
        OrderFunction::new(self.ceiling, t_end, eval)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<ComplexSpec> for Complex64 {
    fn from(c: ComplexSpec) -> Self {
        Complex64::new(c.re, c.im)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermSpec {
    pub side: SideSpec,
    pub symbol: SymbolSpec,
    pub coefficient: ComplexSpec,
    #[serde(default)]
    pub order: Option<OrderSpec>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SideSpec {
    LhsTime,
    RhsSpatial,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolSpec {
    Identity,
    Laplacian,
    Bilaplacian,
}

/// `[exponent, re, im]` triples.
pub type ProfileSpec = Vec<[f64; 3]>;

fn build_profile(spec: &ProfileSpec) -> Result<PowerProfile> {
    PowerProfile::new(
        spec.iter()
            .map(|[p, re, im]| (*p, Complex64::new(*re, *im))),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub spatial: SpatialExpr,
    pub time: TimeExpr,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeExpr {
    /// A plain power profile.
    Profile(ProfileSpec),
    /// The variable-order Caputo image of a power profile.
    Caputo { profile: ProfileSpec, order: OrderSpec },
}

impl TimeExpr {
    fn build(&self, t_end: f64) -> Result<TimeFn> {
        match self {
            TimeExpr::Profile(spec) => {
                let profile = build_profile(spec)?;
                Ok(Arc::new(move |t| profile.eval(t)))
            }
            TimeExpr::Caputo { profile, order } => {
                let profile = build_profile(profile)?;
                let order = order.build(t_end)?;
                // Validate the pairing once so later evaluation cannot fail.
                caputo_profile(&profile, &order, 0.5 * t_end)?;
                Ok(Arc::new(move |t| {
                    caputo_profile(&profile, &order, t)
                        .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
                }))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpatialExpr {
    /// `sum scale * prod_d x_d^{powers[d]}`
    Polynomial { terms: Vec<PolynomialTerm> },
    /// `sum scale * exp(sum_d rates[d] x_d)`
    ExpSum { terms: Vec<ExpTerm> },
    /// `sum scale * prod_d sech(rate (x_d - centers[d]))`
    SechSum { terms: Vec<RadialTerm> },
    /// `sum scale * exp(-rate * |x - centers|^2)`
    Gaussian { terms: Vec<RadialTerm> },
    /// `sum scale * prod_d sin(mode[d] pi x_d / L_d)`
    Sine { terms: Vec<SineTerm> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolynomialTerm {
    pub powers: Vec<u32>,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpTerm {
    pub scale: f64,
    pub rates: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialTerm {
    pub scale: f64,
    pub rate: f64,
    pub centers: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SineTerm {
    pub scale: f64,
    pub mode: Vec<usize>,
}

impl SpatialExpr {
    fn validate_dims(&self, dim: usize) -> Result<()> {
        let ok = match self {
            SpatialExpr::Polynomial { terms } => terms.iter().all(|t| t.powers.len() == dim),
            SpatialExpr::ExpSum { terms } => terms.iter().all(|t| t.rates.len() == dim),
            SpatialExpr::SechSum { terms } | SpatialExpr::Gaussian { terms } => {
                terms.iter().all(|t| t.centers.len() == dim)
            }
            SpatialExpr::Sine { terms } => terms.iter().all(|t| t.mode.len() == dim),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "spatial expression does not match the {dim}d domain"
            )))
        }
    }

    fn eval(&self, x: &[f64], lengths: &[f64]) -> f64 {
        match self {
            SpatialExpr::Polynomial { terms } => terms
                .iter()
                .map(|t| {
                    t.scale
                        * x.iter()
                            .zip(&t.powers)
                            .map(|(&xi, &p)| xi.powi(p as i32))
                            .product::<f64>()
                })
                .sum(),
            SpatialExpr::ExpSum { terms } => terms
                .iter()
                .map(|t| {
                    t.scale
                        * x.iter()
                            .zip(&t.rates)
                            .map(|(&xi, &r)| r * xi)
                            .sum::<f64>()
                            .exp()
                })
                .sum(),
            SpatialExpr::SechSum { terms } => terms
                .iter()
                .map(|t| {
                    t.scale
                        * x.iter()
                            .zip(&t.centers)
                            .map(|(&xi, &ci)| 1.0 / (t.rate * (xi - ci)).cosh())
                            .product::<f64>()
                })
                .sum(),
            SpatialExpr::Gaussian { terms } => terms
                .iter()
                .map(|t| {
                    let r2: f64 = x
                        .iter()
                        .zip(&t.centers)
                        .map(|(&xi, &ci)| (xi - ci) * (xi - ci))
                        .sum();
                    t.scale * (-t.rate * r2).exp()
                })
                .sum(),
            SpatialExpr::Sine { terms } => terms
                .iter()
                .map(|t| {
                    t.scale
                        * x.iter()
                            .zip(&t.mode)
                            .zip(lengths)
                            .map(|((&xi, &n), &l)| (n as f64 * std::f64::consts::PI * xi / l).sin())
                            .product::<f64>()
                })
                .sum(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFileSpec {
    HomogeneousDirichlet,
    Dirichlet1d {
        left: ProfileSpec,
        right: ProfileSpec,
    },
    Rbf2d {
        c_mq: f64,
        conditions: Vec<RbfConditionSpec>,
    },
    Neumann,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RbfConditionSpec {
    pub kind: ConditionKindSpec,
    pub spatial: SpatialExpr,
    pub profile: ProfileSpec,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKindSpec {
    Value,
    Laplacian,
}

impl ProblemFile {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json)
            .map_err(|e| Error::Validation(format!("problem file parse error: {e}")))
    }

    pub fn to_problem(&self) -> Result<PdeProblem> {
        let domain = BoxDomain::new(&self.domain)?;
        let lengths = domain.lengths().to_vec();
        let dim = domain.dim();
        let t_end = self.t_end;
        let leading_order = self.leading_order.build(t_end)?;

        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            terms.push(PdeTerm {
                side: match term.side {
                    SideSpec::LhsTime => TermSide::LhsTime,
                    SideSpec::RhsSpatial => TermSide::RhsSpatial,
                },
                order: term
                    .order
                    .as_ref()
                    .map(|o| o.build(t_end))
                    .transpose()?,
                coefficient: {
                    let value: Complex64 = term.coefficient.into();
                    Arc::new(move |_| value)
                },
                symbol: match term.symbol {
                    SymbolSpec::Identity => SpatialSymbol::Identity,
                    SymbolSpec::Laplacian => SpatialSymbol::Laplacian,
                    SymbolSpec::Bilaplacian => SpatialSymbol::Bilaplacian,
                },
            });
        }

        let mut forcing_parts = Vec::with_capacity(self.forcing.len());
        for part in &self.forcing {
            part.spatial.validate_dims(dim)?;
            forcing_parts.push((part.spatial.clone(), part.time.build(t_end)?));
        }
        let forcing_lengths = lengths.clone();
        let forcing = space_time_fn(move |x: &[f64], t: f64| {
            forcing_parts
                .iter()
                .map(|(spatial, time)| time(t) * spatial.eval(x, &forcing_lengths))
                .sum()
        });

        let boundary = match &self.boundary {
            BoundaryFileSpec::HomogeneousDirichlet => BoundarySpec::HomogeneousDirichlet,
            BoundaryFileSpec::Dirichlet1d { left, right } => BoundarySpec::Dirichlet1d {
                left: build_profile(left)?,
                right: build_profile(right)?,
            },
            BoundaryFileSpec::Rbf2d { c_mq, conditions } => {
                let mut built = Vec::with_capacity(conditions.len());
                for condition in conditions {
                    condition.spatial.validate_dims(dim)?;
                    let spatial = condition.spatial.clone();
                    let profile = build_profile(&condition.profile)?;
                    let lengths = lengths.clone();
                    built.push(RbfCondition {
                        kind: match condition.kind {
                            ConditionKindSpec::Value => ConditionKind::Value,
                            ConditionKindSpec::Laplacian => ConditionKind::Laplacian,
                        },
                        datum: Arc::new(move |x: &[f64]| {
                            profile.scaled(spatial.eval(x, &lengths))
                        }),
                    });
                }
                BoundarySpec::Rbf2d {
                    conditions: built,
                    c_mq: *c_mq,
                }
            }
            BoundaryFileSpec::Neumann => BoundarySpec::Neumann,
        };

        let mut initial = Vec::with_capacity(self.initial.len());
        for field in &self.initial {
            field.validate_dims(dim)?;
            let field = field.clone();
            let lengths = lengths.clone();
            initial.push(space_fn(move |x: &[f64]| {
                Complex64::new(field.eval(x, &lengths), 0.0)
            }));
        }

        let problem = PdeProblem {
            domain,
            t_end,
            leading_order,
            terms,
            forcing,
            boundary,
            initial,
        };
        problem.validate()?;
        Ok(problem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_a_minimal_problem() {
        let json = r#"{
            "domain": [10.0],
            "t_end": 0.5,
            "leading_order": { "ceiling": 1, "shape": { "affine": { "a": 0.8, "b": 0.4 } } },
            "terms": [
                { "side": "rhs_spatial", "symbol": "laplacian",
                  "coefficient": { "re": 0.01 }, "order": null }
            ],
            "forcing": [
                { "spatial": { "sine": { "terms": [ { "scale": 1.0, "mode": [1] } ] } },
                  "time": { "profile": [[2.0, 1.0, 0.0]] } }
            ],
            "boundary": "homogeneous_dirichlet",
            "initial": [ { "polynomial": { "terms": [ { "powers": [0], "scale": 0.0 } ] } } ],
            "solver": { "n": 4, "k": 3 }
        }"#;
        let file = ProblemFile::parse(json).unwrap();
        let problem = file.to_problem().unwrap();
        assert_eq!(problem.domain.dim(), 1);
        assert_eq!(problem.terms.len(), 1);
        // Forcing evaluates sin(pi x / 10) * t^2.
        let v = (problem.forcing)(&[5.0], 2.0);
        assert!((v.re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_dimension_mismatches() {
        let json = r#"{
            "domain": [1.0, 1.0],
            "t_end": 1.0,
            "leading_order": { "ceiling": 1, "shape": { "constant": 0.5 } },
            "terms": [],
            "forcing": [],
            "boundary": "homogeneous_dirichlet",
            "initial": [ { "polynomial": { "terms": [ { "powers": [1], "scale": 1.0 } ] } } ]
        }"#;
        let file = ProblemFile::parse(json).unwrap();
        assert!(file.to_problem().is_err());
    }
}
