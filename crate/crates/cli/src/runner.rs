//! Benchmark drivers: build each example's tables and figure data, the full
//! reproduction sweep, and the finite-difference cross-check.

use std::sync::Arc;

use rayon::prelude::*;

use fracspec_core::oracle::{solve_with_error_estimate, DiffusionProblem, FdmGrid};
use fracspec_core::{Error, Result};

use crate::examples::{
    self, biharmonic_2d, damped_wave_2d, diffusion_cubic_data, diffusion_single_harmonic,
    gaussian_profile, multiterm_sech, ode_rerr, pde_merr, pde_merr_parts, pde_rerr,
    pde_rerr_gradient, quadrature_for, schrodinger, solve_benchmark, GaussianOrderPair,
    Overrides, SchrodingerOrder, DEFAULT_DELTA, DEFAULT_KT, DEFAULT_NT,
};
use crate::metrics::{ao, co};
use crate::tables::{
    biharmonic_figure_script, plain, schrodinger_figure_script, sci6, Artifact, Table,
};

/// Published accuracy of the Crank-Nicolson reference scheme quoted next to
/// benchmark 2 (h = 0.1, tau = 0.01, T = 0.1 .. 0.5).
const CRANK_NICOLSON_REFERENCE: [f64; 5] = [4.18e-4, 6.98e-4, 5.68e-4, 2.33e-4, 2.03e-3];

/// Published accuracy of the reference time-stepping method quoted next to
/// benchmark 3 (h = 0.005, tau descending from 0.01 to 0.000625).
const CUBIC_REFERENCE_TAU: [f64; 5] = [0.01, 0.005, 0.0025, 0.00125, 0.000625];
const CUBIC_REFERENCE_MERR: [f64; 5] = [2.09e-4, 8.54e-5, 3.49e-5, 1.44e-5, 5.98e-6];

/// Published accuracy of the discontinuous Galerkin reference quoted next to
/// the Schrödinger benchmark: (N, K) pairs with Re/Im errors per alpha.
const SCHRODINGER_REFERENCE_NK: [(usize, usize); 4] = [(5, 5), (10, 10), (15, 15), (20, 20)];
const SCHRODINGER_REFERENCE: [[(f64, f64); 4]; 3] = [
    // alpha = 0.1
    [
        (3.18e-2, 3.12e-2),
        (4.11e-3, 3.89e-3),
        (1.22e-3, 1.22e-3),
        (5.19e-4, 5.16e-4),
    ],
    // alpha = 0.3
    [
        (3.19e-2, 3.11e-2),
        (4.07e-3, 3.85e-3),
        (1.18e-3, 1.18e-3),
        (4.83e-4, 4.84e-4),
    ],
    // alpha = 0.5
    [
        (3.20e-2, 3.12e-2),
        (4.12e-3, 3.90e-3),
        (1.23e-3, 1.22e-3),
        (5.24e-4, 5.20e-4),
    ],
];

fn deltas(overrides: &Overrides) -> Vec<f64> {
    match overrides.delta {
        Some(d) => vec![d],
        None => vec![0.1, 0.25, 0.5],
    }
}

fn n_t(overrides: &Overrides) -> usize {
    overrides.n_t.unwrap_or(DEFAULT_NT)
}

fn k_t(overrides: &Overrides) -> usize {
    overrides.k_t.unwrap_or(DEFAULT_KT)
}

fn square_side(n_total: usize) -> Result<usize> {
    let side = (n_total as f64).sqrt().round() as usize;
    if side * side != n_total || side == 0 {
        return Err(Error::Validation(format!(
            "2d benchmarks take a total mode count that is a perfect square, got {n_total}"
        )));
    }
    Ok(side)
}

/// Runs one example and returns its artifacts (CSV tables, figure data and
/// plot scripts).
pub fn run_example(id: u32, overrides: &Overrides) -> Result<Vec<Artifact>> {
    match id {
        1 => example1(overrides),
        2 => example2(overrides),
        3 => example3(overrides),
        4 => example4(overrides),
        5 => example5(overrides),
        6 => example6(overrides),
        7 => example7(overrides),
        8 => example8(overrides),
        other => Err(Error::Validation(format!(
            "unknown example id {other}; valid ids are 1..=8"
        ))),
    }
}

/// Runs the full suite with default parameters; independent cells execute
/// concurrently and artifacts are merged in example order.
pub fn run_all() -> Result<Vec<Artifact>> {
    let ids: Vec<u32> = (1..=8).collect();
    let results: Vec<Result<Vec<Artifact>>> = ids
        .par_iter()
        .map(|&id| run_example(id, &Overrides::default()))
        .collect();
    let mut artifacts = Vec::new();
    for r in results {
        artifacts.extend(r?);
    }
    Ok(artifacts)
}

fn example1(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let horizons = match overrides.t_end {
        Some(t) => vec![t],
        None => vec![0.01, 1.0, 100.0],
    };
    let ks: Vec<usize> = match overrides.k {
        Some(k) => vec![k],
        None => (3..=9).collect(),
    };
    let ds = deltas(overrides);
    let k_t = k_t(overrides);

    let mut artifacts = Vec::new();
    for t_end in horizons {
        let mut headers: Vec<String> = vec!["K".into()];
        for d in &ds {
            headers.push(format!("Rerr(delta={d})"));
            headers.push(format!("AO(delta={d})"));
        }
        let mut table = Table {
            name: format!("ex1_T{t_end}"),
            headers,
            rows: Vec::new(),
        };
        for &k in &ks {
            let mut row = vec![k.to_string()];
            for &d in &ds {
                let rerr = ode_rerr(t_end, k, d, k_t)?;
                row.push(sci6(rerr));
                row.push(format!("{:.3}", ao(rerr, k)?));
            }
            table.push_row(row);
        }
        artifacts.push(table.into_artifact());
    }
    Ok(artifacts)
}

fn example2(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let horizons = match overrides.t_end {
        Some(t) => vec![t],
        None => vec![0.1, 0.2, 0.3, 0.4, 0.5],
    };
    let ks: Vec<usize> = match overrides.k {
        Some(k) => vec![k],
        None => vec![3, 4, 5],
    };
    let n = overrides.n.unwrap_or(8);
    let delta = overrides.delta.unwrap_or(DEFAULT_DELTA);
    let quad = quadrature_for(1, n, overrides.quadrature);
    let n_t = n_t(overrides);

    let mut headers: Vec<String> = vec!["T".into()];
    for k in &ks {
        headers.push(format!("Merr(K={k})"));
    }
    headers.push("Merr(Crank-Nicolson reference)".into());
    let mut table = Table {
        name: "ex2".into(),
        headers,
        rows: Vec::new(),
    };
    for (i, &t_end) in horizons.iter().enumerate() {
        let bench = diffusion_single_harmonic(t_end)?;
        let mut row = vec![plain(t_end)];
        for &k in &ks {
            let sol = solve_benchmark(&bench, n, k, delta, quad)?;
            row.push(sci6(pde_merr(&bench, &sol, n_t)?));
        }
        let reference = if overrides.t_end.is_none() {
            sci6(CRANK_NICOLSON_REFERENCE[i])
        } else {
            "-".into()
        };
        row.push(reference);
        table.push_row(row);
    }
    Ok(vec![table.into_artifact()])
}

fn example3(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let t_end = overrides.t_end.unwrap_or(1.0);
    let ks: Vec<usize> = match overrides.k {
        Some(k) => vec![k],
        None => (4..=8).collect(),
    };
    let ns: Vec<usize> = match overrides.n {
        Some(n) => vec![n],
        None => vec![100, 200, 250],
    };
    let delta = overrides.delta.unwrap_or(DEFAULT_DELTA);
    let n_t = n_t(overrides);
    let bench = diffusion_cubic_data(t_end)?;

    let mut headers: Vec<String> = vec!["K".into()];
    for n in &ns {
        headers.push(format!("Merr(N={n})"));
    }
    headers.push("reference tau".into());
    headers.push("Merr(reference h=0.005)".into());
    let mut table = Table {
        name: "ex3".into(),
        headers,
        rows: Vec::new(),
    };
    for (i, &k) in ks.iter().enumerate() {
        let mut row = vec![k.to_string()];
        for &n in &ns {
            let quad = quadrature_for(1, n, overrides.quadrature);
            let sol = solve_benchmark(&bench, n, k, delta, quad)?;
            row.push(sci6(pde_merr(&bench, &sol, n_t)?));
        }
        if overrides.k.is_none() && i < CUBIC_REFERENCE_TAU.len() {
            row.push(plain(CUBIC_REFERENCE_TAU[i]));
            row.push(sci6(CUBIC_REFERENCE_MERR[i]));
        } else {
            row.push("-".into());
            row.push("-".into());
        }
        table.push_row(row);
    }
    Ok(vec![table.into_artifact()])
}

fn example4(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let t_end = overrides.t_end.unwrap_or(1.0);
    let k = overrides.k.unwrap_or(4);
    let ns: Vec<usize> = match overrides.n {
        Some(n) if n >= 20 => vec![n / 2, n],
        Some(n) => vec![n],
        None => vec![10, 20, 40, 80, 160, 320],
    };
    let ds = deltas(overrides);
    let n_t = n_t(overrides);
    let k_t = k_t(overrides);
    let bench = multiterm_sech(t_end)?;

    let mut headers: Vec<String> = vec!["N".into()];
    for d in &ds {
        headers.push(format!("Rerr(delta={d})"));
        headers.push(format!("CO(delta={d})"));
    }
    let mut table = Table {
        name: "ex4".into(),
        headers,
        rows: Vec::new(),
    };
    let mut previous: Vec<Option<f64>> = vec![None; ds.len()];
    for &n in &ns {
        let quad = quadrature_for(1, n, overrides.quadrature);
        let mut row = vec![n.to_string()];
        for (j, &d) in ds.iter().enumerate() {
            let sol = solve_benchmark(&bench, n, k, d, quad)?;
            let rerr = pde_rerr(&bench, &sol, n_t, k_t)?;
            row.push(sci6(rerr));
            row.push(match previous[j] {
                Some(prev) => format!("{:.3}", co(prev, rerr)?),
                None => "-".into(),
            });
            previous[j] = Some(rerr);
        }
        table.push_row(row);
    }
    Ok(vec![table.into_artifact()])
}

fn example5(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let t_end = overrides.t_end.unwrap_or(1.0);
    let k = overrides.k.unwrap_or(5);
    let delta = overrides.delta.unwrap_or(DEFAULT_DELTA);
    let ns: Vec<usize> = match overrides.n {
        Some(n) => vec![n],
        None => vec![5, 20, 45, 80],
    };
    let n_t = n_t(overrides);

    // Constant-order comparison table.
    let alphas = [0.1, 0.3, 0.5];
    let mut table = Table::new(
        "ex5_constant_orders",
        &[
            "alpha",
            "N",
            "K",
            "Merr(Re)",
            "Merr(Im)",
            "reference (N,K)",
            "reference Merr(Re)",
            "reference Merr(Im)",
        ],
    );
    for (ai, &alpha) in alphas.iter().enumerate() {
        let bench = schrodinger(SchrodingerOrder::Constant(alpha), t_end)?;
        for (ni, &n) in ns.iter().enumerate() {
            let quad = quadrature_for(1, n, overrides.quadrature);
            let sol = solve_benchmark(&bench, n, k, delta, quad)?;
            let (re, im) = pde_merr_parts(&bench, &sol, n_t)?;
            let (reference_nk, reference) = if overrides.n.is_none() && ni < 4 {
                (
                    format!("({},{})", SCHRODINGER_REFERENCE_NK[ni].0, SCHRODINGER_REFERENCE_NK[ni].1),
                    (
                        sci6(SCHRODINGER_REFERENCE[ai][ni].0),
                        sci6(SCHRODINGER_REFERENCE[ai][ni].1),
                    ),
                )
            } else {
                ("-".into(), ("-".into(), "-".into()))
            };
            table.push_row(vec![
                plain(alpha),
                n.to_string(),
                k.to_string(),
                sci6(re),
                sci6(im),
                reference_nk,
                reference.0,
                reference.1,
            ]);
        }
    }

    // Figure data: error vs N for the two variable orders.
    let mut figure = Table::new(
        "ex5_fig1",
        &["N", "Merr(Re) alpha=4^(t-1)", "Merr(Re) alpha=e^t/3"],
    );
    let sweep: Vec<usize> = vec![5, 20, 45, 80];
    for &n in &sweep {
        let quad = quadrature_for(1, n, overrides.quadrature);
        let mut row = vec![n.to_string()];
        for kind in [SchrodingerOrder::PowerOfFour, SchrodingerOrder::ExpThird] {
            let bench = schrodinger(kind, t_end)?;
            let sol = solve_benchmark(&bench, n, k, delta, quad)?;
            let (re, _) = pde_merr_parts(&bench, &sol, n_t)?;
            row.push(sci6(re));
        }
        figure.push_row(row);
    }

    Ok(vec![
        table.into_artifact(),
        figure.into_artifact(),
        Artifact {
            filename: "ex5_fig1.gp".into(),
            contents: schrodinger_figure_script("ex5_fig1.csv"),
        },
    ])
}

fn example6(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let t_end = overrides.t_end.unwrap_or(1.0);
    let k = overrides.k.unwrap_or(5);
    let delta = overrides.delta.unwrap_or(DEFAULT_DELTA);
    let ns: Vec<usize> = match overrides.n {
        Some(n) if n >= 32 => vec![n / 2, n],
        Some(n) => vec![n],
        None => vec![16, 32, 64, 128, 256],
    };
    let n_t = n_t(overrides);
    let k_t = k_t(overrides);

    let pairs = [GaussianOrderPair::SineUpper, GaussianOrderPair::CosineLower];
    let mut table = Table::new(
        "ex6",
        &[
            "N",
            "Rerr(alpha1=1.6+sin(t)/5)",
            "CO(alpha1=1.6+sin(t)/5)",
            "Rerr(alpha1=0.6+cos(t)/5)",
            "CO(alpha1=0.6+cos(t)/5)",
        ],
    );
    let mut previous: Vec<Option<f64>> = vec![None; pairs.len()];
    for &n in &ns {
        let quad = quadrature_for(1, n, overrides.quadrature);
        let mut row = vec![n.to_string()];
        for (j, &pair) in pairs.iter().enumerate() {
            let bench = gaussian_profile(pair, t_end)?;
            let sol = solve_benchmark(&bench, n, k, delta, quad)?;
            let rerr = pde_rerr(&bench, &sol, n_t, k_t)?;
            row.push(sci6(rerr));
            row.push(match previous[j] {
                Some(prev) => format!("{:.3}", co(prev, rerr)?),
                None => "-".into(),
            });
            previous[j] = Some(rerr);
        }
        table.push_row(row);
    }
    Ok(vec![table.into_artifact()])
}

fn example7(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let t_end = overrides.t_end.unwrap_or(1.0);
    let delta = overrides.delta.unwrap_or(DEFAULT_DELTA);
    let ns: Vec<usize> = match overrides.n {
        Some(n) => vec![n],
        None => vec![25, 100, 225],
    };
    let ks: Vec<usize> = match overrides.k {
        Some(k) => vec![k],
        None => vec![4, 5],
    };
    let n_t = n_t(overrides);
    let k_t = k_t(overrides);
    let bench = damped_wave_2d(t_end)?;

    let mut headers: Vec<String> = vec!["N".into()];
    for k in &ks {
        headers.push(format!("Rerr(u) K={k}"));
        headers.push(format!("Rerr(du/dx1) K={k}"));
    }
    let mut table = Table {
        name: "ex7".into(),
        headers,
        rows: Vec::new(),
    };
    for &n in &ns {
        let side = square_side(n)?;
        let quad = quadrature_for(2, side, overrides.quadrature);
        let mut row = vec![n.to_string()];
        for &k in &ks {
            let sol = solve_benchmark(&bench, side, k, delta, quad)?;
            row.push(sci6(pde_rerr(&bench, &sol, n_t, k_t)?));
            row.push(sci6(pde_rerr_gradient(&bench, &sol, n_t, k_t)?));
        }
        table.push_row(row);
    }
    Ok(vec![table.into_artifact()])
}

fn example8(overrides: &Overrides) -> Result<Vec<Artifact>> {
    let t_end = overrides.t_end.unwrap_or(1.0);
    let k = overrides.k.unwrap_or(5);
    let delta = overrides.delta.unwrap_or(DEFAULT_DELTA);
    let n_total = overrides.n.unwrap_or(36);
    let side = square_side(n_total)?;
    let quad = quadrature_for(2, side, overrides.quadrature);
    let bench = biharmonic_2d(t_end)?;
    let sol = solve_benchmark(&bench, side, k, delta, quad)?;

    // Figure data on a regular plotting lattice (interior plus boundary).
    let plot_side = 41;
    let axis: Vec<f64> = (0..plot_side)
        .map(|i| i as f64 / (plot_side - 1) as f64)
        .collect();
    let axes = vec![axis.clone(), axis.clone()];
    let values = sol.eval_on_grid(&axes, t_end)?;
    let mut figure = Table::new("ex8_fig2", &["x1", "x2", "u_numerical", "abs_error"]);
    for (i1, &x1) in axis.iter().enumerate() {
        for (i2, &x2) in axis.iter().enumerate() {
            let got = values[i1 * plot_side + i2];
            let want = (bench.exact)(&[x1, x2], t_end);
            figure.push_row(vec![
                format!("{x1:.6}"),
                format!("{x2:.6}"),
                sci6(got.re),
                sci6((got - want).norm()),
            ]);
        }
    }

    // Summary: interior maximum error and its spatial distribution.
    let n_t = n_t(overrides);
    let stats = examples::region_error_stats(&bench, &sol, n_t)?;
    let mut summary = Table::new(
        "ex8_summary",
        &[
            "N",
            "K",
            "Merr(interior)",
            "max_error(central quarter)",
            "max_error(boundary frame)",
        ],
    );
    summary.push_row(vec![
        n_total.to_string(),
        k.to_string(),
        sci6(stats.max_interior),
        sci6(stats.max_central),
        sci6(stats.max_frame),
    ]);

    Ok(vec![
        figure.into_artifact(),
        Artifact {
            filename: "ex8_fig2.gp".into(),
            contents: biharmonic_figure_script("ex8_fig2.csv", plot_side),
        },
        summary.into_artifact(),
    ])
}

/// Outcome of the finite-difference cross-check.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub example: u32,
    /// Max nodal discrepancy between the spectral and FDM solutions at T.
    pub discrepancy: f64,
    /// Richardson-style estimate of the FDM discretization error.
    pub estimate: f64,
}

impl OracleReport {
    /// The agreement contract: the spectral solution must sit within three
    /// times the oracle's own discretization error.
    pub fn within_contract(&self) -> bool {
        self.discrepancy <= 3.0 * self.estimate
    }
}

/// Cross-validates a subdiffusion benchmark against the L1 finite-difference
/// oracle. Valid ids: 2 and 3.
pub fn oracle_check(id: u32) -> Result<OracleReport> {
    let (bench, n_per_dim, fdm_grid) = match id {
        2 => (diffusion_single_harmonic(0.5)?, 8, FdmGrid { n_x: 100, n_t: 50 }),
        3 => (diffusion_cubic_data(1.0)?, 200, FdmGrid { n_x: 200, n_t: 400 }),
        other => {
            return Err(Error::Validation(format!(
                "oracle cross-check covers the subdiffusion benchmarks {{2, 3}}, got {other}"
            )))
        }
    };
    let quad = quadrature_for(1, n_per_dim, None);
    let sol = solve_benchmark(&bench, n_per_dim, 5, DEFAULT_DELTA, quad)?;

    let problem = &bench.problem;
    let forcing = problem.forcing.clone();
    let kappa = match id {
        2 => 0.01,
        _ => 1.0,
    };
    let initial = problem.initial[0].clone();
    let fdm_problem = DiffusionProblem {
        length: problem.domain.length(0),
        t_end: problem.t_end,
        order: problem.leading_order.clone(),
        diffusivity: Arc::new(move |_| kappa),
        forcing: Arc::new(move |x: f64, t: f64| forcing(&[x], t).re),
        left: Arc::new(|_| 0.0),
        right: Arc::new(|_| 0.0),
        initial: Arc::new(move |x: f64| initial(&[x]).re),
    };
    let (fine, estimate) = solve_with_error_estimate(&fdm_problem, fdm_grid)?;

    let mut discrepancy: f64 = 0.0;
    for i in 1..fdm_grid.n_x {
        let x = fine.node(i);
        let spectral = sol.eval(&[x], problem.t_end)?;
        discrepancy = discrepancy.max((spectral.re - fine.final_time_values()[i]).abs());
    }
    Ok(OracleReport {
        example: id,
        discrepancy,
        estimate,
    })
}

