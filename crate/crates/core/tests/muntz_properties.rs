//! Structural properties of the backward-substitution collocation solver:
//! initial conditions are met exactly, in-span solutions are recovered to
//! near machine precision, and the fitted residual stays small away from the
//! collocation grid.

mod common;

use std::sync::Arc;

use common::TestRng;
use fracspec_core::muntz::{LowerTerm, TimeFn};
use fracspec_core::{
    caputo_profile, homogeneous_part, solve_votfode, MuntzBasis, OrderFunction, PowerProfile,
    VotfOdeProblem,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Forcing that makes `exact` the solution of the operator
/// `D^{alpha} w - sum beta_i D^{alpha_i} w - beta_0 w`.
fn manufactured_forcing(
    exact: &PowerProfile,
    leading: &OrderFunction,
    lower: &[LowerTerm],
    reaction: Option<TimeFn>,
) -> TimeFn {
    let exact = exact.clone();
    let leading = leading.clone();
    let lower = lower.to_vec();
    Arc::new(move |t| {
        let mut value = caputo_profile(&exact, &leading, t).unwrap();
        for term in &lower {
            value -= (term.coefficient)(t) * caputo_profile(&exact, &term.order, t).unwrap();
        }
        if let Some(r) = &reaction {
            value -= r(t) * exact.eval(t);
        }
        value
    })
}

fn random_problem(rng: &mut TestRng, m: u32, t_end: f64) -> (VotfOdeProblem, MuntzBasis) {
    let base = m as f64 - 1.0;
    let lo = rng.range(0.05, 0.35);
    let amp = rng.range(0.02, (0.9 - lo) / 2.0);
    let freq = rng.range(0.2, 1.5);
    let leading =
        OrderFunction::new(m, t_end, move |t| base + lo + amp * (1.0 + (freq * t).sin())).unwrap();

    let mut lower = Vec::new();
    for _ in 0..(rng.next_u64() % 3) {
        let mi = 1 + (rng.next_u64() % m as u64) as u32;
        let lbase = mi as f64 - 1.0;
        let llo = rng.range(0.05, 0.35);
        let lamp = rng.range(0.02, (0.9 - llo) / 2.0);
        let lfreq = rng.range(0.2, 1.5);
        let order = OrderFunction::new(mi, t_end, move |t| {
            lbase + llo + lamp * (1.0 + (lfreq * t).cos())
        })
        .unwrap();
        let scale = rng.range(-1.5, 1.5);
        lower.push(LowerTerm {
            order,
            coefficient: Arc::new(move |t: f64| c(scale * (1.0 + 0.3 * (t * 0.9).sin()), 0.0)),
        });
    }
    let reaction: Option<TimeFn> = if rng.uniform() < 0.5 {
        let scale = rng.range(-1.0, 1.0);
        Some(Arc::new(move |t: f64| c(scale * (1.0 + t * t), 0.0)))
    } else {
        None
    };

    let initial: Vec<Complex64> = (0..m)
        .map(|_| c(rng.range(-2.0, 2.0), rng.range(-1.0, 1.0)))
        .collect();

    let k = 3 + (rng.next_u64() % 5) as usize;
    let delta = [0.25, 0.5, 1.0][(rng.next_u64() % 3) as usize];
    let basis = MuntzBasis::new(k, delta, m as f64, t_end).unwrap();

    // Exact solution: homogeneous part plus a random in-span combination.
    let wbar = homogeneous_part(&initial).unwrap();
    let span_terms: Vec<(f64, Complex64)> = (1..=k)
        .map(|kk| {
            (
                basis.exponent(kk).unwrap(),
                c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)),
            )
        })
        .collect();
    let exact = wbar.plus(&PowerProfile::new(span_terms).unwrap());

    let forcing = manufactured_forcing(&exact, &leading, &lower, reaction.clone());
    (
        VotfOdeProblem {
            leading_order: leading,
            lower_terms: lower,
            reaction,
            forcing,
            initial_values: initial,
            t_end,
        },
        basis,
    )
}

#[test]
fn initial_conditions_are_met_exactly() {
    let mut rng = TestRng::new(0x1c0_fee);
    for case in 0..24 {
        let m = 1 + (rng.next_u64() % 4) as u32;
        let t_end = rng.range(0.4, 2.5);
        let (problem, basis) = random_problem(&mut rng, m, t_end);
        let sol = solve_votfode(&problem, &basis).unwrap();
        for i in 0..m {
            let got = sol.eval_derivative(0.0, i).unwrap();
            let want = problem.initial_values[i as usize] ;
            assert!(
                (got - want).norm() <= 1e-12 * (1.0 + want.norm()),
                "case {case}: derivative {i}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn in_span_solutions_are_recovered_coefficient_wise() {
    let mut rng = TestRng::new(0xdead_beef);
    let mut checked = 0;
    for _ in 0..20 {
        let m = 1 + (rng.next_u64() % 3) as u32;
        let t_end = rng.range(0.5, 2.0);
        let base = m as f64 - 1.0;
        let lo = rng.range(0.1, 0.4);
        let leading = OrderFunction::new(m, t_end, move |t| base + lo + 0.1 * (t).sin().abs())
            .unwrap();
        let k = 3 + (rng.next_u64() % 3) as usize;
        let basis = MuntzBasis::new(k, 0.5, m as f64, t_end).unwrap();
        let initial: Vec<Complex64> = (0..m).map(|_| c(rng.range(-1.0, 1.0), 0.0)).collect();
        let coeffs: Vec<Complex64> = (0..k)
            .map(|_| c(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0)))
            .collect();
        let wbar = homogeneous_part(&initial).unwrap();
        let span = PowerProfile::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(i, q)| (basis.exponent(i + 1).unwrap(), *q)),
        )
        .unwrap();
        let exact = wbar.plus(&span);
        let forcing = manufactured_forcing(&exact, &leading, &[], None);
        let problem = VotfOdeProblem {
            leading_order: leading,
            lower_terms: vec![],
            reaction: None,
            forcing,
            initial_values: initial,
            t_end,
        };
        let sol = solve_votfode(&problem, &basis).unwrap();
        let scale = coeffs.iter().map(|q| q.norm()).fold(1.0_f64, f64::max);
        for (got, want) in sol.coefficients.iter().zip(&coeffs) {
            assert!(
                (got - want).norm() <= 1e-10 * scale,
                "coefficient mismatch: {got} vs {want} (scale {scale})"
            );
        }
        checked += 1;
    }
    assert_eq!(checked, 20);
}

#[test]
fn residual_stays_small_off_grid() {
    let mut rng = TestRng::new(0x0ff_611d);
    for case in 0..10 {
        let m = 1 + (rng.next_u64() % 3) as u32;
        let t_end = rng.range(0.5, 2.0);
        let (problem, basis) = random_problem(&mut rng, m, t_end);
        let sol = solve_votfode(&problem, &basis).unwrap();

        // Scale reference: max |b| over the collocation grid.
        let grid = fracspec_core::gc_points(2 * basis.count(), t_end).unwrap();
        let (_, b) = fracspec_core::muntz::assemble_system(&problem, &basis, &grid).unwrap();
        let b_inf = b.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);

        for j in 1..=100 {
            let t = t_end * j as f64 / 100.0;
            let r = sol.residual_at(&problem, t).unwrap();
            assert!(
                r.norm() <= 1e-10 * b_inf.max(1.0),
                "case {case}: residual {} at t = {t} exceeds 1e-10 * {b_inf}",
                r.norm()
            );
        }
    }
}

#[test]
fn solutions_agree_across_rescaled_horizons() {
    // The same in-span problem solved on [0, T] and [0, 2T] must agree on
    // the shared interval.
    let mut rng = TestRng::new(0x5ca1_ab1e);
    for _ in 0..8 {
        let m = 1 + (rng.next_u64() % 2) as u32;
        let t_end = rng.range(0.5, 1.5);
        let base = m as f64 - 1.0;
        let lo = rng.range(0.1, 0.3);
        let make_order = |horizon: f64| {
            OrderFunction::new(m, horizon, move |t| base + lo + 0.2 * (0.4 * t).sin().abs())
                .unwrap()
        };
        let k = 4;
        let initial: Vec<Complex64> = (0..m).map(|_| c(rng.range(-1.0, 1.0), 0.0)).collect();
        let exact = {
            let basis = MuntzBasis::new(k, 0.25, m as f64, t_end).unwrap();
            let coeffs: Vec<(f64, Complex64)> = (1..=k)
                .map(|kk| (basis.exponent(kk).unwrap(), c(rng.range(-1.0, 1.0), 0.0)))
                .collect();
            homogeneous_part(&initial)
                .unwrap()
                .plus(&PowerProfile::new(coeffs).unwrap())
        };

        let mut solutions = Vec::new();
        for horizon in [t_end, 2.0 * t_end] {
            let leading = make_order(horizon);
            let forcing = manufactured_forcing(&exact, &leading, &[], None);
            let problem = VotfOdeProblem {
                leading_order: leading,
                lower_terms: vec![],
                reaction: None,
                forcing,
                initial_values: initial.clone(),
                t_end: horizon,
            };
            let basis = MuntzBasis::new(k, 0.25, m as f64, horizon).unwrap();
            solutions.push(solve_votfode(&problem, &basis).unwrap());
        }

        for j in 1..=20 {
            let t = t_end * j as f64 / 20.0;
            let a = solutions[0].eval(t).unwrap();
            let b = solutions[1].eval(t).unwrap();
            let scale = 1.0 + a.norm().max(b.norm());
            assert!(
                (a - b).norm() <= 1e-8 * scale,
                "t = {t}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn reaction_term_completion_solves_otherwise_unsolvable_problems() {
    // A problem whose right-hand side includes a zeroth-order coupling: with
    // the reaction wired through both matrix and right-hand side, an in-span
    // exact solution is still reproduced.
    let t_end = 1.0;
    let leading = OrderFunction::new(2, t_end, |t| 1.4 + 0.3 * t).unwrap();
    let basis = MuntzBasis::new(5, 0.25, 2.0, t_end).unwrap();
    let initial = vec![c(1.0, 0.0), c(0.5, 0.0)];
    let exact = homogeneous_part(&initial)
        .unwrap()
        .plus(&PowerProfile::new([(2.5, c(2.0, 0.0)), (3.0, c(-1.0, 0.0))]).unwrap());
    let reaction: TimeFn = Arc::new(|t: f64| c(1.0 + t * t, 0.0));
    let forcing = manufactured_forcing(&exact, &leading, &[], Some(reaction.clone()));
    let problem = VotfOdeProblem {
        leading_order: leading,
        lower_terms: vec![],
        reaction: Some(reaction),
        forcing,
        initial_values: initial,
        t_end,
    };
    let sol = solve_votfode(&problem, &basis).unwrap();
    for j in 1..=10 {
        let t = t_end * j as f64 / 10.0;
        let got = sol.eval(t).unwrap();
        let want = exact.eval(t);
        assert!(
            (got - want).norm() <= 1e-10 * (1.0 + want.norm()),
            "t = {t}: {got} vs {want}"
        );
    }

    // Without the reaction hook the same data is inconsistent: solving the
    // problem with the coupling silently dropped must NOT reproduce exact.
    let dropped = VotfOdeProblem {
        reaction: None,
        ..problem
    };
    let wrong = solve_votfode(&dropped, &basis).unwrap();
    let t = 0.9;
    assert!((wrong.eval(t).unwrap() - exact.eval(t)).norm() > 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collocation_grid_structure(n_c in 1usize..40, t_end in 0.01f64..50.0) {
        let grid = fracspec_core::gc_points(n_c, t_end).unwrap();
        prop_assert_eq!(grid.len(), n_c);
        for j in 0..n_c {
            let t = grid.points()[j];
            prop_assert!(t > 0.0 && t < t_end);
            // Cosine symmetry about T/2.
            let mirror = grid.points()[n_c - 1 - j];
            prop_assert!((t + mirror - t_end).abs() <= 1e-12 * t_end);
        }
        for w in grid.points().windows(2) {
            prop_assert!(w[0] > w[1]);
        }
    }

    #[test]
    fn profile_canonicalization_is_idempotent(
        exps in proptest::collection::vec(0.0f64..6.0, 1..6),
        res in proptest::collection::vec(-3.0f64..3.0, 6),
    ) {
        let terms: Vec<(f64, Complex64)> = exps
            .iter()
            .zip(&res)
            .map(|(&p, &r)| (p, c(r, -r)))
            .collect();
        let once = PowerProfile::new(terms).unwrap();
        let twice = PowerProfile::new(
            once.terms().iter().map(|t| (t.exponent, t.coefficient)),
        )
        .unwrap();
        prop_assert_eq!(once, twice);
    }
}
