//! Compares parallel and sequential mode sweeps on a representative
//! multi-mode solve (Gaussian diffusion profile, two fractional terms).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use fracspec_core::muntz::MuntzBasis;
use fracspec_core::pipeline::{
    real_space_fn, real_space_time_fn, solve_pde, solve_pde_serial, BoundarySpec, PdeProblem,
    PdeTerm, SolveConfig, TermSide,
};
use fracspec_core::profile::PowerProfile;
use fracspec_core::spectral::SpatialSymbol;
use fracspec_core::{caputo_power, muntz, BoxDomain, OrderFunction};

fn gaussian_problem() -> PdeProblem {
    let t_end = 1.0;
    let order = OrderFunction::new(2, t_end, |t| 1.9 + t / 20.0).unwrap();
    let order1 = OrderFunction::new(2, t_end, |t| 1.6 + t.sin() / 5.0).unwrap();
    let bump = |x: f64| (-100.0 * (x - 0.2) * (x - 0.2)).exp();
    let bump_dd = move |x: f64| {
        let g = bump(x);
        (-200.0 + 40_000.0 * (x - 0.2) * (x - 0.2)) * g
    };
    let forcing = {
        let order = order.clone();
        let order1 = order1.clone();
        real_space_time_fn(move |x: &[f64], t: f64| {
            let caputo_sum = caputo_power(2.0, &order, t).unwrap()
                + caputo_power(2.0, &order1, t).unwrap();
            bump(x[0]) * caputo_sum - bump_dd(x[0]) * t * t
        })
    };
    PdeProblem {
        domain: BoxDomain::interval(1.0).unwrap(),
        t_end,
        leading_order: order,
        terms: vec![
            PdeTerm {
                side: TermSide::LhsTime,
                order: Some(order1),
                coefficient: muntz::const_time_fn(1.0),
                symbol: SpatialSymbol::Identity,
            },
            PdeTerm {
                side: TermSide::RhsSpatial,
                order: None,
                coefficient: muntz::const_time_fn(1.0),
                symbol: SpatialSymbol::Laplacian,
            },
        ],
        forcing,
        boundary: BoundarySpec::Dirichlet1d {
            left: PowerProfile::monomial(2.0, (-4.0_f64).exp()).unwrap(),
            right: PowerProfile::monomial(2.0, (-64.0_f64).exp()).unwrap(),
        },
        initial: vec![real_space_fn(|_| 0.0), real_space_fn(|_| 0.0)],
    }
}

fn bench_mode_sweep(c: &mut Criterion) {
    let problem = gaussian_problem();
    let basis = MuntzBasis::for_order(&problem.leading_order, 5, 0.25).unwrap();
    let mut group = c.benchmark_group("mode_sweep");
    group.sample_size(10);
    for &n in &[64_usize, 256] {
        let config = SolveConfig::new(n, n + 16);
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, _| {
            b.iter(|| solve_pde(&problem, &basis, &config).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, _| {
            b.iter(|| solve_pde_serial(&problem, &basis, &config).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mode_sweep);
criterion_main!(benches);
