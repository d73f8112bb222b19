mod common;

use std::sync::Arc;

use bsde_bounds::approx::{build_input_providers, one_step_consistency, BasisSet, InputApproximation};
use bsde_bounds::dp::{DynamicProgram, MarkovModel};
use bsde_bounds::exact::solve_exact;
use bsde_bounds::models::black_scholes::call_expectation;
use bsde_bounds::models::*;
use bsde_bounds::path::Path;
use bsde_bounds::pathwise::Increments;
use bsde_bounds::stats::{Layer, SeededStreamFactory};
use common::assert_close;
use proptest::prelude::*;

fn benchmark() -> FundingModel {
    FundingModel::new(FundingParams::benchmark()).unwrap()
}

fn unit(i: usize) -> Vec<f64> {
    let mut z = vec![0.0; 6];
    z[i] = 1.0;
    z
}

#[test]
fn generator_at_unit_vector() {
    let fm = benchmark();
    assert_close(fm.generator(0, &[100.0; 5], &unit(0)), 0.999875, 1e-15);
}

#[test]
fn maximizer_branches() {
    let fm = benchmark();
    let x = [100.0; 5];
    let mut u = vec![0.0; 6];
    let mut expected = vec![0.0; 6];
    fm.maximizer(0, &x, &unit(0), &mut u);
    fm.control_at_rate(0.01, &mut expected);
    assert_eq!(u, expected);
    let neg: Vec<f64> = unit(0).iter().map(|v| -v).collect();
    fm.maximizer(0, &x, &neg, &mut u);
    fm.control_at_rate(0.06, &mut expected);
    assert_eq!(u, expected);
}

#[test]
fn independent_assets_have_diagonal_inverse() {
    let fm = FundingModel::new(FundingParams::benchmark().with_grid(20, 0.0)).unwrap();
    for rs in fm.inv_row_sums() {
        assert_close(*rs, 5.0, 1e-12);
    }
}

#[test]
fn zero_increment_moves_by_drift() {
    let fm = benchmark();
    let x = [90.0, 95.0, 100.0, 105.0, 110.0];
    let mut out = [0.0; 5];
    fm.gbm_step(&x, &[0.0; 5], &mut out);
    for n in 0..5 {
        let s2: f64 = (0..5).map(|l| fm.sigma(n, l).powi(2)).sum();
        assert_close(out[n], x[n] * ((0.05 - 0.5 * s2) * fm.dt()).exp(), 1e-12);
    }
}

#[test]
fn one_step_growth_matches_lognormal_mean() {
    let fm = benchmark();
    let factory = SeededStreamFactory::new(17);
    let n = 1_000_000;
    let mut sum = [0.0; 5];
    let mut sq = [0.0; 5];
    let mut b = vec![0.0; fm.innovation_dim()];
    let mut x = [0.0; 5];
    let mut stream = factory.stream(factory.top_label(Layer::Diagnostics, 0));
    for _ in 0..n {
        fm.sample_innovation(1, &mut stream, &mut b);
        fm.step(1, &[100.0; 5], &b, &mut x);
        for d in 0..5 {
            let r = x[d] / 100.0;
            sum[d] += r;
            sq[d] += r * r;
        }
    }
    let target = (0.05 * fm.dt()).exp();
    for d in 0..5 {
        let mean = sum[d] / n as f64;
        let se = ((sq[d] / n as f64 - mean * mean) / n as f64).sqrt();
        assert!(
            (mean - target).abs() < 4.0 * se,
            "asset {d}: {mean} vs {target} (se {se})"
        );
    }
}

#[test]
fn truncation_examples() {
    let benchmark = check_truncation(&FundingParams::benchmark()).unwrap();
    assert!(benchmark.holds && benchmark.slack > 0.0);
    let mut p = FundingParams::benchmark();
    p.truncation = 0.0;
    let zero = check_truncation(&p).unwrap();
    assert!(zero.holds);
    assert_close(zero.lhs, 0.06 * 0.0125, 1e-15);
    for c in [10.0, 1e3] {
        p.truncation = c;
        let r = check_truncation(&p).unwrap();
        assert!(!r.holds && r.slack < 0.0, "C={c}: {r:?}");
    }
}

#[test]
fn payoff_is_capped_at_strike_gap() {
    let fm = benchmark();
    for m in (0..400).map(|i| i as f64 * 0.5) {
        let g = fm.payoff(&[m, m - 1.0, 0.0, 3.0, 1.0]);
        assert!(g <= 20.0 + 1e-12);
        let expected = if m <= 95.0 {
            0.0
        } else if m <= 115.0 {
            m - 95.0
        } else {
            20.0 - (m - 115.0)
        };
        assert_close(g, expected, 1e-12);
    }
}

#[test]
fn call_expectation_matches_monte_carlo() {
    let (x, k, vol, tau) = (100.0, 95.0, 0.2, 0.25);
    let (price, _) = call_expectation(x, k, tau, vol, 0.0);
    let factory = SeededStreamFactory::new(5);
    let mut stream = factory.stream(1);
    let n = 10_000_000;
    let (mut s, mut s2) = (0.0, 0.0);
    let sd = vol * f64::sqrt(tau);
    for _ in 0..n {
        let xt = x * (-0.5 * sd * sd + sd * stream.standard_normal()).exp();
        let v = (xt - k).max(0.0);
        s += v;
        s2 += v * v;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - price).abs() < 4.0 * se, "{mean} vs {price} (se {se})");
}

#[test]
fn call_spread_basis_is_intrinsic_at_maturity() {
    let fm = FundingModel::new(FundingParams::benchmark().with_grid(4, 0.3)).unwrap();
    let basis = MaxAssetsBasis::new(&fm);
    let prev = [100.0, 120.0, 90.0, 110.0, 80.0];
    let x = [101.0, 118.0, 93.0, 125.0, 85.0];
    let mut eta = [0.0; 6];
    basis.eval(4, &prev, &[], &x, &mut eta);
    // Largest before: asset 1, second: asset 3.
    assert_eq!(&eta[..3], &[1.0, 118.0, 125.0]);
    assert_close(eta[3], 23.0 - 2.0 * 3.0, 1e-12);
    assert_close(eta[4], 20.0 - 10.0, 1e-12);
    assert_close(eta[5], 3.0, 1e-12);
}

#[test]
fn generic_basis_is_constant_with_symmetric_weights() {
    let fm = benchmark();
    let basis = generic_basis(&fm);
    let mut eta = [0.0];
    basis.eval(3, &[1.0; 5], &[], &[2.0; 5], &mut eta);
    assert_eq!(eta, [1.0]);
    let mut r = vec![0.0; 6];
    basis.one_step(0, &[100.0; 5], &mut r);
    assert_eq!(r, unit(0));
}

/// `ΔM̃ = (0, a·p_C(ΔW_d)/Δ)` for the constant approximation `a`.
#[test]
fn generic_input_martingale_increments() {
    let fm = benchmark();
    let basis: Arc<dyn BasisSet> = Arc::new(generic_basis(&fm));
    let a = 16.5;
    let prov = build_input_providers(InputApproximation::global(basis.as_ref(), 20, vec![a]), basis, &fm).unwrap();
    let factory = SeededStreamFactory::new(8);
    let path = Path::simulate(&fm, 20, factory.top_label(Layer::Outer, 0), &factory);
    let mut inc = Increments::new(20, 6);
    prov.martingale().fill(&path, 0, &mut inc).unwrap();
    for j in 0..20 {
        let dm = inc.get(j);
        assert_eq!(dm[0], 0.0);
        let dw = &path.innovation(j + 1)[6..];
        for d in 0..5 {
            assert_close(dm[d + 1], a * fm.clamp(dw[d]) / fm.dt(), 1e-12);
        }
    }
}

#[test]
fn one_step_expectations_match_monte_carlo() {
    let fm = benchmark();
    let factory = SeededStreamFactory::new(21);
    let path = Path::simulate(&fm, 20, factory.top_label(Layer::Outer, 3), &factory);
    let bases: Vec<Arc<dyn BasisSet>> = vec![Arc::new(generic_basis(&fm)), Arc::new(MaxAssetsBasis::new(&fm))];
    for basis in bases {
        for j in [0, 10, 19] {
            let r = one_step_consistency(basis.as_ref(), &fm, &path, j, Some(1_000_000), 4.0, &factory).unwrap();
            assert!(r.passed, "{} at j={j}: {r:?}", basis.id());
        }
    }
}

#[test]
fn stopping_with_zero_reward_is_zero() {
    let params = StoppingParams {
        reward: Reward::Zero,
        steps: 3,
        ..StoppingParams::binomial()
    };
    let (dp, model) = stopping_model(&params).unwrap();
    let tree = solve_exact(&dp, &model).unwrap();
    assert!(tree.levels.iter().flatten().all(|n| n.value == 0.0));
}

#[test]
fn stopping_rejects_mismatched_support() {
    let params = StoppingParams {
        probabilities: vec![1.0],
        ..StoppingParams::binomial()
    };
    assert!(stopping_model(&params).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn funding_generator_is_convex_and_attained(
        z1 in prop::collection::vec(-50.0f64..50.0, 6),
        z2 in prop::collection::vec(-50.0f64..50.0, 6),
        t in 0.0f64..1.0,
    ) {
        let fm = benchmark();
        let x = [100.0; 5];
        let mid: Vec<f64> = z1.iter().zip(&z2).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let lhs = fm.generator(0, &x, &mid);
        let rhs = t * fm.generator(0, &x, &z1) + (1.0 - t) * fm.generator(0, &x, &z2);
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs.abs()));
        let mut u = vec![0.0; 6];
        fm.maximizer(0, &x, &z1, &mut u);
        let dot: f64 = u.iter().zip(&z1).map(|(a, b)| a * b).sum();
        prop_assert_eq!(fm.conjugate(0, &x, &u), 0.0);
        prop_assert!((dot - fm.generator(0, &x, &z1)).abs() <= 1e-10);
    }

    #[test]
    fn equal_rates_make_the_generator_linear(z in prop::collection::vec(-50.0f64..50.0, 6), r in -0.02f64..0.08) {
        let mut p = FundingParams::benchmark();
        p.r_lend = r;
        p.r_borrow = r;
        let fm = FundingModel::new(p).unwrap();
        let pos: f64 = z[1..].iter().zip(fm.inv_row_sums()).map(|(a, b)| a * b).sum();
        let expected = (1.0 - r * fm.dt()) * z[0] - (0.05 - r) * fm.dt() * pos;
        prop_assert!((fm.generator(0, &[1.0; 5], &z) - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
    }
}
