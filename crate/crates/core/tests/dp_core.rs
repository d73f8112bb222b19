mod common;

use bsde_bounds::dp::{check_monotonicity, Atom, DynamicProgram, MarkovModel};
use bsde_bounds::exact::{check_comparison, solve_exact, FiniteSupportModel};
use bsde_bounds::models::{FundingModel, FundingParams};
use bsde_bounds::stats::SeededStreamFactory;
use bsde_bounds::Error;
use common::*;
use proptest::prelude::*;

#[test]
fn binomial_stopping_value() {
    let (dp, model) = binomial();
    let tree = solve_exact(&dp, &model).unwrap();
    assert_close(tree.root_value(), 1.5625, TOL);
    let level1: Vec<f64> = tree.levels[1].iter().map(|n| n.value).collect();
    assert_eq!(level1, vec![2.5, 0.625]);
    assert_eq!(tree.levels[2].len(), 4);
}

#[test]
fn linear_generator_keeps_constant_terminal() {
    for horizon in 1..=4 {
        let dp = Linear {
            horizon,
            d: 2,
            terminal: 5.0,
        };
        let model = walk_model(0.0, vec![vec![(0.5, 0.25), (-0.2, 0.75)]; horizon]);
        let tree = solve_exact(&dp, &model).unwrap();
        for level in &tree.levels {
            for n in level {
                assert_close(n.value, 5.0, TOL);
            }
        }
    }
}

/// One asset, equal rates: one step of the funding recursion by hand.
#[test]
fn funding_single_step_equal_rates() {
    let params = FundingParams {
        r_lend: 0.03,
        r_borrow: 0.03,
        mu: 0.05,
        sigma_base: 0.2,
        rho: 0.0,
        x0: vec![100.0],
        k1: 95.0,
        k2: 115.0,
        maturity: 0.25,
        steps: 1,
        truncation: 0.77,
    };
    let fm = FundingModel::new(params.clone()).unwrap();
    let dt = 0.25;
    let ws = [0.3, -0.2];
    let atoms: Vec<Atom> = ws
        .iter()
        .map(|&w| Atom {
            innovation: fm.innovation(&[w]),
            prob: 0.5,
        })
        .collect();
    let step_model = fm.clone();
    let model = FiniteSupportModel::new(vec![100.0], vec![atoms], move |j, x, b, out| {
        step_model.step(j, x, b, out)
    })
    .unwrap();
    let tree = solve_exact(&fm, &model).unwrap();

    let payoff = |w: f64| {
        let x = 100.0 * ((0.05 - 0.5 * 0.04) * dt + 0.2 * w).exp();
        (x - 95.0f64).max(0.0) - 2.0 * (x - 115.0f64).max(0.0)
    };
    let eg = 0.5 * (payoff(0.3) + payoff(-0.2));
    let ewg = 0.5 * (0.3 * payoff(0.3) - 0.2 * payoff(-0.2));
    let want = (1.0 - 0.03 * dt) * eg - (0.05 - 0.03) * dt * (1.0 / 0.2) * ewg / dt;
    assert_close(tree.root_value(), want, 1e-12);
}

#[test]
fn tree_size_guard() {
    let model = walk_model(0.0, vec![vec![(0.1, 0.5), (-0.1, 0.5)]; 21]);
    let dp = Linear {
        horizon: 21,
        d: 2,
        terminal: 0.0,
    };
    assert!(matches!(solve_exact(&dp, &model), Err(Error::SizeLimit { .. })));
}

#[test]
fn non_finite_generator_names_node() {
    struct Bad;
    impl DynamicProgram for Bad {
        fn horizon(&self) -> usize {
            2
        }
        fn weight_dim(&self) -> usize {
            1
        }
        fn generator(&self, j: usize, _: &[f64], z: &[f64]) -> f64 {
            if j == 1 {
                f64::NAN
            } else {
                z[0]
            }
        }
        fn conjugate(&self, _: usize, _: &[f64], _: &[f64]) -> f64 {
            0.0
        }
        fn maximizer(&self, _: usize, _: &[f64], _: &[f64], out: &mut [f64]) {
            out[0] = 1.0;
        }
        fn terminal(&self, x: &[f64]) -> f64 {
            x[0]
        }
    }
    let (_, model) = binomial();
    match solve_exact(&Bad, &model) {
        Err(Error::NonFinite { j, context }) => {
            assert_eq!(j, 1);
            assert!(context.contains("node 0"), "{context}");
        }
        other => panic!("expected a numeric error, got {other:?}"),
    }
}

#[test]
fn comparison_examples() {
    let (dp, model) = binomial();
    let tree = solve_exact(&dp, &model).unwrap();
    assert!(check_comparison(&tree, &tree).unwrap());
    assert!(check_comparison(&tree, &tree.shifted(1.0)).unwrap());
    let mut raised = tree.clone();
    raised.levels[0][0].value += 1.0;
    assert!(!check_comparison(&raised, &tree).unwrap());

    let other = solve_exact(
        &Linear {
            horizon: 2,
            d: 1,
            terminal: 0.0,
        },
        &walk_model(0.0, vec![vec![(0.0, 1.0)]; 2]),
    )
    .unwrap();
    assert!(matches!(check_comparison(&tree, &other), Err(Error::Structure(_))));
}

#[test]
fn monotonicity_holds_for_funding_benchmark() {
    let fm = FundingModel::new(FundingParams::benchmark()).unwrap();
    let report = check_monotonicity(&fm, &fm, 10_000, &SeededStreamFactory::new(7));
    assert!(report.passed(), "{:?}", report.violations.first());
    assert!(report.checked >= 10_000 * 243);
}

#[test]
fn monotonicity_fails_without_truncation() {
    let mut params = FundingParams::benchmark();
    params.truncation = 100.0;
    let fm = FundingModel::new(params).unwrap();
    let report = check_monotonicity(&fm, &fm, 200, &SeededStreamFactory::new(7));
    assert!(!report.passed());
    let v = &report.violations[0];
    assert!(v.value < 0.0);
}

#[test]
fn monotonicity_holds_for_stopping() {
    let (dp, model) = binomial();
    assert!(check_monotonicity(&dp, &model, 1000, &SeededStreamFactory::new(3)).passed());
}

fn duality_checks(dp: &dyn DynamicProgram, x: &[f64], z: &[f64], u_other: &[f64]) {
    let d = dp.weight_dim();
    let mut u = vec![0.0; d];
    dp.maximizer(0, x, z, &mut u);
    let conj = dp.conjugate(0, x, &u);
    assert!(conj.is_finite());
    let lhs: f64 = u.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() - conj;
    let f = dp.generator(0, x, z);
    assert!((lhs - f).abs() <= 1e-10 * (1.0 + f.abs()), "{lhs} vs {f}");
    let c = dp.conjugate(0, x, u_other);
    if c.is_finite() {
        let v: f64 = u_other.iter().zip(z).map(|(a, b)| a * b).sum::<f64>() - c;
        assert!(v <= f + 1e-12 * (1.0 + f.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn funding_duality_and_fenchel(
        z in prop::collection::vec(-50.0f64..50.0, 6),
        z2 in prop::collection::vec(-50.0f64..50.0, 6),
        lam in 0.0f64..1.0,
        s in 0.01f64..0.06,
    ) {
        let fm = FundingModel::new(FundingParams::benchmark()).unwrap();
        let x = [100.0; 5];
        let mut u = vec![0.0; 6];
        fm.control_at_rate(s, &mut u);
        duality_checks(&fm, &x, &z, &u);
        let mid: Vec<f64> = z.iter().zip(&z2).map(|(a, b)| lam * a + (1.0 - lam) * b).collect();
        let convex = lam * fm.generator(0, &x, &z) + (1.0 - lam) * fm.generator(0, &x, &z2);
        prop_assert!(fm.generator(0, &x, &mid) <= convex + 1e-12 * (1.0 + convex.abs()));
    }

    #[test]
    fn stopping_duality_and_fenchel(x in 0.1f64..5.0, z in -5.0f64..5.0, u in 0.0f64..1.0) {
        let (dp, _) = binomial();
        duality_checks(&dp, &[x], &[z], &[u]);
        prop_assert_eq!(dp.conjugate(0, &[x], &[1.5]), f64::INFINITY);
    }

    #[test]
    fn solve_exact_is_permutation_invariant((x0, steps) in walk_strategy(), seed in any::<u64>()) {
        let horizon = steps.len();
        let dp = MaxAffine { horizon, pieces: vec![(0.2, 0.3, 0.0), (-0.4, -0.1, 0.5)], terminal_slope: 0.7 };
        let model = walk_model(x0, steps);
        let tree = solve_exact(&dp, &model).unwrap();
        let mut permuted = model.clone();
        permuted.permute_support(|j, n| {
            let mut p: Vec<usize> = (0..n).collect();
            p.rotate_left(((seed >> j) as usize) % n);
            p
        });
        let other = solve_exact(&dp, &permuted).unwrap();
        prop_assert!((tree.root_value() - other.root_value()).abs() < TOL);
        for (a, b) in tree.levels.iter().zip(&other.levels) {
            let mut va: Vec<f64> = a.iter().map(|n| n.value).collect();
            let mut vb: Vec<f64> = b.iter().map(|n| n.value).collect();
            va.sort_by(f64::total_cmp);
            vb.sort_by(f64::total_cmp);
            for (p, q) in va.iter().zip(&vb) {
                prop_assert!((p - q).abs() < TOL);
            }
        }
    }

    #[test]
    fn weights_are_leading_innovation_coordinates(seed in any::<u64>()) {
        let fm = FundingModel::new(FundingParams::benchmark()).unwrap();
        let f = SeededStreamFactory::new(seed);
        let mut s = f.stream(1);
        let mut b = vec![0.0; fm.innovation_dim()];
        fm.sample_innovation(1, &mut s, &mut b);
        prop_assert_eq!(bsde_bounds::dp::weights(&b, 6), &b[..6]);
        let mut x1 = vec![0.0; 5];
        let mut x2 = vec![0.0; 5];
        fm.step(1, &[100.0; 5], &b, &mut x1);
        fm.step(1, &[100.0; 5], &b, &mut x2);
        prop_assert_eq!(x1, x2);
    }
}
