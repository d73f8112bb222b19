mod common;

use bsde_bounds::exact::{conditional_expectation, solve_exact};
use bsde_bounds::improve::NestedEstimatorConfig;
use bsde_bounds::models::{FundingModel, FundingParams};
use bsde_bounds::stats::{generate_bundle, summarize, SeededStreamFactory};
use common::{binomial, TOL};

fn config(outer: usize, middle: usize, inner: usize, enumerate: bool) -> NestedEstimatorConfig {
    NestedEstimatorConfig {
        outer,
        middle,
        inner,
        use_control_variates: false,
        seed: 11,
        enumerate,
        lower_martingale: Default::default(),
    }
}

#[test]
fn single_outer_path_has_one_middle_path_per_branch_time() {
    let (_, model) = binomial();
    let f = SeededStreamFactory::new(3);
    let bundle = generate_bundle(&model, 2, &config(1, 1, 0, false), &f).unwrap();
    assert_eq!(bundle.outer.len(), 1);
    assert_eq!(bundle.middle_count(), 2);
    assert_eq!(bundle.inner_count(), 0);
}

#[test]
fn inner_paths_branch_off_every_middle_path() {
    let fm = FundingModel::new(FundingParams::benchmark().with_grid(4, 0.3)).unwrap();
    let f = SeededStreamFactory::new(3);
    let bundle = generate_bundle(&fm, 4, &config(2, 3, 2, false), &f).unwrap();
    assert_eq!(bundle.middle_count(), 2 * 4 * 3);
    // Middle branches at j = 0..3 have 3, 2, 1, 0 later branch times.
    assert_eq!(bundle.inner_count(), 2 * 3 * (3 + 2 + 1) * 2);
    for o in &bundle.outer {
        for (j, branches) in o.middle.iter().enumerate() {
            for b in branches {
                assert_eq!(b.path.state(j), o.path.state(j));
                assert_ne!(b.path.state(j + 1), o.path.state(j + 1));
                assert!((b.weight - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn same_seed_gives_identical_bundles() {
    let fm = FundingModel::new(FundingParams::benchmark().with_grid(3, 0.3)).unwrap();
    let f = SeededStreamFactory::new(99);
    let cfg = config(4, 2, 1, false);
    let a = generate_bundle(&fm, 3, &cfg, &f).unwrap();
    let b = generate_bundle(&fm, 3, &cfg, &f).unwrap();
    assert_eq!(a, b);
    let c = generate_bundle(&fm, 3, &cfg, &SeededStreamFactory::new(100)).unwrap();
    assert_ne!(a, c);
}

#[test]
fn enumeration_mode_reproduces_exact_conditional_expectations() {
    let (dp, model) = binomial();
    let tree = solve_exact(&dp, &model).unwrap();
    let f = SeededStreamFactory::new(5);
    let bundle = generate_bundle(&model, 2, &config(8, 1, 1, true), &f).unwrap();
    for o in &bundle.outer {
        for (j, branches) in o.middle.iter().enumerate() {
            let total: f64 = branches.iter().map(|b| b.weight).sum();
            assert!((total - 1.0).abs() < TOL);
            let est: f64 = branches
                .iter()
                .map(|b| b.weight * tree.node(&b.path, j + 1).unwrap().value)
                .sum();
            let exact = conditional_expectation(&model, &o.path, j, |p| Ok(tree.node(p, j + 1)?.value)).unwrap();
            assert!((est - exact).abs() < TOL, "j={j}: {est} vs {exact}");
            assert!((est - tree.node(&o.path, j).unwrap().z[0]).abs() < TOL);
        }
    }
}

#[test]
fn summaries_of_simple_samples() {
    let s = summarize(&[1.0, 2.0, 3.0], 0.05).unwrap();
    assert_eq!((s.mean, s.sd), (2.0, 1.0));
    let c = summarize(&[4.0; 10], 0.05).unwrap();
    assert_eq!((c.sd, c.half_width), (0.0, 0.0));
    assert!(summarize(&[1.0], 0.05).is_err());
}
