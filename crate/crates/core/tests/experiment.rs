use bsde_bounds::experiment::{bound, fit, run, verify, BoundKind, ExperimentConfig, ExperimentResult};
use bsde_bounds::Error;

fn stopping(method: &str, k_max: usize) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "model": {{"preset": "binomial-stopping"}},
            "method": "{method}",
            "paths": {{"outer": 64, "middle": 1, "regression": 400, "mini": 50, "test": 50}},
            "k_max": {k_max},
            "enumerate": true,
            "lower_martingale": "nested",
            "seed": 3
        }}"#
    ))
    .unwrap()
}

fn funding_small() -> ExperimentConfig {
    ExperimentConfig::from_json(
        r#"{
            "model": {"preset": "bsz-funding-5d"},
            "method": "lsmc",
            "J": [4],
            "rho": [0.3, -0.3],
            "paths": {"outer": 40, "middle": 8, "regression": 2000},
            "k_max": 1,
            "seed": 9
        }"#,
    )
    .unwrap()
}

#[test]
fn enumerated_stopping_rows_are_exact() {
    let res = run(&stopping("lsmc", 2)).unwrap();
    assert_eq!(res.rows.len(), 6);
    for r in &res.rows {
        assert!((r.mean - 1.5625).abs() < 1e-10, "{r:?}");
        assert!(r.sd < 1e-10 && r.half_width < 1e-10);
    }
}

#[test]
fn generic_stopping_bounds_reach_the_value_after_two_steps() {
    let res = run(&stopping("generic-minimization", 2)).unwrap();
    let k2: Vec<_> = res.rows.iter().filter(|r| r.k == 2).collect();
    assert_eq!(k2.len(), 2);
    for r in k2 {
        assert!((r.mean - 1.5625).abs() < 1e-10 && r.sd < 1e-10, "{r:?}");
    }
    let up0 = res.rows.iter().find(|r| r.k == 0 && r.kind == BoundKind::Up).unwrap();
    assert!(up0.mean > 1.5625);
}

#[test]
fn unknown_fields_are_rejected() {
    let err = ExperimentConfig::from_json(
        r#"{"model": {"preset": "bsz-funding-5d"}, "method": "lsmc", "paths": {"outer": 2, "middle": 1}, "k_max": 0, "colour": 1}"#,
    );
    assert!(err.is_err());
    let err = ExperimentConfig::from_json(
        r#"{"model": {"preset": "nope"}, "method": "lsmc", "paths": {"outer": 2, "middle": 1}, "k_max": 0}"#,
    );
    assert!(err.is_err());
}

#[test]
fn csv_is_reproducible_and_json_round_trips() {
    let cfg = funding_small();
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.rows.len(), 2 * 2 * 2);
    assert_eq!(a.rows[0].rho, Some(0.3));
    assert_eq!(a.rows[4].rho, Some(-0.3));
    let back = ExperimentResult::from_json(&a.to_json().unwrap()).unwrap();
    assert_eq!(back, a);
    assert_eq!(back.to_csv(), a.to_csv());
}

#[test]
fn fit_then_bound_matches_run() {
    let cfg = funding_small();
    let fits = fit(&cfg).unwrap();
    assert_eq!(fits.len(), 2);
    let split = bound(&cfg, &fits).unwrap();
    assert_eq!(split.to_csv(), run(&cfg).unwrap().to_csv());
}

#[test]
fn truncation_violation_aborts_with_slack() {
    let mut cfg = funding_small();
    let mut p = bsde_bounds::models::FundingParams::benchmark();
    p.truncation = 10.0;
    cfg.model = bsde_bounds::experiment::ModelConfig::Funding(p);
    match run(&cfg).unwrap_err().root() {
        Error::Truncation { slack, .. } => assert!(*slack < 0.0),
        e => panic!("unexpected error {e}"),
    }
    let report = verify(&cfg).unwrap();
    assert!(!report.passed());
    assert!(report.truncation_failure().unwrap().detail.contains("slack -"));
}

#[test]
fn verify_is_green_on_the_presets() {
    let mut cfg = funding_small();
    cfg.verify_samples = 4000;
    let report = verify(&cfg).unwrap();
    assert!(report.passed(), "{report}");
    let report = verify(&stopping("lsmc", 0)).unwrap();
    assert!(report.passed(), "{report}");
}
