"""Smoke test for the Python bindings.

Build and install the extension first:

    pip install --no-build-isolation ./crates/python
    python3 python/smoke_test.py
"""

import json
import math

import bsde_bounds as bb

STOPPING = {
    "model": {"preset": bb.STOPPING_PRESET},
    "method": "lsmc",
    "J": [2],
    "paths": {"outer": 2, "middle": 1, "regression": 1000},
    "k_max": 2,
    "enumerate": True,
    "lower_martingale": "nested",
}

FUNDING = {
    "model": {"preset": bb.FUNDING_PRESET},
    "method": "generic-minimization",
    "J": [4],
    "rho": [0.3],
    "paths": {"outer": 40, "middle": 5, "mini": 50, "test": 50},
    "gammas": [0.0, 0.25],
    "k_max": 1,
    "seed": 7,
}


def test_exact_stopping():
    assert bb.StoppingParams.binomial().solve_exact() == 1.5625
    result = bb.run(bb.ExperimentConfig(json.dumps(STOPPING)))
    assert len(result) == 6
    for row in result.rows:
        assert abs(row.mean - 1.5625) < 1e-10, row
        assert row.sd == 0.0
    assert result.row("low", 2).kind == "low"


def test_funding_pipeline():
    cfg = bb.ExperimentConfig(json.dumps(FUNDING))
    assert cfg.seed == 7 and cfg.method == "generic-minimization" and cfg.J == [4]
    result = bb.run(cfg)
    up0, low0 = result.row("up", 0), result.row("low", 0)
    assert up0.count == 40 and math.isfinite(up0.mean) and low0.mean < up0.mean + 3 * up0.sd
    assert result.to_csv().splitlines()[0].startswith("method,J,rho,kind,k,mean")

    again = bb.bound(cfg, bb.fit(cfg))
    assert again.to_csv() == result.to_csv()

    echoed = bb.ExperimentResult.from_json(result.to_json())
    assert echoed.to_csv() == result.to_csv()
    assert json.loads(result.to_json())["config"]["seed"] == 7


def test_verify_and_truncation():
    report = bb.verify(bb.ExperimentConfig(json.dumps(STOPPING)))
    assert report.passed, str(report)
    assert any(name.startswith("binomial oracle") for name, _, _ in report.checks)

    params = bb.FundingParams.benchmark()
    holds, lhs, slack = params.check_truncation()
    assert holds and lhs < 1.0 and slack > 0.0
    params.truncation = 10.0
    assert params.check_truncation()[0] is False

    wide = dict(FUNDING, model={"funding": json.loads(params.to_json())}, rho=[0.3])
    try:
        bb.run(bb.ExperimentConfig(json.dumps(wide)))
    except bb.TruncationError as err:
        assert err.slack < 0.0
    else:
        raise AssertionError("expected TruncationError")


def test_summarize_and_errors():
    est = bb.summarize([1.0, 2.0, 3.0, 4.0])
    assert est.mean == 2.5 and est.count == 4
    assert abs(est.std_error - est.sd / 2.0) < 1e-15
    for bad in ['{"colour": 1}', json.dumps(dict(STOPPING, alpha=2.0))]:
        try:
            bb.ExperimentConfig(bad)
        except ValueError:
            pass
        else:
            raise AssertionError(f"accepted {bad}")


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
    print("python smoke test passed")
