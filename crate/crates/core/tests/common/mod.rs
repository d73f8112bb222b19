#![allow(dead_code)]

use bsde_bounds::dp::{Atom, DynamicProgram};
use bsde_bounds::exact::FiniteSupportModel;
use bsde_bounds::models::{stopping_model, StoppingParams, StoppingProblem};
use proptest::prelude::*;

pub const TOL: f64 = 1e-10;

pub fn binomial() -> (StoppingProblem, FiniteSupportModel) {
    stopping_model(&StoppingParams::binomial()).unwrap()
}

/// `f(x, z) = z_0` with a constant terminal value.
#[derive(Debug, Clone)]
pub struct Linear {
    pub horizon: usize,
    pub d: usize,
    pub terminal: f64,
}

impl DynamicProgram for Linear {
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn weight_dim(&self) -> usize {
        self.d
    }
    fn generator(&self, _: usize, _: &[f64], z: &[f64]) -> f64 {
        z[0]
    }
    fn conjugate(&self, _: usize, _: &[f64], u: &[f64]) -> f64 {
        let unit = u[0] == 1.0 && u[1..].iter().all(|v| *v == 0.0);
        if unit {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn maximizer(&self, _: usize, _: &[f64], _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[0] = 1.0;
    }
    fn terminal(&self, _: &[f64]) -> f64 {
        self.terminal
    }
}

/// Convex piecewise-linear generator `f(x, z) = max_i (u_i·z + a_i x_0 + b_i)`
/// with `u_i = (1, v_i)`, `|v_i| ≤ ½`, so `u_i·β ≥ ½` for `β = (1, w)`,
/// `|w| ≤ 1`. The conjugate is finite on the vertices only.
#[derive(Debug, Clone)]
pub struct MaxAffine {
    pub horizon: usize,
    pub pieces: Vec<(f64, f64, f64)>,
    pub terminal_slope: f64,
}

impl MaxAffine {
    fn piece_value(&self, i: usize, x: &[f64], z: &[f64]) -> f64 {
        let (v, a, b) = self.pieces[i];
        z[0] + v * z[1] + a * x[0] + b
    }
}

impl DynamicProgram for MaxAffine {
    fn horizon(&self) -> usize {
        self.horizon
    }
    fn weight_dim(&self) -> usize {
        2
    }
    fn generator(&self, _: usize, x: &[f64], z: &[f64]) -> f64 {
        (0..self.pieces.len())
            .map(|i| self.piece_value(i, x, z))
            .fold(f64::NEG_INFINITY, f64::max)
    }
    fn conjugate(&self, _: usize, x: &[f64], u: &[f64]) -> f64 {
        self.pieces
            .iter()
            .filter(|(v, _, _)| (u[0] - 1.0).abs() < 1e-14 && (u[1] - v).abs() < 1e-14)
            .map(|(_, a, b)| -(a * x[0] + b))
            .fold(f64::INFINITY, f64::min)
    }
    fn maximizer(&self, _: usize, x: &[f64], z: &[f64], out: &mut [f64]) {
        let mut best = 0;
        for i in 1..self.pieces.len() {
            if self.piece_value(i, x, z) > self.piece_value(best, x, z) {
                best = i;
            }
        }
        out[0] = 1.0;
        out[1] = self.pieces[best].0;
    }
    fn terminal(&self, x: &[f64]) -> f64 {
        self.terminal_slope * x[0] + (x[0] * 1.7).sin()
    }
}

/// Random walk `X_j = X_{j−1} + w_j` with innovation `(1, w)`.
pub fn walk_model(x0: f64, steps: Vec<Vec<(f64, f64)>>) -> FiniteSupportModel {
    let atoms = steps
        .into_iter()
        .map(|s| {
            s.into_iter()
                .map(|(w, p)| Atom {
                    innovation: vec![1.0, w],
                    prob: p,
                })
                .collect()
        })
        .collect();
    FiniteSupportModel::new(vec![x0], atoms, |_, x, b, out| out[0] = x[0] + b[1]).unwrap()
}

/// Probabilities summing to one exactly up to rounding in the last entry.
pub fn normalize(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|r| r / total).collect();
    let head: f64 = p[..p.len() - 1].iter().sum();
    *p.last_mut().unwrap() = 1.0 - head;
    p
}

pub fn step_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, 0.1f64..1.0), 1..=3).prop_map(|v| {
        let (ws, raw): (Vec<f64>, Vec<f64>) = v.into_iter().unzip();
        ws.into_iter().zip(normalize(&raw)).collect()
    })
}

/// A random walk model with `1..=4` steps and `1..=3` atoms per step.
pub fn walk_strategy() -> impl Strategy<Value = (f64, Vec<Vec<(f64, f64)>>)> {
    (-2.0f64..2.0, prop::collection::vec(step_strategy(), 1..=4))
}

pub fn max_affine_strategy(horizon: usize) -> impl Strategy<Value = MaxAffine> {
    (
        prop::collection::vec((-0.5f64..0.5, -1.0f64..1.0, -1.0f64..1.0), 1..=3),
        -1.0f64..1.0,
    )
        .prop_map(move |(pieces, terminal_slope)| MaxAffine {
            horizon,
            pieces,
            terminal_slope,
        })
}

pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
}
