//! Convex dynamic programs in Markovian form.
//!
//! The value process solves
//!
//! ```text
//! Y_J = g(X_J),   Y_j = f_j(X_j, E_j[β_{j+1} Y_{j+1}]),   j = J−1, …, 0
//! ```
//!
//! where `z ↦ f_j(x, z)` is convex, the state moves as `X_j = h_j(X_{j−1}, B_j)`
//! with independent innovations `B_j`, and the weights `β_j` are the first `D`
//! coordinates of `B_j`.

use serde::{Deserialize, Serialize};

use crate::path::Path;
use crate::stats::rng::{derive_label, Layer, RandomStream, SeededStreamFactory};

/// Generator, conjugate, maximizer and terminal payoff of a convex program.
///
/// All methods must be pure: implementations are evaluated concurrently.
pub trait DynamicProgram: Sync {
    /// Number of time steps `J`.
    fn horizon(&self) -> usize;

    /// Dimension `D` of the weight vector β.
    fn weight_dim(&self) -> usize;

    /// `f_j(x, z)`, convex in `z`.
    fn generator(&self, j: usize, x: &[f64], z: &[f64]) -> f64;

    /// `f_j^#(x, u)`; `f64::INFINITY` outside the effective domain.
    fn conjugate(&self, j: usize, x: &[f64], u: &[f64]) -> f64;

    /// Writes a `u` with `u·z − f_j^#(x, u) = f_j(x, z)` into `out`.
    ///
    /// Must be a deterministic selector when the maximizer is not unique.
    fn maximizer(&self, j: usize, x: &[f64], z: &[f64], out: &mut [f64]);

    fn terminal(&self, x: &[f64]) -> f64;
}

/// One support point of a finitely supported innovation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub innovation: Vec<f64>,
    pub prob: f64,
}

/// Markovian state dynamics driven by independent innovations.
pub trait MarkovModel: Sync {
    fn state_dim(&self) -> usize;

    /// Innovation dimension `𝒟 ≥ D`.
    fn innovation_dim(&self) -> usize;

    fn initial_state(&self) -> &[f64];

    /// `X_j = h_j(X_{j−1}, B_j)` for `j ≥ 1`.
    fn step(&self, j: usize, x_prev: &[f64], b: &[f64], out: &mut [f64]);

    /// Draws `B_j` into `out`; returns the atom index for finitely supported laws.
    fn sample_innovation(&self, j: usize, stream: &mut RandomStream, out: &mut [f64]) -> Option<usize>;

    /// Support of `B_j` when the law is finite.
    fn atoms(&self, _j: usize) -> Option<&[Atom]> {
        None
    }

    /// Extreme innovations used to stress the monotonicity condition.
    fn stress_innovations(&self, j: usize) -> Vec<Vec<f64>> {
        self.atoms(j)
            .map(|a| a.iter().map(|a| a.innovation.clone()).collect())
            .unwrap_or_default()
    }
}

/// `β` as the first `d` coordinates of an innovation.
#[inline]
pub fn weights(b: &[f64], d: usize) -> &[f64] {
    &b[..d]
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityViolation {
    pub j: usize,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub b: Vec<f64>,
    /// `maximizer(j, x, z)·β(b)`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub checked: usize,
    pub violation_count: usize,
    /// First violations found (capped).
    pub violations: Vec<MonotonicityViolation>,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

const MAX_REPORTED_VIOLATIONS: usize = 64;

/// Samples `(j, x, z, b)` and checks positivity of `maximizer(j, x, z)·β(b)`.
///
/// States come from simulated paths, `z` from a wide normal law, and each draw
/// of `b` is complemented by the model's stress innovations.
pub fn check_monotonicity(
    dp: &dyn DynamicProgram,
    model: &dyn MarkovModel,
    samples: usize,
    factory: &SeededStreamFactory,
) -> MonotonicityReport {
    let horizon = dp.horizon();
    let d = dp.weight_dim();
    let mut report = MonotonicityReport {
        checked: 0,
        violation_count: 0,
        violations: Vec::new(),
    };
    let mut path = Path::new(model, horizon);
    let mut b = vec![0.0; model.innovation_dim()];
    let mut u = vec![0.0; d];
    for s in 0..samples.max(1) {
        let label = factory.top_label(Layer::Diagnostics, s as u64);
        let mut stream = factory.stream(derive_label(label, &[1]));
        let j = (stream.uniform() * horizon as f64) as usize % horizon;
        path.resample_from(model, 0, label, factory);
        let x = path.state(j).to_vec();
        let z: Vec<f64> = (0..d).map(|_| 10.0 * stream.standard_normal()).collect();
        dp.maximizer(j, &x, &z, &mut u);
        model.sample_innovation(j + 1, &mut stream, &mut b);
        let mut candidates = vec![b.clone()];
        candidates.extend(model.stress_innovations(j + 1));
        for cand in candidates {
            report.checked += 1;
            let value = dot(&u, weights(&cand, d));
            if value < -1e-12 {
                report.violation_count += 1;
                if report.violations.len() < MAX_REPORTED_VIOLATIONS {
                    report.violations.push(MonotonicityViolation {
                        j,
                        x: x.clone(),
                        z: z.clone(),
                        b: cand,
                        value,
                    });
                }
            }
        }
    }
    report
}
