use serde::{Deserialize, Serialize};

use crate::approx::BasisSet;
use crate::dp::MarkovModel;
use crate::error::Result;
use crate::improve::{for_each_branch, Branching, Sampling};
use crate::path::Path;
use crate::stats::rng::{Layer, SeededStreamFactory};

/// Comparison of a closed-form `R_j(X_j)` with a branch average of
/// `β_{j+1} η_{j+1}` at one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneStepCheck {
    pub j: usize,
    /// Largest `|closed form − average|` over the `D × K` entries.
    pub max_abs_error: f64,
    /// Largest error in units of its tolerance; the check passes when ≤ 1.
    pub max_ratio: f64,
    pub passed: bool,
}

/// Checks `R_j(X_j)` on `path` against `samples` Monte Carlo continuations,
/// or against all continuations when `samples` is `None`. Monte Carlo
/// tolerances are `z_tol` standard errors plus `1e−9` relative; exact ones
/// are `1e−10` relative.
pub fn one_step_consistency(
    basis: &dyn BasisSet,
    model: &dyn MarkovModel,
    path: &Path,
    j: usize,
    samples: Option<usize>,
    z_tol: f64,
    factory: &SeededStreamFactory,
) -> Result<OneStepCheck> {
    let k = basis.size();
    let d = basis.weight_dim();
    let mut closed = vec![0.0; d * k];
    basis.one_step(j, path.state(j), &mut closed);
    let mut mean = vec![0.0; d * k];
    let mut second = vec![0.0; d * k];
    let mut eta = vec![0.0; k];
    let branching = Branching {
        layer: Layer::Diagnostics,
        sampling: samples.map_or(Sampling::Enumerate, Sampling::MonteCarlo),
    };
    let mut scratch = path.clone();
    for_each_branch(model, factory, path, j, branching, &mut scratch, |branch, _, w| {
        basis.eval_path(j + 1, branch, &mut eta);
        let beta = branch.weights(j + 1, d);
        for r in 0..d {
            for c in 0..k {
                let v = beta[r] * eta[c];
                mean[r * k + c] += w * v;
                second[r * k + c] += w * v * v;
            }
        }
        Ok(())
    })?;
    let mut max_abs_error = 0.0f64;
    let mut max_ratio = 0.0f64;
    for i in 0..d * k {
        let err = (closed[i] - mean[i]).abs();
        let tol = match samples {
            Some(n) => {
                let var = (second[i] - mean[i] * mean[i]).max(0.0) * n as f64 / (n as f64 - 1.0).max(1.0);
                z_tol * (var / n as f64).sqrt() + 1e-9 * (1.0 + closed[i].abs())
            }
            None => 1e-10 * (1.0 + closed[i].abs()),
        };
        max_abs_error = max_abs_error.max(err);
        max_ratio = max_ratio.max(err / tol);
    }
    Ok(OneStepCheck {
        j,
        max_abs_error,
        max_ratio,
        passed: max_ratio <= 1.0,
    })
}
