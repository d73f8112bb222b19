//! Optimal stopping on a multiplicative tree: `Y_j = max{S_j(X_j), E_j[Y_{j+1}]}`.
//!
//! The generator `f_j(x, z) = max{S_j(x), z_0}` has conjugate
//! `f_j^#(x, u) = −S_j(x)(1 − u_0)` on `u_0 ∈ [0, 1]`; the maximizer is the
//! continuation indicator. Innovations are `(1, m)` with `m` the price
//! multiplier.

use serde::{Deserialize, Serialize};

use crate::dp::{Atom, DynamicProgram};
use crate::error::{Error, Result};
use crate::exact::FiniteSupportModel;
use crate::path::Path;
use crate::pathwise::PathFunctional;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reward {
    /// `S(x) = x`.
    Identity,
    Call {
        strike: f64,
    },
    Put {
        strike: f64,
    },
    Zero,
}

impl Reward {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Reward::Identity => x,
            Reward::Call { strike } => (x - strike).max(0.0),
            Reward::Put { strike } => (strike - x).max(0.0),
            Reward::Zero => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingParams {
    pub x0: f64,
    pub multipliers: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub steps: usize,
    pub reward: Reward,
}

impl StoppingParams {
    /// Price doubles or halves with equal probability over two steps.
    pub fn binomial() -> Self {
        Self {
            x0: 1.0,
            multipliers: vec![2.0, 0.5],
            probabilities: vec![0.5, 0.5],
            steps: 2,
            reward: Reward::Identity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StoppingProblem {
    pub steps: usize,
    pub reward: Reward,
}

impl StoppingProblem {
    pub fn reward(&self, x: &[f64]) -> f64 {
        self.reward.eval(x[0])
    }
}

impl DynamicProgram for StoppingProblem {
    fn horizon(&self) -> usize {
        self.steps
    }

    fn weight_dim(&self) -> usize {
        1
    }

    fn generator(&self, _j: usize, x: &[f64], z: &[f64]) -> f64 {
        self.reward(x).max(z[0])
    }

    fn conjugate(&self, _j: usize, x: &[f64], u: &[f64]) -> f64 {
        if (0.0..=1.0).contains(&u[0]) {
            -self.reward(x) * (1.0 - u[0])
        } else {
            f64::INFINITY
        }
    }

    fn maximizer(&self, _j: usize, x: &[f64], z: &[f64], out: &mut [f64]) {
        out[0] = if z[0] >= self.reward(x) { 1.0 } else { 0.0 };
    }

    fn terminal(&self, x: &[f64]) -> f64 {
        self.reward(x)
    }
}

/// The stopping problem and its finite-support tree model.
pub fn stopping_model(params: &StoppingParams) -> Result<(StoppingProblem, FiniteSupportModel)> {
    if params.multipliers.len() != params.probabilities.len() {
        return Err(Error::Config(format!(
            "{} multipliers but {} probabilities",
            params.multipliers.len(),
            params.probabilities.len()
        )));
    }
    if params.steps == 0 {
        return Err(Error::Config("stopping horizon must be at least 1".into()));
    }
    let support: Vec<Atom> = params
        .multipliers
        .iter()
        .zip(&params.probabilities)
        .map(|(&m, &p)| Atom {
            innovation: vec![1.0, m],
            prob: p,
        })
        .collect();
    let model = FiniteSupportModel::stationary(vec![params.x0], support, params.steps, |_, x, b, out| {
        out[0] = x[0] * b[1];
    })?;
    Ok((
        StoppingProblem {
            steps: params.steps,
            reward: params.reward,
        },
        model,
    ))
}

/// Member `l` of the consistent stopping family
/// `τ_l = inf{i ≥ l : S_i = max_{m ≤ i} S_m} ∧ J`, as the process
/// `θ^l_j = S_{max(τ_l, τ_j)}` evaluated along a path.
#[derive(Debug, Clone)]
pub struct StoppingTimeProcess {
    pub problem: StoppingProblem,
    pub l: usize,
}

impl StoppingTimeProcess {
    /// `τ_i` for `i = 0..=J` along `path`.
    pub fn stopping_times(&self, path: &Path) -> Vec<usize> {
        let horizon = path.horizon();
        let rewards: Vec<f64> = (0..=horizon).map(|i| self.problem.reward(path.state(i))).collect();
        let mut at_max = vec![false; horizon + 1];
        let mut running = f64::NEG_INFINITY;
        for (i, s) in rewards.iter().enumerate() {
            running = running.max(*s);
            at_max[i] = *s == running;
        }
        let mut tau = vec![horizon; horizon + 1];
        for i in (0..horizon).rev() {
            tau[i] = if at_max[i] { i } else { tau[i + 1] };
        }
        tau
    }
}

impl PathFunctional for StoppingTimeProcess {
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()> {
        let tau = self.stopping_times(path);
        let tl = tau[self.l.min(path.horizon())];
        for j in from..=path.horizon() {
            theta[j] = self.problem.reward(path.state(tl.max(tau[j])));
        }
        Ok(())
    }
}
