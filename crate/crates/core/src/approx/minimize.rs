use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::nelder_mead::{self, NelderMeadOptions};
use crate::approx::{ApproxMode, BasisSet, Coefficients, InputApproximation};
use crate::dp::{DynamicProgram, MarkovModel};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::stats::rng::{Layer, SeededStreamFactory};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeConfig {
    /// Training paths `Λ_mini`.
    pub mini: usize,
    /// Test paths `Λ_test`.
    pub test: usize,
    pub gammas: Vec<f64>,
    /// Start point; zero when absent.
    #[serde(default)]
    pub start: Option<Vec<f64>>,
}

impl MinimizeConfig {
    /// `γ ∈ {0, 0.025, …, 0.5}`.
    pub fn default_gammas() -> Vec<f64> {
        (0..=20).map(|i| i as f64 * 0.025).collect()
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.mini < 2 || self.test < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                got: self.mini.min(self.test),
            });
        }
        if self.gammas.is_empty() || self.gammas.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
            return Err(Error::Config(
                "gamma grid must be nonempty with finite gamma ≥ 0".into(),
            ));
        }
        if let Some(s) = &self.start {
            if s.len() != k || s.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config(format!("start point must be {k} finite numbers")));
            }
        }
        Ok(())
    }
}

/// Result of one Nelder–Mead run at a fixed `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCandidate {
    pub gamma: f64,
    pub coefficients: Vec<f64>,
    pub train_objective: f64,
    pub test_objective: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    pub approx: InputApproximation,
    pub candidates: Vec<GammaCandidate>,
}

impl MinimizeOutcome {
    pub fn gamma(&self) -> f64 {
        self.approx.gamma.unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> &[f64] {
        self.approx.coeffs(1)
    }
}

/// Frozen sample of paths on which `a ↦ mean θ^up_0(M^a) + γ·sd θ^up_0(M^a)`
/// is deterministic.
///
/// The basis martingale `m_{j+1} = β_{j+1} η_{j+1} − R_j(X_j)` (a `D × K`
/// matrix per step) is precomputed, so that `ΔM^a_{j+1} = m_{j+1} a`.
pub struct PenalizedObjective<'a> {
    dp: &'a dyn DynamicProgram,
    paths: Vec<Path>,
    probs: Option<Vec<f64>>,
    mart: Vec<Vec<f64>>,
    k: usize,
}

impl<'a> PenalizedObjective<'a> {
    /// Equally weighted Monte Carlo paths.
    pub fn new(dp: &'a dyn DynamicProgram, basis: &dyn BasisSet, paths: Vec<Path>) -> Self {
        let mart = paths.par_iter().map(|p| basis_martingale(dp, basis, p)).collect();
        Self {
            dp,
            paths,
            probs: None,
            mart,
            k: basis.size(),
        }
    }

    /// Paths with exact probabilities, for enumerated finite-support models.
    pub fn weighted(dp: &'a dyn DynamicProgram, basis: &dyn BasisSet, paths: Vec<(Path, f64)>) -> Self {
        let (paths, probs): (Vec<Path>, Vec<f64>) = paths.into_iter().unzip();
        let mut obj = Self::new(dp, basis, paths);
        obj.probs = Some(probs);
        obj
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// `θ^up_0(M^a)` on every path.
    pub fn theta0(&self, a: &[f64]) -> Result<Vec<f64>> {
        self.paths
            .par_iter()
            .zip(&self.mart)
            .map(|(p, m)| self.theta_path(p, m, a))
            .collect()
    }

    /// Sample mean and standard deviation (`n − 1` divisor; population
    /// deviation under exact probabilities).
    pub fn mean_sd(&self, a: &[f64]) -> Result<(f64, f64)> {
        let t = self.theta0(a)?;
        Ok(match &self.probs {
            Some(w) => {
                let mean: f64 = t.iter().zip(w).map(|(v, p)| v * p).sum();
                let var: f64 = t.iter().zip(w).map(|(v, p)| p * (v - mean).powi(2)).sum();
                (mean, var.max(0.0).sqrt())
            }
            None => {
                let n = t.len() as f64;
                let mean = t.iter().sum::<f64>() / n;
                let var = t.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                (mean, var.sqrt())
            }
        })
    }

    /// Penalized objective; `+∞` when the recursion leaves the finite range.
    pub fn value(&self, a: &[f64], gamma: f64) -> f64 {
        match self.mean_sd(a) {
            Ok((m, s)) => m + gamma * s,
            Err(_) => f64::INFINITY,
        }
    }

    fn theta_path(&self, path: &Path, m: &[f64], a: &[f64]) -> Result<f64> {
        let dp = self.dp;
        let d = dp.weight_dim();
        let k = self.k;
        let horizon = dp.horizon();
        let mut z = vec![0.0; d];
        let mut theta = dp.terminal(path.state(horizon));
        for j in (0..horizon).rev() {
            let beta = path.weights(j + 1, d);
            let mj = &m[j * d * k..(j + 1) * d * k];
            for i in 0..d {
                let dm: f64 = mj[i * k..(i + 1) * k].iter().zip(a).map(|(x, y)| x * y).sum();
                z[i] = beta[i] * theta - dm;
            }
            theta = dp.generator(j, path.state(j), &z);
        }
        if theta.is_finite() {
            Ok(theta)
        } else {
            Err(Error::NonFinite {
                j: 0,
                context: format!("upper recursion on path {:#x}", path.label()),
            })
        }
    }
}

fn basis_martingale(dp: &dyn DynamicProgram, basis: &dyn BasisSet, path: &Path) -> Vec<f64> {
    let d = dp.weight_dim();
    let k = basis.size();
    let horizon = dp.horizon();
    let mut out = vec![0.0; horizon * d * k];
    let mut eta = vec![0.0; k];
    for j in 0..horizon {
        let mj = &mut out[j * d * k..(j + 1) * d * k];
        basis.one_step(j, path.state(j), mj);
        basis.eval_path(j + 1, path, &mut eta);
        let beta = path.weights(j + 1, d);
        for i in 0..d {
            for (c, e) in mj[i * k..(i + 1) * k].iter_mut().zip(&eta) {
                *c = beta[i] * e - *c;
            }
        }
    }
    out
}

fn sample(
    model: &dyn MarkovModel,
    horizon: usize,
    layer: Layer,
    count: usize,
    factory: &SeededStreamFactory,
) -> Vec<Path> {
    (0..count)
        .into_par_iter()
        .map(|l| Path::simulate(model, horizon, factory.top_label(layer, l as u64), factory))
        .collect()
}

/// Penalized martingale minimization over `a ∈ R^K` with training and testing.
///
/// For each `γ` the same training paths are reused; the returned coefficients
/// minimize the penalized objective on independent test paths.
pub fn martingale_minimize(
    dp: &dyn DynamicProgram,
    model: &dyn MarkovModel,
    basis: Arc<dyn BasisSet + '_>,
    cfg: &MinimizeConfig,
    factory: &SeededStreamFactory,
) -> Result<MinimizeOutcome> {
    let k = basis.size();
    cfg.validate(k)?;
    if basis.weight_dim() != dp.weight_dim() {
        return Err(Error::Config(
            "basis and program disagree on the weight dimension".into(),
        ));
    }
    let horizon = dp.horizon();
    let train = PenalizedObjective::new(
        dp,
        basis.as_ref(),
        sample(model, horizon, Layer::Minimization, cfg.mini, factory),
    );
    let test = PenalizedObjective::new(
        dp,
        basis.as_ref(),
        sample(model, horizon, Layer::Test, cfg.test, factory),
    );
    let start = cfg.start.clone().unwrap_or_else(|| vec![0.0; k]);
    let opts = NelderMeadOptions::for_dim(k);

    let candidates: Vec<GammaCandidate> = cfg
        .gammas
        .par_iter()
        .map(|&gamma| {
            let r = nelder_mead::minimize(|a| train.value(a, gamma), &start, &opts);
            if !r.converged {
                log::warn!(
                    "minimization at gamma={gamma} stopped after {} evaluations",
                    r.evaluations
                );
            }
            GammaCandidate {
                gamma,
                test_objective: test.value(&r.x, gamma),
                coefficients: r.x,
                train_objective: r.value,
                evaluations: r.evaluations,
                converged: r.converged,
            }
        })
        .collect();

    let best = candidates
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.test_objective.total_cmp(&b.test_objective))
        .map(|(_, c)| c.clone())
        .ok_or_else(|| Error::Config("empty gamma grid".into()))?;
    if !best.test_objective.is_finite() {
        return Err(Error::NonFinite {
            j: 0,
            context: "penalized objective on every gamma".into(),
        });
    }
    Ok(MinimizeOutcome {
        approx: InputApproximation {
            mode: ApproxMode::Minimization,
            basis_size: k,
            horizon,
            coefficients: Coefficients::Global(best.coefficients.clone()),
            basis: basis.id(),
            seed: factory.seed(),
            gamma: Some(best.gamma),
            converged: best.converged,
        },
        candidates,
    })
}
