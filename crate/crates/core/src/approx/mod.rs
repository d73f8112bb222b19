//! Input approximations `ỹ_j = Σ_k a_j^k η_j^k` and the control, martingale
//! and bound processes they induce.

mod consistency;
mod indicator;
mod lsmc;
mod minimize;
pub mod nelder_mead;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dp::{dot, DynamicProgram};
use crate::error::{Error, Result};
use crate::improve::ControlVariate;
use crate::path::Path;
use crate::pathwise::{
    ControlProvider, Controls, Increments, LowerBound, MartingaleProvider, PathFunctional, UpperBound,
};

pub use consistency::{one_step_consistency, OneStepCheck};
pub use indicator::IndicatorBasis;
pub use lsmc::{lsmc_regress_later, solve_least_squares};
pub use minimize::{martingale_minimize, GammaCandidate, MinimizeConfig, MinimizeOutcome, PenalizedObjective};

/// Basis functions `η_j^k(X_{j−1}, B_j)` with closed-form one-step weighted
/// expectations `R_j^k(x) = E[β_{j+1} η_{j+1}^k(x, B_{j+1})]`.
pub trait BasisSet: Send + Sync {
    /// Number of functions `K`.
    fn size(&self) -> usize;

    /// Weight dimension `D`.
    fn weight_dim(&self) -> usize;

    fn id(&self) -> String;

    /// `η_j(X_{j−1}, B_j)` for `1 ≤ j ≤ J`; `x` is `X_j = h_j(x_prev, b)`.
    fn eval(&self, j: usize, x_prev: &[f64], b: &[f64], x: &[f64], out: &mut [f64]);

    /// `R_j(x)` as a row-major `D × K` matrix, for `0 ≤ j < J`.
    fn one_step(&self, j: usize, x: &[f64], out: &mut [f64]);

    /// `η_j` along `path`.
    fn eval_path(&self, j: usize, path: &Path, out: &mut [f64]) {
        self.eval(j, path.state(j - 1), path.innovation(j), path.state(j), out)
    }
}

/// The single function `η ≡ 1`, with `R = E[β]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBasis {
    pub weight_mean: Vec<f64>,
}

impl BasisSet for ConstantBasis {
    fn size(&self) -> usize {
        1
    }

    fn weight_dim(&self) -> usize {
        self.weight_mean.len()
    }

    fn id(&self) -> String {
        "constant".into()
    }

    fn eval(&self, _j: usize, _x_prev: &[f64], _b: &[f64], _x: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
    }

    fn one_step(&self, _j: usize, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.weight_mean);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxMode {
    Lsmc,
    Minimization,
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    /// `a_j` at index `j − 1`.
    PerTime(Vec<Vec<f64>>),
    Global(Vec<f64>),
}

/// Fitted coefficients with enough metadata to rebuild the providers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputApproximation {
    pub mode: ApproxMode,
    #[serde(rename = "K")]
    pub basis_size: usize,
    #[serde(rename = "J")]
    pub horizon: usize,
    pub coefficients: Coefficients,
    pub basis: String,
    pub seed: u64,
    pub gamma: Option<f64>,
    #[serde(default = "default_true")]
    pub converged: bool,
}

fn default_true() -> bool {
    true
}

impl InputApproximation {
    pub fn global(basis: &dyn BasisSet, horizon: usize, a: Vec<f64>) -> Self {
        Self {
            mode: ApproxMode::Fixed,
            basis_size: basis.size(),
            horizon,
            coefficients: Coefficients::Global(a),
            basis: basis.id(),
            seed: 0,
            gamma: None,
            converged: true,
        }
    }

    /// `a_j` for `1 ≤ j ≤ J`.
    pub fn coeffs(&self, j: usize) -> &[f64] {
        match &self.coefficients {
            Coefficients::PerTime(a) => &a[j - 1],
            Coefficients::Global(a) => a,
        }
    }

    pub fn validate(&self, basis: &dyn BasisSet, horizon: usize) -> Result<()> {
        if self.basis_size != basis.size() || self.horizon != horizon {
            return Err(Error::Config(format!(
                "approximation has K={}, J={} but the model needs K={}, J={horizon}",
                self.basis_size,
                self.horizon,
                basis.size()
            )));
        }
        if self.basis != basis.id() {
            return Err(Error::Config(format!(
                "approximation was fitted on basis '{}', not '{}'",
                self.basis,
                basis.id()
            )));
        }
        let rows: Vec<&Vec<f64>> = match &self.coefficients {
            Coefficients::PerTime(a) => {
                if a.len() != horizon {
                    return Err(Error::Config(format!(
                        "{} coefficient rows for horizon {horizon}",
                        a.len()
                    )));
                }
                a.iter().collect()
            }
            Coefficients::Global(a) => vec![a],
        };
        for row in rows {
            if row.len() != self.basis_size {
                return Err(Error::Config("coefficient row has the wrong length".into()));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Config("coefficients must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Closed-form evaluation of `Ỹ`, `r̃` and `M̃` along any path.
pub struct InputEval<'a> {
    dp: &'a dyn DynamicProgram,
    basis: Arc<dyn BasisSet + 'a>,
    approx: InputApproximation,
}

impl<'a> InputEval<'a> {
    pub fn new(dp: &'a dyn DynamicProgram, basis: Arc<dyn BasisSet + 'a>, approx: InputApproximation) -> Result<Self> {
        approx.validate(basis.as_ref(), dp.horizon())?;
        if basis.weight_dim() != dp.weight_dim() {
            return Err(Error::Config(
                "basis and program disagree on the weight dimension".into(),
            ));
        }
        Ok(Self { dp, basis, approx })
    }

    pub fn approximation(&self) -> &InputApproximation {
        &self.approx
    }

    /// `E_j[β_{j+1} Ỹ_{j+1}] = R_j(X_j) a_{j+1}`.
    pub fn expected_next(&self, j: usize, x: &[f64], r: &mut [f64], out: &mut [f64]) {
        let k = self.basis.size();
        self.basis.one_step(j, x, r);
        let a = self.approx.coeffs(j + 1);
        for (d, o) in out.iter_mut().enumerate() {
            *o = dot(&r[d * k..(d + 1) * k], a);
        }
    }

    fn buffers(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.basis.size();
        (vec![0.0; k * self.dp.weight_dim()], vec![0.0; k])
    }
}

impl ControlVariate for InputEval<'_> {
    fn value(&self, j: usize, path: &Path) -> f64 {
        let mut eta = vec![0.0; self.basis.size()];
        self.basis.eval_path(j, path, &mut eta);
        dot(self.approx.coeffs(j), &eta)
    }

    fn one_step(&self, j: usize, path: &Path, out: &mut [f64]) {
        let (mut r, _) = self.buffers();
        self.expected_next(j, path.state(j), &mut r, out);
    }
}

impl MartingaleProvider for InputEval<'_> {
    /// `ΔM̃_{j+1} = β_{j+1} Ỹ_{j+1} − R_j(X_j) a_{j+1}`.
    fn fill(&self, path: &Path, from: usize, out: &mut Increments) -> Result<()> {
        let d = self.dp.weight_dim();
        let (mut r, mut eta) = self.buffers();
        for j in from..path.horizon() {
            self.basis.eval_path(j + 1, path, &mut eta);
            let y = dot(self.approx.coeffs(j + 1), &eta);
            let beta = path.weights(j + 1, d);
            let dm = out.get_mut(j);
            self.expected_next(j, path.state(j), &mut r, dm);
            for k in 0..d {
                dm[k] = beta[k] * y - dm[k];
            }
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        self.dp.weight_dim()
    }
}

impl ControlProvider for InputEval<'_> {
    /// `r̃_j = maximizer(j, X_j, R_j(X_j) a_{j+1})`.
    fn fill(&self, path: &Path, from: usize, out: &mut Controls) -> Result<()> {
        let (mut r, _) = self.buffers();
        let mut z = vec![0.0; self.dp.weight_dim()];
        for j in from..path.horizon() {
            let x = path.state(j);
            self.expected_next(j, x, &mut r, &mut z);
            self.dp.maximizer(j, x, &z, out.control_mut(j));
            let c = self.dp.conjugate(j, x, out.control(j));
            out.set_conjugate(j, c);
        }
        Ok(())
    }
}

/// Providers induced by an input approximation.
pub struct InputProviders<'a> {
    pub eval: Arc<InputEval<'a>>,
    /// `θ^(up,0) = θ^up(M̃)`.
    pub upper: Arc<dyn PathFunctional + 'a>,
    /// `θ^(low,0) = θ^low(r̃, M̃)`.
    pub lower: Arc<dyn PathFunctional + 'a>,
}

impl<'a> InputProviders<'a> {
    pub fn control(&self) -> Arc<dyn ControlProvider + 'a> {
        self.eval.clone()
    }

    pub fn martingale(&self) -> Arc<dyn MartingaleProvider + 'a> {
        self.eval.clone()
    }

    pub fn control_variate(&self) -> Arc<dyn ControlVariate + 'a> {
        self.eval.clone()
    }
}

pub fn build_input_providers<'a>(
    approx: InputApproximation,
    basis: Arc<dyn BasisSet + 'a>,
    dp: &'a dyn DynamicProgram,
) -> Result<InputProviders<'a>> {
    let eval = Arc::new(InputEval::new(dp, basis, approx)?);
    let upper = Arc::new(UpperBound::new(dp, eval.clone()));
    let lower = Arc::new(LowerBound::new(dp, eval.clone(), eval.clone()));
    Ok(InputProviders { eval, upper, lower })
}
