//! Pathwise recursions for upper and lower bounds.
//!
//! Along a single innovation path, with martingale increments `ΔM_{j+1}` and
//! controls `r_j`:
//!
//! ```text
//! θ^up_J  = g(X_J),  θ^up_j  = f_j(X_j, β_{j+1} θ^up_{j+1} − ΔM_{j+1})
//! θ^low_J = g(X_J),  θ^low_j = r_j·β_{j+1} θ^low_{j+1} − r_j·ΔM_{j+1} − f_j^#(X_j, r_j)
//! ```
//!
//! `E_0[θ^up_0]` bounds `Y_0` from above for any martingale, `E_0[θ^low_0]`
//! from below for any admissible control under the monotonicity condition.

use std::sync::Arc;

use crate::dp::{dot, DynamicProgram};
use crate::error::{Error, Result};
use crate::path::Path;

/// Martingale increments `ΔM_{j+1}`, `j = 0..J−1`, stored row-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct Increments {
    d: usize,
    data: Vec<f64>,
}

impl Increments {
    pub fn new(horizon: usize, d: usize) -> Self {
        Self {
            d,
            data: vec![0.0; horizon * d],
        }
    }

    /// `ΔM_{j+1}`.
    #[inline]
    pub fn get(&self, j: usize) -> &[f64] {
        &self.data[j * self.d..(j + 1) * self.d]
    }

    #[inline]
    pub fn get_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.d..(j + 1) * self.d]
    }
}

/// Controls `r_j` with their conjugate values `f_j^#(X_j, r_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Controls {
    d: usize,
    r: Vec<f64>,
    conj: Vec<f64>,
}

impl Controls {
    pub fn new(horizon: usize, d: usize) -> Self {
        Self {
            d,
            r: vec![0.0; horizon * d],
            conj: vec![0.0; horizon],
        }
    }

    #[inline]
    pub fn control(&self, j: usize) -> &[f64] {
        &self.r[j * self.d..(j + 1) * self.d]
    }

    #[inline]
    pub fn control_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.r[j * self.d..(j + 1) * self.d]
    }

    #[inline]
    pub fn conjugate(&self, j: usize) -> f64 {
        self.conj[j]
    }

    #[inline]
    pub fn set_conjugate(&mut self, j: usize, v: f64) {
        self.conj[j] = v;
    }
}

/// Source of martingale increments along a path.
///
/// For a fixed prefix through `j`, `E[ΔM_{j+1}]` over `B_{j+1}` (and over any
/// auxiliary simulation seeded from the path label) is zero.
pub trait MartingaleProvider: Send + Sync {
    /// Writes `ΔM_{j+1}` for `j = from..J−1`.
    fn fill(&self, path: &Path, from: usize, out: &mut Increments) -> Result<()>;

    /// Whether evaluation avoids nested simulation.
    fn closed_form(&self) -> bool {
        true
    }

    fn increment(&self, j: usize, path: &Path) -> Result<Vec<f64>> {
        let mut inc = Increments::new(path.horizon(), self.dim());
        self.fill(path, j, &mut inc)?;
        Ok(inc.get(j).to_vec())
    }

    /// Dimension `D` of the increments.
    fn dim(&self) -> usize;
}

/// Source of admissible controls along a path.
pub trait ControlProvider: Send + Sync {
    /// Writes `r_j` and `f_j^#(X_j, r_j)` for `j = from..J−1`.
    fn fill(&self, path: &Path, from: usize, out: &mut Controls) -> Result<()>;
}

/// A path functional `θ_j`, `j = from..J`, such as a bound recursion or an
/// adapted process. `θ_j` may depend on the path prefix and on `B_{j+1..J}`.
pub trait PathFunctional: Send + Sync {
    /// Fills `theta[from..=J]`.
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()>;
}

pub struct ZeroMartingale {
    pub d: usize,
}

impl MartingaleProvider for ZeroMartingale {
    fn fill(&self, path: &Path, from: usize, out: &mut Increments) -> Result<()> {
        for j in from..path.horizon() {
            out.get_mut(j).fill(0.0);
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        self.d
    }
}

/// Same control at every step.
pub struct ConstantControl<'a> {
    pub dp: &'a dyn DynamicProgram,
    pub control: Vec<f64>,
}

impl ControlProvider for ConstantControl<'_> {
    fn fill(&self, path: &Path, from: usize, out: &mut Controls) -> Result<()> {
        for j in from..path.horizon() {
            out.control_mut(j).copy_from_slice(&self.control);
            out.set_conjugate(j, self.dp.conjugate(j, path.state(j), &self.control));
        }
        Ok(())
    }
}

/// The deterministic process `θ_j ≡ c`.
pub struct ConstantProcess(pub f64);

impl PathFunctional for ConstantProcess {
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()> {
        theta[from..=path.horizon()].fill(self.0);
        Ok(())
    }
}

/// Runs the upper recursion for `j = hi−1` down to `lo`, given `theta[hi]`.
pub fn backward_up(
    dp: &dyn DynamicProgram,
    path: &Path,
    inc: &Increments,
    lo: usize,
    hi: usize,
    theta: &mut [f64],
) -> Result<()> {
    let d = dp.weight_dim();
    let mut z = vec![0.0; d];
    for j in (lo..hi).rev() {
        let beta = path.weights(j + 1, d);
        let dm = inc.get(j);
        for k in 0..d {
            z[k] = beta[k] * theta[j + 1] - dm[k];
        }
        let v = dp.generator(j, path.state(j), &z);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                j,
                context: "generator in upper recursion".into(),
            });
        }
        theta[j] = v;
    }
    Ok(())
}

/// Runs the lower recursion for `j = hi−1` down to `lo`, given `theta[hi]`.
pub fn backward_low(
    dp: &dyn DynamicProgram,
    path: &Path,
    controls: &Controls,
    inc: &Increments,
    lo: usize,
    hi: usize,
    theta: &mut [f64],
) -> Result<()> {
    let d = dp.weight_dim();
    for j in (lo..hi).rev() {
        let conj = controls.conjugate(j);
        if !conj.is_finite() {
            return Err(Error::InadmissibleControl { j });
        }
        let r = controls.control(j);
        let beta = path.weights(j + 1, d);
        let v = dot(r, beta) * theta[j + 1] - dot(r, inc.get(j)) - conj;
        if !v.is_finite() {
            return Err(Error::NonFinite {
                j,
                context: "lower recursion".into(),
            });
        }
        theta[j] = v;
    }
    Ok(())
}

fn terminal(dp: &dyn DynamicProgram, path: &Path) -> Result<f64> {
    let j = path.horizon();
    let v = dp.terminal(path.state(j));
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite {
            j,
            context: "terminal payoff".into(),
        })
    }
}

/// `θ^up_0..θ^up_J` along `path`.
pub fn theta_up(dp: &dyn DynamicProgram, path: &Path, mart: &dyn MartingaleProvider) -> Result<Vec<f64>> {
    let horizon = dp.horizon();
    let mut theta = vec![0.0; horizon + 1];
    UpperBound::evaluate_with(dp, mart, path, 0, &mut theta)?;
    Ok(theta)
}

/// `θ^low_0..θ^low_J` along `path`.
pub fn theta_low(
    dp: &dyn DynamicProgram,
    path: &Path,
    control: &dyn ControlProvider,
    mart: &dyn MartingaleProvider,
) -> Result<Vec<f64>> {
    let horizon = dp.horizon();
    let mut theta = vec![0.0; horizon + 1];
    LowerBound::evaluate_with(dp, control, mart, path, 0, &mut theta)?;
    Ok(theta)
}

/// `θ^up(M)` as a path functional.
pub struct UpperBound<'a> {
    pub dp: &'a dyn DynamicProgram,
    pub mart: Arc<dyn MartingaleProvider + 'a>,
}

impl<'a> UpperBound<'a> {
    pub fn new(dp: &'a dyn DynamicProgram, mart: Arc<dyn MartingaleProvider + 'a>) -> Self {
        Self { dp, mart }
    }

    fn evaluate_with(
        dp: &dyn DynamicProgram,
        mart: &dyn MartingaleProvider,
        path: &Path,
        from: usize,
        theta: &mut [f64],
    ) -> Result<()> {
        let horizon = dp.horizon();
        let mut inc = Increments::new(horizon, dp.weight_dim());
        mart.fill(path, from, &mut inc)?;
        theta[horizon] = terminal(dp, path)?;
        backward_up(dp, path, &inc, from, horizon, theta)
    }
}

impl PathFunctional for UpperBound<'_> {
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()> {
        Self::evaluate_with(self.dp, self.mart.as_ref(), path, from, theta)
    }
}

/// `θ^low(r, M)` as a path functional.
pub struct LowerBound<'a> {
    pub dp: &'a dyn DynamicProgram,
    pub control: Arc<dyn ControlProvider + 'a>,
    pub mart: Arc<dyn MartingaleProvider + 'a>,
}

impl<'a> LowerBound<'a> {
    pub fn new(
        dp: &'a dyn DynamicProgram,
        control: Arc<dyn ControlProvider + 'a>,
        mart: Arc<dyn MartingaleProvider + 'a>,
    ) -> Self {
        Self { dp, control, mart }
    }

    fn evaluate_with(
        dp: &dyn DynamicProgram,
        control: &dyn ControlProvider,
        mart: &dyn MartingaleProvider,
        path: &Path,
        from: usize,
        theta: &mut [f64],
    ) -> Result<()> {
        let horizon = dp.horizon();
        let d = dp.weight_dim();
        let mut controls = Controls::new(horizon, d);
        control.fill(path, from, &mut controls)?;
        let mut inc = Increments::new(horizon, d);
        mart.fill(path, from, &mut inc)?;
        theta[horizon] = terminal(dp, path)?;
        backward_low(dp, path, &controls, &inc, from, horizon, theta)
    }
}

impl PathFunctional for LowerBound<'_> {
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()> {
        Self::evaluate_with(self.dp, self.control.as_ref(), self.mart.as_ref(), path, from, theta)
    }
}
