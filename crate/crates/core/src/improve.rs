//! Iterative improvement of sub- and supersolutions by nested simulation.
//!
//! An improvement step replaces the input process `θ^(k−1)` by
//!
//! ```text
//! upper:  θ^(up,k)  = θ^up(M^(k)),
//!         ΔM^(k)_{j+1} = β_{j+1} E_{j+1}[θ_{j+1}] − E_j[β_{j+1} θ_{j+1}]
//! lower:  θ^(low,k) = θ^low(r^(k), M),
//!         r^(k)_j = maximizer(j, X_j, E_j[β_{j+1} θ_{j+1}])
//! ```
//!
//! where the conditional expectations are estimated from branch paths that
//! share the current path's prefix. Branch paths are drawn from streams keyed
//! by the parent path's label, so every estimate is a pure function of the
//! seed.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{DynamicProgram, MarkovModel};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::pathwise::{
    ControlProvider, Controls, Increments, LowerBound, MartingaleProvider, PathFunctional, UpperBound,
};
use crate::stats::rng::{derive_label, Layer, SeededStreamFactory};

/// How conditional expectations over continuations are approximated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// Plain Monte Carlo average over this many branch paths.
    MonteCarlo(usize),
    /// Exact sum over every continuation of a finitely supported model.
    Enumerate,
}

/// One layer of branch paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branching {
    pub layer: Layer,
    pub sampling: Sampling,
}

/// Martingale used in the lower recursion of an improved subsolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LowerMartingale {
    #[default]
    Zero,
    /// The closed-form input martingale.
    Input,
    /// Doob martingale of the previous iterate, estimated on an independent layer.
    Nested,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedEstimatorConfig {
    pub outer: usize,
    pub middle: usize,
    pub inner: usize,
    pub use_control_variates: bool,
    pub seed: u64,
    /// Enumerate continuations instead of sampling middle and inner paths.
    #[serde(default)]
    pub enumerate: bool,
    #[serde(default)]
    pub lower_martingale: LowerMartingale,
}

impl NestedEstimatorConfig {
    pub fn validate(&self, k: usize) -> Result<()> {
        if self.outer == 0 || self.middle == 0 {
            return Err(Error::Config("path counts must be at least 1".into()));
        }
        if k > 2 && !self.enumerate {
            return Err(Error::Config(format!(
                "improvement depth {k} exceeds 2; deeper nesting is only supported in enumeration mode"
            )));
        }
        if k == 2 && self.inner == 0 && !self.enumerate {
            return Err(Error::Config(
                "second improvement step needs at least one inner path".into(),
            ));
        }
        Ok(())
    }

    pub fn factory(&self) -> SeededStreamFactory {
        SeededStreamFactory::new(self.seed)
    }

    fn sampling(&self, count: usize) -> Sampling {
        if self.enumerate {
            Sampling::Enumerate
        } else {
            Sampling::MonteCarlo(count)
        }
    }

    /// Branching used by an estimator evaluated `depth` layers below the
    /// outer paths (0 = on outer paths).
    fn branching(&self, depth: usize, martingale: bool) -> Branching {
        let (layer, count) = match (depth, martingale) {
            (0, false) => (Layer::Middle, self.middle),
            (0, true) => (Layer::MiddleMartingale, self.middle),
            (1, false) => (Layer::Inner, self.inner),
            (1, true) => (Layer::InnerMartingale, self.inner),
            _ => (Layer::Deep, self.inner),
        };
        Branching {
            layer,
            sampling: self.sampling(count),
        }
    }
}

/// Closed-form proxy `Ỹ` with known one-step expectations, used as a control
/// variate in the branch averages.
pub trait ControlVariate: Send + Sync {
    /// `Ỹ_j` along `path`, for `j ≥ 1`.
    fn value(&self, j: usize, path: &Path) -> f64;

    /// `E_j[β_{j+1} Ỹ_{j+1}]` given the prefix of `path` through `j`.
    fn one_step(&self, j: usize, path: &Path, out: &mut [f64]);
}

/// Calls `f(branch, weight)` for each continuation of `base` after step `i`.
pub fn for_each_branch(
    model: &dyn MarkovModel,
    factory: &SeededStreamFactory,
    base: &Path,
    i: usize,
    branching: Branching,
    scratch: &mut Path,
    mut f: impl FnMut(&Path, usize, f64) -> Result<()>,
) -> Result<()> {
    let parent = derive_label(base.label(), &[branching.layer.code(), i as u64]);
    scratch.copy_prefix(base, i);
    match branching.sampling {
        Sampling::MonteCarlo(n) => {
            let w = 1.0 / n as f64;
            for m in 0..n {
                scratch.resample_from(model, i, derive_label(parent, &[m as u64]), factory);
                f(scratch, m, w)?;
            }
            Ok(())
        }
        Sampling::Enumerate => {
            let horizon = base.horizon();
            let mut count = 0usize;
            enumerate_rec(model, i + 1, horizon, 1.0, parent, &mut count, scratch, &mut f)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_rec(
    model: &dyn MarkovModel,
    s: usize,
    horizon: usize,
    prob: f64,
    parent: u64,
    count: &mut usize,
    scratch: &mut Path,
    f: &mut impl FnMut(&Path, usize, f64) -> Result<()>,
) -> Result<()> {
    if s > horizon {
        scratch.set_label(derive_label(parent, &[*count as u64]));
        let m = *count;
        *count += 1;
        return f(scratch, m, prob);
    }
    let atoms = model
        .atoms(s)
        .ok_or_else(|| Error::Config(format!("enumeration needs a finite support at step {s}")))?;
    for (k, a) in atoms.iter().enumerate() {
        scratch.set_innovation(model, s, &a.innovation, k);
        enumerate_rec(model, s + 1, horizon, prob * a.prob, parent, count, scratch, f)?;
    }
    Ok(())
}

/// Shared machinery for branch averages of an input process `θ`.
struct BranchEstimator<'a> {
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    factory: SeededStreamFactory,
    theta: Arc<dyn PathFunctional + 'a>,
    branching: Branching,
    cv: Option<Arc<dyn ControlVariate + 'a>>,
}

struct Scratch {
    path: Path,
    theta: Vec<f64>,
    z_cv: Vec<f64>,
}

impl<'a> BranchEstimator<'a> {
    fn scratch(&self, path: &Path) -> Scratch {
        Scratch {
            path: path.clone(),
            theta: vec![0.0; path.horizon() + 1],
            z_cv: vec![0.0; self.dp.weight_dim()],
        }
    }

    /// Estimates `E_i[θ_i]` (when `scalar`) and `E_i[β_{i+1} θ_{i+1}]` (into
    /// `vector`) from branches of `path` after step `i < J`.
    ///
    /// The control variate enters the weighted average only: `Ỹ_i` is known
    /// at the branch point, so it carries no information about `E_i[θ_i]`.
    fn estimate(&self, path: &Path, i: usize, scalar: bool, vector: &mut [f64], s: &mut Scratch) -> Result<f64> {
        let d = self.dp.weight_dim();
        vector.fill(0.0);
        let mut acc = 0.0;
        if let Some(cv) = &self.cv {
            cv.one_step(i, path, &mut s.z_cv);
        }
        let from = if scalar { i } else { i + 1 };
        let Scratch {
            path: scratch,
            theta,
            z_cv,
        } = s;
        for_each_branch(
            self.model,
            &self.factory,
            path,
            i,
            self.branching,
            scratch,
            |branch, m, w| {
                self.theta
                    .evaluate(branch, from, theta)
                    .map_err(|e| e.context(format!("branch evaluation at j={i}, branch {m}")))?;
                let beta = branch.weights(i + 1, d);
                let next = theta[i + 1];
                match &self.cv {
                    Some(cv) => {
                        let proxy = cv.value(i + 1, branch);
                        for k in 0..d {
                            vector[k] += w * (beta[k] * (next - proxy) + z_cv[k]);
                        }
                    }
                    None => {
                        for k in 0..d {
                            vector[k] += w * beta[k] * next;
                        }
                    }
                }
                if scalar {
                    acc += w * theta[i];
                }
                Ok(())
            },
        )?;
        Ok(acc)
    }
}

/// Nested Monte Carlo estimate of the Doob martingale of `β E[θ]`.
pub struct NestedDoob<'a> {
    est: BranchEstimator<'a>,
}

impl<'a> NestedDoob<'a> {
    pub fn new(
        dp: &'a dyn DynamicProgram,
        model: &'a dyn MarkovModel,
        factory: SeededStreamFactory,
        theta: Arc<dyn PathFunctional + 'a>,
        branching: Branching,
        cv: Option<Arc<dyn ControlVariate + 'a>>,
    ) -> Self {
        Self {
            est: BranchEstimator {
                dp,
                model,
                factory,
                theta,
                branching,
                cv,
            },
        }
    }
}

impl MartingaleProvider for NestedDoob<'_> {
    fn fill(&self, path: &Path, from: usize, out: &mut Increments) -> Result<()> {
        let est = &self.est;
        let horizon = path.horizon();
        let d = est.dp.weight_dim();
        let mut s = est.scratch(path);
        // unweighted[i] = Ê_i[θ_i] for i > from; weighted row i = Ê_i[β_{i+1} θ_{i+1}].
        let mut unweighted = vec![0.0; horizon + 1];
        let mut weighted = vec![0.0; horizon * d];
        for i in from..horizon {
            let row = &mut weighted[i * d..(i + 1) * d];
            unweighted[i] = est.estimate(path, i, i > from, row, &mut s)?;
        }
        est.theta
            .evaluate(path, horizon, &mut s.theta)
            .map_err(|e| e.context("terminal evaluation of the input process"))?;
        unweighted[horizon] = s.theta[horizon];
        for j in from..horizon {
            let beta = path.weights(j + 1, d);
            let dm = out.get_mut(j);
            for k in 0..d {
                dm[k] = beta[k] * unweighted[j + 1] - weighted[j * d + k];
            }
        }
        Ok(())
    }

    fn closed_form(&self) -> bool {
        false
    }

    fn dim(&self) -> usize {
        self.est.dp.weight_dim()
    }
}

/// Improved control `r_j = maximizer(j, X_j, Ê_j[β_{j+1} θ_{j+1}])`.
pub struct NestedControl<'a> {
    est: BranchEstimator<'a>,
}

impl<'a> NestedControl<'a> {
    pub fn new(
        dp: &'a dyn DynamicProgram,
        model: &'a dyn MarkovModel,
        factory: SeededStreamFactory,
        theta: Arc<dyn PathFunctional + 'a>,
        branching: Branching,
        cv: Option<Arc<dyn ControlVariate + 'a>>,
    ) -> Self {
        Self {
            est: BranchEstimator {
                dp,
                model,
                factory,
                theta,
                branching,
                cv,
            },
        }
    }
}

impl ControlProvider for NestedControl<'_> {
    fn fill(&self, path: &Path, from: usize, out: &mut Controls) -> Result<()> {
        let est = &self.est;
        let d = est.dp.weight_dim();
        let mut s = est.scratch(path);
        let mut z = vec![0.0; d];
        for j in from..path.horizon() {
            est.estimate(path, j, false, &mut z, &mut s)?;
            est.dp.maximizer(j, path.state(j), &z, out.control_mut(j));
            let c = est.dp.conjugate(j, path.state(j), out.control(j));
            out.set_conjugate(j, c);
        }
        Ok(())
    }
}

/// Single Doob increment `ΔM_{j+1}` of `β E[θ]` along `path`.
#[allow(clippy::too_many_arguments)]
pub fn estimate_doob_increment(
    dp: &dyn DynamicProgram,
    model: &dyn MarkovModel,
    j: usize,
    path: &Path,
    theta: Arc<dyn PathFunctional + '_>,
    branching: Branching,
    factory: SeededStreamFactory,
    cv: Option<Arc<dyn ControlVariate + '_>>,
) -> Result<Vec<f64>> {
    let horizon = path.horizon();
    if j >= horizon {
        return Err(Error::Config(format!(
            "increment index {j} must be below the horizon {horizon}"
        )));
    }
    let est = BranchEstimator {
        dp,
        model,
        factory,
        theta,
        branching,
        cv,
    };
    let d = dp.weight_dim();
    let mut s = est.scratch(path);
    let mut weighted = vec![0.0; d];
    est.estimate(path, j, false, &mut weighted, &mut s)?;
    let next = if j + 1 < horizon {
        let mut unused = vec![0.0; d];
        est.estimate(path, j + 1, true, &mut unused, &mut s)?
    } else {
        est.theta.evaluate(path, horizon, &mut s.theta)?;
        s.theta[horizon]
    };
    let beta = path.weights(j + 1, d);
    Ok((0..d).map(|k| beta[k] * next - weighted[k]).collect())
}

/// Input process `θ_j ≡ c` for `j < J` with `θ_J = g(X_J)`.
pub struct ConstantInput<'a> {
    pub dp: &'a dyn DynamicProgram,
    pub value: f64,
}

impl PathFunctional for ConstantInput<'_> {
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()> {
        let horizon = path.horizon();
        theta[from..horizon].fill(self.value);
        theta[horizon] = self.dp.terminal(path.state(horizon));
        Ok(())
    }
}

/// Runs `f` over `outer` independent outer paths and collects `θ_0`.
pub fn sample_outer(
    model: &dyn MarkovModel,
    horizon: usize,
    outer: usize,
    factory: &SeededStreamFactory,
    functional: &dyn PathFunctional,
) -> Result<Vec<f64>> {
    (0..outer)
        .into_par_iter()
        .map(|l| {
            let path = Path::simulate(model, horizon, factory.top_label(Layer::Outer, l as u64), factory);
            let mut theta = vec![0.0; horizon + 1];
            functional
                .evaluate(&path, 0, &mut theta)
                .map_err(|e| e.context(format!("outer path {l}")))?;
            Ok(theta[0])
        })
        .collect()
}

/// `θ^(up,k)` as a path functional on outer paths, built on the input process
/// `θ^(up,0)`.
pub fn upper_iterate<'a>(
    k: usize,
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    input: Arc<dyn PathFunctional + 'a>,
    cfg: &NestedEstimatorConfig,
    cv: Option<Arc<dyn ControlVariate + 'a>>,
) -> Arc<dyn PathFunctional + 'a> {
    let factory = cfg.factory();
    let mut theta = input;
    // Level l is evaluated k − l layers below the outer paths.
    for level in 1..=k {
        let depth = k - level;
        let mart = NestedDoob::new(dp, model, factory, theta, cfg.branching(depth, false), cv.clone());
        theta = Arc::new(UpperBound::new(dp, Arc::new(mart)));
    }
    theta
}

/// `θ^(low,k)` as a path functional on outer paths. `input_mart` is the
/// closed-form martingale used inside nested levels.
#[allow(clippy::too_many_arguments)]
pub fn lower_iterate<'a>(
    k: usize,
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    input: Arc<dyn PathFunctional + 'a>,
    input_mart: Arc<dyn MartingaleProvider + 'a>,
    cfg: &NestedEstimatorConfig,
    cv: Option<Arc<dyn ControlVariate + 'a>>,
) -> Arc<dyn PathFunctional + 'a> {
    let factory = cfg.factory();
    let mut theta = input;
    for level in 1..=k {
        let depth = k - level;
        let control = NestedControl::new(
            dp,
            model,
            factory,
            theta.clone(),
            cfg.branching(depth, false),
            cv.clone(),
        );
        let mart: Arc<dyn MartingaleProvider + 'a> = if depth > 0 {
            input_mart.clone()
        } else {
            match cfg.lower_martingale {
                LowerMartingale::Zero => Arc::new(crate::pathwise::ZeroMartingale { d: dp.weight_dim() }),
                LowerMartingale::Input => input_mart.clone(),
                LowerMartingale::Nested => Arc::new(NestedDoob::new(
                    dp,
                    model,
                    factory,
                    theta.clone(),
                    cfg.branching(depth, true),
                    cv.clone(),
                )),
            }
        };
        theta = Arc::new(LowerBound::new(dp, Arc::new(control), mart));
    }
    theta
}

/// Per-outer-path samples of `θ^(up,k)_0`.
pub fn improve_upper<'a>(
    k: usize,
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    input: Arc<dyn PathFunctional + 'a>,
    cfg: &NestedEstimatorConfig,
    cv: Option<Arc<dyn ControlVariate + 'a>>,
) -> Result<Vec<f64>> {
    cfg.validate(k)?;
    let cv = if cfg.use_control_variates { cv } else { None };
    let f = upper_iterate(k, dp, model, input, cfg, cv);
    sample_outer(model, dp.horizon(), cfg.outer, &cfg.factory(), f.as_ref())
}

/// Per-outer-path samples of `θ^(low,k)_0`.
pub fn improve_lower<'a>(
    k: usize,
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    input: Arc<dyn PathFunctional + 'a>,
    input_mart: Arc<dyn MartingaleProvider + 'a>,
    cfg: &NestedEstimatorConfig,
    cv: Option<Arc<dyn ControlVariate + 'a>>,
) -> Result<Vec<f64>> {
    cfg.validate(k)?;
    let cv = if cfg.use_control_variates { cv } else { None };
    let f = lower_iterate(k, dp, model, input, input_mart, cfg, cv);
    sample_outer(model, dp.horizon(), cfg.outer, &cfg.factory(), f.as_ref())
}

/// Whether a family consists of sub- or supersolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Sub,
    Super,
}

/// A family of input processes with nondecreasing windows `K(1) ⊆ … ⊆ K(J)`.
pub struct FamilySelector<'a> {
    pub kind: FamilyKind,
    pub members: Vec<Arc<dyn PathFunctional + 'a>>,
    /// `K(j)` at index `j − 1`.
    pub windows: Vec<Vec<usize>>,
}

impl<'a> FamilySelector<'a> {
    pub fn new(
        kind: FamilyKind,
        members: Vec<Arc<dyn PathFunctional + 'a>>,
        mut windows: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Config("family has no members".into()));
        }
        for (i, w) in windows.iter_mut().enumerate() {
            if w.is_empty() {
                return Err(Error::Config(format!("window K({}) is empty", i + 1)));
            }
            w.sort_unstable();
            w.dedup();
            if let Some(&l) = w.iter().find(|&&l| l >= members.len()) {
                return Err(Error::Config(format!("window K({}) names unknown member {l}", i + 1)));
            }
        }
        for i in 1..windows.len() {
            if !windows[i - 1].iter().all(|l| windows[i].binary_search(l).is_ok()) {
                return Err(Error::Config(format!("window K({i}) is not contained in K({})", i + 1)));
            }
        }
        Ok(Self { kind, members, windows })
    }

    /// The same window `I` at every step.
    pub fn full(kind: FamilyKind, members: Vec<Arc<dyn PathFunctional + 'a>>, horizon: usize) -> Result<Self> {
        let all: Vec<usize> = (0..members.len()).collect();
        Self::new(kind, members, vec![all; horizon])
    }

    fn window(&self, j: usize) -> Result<&[usize]> {
        self.windows
            .get(j - 1)
            .map(|w| w.as_slice())
            .ok_or_else(|| Error::Config(format!("no window K({j}) for this horizon")))
    }
}

/// Family-switched process: at step `j` picks the member in `K(j+1)` with the
/// largest (sub) or smallest (super) `f_j(X_j, Ê_j[β_{j+1} θ^l_{j+1}])`,
/// smallest index on ties, and exposes the selected weighted estimate.
pub struct FamilyImprovement<'a> {
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    factory: SeededStreamFactory,
    selector: FamilySelector<'a>,
    branching: Branching,
}

impl<'a> FamilyImprovement<'a> {
    /// Selected member index and `Ê_j[β_{j+1} θ^{l*}_{j+1}]` at step `j`.
    pub fn select(&self, path: &Path, j: usize) -> Result<(usize, Vec<f64>)> {
        let d = self.dp.weight_dim();
        let mut best: Option<(usize, f64, Vec<f64>)> = None;
        for &l in self.selector.window(j + 1)? {
            let est = BranchEstimator {
                dp: self.dp,
                model: self.model,
                factory: self.factory,
                theta: self.selector.members[l].clone(),
                branching: self.branching,
                cv: None,
            };
            let mut s = est.scratch(path);
            let mut z = vec![0.0; d];
            est.estimate(path, j, false, &mut z, &mut s)?;
            let v = self.dp.generator(j, path.state(j), &z);
            let better = match (&best, self.selector.kind) {
                (None, _) => true,
                (Some((_, b, _)), FamilyKind::Sub) => v > *b,
                (Some((_, b, _)), FamilyKind::Super) => v < *b,
            };
            if better {
                best = Some((l, v, z));
            }
        }
        let (l, _, z) = best.expect("windows are nonempty");
        Ok((l, z))
    }

    /// `Ȳ_0 = f_0(X_0, Ê_0[β_1 Ȳ_1])`.
    pub fn root_value(&self, path: &Path) -> Result<f64> {
        let (_, z) = self.select(path, 0)?;
        Ok(self.dp.generator(0, path.state(0), &z))
    }
}

impl ControlProvider for FamilyImprovement<'_> {
    fn fill(&self, path: &Path, from: usize, out: &mut Controls) -> Result<()> {
        for j in from..path.horizon() {
            let (_, z) = self.select(path, j)?;
            self.dp.maximizer(j, path.state(j), &z, out.control_mut(j));
            let c = self.dp.conjugate(j, path.state(j), out.control(j));
            out.set_conjugate(j, c);
        }
        Ok(())
    }
}

impl MartingaleProvider for FamilyImprovement<'_> {
    /// Doob martingale of `βȲ` with `Ȳ_{j+1} = Ê_{j+1}[θ^{l*(j+1)}_{j+1}]`.
    fn fill(&self, path: &Path, from: usize, out: &mut Increments) -> Result<()> {
        let horizon = path.horizon();
        let d = self.dp.weight_dim();
        for j in from..horizon {
            let (l, z) = self.select(path, j)?;
            let member = self.selector.members[l].clone();
            let next = if j + 1 < horizon {
                let est = BranchEstimator {
                    dp: self.dp,
                    model: self.model,
                    factory: self.factory,
                    theta: member,
                    branching: self.branching,
                    cv: None,
                };
                let mut s = est.scratch(path);
                let mut unused = vec![0.0; d];
                est.estimate(path, j + 1, true, &mut unused, &mut s)?
            } else {
                let mut theta = vec![0.0; horizon + 1];
                member.evaluate(path, horizon, &mut theta)?;
                theta[horizon]
            };
            let beta = path.weights(j + 1, d);
            let dm = out.get_mut(j);
            for k in 0..d {
                dm[k] = beta[k] * next - z[k];
            }
        }
        Ok(())
    }

    fn closed_form(&self) -> bool {
        false
    }

    fn dim(&self) -> usize {
        self.dp.weight_dim()
    }
}

/// Builds the combined improvement of a family: a control (subsolutions) or a
/// martingale (supersolutions) switching between members per step.
pub fn family_improve<'a>(
    selector: FamilySelector<'a>,
    dp: &'a dyn DynamicProgram,
    model: &'a dyn MarkovModel,
    cfg: &NestedEstimatorConfig,
) -> Result<FamilyImprovement<'a>> {
    if selector.windows.len() != dp.horizon() {
        return Err(Error::Config(format!(
            "family has {} windows for horizon {}",
            selector.windows.len(),
            dp.horizon()
        )));
    }
    Ok(FamilyImprovement {
        dp,
        model,
        factory: cfg.factory(),
        branching: cfg.branching(0, false),
        selector,
    })
}
