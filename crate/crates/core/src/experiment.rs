//! Batch experiments: fit an input approximation per grid cell, evaluate the
//! bounds and their improvements, and collect result rows.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{
    build_input_providers, lsmc_regress_later, martingale_minimize, one_step_consistency, BasisSet, ConstantBasis,
    GammaCandidate, IndicatorBasis, InputApproximation, MinimizeConfig, OneStepCheck,
};
use crate::dp::{check_monotonicity, DynamicProgram, MarkovModel};
use crate::error::{Error, Result, ResultExt};
use crate::exact::{enumerate_paths, exact_doob, solve_exact, ExactControl, FiniteSupportModel};
use crate::improve::{improve_lower, improve_upper, sample_outer, LowerMartingale, NestedEstimatorConfig};
use crate::models::{
    check_truncation, generic_basis, stopping_model, FundingModel, FundingParams, MaxAssetsBasis, StoppingParams,
    StoppingProblem, FUNDING_PRESET, STOPPING_PRESET,
};
use crate::path::Path;
use crate::pathwise::{theta_low, theta_up};
use crate::stats::rng::{Layer, SeededStreamFactory};
use crate::stats::{summarize, BoundEstimate};

pub const DEFAULT_SEED: u64 = 20240601;

/// Model selection: a named preset or inline parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Preset(String),
    Funding(FundingParams),
    Stopping(StoppingParams),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GenericMinimization,
    NongenericMinimization,
    Lsmc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::GenericMinimization => "generic-minimization",
            Method::NongenericMinimization => "nongeneric-minimization",
            Method::Lsmc => "lsmc",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathCounts {
    pub outer: usize,
    pub middle: usize,
    #[serde(default)]
    pub inner: usize,
    #[serde(default = "default_regression")]
    pub regression: usize,
    #[serde(default = "default_mini")]
    pub mini: usize,
    #[serde(default = "default_mini")]
    pub test: usize,
}

fn default_regression() -> usize {
    100_000
}

fn default_mini() -> usize {
    1000
}

fn default_alpha() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

fn default_verify_samples() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub method: Method,
    /// Horizons `J`; the model's own when empty.
    #[serde(default, rename = "J")]
    pub steps: Vec<usize>,
    /// Correlations `ρ` (funding only); the model's own when empty.
    #[serde(default)]
    pub rho: Vec<f64>,
    pub paths: PathCounts,
    #[serde(default = "MinimizeConfig::default_gammas")]
    pub gammas: Vec<f64>,
    pub k_max: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Output stem; `<stem>.csv` and `<stem>.json` are written.
    #[serde(default)]
    pub output: Option<String>,
    /// Fixed global coefficients instead of fitting (minimization methods).
    #[serde(default)]
    pub coefficients: Option<Vec<f64>>,
    #[serde(default = "default_true")]
    pub control_variates: bool,
    /// Enumerate continuations of finitely supported models.
    #[serde(default)]
    pub enumerate: bool,
    #[serde(default)]
    pub lower_martingale: LowerMartingale,
    /// Sample count of the randomized diagnostics in `verify`.
    #[serde(default = "default_verify_samples")]
    pub verify_samples: usize,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths.outer < 2 || self.paths.middle == 0 {
            return Err(Error::Config("need at least 2 outer paths and 1 middle path".into()));
        }
        if self.k_max > 2 && !self.enumerate {
            return Err(Error::Config(format!("k_max = {} exceeds 2", self.k_max)));
        }
        if self.k_max == 2 && self.paths.inner == 0 && !self.enumerate {
            return Err(Error::Config("k_max = 2 needs inner paths".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha {} must lie in (0, 1)", self.alpha)));
        }
        if self.steps.contains(&0) {
            return Err(Error::Config("horizons must be positive".into()));
        }
        if self.coefficients.is_some() && self.method == Method::Lsmc {
            return Err(Error::Config(
                "fixed coefficients apply to minimization methods only".into(),
            ));
        }
        if matches!(self.model_kind()?, ModelKind::Stopping(_)) && !self.rho.is_empty() {
            return Err(Error::Config("the stopping model has no correlation parameter".into()));
        }
        Ok(())
    }

    fn model_kind(&self) -> Result<ModelKind> {
        Ok(match &self.model {
            ModelConfig::Preset(name) if name == FUNDING_PRESET => ModelKind::Funding(FundingParams::benchmark()),
            ModelConfig::Preset(name) if name == STOPPING_PRESET => ModelKind::Stopping(StoppingParams::binomial()),
            ModelConfig::Preset(name) => {
                return Err(Error::Config(format!(
                    "unknown preset '{name}' (expected '{FUNDING_PRESET}' or '{STOPPING_PRESET}')"
                )))
            }
            ModelConfig::Funding(p) => ModelKind::Funding(p.clone()),
            ModelConfig::Stopping(p) => ModelKind::Stopping(p.clone()),
        })
    }

    /// Grid cells in output order.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let cells = match self.model_kind()? {
            ModelKind::Funding(p) => {
                let steps = if self.steps.is_empty() {
                    vec![p.steps]
                } else {
                    self.steps.clone()
                };
                let rhos = if self.rho.is_empty() {
                    vec![p.rho]
                } else {
                    self.rho.clone()
                };
                steps
                    .iter()
                    .flat_map(|&j| rhos.iter().map(move |&r| (j, r)))
                    .map(|(j, r)| Cell {
                        steps: j,
                        rho: Some(r),
                        kind: ModelKind::Funding(p.clone().with_grid(j, r)),
                    })
                    .collect()
            }
            ModelKind::Stopping(p) => {
                let steps = if self.steps.is_empty() {
                    vec![p.steps]
                } else {
                    self.steps.clone()
                };
                steps
                    .into_iter()
                    .map(|j| Cell {
                        steps: j,
                        rho: None,
                        kind: ModelKind::Stopping(StoppingParams { steps: j, ..p.clone() }),
                    })
                    .collect()
            }
        };
        Ok(cells)
    }

    fn nested(&self) -> NestedEstimatorConfig {
        NestedEstimatorConfig {
            outer: self.paths.outer,
            middle: self.paths.middle,
            inner: self.paths.inner,
            use_control_variates: self.control_variates,
            seed: self.seed(),
            enumerate: self.enumerate,
            lower_martingale: self.lower_martingale,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum ModelKind {
    Funding(FundingParams),
    Stopping(StoppingParams),
}

/// One `(J, ρ)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub steps: usize,
    pub rho: Option<f64>,
    kind: ModelKind,
}

enum Instance {
    Funding(FundingModel),
    Stopping(StoppingProblem, FiniteSupportModel),
}

impl Instance {
    fn new(cell: &Cell) -> Result<Self> {
        Ok(match &cell.kind {
            ModelKind::Funding(p) => {
                let check = check_truncation(p)?;
                if !check.holds {
                    return Err(Error::Truncation {
                        lhs: check.lhs,
                        slack: check.slack,
                    });
                }
                Instance::Funding(FundingModel::new(p.clone())?)
            }
            ModelKind::Stopping(p) => {
                let (dp, model) = stopping_model(p)?;
                Instance::Stopping(dp, model)
            }
        })
    }

    fn dp(&self) -> &dyn DynamicProgram {
        match self {
            Instance::Funding(m) => m,
            Instance::Stopping(dp, _) => dp,
        }
    }

    fn model(&self) -> &dyn MarkovModel {
        match self {
            Instance::Funding(m) => m,
            Instance::Stopping(_, m) => m,
        }
    }

    fn basis(&self, method: Method) -> Result<Arc<dyn BasisSet>> {
        Ok(match (self, method) {
            (Instance::Funding(m), Method::GenericMinimization) => Arc::new(generic_basis(m)),
            (Instance::Funding(m), _) => Arc::new(MaxAssetsBasis::new(m)),
            (Instance::Stopping(..), Method::GenericMinimization) => Arc::new(ConstantBasis { weight_mean: vec![1.0] }),
            (Instance::Stopping(dp, m), _) => Arc::new(IndicatorBasis::new(m, dp.steps, 1)?),
        })
    }
}

/// Input approximation fitted on one grid cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FittedCell {
    #[serde(rename = "J")]
    pub steps: usize,
    pub rho: Option<f64>,
    pub approximation: InputApproximation,
    /// Per-`γ` minimization results; empty for regression fits.
    #[serde(default)]
    pub candidates: Vec<GammaCandidate>,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Up,
    Low,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Up => "up",
            BoundKind::Low => "low",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub method: Method,
    #[serde(rename = "J")]
    pub steps: usize,
    pub rho: Option<f64>,
    pub kind: BoundKind,
    pub k: usize,
    pub mean: f64,
    pub sd: f64,
    pub half_width: f64,
    pub count: usize,
    pub wall_time: f64,
    pub seed: u64,
    /// False when the input approximation's optimizer did not converge.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub fits: Vec<FittedCell>,
    pub rows: Vec<ResultRow>,
}

impl ExperimentResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_csv(&self) -> String {
        rows_to_csv(&self.rows)
    }
}

pub const CSV_HEADER: &str = "method,J,rho,kind,k,mean,sd,half_width,count,seed,converged";

/// CSV with 17 significant digits. Wall time is omitted so that identical
/// configurations give identical files.
pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let rho = r.rho.map(|v| format!("{v}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{},{},{}",
            r.method.name(),
            r.steps,
            rho,
            r.kind.name(),
            r.k,
            r.mean,
            r.sd,
            r.half_width,
            r.count,
            r.seed,
            r.converged
        );
    }
    out
}

fn fit_instance(cfg: &ExperimentConfig, cell: &Cell, inst: &Instance, basis: Arc<dyn BasisSet>) -> Result<FittedCell> {
    let start = Instant::now();
    let factory = SeededStreamFactory::new(cfg.seed());
    let horizon = inst.dp().horizon();
    let (approximation, candidates) = match (&cfg.coefficients, cfg.method) {
        (Some(a), _) => {
            if a.len() != basis.size() {
                return Err(Error::Config(format!(
                    "{} coefficients for a basis of size {}",
                    a.len(),
                    basis.size()
                )));
            }
            (
                InputApproximation::global(basis.as_ref(), horizon, a.clone()),
                Vec::new(),
            )
        }
        (None, Method::Lsmc) => (
            lsmc_regress_later(inst.dp(), inst.model(), basis, cfg.paths.regression, &factory)?,
            Vec::new(),
        ),
        (None, _) => {
            let mcfg = MinimizeConfig {
                mini: cfg.paths.mini,
                test: cfg.paths.test,
                gammas: cfg.gammas.clone(),
                start: None,
            };
            let out = martingale_minimize(inst.dp(), inst.model(), basis, &mcfg, &factory)?;
            (out.approx, out.candidates)
        }
    };
    Ok(FittedCell {
        steps: cell.steps,
        rho: cell.rho,
        approximation,
        candidates,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn evaluate_instance(
    cfg: &ExperimentConfig,
    cell: &Cell,
    inst: &Instance,
    basis: Arc<dyn BasisSet>,
    approx: &InputApproximation,
) -> Result<Vec<ResultRow>> {
    let dp = inst.dp();
    let model = inst.model();
    let prov = build_input_providers(approx.clone(), basis, dp)?;
    let ncfg = cfg.nested();
    let factory = ncfg.factory();
    let cv = Some(prov.control_variate());
    let mut rows = Vec::new();
    for k in 0..=cfg.k_max {
        for kind in [BoundKind::Up, BoundKind::Low] {
            let start = Instant::now();
            let samples = match (kind, k) {
                (BoundKind::Up, 0) => sample_outer(model, dp.horizon(), ncfg.outer, &factory, prov.upper.as_ref()),
                (BoundKind::Low, 0) => sample_outer(model, dp.horizon(), ncfg.outer, &factory, prov.lower.as_ref()),
                (BoundKind::Up, k) => improve_upper(k, dp, model, prov.upper.clone(), &ncfg, cv.clone()),
                (BoundKind::Low, k) => {
                    improve_lower(k, dp, model, prov.lower.clone(), prov.martingale(), &ncfg, cv.clone())
                }
            }
            .context_with(|| format!("{} bound, k={k}", kind.name()))?;
            let est = summarize(&samples, cfg.alpha)?;
            rows.push(row(cfg, cell, kind, k, &est, start, approx.converged));
        }
    }
    Ok(rows)
}

fn row(
    cfg: &ExperimentConfig,
    cell: &Cell,
    kind: BoundKind,
    k: usize,
    est: &BoundEstimate,
    start: Instant,
    converged: bool,
) -> ResultRow {
    ResultRow {
        method: cfg.method,
        steps: cell.steps,
        rho: cell.rho,
        kind,
        k,
        mean: est.mean,
        sd: est.sd,
        half_width: est.half_width,
        count: est.count,
        wall_time: start.elapsed().as_secs_f64(),
        seed: cfg.seed(),
        converged,
    }
}

fn cell_context(cell: &Cell) -> String {
    match cell.rho {
        Some(r) => format!("cell J={}, rho={r}", cell.steps),
        None => format!("cell J={}", cell.steps),
    }
}

/// Fits the input approximation on every grid cell.
pub fn fit(cfg: &ExperimentConfig) -> Result<Vec<FittedCell>> {
    cfg.validate()?;
    cfg.cells()?
        .par_iter()
        .map(|cell| {
            let inst = Instance::new(cell)?;
            let basis = inst.basis(cfg.method)?;
            fit_instance(cfg, cell, &inst, basis).context_with(|| cell_context(cell))
        })
        .collect()
}

/// Evaluates bounds for previously fitted cells. Every grid cell of `cfg`
/// needs a matching fit.
pub fn bound(cfg: &ExperimentConfig, fits: &[FittedCell]) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cells = cfg.cells()?;
    let rows: Vec<Vec<ResultRow>> = cells
        .par_iter()
        .map(|cell| {
            let fit = fits
                .iter()
                .find(|f| f.steps == cell.steps && f.rho == cell.rho)
                .ok_or_else(|| Error::Config(format!("no fitted approximation for {}", cell_context(cell))))?;
            let inst = Instance::new(cell)?;
            let basis = inst.basis(cfg.method)?;
            evaluate_instance(cfg, cell, &inst, basis, &fit.approximation).context_with(|| cell_context(cell))
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        fits: fits.to_vec(),
        rows: rows.into_iter().flatten().collect(),
    })
}

/// Fits and evaluates every grid cell.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cells = cfg.cells()?;
    let results: Vec<(FittedCell, Vec<ResultRow>)> = cells
        .par_iter()
        .map(|cell| {
            (|| {
                let inst = Instance::new(cell)?;
                let basis = inst.basis(cfg.method)?;
                let fit = fit_instance(cfg, cell, &inst, basis.clone())?;
                let rows = evaluate_instance(cfg, cell, &inst, basis, &fit.approximation)?;
                Ok((fit, rows))
            })()
            .context_with(|| cell_context(cell))
        })
        .collect::<Result<_>>()?;
    let (fits, rows): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(ExperimentResult {
        config: cfg.clone(),
        fits,
        rows: rows.into_iter().flatten().collect(),
    })
}

/// One named diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Truncation slack of the first failing cell, if any.
    pub fn truncation_failure(&self) -> Option<&Check> {
        self.checks
            .iter()
            .find(|c| c.name.starts_with("truncation") && !c.passed)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "[{}] {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn check_result(name: impl Into<String>, r: Result<Check>) -> Check {
    let name = name.into();
    r.unwrap_or_else(|e| check(name, false, e.to_string()))
}

/// Exact solution and pathwise optimality of the exact Doob martingale and
/// optimal control on a finitely supported model.
fn oracle_checks(
    label: &str,
    dp: &StoppingProblem,
    model: &FiniteSupportModel,
    expected_root: Option<f64>,
) -> Vec<Check> {
    let mut out = Vec::new();
    let tree = match solve_exact(dp, model) {
        Ok(t) => t,
        Err(e) => return vec![check(format!("{label}: exact solution"), false, e.to_string())],
    };
    let root = tree.root_value();
    if let Some(v) = expected_root {
        out.push(check(
            format!("{label}: exact root value"),
            (root - v).abs() <= 1e-12,
            format!("Y_0 = {root}, expected {v}"),
        ));
    }
    out.push(check_result(
        format!("{label}: pathwise optimality"),
        (|| {
            let doob = exact_doob(dp, &tree);
            let control = ExactControl { dp, tree: &tree };
            let mut worst = 0.0f64;
            let paths = enumerate_paths(model, dp.steps)?;
            for (p, _) in &paths {
                let up = theta_up(dp, p, &doob)?[0];
                let low = theta_low(dp, p, &control, &doob)?[0];
                worst = worst.max((up - root).abs()).max((low - root).abs());
            }
            Ok(check(
                format!("{label}: pathwise optimality"),
                worst <= 1e-10,
                format!("max |θ_0 − Y_0| = {worst:.3e} over {} paths", paths.len()),
            ))
        })(),
    ));
    out
}

/// Truncation slack, sampled monotonicity, closed-form one-step expectations
/// and the oracle self-tests, at reduced sample counts.
pub fn verify(cfg: &ExperimentConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let factory = SeededStreamFactory::new(cfg.seed());
    let mut checks = Vec::new();
    for cell in cfg.cells()? {
        let ctx = cell_context(&cell);
        match &cell.kind {
            ModelKind::Funding(p) => {
                let t = check_truncation(p)?;
                checks.push(check(
                    format!("truncation ({ctx})"),
                    t.holds,
                    format!("left side {:.6} ≤ 1, slack {:.6}", t.lhs, t.slack),
                ));
                let model = FundingModel::new(p.clone())?;
                let mono = check_monotonicity(&model, &model, cfg.verify_samples, &factory);
                checks.push(check(
                    format!("monotonicity ({ctx})"),
                    mono.passed(),
                    format!("{} violations in {} evaluations", mono.violation_count, mono.checked),
                ));
                let bases: Vec<Arc<dyn BasisSet>> =
                    vec![Arc::new(generic_basis(&model)), Arc::new(MaxAssetsBasis::new(&model))];
                for basis in bases {
                    let name = format!("one-step expectations, basis {} ({ctx})", basis.id());
                    checks.push(check_result(
                        name.clone(),
                        one_step_report(
                            basis.as_ref(),
                            &model,
                            p.steps,
                            &factory,
                            Some(cfg.verify_samples.max(2)),
                            &name,
                        ),
                    ));
                }
            }
            ModelKind::Stopping(p) => {
                let (dp, model) = stopping_model(p)?;
                let mono = check_monotonicity(&dp, &model, cfg.verify_samples, &factory);
                checks.push(check(
                    format!("monotonicity ({ctx})"),
                    mono.passed(),
                    format!("{} violations in {} evaluations", mono.violation_count, mono.checked),
                ));
                checks.extend(oracle_checks(&format!("stopping oracle ({ctx})"), &dp, &model, None));
                let name = format!("one-step expectations, indicator basis ({ctx})");
                checks.push(check_result(
                    name.clone(),
                    IndicatorBasis::new(&model, dp.steps, 1)
                        .and_then(|b| one_step_report(&b, &model, dp.steps, &factory, None, &name)),
                ));
            }
        }
    }
    let (dp, model) = stopping_model(&StoppingParams::binomial())?;
    checks.extend(oracle_checks("binomial oracle", &dp, &model, Some(1.5625)));
    Ok(VerifyReport { checks })
}

fn one_step_report(
    basis: &dyn BasisSet,
    model: &dyn MarkovModel,
    horizon: usize,
    factory: &SeededStreamFactory,
    samples: Option<usize>,
    name: &str,
) -> Result<Check> {
    let path = Path::simulate(model, horizon, factory.top_label(Layer::Diagnostics, u64::MAX), factory);
    let mut steps: Vec<usize> = vec![0, horizon / 2, horizon - 1];
    steps.dedup();
    let results: Vec<OneStepCheck> = steps
        .iter()
        .map(|&j| one_step_consistency(basis, model, &path, j, samples, 4.0, factory))
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let err = results.iter().map(|r| r.max_abs_error).fold(0.0, f64::max);
    Ok(check(
        name,
        results.iter().all(|r| r.passed),
        format!("max error {err:.3e}, {worst:.3} of tolerance at j ∈ {steps:?}"),
    ))
}
