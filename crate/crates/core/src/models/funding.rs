//! European option pricing with different lending and borrowing rates.
//!
//! Assets follow correlated geometric Brownian motions and the price solves
//!
//! ```text
//! Y_j = (1 − R^l Δ) z_0 − (μ − R^l) Δ z_{(−0)}ᵀσ⁻¹𝟏 + (R^b − R^l) Δ (z_0 − z_{(−0)}ᵀσ⁻¹𝟏)_−
//! ```
//!
//! with `z = E_j[β_{j+1} Y_{j+1}]` and `β_{j+1} = (1, p_C(ΔW_{j+1})/Δ)`.
//! The innovation is `B = (β, ΔW)`: the weights see truncated Brownian
//! increments, the asset prices the raw ones.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dp::{dot, DynamicProgram, MarkovModel};
use crate::error::{Error, Result};
use crate::stats::rng::RandomStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FundingParams {
    pub r_lend: f64,
    pub r_borrow: f64,
    pub mu: f64,
    pub sigma_base: f64,
    pub rho: f64,
    pub x0: Vec<f64>,
    pub k1: f64,
    pub k2: f64,
    pub maturity: f64,
    pub steps: usize,
    pub truncation: f64,
}

impl FundingParams {
    /// The five-asset call spread on the maximum.
    pub fn benchmark() -> Self {
        Self {
            r_lend: 0.01,
            r_borrow: 0.06,
            mu: 0.05,
            sigma_base: 0.2,
            rho: 0.3,
            x0: vec![100.0; 5],
            k1: 95.0,
            k2: 115.0,
            maturity: 0.25,
            steps: 20,
            truncation: 0.77,
        }
    }

    pub fn with_grid(mut self, steps: usize, rho: f64) -> Self {
        self.steps = steps;
        self.rho = rho;
        self
    }

    pub fn assets(&self) -> usize {
        self.x0.len()
    }

    pub fn dt(&self) -> f64 {
        self.maturity / self.steps as f64
    }

    /// `σ̃·L` with first column `ρ` below the diagonal and `√(1−ρ²)` on it.
    pub fn sigma(&self) -> DMatrix<f64> {
        let n = self.assets();
        let s = (1.0 - self.rho * self.rho).sqrt();
        DMatrix::from_fn(n, n, |r, c| {
            let v = match (r, c) {
                (0, 0) => 1.0,
                (_, 0) => self.rho,
                (r, c) if r == c => s,
                _ => 0.0,
            };
            self.sigma_base * v
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.assets() == 0 {
            return Err(Error::Config("at least one asset is required".into()));
        }
        if self.steps == 0 || self.maturity.is_nan() || self.maturity <= 0.0 {
            return Err(Error::Config("steps and maturity must be positive".into()));
        }
        if self.r_lend > self.r_borrow {
            return Err(Error::Config(format!(
                "lending rate {} exceeds borrowing rate {}",
                self.r_lend, self.r_borrow
            )));
        }
        if self.truncation.is_nan() || self.truncation < 0.0 {
            return Err(Error::Config("truncation level must be nonnegative".into()));
        }
        if self.rho.is_nan() || self.rho.abs() >= 1.0 {
            return Err(Error::Config(format!("correlation {} must lie in (−1, 1)", self.rho)));
        }
        if self.sigma().determinant().abs() <= 1e-12 {
            return Err(Error::Config("diffusion matrix is singular".into()));
        }
        Ok(())
    }
}

/// Left side of the sufficient monotonicity condition and its slack `1 − lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationCheck {
    pub lhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// `Δ·max{|R^l|,|R^b|} + C·max{|μ−R^l|,|μ−R^b|}·Σ_d|Σ_l (σ⁻¹)_{d,l}| ≤ 1`.
pub fn check_truncation(params: &FundingParams) -> Result<TruncationCheck> {
    params.validate()?;
    let inv = params
        .sigma()
        .try_inverse()
        .ok_or_else(|| Error::Config("diffusion matrix is singular".into()))?;
    let abs_row_sums: f64 = inv.row_iter().map(|r| r.sum().abs()).sum();
    let rate = params.r_lend.abs().max(params.r_borrow.abs());
    let drift = (params.mu - params.r_lend)
        .abs()
        .max((params.mu - params.r_borrow).abs());
    let lhs = params.dt() * rate + params.truncation * drift * abs_row_sums;
    Ok(TruncationCheck {
        lhs,
        slack: 1.0 - lhs,
        holds: lhs <= 1.0,
    })
}

/// Dynamic program, state dynamics and basis ingredients of the funding model.
#[derive(Debug, Clone)]
pub struct FundingModel {
    pub params: FundingParams,
    dt: f64,
    sigma: Vec<f64>,
    /// Row sums of `σ⁻¹`.
    inv_row_sums: Vec<f64>,
    /// `(μ − ½Σ_l σ_{n,l}²)Δ`.
    log_drift: Vec<f64>,
    /// Euclidean norm of row `n` of `σ`.
    asset_vol: Vec<f64>,
}

impl FundingModel {
    pub fn new(params: FundingParams) -> Result<Self> {
        params.validate()?;
        let n = params.assets();
        let dt = params.dt();
        let sigma = params.sigma();
        let inv = sigma
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Config("diffusion matrix is singular".into()))?;
        let inv_row_sums = inv.row_iter().map(|r| r.sum()).collect();
        let row_sq: Vec<f64> = (0..n).map(|r| sigma.row(r).iter().map(|v| v * v).sum()).collect();
        let log_drift = row_sq.iter().map(|s| (params.mu - 0.5 * s) * dt).collect();
        let asset_vol = row_sq.iter().map(|s| s.sqrt()).collect();
        let sigma = (0..n * n).map(|i| sigma[(i / n, i % n)]).collect();
        Ok(Self {
            params,
            dt,
            sigma,
            inv_row_sums,
            log_drift,
            asset_vol,
        })
    }

    pub fn assets(&self) -> usize {
        self.params.assets()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `σ_{n,l}`.
    pub fn sigma(&self, n: usize, l: usize) -> f64 {
        self.sigma[n * self.assets() + l]
    }

    pub fn inv_row_sums(&self) -> &[f64] {
        &self.inv_row_sums
    }

    /// Volatility of asset `n` alone.
    pub fn asset_vol(&self, n: usize) -> f64 {
        self.asset_vol[n]
    }

    pub fn time(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn clamp(&self, w: f64) -> f64 {
        w.clamp(-self.params.truncation, self.params.truncation)
    }

    /// `X_{n,j+1} = X_{n,j}·exp{(μ − ½Σ_l σ_{n,l}²)Δ + Σ_l σ_{n,l}ΔW_l}`.
    pub fn gbm_step(&self, x: &[f64], dw: &[f64], out: &mut [f64]) {
        let n = self.assets();
        for r in 0..n {
            let row = &self.sigma[r * n..(r + 1) * n];
            out[r] = x[r] * (self.log_drift[r] + dot(row, dw)).exp();
        }
    }

    /// Innovation `(1, p_C(ΔW)/Δ, ΔW)` for a raw Brownian increment.
    pub fn innovation(&self, dw: &[f64]) -> Vec<f64> {
        let mut b = Vec::with_capacity(1 + 2 * dw.len());
        b.push(1.0);
        b.extend(dw.iter().map(|&w| self.clamp(w) / self.dt));
        b.extend_from_slice(dw);
        b
    }

    /// `u(s) = (1 − sΔ, −(μ − s)Δ·(σ⁻¹𝟏))`.
    pub fn control_at_rate(&self, s: f64, out: &mut [f64]) {
        out[0] = 1.0 - s * self.dt;
        let scale = -(self.params.mu - s) * self.dt;
        for (o, rs) in out[1..].iter_mut().zip(&self.inv_row_sums) {
            *o = scale * rs;
        }
    }

    /// `z_{(−0)}ᵀσ⁻¹𝟏`, the position in the risky assets.
    #[inline]
    fn position(&self, z: &[f64]) -> f64 {
        dot(&z[1..], &self.inv_row_sums)
    }

    pub fn payoff(&self, x: &[f64]) -> f64 {
        let m = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (m - self.params.k1).max(0.0) - 2.0 * (m - self.params.k2).max(0.0)
    }
}

impl DynamicProgram for FundingModel {
    fn horizon(&self) -> usize {
        self.params.steps
    }

    fn weight_dim(&self) -> usize {
        self.assets() + 1
    }

    fn generator(&self, _j: usize, _x: &[f64], z: &[f64]) -> f64 {
        let p = &self.params;
        let pos = self.position(z);
        (1.0 - p.r_lend * self.dt) * z[0] - (p.mu - p.r_lend) * self.dt * pos
            + (p.r_borrow - p.r_lend) * self.dt * (pos - z[0]).max(0.0)
    }

    fn conjugate(&self, _j: usize, _x: &[f64], u: &[f64]) -> f64 {
        let p = &self.params;
        let s = (1.0 - u[0]) / self.dt;
        let tol = 1e-9;
        if s < p.r_lend - tol || s > p.r_borrow + tol {
            return f64::INFINITY;
        }
        let scale = -(p.mu - s) * self.dt;
        let on_segment = u[1..]
            .iter()
            .zip(&self.inv_row_sums)
            .all(|(v, rs)| (v - scale * rs).abs() <= tol * (1.0 + rs.abs()));
        if on_segment {
            0.0
        } else {
            f64::INFINITY
        }
    }

    fn maximizer(&self, _j: usize, _x: &[f64], z: &[f64], out: &mut [f64]) {
        let s = if z[0] >= self.position(z) {
            self.params.r_lend
        } else {
            self.params.r_borrow
        };
        self.control_at_rate(s, out);
    }

    fn terminal(&self, x: &[f64]) -> f64 {
        self.payoff(x)
    }
}

impl MarkovModel for FundingModel {
    fn state_dim(&self) -> usize {
        self.assets()
    }

    fn innovation_dim(&self) -> usize {
        1 + 2 * self.assets()
    }

    fn initial_state(&self) -> &[f64] {
        &self.params.x0
    }

    fn step(&self, _j: usize, x_prev: &[f64], b: &[f64], out: &mut [f64]) {
        let n = self.assets();
        self.gbm_step(x_prev, &b[1 + n..], out);
    }

    fn sample_innovation(&self, _j: usize, stream: &mut RandomStream, out: &mut [f64]) -> Option<usize> {
        let n = self.assets();
        let sd = self.dt.sqrt();
        out[0] = 1.0;
        for d in 0..n {
            let w = sd * stream.standard_normal();
            out[1 + d] = self.clamp(w) / self.dt;
            out[1 + n + d] = w;
        }
        None
    }

    /// Increments on the grid `{−C, 0, C}^N`.
    fn stress_innovations(&self, _j: usize) -> Vec<Vec<f64>> {
        let n = self.assets();
        let c = self.params.truncation;
        let total = 3usize.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let dw: Vec<f64> = (0..n)
                    .map(|_| {
                        let v = [-c, 0.0, c][code % 3];
                        code /= 3;
                        v
                    })
                    .collect();
                self.innovation(&dw)
            })
            .collect()
    }
}
