//! Basis functions for the funding model.

use crate::approx::{BasisSet, ConstantBasis};
use crate::models::black_scholes::{call_expectation, call_spread_expectation, truncated_exp_moment};
use crate::models::funding::FundingModel;

/// The single generic function `η ≡ 1`; `R_j = (1, 0, …, 0)` because the
/// truncated increments are symmetric.
pub fn generic_basis(model: &FundingModel) -> ConstantBasis {
    let mut weight_mean = vec![0.0; model.assets() + 1];
    weight_mean[0] = 1.0;
    ConstantBasis { weight_mean }
}

/// Indices of the largest and second-largest coordinate, smallest index
/// first on ties.
pub fn top_two(x: &[f64]) -> (usize, usize) {
    let mut first = 0;
    for (i, v) in x.iter().enumerate() {
        if *v > x[first] {
            first = i;
        }
    }
    let mut second = usize::MAX;
    for (i, v) in x.iter().enumerate() {
        if i != first && (second == usize::MAX || *v > x[second]) {
            second = i;
        }
    }
    (first, if second == usize::MAX { first } else { second })
}

/// Six functions built around the assets that were largest and
/// second-largest one step earlier:
///
/// ```text
/// η_j = (1, X_{d¹,j}, X_{d²,j}, V(X_{d¹,j}, t_j), V(X_{d²,j}, t_j), C_{K₂}(X_{d¹,j}, t_j))
/// ```
///
/// with `d^ι = d^ι(X_{j−1})`, `V` the conditional expectation of the
/// call-spread payoff and `C_{K₂}` that of the `K₂` call, both under the
/// path law (drift `μ`, undiscounted).
#[derive(Debug, Clone)]
pub struct MaxAssetsBasis {
    model: FundingModel,
    /// `e^{−σ²Δ/2} E[p_C(ΔW) e^{σΔW}] / Δ` for every `σ_{d,l}`, row-major.
    moment: Vec<f64>,
}

impl MaxAssetsBasis {
    pub const SIZE: usize = 6;

    pub fn new(model: &FundingModel) -> Self {
        let n = model.assets();
        let dt = model.dt();
        let c = model.params.truncation;
        let moment = (0..n * n)
            .map(|i| {
                let s = model.sigma(i / n, i % n);
                (-0.5 * s * s * dt).exp() * truncated_exp_moment(s, dt, c) / dt
            })
            .collect();
        Self {
            model: model.clone(),
            moment,
        }
    }

    fn tau(&self, j: usize) -> f64 {
        (self.model.params.maturity - self.model.time(j)).max(0.0)
    }

    fn spread(&self, x: f64, d: usize, tau: f64) -> (f64, f64) {
        let p = &self.model.params;
        call_spread_expectation(x, p.k1, p.k2, tau, self.model.asset_vol(d), p.mu)
    }

    fn upper_call(&self, x: f64, d: usize, tau: f64) -> (f64, f64) {
        let p = &self.model.params;
        call_expectation(x, p.k2, tau, self.model.asset_vol(d), p.mu)
    }
}

impl BasisSet for MaxAssetsBasis {
    fn size(&self) -> usize {
        Self::SIZE
    }

    fn weight_dim(&self) -> usize {
        self.model.assets() + 1
    }

    fn id(&self) -> String {
        "max-assets-6".into()
    }

    fn eval(&self, j: usize, x_prev: &[f64], _b: &[f64], x: &[f64], out: &mut [f64]) {
        let (d1, d2) = top_two(x_prev);
        let tau = self.tau(j);
        out[0] = 1.0;
        out[1] = x[d1];
        out[2] = x[d2];
        out[3] = self.spread(x[d1], d1, tau).0;
        out[4] = self.spread(x[d2], d2, tau).0;
        out[5] = self.upper_call(x[d1], d1, tau).0;
    }

    fn one_step(&self, j: usize, x: &[f64], out: &mut [f64]) {
        let k = Self::SIZE;
        let n = self.model.assets();
        let growth = (self.model.params.mu * self.model.dt()).exp();
        let (d1, d2) = top_two(x);
        let tau = self.tau(j);
        out.fill(0.0);
        out[0] = 1.0;

        // Linear functions: E[β_n X_{d,j+1}] through the truncated exponential moment.
        for (col, d) in [(1, d1), (2, d2)] {
            let mean = x[d] * growth;
            out[col] = mean;
            for l in 0..n {
                out[(l + 1) * k + col] = mean * self.moment[d * n + l];
            }
        }

        // Option functions: the martingale value and σ_{d,n}·x·∂_x V.
        let options = [
            (3, d1, self.spread(x[d1], d1, tau)),
            (4, d2, self.spread(x[d2], d2, tau)),
            (5, d1, self.upper_call(x[d1], d1, tau)),
        ];
        for (col, d, (value, delta)) in options {
            out[col] = value;
            for l in 0..n {
                out[(l + 1) * k + col] = self.model.sigma(d, l) * x[d] * delta;
            }
        }
    }
}
