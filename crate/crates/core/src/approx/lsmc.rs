use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::approx::{ApproxMode, BasisSet, Coefficients, InputApproximation};
use crate::dp::{dot, DynamicProgram, MarkovModel};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::stats::rng::{Layer, SeededStreamFactory};

/// Relative singular-value cutoff of the least-squares solver.
const RTOL: f64 = 1e-10;

/// Minimum-norm least squares `argmin_a |y − Xa|²` through the normal
/// equations and a truncated SVD. Returns the coefficients and the numerical
/// rank of `XᵀX`.
pub fn solve_least_squares(rows: &[Vec<f64>], y: &[f64]) -> Result<(Vec<f64>, usize)> {
    let k = rows.first().map(|r| r.len()).unwrap_or(0);
    if k == 0 || rows.len() != y.len() {
        return Err(Error::Structure("design matrix and regressand do not match".into()));
    }
    let n = rows.len() as f64;
    let mut gram = DMatrix::<f64>::zeros(k, k);
    let mut rhs = DVector::<f64>::zeros(k);
    for (row, &v) in rows.iter().zip(y) {
        for a in 0..k {
            rhs[a] += row[a] * v / n;
            for b in a..k {
                gram[(a, b)] += row[a] * row[b] / n;
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    let svd = gram.svd(true, true);
    let smax = svd.singular_values.max();
    let eps = (RTOL * smax).max(f64::MIN_POSITIVE);
    let rank = svd.rank(eps);
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::Structure(format!("least-squares solve failed: {e}")))?;
    Ok((sol.iter().copied().collect(), rank))
}

/// Regress-later least-squares Monte Carlo.
///
/// `a_J` regresses `g(X_J)` on `η_J`; for `j = J−1, …, 1`, `a_j` regresses
/// `f_j(X_j, R_j(X_j) a_{j+1})` on `η_j`, with the one-step expectation in
/// closed form.
pub fn lsmc_regress_later(
    dp: &dyn DynamicProgram,
    model: &dyn MarkovModel,
    basis: Arc<dyn BasisSet + '_>,
    paths: usize,
    factory: &SeededStreamFactory,
) -> Result<InputApproximation> {
    let k = basis.size();
    let d = dp.weight_dim();
    let horizon = dp.horizon();
    if paths < k {
        return Err(Error::Config(format!(
            "{paths} regression paths for {k} basis functions"
        )));
    }
    let sample: Vec<Path> = (0..paths)
        .into_par_iter()
        .map(|l| Path::simulate(model, horizon, factory.top_label(Layer::Regression, l as u64), factory))
        .collect();

    let mut coeffs = vec![Vec::new(); horizon];
    for j in (1..=horizon).rev() {
        let next = (j < horizon).then(|| coeffs[j].clone());
        let rows: Vec<(Vec<f64>, f64)> = sample
            .par_iter()
            .map(|p| {
                let mut eta = vec![0.0; k];
                basis.eval_path(j, p, &mut eta);
                let y = match &next {
                    None => dp.terminal(p.state(j)),
                    Some(a) => {
                        let mut r = vec![0.0; d * k];
                        basis.one_step(j, p.state(j), &mut r);
                        let z: Vec<f64> = (0..d).map(|i| dot(&r[i * k..(i + 1) * k], a)).collect();
                        dp.generator(j, p.state(j), &z)
                    }
                };
                (eta, y)
            })
            .collect();
        if let Some(l) = rows.iter().position(|(_, y)| !y.is_finite()) {
            return Err(Error::NonFinite {
                j,
                context: format!("regressand on regression path {l}"),
            });
        }
        let (design, y): (Vec<Vec<f64>>, Vec<f64>) = rows.into_iter().unzip();
        let (a, rank) = solve_least_squares(&design, &y)?;
        if rank < k {
            log::warn!("regression at j={j} is rank deficient ({rank} < {k}); using the minimum-norm solution");
        }
        coeffs[j - 1] = a;
    }
    Ok(InputApproximation {
        mode: ApproxMode::Lsmc,
        basis_size: k,
        horizon,
        coefficients: Coefficients::PerTime(coeffs),
        basis: basis.id(),
        seed: factory.seed(),
        gamma: None,
        converged: true,
    })
}
