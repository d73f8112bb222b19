//! Lognormal call expectations without discounting.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

pub fn norm_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

pub fn norm_pdf(x: f64) -> f64 {
    std_normal().pdf(x)
}

/// `E[(X_τ − K)_+ | X_0 = x]` and its derivative in `x` for a geometric
/// Brownian motion with drift `drift` and volatility `vol`.
pub fn call_expectation(x: f64, strike: f64, tau: f64, vol: f64, drift: f64) -> (f64, f64) {
    let growth = (drift * tau).exp();
    let sd = vol * tau.max(0.0).sqrt();
    if sd <= 0.0 || x <= 0.0 {
        let fwd = x * growth;
        return if fwd > strike {
            (fwd - strike, growth)
        } else {
            (0.0, 0.0)
        };
    }
    if strike <= 0.0 {
        return (x * growth - strike, growth);
    }
    let d1 = ((x / strike).ln() + drift * tau) / sd + 0.5 * sd;
    let d2 = d1 - sd;
    let n1 = norm_cdf(d1);
    (x * growth * n1 - strike * norm_cdf(d2), growth * n1)
}

/// Value and delta of `(X − K_1)_+ − 2(X − K_2)_+` at remaining time `tau`.
pub fn call_spread_expectation(x: f64, k1: f64, k2: f64, tau: f64, vol: f64, drift: f64) -> (f64, f64) {
    let (v1, d1) = call_expectation(x, k1, tau, vol, drift);
    let (v2, d2) = call_expectation(x, k2, tau, vol, drift);
    (v1 - 2.0 * v2, d1 - 2.0 * d2)
}

/// `E[p_C(W) e^{aW}]` for `W ~ N(0, var)`, with `p_C` the clamp to `[−C, C]`.
pub fn truncated_exp_moment(a: f64, var: f64, c: f64) -> f64 {
    let s = var.sqrt();
    let scale = (0.5 * a * a * var).exp();
    let lo = (-c - a * var) / s;
    let hi = (c - a * var) / s;
    let inside = a * var * (norm_cdf(hi) - norm_cdf(lo)) + s * (norm_pdf(lo) - norm_pdf(hi));
    let tails = c * (norm_cdf(-hi) - norm_cdf(lo));
    scale * (inside + tails)
}
