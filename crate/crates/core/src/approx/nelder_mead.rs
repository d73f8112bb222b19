//! Derivative-free Nelder–Mead simplex search.

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    /// Stop once `max f − min f` over the simplex falls below this and the
    /// simplex diameter falls below `x_tol·max(1, |x_best|)`.
    pub spread_tol: f64,
    pub x_tol: f64,
    pub max_evaluations: usize,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl NelderMeadOptions {
    /// Standard coefficients with a budget of `500·K` evaluations.
    pub fn for_dim(k: usize) -> Self {
        Self {
            spread_tol: 1e-6,
            x_tol: 1e-6,
            max_evaluations: 500 * k.max(1),
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Best simplex value after each iteration.
    pub history: Vec<f64>,
}

/// Initial simplex edge along each coordinate of `x0`.
pub fn initial_step(x0: &[f64]) -> Vec<f64> {
    x0.iter().map(|v| (0.1 * v.abs()).max(0.1)).collect()
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .flat_map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

fn scale(x: &[f64]) -> f64 {
    x.iter().fold(1.0, |m, v| m.max(v.abs()))
}

/// Minimizes `f` from `x0`. Non-finite objective values are treated as `+∞`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evaluations = 0;
    let mut eval = |x: &[f64], count: &mut usize| {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let step = initial_step(x0);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0, &mut evaluations);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let v = eval(&x, &mut evaluations);
        simplex.push((x, v));
    }

    let mut history = Vec::new();
    let mut converged = false;
    loop {
        // Stable: on ties earlier vertices (the start point first) stay ahead.
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        history.push(simplex[0].1);
        let spread = simplex[n].1 - simplex[0].1;
        let flat = simplex[n].1 == simplex[0].1;
        if flat || (spread < opts.spread_tol && diameter(&simplex) < opts.x_tol * scale(&simplex[0].0)) {
            converged = true;
            break;
        }
        if evaluations >= opts.max_evaluations {
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let toward =
            |t: f64, worst: &[f64]| -> Vec<f64> { centroid.iter().zip(worst).map(|(c, w)| c + t * (w - c)).collect() };
        let worst = simplex[n].0.clone();

        let xr = toward(-opts.reflection, &worst);
        let fr = eval(&xr, &mut evaluations);
        if fr < simplex[0].1 {
            let xe = toward(-opts.reflection * opts.expansion, &worst);
            let fe = eval(&xe, &mut evaluations);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let outside = fr < simplex[n].1;
        let t = if outside {
            -opts.reflection * opts.contraction
        } else {
            opts.contraction
        };
        let xc = toward(t, &worst);
        let fc = eval(&xc, &mut evaluations);
        if (outside && fc <= fr) || (!outside && fc < simplex[n].1) {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + opts.shrink * (*xi - bi);
            }
            *v = eval(x, &mut evaluations);
        }
    }

    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult {
        x,
        value,
        evaluations,
        converged,
        history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let r = minimize(
            |x| (x[0] - 3.0).powi(2) + 2.0 * (x[1] + 1.0).powi(2),
            &[0.0, 0.0],
            &NelderMeadOptions::for_dim(2),
        );
        assert!(r.converged);
        assert!((r.x[0] - 3.0).abs() < 1e-2 && (r.x[1] + 1.0).abs() < 1e-2, "{:?}", r.x);
    }

    #[test]
    fn one_dimensional_absolute_value() {
        let r = minimize(|x| (x[0] - 16.5).abs(), &[0.0], &NelderMeadOptions::for_dim(1));
        assert!((r.x[0] - 16.5).abs() < 1e-5);
    }

    #[test]
    fn constant_objective_keeps_start() {
        let start = [1.25, -4.0, 7.0];
        let r = minimize(|_| 2.5, &start, &NelderMeadOptions::for_dim(3));
        assert_eq!(r.x, start);
        assert!(r.converged);
        assert_eq!(r.evaluations, 4);
    }

    #[test]
    fn history_is_non_increasing() {
        let r = minimize(
            |x| (x[0] * x[0] - x[1]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            &NelderMeadOptions::for_dim(2),
        );
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn budget_exhaustion_reports_not_converged() {
        let mut opts = NelderMeadOptions::for_dim(2);
        opts.max_evaluations = 5;
        let r = minimize(|x| x[0].powi(2) + x[1].powi(2), &[10.0, 10.0], &opts);
        assert!(!r.converged);
        assert!(r.value <= 200.0);
    }
}
