use crate::approx::BasisSet;
use crate::dp::MarkovModel;
use crate::error::Result;
use crate::exact::{solve_exact, FiniteSupportModel};

/// Indicators of the reachable states at each level of a finite-support
/// model. Any function of `X_j` is a linear combination of them.
#[derive(Debug, Clone)]
pub struct IndicatorBasis {
    model: FiniteSupportModel,
    d: usize,
    /// Distinct reachable states at level `j`.
    states: Vec<Vec<Vec<f64>>>,
    size: usize,
}

impl IndicatorBasis {
    pub fn new(model: &FiniteSupportModel, horizon: usize, weight_dim: usize) -> Result<Self> {
        struct Probe(usize);
        impl crate::dp::DynamicProgram for Probe {
            fn horizon(&self) -> usize {
                self.0
            }
            fn weight_dim(&self) -> usize {
                1
            }
            fn generator(&self, _: usize, _: &[f64], z: &[f64]) -> f64 {
                z[0]
            }
            fn conjugate(&self, _: usize, _: &[f64], _: &[f64]) -> f64 {
                0.0
            }
            fn maximizer(&self, _: usize, _: &[f64], _: &[f64], out: &mut [f64]) {
                out[0] = 1.0;
            }
            fn terminal(&self, _: &[f64]) -> f64 {
                0.0
            }
        }
        let tree = solve_exact(&Probe(horizon), model)?;
        let states: Vec<Vec<Vec<f64>>> = tree
            .levels
            .iter()
            .map(|level| {
                let mut seen: Vec<Vec<f64>> = Vec::new();
                for n in level {
                    if !seen.contains(&n.state) {
                        seen.push(n.state.clone());
                    }
                }
                seen
            })
            .collect();
        let size = states.iter().map(|s| s.len()).max().unwrap_or(1);
        Ok(Self {
            model: model.clone(),
            d: weight_dim,
            states,
            size,
        })
    }

    fn index(&self, j: usize, x: &[f64]) -> Option<usize> {
        self.states[j].iter().position(|s| s.as_slice() == x)
    }
}

impl BasisSet for IndicatorBasis {
    fn size(&self) -> usize {
        self.size
    }

    fn weight_dim(&self) -> usize {
        self.d
    }

    fn id(&self) -> String {
        format!("indicator-{}", self.size)
    }

    fn eval(&self, j: usize, _x_prev: &[f64], _b: &[f64], x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        if let Some(k) = self.index(j, x) {
            out[k] = 1.0;
        }
    }

    fn one_step(&self, j: usize, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        let mut next = vec![0.0; x.len()];
        for a in self.model.atoms(j + 1).unwrap_or_default() {
            self.model.step(j + 1, x, &a.innovation, &mut next);
            if let Some(k) = self.index(j + 1, &next) {
                for d in 0..self.d {
                    out[d * self.size + k] += a.prob * a.innovation[d];
                }
            }
        }
    }
}
