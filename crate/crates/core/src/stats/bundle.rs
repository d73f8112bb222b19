//! Materialized outer/middle/inner path trees.
//!
//! The nested estimators generate branch paths on the fly. A [`PathBundle`]
//! stores the same paths, drawn from the same labels, for inspection and
//! testing.

use rayon::prelude::*;

use crate::dp::MarkovModel;
use crate::error::{Error, Result};
use crate::improve::{for_each_branch, Branching, NestedEstimatorConfig, Sampling};
use crate::path::Path;
use crate::stats::rng::{Layer, SeededStreamFactory};

/// A continuation of a parent path after its branch time, with its weight in
/// the branch average (`1/Λ` when sampling, the path probability when
/// enumerating).
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub path: Path,
    pub weight: f64,
    /// Inner continuations off this path after step `i`, at index `i − j − 1`
    /// for a middle branch at time `j`.
    pub inner: Vec<Vec<Branch>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterPath {
    pub path: Path,
    /// Middle continuations after step `j`, at index `j` for `0 ≤ j < J`.
    pub middle: Vec<Vec<Branch>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathBundle {
    pub horizon: usize,
    pub outer: Vec<OuterPath>,
}

impl PathBundle {
    pub fn middle_count(&self) -> usize {
        self.outer.iter().flat_map(|o| &o.middle).map(Vec::len).sum()
    }

    pub fn inner_count(&self) -> usize {
        self.outer
            .iter()
            .flat_map(|o| &o.middle)
            .flatten()
            .flat_map(|b| &b.inner)
            .map(Vec::len)
            .sum()
    }
}

fn collect_branches(
    model: &dyn MarkovModel,
    factory: &SeededStreamFactory,
    base: &Path,
    i: usize,
    branching: Branching,
) -> Result<Vec<(Path, f64)>> {
    let mut scratch = base.clone();
    let mut out = Vec::new();
    for_each_branch(model, factory, base, i, branching, &mut scratch, |p, _, w| {
        out.push((p.clone(), w));
        Ok(())
    })?;
    Ok(out)
}

/// Draws `cfg.outer` outer paths with middle continuations at every branch
/// time and, when `cfg.inner > 0`, inner continuations off every middle path.
/// The labels match those used by the nested estimators.
pub fn generate_bundle(
    model: &dyn MarkovModel,
    horizon: usize,
    cfg: &NestedEstimatorConfig,
    factory: &SeededStreamFactory,
) -> Result<PathBundle> {
    if cfg.outer == 0 || cfg.middle == 0 {
        return Err(Error::Config("path counts must be at least 1".into()));
    }
    let sampling = |n| {
        if cfg.enumerate {
            Sampling::Enumerate
        } else {
            Sampling::MonteCarlo(n)
        }
    };
    let middle = Branching {
        layer: Layer::Middle,
        sampling: sampling(cfg.middle),
    };
    let inner = (cfg.inner > 0).then(|| Branching {
        layer: Layer::Inner,
        sampling: sampling(cfg.inner),
    });
    let outer = (0..cfg.outer)
        .into_par_iter()
        .map(|l| {
            let path = Path::simulate(model, horizon, factory.top_label(Layer::Outer, l as u64), factory);
            let middle = (0..horizon)
                .map(|j| {
                    collect_branches(model, factory, &path, j, middle)?
                        .into_iter()
                        .map(|(p, weight)| {
                            let inner = match inner {
                                Some(b) => ((j + 1)..horizon)
                                    .map(|i| {
                                        Ok(collect_branches(model, factory, &p, i, b)?
                                            .into_iter()
                                            .map(|(path, weight)| Branch {
                                                path,
                                                weight,
                                                inner: Vec::new(),
                                            })
                                            .collect())
                                    })
                                    .collect::<Result<_>>()?,
                                None => Vec::new(),
                            };
                            Ok(Branch { path: p, weight, inner })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(OuterPath { path, middle })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PathBundle { horizon, outer })
}
