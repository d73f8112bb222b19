//! Exact solution of dynamic programs with finitely supported innovations.
//!
//! Conditional expectations become finite sums over the support, so the value
//! process, the conditional expectations `z_j = E_j[β_{j+1} Y_{j+1}]` and the
//! Doob martingale of `βY` are computed without sampling error. These serve as
//! oracles for the Monte Carlo machinery.

use std::sync::Arc;

use crate::dp::{Atom, DynamicProgram, MarkovModel};
use crate::error::{Error, Result};
use crate::path::Path;
use crate::pathwise::{ControlProvider, Controls, Increments, MartingaleProvider, PathFunctional};
use crate::stats::rng::RandomStream;

/// Upper limit on the number of leaves of an exact tree.
pub const MAX_TREE_LEAVES: u128 = 1_000_000;

type Transition = dyn Fn(usize, &[f64], &[f64], &mut [f64]) + Send + Sync;

/// A Markov model whose innovation takes finitely many values at each step.
#[derive(Clone)]
pub struct FiniteSupportModel {
    x0: Vec<f64>,
    innovation_dim: usize,
    /// Support of `B_j` at index `j − 1`.
    atoms: Vec<Vec<Atom>>,
    transition: Arc<Transition>,
}

impl std::fmt::Debug for FiniteSupportModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteSupportModel")
            .field("x0", &self.x0)
            .field("atoms", &self.atoms)
            .finish()
    }
}

impl FiniteSupportModel {
    pub fn new(
        x0: Vec<f64>,
        atoms: Vec<Vec<Atom>>,
        transition: impl Fn(usize, &[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Config("finite support model needs at least one step".into()));
        }
        let innovation_dim = atoms[0]
            .first()
            .map(|a| a.innovation.len())
            .ok_or_else(|| Error::Config("empty support at step 1".into()))?;
        for (i, step) in atoms.iter().enumerate() {
            if step.is_empty() {
                return Err(Error::Config(format!("empty support at step {}", i + 1)));
            }
            if step
                .iter()
                .any(|a| a.prob.is_nan() || a.prob <= 0.0 || a.innovation.len() != innovation_dim)
            {
                return Err(Error::Config(format!(
                    "support at step {} has a non-positive probability or wrong dimension",
                    i + 1
                )));
            }
            let total: f64 = step.iter().map(|a| a.prob).sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "probabilities at step {} sum to {total}, not 1",
                    i + 1
                )));
            }
        }
        Ok(Self {
            x0,
            innovation_dim,
            atoms,
            transition: Arc::new(transition),
        })
    }

    /// Same support at each of `horizon` steps.
    pub fn stationary(
        x0: Vec<f64>,
        support: Vec<Atom>,
        horizon: usize,
        transition: impl Fn(usize, &[f64], &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(x0, vec![support; horizon], transition)
    }

    pub fn steps(&self) -> usize {
        self.atoms.len()
    }

    pub fn support(&self, j: usize) -> &[Atom] {
        &self.atoms[j - 1]
    }

    /// Reorders the support at every step; used to check permutation invariance.
    pub fn permute_support(&mut self, perm_for_step: impl Fn(usize, usize) -> Vec<usize>) {
        for (i, step) in self.atoms.iter_mut().enumerate() {
            let perm = perm_for_step(i + 1, step.len());
            *step = perm.iter().map(|&k| step[k].clone()).collect();
        }
    }
}

impl MarkovModel for FiniteSupportModel {
    fn state_dim(&self) -> usize {
        self.x0.len()
    }

    fn innovation_dim(&self) -> usize {
        self.innovation_dim
    }

    fn initial_state(&self) -> &[f64] {
        &self.x0
    }

    fn step(&self, j: usize, x_prev: &[f64], b: &[f64], out: &mut [f64]) {
        (self.transition)(j, x_prev, b, out)
    }

    fn sample_innovation(&self, j: usize, stream: &mut RandomStream, out: &mut [f64]) -> Option<usize> {
        let support = self.support(j);
        let k = stream.categorical(support.iter().map(|a| a.prob));
        out.copy_from_slice(&support[k].innovation);
        Some(k)
    }

    fn atoms(&self, j: usize) -> Option<&[Atom]> {
        self.atoms.get(j - 1).map(|v| v.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    pub state: Vec<f64>,
    pub value: f64,
    /// `E_j[β_{j+1} Y_{j+1}]`; empty at the terminal level.
    pub z: Vec<f64>,
    /// Probability of reaching the node.
    pub prob: f64,
}

/// Non-recombining tree of exact values. The node reached by atom indices
/// `(a_1, …, a_j)` sits at position `((a_1·n_2 + a_2)·n_3 + …)` on level `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTree {
    pub levels: Vec<Vec<TreeNode>>,
    /// Support size at step `j` (index `j − 1`).
    pub branching: Vec<usize>,
}

impl SolutionTree {
    pub fn horizon(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn root_value(&self) -> f64 {
        self.levels[0][0].value
    }

    /// Node index at level `j` for the atoms recorded on `path`.
    pub fn index_of(&self, path: &Path, j: usize) -> Result<usize> {
        let mut idx = 0usize;
        for i in 1..=j {
            let a = path
                .atom(i)
                .filter(|&a| a < self.branching[i - 1])
                .ok_or_else(|| Error::Structure(format!("path prefix through step {j} is not in the tree")))?;
            idx = idx * self.branching[i - 1] + a;
        }
        Ok(idx)
    }

    pub fn node(&self, path: &Path, j: usize) -> Result<&TreeNode> {
        let idx = self.index_of(path, j)?;
        Ok(&self.levels[j][idx])
    }

    /// Shifts every value by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        let mut t = self.clone();
        for level in &mut t.levels {
            for n in level {
                n.value += delta;
            }
        }
        t
    }
}

fn leaf_count(model: &dyn MarkovModel, horizon: usize) -> Result<Vec<usize>> {
    let mut branching = Vec::with_capacity(horizon);
    let mut size: u128 = 1;
    for j in 1..=horizon {
        let n = model
            .atoms(j)
            .ok_or_else(|| Error::Config(format!("innovation at step {j} is not finitely supported")))?
            .len();
        size = size.saturating_mul(n as u128);
        if size > MAX_TREE_LEAVES {
            return Err(Error::SizeLimit {
                size,
                limit: MAX_TREE_LEAVES,
            });
        }
        branching.push(n);
    }
    Ok(branching)
}

/// Solves the dynamic program exactly by backward induction over the tree.
pub fn solve_exact(dp: &dyn DynamicProgram, model: &dyn MarkovModel) -> Result<SolutionTree> {
    let horizon = dp.horizon();
    let d = dp.weight_dim();
    let n = model.state_dim();
    let branching = leaf_count(model, horizon)?;

    let mut levels: Vec<Vec<TreeNode>> = Vec::with_capacity(horizon + 1);
    levels.push(vec![TreeNode {
        state: model.initial_state().to_vec(),
        value: 0.0,
        z: Vec::new(),
        prob: 1.0,
    }]);
    for j in 1..=horizon {
        let atoms = model.atoms(j).expect("checked above");
        let mut next = Vec::with_capacity(levels[j - 1].len() * atoms.len());
        for parent in &levels[j - 1] {
            for a in atoms {
                let mut state = vec![0.0; n];
                model.step(j, &parent.state, &a.innovation, &mut state);
                next.push(TreeNode {
                    state,
                    value: 0.0,
                    z: Vec::new(),
                    prob: parent.prob * a.prob,
                });
            }
        }
        levels.push(next);
    }

    for (idx, node) in levels[horizon].iter_mut().enumerate() {
        node.value = dp.terminal(&node.state);
        if !node.value.is_finite() {
            return Err(Error::NonFinite {
                j: horizon,
                context: format!("terminal payoff at node {idx}"),
            });
        }
    }
    for j in (0..horizon).rev() {
        let atoms = model.atoms(j + 1).expect("checked above");
        let width = atoms.len();
        let (head, tail) = levels.split_at_mut(j + 1);
        let children = &tail[0];
        for (idx, node) in head[j].iter_mut().enumerate() {
            let mut z = vec![0.0; d];
            for (k, a) in atoms.iter().enumerate() {
                let child = &children[idx * width + k];
                for (zi, bi) in z.iter_mut().zip(&a.innovation[..d]) {
                    *zi += a.prob * bi * child.value;
                }
            }
            let v = dp.generator(j, &node.state, &z);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    j,
                    context: format!("generator at node {idx}"),
                });
            }
            node.value = v;
            node.z = z;
        }
    }
    Ok(SolutionTree { levels, branching })
}

/// `true` iff `up ≥ low − 1e−10` at every node.
pub fn check_comparison(low: &SolutionTree, up: &SolutionTree) -> Result<bool> {
    if low.branching != up.branching || low.levels.len() != up.levels.len() {
        return Err(Error::Structure("trees have different shapes".into()));
    }
    for (l, u) in low.levels.iter().zip(&up.levels) {
        if l.len() != u.len() {
            return Err(Error::Structure("trees have different level sizes".into()));
        }
        if l.iter().zip(u).any(|(a, b)| b.value < a.value - 1e-10) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All paths of a finitely supported model with their probabilities.
pub fn enumerate_paths(model: &dyn MarkovModel, horizon: usize) -> Result<Vec<(Path, f64)>> {
    leaf_count(model, horizon)?;
    let mut out = Vec::new();
    let mut path = Path::new(model, horizon);
    fn rec(model: &dyn MarkovModel, j: usize, horizon: usize, prob: f64, path: &mut Path, out: &mut Vec<(Path, f64)>) {
        if j > horizon {
            out.push((path.clone(), prob));
            return;
        }
        let atoms = model.atoms(j).expect("finite support");
        for (k, a) in atoms.iter().enumerate() {
            path.set_innovation(model, j, &a.innovation, k);
            rec(model, j + 1, horizon, prob * a.prob, path, out);
        }
    }
    rec(model, 1, horizon, 1.0, &mut path, &mut out);
    for (i, (p, _)) in out.iter_mut().enumerate() {
        p.set_label(i as u64);
    }
    Ok(out)
}

/// Doob martingale of `βY` read off an exact tree:
/// `ΔM_{j+1} = β_{j+1} Y_{j+1} − E_j[β_{j+1} Y_{j+1}]`.
pub struct ExactDoob<'a> {
    tree: &'a SolutionTree,
    d: usize,
}

pub fn exact_doob<'a>(dp: &dyn DynamicProgram, tree: &'a SolutionTree) -> ExactDoob<'a> {
    ExactDoob {
        tree,
        d: dp.weight_dim(),
    }
}

impl MartingaleProvider for ExactDoob<'_> {
    fn fill(&self, path: &Path, from: usize, out: &mut Increments) -> Result<()> {
        let d = self.d;
        for j in from..path.horizon() {
            let node = self.tree.node(path, j)?;
            let next = self.tree.node(path, j + 1)?;
            let beta = path.weights(j + 1, d);
            for (k, o) in out.get_mut(j).iter_mut().enumerate() {
                *o = beta[k] * next.value - node.z[k];
            }
        }
        Ok(())
    }

    fn dim(&self) -> usize {
        self.d
    }
}

/// The optimal control `r*_j = maximizer(j, X_j, z_j)` read off an exact tree.
pub struct ExactControl<'a> {
    pub dp: &'a dyn DynamicProgram,
    pub tree: &'a SolutionTree,
}

impl ControlProvider for ExactControl<'_> {
    fn fill(&self, path: &Path, from: usize, out: &mut Controls) -> Result<()> {
        for j in from..path.horizon() {
            let node = self.tree.node(path, j)?;
            self.dp.maximizer(j, path.state(j), &node.z, out.control_mut(j));
            let c = self.dp.conjugate(j, path.state(j), out.control(j));
            out.set_conjugate(j, c);
        }
        Ok(())
    }
}

/// The exact value process `Y_j` as a path functional.
pub struct ExactValue<'a> {
    pub tree: &'a SolutionTree,
}

impl PathFunctional for ExactValue<'_> {
    fn evaluate(&self, path: &Path, from: usize, theta: &mut [f64]) -> Result<()> {
        for (j, t) in theta.iter_mut().enumerate().take(path.horizon() + 1).skip(from) {
            *t = self.tree.node(path, j)?.value;
        }
        Ok(())
    }
}

/// Exact `E_j[φ]` over all continuations of `path` after step `j`.
pub fn conditional_expectation(
    model: &dyn MarkovModel,
    path: &Path,
    j: usize,
    mut f: impl FnMut(&Path) -> Result<f64>,
) -> Result<f64> {
    let horizon = path.horizon();
    let mut scratch = path.clone();
    fn rec(
        model: &dyn MarkovModel,
        i: usize,
        horizon: usize,
        prob: f64,
        scratch: &mut Path,
        f: &mut dyn FnMut(&Path) -> Result<f64>,
    ) -> Result<f64> {
        if i > horizon {
            return Ok(prob * f(scratch)?);
        }
        let atoms = model
            .atoms(i)
            .ok_or_else(|| Error::Config(format!("innovation at step {i} is not finitely supported")))?;
        let mut acc = 0.0;
        for (k, a) in atoms.iter().enumerate() {
            scratch.set_innovation(model, i, &a.innovation, k);
            acc += rec(model, i + 1, horizon, prob * a.prob, scratch, f)?;
        }
        Ok(acc)
    }
    rec(model, j + 1, horizon, 1.0, &mut scratch, &mut f)
}

/// `E_0[φ]` over every path.
pub fn expectation(model: &dyn MarkovModel, horizon: usize, f: impl FnMut(&Path) -> Result<f64>) -> Result<f64> {
    let root = Path::new(model, horizon);
    conditional_expectation(model, &root, 0, f)
}
