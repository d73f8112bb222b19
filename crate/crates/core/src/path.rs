use crate::dp::MarkovModel;
use crate::stats::rng::SeededStreamFactory;

pub const NO_ATOM: usize = usize::MAX;

/// One trajectory: states `X_0..X_J`, innovations `B_1..B_J`, and the label
/// that seeds any nested simulation branching off it.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    label: u64,
    horizon: usize,
    state_dim: usize,
    innovation_dim: usize,
    states: Vec<f64>,
    innovations: Vec<f64>,
    atoms: Vec<usize>,
}

impl Path {
    /// A path sitting at the initial state with zero innovations.
    pub fn new(model: &dyn MarkovModel, horizon: usize) -> Self {
        let n = model.state_dim();
        let nb = model.innovation_dim();
        let mut states = vec![0.0; (horizon + 1) * n];
        states[..n].copy_from_slice(model.initial_state());
        Self {
            label: 0,
            horizon,
            state_dim: n,
            innovation_dim: nb,
            states,
            innovations: vec![0.0; horizon * nb],
            atoms: vec![NO_ATOM; horizon],
        }
    }

    pub fn simulate(model: &dyn MarkovModel, horizon: usize, label: u64, factory: &SeededStreamFactory) -> Self {
        let mut p = Self::new(model, horizon);
        p.resample_from(model, 0, label, factory);
        p
    }

    /// Builds a path from explicit innovations `B_1..B_J`.
    pub fn from_innovations(model: &dyn MarkovModel, innovations: &[Vec<f64>]) -> Self {
        let mut p = Self::new(model, innovations.len());
        for (i, b) in innovations.iter().enumerate() {
            let j = i + 1;
            let atom = model
                .atoms(j)
                .and_then(|atoms| atoms.iter().position(|a| a.innovation == *b))
                .unwrap_or(NO_ATOM);
            p.set_innovation(model, j, b, atom);
        }
        p
    }

    pub fn label(&self) -> u64 {
        self.label
    }

    pub fn set_label(&mut self, label: u64) {
        self.label = label;
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn state(&self, j: usize) -> &[f64] {
        &self.states[j * self.state_dim..(j + 1) * self.state_dim]
    }

    /// `B_j` for `1 ≤ j ≤ J`.
    #[inline]
    pub fn innovation(&self, j: usize) -> &[f64] {
        let i = j - 1;
        &self.innovations[i * self.innovation_dim..(i + 1) * self.innovation_dim]
    }

    /// `β_j`, the first `d` coordinates of `B_j`.
    #[inline]
    pub fn weights(&self, j: usize, d: usize) -> &[f64] {
        &self.innovation(j)[..d]
    }

    /// Atom index of `B_j` for finitely supported models.
    pub fn atom(&self, j: usize) -> Option<usize> {
        let a = self.atoms[j - 1];
        (a != NO_ATOM).then_some(a)
    }

    /// Sets `B_j` and recomputes `X_j`; later states are left untouched.
    pub fn set_innovation(&mut self, model: &dyn MarkovModel, j: usize, b: &[f64], atom: usize) {
        let i = j - 1;
        let nb = self.innovation_dim;
        self.innovations[i * nb..(i + 1) * nb].copy_from_slice(b);
        self.atoms[i] = atom;
        self.advance(model, j);
    }

    #[inline]
    fn advance(&mut self, model: &dyn MarkovModel, j: usize) {
        let n = self.state_dim;
        let nb = self.innovation_dim;
        let (head, tail) = self.states.split_at_mut(j * n);
        model.step(
            j,
            &head[(j - 1) * n..],
            &self.innovations[(j - 1) * nb..j * nb],
            &mut tail[..n],
        );
    }

    /// Keeps `X_0..X_from` and `B_1..B_from`, resamples the rest from the
    /// stream keyed by `label`.
    pub fn resample_from(&mut self, model: &dyn MarkovModel, from: usize, label: u64, factory: &SeededStreamFactory) {
        self.label = label;
        let mut stream = factory.stream(label);
        let nb = self.innovation_dim;
        for j in (from + 1)..=self.horizon {
            let i = j - 1;
            let atom = model.sample_innovation(j, &mut stream, &mut self.innovations[i * nb..(i + 1) * nb]);
            self.atoms[i] = atom.unwrap_or(NO_ATOM);
            self.advance(model, j);
        }
    }

    /// Copies the prefix `X_0..X_upto`, `B_1..B_upto` from `other`.
    pub fn copy_prefix(&mut self, other: &Path, upto: usize) {
        let n = self.state_dim;
        let nb = self.innovation_dim;
        self.states[..(upto + 1) * n].copy_from_slice(&other.states[..(upto + 1) * n]);
        self.innovations[..upto * nb].copy_from_slice(&other.innovations[..upto * nb]);
        self.atoms[..upto].copy_from_slice(&other.atoms[..upto]);
    }
}
