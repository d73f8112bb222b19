//! Counter-based random streams.
//!
//! Every stream is keyed by `(base seed, label)` where the label is a 64-bit
//! hash of a tuple such as `(layer, λ_out, j, λ_mid)`. Labels are derived
//! hierarchically, so a branch path's stream depends only on its position in
//! the simulation tree and never on the order in which work units run.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::erf::erfc_inv;

/// Simulation layer tags mixed into path labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Layer {
    Outer = 1,
    Middle = 2,
    Inner = 3,
    /// Independent middle layer feeding the lower-bound control variate.
    MiddleMartingale = 4,
    InnerMartingale = 5,
    Regression = 6,
    Minimization = 7,
    Test = 8,
    Diagnostics = 9,
    /// Branches below the inner layer (k > 2 in exact enumeration studies).
    Deep = 10,
}

impl Layer {
    pub fn code(self) -> u64 {
        self as u64
    }
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `parts` into `parent`, producing the label of a child stream.
pub fn derive_label(parent: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(splitmix(parent ^ 0x5851_F42D_4C95_7F2D), |acc, &p| {
        splitmix(acc ^ splitmix(p.wrapping_add(0x1405_7B7E_F767_814F)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeededStreamFactory {
    seed: u64,
}

impl SeededStreamFactory {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Label of the root of the simulation tree.
    pub fn root(&self) -> u64 {
        derive_label(self.seed, &[0])
    }

    /// Label for a top-level path in the given layer (outer, regression, ...).
    pub fn top_label(&self, layer: Layer, index: u64) -> u64 {
        derive_label(self.root(), &[layer.code(), index])
    }

    pub fn stream(&self, label: u64) -> RandomStream {
        let mut key = [0u8; 32];
        let mut s = splitmix(self.seed) ^ label;
        for chunk in key.chunks_exact_mut(8) {
            s = splitmix(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        RandomStream {
            rng: ChaCha8Rng::from_seed(key),
        }
    }
}

pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    /// Uniform on the open interval (0, 1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw by inversion.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        inverse_normal_cdf(self.uniform())
    }

    /// Index drawn from a discrete law given by `probs` (assumed to sum to 1).
    pub fn categorical(&mut self, probs: impl IntoIterator<Item = f64>) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        let mut last = 0;
        for (i, p) in probs.into_iter().enumerate() {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}

#[inline]
pub fn inverse_normal_cdf(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_labels_give_identical_streams() {
        let f = SeededStreamFactory::new(42);
        let label = derive_label(f.root(), &[Layer::Middle.code(), 3, 7]);
        let a: Vec<f64> = {
            let mut s = f.stream(label);
            (0..16).map(|_| s.standard_normal()).collect()
        };
        let b: Vec<f64> = {
            let mut s = f.stream(label);
            (0..16).map(|_| s.standard_normal()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_labels_are_uncorrelated() {
        let f = SeededStreamFactory::new(7);
        let n = 100_000;
        let labels = [
            f.top_label(Layer::Outer, 0),
            f.top_label(Layer::Outer, 1),
            derive_label(f.top_label(Layer::Outer, 0), &[Layer::Middle.code(), 0, 0]),
            f.top_label(Layer::Regression, 0),
        ];
        let draws: Vec<Vec<f64>> = labels
            .iter()
            .map(|&l| {
                let mut s = f.stream(l);
                (0..n).map(|_| s.standard_normal()).collect()
            })
            .collect();
        for a in 0..draws.len() {
            for b in (a + 1)..draws.len() {
                let rho = correlation(&draws[a], &draws[b]);
                assert!(rho.abs() < 4.0 / (n as f64).sqrt(), "rho {rho} for ({a},{b})");
            }
        }
    }

    #[test]
    fn normal_draws_have_unit_moments() {
        let f = SeededStreamFactory::new(1);
        let mut s = f.stream(f.root());
        let n = 200_000;
        let xs: Vec<f64> = (0..n).map(|_| s.standard_normal()).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn inverse_cdf_matches_known_quantiles() {
        assert!((inverse_normal_cdf(0.5)).abs() < 1e-15);
        assert!((inverse_normal_cdf(0.975) - 1.959_963_984_540_054).abs() < 1e-12);
        assert!((inverse_normal_cdf(0.025) + 1.959_963_984_540_054).abs() < 1e-12);
    }

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let mut sab = 0.0;
        let mut saa = 0.0;
        let mut sbb = 0.0;
        for (x, y) in a.iter().zip(b) {
            sab += (x - ma) * (y - mb);
            saa += (x - ma).powi(2);
            sbb += (y - mb).powi(2);
        }
        sab / (saa * sbb).sqrt()
    }
}
