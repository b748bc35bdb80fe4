//! Per-instance embedding oracle: a deterministic unit base vector per
//! instance id plus optional per-observation Gaussian perturbation. Stands in
//! for a learned visual encoder; the perturbation scale models how
//! view-consistent the encoder is.

use super::raycast::{mix_seed, standard_normal};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const BASE_SALT: u64 = 0xB353;
const NOISE_SALT: u64 = 0x0153;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingNoiseModel {
    pub seed: u64,
    pub dim: usize,
    /// Per-observation Gaussian perturbation scale; 0 gives perfectly
    /// view-consistent embeddings.
    pub sigma: f64,
    pub renormalize: bool,
}

impl EmbeddingNoiseModel {
    /// The deterministic unit base vector of an instance id.
    pub fn base(&self, id: u32) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, BASE_SALT, id as u64));
        let mut v: Vec<f64> = (0..self.dim).map(|_| standard_normal(&mut rng)).collect();
        normalize(&mut v);
        v
    }

    /// Observation embedding for `(id, t)`: base plus noise, re-normalized.
    /// Deterministic given (seed, id, t).
    pub fn make_embedding(&self, id: u32, t: usize) -> Vec<f64> {
        assert!(self.sigma.is_finite());
        let mut z = self.base(id);
        if self.sigma > 0.0 {
            let key = mix_seed(self.seed, NOISE_SALT, (id as u64) << 32 | t as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(key);
            for x in z.iter_mut() {
                *x += self.sigma * standard_normal(&mut rng);
            }
            if self.renormalize {
                normalize(&mut z);
            }
        }
        z
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        for x in v.iter_mut() {
            *x /= n;
        }
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}
