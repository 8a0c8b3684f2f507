use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::metaplectic::Gen;

/// Seeded draws of `τ`, `ζ`, lattice vectors and metaplectic words.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// `x ∈ [-1/2, 1/2]`, `y ∈ [0.8, 2.5]`.
    pub fn tau(&mut self) -> Complex64 {
        Complex64::new(self.rng.gen_range(-0.5..=0.5), self.rng.gen_range(0.8..=2.5))
    }

    /// Coordinates in `[-1, 1] + i[-0.3, 0.3]`.
    pub fn zeta(&mut self, n: usize) -> DVector<Complex64> {
        DVector::from_fn(n, |_, _| Complex64::new(self.rng.gen_range(-1.0..=1.0), self.rng.gen_range(-0.3..=0.3)))
    }

    pub fn real_vec(&mut self, n: usize, scale: f64) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.rng.gen_range(-scale..=scale))
    }

    /// Integer coordinates in `[-bound, bound]`, as floats.
    pub fn int_vec(&mut self, n: usize, bound: i64) -> DVector<f64> {
        DVector::from_fn(n, |_, _| self.rng.gen_range(-bound..=bound) as f64)
    }

    pub fn word(&mut self, max_len: usize) -> Vec<Gen> {
        let len = self.rng.gen_range(1..=max_len.max(1));
        (0..len)
            .map(|_| match self.rng.gen_range(0..4) {
                0 => Gen::T,
                1 => Gen::TInv,
                2 => Gen::S,
                _ => Gen::Z,
            })
            .collect()
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.gen_range(0.0..1.0)
    }
}

pub fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn cvec_json(z: &DVector<Complex64>) -> Value {
    Value::Array(z.iter().map(|&x| c_json(x)).collect())
}

pub fn vec_json(x: &DVector<f64>) -> Value {
    Value::Array(x.iter().map(|&a| json!(a)).collect())
}

pub fn word_string(w: &[Gen]) -> String {
    w.iter()
        .map(|g| match g {
            Gen::T => "T",
            Gen::TInv => "T^-1",
            Gen::S => "S",
            Gen::Z => "Z",
        })
        .collect::<Vec<_>>()
        .join(" ")
}
