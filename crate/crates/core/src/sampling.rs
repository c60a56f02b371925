//! Seeded random draws shared by tests, certificates and scenarios.

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Uniform direction on the euclidean unit sphere of `ℝⁿ`.
pub fn unit_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| standard_normal(rng));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// Gaussian vector with occasional exact zeros and exact ties, so that
/// nonsmooth points of the shipped norms are hit with positive probability.
pub fn structured_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DVector<f64> {
    let mut v = DVector::from_fn(n, |_, _| standard_normal(rng));
    match rng.gen_range(0..4) {
        0 => {
            let i = rng.gen_range(0..n);
            v[i] = 0.0;
        }
        1 if n > 1 => {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            v[j] = if rng.gen() { v[i] } else { -v[i] };
        }
        2 if n > 1 => {
            let keep = rng.gen_range(0..n);
            for i in 0..n {
                if i != keep {
                    v[i] = 0.0;
                }
            }
        }
        _ => {}
    }
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    v
}
