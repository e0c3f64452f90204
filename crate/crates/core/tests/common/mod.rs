#![allow(dead_code)]

use mzqfi::fock::ModeState;
use mzqfi::linalg::{CMatrix, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn gaussian_c(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Random complex number with modulus at most `max`.
pub fn random_amplitude(rng: &mut ChaCha8Rng, max: f64) -> C64 {
    C64::from_polar(
        rng.random_range(0.2..max),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}

/// Haar-like random pure state supported on the lowest `support` levels.
pub fn random_pure(rng: &mut ChaCha8Rng, support: usize, dim: usize) -> ModeState {
    let mut amps: Vec<C64> = (0..support).map(|_| gaussian_c(rng)).collect();
    amps.resize(dim, C64::new(0.0, 0.0));
    ModeState::from_amplitudes(amps).unwrap()
}

/// Random density matrix of the given rank, supported on the lowest
/// `support` levels.
pub fn random_mixed(rng: &mut ChaCha8Rng, rank: usize, support: usize, dim: usize) -> CMatrix {
    let weights: Vec<f64> = (0..rank).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(dim, dim);
    for w in weights {
        rho += random_pure(rng, support, dim).density() * C64::new(w / total, 0.0);
    }
    rho
}

pub fn rel(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs()
}
