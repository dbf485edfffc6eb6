//! Helpers shared by the integration tests. Everything here is written
//! independently of the library internals it is used to check.
#![allow(dead_code)]

use eqe_core::qstate::C64;
use eqe_core::StateVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn gaussian_c<R: Rng>(rng: &mut R) -> C64 {
    c(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-random pure state on `n` qubits.
pub fn random_pure<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps: Vec<C64> = (0..1 << n).map(|_| gaussian_c(rng)).collect();
    StateVector::new(amps).unwrap().normalize().unwrap()
}

/// Purification of a Ginibre-random mixed state: the first `n` qubits of
/// the returned `2n`-qubit state carry `G G† / Tr(G G†)`.
pub fn random_mixed_purified<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    random_pure(2 * n, rng)
}

/// `T(φ) = (1 + e^{iφ})/2` and `R(φ) = (e^{iφ} − 1)/2`, written out as
/// the half-angle forms.
pub fn t_coeff(phi: f64) -> C64 {
    C64::from_polar((phi / 2.0).cos(), phi / 2.0)
}

pub fn r_coeff(phi: f64) -> C64 {
    c(0.0, 1.0) * C64::from_polar((phi / 2.0).sin(), phi / 2.0)
}

/// Evenly spaced points over `[0, 2π]`, endpoints included.
pub fn circle(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| std::f64::consts::TAU * k as f64 / (n - 1) as f64)
        .collect()
}
