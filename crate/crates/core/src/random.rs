//! Seeded samplers for random states and settings used by the bound suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hilbert::{permute_parties, ComplexMatrix, Permutation, QuantumState, SpinDirection};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure ket of dimension `dim`.
pub fn random_ket(rng: &mut impl Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_pure(rng: &mut impl Rng, n_parties: usize) -> QuantumState {
    QuantumState::pure_normalized(random_ket(rng, 1 << n_parties)).expect("nonzero")
}

/// Hilbert–Schmidt random mixed state `G G† / Tr(G G†)` with a square Ginibre `G`.
pub fn random_density(rng: &mut impl Rng, n_parties: usize) -> QuantumState {
    let dim = 1usize << n_parties;
    let g = ComplexMatrix::from_entries((0..dim * dim).map(|_| gaussian(rng)).collect()).expect("square");
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    let mut rho = gg.scale_re(1.0 / tr);
    // enforce exact Hermiticity against rounding in the product
    rho = (&rho + &rho.adjoint()).scale_re(0.5);
    QuantumState::density(rho).expect("Ginibre ensemble is a valid density matrix")
}

/// Tensor product of independent random single-qubit pure states.
pub fn random_product_pure(rng: &mut impl Rng, n_parties: usize) -> QuantumState {
    let parts: Vec<_> = (0..n_parties).map(|_| random_pure(rng, 1)).collect();
    QuantumState::product(&parts).expect("nonempty")
}

/// Convex mixture of `terms` random product states with random weights.
pub fn random_product_mixture(rng: &mut impl Rng, n_parties: usize, terms: usize) -> QuantumState {
    let states: Vec<_> = (0..terms).map(|_| random_product_pure(rng, n_parties)).collect();
    let weights = random_weights(rng, terms);
    crate::hilbert::mix(&weights, &states).expect("valid mixture")
}

pub fn random_weights(rng: &mut impl Rng, terms: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // absorb rounding so the weights sum to 1 within 1e-15
    let drift = 1.0 - w.iter().sum::<f64>();
    w[0] += drift;
    w
}

/// The three ways of splitting three parties into a single party and a pair,
/// as (single party, pair) with 1-based labels.
pub const BIPARTITIONS_OF_THREE: [(usize, [usize; 2]); 3] = [(1, [2, 3]), (2, [1, 3]), (3, [1, 2])];

/// `ψ_K ⊗ ψ_K'` for the bipartition `{single} | pair`, with a random single-qubit
/// ket and a random (generally entangled) two-qubit ket.
pub fn random_biseparable_pure(rng: &mut impl Rng, bipartition: (usize, [usize; 2])) -> QuantumState {
    let single = random_pure(rng, 1);
    let pair = random_pure(rng, 2);
    let joint = QuantumState::product(&[single, pair]).expect("nonempty");
    // joint has slot order (single, pair[0], pair[1]); move the slots to their parties
    let (s, [p, q]) = bipartition;
    let perm = Permutation::new(vec![s, p, q]).expect("bipartition labels form a permutation");
    permute_parties(&joint, &perm).expect("3 parties")
}

/// Biseparable mixed state `ρ_K ⊗ ρ_K'` with random mixed factors.
pub fn random_biseparable_density(rng: &mut impl Rng, bipartition: (usize, [usize; 2])) -> QuantumState {
    let single = random_density(rng, 1);
    let pair = random_density(rng, 2);
    let joint = QuantumState::product(&[single, pair]).expect("nonempty");
    let (s, [p, q]) = bipartition;
    let perm = Permutation::new(vec![s, p, q]).expect("bipartition labels form a permutation");
    permute_parties(&joint, &perm).expect("3 parties")
}

/// Mixture over all three bipartitions of random biseparable pure states.
pub fn random_biseparable_mixture(rng: &mut impl Rng, terms: usize) -> QuantumState {
    let states: Vec<_> = (0..terms).map(|k| random_biseparable_pure(rng, BIPARTITIONS_OF_THREE[k % 3])).collect();
    let weights = random_weights(rng, terms);
    crate::hilbert::mix(&weights, &states).expect("valid mixture")
}

/// Uniform direction on the sphere.
pub fn random_direction(rng: &mut impl Rng) -> SpinDirection {
    loop {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if norm > 1e-6 {
            if let Ok(d) = SpinDirection::new(v[0] / norm, v[1] / norm, v[2] / norm) {
                return d;
            }
        }
    }
}

pub fn random_angle(rng: &mut impl Rng) -> f64 {
    rng.random::<f64>() * std::f64::consts::TAU
}
