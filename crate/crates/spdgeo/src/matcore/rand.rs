//! Seeded, bitwise-deterministic random generation.
//!
//! Randomness in this crate flows only through explicit 64-bit seeds; the
//! generator is a self-contained SplitMix64 so results are reproducible across
//! platforms and dependency versions.

use num_complex::Complex;

use crate::cmatrix::ComplexMatrix;
use crate::matcore::{HermitianMatrix, SpdMatrix};
use crate::real::Real;

/// SplitMix64 pseudo-random generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box-Muller (cosine branch; one value per pair of
    /// uniforms, which keeps the stream stateless beyond `state`).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = (1.0 - self.next_f64()).max(f64::MIN_POSITIVE); // (0, 1]
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Derives an independent stream for sub-tasks.
    pub fn fork(&mut self, tag: u64) -> SplitMix64 {
        SplitMix64::new(self.next_u64() ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

fn complex_gaussian_matrix<T: Real>(n: usize, rng: &mut SplitMix64) -> ComplexMatrix<T> {
    let mut g = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let re = rng.next_gaussian();
            let im = rng.next_gaussian();
            g[(i, j)] = Complex::new(T::of(re), T::of(im));
        }
    }
    g
}

/// Haar-like random unitary: modified Gram-Schmidt QR of a seeded complex
/// Gaussian matrix (the R diagonal comes out real positive, fixing the phase
/// gauge deterministically).
pub fn random_unitary<T: Real>(n: usize, rng: &mut SplitMix64) -> ComplexMatrix<T> {
    if n == 1 {
        return ComplexMatrix::identity(1);
    }
    let g = complex_gaussian_matrix::<T>(n, rng);
    let mut q = ComplexMatrix::zeros(n);
    for col in 0..n {
        let mut v: Vec<Complex<T>> = (0..n).map(|row| g[(row, col)]).collect();
        for prev in 0..col {
            // <q_prev, v> with the conjugate on the first slot.
            let mut dot = Complex::new(T::zero(), T::zero());
            for row in 0..n {
                dot += q[(row, prev)].conj() * v[row];
            }
            for row in 0..n {
                v[row] -= q[(row, prev)] * dot;
            }
        }
        let norm = v
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt();
        for row in 0..n {
            q[(row, col)] = v[row].scale(T::one() / norm);
        }
    }
    q
}

/// Deterministic random SPD matrix: eigenvalues log-uniform in
/// `[exp(-log_spread), exp(log_spread)]`, frame Haar-like from a seeded QR.
pub fn random_spd<T: Real>(n: usize, seed: u64, log_spread: T) -> SpdMatrix<T> {
    let mut rng = SplitMix64::new(seed);
    let spread = log_spread.as_f64();
    let eigs: Vec<T> = (0..n)
        .map(|_| T::of((spread * (2.0 * rng.next_f64() - 1.0)).exp()))
        .collect();
    let frame = random_unitary::<T>(n, &mut rng);
    SpdMatrix::from_eigenpairs(frame, eigs).expect("positive eigenvalues by construction")
}

/// Deterministic random Hermitian matrix with Gaussian entries of the given
/// scale.
pub fn random_hermitian<T: Real>(n: usize, seed: u64, scale: T) -> HermitianMatrix<T> {
    let mut rng = SplitMix64::new(seed);
    let g = complex_gaussian_matrix::<T>(n, &mut rng);
    HermitianMatrix::trusted(g.scale_re(scale))
}

/// A commuting pair: both factors share one seeded frame.
pub fn random_commuting_pair<T: Real>(
    n: usize,
    seed: u64,
    log_spread: T,
) -> (SpdMatrix<T>, SpdMatrix<T>) {
    let mut rng = SplitMix64::new(seed);
    let spread = log_spread.as_f64();
    let draw = |rng: &mut SplitMix64| -> Vec<T> {
        (0..n)
            .map(|_| T::of((spread * (2.0 * rng.next_f64() - 1.0)).exp()))
            .collect()
    };
    let e1 = draw(&mut rng);
    let e2 = draw(&mut rng);
    let frame = random_unitary::<T>(n, &mut rng);
    let a = SpdMatrix::from_eigenpairs(frame.clone(), e1).expect("positive");
    let b = SpdMatrix::from_eigenpairs(frame, e2).expect("positive");
    (a, b)
}
