//! Dense Hermitian linear algebra: spectral decompositions, functional
//! calculus, divided differences, inner products, unitarily invariant norms,
//! pinching and seeded random generation.

mod eig;
pub mod io;
mod rand;
mod scalarfn;

pub use rand::{random_commuting_pair, random_hermitian, random_spd, random_unitary, SplitMix64};
pub use scalarfn::{
    apply_scalar_function, divided_difference, frechet_derivative, herm_exp, CustomScalarFn,
    ScalarFn,
};
pub(crate) use scalarfn::frechet_on_spectrum;

use num_complex::Complex;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::real::Real;

/// Absolute tolerance for the Hermitian symmetry check at construction.
pub const HERMITIAN_ATOL: f64 = 1e-12;

/// Default relative tolerance for merging numerically equal eigenvalues.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// Relative gap below which divided differences switch to the derivative
/// branch; naive differencing is catastrophically cancellative below this.
pub const DD_SWITCH: f64 = 1e-6;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// An n-by-n complex Hermitian matrix. The storage is exactly Hermitian:
/// construction symmetrizes after validating the defect.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<T: Real = f64> {
    mat: ComplexMatrix<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Validates the Hermitian symmetry of `mat` (absolute tolerance 1e-12)
    /// and stores the exactly symmetrized part.
    pub fn new(mat: ComplexMatrix<T>) -> Result<Self> {
        if mat.dim() == 0 {
            return Err(Error::Precondition("dimension must be >= 1".into()));
        }
        let tol = T::of(HERMITIAN_ATOL).max(T::epsilon() * T::of(8.0));
        let defect = mat.hermitian_defect();
        if defect > tol {
            return Err(Error::NotHermitian {
                defect: defect.as_f64(),
                tol: tol.as_f64(),
            });
        }
        Ok(Self::trusted(mat))
    }

    /// Symmetrizes without the defect check; for internal products that are
    /// Hermitian by construction up to roundoff.
    pub(crate) fn trusted(mat: ComplexMatrix<T>) -> Self {
        Self {
            mat: mat.hermitian_part(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            mat: ComplexMatrix::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(n),
        }
    }

    pub fn from_diag(values: &[T]) -> Self {
        Self {
            mat: ComplexMatrix::diag(values),
        }
    }

    /// Builds from a row-major slice of real entries (must be symmetric).
    pub fn from_real(n: usize, rows: &[T]) -> Result<Self> {
        if rows.len() != n * n {
            return Err(Error::DimensionMismatch(rows.len(), n * n));
        }
        Self::new(ComplexMatrix::from_fn(n, |i, j| {
            Complex::new(rows[i * n + j], T::zero())
        }))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.mat[(i, j)]
    }

    #[inline]
    pub fn mat(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.add(&other.mat),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.sub(&other.mat),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            mat: self.mat.scale_re(s),
        }
    }

    /// Hilbert-Schmidt norm.
    pub fn hs_norm(&self) -> T {
        self.mat.frobenius()
    }

    /// `i[A, B] = i(AB - BA)`, Hermitian for Hermitian inputs.
    pub fn commutator_i(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        let ab = self.mat.mul(&other.mat);
        let ba = other.mat.mul(&self.mat);
        let i = Complex::new(T::zero(), T::one());
        Ok(Self::trusted(ab.sub(&ba).scale(i)))
    }
}

/// A positive definite matrix together with its cached spectral decomposition
/// (clustered at [`DEFAULT_CLUSTER_TOL`]).
#[derive(Clone, Debug)]
pub struct SpdMatrix<T: Real = f64> {
    herm: HermitianMatrix<T>,
    spectrum: Spectrum<T>,
}

impl<T: Real> SpdMatrix<T> {
    /// Decomposes and certifies positivity of every eigenvalue.
    pub fn new(herm: HermitianMatrix<T>) -> Result<Self> {
        let spectrum = spectral_decompose(&herm, T::of(DEFAULT_CLUSTER_TOL))?;
        let min = spectrum.eigenvalues[0];
        if !(min > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min.as_f64(),
            });
        }
        Ok(Self { herm, spectrum })
    }

    pub fn identity(n: usize) -> Self {
        Self::new(HermitianMatrix::identity(n)).expect("identity is SPD")
    }

    pub fn from_diag(values: &[T]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diag(values))
    }

    /// Builds from explicit eigenpairs (frame columns matching `eigenvalues`).
    /// Positivity is still certified.
    pub(crate) fn from_eigenpairs(frame: ComplexMatrix<T>, eigenvalues: Vec<T>) -> Result<Self> {
        let n = eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            eigenvalues[i]
                .partial_cmp(&eigenvalues[j])
                .expect("finite eigenvalues")
        });
        let eigs: Vec<T> = order.iter().map(|&k| eigenvalues[k]).collect();
        if !(eigs[0] > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: eigs[0].as_f64(),
            });
        }
        let mut u = ComplexMatrix::zeros(n);
        for (new_col, &old_col) in order.iter().enumerate() {
            for row in 0..n {
                u[(row, new_col)] = frame[(row, old_col)];
            }
        }
        let clusters = cluster_indices(&eigs, T::of(DEFAULT_CLUSTER_TOL));
        let spectrum = Spectrum {
            eigenvalues: eigs,
            frame: u,
            clusters,
        };
        let herm = spectrum.reconstruct();
        Ok(Self { herm, spectrum })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    #[inline]
    pub fn herm(&self) -> &HermitianMatrix<T> {
        &self.herm
    }

    #[inline]
    pub fn mat(&self) -> &ComplexMatrix<T> {
        self.herm.mat()
    }

    /// Certified smallest eigenvalue.
    #[inline]
    pub fn min_eigenvalue(&self) -> T {
        self.spectrum.eigenvalues[0]
    }

    /// The cached spectral decomposition (default cluster tolerance).
    #[inline]
    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    /// Reclusters the cached eigenvalues at a custom tolerance without
    /// re-solving.
    pub fn spectrum_with_tol(&self, cluster_tol: T) -> Spectrum<T> {
        Spectrum {
            eigenvalues: self.spectrum.eigenvalues.clone(),
            frame: self.spectrum.frame.clone(),
            clusters: cluster_indices(&self.spectrum.eigenvalues, cluster_tol),
        }
    }

    /// Matrix power via functional calculus; SPD for any real exponent.
    pub fn pow(&self, r: T) -> Self {
        let eigs: Vec<T> = self
            .spectrum
            .eigenvalues
            .iter()
            .map(|&l| l.powf(r))
            .collect();
        Self::from_eigenpairs(self.spectrum.frame.clone(), eigs).expect("powers of SPD are SPD")
    }

    pub fn sqrt(&self) -> Self {
        self.pow(T::of(0.5))
    }

    pub fn inverse(&self) -> Self {
        self.pow(-T::one())
    }

    /// Matrix logarithm; Hermitian.
    pub fn log(&self) -> HermitianMatrix<T> {
        self.spectrum.apply(|l| l.ln())
    }

    pub fn add_herm(&self, h: &HermitianMatrix<T>) -> Result<Self> {
        if self.dim() != h.dim() {
            return Err(Error::DimensionMismatch(self.dim(), h.dim()));
        }
        Self::new(self.herm.add(h))
    }
}

/// Spectral decomposition `A = U diag(eigenvalues) U*` with eigenvalues
/// ascending and indices partitioned into clusters of numerically equal
/// eigenvalues.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real = f64> {
    pub eigenvalues: Vec<T>,
    pub frame: ComplexMatrix<T>,
    pub clusters: Vec<Vec<usize>>,
}

impl<T: Real> Spectrum<T> {
    #[inline]
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `U diag(f(eigenvalues)) U*`.
    pub fn apply(&self, f: impl Fn(T) -> T) -> HermitianMatrix<T> {
        let n = self.dim();
        let values: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (k, &v) in values.iter().enumerate() {
                    acc += (self.frame[(i, k)] * self.frame[(j, k)].conj()).scale(v);
                }
                out[(i, j)] = acc;
            }
        }
        HermitianMatrix::trusted(out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix<T> {
        self.apply(|l| l)
    }

    /// Cluster index of each eigenvalue position.
    pub fn cluster_of(&self) -> Vec<usize> {
        let mut id = vec![0usize; self.dim()];
        for (c, members) in self.clusters.iter().enumerate() {
            for &m in members {
                id[m] = c;
            }
        }
        id
    }
}

/// Choice of unitarily invariant norm.
#[derive(Clone, Debug, PartialEq)]
pub enum NormSpec<T: Real = f64> {
    HilbertSchmidt,
    Operator,
    /// Schatten p-norm, `p >= 1`; `p = infinity` evaluates as the operator norm.
    Schatten(T),
    /// Ky Fan k-norm: sum of the k largest singular values, `1 <= k <= n`.
    KyFan(usize),
}

impl<T: Real> NormSpec<T> {
    pub fn schatten(p: T) -> Result<Self> {
        if !(p >= T::one()) {
            return Err(Error::Precondition(format!(
                "Schatten norm requires p >= 1, got {p}"
            )));
        }
        Ok(NormSpec::Schatten(p))
    }

    pub fn ky_fan(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::Precondition("Ky Fan norm requires k >= 1".into()));
        }
        Ok(NormSpec::KyFan(k))
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Eigendecomposition with single-link clustering of near-equal eigenvalues:
/// two adjacent eigenvalues merge when their gap is at most
/// `cluster_tol * max(1, |lambda|)`.
pub fn spectral_decompose<T: Real>(
    a: &HermitianMatrix<T>,
    cluster_tol: T,
) -> Result<Spectrum<T>> {
    if !(cluster_tol > T::zero()) {
        return Err(Error::Precondition("cluster_tol must be positive".into()));
    }
    let (eigenvalues, frame) = eig::eigh(a.mat())?;
    let clusters = cluster_indices(&eigenvalues, cluster_tol);
    Ok(Spectrum {
        eigenvalues,
        frame,
        clusters,
    })
}

fn cluster_indices<T: Real>(eigs_ascending: &[T], tol: T) -> Vec<Vec<usize>> {
    let n = eigs_ascending.len();
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut current = vec![0usize];
    for i in 1..n {
        let gap = eigs_ascending[i] - eigs_ascending[i - 1];
        let scale = eigs_ascending[i]
            .abs()
            .max(eigs_ascending[i - 1].abs())
            .max(T::one());
        if gap <= tol * scale {
            current.push(i);
        } else {
            clusters.push(std::mem::take(&mut current));
            current = vec![i];
        }
    }
    clusters.push(current);
    clusters
}

/// Unitarily invariant norm of a Hermitian matrix, computed from its
/// eigenvalue moduli (the singular values).
pub fn ui_norm<T: Real>(x: &HermitianMatrix<T>, spec: &NormSpec<T>) -> Result<T> {
    match spec {
        NormSpec::HilbertSchmidt => Ok(x.hs_norm()),
        NormSpec::Schatten(p) if *p == T::of(2.0) => Ok(x.hs_norm()),
        _ => {
            let spectrum = spectral_decompose(x, T::of(DEFAULT_CLUSTER_TOL))?;
            let mut s: Vec<T> = spectrum.eigenvalues.iter().map(|l| l.abs()).collect();
            s.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
            norm_from_singular_values(&s, spec)
        }
    }
}

pub(crate) fn norm_from_singular_values<T: Real>(
    s_descending: &[T],
    spec: &NormSpec<T>,
) -> Result<T> {
    let n = s_descending.len();
    match spec {
        NormSpec::HilbertSchmidt => Ok(s_descending
            .iter()
            .map(|&v| v * v)
            .fold(T::zero(), |a, b| a + b)
            .sqrt()),
        NormSpec::Operator => Ok(s_descending[0]),
        NormSpec::Schatten(p) => {
            if !(*p >= T::one()) {
                return Err(Error::Precondition(format!(
                    "Schatten norm requires p >= 1, got {p}"
                )));
            }
            if p.is_infinite() {
                return Ok(s_descending[0]);
            }
            let top = s_descending[0];
            if top == T::zero() {
                return Ok(T::zero());
            }
            // Scale out the largest value to avoid overflow for large p.
            let sum = s_descending
                .iter()
                .map(|&v| (v / top).powf(*p))
                .fold(T::zero(), |a, b| a + b);
            Ok(top * sum.powf(T::one() / *p))
        }
        NormSpec::KyFan(k) => {
            if *k < 1 || *k > n {
                return Err(Error::Precondition(format!(
                    "Ky Fan k must satisfy 1 <= k <= {n}, got {k}"
                )));
            }
            Ok(s_descending[..*k]
                .iter()
                .fold(T::zero(), |a, &b| a + b))
        }
    }
}

/// Hilbert-Schmidt inner product `Tr X* Y`; real for Hermitian arguments.
pub fn hs_inner<T: Real>(x: &HermitianMatrix<T>, y: &HermitianMatrix<T>) -> Result<T> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let n = x.dim();
    let mut acc = T::zero();
    for i in 0..n {
        for j in 0..n {
            let a = x.entry(i, j);
            let b = y.entry(i, j);
            acc += a.re * b.re + a.im * b.im; // Re(conj(a) b)
        }
    }
    Ok(acc)
}

/// Pinching (conditional expectation): `sum_i P_i X P_i` over the spectral
/// clusters. Idempotent, HS-orthogonal projection, HS-contractive.
pub fn pinch<T: Real>(spectrum: &Spectrum<T>, x: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let n = spectrum.dim();
    if x.dim() != n {
        return Err(Error::DimensionMismatch(x.dim(), n));
    }
    let cluster = spectrum.cluster_of();
    let mut xt = x.mat().conjugate_by_adjoint(&spectrum.frame);
    for i in 0..n {
        for j in 0..n {
            if cluster[i] != cluster[j] {
                xt[(i, j)] = Complex::new(T::zero(), T::zero());
            }
        }
    }
    Ok(HermitianMatrix::trusted(xt.conjugate_by(&spectrum.frame)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmatrix::ComplexMatrix;

    fn spd_2x2_ones() -> HermitianMatrix<f64> {
        HermitianMatrix::from_real(2, &[2.0, 1.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn spectral_decompose_identity_single_cluster() {
        let s = spectral_decompose(&HermitianMatrix::<f64>::identity(3), 1e-8).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert_eq!(s.clusters, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn spectral_decompose_diagonal_singletons() {
        let s = spectral_decompose(&HermitianMatrix::<f64>::from_diag(&[1.0, 2.0, 3.0]), 1e-8).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.clusters.len(), 3);
        // Frame is a permutation of the identity up to phase.
        for col in 0..3 {
            let mut mods: Vec<f64> = (0..3).map(|r| s.frame[(r, col)].norm()).collect();
            mods.sort_by(f64::total_cmp);
            assert!((mods[2] - 1.0).abs() < 1e-14 && mods[1] < 1e-14);
        }
    }

    #[test]
    fn spectral_decompose_2x2_hand_frame() {
        let s = spectral_decompose(&spd_2x2_ones(), 1e-8).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 3.0).abs() < 1e-14);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.frame[(0, 0)].re - inv_sqrt2).abs() < 1e-14);
        assert!((s.frame[(1, 0)].re + inv_sqrt2).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_over_seeded_hermitians() {
        // 1000 seeded matrices: || U diag U* - A || <= 1e-9 ||A||.
        for seed in 0..1000u64 {
            let a = random_hermitian::<f64>(3, seed, 1.0);
            let s = spectral_decompose(&a, 1e-8).unwrap();
            let err = s.reconstruct().sub(&a).hs_norm();
            assert!(err <= 1e-9 * a.hs_norm().max(1e-30), "seed {seed}: {err}");
        }
    }

    #[test]
    fn spd_rejects_indefinite() {
        let h: HermitianMatrix<f64> = HermitianMatrix::from_diag(&[1.0, -0.5]);
        match SpdMatrix::new(h) {
            Err(Error::NotPositiveDefinite { min_eigenvalue }) => {
                assert!((min_eigenvalue + 0.5).abs() < 1e-12)
            }
            other => panic!("expected NotPositiveDefinite, got {other:?}"),
        }
    }

    #[test]
    fn hermitian_defect_rejected() {
        let mut m: ComplexMatrix<f64> = ComplexMatrix::zeros(2);
        m[(0, 1)] = num_complex::Complex::new(1.0, 0.0);
        m[(1, 0)] = num_complex::Complex::new(0.5, 0.0);
        assert!(matches!(
            HermitianMatrix::new(m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn ui_norm_examples() {
        let x: HermitianMatrix<f64> = HermitianMatrix::from_diag(&[3.0, -4.0]);
        assert!((ui_norm(&x, &NormSpec::HilbertSchmidt).unwrap() - 5.0).abs() < 1e-12);
        assert!((ui_norm(&x, &NormSpec::Operator).unwrap() - 4.0).abs() < 1e-12);
        let i3: HermitianMatrix<f64> = HermitianMatrix::from_diag(&[1.0, 1.0, 1.0]);
        assert!((ui_norm(&i3, &NormSpec::Schatten(1.0)).unwrap() - 3.0).abs() < 1e-12);
        // Schatten(2) = HS, Schatten(inf) = operator.
        assert!(
            (ui_norm(&x, &NormSpec::Schatten(2.0)).unwrap()
                - ui_norm(&x, &NormSpec::HilbertSchmidt).unwrap())
            .abs()
                < 1e-14
        );
        assert!(
            (ui_norm(&x, &NormSpec::Schatten(f64::INFINITY)).unwrap()
                - ui_norm(&x, &NormSpec::Operator).unwrap())
            .abs()
                < 1e-14
        );
        assert!((ui_norm(&x, &NormSpec::KyFan(1)).unwrap() - 4.0).abs() < 1e-12);
        assert!((ui_norm(&x, &NormSpec::KyFan(2)).unwrap() - 7.0).abs() < 1e-12);
        assert!(ui_norm(&x, &NormSpec::KyFan(3)).is_err());
        assert!(NormSpec::<f64>::schatten(0.5).is_err());
    }

    #[test]
    fn norm_axioms_on_seeded_samples() {
        let specs = [
            NormSpec::HilbertSchmidt,
            NormSpec::Operator,
            NormSpec::Schatten(1.0),
            NormSpec::Schatten(3.5),
            NormSpec::KyFan(2),
        ];
        for seed in 0..40u64 {
            let x = random_hermitian::<f64>(3, 3 * seed, 1.0);
            let y = random_hermitian::<f64>(3, 3 * seed + 1, 1.0);
            let mut rng = SplitMix64::new(900 + seed);
            let u = random_unitary::<f64>(3, &mut rng);
            for spec in &specs {
                let nx = ui_norm(&x, spec).unwrap();
                let ny = ui_norm(&y, spec).unwrap();
                let nxy = ui_norm(&x.add(&y), spec).unwrap();
                assert!(nxy <= nx + ny + 1e-10, "{spec:?} triangle");
                let rotated = HermitianMatrix::trusted(x.mat().conjugate_by(&u));
                let nr = ui_norm(&rotated, spec).unwrap();
                assert!((nr - nx).abs() <= 1e-10 * nx.max(1.0), "{spec:?} unitary");
            }
        }
    }

    #[test]
    fn hs_inner_examples() {
        let i2 = HermitianMatrix::<f64>::identity(2);
        assert!((hs_inner(&i2, &i2).unwrap() - 2.0).abs() < 1e-14);
        let z: HermitianMatrix<f64> = HermitianMatrix::from_diag(&[1.0, -1.0]);
        assert!(hs_inner(&z, &i2).unwrap().abs() < 1e-14);
        let x: HermitianMatrix<f64> = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((hs_inner(&x, &x).unwrap() - 2.0).abs() < 1e-14);
        // hs_inner(X, X) = ||X||_HS^2
        let h = random_hermitian::<f64>(4, 5, 1.0);
        let n = ui_norm(&h, &NormSpec::HilbertSchmidt).unwrap();
        assert!((hs_inner(&h, &h).unwrap() - n * n).abs() < 1e-12 * n * n);
    }

    #[test]
    fn pinch_identity_spectrum_is_identity_map() {
        let s = spectral_decompose(&HermitianMatrix::<f64>::identity(2), 1e-8).unwrap();
        let x = random_hermitian::<f64>(2, 11, 1.0);
        let p = pinch(&s, &x).unwrap();
        assert!(p.sub(&x).hs_norm() < 1e-13);
    }

    #[test]
    fn pinch_diagonal_spectrum_keeps_diagonal() {
        let s = spectral_decompose(&HermitianMatrix::<f64>::from_diag(&[1.0, 2.0]), 1e-8).unwrap();
        let x: HermitianMatrix<f64> = HermitianMatrix::from_real(2, &[3.0, 0.5, 0.5, -1.0]).unwrap();
        let p = pinch(&s, &x).unwrap();
        assert!((p.entry(0, 0).re - 3.0).abs() < 1e-14);
        assert!((p.entry(1, 1).re + 1.0).abs() < 1e-14);
        assert!(p.entry(0, 1).norm() < 1e-14);
    }

    #[test]
    fn pinch_block_structure_and_projection_properties() {
        // Diag(1,1,2): a 2-cluster and a singleton.
        let s = spectral_decompose(&HermitianMatrix::<f64>::from_diag(&[1.0, 1.0, 2.0]), 1e-8).unwrap();
        assert_eq!(s.clusters, vec![vec![0, 1], vec![2]]);
        for seed in 0..50u64 {
            let x = random_hermitian::<f64>(3, 100 + seed, 1.0);
            let y = random_hermitian::<f64>(3, 200 + seed, 1.0);
            let px = pinch(&s, &x).unwrap();
            // Block-diagonal oracle: projector algebra P1 X P1 + P2 X P2.
            for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
                assert!(px.entry(i, j).norm() < 1e-13);
            }
            for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)] {
                assert!((px.entry(i, j) - x.entry(i, j)).norm() < 1e-13);
            }
            // Idempotence, HS contraction, orthogonality.
            assert!(pinch(&s, &px).unwrap().sub(&px).hs_norm() < 1e-12);
            assert!(px.hs_norm() <= x.hs_norm() + 1e-12);
            let py = pinch(&s, &y).unwrap();
            let cross = hs_inner(&x.sub(&px), &py).unwrap();
            assert!(cross.abs() < 1e-11, "pinch must be an orthogonal projection");
        }
    }

    #[test]
    fn random_spd_one_dimensional_zero_spread_is_one() {
        let m = random_spd::<f64>(1, 12345, 0.0);
        assert_eq!(m.herm().entry(0, 0).re, 1.0);
        assert_eq!(m.herm().entry(0, 0).im, 0.0);
    }

    #[test]
    fn random_spd_deterministic_bitwise() {
        let a = random_spd::<f64>(3, 42, 1.0);
        let b = random_spd::<f64>(3, 42, 1.0);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.herm().entry(i, j), b.herm().entry(i, j));
            }
        }
    }

    #[test]
    fn random_spd_eigenvalue_range() {
        let m = random_spd::<f64>(4, 7, 2.0);
        let s = spectral_decompose(m.herm(), 1e-8).unwrap();
        let (lo, hi) = ((-2.0f64).exp(), (2.0f64).exp());
        for &l in &s.eigenvalues {
            assert!(l >= lo * (1.0 - 1e-9) && l <= hi * (1.0 + 1e-9), "{l}");
        }
    }

    #[test]
    fn commuting_pair_commutes() {
        let (a, b) = random_commuting_pair::<f64>(3, 9, 1.0);
        let ab = a.mat().mul(b.mat());
        let ba = b.mat().mul(a.mat());
        assert!(ab.sub(&ba).max_abs() < 1e-12);
    }
}
