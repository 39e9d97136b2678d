//! Kernel-metric machinery on the SPD manifold.
//!
//! The foot point `D = U diag(lambda) U*` turns a kernel `phi` into the
//! positive Schur multiplier `C_ij = phi(lambda_i, lambda_j)` acting in the
//! eigenframe; powers of that multiplier implement the metric inner product,
//! infinitesimal lengths and the monotone-metric quantities.

use num_complex::Complex;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::matcore::{
    divided_difference, hs_inner, HermitianMatrix, ScalarFn, SpdMatrix, Spectrum,
};
use crate::means::{kernel_eval, KernelSpec, StandardFunctionSpec};
use crate::real::Real;

/// A positive kernel function of two positive variables.
pub trait KernelFn<T: Real>: Send + Sync {
    fn eval(&self, x: T, y: T) -> Result<T>;
    fn describe(&self) -> String;
}

impl<T: Real> KernelFn<T> for KernelSpec<T> {
    fn eval(&self, x: T, y: T) -> Result<T> {
        // Homogeneity-reduced: phi(x, y) = y^theta M(x/y, 1)^theta, keeping
        // the evaluation in the ratio range even for wide spectra.
        kernel_eval(self, x, y)
    }

    fn describe(&self) -> String {
        self.name()
    }
}

/// Pull-back of a kernel metric under a scalar map `G`:
/// `psi(x, y) = phi(G(x), G(y)) / G^[1](x, y)^2`.
pub struct PullbackKernel<T: Real> {
    base: Box<dyn KernelFn<T>>,
    map: ScalarFn<T>,
}

impl<T: Real> KernelFn<T> for PullbackKernel<T> {
    fn eval(&self, x: T, y: T) -> Result<T> {
        let dd = divided_difference(&self.map, x, y)?;
        if dd == T::zero() {
            return Err(Error::Domain(format!(
                "pull-back map `{}` has vanishing divided difference at ({x}, {y})",
                self.map.name()
            )));
        }
        let gx = self.map.eval(x);
        let gy = self.map.eval(y);
        Ok(self.base.eval(gx, gy)? / (dd * dd))
    }

    fn describe(&self) -> String {
        format!("pullback[{} via {}]", self.base.describe(), self.map.name())
    }
}

/// Builds the pull-back kernel, probing that `G'` does not vanish on a
/// log-spaced grid of the working interval.
pub fn pullback_kernel<T: Real>(
    phi: impl KernelFn<T> + 'static,
    map: ScalarFn<T>,
) -> Result<PullbackKernel<T>> {
    let probes = crate::means::log_spaced(T::of(1e-2), T::of(1e2), 17);
    let mut prev: Option<T> = None;
    let mut direction = T::zero();
    for &x in &probes {
        let d = map.deriv(x);
        if !d.is_finite() || d == T::zero() {
            return Err(Error::Domain(format!(
                "pull-back map `{}` has vanishing or undefined derivative at {x}",
                map.name()
            )));
        }
        let v = map.eval(x);
        if !v.is_finite() || v <= T::zero() {
            return Err(Error::Domain(format!(
                "pull-back map `{}` must take positive values, fails at {x}",
                map.name()
            )));
        }
        if let Some(p) = prev {
            let step = v - p;
            if step == T::zero() || (direction != T::zero() && step.signum() != direction) {
                return Err(Error::Domain(format!(
                    "pull-back map `{}` is not strictly monotone near {x}",
                    map.name()
                )));
            }
            direction = step.signum();
        }
        prev = Some(v);
    }
    Ok(PullbackKernel {
        base: Box::new(phi),
        map,
    })
}

/// Kernel coefficients cached in the eigenframe of a foot point.
pub struct KernelOperator<T: Real> {
    spectrum: Spectrum<T>,
    /// `C_ij = phi(lambda_i, lambda_j)`, row-major, symmetric positive.
    coeffs: Vec<T>,
    description: String,
}

impl<T: Real> KernelOperator<T> {
    pub fn new(phi: &dyn KernelFn<T>, d: &SpdMatrix<T>) -> Result<Self> {
        Self::from_spectrum(phi, d.spectrum().clone())
    }

    pub fn from_spectrum(phi: &dyn KernelFn<T>, spectrum: Spectrum<T>) -> Result<Self> {
        let n = spectrum.dim();
        let mut coeffs = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i..n {
                let c = phi.eval(spectrum.eigenvalues[i], spectrum.eigenvalues[j])?;
                if !(c > T::zero()) || !c.is_finite() {
                    return Err(Error::Domain(format!(
                        "kernel {} must be positive, got {c} at ({}, {})",
                        phi.describe(),
                        spectrum.eigenvalues[i].as_f64(),
                        spectrum.eigenvalues[j].as_f64()
                    )));
                }
                coeffs[i * n + j] = c;
                coeffs[j * n + i] = c;
            }
        }
        Ok(Self {
            spectrum,
            coeffs,
            description: phi.describe(),
        })
    }

    #[inline]
    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeffs[i * self.spectrum.dim() + j]
    }

    pub fn describe(&self) -> &str {
        &self.description
    }

    /// Schur product with `C^p` in the eigenframe (no rotation).
    pub fn schur_power_in_frame(&self, xt: &ComplexMatrix<T>, p: T) -> ComplexMatrix<T> {
        let n = self.spectrum.dim();
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = xt[(i, j)].scale(power(self.coeff(i, j), p));
            }
        }
        out
    }

    /// `U (C^p o (U* X U)) U*`.
    pub fn apply_power(&self, x: &HermitianMatrix<T>, p: T) -> Result<HermitianMatrix<T>> {
        let n = self.spectrum.dim();
        if x.dim() != n {
            return Err(Error::DimensionMismatch(x.dim(), n));
        }
        let xt = x.mat().conjugate_by_adjoint(&self.spectrum.frame);
        let yt = self.schur_power_in_frame(&xt, p);
        Ok(HermitianMatrix::trusted(
            yt.conjugate_by(&self.spectrum.frame),
        ))
    }

    /// Metric inner product `<H, C^-1 o K>` evaluated in the frame.
    pub fn metric(&self, h: &HermitianMatrix<T>, k: &HermitianMatrix<T>) -> Result<T> {
        let n = self.spectrum.dim();
        if h.dim() != n || k.dim() != n {
            return Err(Error::DimensionMismatch(h.dim().max(k.dim()), n));
        }
        let ht = h.mat().conjugate_by_adjoint(&self.spectrum.frame);
        let kt = k.mat().conjugate_by_adjoint(&self.spectrum.frame);
        let mut re = T::zero();
        let mut im = T::zero();
        for i in 0..n {
            for j in 0..n {
                let a = ht[(i, j)];
                let b = kt[(i, j)];
                let c = self.coeff(i, j);
                // conj(a) * b / c
                re += (a.re * b.re + a.im * b.im) / c;
                im += (a.re * b.im - a.im * b.re) / c;
            }
        }
        debug_assert!(
            im.abs() <= T::of(1e-10) * re.abs().max(T::one()),
            "imaginary residue {im:?} on a real quadratic form"
        );
        Ok(re)
    }

    /// Infinitesimal length `|| C^{-1/2} o (U* V U) ||` in the given norm,
    /// evaluated entirely in the frame (the norm is unitarily invariant).
    pub fn speed(&self, v: &HermitianMatrix<T>, norm: &crate::matcore::NormSpec<T>) -> Result<T> {
        let n = self.spectrum.dim();
        if v.dim() != n {
            return Err(Error::DimensionMismatch(v.dim(), n));
        }
        let vt = v.mat().conjugate_by_adjoint(&self.spectrum.frame);
        match norm {
            crate::matcore::NormSpec::HilbertSchmidt => {
                let mut acc = T::zero();
                for i in 0..n {
                    for j in 0..n {
                        acc += vt[(i, j)].norm_sqr() / self.coeff(i, j);
                    }
                }
                Ok(acc.sqrt())
            }
            other => {
                let half = T::of(-0.5);
                let st = self.schur_power_in_frame(&vt, half);
                crate::matcore::ui_norm(&HermitianMatrix::trusted(st), other)
            }
        }
    }
}

#[inline]
fn power<T: Real>(c: T, p: T) -> T {
    if p == T::one() {
        c
    } else if p == -T::one() {
        c.recip()
    } else {
        c.powf(p)
    }
}

// ---------------------------------------------------------------------------
// Spec operations
// ---------------------------------------------------------------------------

/// `phi(L_D, R_D)^p X = U ([phi(lambda_i, lambda_j)^p] o (U* X U)) U*`.
pub fn kernel_apply<T: Real>(
    phi: &dyn KernelFn<T>,
    d: &SpdMatrix<T>,
    x: &HermitianMatrix<T>,
    p: T,
) -> Result<HermitianMatrix<T>> {
    KernelOperator::new(phi, d)?.apply_power(x, p)
}

/// The kernel metric `K_D(H, K) = <H, phi(L_D, R_D)^-1 K>_HS`.
pub fn metric_eval<T: Real>(
    phi: &dyn KernelFn<T>,
    d: &SpdMatrix<T>,
    h: &HermitianMatrix<T>,
    k: &HermitianMatrix<T>,
) -> Result<T> {
    KernelOperator::new(phi, d)?.metric(h, k)
}

/// Orthogonal decomposition of a tangent at `D` into a part commuting with
/// `D` and a commutator part `i[D, K]`.
#[derive(Clone, Debug)]
pub struct TangentSplit<T: Real = f64> {
    /// `H_c`: the blocks within spectral clusters (commutes with `D`).
    pub commuting: HermitianMatrix<T>,
    /// `H_q = i[D, K]`: the off-cluster blocks.
    pub commutator: HermitianMatrix<T>,
    /// Minimum-norm generator `K` with `i[D, K] = H_q` (zero on-cluster
    /// blocks in the eigenframe).
    pub generator: HermitianMatrix<T>,
}

/// Splits `H = H_c + H_q` in the eigenframe of `D`; the generator solves the
/// commutator equation entrywise off the clusters.
pub fn tangent_split<T: Real>(
    d: &SpdMatrix<T>,
    h: &HermitianMatrix<T>,
    cluster_tol: T,
) -> Result<TangentSplit<T>> {
    let n = d.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch(h.dim(), n));
    }
    let spectrum = d.spectrum_with_tol(cluster_tol);
    let cluster = spectrum.cluster_of();
    let ht = h.mat().conjugate_by_adjoint(&spectrum.frame);
    let mut ct = ComplexMatrix::zeros(n);
    let mut qt = ComplexMatrix::zeros(n);
    let mut gt = ComplexMatrix::zeros(n);
    let i_unit = Complex::new(T::zero(), T::one());
    for i in 0..n {
        for j in 0..n {
            if cluster[i] == cluster[j] {
                ct[(i, j)] = ht[(i, j)];
            } else {
                qt[(i, j)] = ht[(i, j)];
                // i (lambda_i - lambda_j) K_ij = H_ij
                let gap = spectrum.eigenvalues[i] - spectrum.eigenvalues[j];
                gt[(i, j)] = ht[(i, j)] / (i_unit.scale(gap));
            }
        }
    }
    Ok(TangentSplit {
        commuting: HermitianMatrix::trusted(ct.conjugate_by(&spectrum.frame)),
        commutator: HermitianMatrix::trusted(qt.conjugate_by(&spectrum.frame)),
        generator: HermitianMatrix::trusted(gt.conjugate_by(&spectrum.frame)),
    })
}

/// Kernel of the monotone metric induced by a standard function:
/// `phi(x, y) = y f(x/y)` (degree-1 kernel).
pub fn monotone_kernel<T: Real>(f: &StandardFunctionSpec<T>) -> KernelSpec<T> {
    KernelSpec::new(crate::means::MeanSpec::FromOperatorMonotone(f.clone()), T::one())
}

/// Metric-adjusted skew information
/// `I_D^f(K) = (f(0)/2) K_D^f(i[D,K], i[D,K])`; requires a regular `f`
/// (`f(0) > 0`, probed numerically).
pub fn skew_information<T: Real>(
    f: &StandardFunctionSpec<T>,
    d: &SpdMatrix<T>,
    k: &HermitianMatrix<T>,
) -> Result<T> {
    let f0 = f.f_zero();
    if !(f0 > T::of(1e-9)) {
        return Err(Error::Precondition(format!(
            "skew information requires a regular standard function; `{}` has f(0) ~ {:e}",
            f.name(),
            f0.as_f64()
        )));
    }
    let c = d.herm().commutator_i(k)?;
    let kernel = monotone_kernel(f);
    Ok(f0 * T::of(0.5) * metric_eval(&kernel, d, &c, &c)?)
}

/// Wigner-Yanase-Dyson skew information evaluated directly from the
/// commutator trace `-(1/2) Tr [D^p, K][D^{1-p}, K]`.
pub fn wyd_direct<T: Real>(p: T, d: &SpdMatrix<T>, k: &HermitianMatrix<T>) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Precondition(format!(
            "WYD parameter must lie in (0, 1), got {p}"
        )));
    }
    if d.dim() != k.dim() {
        return Err(Error::DimensionMismatch(d.dim(), k.dim()));
    }
    let dp = crate::matcore::apply_scalar_function(d, &ScalarFn::Power(p))?;
    let dq = crate::matcore::apply_scalar_function(d, &ScalarFn::Power(T::one() - p))?;
    let c1 = commutator(dp.mat(), k.mat());
    let c2 = commutator(dq.mat(), k.mat());
    let tr = c1.mul(&c2).trace();
    Ok(-T::of(0.5) * tr.re)
}

fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    a.mul(b).sub(&b.mul(a))
}

/// Generalized variance `<K, J_D^f K>_HS`; reduces to `Tr D K^2` for
/// commuting arguments.
pub fn generalized_variance<T: Real>(
    f: &StandardFunctionSpec<T>,
    d: &SpdMatrix<T>,
    k: &HermitianMatrix<T>,
) -> Result<T> {
    let kernel = monotone_kernel(f);
    let jk = kernel_apply(&kernel, d, k, T::one())?;
    hs_inner(k, &jk)
}
