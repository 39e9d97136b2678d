//! Scalar functions for functional calculus, divided differences and Frechet
//! derivatives.

use std::sync::Arc;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::matcore::{HermitianMatrix, SpdMatrix, Spectrum, DD_SWITCH};
use crate::real::Real;

/// A user-supplied scalar map with an optional closed-form derivative.
pub struct CustomScalarFn<T> {
    pub name: String,
    pub eval: Box<dyn Fn(T) -> T + Send + Sync>,
    pub deriv: Option<Box<dyn Fn(T) -> T + Send + Sync>>,
}

/// Scalar map applied through the eigenvalues.
#[derive(Clone)]
pub enum ScalarFn<T: Real = f64> {
    /// `x^r` (`exp(r log x)` on positive spectra).
    Power(T),
    Log,
    Exp,
    Custom(Arc<CustomScalarFn<T>>),
}

impl<T: Real> ScalarFn<T> {
    pub fn custom(
        name: impl Into<String>,
        eval: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        ScalarFn::Custom(Arc::new(CustomScalarFn {
            name: name.into(),
            eval: Box::new(eval),
            deriv: None,
        }))
    }

    pub fn custom_with_deriv(
        name: impl Into<String>,
        eval: impl Fn(T) -> T + Send + Sync + 'static,
        deriv: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        ScalarFn::Custom(Arc::new(CustomScalarFn {
            name: name.into(),
            eval: Box::new(eval),
            deriv: Some(Box::new(deriv)),
        }))
    }

    pub fn name(&self) -> String {
        match self {
            ScalarFn::Power(r) => format!("power({r})"),
            ScalarFn::Log => "log".into(),
            ScalarFn::Exp => "exp".into(),
            ScalarFn::Custom(c) => c.name.clone(),
        }
    }

    /// Whether the map (and its derivative) is defined at `x`.
    pub fn defined_at(&self, x: T) -> bool {
        match self {
            ScalarFn::Power(r) => {
                if *r == r.trunc() && *r >= T::zero() {
                    true
                } else {
                    x > T::zero()
                }
            }
            ScalarFn::Log => x > T::zero(),
            ScalarFn::Exp => true,
            ScalarFn::Custom(c) => (c.eval)(x).is_finite(),
        }
    }

    pub fn eval(&self, x: T) -> T {
        match self {
            ScalarFn::Power(r) => x.powf(*r),
            ScalarFn::Log => x.ln(),
            ScalarFn::Exp => x.exp(),
            ScalarFn::Custom(c) => (c.eval)(x),
        }
    }

    pub fn deriv(&self, x: T) -> T {
        match self {
            ScalarFn::Power(r) => *r * x.powf(*r - T::one()),
            ScalarFn::Log => x.recip(),
            ScalarFn::Exp => x.exp(),
            ScalarFn::Custom(c) => match &c.deriv {
                Some(d) => d(x),
                None => {
                    // Central difference; h ~ eps^(1/3) balances truncation
                    // against cancellation.
                    let h = T::epsilon().cbrt() * x.abs().max(T::one());
                    ((c.eval)(x + h) - (c.eval)(x - h)) / (h + h)
                }
            },
        }
    }

    /// Third derivative when available in closed form; drives the second-order
    /// correction of the near-diagonal divided-difference branch.
    pub fn third_deriv(&self, x: T) -> Option<T> {
        match self {
            ScalarFn::Power(r) => {
                let one = T::one();
                Some(*r * (*r - one) * (*r - T::of(2.0)) * x.powf(*r - T::of(3.0)))
            }
            ScalarFn::Log => Some(T::of(2.0) / (x * x * x)),
            ScalarFn::Exp => Some(x.exp()),
            ScalarFn::Custom(_) => None,
        }
    }
}

/// Divided difference `(f(x) - f(y)) / (x - y)` with a derivative branch below
/// the relative switch [`DD_SWITCH`]: there it evaluates `f'(m)` at the
/// midpoint plus the correction `f'''(m) (x-y)^2 / 24` when a closed-form
/// third derivative exists.
pub fn divided_difference<T: Real>(f: &ScalarFn<T>, x: T, y: T) -> Result<T> {
    divided_difference_forced(f, x, y, false)
}

pub(crate) fn divided_difference_forced<T: Real>(
    f: &ScalarFn<T>,
    x: T,
    y: T,
    force_derivative: bool,
) -> Result<T> {
    for v in [x, y] {
        if !f.defined_at(v) {
            return Err(Error::ScalarDomain {
                name: f.name(),
                value: v.as_f64(),
            });
        }
    }
    let scale = x.abs().max(y.abs());
    if !force_derivative && (x - y).abs() > T::of(DD_SWITCH) * scale {
        Ok((f.eval(x) - f.eval(y)) / (x - y))
    } else {
        let m = (x + y) * T::of(0.5);
        let d = f.deriv(m);
        match f.third_deriv(m) {
            Some(t3) => {
                let g = x - y;
                Ok(d + t3 * g * g / T::of(24.0))
            }
            None => Ok(d),
        }
    }
}

/// `U diag(f(lambda_i)) U*` on a positive definite matrix.
pub fn apply_scalar_function<T: Real>(
    a: &SpdMatrix<T>,
    f: &ScalarFn<T>,
) -> Result<HermitianMatrix<T>> {
    apply_to_spectrum(a.spectrum(), f)
}

pub(crate) fn apply_to_spectrum<T: Real>(
    s: &Spectrum<T>,
    f: &ScalarFn<T>,
) -> Result<HermitianMatrix<T>> {
    for &l in &s.eigenvalues {
        if !f.defined_at(l) || !f.eval(l).is_finite() {
            return Err(Error::ScalarDomain {
                name: f.name(),
                value: l.as_f64(),
            });
        }
    }
    Ok(s.apply(|l| f.eval(l)))
}

/// Matrix exponential of a Hermitian matrix; always SPD.
pub fn herm_exp<T: Real>(h: &HermitianMatrix<T>) -> Result<SpdMatrix<T>> {
    let s = crate::matcore::spectral_decompose(h, T::of(crate::matcore::DEFAULT_CLUSTER_TOL))?;
    let eigs: Vec<T> = s.eigenvalues.iter().map(|&l| l.exp()).collect();
    SpdMatrix::from_eigenpairs(s.frame, eigs)
}

/// Directional (Frechet) derivative of the matrix function `f` at `a` along
/// `h`: in the eigenframe of `a` the entries are multiplied by the divided
/// differences `f^[1](lambda_i, lambda_j)`. Commuting directions reduce to
/// `f'(a) h`.
pub fn frechet_derivative<T: Real>(
    f: &ScalarFn<T>,
    a: &SpdMatrix<T>,
    h: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>> {
    if a.dim() != h.dim() {
        return Err(Error::DimensionMismatch(a.dim(), h.dim()));
    }
    frechet_on_spectrum(f, a.spectrum(), h)
}

pub(crate) fn frechet_on_spectrum<T: Real>(
    f: &ScalarFn<T>,
    s: &Spectrum<T>,
    h: &HermitianMatrix<T>,
) -> Result<HermitianMatrix<T>> {
    let n = s.dim();
    if h.dim() != n {
        return Err(Error::DimensionMismatch(h.dim(), n));
    }
    let cluster = s.cluster_of();
    let mut dd = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            // Same-cluster pairs always take the derivative branch.
            let v = divided_difference_forced(
                f,
                s.eigenvalues[i],
                s.eigenvalues[j],
                cluster[i] == cluster[j],
            )?;
            dd[i * n + j] = v;
            dd[j * n + i] = v;
        }
    }
    let ht = h.mat().conjugate_by_adjoint(&s.frame);
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = ht[(i, j)].scale(dd[i * n + j]);
        }
    }
    Ok(HermitianMatrix::trusted(out.conjugate_by(&s.frame)))
}
