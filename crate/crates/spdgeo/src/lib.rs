//! Kernel Riemannian (and Finsler) geometry on the manifold of positive
//! definite matrices.
//!
//! A kernel function `phi(x, y) > 0` induces an inner product on Hermitian
//! tangents at a foot point `D` through the spectral decomposition
//! `D = sum_i lambda_i P_i`:
//!
//! ```text
//! K_D(H, K) = sum_ij phi(lambda_i, lambda_j)^-1 Tr P_i H P_j K
//! ```
//!
//! This crate implements the family `phi = M(x, y)^theta` for a catalog of
//! symmetric homogeneous means `M` — arithmetic, geometric, logarithmic,
//! harmonic, root, identric, the Stolarsky interpolation and the
//! logarithmic-to-harmonic alpha family — together with:
//!
//! - closed-form geodesics and distances for the Euclidean and Fisher-Rao
//!   pull-back families, under Hilbert-Schmidt, operator, Schatten and Ky Fan
//!   norms ([`geodesic`]);
//! - curve-length quadrature and a discretized shortest-path search usable as
//!   an independent upper-bound oracle for geodesic distances ([`geodesic`]);
//! - tangent-space splitting, pull-back kernels, monotone (quantum Fisher)
//!   metrics, skew informations and generalized variance ([`metric`]);
//! - multi-matrix means: power means, Karcher fixed-point means and the
//!   three-matrix geometric-mean recursion ([`geodesic`]);
//! - a seeded, machine-checkable verification suite for the comparison and
//!   isometry properties of these metrics ([`verify`]).
//!
//! All numeric code is generic over the scalar type through the [`Real`]
//! trait (`f32` or `f64`); type aliases at the crate root fix the single
//! precision lane, while the unsuffixed types default to `f64`.
//!
//! ```
//! use spdgeo::{closed_form_distance, geodesic_point, random_spd};
//! use spdgeo::{GeodesicFamily, NormSpec};
//!
//! let a = random_spd::<f64>(3, 1, 1.0);
//! let b = random_spd::<f64>(3, 2, 1.0);
//! let mid = geodesic_point(GeodesicFamily::FisherRao, &a, &b, 0.5)?;
//! let d_ab = closed_form_distance(
//!     GeodesicFamily::FisherRao,
//!     &NormSpec::HilbertSchmidt,
//!     &a,
//!     &b,
//! )?;
//! let d_am = closed_form_distance(
//!     GeodesicFamily::FisherRao,
//!     &NormSpec::HilbertSchmidt,
//!     &a,
//!     &mid,
//! )?;
//! // The geodesic midpoint halves the affine-invariant distance.
//! assert!((2.0 * d_am - d_ab).abs() < 1e-10 * d_ab);
//! # Ok::<(), spdgeo::Error>(())
//! ```

// `!(x > y)` rather than `x <= y` throughout validation code: the negated
// form rejects NaN inputs, which is the point of those checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmatrix;
mod error;
pub mod geodesic;
pub mod matcore;
pub mod means;
pub mod metric;
mod quad;
mod real;
pub mod verify;

pub use error::{Error, Result};
pub use real::Real;

pub use cmatrix::ComplexMatrix;
pub use matcore::{
    apply_scalar_function, divided_difference, frechet_derivative, herm_exp, hs_inner, pinch,
    random_commuting_pair, random_hermitian, random_spd, random_unitary, spectral_decompose,
    ui_norm, HermitianMatrix, NormSpec, ScalarFn, SpdMatrix, Spectrum, SplitMix64,
};
pub use means::{
    check_mean_axioms, f_wyd, kernel_eval, loewner_psd, mean_eval, pointwise_dominates,
    ratio_positive_definite, KernelSpec, MeanSpec, StandardFunctionSpec,
};
pub use metric::{
    generalized_variance, kernel_apply, metric_eval, pullback_kernel, skew_information,
    tangent_split, wyd_direct, KernelFn, KernelOperator, PullbackKernel, TangentSplit,
};
pub use geodesic::{
    alm_3mean, closed_form_distance, curve_length, directional_distance_slope, geodesic_point,
    karcher_mean, numeric_shortest_distance, power_mean_multi, Curve, GeodesicFamily,
    PathSearchConfig, ShortestPath,
};
pub use verify::{run_all, run_check, CheckReport, CheckSpec, CATALOG};

/// Single-precision aliases; the unsuffixed names default to `f64`.
pub type HermitianMatrix32 = matcore::HermitianMatrix<f32>;
pub type SpdMatrix32 = matcore::SpdMatrix<f32>;
pub type Spectrum32 = matcore::Spectrum<f32>;
pub type NormSpec32 = matcore::NormSpec<f32>;
pub type MeanSpec32 = means::MeanSpec<f32>;
pub type KernelSpec32 = means::KernelSpec<f32>;
pub type Curve32 = geodesic::Curve<f32>;
