//! Symmetric homogeneous means and the kernel functions built from them.
//!
//! A symmetric homogeneous mean `M(x, y)` is symmetric, degree-1 homogeneous,
//! non-decreasing in both arguments and between min and max. A kernel is a
//! power `phi = M^theta`. Because `M(x, y) = y M(x/y, 1)`, every evaluator
//! reduces to the single-variable ratio form, which this module evaluates in
//! log space with `expm1`/`ln_1p` so the three removable singularities of the
//! Stolarsky family (x = y, theta = 0, theta = 2) cost no precision.

use std::sync::Arc;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::matcore::{
    divided_difference, spectral_decompose, HermitianMatrix, ScalarFn, SplitMix64,
    DEFAULT_CLUSTER_TOL,
};
use crate::real::Real;

/// Relative threshold for the removable-singularity branches of the Stolarsky
/// evaluator (`theta` near 0 or 2, and the theta-family evaluations at
/// `x / y` near 1 share it with the geodesic module).
pub const BRANCH_TOL: f64 = 1e-5;

/// Below this, the alpha family evaluates its logarithmic-mean limit.
pub const ALPHA_LOG_BRANCH: f64 = 1e-6;

/// Relative slack for positive-definiteness verdicts: a Gram or Loewner matrix
/// passes when its smallest eigenvalue is at least `-PD_TOL * max eigenvalue`.
pub const PD_TOL: f64 = 1e-10;

/// Default comparison grid: 64 log-spaced ratio points in `[1e-4, 1e4]`.
pub fn default_grid<T: Real>() -> Vec<T> {
    log_spaced(T::of(1e-4), T::of(1e4), 64)
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_spaced<T: Real>(lo: T, hi: T, count: usize) -> Vec<T> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * T::of_usize(i) / T::of_usize(count - 1)).exp())
        .collect()
}

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// A standard function: operator monotone on `(0, inf)` with `f(1) = 1` and
/// the symmetry `x f(1/x) = f(x)`. These induce monotone (quantum Fisher)
/// metrics through `M(x, y) = y f(x/y)`.
#[derive(Clone)]
pub enum StandardFunctionSpec<T: Real = f64> {
    /// Wigner-Yanase-Dyson family
    /// `f_p(x) = p(1-p)(x-1)^2 / ((x^p-1)(x^{1-p}-1))`, `0 < p < 1`.
    Wyd(T),
    /// Root mean function `((1 + sqrt x)/2)^2` (Wigner-Yanase metric).
    SqrtBinomial,
    /// Logarithmic mean function `(x-1)/log x` (Bogoliubov / Kubo-Mori).
    LogMeanF,
    /// Arithmetic mean function `(1+x)/2` (Bures-Uhlmann).
    ArithF,
    /// Harmonic mean function `2x/(1+x)`.
    HarmF,
    /// User-supplied standard function (programmatic only).
    Custom(Arc<CustomStandardFn<T>>),
}

pub struct CustomStandardFn<T> {
    pub name: String,
    pub f: Box<dyn Fn(T) -> T + Send + Sync>,
}

impl<T: Real> StandardFunctionSpec<T> {
    pub fn wyd(p: T) -> Result<Self> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::Precondition(format!(
                "WYD parameter must lie in (0, 1), got {p}"
            )));
        }
        Ok(StandardFunctionSpec::Wyd(p))
    }

    pub fn name(&self) -> String {
        match self {
            StandardFunctionSpec::Wyd(p) => format!("wyd:{p}"),
            StandardFunctionSpec::SqrtBinomial => "sqrt-binomial".into(),
            StandardFunctionSpec::LogMeanF => "log-mean".into(),
            StandardFunctionSpec::ArithF => "arithmetic".into(),
            StandardFunctionSpec::HarmF => "harmonic".into(),
            StandardFunctionSpec::Custom(c) => c.name.clone(),
        }
    }

    /// Evaluates `f(x)` for `x > 0`.
    pub fn eval(&self, x: T) -> T {
        match self {
            StandardFunctionSpec::Wyd(p) => wyd_ratio(*p, x),
            StandardFunctionSpec::SqrtBinomial => {
                let s = (T::one() + x.sqrt()) * T::of(0.5);
                s * s
            }
            StandardFunctionSpec::LogMeanF => log_mean_ratio(x),
            StandardFunctionSpec::ArithF => (T::one() + x) * T::of(0.5),
            StandardFunctionSpec::HarmF => (x + x) / (T::one() + x),
            StandardFunctionSpec::Custom(c) => (c.f)(x),
        }
    }

    /// `f(0+)`: closed form for the tagged functions, a Richardson-refined
    /// probe at `x = 1e-12` for custom tables (whose limit order is unknown).
    pub fn f_zero(&self) -> T {
        match self {
            StandardFunctionSpec::Wyd(p) => *p * (T::one() - *p),
            StandardFunctionSpec::SqrtBinomial => T::of(0.25),
            StandardFunctionSpec::LogMeanF => T::zero(),
            StandardFunctionSpec::ArithF => T::of(0.5),
            StandardFunctionSpec::HarmF => T::zero(),
            StandardFunctionSpec::Custom(_) => {
                let h = T::of(1e-12);
                let f1 = self.eval(h);
                let f2 = self.eval(h + h);
                (f1 + f1 - f2).max(T::zero())
            }
        }
    }
}

impl<T: Real> std::fmt::Debug for StandardFunctionSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StandardFunctionSpec({})", self.name())
    }
}

/// Tagged description of a symmetric homogeneous mean.
#[derive(Clone, Debug)]
pub enum MeanSpec<T: Real = f64> {
    Arithmetic,
    Geometric,
    Logarithmic,
    Harmonic,
    Root,
    Identric,
    /// The interpolation family of the Euclidean pull-back metrics; degree
    /// `theta` recovers arithmetic (-2), root (1), logarithmic (2), geometric
    /// (4) and identric (0).
    Stolarsky(T),
    /// `N_alpha(x, y) = alpha (xy)^{alpha/2} (x - y)/(x^alpha - y^alpha)` for
    /// `alpha` in `(0, 2]`; interpolates logarithmic (limit 0) to harmonic (2).
    AlphaFamily(T),
    /// Mean induced by a standard operator monotone function: `y f(x/y)`.
    FromOperatorMonotone(StandardFunctionSpec<T>),
}

impl<T: Real> MeanSpec<T> {
    pub fn alpha_family(alpha: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::of(2.0)) {
            return Err(Error::Precondition(format!(
                "alpha family requires alpha in (0, 2], got {alpha}"
            )));
        }
        Ok(MeanSpec::AlphaFamily(alpha))
    }

    pub fn name(&self) -> String {
        match self {
            MeanSpec::Arithmetic => "arithmetic".into(),
            MeanSpec::Geometric => "geometric".into(),
            MeanSpec::Logarithmic => "logarithmic".into(),
            MeanSpec::Harmonic => "harmonic".into(),
            MeanSpec::Root => "root".into(),
            MeanSpec::Identric => "identric".into(),
            MeanSpec::Stolarsky(t) => format!("stolarsky:{t}"),
            MeanSpec::AlphaFamily(a) => format!("alpha:{a}"),
            MeanSpec::FromOperatorMonotone(f) => match f {
                StandardFunctionSpec::Wyd(p) => format!("wyd:{p}"),
                other => format!("f:{}", other.name()),
            },
        }
    }

    /// The single-variable section `x -> M(x, 1)` as a scalar map (with its
    /// closed-form-free derivative), usable in Loewner matrix probes.
    pub fn section(&self) -> ScalarFn<T> {
        let m = self.clone();
        ScalarFn::custom(self.name(), move |x| mean_ratio(&m, x))
    }

    /// `M(x, 1)` for `x > 0`.
    pub fn ratio(&self, x: T) -> T {
        mean_ratio(self, x)
    }
}

/// Kernel function `phi(x, y) = M(x, y)^theta`.
#[derive(Clone, Debug)]
pub struct KernelSpec<T: Real = f64> {
    pub mean: MeanSpec<T>,
    pub theta: T,
}

impl<T: Real> KernelSpec<T> {
    pub fn new(mean: MeanSpec<T>, theta: T) -> Self {
        Self { mean, theta }
    }

    /// The Fisher-Rao kernel `phi(x, y) = xy`.
    pub fn fisher_rao() -> Self {
        Self::new(MeanSpec::Geometric, T::of(2.0))
    }

    /// The Euclidean pull-back kernel of degree `theta`:
    /// `phi_theta = M_theta^theta` (`phi_0` is identically one).
    pub fn pullback_family(theta: T) -> Self {
        Self::new(MeanSpec::Stolarsky(theta), theta)
    }

    /// The Fisher-Rao pull-back kernel `psi_alpha = N_alpha^2`.
    pub fn alpha_family(alpha: T) -> Result<Self> {
        Ok(Self::new(MeanSpec::alpha_family(alpha)?, T::of(2.0)))
    }

    pub fn name(&self) -> String {
        format!("{}^{}", self.mean.name(), self.theta)
    }
}

// ---------------------------------------------------------------------------
// Scalar evaluators (ratio forms)
// ---------------------------------------------------------------------------

/// `expm1(w)/w`, series below 1e-5 where the direct quotient would divide two
/// subnormal-ish quantities.
fn expm1_over<T: Real>(w: T) -> T {
    if w.abs() < T::of(1e-5) {
        let half = T::of(0.5);
        let sixth = T::of(1.0 / 6.0);
        let t24 = T::of(1.0 / 24.0);
        T::one() + w * (half + w * (sixth + w * t24))
    } else {
        w.exp_m1() / w
    }
}

/// Logarithmic mean section `(z - 1)/log z`; exact 1 at z = 1.
fn log_mean_ratio<T: Real>(z: T) -> T {
    let u = z - T::one();
    if u == T::zero() {
        return T::one();
    }
    u / u.ln_1p()
}

/// Identric mean section `exp(z log z / (z - 1) - 1)`; exact 1 at z = 1.
fn identric_ratio<T: Real>(z: T) -> T {
    let u = z - T::one();
    if u == T::zero() {
        return T::one();
    }
    (z * (u.ln_1p() / u) - T::one()).exp()
}

/// Stolarsky mean section `M_theta(z, 1)`.
///
/// Writing `r = (2 - theta)/2` and `L = log z`, the direct branch evaluates
///
/// ```text
/// log M = [log(u / L) - log(expm1(rL) / (rL))] / (1 - r),   u = z - 1,
/// ```
///
/// which is stable across `z -> 1` and `theta -> 2` simultaneously. Near
/// `theta = 0` the quotient is a divided difference of
/// `phi(r) = log((z^r - 1)/r)` between `r` and 1, evaluated by its midpoint
/// derivative with a second-order correction.
fn stolarsky_ratio<T: Real>(theta: T, z: T) -> T {
    let u = z - T::one();
    if u == T::zero() {
        return T::one();
    }
    let l = u.ln_1p();
    let branch = T::of(BRANCH_TOL);
    if theta.abs() <= branch {
        // Identric regime: log M = (phi(1) - phi(1 - eps))/eps with
        // eps = theta/2; midpoint rule with the f''' correction.
        let eps = theta * T::of(0.5);
        let m = T::one() - eps * T::of(0.5);
        let em = (m * l).exp_m1();
        let d1 = l + l / em - m.recip();
        let e = (m * l).exp();
        let two = T::of(2.0);
        let d3 = l * l * l * e * (e + T::one()) / (em * em * em) - two / (m * m * m);
        let log_m = d1 + d3 * eps * eps / T::of(24.0);
        return log_m.exp();
    }
    let r = (T::of(2.0) - theta) * T::of(0.5);
    // log base = log(u/L) - log(expm1(rL)/(rL)); both quotients tend to 1.
    let log_base = (u / l).ln() - expm1_over(r * l).ln();
    (log_base / (T::one() - r)).exp()
}

/// Alpha-family section `N_alpha(z, 1) = alpha z^{alpha/2} (z-1)/(z^alpha - 1)`,
/// logarithmic-mean branch for tiny alpha.
fn alpha_ratio<T: Real>(alpha: T, z: T) -> T {
    if alpha.abs() <= T::of(ALPHA_LOG_BRANCH) {
        return log_mean_ratio(z);
    }
    let u = z - T::one();
    if u == T::zero() {
        return T::one();
    }
    let l = u.ln_1p();
    let half = T::of(0.5);
    // alpha/(z^alpha - 1) = 1/(L expm1(alpha L)/(alpha L))
    (alpha * half * l).exp() * u / (l * expm1_over(alpha * l))
}

/// WYD standard function `f_p(x)`; exact 1 at x = 1.
fn wyd_ratio<T: Real>(p: T, x: T) -> T {
    let u = x - T::one();
    if u == T::zero() {
        return T::one();
    }
    let l = u.ln_1p();
    let q = T::one() - p;
    // p(1-p) u^2 / (expm1(pL) expm1(qL)) with each factor as u / (w expm1/w).
    let a = u / (p * l * expm1_over(p * l));
    let b = u / (q * l * expm1_over(q * l));
    p * q * a * b
}

fn mean_ratio<T: Real>(m: &MeanSpec<T>, z: T) -> T {
    match m {
        MeanSpec::Arithmetic => (z + T::one()) * T::of(0.5),
        MeanSpec::Geometric => z.sqrt(),
        MeanSpec::Logarithmic => log_mean_ratio(z),
        MeanSpec::Harmonic => (z + z) / (z + T::one()),
        MeanSpec::Root => {
            let s = (z.sqrt() + T::one()) * T::of(0.5);
            s * s
        }
        MeanSpec::Identric => identric_ratio(z),
        MeanSpec::Stolarsky(theta) => stolarsky_ratio(*theta, z),
        MeanSpec::AlphaFamily(alpha) => alpha_ratio(*alpha, z),
        MeanSpec::FromOperatorMonotone(f) => f.eval(z),
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Evaluates the mean at `(x, y)`, both positive. Arguments are ordered
/// before the homogeneity reduction, so symmetry holds bitwise.
pub fn mean_eval<T: Real>(m: &MeanSpec<T>, x: T, y: T) -> Result<T> {
    if !(x > T::zero()) || !(y > T::zero()) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Domain(format!(
            "mean arguments must be positive finite, got ({x}, {y})"
        )));
    }
    if x == y {
        return Ok(x);
    }
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    Ok(lo * mean_ratio(m, hi / lo))
}

/// Evaluates `phi(x, y) = M(x, y)^theta`; on the diagonal this is computed as
/// `exp(theta log x)` exactly as specified.
pub fn kernel_eval<T: Real>(k: &KernelSpec<T>, x: T, y: T) -> Result<T> {
    if x == y {
        if !(x > T::zero()) {
            return Err(Error::Domain(format!(
                "kernel arguments must be positive, got ({x}, {y})"
            )));
        }
        return Ok((k.theta * x.ln()).exp());
    }
    Ok(mean_eval(&k.mean, x, y)?.powf(k.theta))
}

/// Wigner-Yanase-Dyson standard function `f_p(x)`.
pub fn f_wyd<T: Real>(p: T, x: T) -> Result<T> {
    if !(p > T::zero() && p < T::one()) {
        return Err(Error::Precondition(format!(
            "WYD parameter must lie in (0, 1), got {p}"
        )));
    }
    if !(x > T::zero()) {
        return Err(Error::Domain(format!("f_p requires x > 0, got {x}")));
    }
    Ok(wyd_ratio(p, x))
}

// ---------------------------------------------------------------------------
// Axiom checking
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeanAxiom {
    Symmetry,
    Homogeneity,
    Monotonicity,
    Betweenness,
}

#[derive(Clone, Debug)]
pub struct AxiomViolation {
    pub axiom: MeanAxiom,
    pub x: f64,
    pub y: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the four mean axioms for an arbitrary two-variable function on
/// `grid x grid`: symmetry, homogeneity against scalings {0.5, 2, 10},
/// monotonicity along the grid order, betweenness.
pub fn check_mean_axioms_fn<T: Real>(f: &dyn Fn(T, T) -> T, grid: &[T]) -> Result<AxiomReport> {
    if grid.is_empty() {
        return Err(Error::Precondition("axiom grid must be nonempty".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    let tol = T::of(1e-10);
    let mut report = AxiomReport::default();
    let mut record = |axiom, x: T, y: T, detail: String| {
        report.violations.push(AxiomViolation {
            axiom,
            x: x.as_f64(),
            y: y.as_f64(),
            detail,
        });
    };
    for &x in &grid {
        for &y in &grid {
            let v = f(x, y);
            let scale = v.abs().max(T::one());
            // (1) symmetry
            let w = f(y, x);
            if (v - w).abs() > tol * scale {
                record(MeanAxiom::Symmetry, x, y, format!("M(x,y)={v} M(y,x)={w}"));
            }
            // (2) homogeneity
            for &alpha in &[T::of(0.5), T::of(2.0), T::of(10.0)] {
                let lhs = f(alpha * x, alpha * y);
                let rhs = alpha * v;
                if (lhs - rhs).abs() > tol * rhs.abs().max(T::one()) {
                    record(
                        MeanAxiom::Homogeneity,
                        x,
                        y,
                        format!("alpha={alpha} M(ax,ay)={lhs} a*M={rhs}"),
                    );
                }
            }
            // (4) betweenness
            let (lo, hi) = (x.min(y), x.max(y));
            if v < lo - tol * scale || v > hi + tol * scale {
                record(MeanAxiom::Betweenness, x, y, format!("M={v} not in [{lo},{hi}]"));
            }
        }
    }
    // (3) monotonicity along the grid order in each argument.
    for w in grid.windows(2) {
        for &y in &grid {
            let (a, b) = (f(w[0], y), f(w[1], y));
            if b < a - tol * a.abs().max(T::one()) {
                record(
                    MeanAxiom::Monotonicity,
                    w[1],
                    y,
                    format!("M decreased from {a} to {b} as x grew"),
                );
            }
        }
    }
    Ok(report)
}

/// Axiom check specialized to a [`MeanSpec`].
pub fn check_mean_axioms<T: Real>(m: &MeanSpec<T>, grid: &[T]) -> Result<AxiomReport> {
    let f = |x: T, y: T| mean_eval(m, x, y).unwrap_or(T::nan());
    check_mean_axioms_fn(&f, grid)
}

// ---------------------------------------------------------------------------
// Pointwise comparison and positive-definiteness probes
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominanceVerdict {
    Equal,
    /// `phi_1 >= phi_2` on the grid.
    Dominates,
    /// `phi_1 <= phi_2` on the grid.
    Dominated,
    Incomparable,
}

/// Compares two kernels pointwise on the homogeneity-reduced grid
/// (`phi_k(x, 1)`), with slack 1e-12 relative.
pub fn pointwise_dominates<T: Real>(
    phi1: &KernelSpec<T>,
    phi2: &KernelSpec<T>,
    grid: &[T],
) -> Result<DominanceVerdict> {
    if grid.is_empty() {
        return Err(Error::Precondition("comparison grid must be nonempty".into()));
    }
    let tol = T::of(1e-12);
    let mut any_above = false;
    let mut any_below = false;
    for &x in grid {
        let v1 = kernel_eval(phi1, x, T::one())?;
        let v2 = kernel_eval(phi2, x, T::one())?;
        let scale = v1.abs().max(v2.abs()).max(T::one());
        if v1 > v2 + tol * scale {
            any_above = true;
        }
        if v1 < v2 - tol * scale {
            any_below = true;
        }
    }
    Ok(match (any_above, any_below) {
        (false, false) => DominanceVerdict::Equal,
        (true, false) => DominanceVerdict::Dominates,
        (false, true) => DominanceVerdict::Dominated,
        (true, true) => DominanceVerdict::Incomparable,
    })
}

/// Verdict of a sampled positive-definiteness test.
#[derive(Clone, Debug)]
pub enum PdVerdict<T: Real = f64> {
    Pass,
    Fail {
        /// Points achieving the violation.
        points: Vec<T>,
        min_eigenvalue: T,
    },
}

impl<T: Real> PdVerdict<T> {
    pub fn passed(&self) -> bool {
        matches!(self, PdVerdict::Pass)
    }
}

/// Eigenvalue check of a real symmetric matrix given row-major entries.
fn psd_min_max<T: Real>(entries: &[T], n: usize) -> Result<(T, T)> {
    let mat = ComplexMatrix::from_fn(n, |i, j| num_complex::Complex::new(entries[i * n + j], T::zero()));
    let spectrum = spectral_decompose(&HermitianMatrix::new(mat)?, T::of(DEFAULT_CLUSTER_TOL))?;
    let min = spectrum.eigenvalues[0];
    let max = *spectrum.eigenvalues.last().expect("nonempty");
    Ok((min, max))
}

/// Sampled necessary-condition probe for positive definiteness of
/// `g(t) = (M1(e^t, 1)/M2(e^t, 1))^r` on the real line: for each seeded trial
/// a Gram matrix `G_ij = g(t_i - t_j)` is built over a subset of the sample
/// points and its eigenvalues are checked. This is a falsifier, not a proof.
pub fn ratio_positive_definite<T: Real>(
    m1: &MeanSpec<T>,
    m2: &MeanSpec<T>,
    r: T,
    sample_points: &[T],
    trials: usize,
    seed: u64,
) -> Result<PdVerdict<T>> {
    if sample_points.is_empty() {
        return Err(Error::Precondition("sample points must be nonempty".into()));
    }
    if !(r > T::zero()) {
        return Err(Error::Precondition("exponent r must be positive".into()));
    }
    let subset_size = sample_points.len().min(8);
    let g = |t: T| -> Result<T> {
        let e = t.exp();
        let v1 = mean_eval(m1, e, T::one())?;
        let v2 = mean_eval(m2, e, T::one())?;
        Ok((v1 / v2).powf(r))
    };
    let mut rng = SplitMix64::new(seed);
    for _ in 0..trials.max(1) {
        // Seeded subset (sampling with replacement would weaken the probe;
        // do a partial Fisher-Yates draw).
        let mut idx: Vec<usize> = (0..sample_points.len()).collect();
        for i in 0..subset_size {
            let j = i + (rng.next_u64() as usize) % (idx.len() - i);
            idx.swap(i, j);
        }
        let pts: Vec<T> = idx[..subset_size].iter().map(|&i| sample_points[i]).collect();
        let k = pts.len();
        let mut gram = vec![T::zero(); k * k];
        for i in 0..k {
            for j in 0..k {
                gram[i * k + j] = g(pts[i] - pts[j])?;
            }
        }
        let (min, max) = psd_min_max(&gram, k)?;
        if min < -T::of(PD_TOL) * max {
            return Ok(PdVerdict::Fail {
                points: pts,
                min_eigenvalue: min,
            });
        }
    }
    Ok(PdVerdict::Pass)
}

/// Loewner matrix probe: builds `L_ij = f^[1](x_i, x_j)` over the given
/// points and reports the PSD verdict. Positivity of every Loewner matrix is
/// necessary for operator monotonicity of `f`.
pub fn loewner_psd<T: Real>(f: &ScalarFn<T>, points: &[T]) -> Result<PdVerdict<T>> {
    if points.len() < 2 {
        return Err(Error::Precondition(
            "Loewner probe needs at least two points".into(),
        ));
    }
    for w in points.windows(2) {
        if w[0] == w[1] {
            return Err(Error::Precondition("Loewner points must be distinct".into()));
        }
    }
    let n = points.len();
    let mut l = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = divided_difference(f, points[i], points[j])?;
            l[i * n + j] = v;
            l[j * n + i] = v;
        }
    }
    let (min, max) = psd_min_max(&l, n)?;
    if min < -T::of(PD_TOL) * max.max(T::min_positive_value()) {
        Ok(PdVerdict::Fail {
            points: points.to_vec(),
            min_eigenvalue: min,
        })
    } else {
        Ok(PdVerdict::Pass)
    }
}

// ---------------------------------------------------------------------------
// Compact string grammar: MEAN[:param]^THETA
// ---------------------------------------------------------------------------

/// Parses a mean tag: `arithmetic | geometric | logarithmic | harmonic | root
/// | identric | stolarsky:<v> | alpha:<v> | wyd:<p>`.
pub fn parse_mean<T: Real>(s: &str) -> Result<MeanSpec<T>> {
    let (tag, param) = match s.split_once(':') {
        Some((t, p)) => (t, Some(p)),
        None => (s, None),
    };
    let need = |p: Option<&str>| -> Result<T> {
        let raw = p.ok_or_else(|| Error::Parse(format!("mean `{tag}` requires a parameter")))?;
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Parse(format!("invalid mean parameter `{raw}`")))?;
        Ok(T::of(v))
    };
    let none = |p: Option<&str>, m: MeanSpec<T>| -> Result<MeanSpec<T>> {
        if p.is_some() {
            return Err(Error::Parse(format!("mean `{tag}` takes no parameter")));
        }
        Ok(m)
    };
    match tag {
        "arithmetic" => none(param, MeanSpec::Arithmetic),
        "geometric" => none(param, MeanSpec::Geometric),
        "logarithmic" => none(param, MeanSpec::Logarithmic),
        "harmonic" => none(param, MeanSpec::Harmonic),
        "root" => none(param, MeanSpec::Root),
        "identric" => none(param, MeanSpec::Identric),
        "stolarsky" => Ok(MeanSpec::Stolarsky(need(param)?)),
        "alpha" => MeanSpec::alpha_family(need(param)?),
        "wyd" => Ok(MeanSpec::FromOperatorMonotone(StandardFunctionSpec::wyd(
            need(param)?,
        )?)),
        other => Err(Error::Parse(format!("unknown mean `{other}`"))),
    }
}

/// Formats a mean tag; round-trips bit-exactly through [`parse_mean`].
pub fn format_mean<T: Real>(m: &MeanSpec<T>) -> Result<String> {
    match m {
        MeanSpec::FromOperatorMonotone(StandardFunctionSpec::Wyd(_)) | MeanSpec::Arithmetic
        | MeanSpec::Geometric
        | MeanSpec::Logarithmic
        | MeanSpec::Harmonic
        | MeanSpec::Root
        | MeanSpec::Identric
        | MeanSpec::Stolarsky(_)
        | MeanSpec::AlphaFamily(_) => Ok(m.name()),
        MeanSpec::FromOperatorMonotone(_) => Err(Error::Parse(
            "only wyd standard functions have a string form".into(),
        )),
    }
}

/// Parses `MEAN[:param]^THETA`, e.g. `stolarsky:3.5^1`, `geometric^2`.
pub fn parse_kernel<T: Real>(s: &str) -> Result<KernelSpec<T>> {
    let (mean_part, theta_part) = s
        .rsplit_once('^')
        .ok_or_else(|| Error::Parse(format!("kernel `{s}` must have the form MEAN[:param]^THETA")))?;
    let theta: f64 = theta_part
        .parse()
        .map_err(|_| Error::Parse(format!("invalid kernel degree `{theta_part}`")))?;
    Ok(KernelSpec::new(parse_mean(mean_part)?, T::of(theta)))
}

/// Formats `MEAN[:param]^THETA`; round-trips bit-exactly.
pub fn format_kernel<T: Real>(k: &KernelSpec<T>) -> Result<String> {
    Ok(format!("{}^{}", format_mean(&k.mean)?, k.theta))
}
