//! Geodesics, curve lengths, geodesic-distance oracles and multi-matrix
//! means.
//!
//! Two families admit closed forms: the Euclidean pull-backs (`Theta`), where
//! the power map straightens geodesics into segments, and the Fisher-Rao
//! pull-backs (`Alpha`), whose geodesics are powers of the affine-invariant
//! geodesic. Everything else is reached numerically: composite Gauss-Legendre
//! curve lengths and a discretized descent that upper-bounds the geodesic
//! distance.

use crate::error::{Error, Result};
use crate::matcore::{
    self, herm_exp, random_hermitian, spectral_decompose, ui_norm, HermitianMatrix, NormSpec,
    ScalarFn, SpdMatrix, SplitMix64, DEFAULT_CLUSTER_TOL,
};
use crate::means::BRANCH_TOL;
use crate::metric::{KernelFn, KernelOperator};
use crate::quad::gauss_legendre_01;
use crate::real::Real;

/// Default Gauss-Legendre points for a closed-form curve.
pub const DEFAULT_QUAD_CLOSED: usize = 64;
/// Default Gauss-Legendre points per polyline segment.
pub const DEFAULT_QUAD_SEGMENT: usize = 8;

// ---------------------------------------------------------------------------
// Families and curves
// ---------------------------------------------------------------------------

/// Geodesic families with closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeodesicFamily<T: Real = f64> {
    /// Euclidean pull-back of degree `theta`:
    /// `((1-t) A^{(2-theta)/2} + t B^{(2-theta)/2})^{2/(2-theta)}`, with the
    /// log-Euclidean branch at `theta = 2` and the linear branch at 0.
    Theta(T),
    /// Fisher-Rao pull-back, `alpha` in `(0, 2]`:
    /// `(A^alpha #_t B^alpha)^{1/alpha}`.
    Alpha(T),
    /// Affine-invariant geodesic `A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}`,
    /// identical to `Alpha(1)`.
    FisherRao,
    /// `((1-t) A^{1/2} + t B^{1/2})^2`: the common shortest curve of the
    /// operator monotone degree-1 metrics on commuting endpoints.
    CommutingSqrt,
}

/// A parametrized path `[0, 1] -> SPD`, either closed form or a polyline.
#[derive(Clone, Debug)]
pub enum Curve<T: Real = f64> {
    ClosedForm {
        family: GeodesicFamily<T>,
        a: SpdMatrix<T>,
        b: SpdMatrix<T>,
    },
    Polyline {
        nodes: Vec<SpdMatrix<T>>,
        params: Vec<T>,
    },
}

impl<T: Real> Curve<T> {
    pub fn closed_form(family: GeodesicFamily<T>, a: SpdMatrix<T>, b: SpdMatrix<T>) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch(a.dim(), b.dim()));
        }
        validate_family(&family)?;
        Ok(Curve::ClosedForm { family, a, b })
    }

    /// Polyline through SPD nodes at strictly increasing parameters
    /// `0 = t_0 < ... < t_m = 1`.
    pub fn polyline(nodes: Vec<SpdMatrix<T>>, params: Vec<T>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Precondition("polyline needs at least two nodes".into()));
        }
        if nodes.len() != params.len() {
            return Err(Error::DimensionMismatch(nodes.len(), params.len()));
        }
        if params[0] != T::zero() || *params.last().unwrap() != T::one() {
            return Err(Error::Precondition("polyline parameters must start at 0 and end at 1".into()));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("polyline parameters must be strictly increasing".into()));
        }
        let n = nodes[0].dim();
        if nodes.iter().any(|m| m.dim() != n) {
            return Err(Error::Precondition("polyline nodes must share a dimension".into()));
        }
        Ok(Curve::Polyline { nodes, params })
    }

    /// Equally spaced polyline.
    pub fn polyline_uniform(nodes: Vec<SpdMatrix<T>>) -> Result<Self> {
        let m = nodes.len();
        if m < 2 {
            return Err(Error::Precondition("polyline needs at least two nodes".into()));
        }
        let params = (0..m)
            .map(|i| T::of_usize(i) / T::of_usize(m - 1))
            .collect();
        Self::polyline(nodes, params)
    }

    /// Natural quadrature panel boundaries (segment breakpoints for
    /// polylines, the whole interval otherwise).
    pub fn panels(&self) -> Vec<T> {
        match self {
            Curve::ClosedForm { .. } => vec![T::zero(), T::one()],
            Curve::Polyline { params, .. } => params.clone(),
        }
    }

    pub fn prepare(&self) -> Result<PreparedCurve<'_, T>> {
        PreparedCurve::new(self)
    }
}

fn validate_family<T: Real>(family: &GeodesicFamily<T>) -> Result<()> {
    if let GeodesicFamily::Alpha(alpha) = family {
        if !(*alpha > T::zero() && *alpha <= T::of(2.0)) {
            return Err(Error::Precondition(format!(
                "alpha family requires alpha in (0, 2], got {alpha}"
            )));
        }
    }
    Ok(())
}

/// Point and velocity of a parametrized SPD path.
pub trait ParamCurve<T: Real> {
    fn eval(&self, t: T) -> Result<(SpdMatrix<T>, HermitianMatrix<T>)>;

    fn point(&self, t: T) -> Result<SpdMatrix<T>> {
        Ok(self.eval(t)?.0)
    }
}

/// A closed-form curve with its endpoint transforms precomputed, or a
/// borrowed polyline.
pub enum PreparedCurve<'a, T: Real> {
    ThetaLinear {
        a: SpdMatrix<T>,
        diff: HermitianMatrix<T>,
    },
    ThetaLog {
        log_a: HermitianMatrix<T>,
        diff: HermitianMatrix<T>,
    },
    ThetaPow {
        ar: HermitianMatrix<T>,
        diff: HermitianMatrix<T>,
        back: T,
    },
    AlphaFam {
        a_half: SpdMatrix<T>,
        mid: SpdMatrix<T>,
        alpha: T,
    },
    CommutingSqrt {
        sa: SpdMatrix<T>,
        diff: HermitianMatrix<T>,
    },
    Polyline {
        nodes: &'a [SpdMatrix<T>],
        params: &'a [T],
    },
}

impl<'a, T: Real> PreparedCurve<'a, T> {
    fn new(curve: &'a Curve<T>) -> Result<Self> {
        match curve {
            Curve::Polyline { nodes, params } => Ok(PreparedCurve::Polyline { nodes, params }),
            Curve::ClosedForm { family, a, b } => {
                validate_family(family)?;
                if a.dim() != b.dim() {
                    return Err(Error::DimensionMismatch(a.dim(), b.dim()));
                }
                match family {
                    GeodesicFamily::Theta(theta) => {
                        if theta.abs() <= T::of(BRANCH_TOL) {
                            Ok(PreparedCurve::ThetaLinear {
                                a: a.clone(),
                                diff: b.herm().sub(a.herm()),
                            })
                        } else if (*theta - T::of(2.0)).abs() <= T::of(BRANCH_TOL) {
                            let la = a.log();
                            let lb = b.log();
                            Ok(PreparedCurve::ThetaLog {
                                diff: lb.sub(&la),
                                log_a: la,
                            })
                        } else {
                            let r = (T::of(2.0) - *theta) * T::of(0.5);
                            let ar = a.pow(r);
                            let br = b.pow(r);
                            Ok(PreparedCurve::ThetaPow {
                                diff: br.herm().sub(ar.herm()),
                                ar: ar.herm().clone(),
                                back: r.recip(),
                            })
                        }
                    }
                    GeodesicFamily::Alpha(alpha) => prepare_alpha(a, b, *alpha),
                    GeodesicFamily::FisherRao => prepare_alpha(a, b, T::one()),
                    GeodesicFamily::CommutingSqrt => {
                        let sa = a.sqrt();
                        let sb = b.sqrt();
                        Ok(PreparedCurve::CommutingSqrt {
                            diff: sb.herm().sub(sa.herm()),
                            sa,
                        })
                    }
                }
            }
        }
    }
}

fn prepare_alpha<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>, alpha: T) -> Result<PreparedCurve<'static, T>> {
    let half = T::of(0.5);
    let a_half = a.pow(alpha * half);
    let a_neg_half = a.pow(-alpha * half);
    let b_alpha = a_neg_half.mat().mul(b.pow(alpha).mat()).mul(a_neg_half.mat());
    let mid = SpdMatrix::new(HermitianMatrix::trusted(b_alpha))?;
    Ok(PreparedCurve::AlphaFam { a_half, mid, alpha })
}

impl<T: Real> ParamCurve<T> for PreparedCurve<'_, T> {
    fn eval(&self, t: T) -> Result<(SpdMatrix<T>, HermitianMatrix<T>)> {
        if !(t >= T::zero() && t <= T::one()) {
            return Err(Error::Domain(format!("curve parameter {t} outside [0, 1]")));
        }
        match self {
            PreparedCurve::ThetaLinear { a, diff } => {
                let p = a.add_herm(&diff.scale(t))?;
                Ok((p, diff.clone()))
            }
            PreparedCurve::ThetaLog { log_a, diff } => {
                let xi = log_a.add(&diff.scale(t));
                let s = spectral_decompose(&xi, T::of(DEFAULT_CLUSTER_TOL))?;
                let eigs: Vec<T> = s.eigenvalues.iter().map(|&l| l.exp()).collect();
                let p = SpdMatrix::from_eigenpairs(s.frame.clone(), eigs)?;
                let v = matcore::frechet_on_spectrum(&ScalarFn::Exp, &s, diff)?;
                Ok((p, v))
            }
            PreparedCurve::ThetaPow { ar, diff, back } => {
                let xi = SpdMatrix::new(ar.add(&diff.scale(t)))?;
                let p = xi.pow(*back);
                let v = matcore::frechet_on_spectrum(&ScalarFn::Power(*back), xi.spectrum(), diff)?;
                Ok((p, v))
            }
            PreparedCurve::AlphaFam { a_half, mid, alpha } => {
                let sc = mid.spectrum();
                let ct = sc.apply(|l| l.powf(t));
                let ct_log = sc.apply(|l| l.powf(t) * l.ln());
                let w = HermitianMatrix::trusted(a_half.mat().mul(ct.mat()).mul(a_half.mat()));
                let w_spd = SpdMatrix::new(w)?;
                let w_dot =
                    HermitianMatrix::trusted(a_half.mat().mul(ct_log.mat()).mul(a_half.mat()));
                if *alpha == T::one() {
                    return Ok((w_spd, w_dot));
                }
                let back = alpha.recip();
                let p = w_spd.pow(back);
                let v = matcore::frechet_on_spectrum(&ScalarFn::Power(back), w_spd.spectrum(), &w_dot)?;
                Ok((p, v))
            }
            PreparedCurve::CommutingSqrt { sa, diff } => {
                let s = sa.add_herm(&diff.scale(t))?;
                let p = s.pow(T::of(2.0));
                let sm = s.mat();
                let v = HermitianMatrix::trusted(diff.mat().mul(sm).add(&sm.mul(diff.mat())));
                Ok((p, v))
            }
            PreparedCurve::Polyline { nodes, params } => {
                // Segment lookup; the parametrization is piecewise linear with
                // an exact constant derivative per segment.
                let m = nodes.len() - 1;
                let mut seg = m - 1;
                for i in 0..m {
                    if t <= params[i + 1] {
                        seg = i;
                        break;
                    }
                }
                let dt = params[seg + 1] - params[seg];
                let u = (t - params[seg]) / dt;
                let x = nodes[seg].herm();
                let y = nodes[seg + 1].herm();
                let p_herm = x.scale(T::one() - u).add(&y.scale(u));
                let p = SpdMatrix::new(p_herm).map_err(|_| {
                    Error::Domain(format!("polyline point at t = {t} is not positive definite"))
                })?;
                let v = y.sub(x).scale(dt.recip());
                Ok((p, v))
            }
        }
    }
}

impl<T: Real> ParamCurve<T> for Curve<T> {
    fn eval(&self, t: T) -> Result<(SpdMatrix<T>, HermitianMatrix<T>)> {
        self.prepare()?.eval(t)
    }
}

/// Reflection `t -> gamma(t)^{-1}` of a curve.
pub struct InverseCurve<'a, T: Real, C: ParamCurve<T>> {
    pub inner: &'a C,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Real, C: ParamCurve<T>> InverseCurve<'a, T, C> {
    pub fn new(inner: &'a C) -> Self {
        Self {
            inner,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<T: Real, C: ParamCurve<T>> ParamCurve<T> for InverseCurve<'_, T, C> {
    fn eval(&self, t: T) -> Result<(SpdMatrix<T>, HermitianMatrix<T>)> {
        let (p, v) = self.inner.eval(t)?;
        let inv = p.inverse();
        // d/dt P^{-1} = -P^{-1} P' P^{-1}
        let w = inv.mat().mul(v.mat()).mul(inv.mat());
        Ok((inv, HermitianMatrix::trusted(w).scale(-T::one())))
    }
}

/// Power-map image `t -> c * gamma(t)^e` of a curve.
pub struct PowerMapCurve<'a, T: Real, C: ParamCurve<T>> {
    pub inner: &'a C,
    pub exponent: T,
    pub scale: T,
    _marker: std::marker::PhantomData<T>,
}

impl<'a, T: Real, C: ParamCurve<T>> PowerMapCurve<'a, T, C> {
    pub fn new(inner: &'a C, exponent: T, scale: T) -> Self {
        Self {
            inner,
            exponent,
            scale,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<T: Real, C: ParamCurve<T>> ParamCurve<T> for PowerMapCurve<'_, T, C> {
    fn eval(&self, t: T) -> Result<(SpdMatrix<T>, HermitianMatrix<T>)> {
        let (p, v) = self.inner.eval(t)?;
        let mapped = p.pow(self.exponent);
        let d = matcore::frechet_on_spectrum(&ScalarFn::Power(self.exponent), p.spectrum(), &v)?;
        let scaled = SpdMatrix::from_eigenpairs(
            mapped.spectrum().frame.clone(),
            mapped
                .spectrum()
                .eigenvalues
                .iter()
                .map(|&l| l * self.scale)
                .collect(),
        )?;
        Ok((scaled, d.scale(self.scale)))
    }
}

// ---------------------------------------------------------------------------
// Geodesic points and closed-form distances
// ---------------------------------------------------------------------------

/// Point of the closed-form geodesic at parameter `t` in `[0, 1]`.
pub fn geodesic_point<T: Real>(
    family: GeodesicFamily<T>,
    a: &SpdMatrix<T>,
    b: &SpdMatrix<T>,
    t: T,
) -> Result<SpdMatrix<T>> {
    let curve = Curve::closed_form(family, a.clone(), b.clone())?;
    curve.prepare()?.point(t)
}

/// Closed-form geodesic distance of the family under a unitarily invariant
/// norm. For `Theta(theta)` this is `(2/|2-theta|) |||A^r - B^r|||` with
/// `r = (2-theta)/2` (log branch at `theta = 2`); for `Alpha(alpha)` it is
/// `(1/alpha) |||log(A^{-alpha/2} B^alpha A^{-alpha/2})|||`.
pub fn closed_form_distance<T: Real>(
    family: GeodesicFamily<T>,
    norm: &NormSpec<T>,
    a: &SpdMatrix<T>,
    b: &SpdMatrix<T>,
) -> Result<T> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    validate_family(&family)?;
    match family {
        GeodesicFamily::Theta(theta) => {
            if (theta - T::of(2.0)).abs() <= T::of(BRANCH_TOL) {
                ui_norm(&a.log().sub(&b.log()), norm)
            } else {
                let r = (T::of(2.0) - theta) * T::of(0.5);
                let d = a.pow(r).herm().sub(b.pow(r).herm());
                Ok(T::of(2.0) / (T::of(2.0) - theta).abs() * ui_norm(&d, norm)?)
            }
        }
        GeodesicFamily::Alpha(alpha) => alpha_distance(alpha, norm, a, b),
        GeodesicFamily::FisherRao => alpha_distance(T::one(), norm, a, b),
        GeodesicFamily::CommutingSqrt => {
            let d = a.sqrt().herm().sub(b.sqrt().herm());
            Ok(T::of(2.0) * ui_norm(&d, norm)?)
        }
    }
}

fn alpha_distance<T: Real>(alpha: T, norm: &NormSpec<T>, a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<T> {
    let half = T::of(0.5);
    let an = a.pow(-alpha * half);
    let m = an.mat().mul(b.pow(alpha).mat()).mul(an.mat());
    let inner = SpdMatrix::new(HermitianMatrix::trusted(m))?;
    Ok(ui_norm(&inner.log(), norm)? / alpha)
}

// ---------------------------------------------------------------------------
// Curve length
// ---------------------------------------------------------------------------

/// Length of a curve under the kernel metric and the given norm:
/// composite Gauss-Legendre quadrature of
/// `||| phi(L, R)^{-1/2} gamma'(t) |||`. For polylines `quadrature_points`
/// counts per segment, for closed forms in total.
pub fn curve_length<T: Real>(
    phi: &dyn KernelFn<T>,
    curve: &Curve<T>,
    norm: &NormSpec<T>,
    quadrature_points: usize,
) -> Result<T> {
    let prepared = curve.prepare()?;
    curve_length_param(phi, &prepared, norm, quadrature_points, &curve.panels())
}

/// Length of any parametrized curve over explicit quadrature panels
/// (`panels` must be an increasing sequence from 0 to 1; `points` Gauss-
/// Legendre nodes are used per panel).
pub fn curve_length_param<T: Real, C: ParamCurve<T>>(
    phi: &dyn KernelFn<T>,
    curve: &C,
    norm: &NormSpec<T>,
    points: usize,
    panels: &[T],
) -> Result<T> {
    if panels.len() < 2 {
        return Err(Error::Precondition("need at least one quadrature panel".into()));
    }
    let rule = gauss_legendre_01::<T>(points.max(1));
    let mut total = T::zero();
    for w in panels.windows(2) {
        let width = w[1] - w[0];
        for &(x, wt) in &rule {
            let t = w[0] + width * x;
            let (p, v) = curve.eval(t)?;
            let op = KernelOperator::from_spectrum(phi, p.spectrum().clone())?;
            total += wt * width * op.speed(&v, norm)?;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Numeric shortest-path oracle
// ---------------------------------------------------------------------------

/// Discretized shortest-path search configuration.
#[derive(Clone, Debug)]
pub struct PathSearchConfig<T: Real = f64> {
    /// Initial segment count of the polyline (refinement may double it twice).
    pub segments: usize,
    /// Total optimizer sweep budget across refinement levels.
    pub max_iterations: usize,
    /// The search stops when the trust radius falls below
    /// `step_tol * node scale`.
    pub step_tol: T,
    pub quadrature_points_per_segment: usize,
    pub seed: u64,
}

impl<T: Real> Default for PathSearchConfig<T> {
    fn default() -> Self {
        Self {
            segments: 16,
            max_iterations: 500,
            step_tol: T::of(1e-10),
            quadrature_points_per_segment: 8,
            seed: 7,
        }
    }
}

/// Result of the shortest-path search: an upper bound on the geodesic
/// distance and the realizing polyline.
#[derive(Clone, Debug)]
pub struct ShortestPath<T: Real = f64> {
    pub distance: T,
    pub path: Curve<T>,
    pub converged: bool,
    pub iterations: usize,
}

/// Upper-bound oracle for the geodesic distance `delta_phi(A, B)`.
///
/// A polyline seeded on the log-Euclidean (`Theta(2)`) geodesic is relaxed by
/// coordinate-wise node descent on the discrete path energy
/// `sum_i int K(V_i, V_i) du` (whose minimizers are constant-speed length
/// minimizers, so the descent sees no flat reparametrization modes). Per
/// interior node the candidate directions are the surrogate metric-midpoint
/// move, the chord-midpoint smoothing move, and a rotating subset of a
/// seeded orthonormal Hermitian basis, each with a parabolic line search and
/// projection back onto the SPD cone. The search
/// runs coarse-to-fine, starting at four segments and doubling up to four
/// times the configured resolution. The reported distance is the running
/// minimum of the polyline length, hence non-increasing across iterations,
/// always an upper bound for the infimum, and deterministic in `cfg.seed`.
pub fn numeric_shortest_distance<T: Real>(
    phi: &dyn KernelFn<T>,
    a: &SpdMatrix<T>,
    b: &SpdMatrix<T>,
    cfg: &PathSearchConfig<T>,
) -> Result<ShortestPath<T>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    if cfg.segments < 2 {
        return Err(Error::Precondition("need at least two segments".into()));
    }
    let n = a.dim();
    let rule = gauss_legendre_01::<T>(cfg.quadrature_points_per_segment.max(2));
    // Energies steering the search need less resolution than the reported
    // length; half the rule is accurate to ~1e-8 on these smooth segments.
    let search_rule = gauss_legendre_01::<T>((cfg.quadrature_points_per_segment / 2).max(3));

    // Seed nodes on the theta = 2 closed-form geodesic, at the coarsest level.
    let init = Curve::closed_form(GeodesicFamily::Theta(T::of(2.0)), a.clone(), b.clone())?;
    let prepared = init.prepare()?;
    let mut m = cfg.segments.clamp(2, 4);
    let mut nodes: Vec<HermitianMatrix<T>> = Vec::with_capacity(m + 1);
    for i in 0..=m {
        let t = T::of_usize(i) / T::of_usize(m);
        nodes.push(prepared.point(t)?.herm().clone());
    }
    let final_segments = cfg.segments * 4;

    let basis = hermitian_basis(n, cfg.seed);
    let mut seg_en: Vec<T> = Vec::with_capacity(m);
    for i in 0..m {
        seg_en.push(segment_quadrature(phi, &nodes[i], &nodes[i + 1], &search_rule, true)?);
    }

    let path_length = |nodes: &[HermitianMatrix<T>]| -> Result<T> {
        let mut len = T::zero();
        for i in 0..nodes.len() - 1 {
            len += segment_quadrature(phi, &nodes[i], &nodes[i + 1], &rule, false)?;
        }
        Ok(len)
    };

    let scale = (a.herm().hs_norm() + b.herm().hs_norm()) * T::of(0.5);
    let mut iterations = 0usize;
    let mut converged = false;
    // Per-node trust radii: step scales differ wildly between nodes near
    // convergence, so each node adapts its own.
    let r_init = T::of(0.05) * scale;
    let mut radii = vec![r_init; nodes.len()];
    // A level stops when the energy gained over a window of sweeps falls
    // below the level's own discretization scale (the chord error is
    // O(1/m^2), so polishing a coarse level further is wasted work), when a
    // level exhausts its sweep allowance, or when every trust radius
    // collapses.
    let window = 4usize;
    let level_tol = |m: usize| -> T { (T::of(1e-3) / T::of_usize(m * m)).max(T::of(1e-8)) };
    let level_cap = 120usize;
    let mut level_sweeps = 0usize;
    let mut window_start = T::infinity();
    let mut sweeps_in_window = 0usize;
    let mut best_len = path_length(&nodes)?;
    let mut best_nodes = nodes.clone();

    while iterations < cfg.max_iterations {
        let mut moved_any = false;
        for i in 1..nodes.len() - 1 {
            let mut local = seg_en[i - 1] + seg_en[i];
            let margin = T::epsilon() * T::of(16.0) * local.max(T::one());
            // Structured moves first: toward the surrogate metric midpoint
            // of the neighbors, then the chord midpoint; a rotating subset of
            // the seeded basis supplies the remaining directions.
            let mut dirs: Vec<HermitianMatrix<T>> = Vec::with_capacity(2 + basis.len());
            if let Some(mid) = surrogate_midpoint(phi, &nodes[i - 1], &nodes[i + 1])? {
                let d = mid.sub(&nodes[i]);
                let norm = d.hs_norm();
                if norm > T::epsilon() * scale {
                    dirs.push(d.scale(norm.recip()));
                }
            }
            let smooth = nodes[i - 1]
                .add(&nodes[i + 1])
                .scale(T::of(0.5))
                .sub(&nodes[i]);
            let smooth_norm = smooth.hs_norm();
            if smooth_norm > T::epsilon() * scale {
                dirs.push(smooth.scale(smooth_norm.recip()));
            }
            let take = basis.len().min(3);
            for k in 0..take {
                dirs.push(basis[(iterations * take + k + i) % basis.len()].clone());
            }
            let mut node_improved = false;
            let mut biggest_step = T::zero();
            for dir in &dirs {
                if let Some((cand, e1, e2, step)) = line_minimize(
                    phi,
                    &nodes[i - 1],
                    &nodes[i],
                    &nodes[i + 1],
                    dir,
                    radii[i],
                    local,
                    margin,
                    &search_rule,
                    scale,
                )? {
                    nodes[i] = cand;
                    seg_en[i - 1] = e1;
                    seg_en[i] = e2;
                    local = e1 + e2;
                    node_improved = true;
                    moved_any = true;
                    biggest_step = biggest_step.max(step.abs());
                }
            }
            if node_improved {
                // Track the scale that actually worked.
                radii[i] = (biggest_step * T::of(2.0))
                    .max(radii[i] * T::of(0.5))
                    .min(T::of(0.25) * scale);
            } else {
                radii[i] *= T::of(0.25);
            }
        }
        iterations += 1;
        let energy_after = seg_en.iter().fold(T::zero(), |acc, &v| acc + v);
        if moved_any {
            let len_after = path_length(&nodes)?;
            if len_after < best_len {
                best_len = len_after;
                best_nodes = nodes.clone();
            }
        }
        if std::env::var_os("SPDGEO_TRACE").is_some() {
            eprintln!(
                "m={m} iter={iterations} energy={:.9e} moved={moved_any}",
                energy_after.as_f64()
            );
        }
        sweeps_in_window += 1;
        level_sweeps += 1;
        let mut window_stalled = false;
        if window_start.is_infinite() {
            window_start = energy_after;
            sweeps_in_window = 0;
        } else if sweeps_in_window >= window {
            window_stalled = window_start - energy_after
                <= level_tol(m) * energy_after.max(T::min_positive_value());
            window_start = energy_after;
            sweeps_in_window = 0;
        }
        let radii_collapsed = nodes.len() <= 2
            || radii[1..nodes.len() - 1]
                .iter()
                .all(|&r| r < cfg.step_tol * scale);
        let level_done = radii_collapsed || window_stalled || level_sweeps >= level_cap;
        if level_done {
            if m < final_segments && iterations < cfg.max_iterations {
                // Chord midpoints leave the path (and its length) unchanged;
                // the finer grid lets the descent bend closer to the geodesic.
                let mut finer = Vec::with_capacity(nodes.len() * 2 - 1);
                for i in 0..nodes.len() - 1 {
                    finer.push(nodes[i].clone());
                    finer.push(nodes[i].add(&nodes[i + 1]).scale(T::of(0.5)));
                }
                finer.push(nodes.last().unwrap().clone());
                nodes = finer;
                m *= 2;
                seg_en = Vec::with_capacity(m);
                for i in 0..m {
                    seg_en.push(segment_quadrature(
                        phi,
                        &nodes[i],
                        &nodes[i + 1],
                        &search_rule,
                        true,
                    )?);
                }
                radii = vec![T::of(0.01) * scale; nodes.len()];
                window_start = T::infinity();
                sweeps_in_window = 0;
                level_sweeps = 0;
                continue;
            }
            converged = true;
            break;
        }
    }

    let spd_nodes: Result<Vec<SpdMatrix<T>>> =
        best_nodes.into_iter().map(SpdMatrix::new).collect();
    let path = Curve::polyline_uniform(spd_nodes?)?;
    Ok(ShortestPath {
        distance: best_len,
        path,
        converged,
        iterations,
    })
}

/// Midpoint of the Theta-family geodesic matching the kernel's local degree
/// `theta = log2 phi(2z, 2z)/phi(z, z)`: the exact local optimum for the
/// pull-back kernels and a strong descent move for every other kernel.
fn surrogate_midpoint<T: Real>(
    phi: &dyn KernelFn<T>,
    x: &HermitianMatrix<T>,
    y: &HermitianMatrix<T>,
) -> Result<Option<HermitianMatrix<T>>> {
    let n = x.dim();
    let mut tr = T::zero();
    for i in 0..n {
        tr += x.entry(i, i).re + y.entry(i, i).re;
    }
    let z = (tr / T::of_usize(2 * n)).max(T::of(1e-6));
    let theta = (phi.eval(z + z, z + z)? / phi.eval(z, z)?).ln() / T::of(2.0).ln();
    if theta.abs() < T::of(0.01) {
        return Ok(None); // chord midpoint; already covered by smoothing
    }
    let xs = SpdMatrix::new(x.clone());
    let ys = SpdMatrix::new(y.clone());
    let (xs, ys) = match (xs, ys) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Ok(None),
    };
    if (theta - T::of(2.0)).abs() < T::of(0.01) {
        let mid = xs.log().add(&ys.log()).scale(T::of(0.5));
        return Ok(Some(herm_exp(&mid)?.herm().clone()));
    }
    let r = (T::of(2.0) - theta) * T::of(0.5);
    let mid = xs.pow(r).herm().add(ys.pow(r).herm()).scale(T::of(0.5));
    match SpdMatrix::new(mid) {
        Ok(m) => Ok(Some(m.pow(r.recip()).herm().clone())),
        Err(_) => Ok(None),
    }
}

/// One-dimensional minimization of the local energy
/// `en(prev, P) + en(P, next)` along `P = node + s * dir`.
///
/// Evaluates both signs at the trust radius; if one improves, doubles the
/// step while it keeps improving and finishes with a parabolic refinement of
/// the bracket. If neither improves, falls back to the interior parabolic
/// minimizer and then retries at successively smaller radii. Returns the
/// accepted candidate with its two segment energies and the step taken, or
/// `None` when nothing beats `local - margin`.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn line_minimize<T: Real>(
    phi: &dyn KernelFn<T>,
    prev: &HermitianMatrix<T>,
    node: &HermitianMatrix<T>,
    next: &HermitianMatrix<T>,
    dir: &HermitianMatrix<T>,
    radius: T,
    local: T,
    margin: T,
    rule: &[(T, T)],
    scale: T,
) -> Result<Option<(HermitianMatrix<T>, T, T, T)>> {
    let eval = |s: T| -> Result<(HermitianMatrix<T>, T, T)> {
        let cand = spd_floor(&node.add(&dir.scale(s)))?;
        let e1 = segment_quadrature(phi, prev, &cand, rule, true)?;
        let e2 = segment_quadrature(phi, &cand, next, rule, true)?;
        Ok((cand, e1, e2))
    };
    let floor = T::epsilon() * T::of(64.0) * scale;
    let mut r = radius.max(floor);
    for _attempt in 0..2 {
        let plus = eval(r)?;
        let minus = eval(-r)?;
        let f_plus = plus.1 + plus.2;
        let f_minus = minus.1 + minus.2;

        if f_plus >= local - margin && f_minus >= local - margin {
            // Interior parabolic minimizer of (-r, f-), (0, local), (r, f+).
            let denom = f_minus - local - local + f_plus;
            if denom > T::zero() {
                let s_star = r * T::of(0.5) * (f_minus - f_plus) / denom;
                if s_star.abs() > T::epsilon() * scale {
                    let inner = eval(s_star)?;
                    if inner.1 + inner.2 < local - margin {
                        return Ok(Some((inner.0, inner.1, inner.2, s_star)));
                    }
                }
            }
            // Overshoot on both sides: retry closer in.
            r *= T::of(1.0 / 64.0);
            if r < floor {
                return Ok(None);
            }
            continue;
        }

        // Walk in the improving direction, doubling while it helps.
        let (mut s_prev, mut f_prev) = (T::zero(), local);
        let (mut s_best, mut best) = if f_plus <= f_minus {
            (r, plus)
        } else {
            (-r, minus)
        };
        let mut s_next = s_best;
        let mut overshoot: Option<(T, T)> = None;
        for _ in 0..12 {
            s_next = s_next + s_next;
            if s_next.abs() > T::of(4.0) * scale {
                break;
            }
            let cand = eval(s_next)?;
            let f = cand.1 + cand.2;
            if f < best.1 + best.2 {
                s_prev = s_best;
                f_prev = best.1 + best.2;
                s_best = s_next;
                best = cand;
            } else {
                overshoot = Some((s_next, f));
                break;
            }
        }
        // Parabolic refinement of the bracket (s_prev, s_best, s_over).
        if let Some((s_over, f_over)) = overshoot {
            let f_best = best.1 + best.2;
            let x21 = s_best - s_prev;
            let x23 = s_best - s_over;
            let num = x21 * x21 * (f_best - f_over) - x23 * x23 * (f_best - f_prev);
            let den = x21 * (f_best - f_over) - x23 * (f_best - f_prev);
            if den.abs() > T::zero() {
                let s_ref = s_best - T::of(0.5) * num / den;
                if s_ref.is_finite() && s_ref != s_best {
                    let cand = eval(s_ref)?;
                    if cand.1 + cand.2 < f_best {
                        s_best = s_ref;
                        best = cand;
                    }
                }
            }
        }
        if best.1 + best.2 < local - margin {
            return Ok(Some((best.0, best.1, best.2, s_best)));
        }
        return Ok(None);
    }
    Ok(None)
}

/// Gauss-Legendre quadrature over the linear segment `x -> y`: the HS-metric
/// length when `energy` is false, the path energy `int K(V, V) du` when true.
fn segment_quadrature<T: Real>(
    phi: &dyn KernelFn<T>,
    x: &HermitianMatrix<T>,
    y: &HermitianMatrix<T>,
    rule: &[(T, T)],
    energy: bool,
) -> Result<T> {
    let n = x.dim();
    let v = y.sub(x);
    let mut acc = T::zero();
    for &(t, w) in rule {
        let p = x.scale(T::one() - t).add(&y.scale(t));
        let s = spectral_decompose(&p, T::of(DEFAULT_CLUSTER_TOL))?;
        if !(s.eigenvalues[0] > T::zero()) {
            return Err(Error::Domain(format!(
                "segment point at local parameter {t} is not positive definite"
            )));
        }
        let vt = v.mat().conjugate_by_adjoint(&s.frame);
        let mut speed_sq = T::zero();
        for i in 0..n {
            speed_sq += vt[(i, i)].norm_sqr() / phi.eval(s.eigenvalues[i], s.eigenvalues[i])?;
            for j in (i + 1)..n {
                let c = phi.eval(s.eigenvalues[i], s.eigenvalues[j])?;
                speed_sq += T::of(2.0) * vt[(i, j)].norm_sqr() / c;
            }
        }
        acc += if energy { w * speed_sq } else { w * speed_sq.sqrt() };
    }
    Ok(acc)
}

/// Projects onto the SPD cone by flooring eigenvalues at
/// `1e-10 * max |eigenvalue|`.
fn spd_floor<T: Real>(h: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
    let s = spectral_decompose(h, T::of(DEFAULT_CLUSTER_TOL))?;
    let top = s
        .eigenvalues
        .iter()
        .map(|l| l.abs())
        .fold(T::zero(), |a, b| a.max(b))
        .max(T::min_positive_value());
    let floor = T::of(1e-10) * top;
    if s.eigenvalues[0] >= floor {
        return Ok(h.clone());
    }
    Ok(s.apply(|l| l.max(floor)))
}

/// Seeded orthonormal (w.r.t. the HS inner product) Hermitian basis of the
/// full n^2-dimensional tangent space.
fn hermitian_basis<T: Real>(n: usize, seed: u64) -> Vec<HermitianMatrix<T>> {
    let mut rng = SplitMix64::new(seed);
    let mut basis: Vec<HermitianMatrix<T>> = Vec::with_capacity(n * n);
    let mut guard = 0usize;
    while basis.len() < n * n && guard < 64 * n * n {
        guard += 1;
        let cand = random_hermitian::<T>(n, rng.next_u64(), T::one());
        let mut v = cand;
        for prev in &basis {
            let c = matcore::hs_inner(&v, prev).expect("same dims");
            v = v.sub(&prev.scale(c));
        }
        let norm = v.hs_norm();
        if norm > T::of(1e-6) {
            basis.push(v.scale(norm.recip()));
        }
    }
    basis
}

// ---------------------------------------------------------------------------
// Infinitesimal slope
// ---------------------------------------------------------------------------

/// Estimates `lim_{eps -> 0} delta_phi(D, D + eps H)/eps` from oracle
/// distances over the epsilon schedule, Richardson-extrapolating the last two
/// entries. Converges to `|| phi(L_D, R_D)^{-1/2} H ||_HS`.
pub fn directional_distance_slope<T: Real>(
    phi: &dyn KernelFn<T>,
    d: &SpdMatrix<T>,
    h: &HermitianMatrix<T>,
    eps_schedule: &[T],
) -> Result<T> {
    if eps_schedule.is_empty() {
        return Err(Error::Precondition("need at least one epsilon".into()));
    }
    if eps_schedule
        .windows(2)
        .any(|w| !(w[1] < w[0]) || !(w[1] > T::zero()))
        || !(eps_schedule[0] > T::zero())
    {
        return Err(Error::Precondition(
            "epsilon schedule must be strictly decreasing and positive".into(),
        ));
    }
    let cfg = PathSearchConfig::default();
    let mut slopes = Vec::with_capacity(eps_schedule.len());
    for &eps in eps_schedule {
        let target = d
            .add_herm(&h.scale(eps))
            .map_err(|_| Error::Domain(format!("D + {eps} H is not positive definite")))?;
        let sp = numeric_shortest_distance(phi, d, &target, &cfg)?;
        slopes.push(sp.distance / eps);
    }
    if slopes.len() == 1 {
        return Ok(slopes[0]);
    }
    let k = slopes.len();
    let (e1, s1) = (eps_schedule[k - 2], slopes[k - 2]);
    let (e2, s2) = (eps_schedule[k - 1], slopes[k - 1]);
    Ok((s2 * e1 - s1 * e2) / (e1 - e2))
}

// ---------------------------------------------------------------------------
// Multi-matrix means
// ---------------------------------------------------------------------------

/// Power mean `((1/k) sum A_j^{(2-theta)/2})^{2/(2-theta)}`, read as the
/// log-Euclidean mean `exp((1/k) sum log A_j)` at `theta = 2`. This is the
/// unique minimizer of the sum of squared `Theta(theta)` distances.
pub fn power_mean_multi<T: Real>(theta: T, matrices: &[SpdMatrix<T>]) -> Result<SpdMatrix<T>> {
    let k = matrices.len();
    if k == 0 {
        return Err(Error::Precondition("power mean needs at least one matrix".into()));
    }
    let n = matrices[0].dim();
    if matrices.iter().any(|m| m.dim() != n) {
        return Err(Error::Precondition("power mean inputs must share a dimension".into()));
    }
    let kf = T::of_usize(k);
    if (theta - T::of(2.0)).abs() <= T::of(BRANCH_TOL) {
        let mut acc = HermitianMatrix::zeros(n);
        for m in matrices {
            acc = acc.add(&m.log());
        }
        herm_exp(&acc.scale(kf.recip()))
    } else {
        let r = (T::of(2.0) - theta) * T::of(0.5);
        let mut acc = HermitianMatrix::zeros(n);
        for m in matrices {
            acc = acc.add(m.pow(r).herm());
        }
        Ok(SpdMatrix::new(acc.scale(kf.recip()))?.pow(r.recip()))
    }
}

/// Fisher-Rao Karcher mean of `{A_j^alpha}`, returned through the
/// `1/alpha`-th root; the unique minimizer of the sum of squared
/// `psi_alpha` distances.
///
/// Fixed-point iteration
/// `X <- X^{1/2} exp((1/k) sum log(X^{-1/2} A_j^alpha X^{-1/2})) X^{1/2}`
/// started at the log-Euclidean mean and stopped when the gradient norm
/// drops to `tol`. A half step is taken whenever the full step increases the
/// objective.
pub fn karcher_mean<T: Real>(
    matrices: &[SpdMatrix<T>],
    alpha: T,
    tol: T,
    max_iter: usize,
) -> Result<SpdMatrix<T>> {
    let k = matrices.len();
    if k == 0 {
        return Err(Error::Precondition("Karcher mean needs at least one matrix".into()));
    }
    if !(alpha > T::zero() && alpha <= T::of(2.0)) {
        return Err(Error::Precondition(format!(
            "Karcher mean requires alpha in (0, 2], got {alpha}"
        )));
    }
    if !(tol > T::zero()) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let n = matrices[0].dim();
    if matrices.iter().any(|m| m.dim() != n) {
        return Err(Error::Precondition("Karcher inputs must share a dimension".into()));
    }
    let kf = T::of_usize(k);
    let powered: Vec<SpdMatrix<T>> = matrices.iter().map(|m| m.pow(alpha)).collect();

    // Log-Euclidean initialization.
    let mut acc = HermitianMatrix::zeros(n);
    for m in &powered {
        acc = acc.add(&m.log());
    }
    let mut x = herm_exp(&acc.scale(kf.recip()))?;

    let logs_and_objective = |x: &SpdMatrix<T>| -> Result<(HermitianMatrix<T>, T)> {
        let xih = x.pow(T::of(-0.5));
        let mut grad = HermitianMatrix::zeros(n);
        let mut obj = T::zero();
        for m in &powered {
            let inner = SpdMatrix::new(HermitianMatrix::trusted(
                xih.mat().mul(m.mat()).mul(xih.mat()),
            ))?;
            let l = inner.log();
            let norm = l.hs_norm();
            obj += norm * norm;
            grad = grad.add(&l);
        }
        Ok((grad.scale(kf.recip()), obj))
    };

    let (mut grad, mut obj) = logs_and_objective(&x)?;
    for _ in 0..max_iter {
        let gnorm = grad.hs_norm();
        if gnorm <= tol {
            return Ok(x.pow(alpha.recip()));
        }
        let xs = x.sqrt();
        let step = |g: &HermitianMatrix<T>| -> Result<SpdMatrix<T>> {
            let e = herm_exp(g)?;
            SpdMatrix::new(HermitianMatrix::trusted(
                xs.mat().mul(e.mat()).mul(xs.mat()),
            ))
        };
        let full = step(&grad)?;
        let (g_full, obj_full) = logs_and_objective(&full)?;
        if obj_full <= obj {
            x = full;
            grad = g_full;
            obj = obj_full;
        } else {
            let half = step(&grad.scale(T::of(0.5)))?;
            let (g_half, obj_half) = logs_and_objective(&half)?;
            x = half;
            grad = g_half;
            obj = obj_half;
        }
    }
    let residual = grad.hs_norm();
    if residual <= tol {
        return Ok(x.pow(alpha.recip()));
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: residual.as_f64(),
    })
}

/// Geometric mean of two SPD matrices (the Fisher-Rao geodesic midpoint).
pub fn geometric_mean_pair<T: Real>(a: &SpdMatrix<T>, b: &SpdMatrix<T>) -> Result<SpdMatrix<T>> {
    geodesic_point(GeodesicFamily::FisherRao, a, b, T::of(0.5))
}

/// Three-matrix geometric mean by the midpoint recursion
/// `(A, B, C) <- (B # C, C # A, A # B)`; the triangle diameter at least
/// halves per round, so the vertices converge to a common limit.
pub fn alm_3mean<T: Real>(
    a: &SpdMatrix<T>,
    b: &SpdMatrix<T>,
    c: &SpdMatrix<T>,
    tol: T,
) -> Result<SpdMatrix<T>> {
    if a.dim() != b.dim() || b.dim() != c.dim() {
        return Err(Error::Precondition("inputs must share a dimension".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    let hs = NormSpec::HilbertSchmidt;
    let mut a = a.clone();
    let mut b = b.clone();
    let mut c = c.clone();
    const CAP: usize = 1_000_000;
    for _ in 0..CAP {
        let dab = closed_form_distance(GeodesicFamily::FisherRao, &hs, &a, &b)?;
        let dbc = closed_form_distance(GeodesicFamily::FisherRao, &hs, &b, &c)?;
        let dca = closed_form_distance(GeodesicFamily::FisherRao, &hs, &c, &a)?;
        if dab.max(dbc).max(dca) <= tol {
            return Ok(a);
        }
        let na = geometric_mean_pair(&b, &c)?;
        let nb = geometric_mean_pair(&c, &a)?;
        let nc = geometric_mean_pair(&a, &b)?;
        a = na;
        b = nb;
        c = nc;
    }
    Err(Error::NonConvergence {
        iterations: CAP,
        residual: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::random_spd;
    use crate::means::{KernelSpec, MeanSpec};

    const HS: NormSpec<f64> = NormSpec::HilbertSchmidt;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    fn fisher_kernel() -> KernelSpec<f64> {
        KernelSpec::fisher_rao()
    }

    fn noncommuting_pair(seed: u64, n: usize, spread: f64) -> (SpdMatrix<f64>, SpdMatrix<f64>) {
        let a = random_spd::<f64>(n, 2 * seed + 1, spread);
        let b = random_spd::<f64>(n, 2 * seed + 2, spread);
        (a, b)
    }

    #[test]
    fn endpoints_are_exact() {
        let (a, b) = noncommuting_pair(3, 3, 1.0);
        for family in [
            GeodesicFamily::Theta(-2.0),
            GeodesicFamily::Theta(0.0),
            GeodesicFamily::Theta(1.0),
            GeodesicFamily::Theta(2.0),
            GeodesicFamily::Theta(3.5),
            GeodesicFamily::Alpha(0.5),
            GeodesicFamily::FisherRao,
            GeodesicFamily::CommutingSqrt,
        ] {
            let p0 = geodesic_point(family, &a, &b, 0.0).unwrap();
            let p1 = geodesic_point(family, &a, &b, 1.0).unwrap();
            let scale = a.herm().hs_norm().max(b.herm().hs_norm());
            assert!(
                p0.herm().sub(a.herm()).hs_norm() <= 1e-10 * scale,
                "{family:?} at 0"
            );
            assert!(
                p1.herm().sub(b.herm()).hs_norm() <= 1e-10 * scale,
                "{family:?} at 1"
            );
        }
        assert!(geodesic_point(GeodesicFamily::FisherRao, &a, &b, 1.5).is_err());
        assert!(geodesic_point(GeodesicFamily::FisherRao, &a, &b, -0.1).is_err());
    }

    #[test]
    fn fisher_rao_commuting_midpoint_is_geometric_mean() {
        let a = SpdMatrix::<f64>::identity(2);
        let b = SpdMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let mid = geodesic_point(GeodesicFamily::FisherRao, &a, &b, 0.5).unwrap();
        assert!((mid.herm().entry(0, 0).re - 1.0).abs() < 1e-12);
        assert!((mid.herm().entry(1, 1).re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn theta_one_scalar_midpoint() {
        let a: SpdMatrix<f64> = SpdMatrix::from_diag(&[1.0]).unwrap();
        let b: SpdMatrix<f64> = SpdMatrix::from_diag(&[9.0]).unwrap();
        let mid = geodesic_point(GeodesicFamily::Theta(1.0), &a, &b, 0.5).unwrap();
        assert!((mid.herm().entry(0, 0).re - 4.0).abs() < 1e-12);
    }

    #[test]
    fn midpoint_symmetry() {
        for seed in 0..10u64 {
            let (a, b) = noncommuting_pair(100 + seed, 3, 1.5);
            let m1 = geodesic_point(GeodesicFamily::FisherRao, &a, &b, 0.5).unwrap();
            let m2 = geodesic_point(GeodesicFamily::FisherRao, &b, &a, 0.5).unwrap();
            assert!(m1.herm().sub(m2.herm()).hs_norm() <= 1e-9 * m1.herm().hs_norm());
        }
    }

    #[test]
    fn theta_branch_continuity() {
        let (a, b) = noncommuting_pair(7, 3, 1.0);
        for base in [0.0f64, 2.0] {
            let on = geodesic_point(GeodesicFamily::Theta(base), &a, &b, 0.3).unwrap();
            for d in [2e-5, -2e-5] {
                let off = geodesic_point(GeodesicFamily::Theta(base + d), &a, &b, 0.3).unwrap();
                let err = on.herm().sub(off.herm()).hs_norm() / on.herm().hs_norm();
                assert!(err < 1e-4, "theta {base}{d:+e}: {err}");
            }
        }
        // Theta(0) is exactly the linear path.
        let p = geodesic_point(GeodesicFamily::Theta(0.0), &a, &b, 0.25).unwrap();
        let want = a.herm().scale(0.75).add(&b.herm().scale(0.25));
        assert!(p.herm().sub(&want).hs_norm() < 1e-13);
    }

    #[test]
    fn closed_form_distance_examples() {
        let e = std::f64::consts::E;
        // Theta(0): Euclidean.
        let (a, b) = noncommuting_pair(9, 3, 1.0);
        let d0 = closed_form_distance(GeodesicFamily::Theta(0.0), &HS, &a, &b).unwrap();
        assert!(rel_close(d0, a.herm().sub(b.herm()).hs_norm(), 1e-12));
        // Theta(2) between Diag(e, e) and I: sqrt(2).
        let de = SpdMatrix::from_diag(&[e, e]).unwrap();
        let i2 = SpdMatrix::<f64>::identity(2);
        let d2 = closed_form_distance(GeodesicFamily::Theta(2.0), &HS, &de, &i2).unwrap();
        assert!(rel_close(d2, 2.0f64.sqrt(), 1e-12));
        // Alpha(1) commuting: || log A ||.
        let a4 = SpdMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let d1 = closed_form_distance(GeodesicFamily::Alpha(1.0), &HS, &a4, &i2).unwrap();
        assert!(rel_close(d1, 4.0f64.ln(), 1e-12));
        // Theta(1) = 2 || sqrt A - sqrt B ||.
        let dt1 = closed_form_distance(GeodesicFamily::Theta(1.0), &HS, &a, &b).unwrap();
        let want = 2.0 * a.sqrt().herm().sub(b.sqrt().herm()).hs_norm();
        assert!(rel_close(dt1, want, 1e-12));
        // Symmetry and identity of indiscernibles.
        let dsym = closed_form_distance(GeodesicFamily::Theta(3.0), &HS, &b, &a).unwrap();
        let dfwd = closed_form_distance(GeodesicFamily::Theta(3.0), &HS, &a, &b).unwrap();
        assert!(rel_close(dsym, dfwd, 1e-12));
        assert!(closed_form_distance(GeodesicFamily::FisherRao, &HS, &a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn curve_length_constant_curve_is_zero() {
        let a = random_spd::<f64>(3, 15, 1.0);
        let curve = Curve::polyline_uniform(vec![a.clone(), a.clone()]).unwrap();
        let len = curve_length(&fisher_kernel(), &curve, &HS, 8).unwrap();
        assert!(len < 1e-14);
    }

    #[test]
    fn curve_length_log_geodesic_matches_log_norm() {
        // phi = (log mean)^2 on the Theta(2) geodesic between Diag(1, e^2)
        // and I: length = || log A || = 2.
        let e2 = std::f64::consts::E * std::f64::consts::E;
        let a = SpdMatrix::from_diag(&[1.0, e2]).unwrap();
        let b = SpdMatrix::<f64>::identity(2);
        let phi = KernelSpec::new(MeanSpec::Stolarsky(2.0), 2.0);
        let curve = Curve::closed_form(GeodesicFamily::Theta(2.0), a, b).unwrap();
        let len = curve_length(&phi, &curve, &HS, 256).unwrap();
        assert!(rel_close(len, 2.0, 1e-8), "{len}");
    }

    #[test]
    fn curve_length_radial_segment() {
        // Straight segment t I, t in [1, 2], n = 4, Fisher-Rao kernel:
        // integral of t^-1 sqrt(n) dt = 2 log 2.
        let n = 4;
        let a = SpdMatrix::<f64>::identity(n);
        let b = SpdMatrix::from_diag(&[2.0; 4]).unwrap();
        let curve = Curve::polyline_uniform(vec![a, b]).unwrap();
        let len = curve_length(&fisher_kernel(), &curve, &HS, 64).unwrap();
        assert!(rel_close(len, 2.0 * 2.0f64.ln(), 1e-9), "{len}");
    }

    #[test]
    fn closed_form_consistency_theta_family() {
        // Quadrature length of the closed-form geodesic must equal the
        // closed-form distance (1e-7 relative at 256 points).
        for &theta in &[-2.0, 0.0, 1.0, 2.0, 3.0, 4.0] {
            let phi = KernelSpec::pullback_family(theta);
            for seed in 0..5u64 {
                let (a, b) = noncommuting_pair(300 + seed, 3, 1.0);
                let curve =
                    Curve::closed_form(GeodesicFamily::Theta(theta), a.clone(), b.clone()).unwrap();
                let len = curve_length(&phi, &curve, &HS, 256).unwrap();
                let dist = closed_form_distance(GeodesicFamily::Theta(theta), &HS, &a, &b).unwrap();
                assert!(
                    rel_close(len, dist, 1e-7),
                    "theta {theta} seed {seed}: {len} vs {dist}"
                );
            }
        }
    }

    #[test]
    fn closed_form_consistency_alpha_family() {
        for &alpha in &[0.5, 1.0, 2.0] {
            let phi = KernelSpec::alpha_family(alpha).unwrap();
            for seed in 0..5u64 {
                let (a, b) = noncommuting_pair(400 + seed, 3, 1.0);
                let curve =
                    Curve::closed_form(GeodesicFamily::Alpha(alpha), a.clone(), b.clone()).unwrap();
                let len = curve_length(&phi, &curve, &HS, 256).unwrap();
                let dist = closed_form_distance(GeodesicFamily::Alpha(alpha), &HS, &a, &b).unwrap();
                assert!(
                    rel_close(len, dist, 1e-7),
                    "alpha {alpha} seed {seed}: {len} vs {dist}"
                );
            }
        }
    }

    #[test]
    fn completeness_ray_integrals() {
        // The ray t I has scalar speed t^{-theta/2} sqrt(n); quadrature must
        // match the antiderivative to 1e-8 relative.
        let n = 3;
        let sqrt_n = (n as f64).sqrt();
        let seg = |lo: f64, hi: f64| {
            let a = SpdMatrix::from_diag(&vec![lo; n]).unwrap();
            let b = SpdMatrix::from_diag(&vec![hi; n]).unwrap();
            Curve::polyline_uniform(vec![a, b]).unwrap()
        };
        // theta < 2: finite length into the origin side.
        for theta in [0.0, 1.0] {
            let phi = KernelSpec::pullback_family(theta);
            let len = curve_length(&phi, &seg(0.01, 1.0), &HS, 128).unwrap();
            let p = 1.0 - theta / 2.0;
            let want = sqrt_n * (1.0 - 0.01f64.powf(p)) / p;
            assert!(rel_close(len, want, 1e-8), "theta {theta}: {len} vs {want}");
        }
        // theta = 2: logarithmic divergence rate.
        let phi2 = KernelSpec::pullback_family(2.0);
        for aa in [0.1, 0.01] {
            let len = curve_length(&phi2, &seg(aa, 1.0), &HS, 192).unwrap();
            let want = sqrt_n * (1.0 / aa).ln();
            assert!(rel_close(len, want, 1e-8), "a {aa}: {len} vs {want}");
        }
        // theta > 2: finite length toward infinity.
        let theta = 4.0;
        let phi4 = KernelSpec::pullback_family(theta);
        let len = curve_length(&phi4, &seg(1.0, 100.0), &HS, 192).unwrap();
        let p = 1.0 - theta / 2.0; // = -1
        let want = sqrt_n * (100.0f64.powf(p) - 1.0) / p;
        assert!(rel_close(len, want, 1e-8), "{len} vs {want}");
    }

    #[test]
    fn reflection_isometry_between_theta_and_four_minus_theta() {
        // L_{phi_theta}(gamma) = L_{phi_{4-theta}}(gamma^{ -1}).
        for &theta in &[0.0, 1.0, 2.0, 3.0] {
            let phi = KernelSpec::pullback_family(theta);
            let phi_ref = KernelSpec::pullback_family(4.0 - theta);
            for seed in 0..5u64 {
                let (a, b) = noncommuting_pair(500 + seed, 3, 1.0);
                let curve = Curve::closed_form(GeodesicFamily::Theta(2.0), a, b).unwrap();
                let prepared = curve.prepare().unwrap();
                let len = curve_length_param(&phi, &prepared, &HS, 128, &[0.0, 1.0]).unwrap();
                let inv = InverseCurve::new(&prepared);
                let len_ref = curve_length_param(&phi_ref, &inv, &HS, 128, &[0.0, 1.0]).unwrap();
                assert!(
                    rel_close(len_ref, len, 1e-7),
                    "theta {theta} seed {seed}: {len_ref} vs {len}"
                );
            }
        }
        // Degree-2 kernels of any mean are reflection-isometric on their own.
        let root2 = KernelSpec::new(MeanSpec::<f64>::Root, 2.0);
        let (a, b) = noncommuting_pair(777, 3, 1.0);
        let curve = Curve::closed_form(GeodesicFamily::FisherRao, a, b).unwrap();
        let prepared = curve.prepare().unwrap();
        let l1 = curve_length_param(&root2, &prepared, &HS, 128, &[0.0, 1.0]).unwrap();
        let inv = InverseCurve::new(&prepared);
        let l2 = curve_length_param(&root2, &inv, &HS, 128, &[0.0, 1.0]).unwrap();
        assert!(rel_close(l2, l1, 1e-7));
    }

    #[test]
    fn power_map_isometries() {
        // m(A) = c A^beta maps (P, K^{phi_theta}) isometrically into
        // (P, K^{phi_theta'}) with beta = (2-theta)/(2-theta'),
        // c = |beta|^{-2/(2-theta')}.
        for &(theta, theta_p) in &[(0.0f64, 4.0f64), (1.0, 3.0), (0.0, 1.0)] {
            let phi = KernelSpec::pullback_family(theta);
            let phi_p = KernelSpec::pullback_family(theta_p);
            let beta = (2.0 - theta) / (2.0 - theta_p);
            let c = beta.abs().powf(-2.0 / (2.0 - theta_p));
            for seed in 0..5u64 {
                let (a, b) = noncommuting_pair(600 + seed, 3, 0.8);
                let curve = Curve::closed_form(GeodesicFamily::Theta(2.0), a, b).unwrap();
                let prepared = curve.prepare().unwrap();
                let len = curve_length_param(&phi, &prepared, &HS, 128, &[0.0, 1.0]).unwrap();
                let mapped = PowerMapCurve::new(&prepared, beta, c);
                let len_mapped =
                    curve_length_param(&phi_p, &mapped, &HS, 128, &[0.0, 1.0]).unwrap();
                assert!(
                    rel_close(len_mapped, len, 1e-6),
                    "({theta},{theta_p}) seed {seed}: {len_mapped} vs {len}"
                );
            }
        }
        // theta = 2: A -> A^alpha rescales lengths by exactly alpha
        // (an isometry precisely when |alpha| = 1).
        let phi2 = KernelSpec::pullback_family(2.0);
        for &alpha in &[0.5, 2.0] {
            for seed in 0..3u64 {
                let (a, b) = noncommuting_pair(650 + seed, 3, 0.8);
                let curve = Curve::closed_form(GeodesicFamily::FisherRao, a, b).unwrap();
                let prepared = curve.prepare().unwrap();
                let len = curve_length_param(&phi2, &prepared, &HS, 128, &[0.0, 1.0]).unwrap();
                let mapped = PowerMapCurve::new(&prepared, alpha, 1.0);
                let len_mapped =
                    curve_length_param(&phi2, &mapped, &HS, 128, &[0.0, 1.0]).unwrap();
                assert!(
                    rel_close(len_mapped, alpha * len, 1e-6),
                    "alpha {alpha}: {len_mapped} vs {}",
                    alpha * len
                );
            }
        }
    }

    #[test]
    fn lie_trotter_limit_of_alpha_distances() {
        for seed in 0..3u64 {
            let (a, b) = noncommuting_pair(700 + seed, 3, 1.0);
            let log_euclid = a.log().sub(&b.log()).hs_norm();
            let mut prev = f64::INFINITY;
            let mut alpha = 2.0;
            let mut last = 0.0;
            while alpha >= 1.0 / 64.0 - 1e-12 {
                let d = closed_form_distance(GeodesicFamily::Alpha(alpha), &HS, &a, &b).unwrap();
                assert!(d <= prev + 1e-10, "alpha {alpha}: {d} > {prev}");
                prev = d;
                last = d;
                alpha *= 0.5;
            }
            assert!(
                (last - log_euclid).abs() <= 1e-3 * log_euclid,
                "gap {} at alpha 1/64",
                (last - log_euclid).abs() / log_euclid
            );
        }
    }

    #[test]
    fn power_mean_examples() {
        // theta = 0: arithmetic mean.
        let (a, b) = noncommuting_pair(800, 3, 1.0);
        let m = power_mean_multi(0.0, &[a.clone(), b.clone()]).unwrap();
        let want = a.herm().add(b.herm()).scale(0.5);
        assert!(m.herm().sub(&want).hs_norm() < 1e-12 * want.hs_norm());
        // theta = 2 commuting: entrywise log mean of Diag(1,1), Diag(e^2,e^2).
        let e = std::f64::consts::E;
        let x = SpdMatrix::<f64>::identity(2);
        let y = SpdMatrix::from_diag(&[e * e, e * e]).unwrap();
        let m = power_mean_multi(2.0, &[x, y]).unwrap();
        assert!((m.herm().entry(0, 0).re - e).abs() < 1e-12);
        // theta = 4 scalars {1, 4}: ((1 + 1/4)/2)^-1 = 8/5.
        let s1: SpdMatrix<f64> = SpdMatrix::from_diag(&[1.0]).unwrap();
        let s4: SpdMatrix<f64> = SpdMatrix::from_diag(&[4.0]).unwrap();
        let m = power_mean_multi(4.0, &[s1.clone(), s4.clone()]).unwrap();
        assert!(rel_close(m.herm().entry(0, 0).re, 1.6, 1e-13), "{}", m.herm().entry(0, 0).re);
        // theta = 3 scalars {1, 4}: ((1 + 1/2)/2)^-2 = 16/9.
        let m = power_mean_multi(3.0, &[s1.clone(), s4]).unwrap();
        assert!(rel_close(m.herm().entry(0, 0).re, 16.0 / 9.0, 1e-13));
        // Single input unchanged.
        let m = power_mean_multi(-1.5, &[s1.clone()]).unwrap();
        assert!((m.herm().entry(0, 0).re - 1.0).abs() < 1e-13);
        assert!(power_mean_multi(1.0, &[]).is_err());
    }

    #[test]
    fn power_mean_minimizes_squared_distances() {
        // The power mean is the unique minimizer of sum delta_theta^2.
        let theta = 3.0;
        let mats: Vec<SpdMatrix<f64>> = (0..3)
            .map(|i| random_spd::<f64>(2, 900 + i, 1.0))
            .collect();
        let m = power_mean_multi(theta, &mats).unwrap();
        let objective = |x: &SpdMatrix<f64>| -> f64 {
            mats.iter()
                .map(|aj| {
                    let d =
                        closed_form_distance(GeodesicFamily::Theta(theta), &HS, x, aj).unwrap();
                    d * d
                })
                .sum()
        };
        let at_mean = objective(&m);
        for seed in 0..8u64 {
            let dir = crate::matcore::random_hermitian::<f64>(2, 950 + seed, 0.05);
            if let Ok(perturbed) = m.add_herm(&dir) {
                assert!(objective(&perturbed) >= at_mean - 1e-10);
            }
        }
    }

    #[test]
    fn karcher_mean_cases() {
        // k = 1: the input itself.
        let a = random_spd::<f64>(3, 1000, 1.0);
        let m = karcher_mean(&[a.clone()], 1.0, 1e-12, 50).unwrap();
        assert!(m.herm().sub(a.herm()).hs_norm() < 1e-10 * a.herm().hs_norm());
        // k = 2 commuting: geometric midpoint Diag(2, 3).
        let x = SpdMatrix::<f64>::identity(2);
        let y = SpdMatrix::from_diag(&[4.0, 9.0]).unwrap();
        let m = karcher_mean(&[x, y], 1.0, 1e-12, 100).unwrap();
        assert!((m.herm().entry(0, 0).re - 2.0).abs() < 1e-9);
        assert!((m.herm().entry(1, 1).re - 3.0).abs() < 1e-9);
        // k = 3 commuting diagonals: entrywise geometric mean.
        let d1 = SpdMatrix::from_diag(&[1.0, 2.0]).unwrap();
        let d2 = SpdMatrix::from_diag(&[8.0, 5.0]).unwrap();
        let d3 = SpdMatrix::from_diag(&[64.0, 11.0]).unwrap();
        let m = karcher_mean(&[d1, d2, d3], 1.0, 1e-13, 200).unwrap();
        assert!(rel_close(m.herm().entry(0, 0).re, 8.0, 1e-10));
        assert!(rel_close(m.herm().entry(1, 1).re, (2.0f64 * 5.0 * 11.0).cbrt(), 1e-10));
        // k = 2 non-commuting: equals the geodesic midpoint.
        let (p, q) = noncommuting_pair(1100, 3, 1.0);
        let m = karcher_mean(&[p.clone(), q.clone()], 1.0, 1e-12, 200).unwrap();
        let mid = geodesic_point(GeodesicFamily::FisherRao, &p, &q, 0.5).unwrap();
        assert!(m.herm().sub(mid.herm()).hs_norm() <= 1e-8 * mid.herm().hs_norm());
        // Gradient residual is small at the fixed point for alpha != 1 too.
        let mats: Vec<SpdMatrix<f64>> = (0..4)
            .map(|i| random_spd::<f64>(3, 1200 + i, 1.0))
            .collect();
        for alpha in [0.5, 1.0, 2.0] {
            let m = karcher_mean(&mats, alpha, 1e-11, 300).unwrap();
            let ma = m.pow(alpha);
            let mih = ma.pow(-0.5);
            let mut grad = HermitianMatrix::<f64>::zeros(3);
            for aj in &mats {
                let inner = SpdMatrix::new(HermitianMatrix::trusted(
                    mih.mat().mul(aj.pow(alpha).mat()).mul(mih.mat()),
                ))
                .unwrap();
                grad = grad.add(&inner.log());
            }
            assert!(grad.scale(0.25).hs_norm() <= 1e-10, "alpha {alpha}");
        }
        // Budget exhaustion reports non-convergence.
        assert!(matches!(
            karcher_mean(&mats, 1.0, 1e-30, 1),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn alm_three_mean() {
        // All equal: immediate.
        let a = random_spd::<f64>(3, 1300, 1.0);
        let m = alm_3mean(&a, &a, &a, 1e-12).unwrap();
        assert!(m.herm().sub(a.herm()).hs_norm() < 1e-12);
        // Commuting scalars {1, 8, 64}: cube root of the product = 8.
        let s1: SpdMatrix<f64> = SpdMatrix::from_diag(&[1.0]).unwrap();
        let s8: SpdMatrix<f64> = SpdMatrix::from_diag(&[8.0]).unwrap();
        let s64: SpdMatrix<f64> = SpdMatrix::from_diag(&[64.0]).unwrap();
        let m = alm_3mean(&s1, &s8, &s64, 1e-12).unwrap();
        assert!(rel_close(m.herm().entry(0, 0).re, 8.0, 1e-10));
        // One recursion step at least halves the triangle diameter.
        for seed in 0..5u64 {
            let a = random_spd::<f64>(3, 1400 + 3 * seed, 1.0);
            let b = random_spd::<f64>(3, 1401 + 3 * seed, 1.0);
            let c = random_spd::<f64>(3, 1402 + 3 * seed, 1.0);
            let dist = |x: &SpdMatrix<f64>, y: &SpdMatrix<f64>| {
                closed_form_distance(GeodesicFamily::FisherRao, &HS, x, y).unwrap()
            };
            let diam0 = dist(&a, &b).max(dist(&b, &c)).max(dist(&c, &a));
            let na = geometric_mean_pair(&b, &c).unwrap();
            let nb = geometric_mean_pair(&c, &a).unwrap();
            let nc = geometric_mean_pair(&a, &b).unwrap();
            let diam1 = dist(&na, &nb).max(dist(&nb, &nc)).max(dist(&nc, &na));
            assert!(diam1 <= 0.5 * diam0 + 1e-12, "seed {seed}: {diam1} vs {diam0}");
        }
    }

    #[test]
    fn shortest_path_identical_endpoints() {
        let a = random_spd::<f64>(3, 1500, 1.0);
        let cfg = PathSearchConfig::default();
        let sp = numeric_shortest_distance(&fisher_kernel(), &a, &a.clone(), &cfg).unwrap();
        assert!(sp.distance < 1e-12, "{}", sp.distance);
    }

    #[test]
    fn shortest_path_reaches_fisher_rao_closed_form() {
        let (a, b) = noncommuting_pair(1600, 2, 1.0);
        let cfg = PathSearchConfig::default();
        let sp = numeric_shortest_distance(&fisher_kernel(), &a, &b, &cfg).unwrap();
        let want = closed_form_distance(GeodesicFamily::FisherRao, &HS, &a, &b).unwrap();
        assert!(sp.distance >= want - 1e-9, "{} vs {want}", sp.distance);
        assert!(
            sp.distance <= want * (1.0 + 1e-3),
            "{} vs {want}",
            sp.distance
        );
    }

    #[test]
    fn directional_slope_cases() {
        // D = I: slope equals ||H||_HS since phi(1,1) = 1.
        let d = SpdMatrix::<f64>::identity(2);
        let h = crate::matcore::random_hermitian::<f64>(2, 1700, 0.5);
        let slope =
            directional_distance_slope(&fisher_kernel(), &d, &h, &[0.05, 0.02]).unwrap();
        assert!(rel_close(slope, h.hs_norm(), 2e-3), "{slope} vs {}", h.hs_norm());
        // Zero direction: zero slope.
        let z = HermitianMatrix::<f64>::zeros(2);
        let slope = directional_distance_slope(&fisher_kernel(), &d, &z, &[0.1]).unwrap();
        assert!(slope.abs() < 1e-12);
        // Schur-coefficient oracle on a diagonal foot point:
        // D = Diag(1,4), H = [[0,1],[1,0]]: slope = ||C^{-1/2} o H|| = 1/sqrt(2).
        let d = SpdMatrix::from_diag(&[1.0, 4.0]).unwrap();
        let h = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let slope =
            directional_distance_slope(&fisher_kernel(), &d, &h, &[0.05, 0.02]).unwrap();
        let want = crate::metric::kernel_apply(&fisher_kernel(), &d, &h, -0.5)
            .unwrap()
            .hs_norm();
        assert!(rel_close(want, std::f64::consts::FRAC_1_SQRT_2, 1e-12));
        assert!(rel_close(slope, want, 2e-3), "{slope} vs {want}");
        // Schedule validation.
        assert!(directional_distance_slope(&fisher_kernel(), &d, &h, &[]).is_err());
        assert!(directional_distance_slope(&fisher_kernel(), &d, &h, &[0.1, 0.2]).is_err());
    }
}
