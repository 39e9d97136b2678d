//! The single-precision lane: the same algorithms instantiated at `f32`,
//! checked at tolerances matching that precision.

use spdgeo::geodesic::{closed_form_distance, curve_length, geodesic_point, Curve, GeodesicFamily};
use spdgeo::means::{mean_eval, KernelSpec, MeanSpec};
use spdgeo::metric::metric_eval;
use spdgeo::{
    random_hermitian, random_spd, spectral_decompose, HermitianMatrix32, NormSpec, SpdMatrix32,
};

#[test]
fn f32_spectral_reconstruction() {
    for seed in 0..20u64 {
        let a = random_spd::<f32>(3, seed, 1.0);
        let s = spectral_decompose(a.herm(), 1e-5f32).unwrap();
        let err = s.reconstruct().sub(a.herm()).hs_norm();
        assert!(err <= 1e-5 * a.herm().hs_norm(), "seed {seed}: {err}");
    }
}

#[test]
fn f32_stolarsky_identities() {
    for x in [0.25f32, 1.5, 8.0] {
        let got = mean_eval(&MeanSpec::<f32>::Stolarsky(4.0), x, 1.0).unwrap();
        assert!((got - x.sqrt()).abs() <= 1e-5 * x.sqrt());
        let arith = mean_eval(&MeanSpec::<f32>::Stolarsky(-2.0), x, 1.0).unwrap();
        assert!((arith - 0.5 * (x + 1.0)).abs() <= 1e-5 * arith);
    }
}

#[test]
fn f32_fisher_rao_round_trip() {
    let a: SpdMatrix32 = random_spd::<f32>(2, 3, 1.0);
    let b: SpdMatrix32 = random_spd::<f32>(2, 4, 1.0);
    let mid = geodesic_point(GeodesicFamily::FisherRao, &a, &b, 0.5f32).unwrap();
    let d_am = closed_form_distance(GeodesicFamily::FisherRao, &NormSpec::HilbertSchmidt, &a, &mid)
        .unwrap();
    let d_mb = closed_form_distance(GeodesicFamily::FisherRao, &NormSpec::HilbertSchmidt, &mid, &b)
        .unwrap();
    let d_ab =
        closed_form_distance(GeodesicFamily::FisherRao, &NormSpec::HilbertSchmidt, &a, &b).unwrap();
    assert!((d_am + d_mb - d_ab).abs() <= 1e-4 * d_ab);

    let phi = KernelSpec::<f32>::fisher_rao();
    let curve = Curve::closed_form(GeodesicFamily::FisherRao, a.clone(), b.clone()).unwrap();
    let len = curve_length(&phi, &curve, &NormSpec::HilbertSchmidt, 64).unwrap();
    assert!((len - d_ab).abs() <= 1e-3 * d_ab, "{len} vs {d_ab}");
}

#[test]
fn f32_metric_positivity() {
    let d = random_spd::<f32>(3, 9, 1.0);
    let h: HermitianMatrix32 = random_hermitian::<f32>(3, 10, 1.0);
    let phi = KernelSpec::<f32>::fisher_rao();
    let v = metric_eval(&phi, &d, &h, &h).unwrap();
    assert!(v > 0.0);
}
