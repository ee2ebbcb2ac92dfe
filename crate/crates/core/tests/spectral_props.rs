mod common;

use std::f64::consts::PI;

use aninorm_core::bilinear::{self, TimeScale};
use aninorm_core::spectral::{self, rms_gain_omega, Side, SpectralDensity};
use aninorm_core::statespace::mat;
use aninorm_core::{linalg, CtStateSpace, DtStateSpace, Mat, PhiGrid};
use common::random_stable;
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

fn shaping(seed: u64, n: usize, m: usize) -> CtStateSpace {
    random_stable(seed ^ 0x5eed, n, m, m, 0.3)
}

/// `inf_φ sqrt(λ_min Λ_T(φ))` and `sup_φ sqrt(λ_max Λ_T(φ))` on a fine grid.
fn gain_envelope(dt: &DtStateSpace) -> (f64, f64) {
    let g = PhiGrid::new(8192).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for phi in g.nodes() {
        let f = aninorm_core::statespace::eval_tf_dt(dt, Complex64::from_polar(1.0, phi)).unwrap();
        let s = linalg::singular_values(&f);
        let smin = if f.nrows() >= f.ncols() { *s.last().unwrap() } else { 0.0 };
        lo = lo.min(smin);
        hi = hi.max(s[0]);
    }
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn gain_is_sandwiched(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3, p in 1usize..=3, t in 0.05f64..5.0) {
        let sys = random_stable(seed, n, m, p, 0.3);
        let s = SpectralDensity::RationalCt(shaping(seed, 2, m));
        let ts = TimeScale::new(t).unwrap();
        let dt = bilinear::to_discrete(&sys, ts).unwrap();
        let g = spectral::rms_gain(&sys, &s, ts, PhiGrid::default()).unwrap();
        let (lo, hi_grid) = gain_envelope(&dt);
        let hinf = aninorm_core::hinf_dt(&dt).unwrap();
        prop_assert!(hinf >= hi_grid * (1.0 - 1e-9));
        prop_assert!(g <= hinf + 1e-9, "{} > {}", g, hinf);
        prop_assert!(g >= lo - 1e-9, "{} < {}", g, lo);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gram_symmetries(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3, p in 1usize..=3, w in -20.0f64..20.0) {
        let sys = random_stable(seed, n, m, p, 0.2);
        let plus = spectral::gram_ct(&sys, w, Side::LeftFstarF).unwrap();
        let minus = spectral::gram_ct(&sys, -w, Side::LeftFstarF).unwrap();
        let conj = plus.map(|v| v.conj());
        prop_assert!((&minus - &conj).norm() <= 1e-12 * (1.0 + plus.norm()));
        prop_assert!((&minus - plus.transpose()).norm() <= 1e-12 * (1.0 + plus.norm()));
    }

    #[test]
    fn circle_matches_line(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3, p in 1usize..=3, t in 0.05f64..5.0) {
        let sys = random_stable(seed, n, m, p, 0.2);
        let ts = TimeScale::new(t).unwrap();
        let dt = bilinear::to_discrete(&sys, ts).unwrap();
        for phi in PhiGrid::new(64).unwrap().nodes() {
            let lt = spectral::gram_dt(&dt, phi, Side::LeftFstarF).unwrap();
            let lc = spectral::gram_ct(&sys, -ts.omega() * (0.5 * phi).tan(), Side::LeftFstarF).unwrap();
            prop_assert!((&lt - &lc).norm() <= 1e-9 * (1.0 + lc.norm()));
        }
    }

    #[test]
    fn density_scale_drops_out(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3, kappa in 0.01f64..100.0) {
        let sys = random_stable(seed, n, m, 2, 0.3);
        let g = shaping(seed, 2, m);
        let ts = TimeScale::new(0.5).unwrap();
        let grid = PhiGrid::default();
        let scaled = CtStateSpace::new(g.a().clone(), g.b() * kappa.sqrt(), g.c().clone(), g.d() * kappa.sqrt()).unwrap();
        let s1 = SpectralDensity::RationalCt(g);
        let s2 = SpectralDensity::RationalCt(scaled);
        let g1 = spectral::rms_gain(&sys, &s1, ts, grid).unwrap();
        let g2 = spectral::rms_gain(&sys, &s2, ts, grid).unwrap();
        prop_assert!((g1 - g2).abs() <= 1e-12 * (1.0 + g1));
        let a1 = spectral::mean_anisotropy(&s1, ts, grid).unwrap();
        let a2 = spectral::mean_anisotropy(&s2, ts, grid).unwrap();
        prop_assert!((a1 - a2).abs() <= 1e-10);
        prop_assert!(a1 >= 0.0);
    }

    #[test]
    fn two_quadrature_routes_agree(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=2, p in 1usize..=2, t in 0.1f64..3.0) {
        let sys = random_stable(seed, n, m, p, 0.3);
        let s = SpectralDensity::RationalCt(shaping(seed, 2, m));
        let ts = TimeScale::new(t).unwrap();
        let a = spectral::rms_gain(&sys, &s, ts, PhiGrid::default()).unwrap();
        let b = rms_gain_omega(&sys, &s, ts).unwrap();
        prop_assert!((a - b).abs() <= 1e-7 * (1.0 + a), "{} vs {}", a, b);
    }

    #[test]
    fn anisotropy_forms_agree(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3) {
        let ct = random_stable(seed, n, m, m, 0.5);
        let dt = bilinear::to_discrete(&ct, TimeScale::new(1.0).unwrap()).unwrap();
        let s = SpectralDensity::RationalDt(dt);
        let ts = TimeScale::new(1.0).unwrap();
        let grid = PhiGrid::default();
        let a = spectral::mean_anisotropy(&s, ts, grid).unwrap();
        prop_assume!(a.is_finite());
        let ld = spectral::innovations_logdet(&s, ts, grid).unwrap();
        let power = spectral::autocovariance(&s, 0, ts, grid).unwrap().trace();
        let mm = m as f64;
        let identity = -0.5 * (ld - mm * (power / mm).ln());
        prop_assert!((a - identity).abs() <= 1e-8);
        let pointwise = spectral::mean_anisotropy_pointwise(&s, ts, grid).unwrap();
        prop_assert!((a - pointwise).abs() <= 1e-8, "{} vs {}", a, pointwise);
        prop_assert!(a > 1e-12);
    }

    #[test]
    fn autocovariance_is_transposed_by_lag(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3, lag in 1i64..6) {
        let ct = random_stable(seed, n, m, m, 0.5);
        let ts = TimeScale::new(1.0).unwrap();
        let s = SpectralDensity::RationalDt(bilinear::to_discrete(&ct, ts).unwrap());
        let grid = PhiGrid::default();
        let plus = spectral::autocovariance(&s, lag, ts, grid).unwrap();
        let minus = spectral::autocovariance(&s, -lag, ts, grid).unwrap();
        prop_assert!((&minus - plus.transpose()).norm() <= 1e-10 * (1.0 + plus.norm()));
    }

    #[test]
    fn concentrated_gains_stay_below_hinf(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=2, p in 1usize..=2, w0 in 0.0f64..5.0) {
        let sys = random_stable(seed, n, m, p, 0.3);
        let ts = TimeScale::new(0.5).unwrap();
        let hinf = aninorm_core::hinf_dt(&bilinear::to_discrete(&sys, ts).unwrap()).unwrap();
        let u = aninorm_core::aninorm::unit(&vec![Complex64::new(1.0, 0.3); m]);
        let gains = spectral::concentrated_gain(&sys, ts, w0, &u, &[0.1, 0.01, 0.001]).unwrap();
        for g in gains {
            prop_assert!(g <= hinf + 1e-6);
        }
    }
}

#[test]
fn round_system_gain_is_density_free() {
    // DᵀD = 4I for a scaled rotation.
    let d = mat(2, 2, &[1.2, -1.6, 1.6, 1.2]);
    let sys = CtStateSpace::static_gain(d).unwrap();
    let ts = TimeScale::new(0.8).unwrap();
    for seed in 0..5 {
        let s = SpectralDensity::RationalCt(shaping(seed, 3, 2));
        let g = spectral::rms_gain(&sys, &s, ts, PhiGrid::default()).unwrap();
        assert!((g - 2.0).abs() < 1e-12);
    }
}

#[test]
fn white_gain_matches_constant_density() {
    for seed in 0..10 {
        let sys = random_stable(seed, 3, 2, 2, 0.4);
        let ts = TimeScale::new(0.6).unwrap();
        let g = spectral::rms_gain(&sys, &SpectralDensity::ConstantScalar { kappa: 2.5, dim: 2 }, ts, PhiGrid::default()).unwrap();
        assert!((spectral::white_gain(&sys, ts).unwrap() - g).abs() < 1e-8);
    }
}

#[test]
fn static_system_white_gain_ignores_time_scale() {
    let d = mat(2, 3, &[1.0, 2.0, 0.0, -1.0, 0.5, 3.0]);
    let sys = CtStateSpace::static_gain(d.clone()).unwrap();
    for t in [1e-6, 1.0, 1e6] {
        let g = spectral::white_gain(&sys, TimeScale::new(t).unwrap()).unwrap();
        assert!((g - d.norm() / 3f64.sqrt()).abs() < 1e-14);
    }
}

#[test]
fn concentrated_gain_tracks_top_singular_direction() {
    let sys = random_stable(7, 3, 2, 2, 0.3);
    let ts = TimeScale::new(0.5).unwrap();
    let w0 = 1.3;
    let lam = spectral::gram_ct(&sys, w0, Side::LeftFstarF).unwrap();
    let eig = nalgebra::SymmetricEigen::new(lam.clone());
    let k = eig.eigenvalues.imax();
    let u: DVector<Complex64> = eig.eigenvectors.column(k).into_owned();
    let target = eig.eigenvalues[k].sqrt();
    let gains = spectral::concentrated_gain(&sys, ts, w0, &u, &[0.1, 0.01, 0.001]).unwrap();
    let errs: Vec<f64> = gains.iter().map(|g| (g - target).abs()).collect();
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 1e-2 * target, "{errs:?}");
}

#[test]
fn concentrated_density_has_trace_mass_two() {
    let u = aninorm_core::aninorm::unit(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 2.0)]);
    let s = SpectralDensity::Concentrated { omega0: 0.9, u, gamma: 0.05 };
    let ts = TimeScale::new(1.0).unwrap();
    let v = aninorm_core::quadrature::adaptive_gk(
        |x| Ok(vec![linalg::trace_re(&s.eval_ct(x.tan(), ts).unwrap()) / x.cos().powi(2)]),
        -0.5 * PI,
        0.5 * PI,
        &[0.9f64.atan(), -(0.9f64.atan())],
        64,
        1,
        1e-13,
        1e-12,
    )
    .unwrap();
    assert!((v[0] - 2.0).abs() < 1e-8);
    let at = s.eval_ct(0.4, ts).unwrap();
    assert!((&at - at.adjoint()).norm() < 1e-15);
    let eig = nalgebra::SymmetricEigen::new(at).eigenvalues;
    assert!(eig.iter().all(|&l| l >= -1e-15));
}

#[test]
fn rank_deficient_density_has_infinite_anisotropy() {
    let g = DtStateSpace::new(Mat::zeros(1, 1), Mat::zeros(1, 2), Mat::zeros(2, 1), mat(2, 2, &[1.0, 1.0, 1.0, 1.0])).unwrap();
    let s = SpectralDensity::RationalDt(g);
    let ts = TimeScale::new(1.0).unwrap();
    assert_eq!(spectral::mean_anisotropy(&s, ts, PhiGrid::new(64).unwrap()).unwrap(), f64::INFINITY);
    assert_eq!(spectral::innovations_logdet(&s, ts, PhiGrid::new(64).unwrap()).unwrap(), f64::NEG_INFINITY);
}
