mod common;

use aninorm_core::aninorm::{self, anisotropy_and_gain_of_q, NormOptions};
use aninorm_core::bilinear::{self, TimeScale};
use aninorm_core::{hinf_dt, linalg, spectral, Error, PhiGrid};
use common::random_stable;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn anisotropy_grows_with_q(seed in any::<u64>(), n in 1usize..=4, m in 1usize..=3, p in 1usize..=3) {
        let sys = random_stable(seed, n, m, p, 0.3);
        let dt = bilinear::to_discrete(&sys, TimeScale::new(0.5).unwrap()).unwrap();
        let h = hinf_dt(&dt).unwrap();
        let qmax = 1.0 / (h * h);
        let small = anisotropy_and_gain_of_q(&dt, 1e-8).unwrap();
        prop_assert!(small.aniso <= 1e-6);
        let mut prev = (0.0, 0.0);
        for k in 1..40 {
            let q = qmax * (1.0 - (-(k as f64) / 4.0).exp());
            let e = anisotropy_and_gain_of_q(&dt, q).unwrap();
            prop_assert!(e.aniso >= prev.0 - 1e-12, "aniso dropped at q = {}", q);
            prop_assert!(e.gain >= prev.1 - 1e-12);
            prop_assert!(e.gain <= h * (1.0 + 1e-9));
            // norm² q = 1 − m/v
            prop_assert!((e.gain * e.gain * q - (1.0 - m as f64 / e.input_variance)).abs() <= 1e-10);
            prev = (e.aniso, e.gain);
        }
    }

    #[test]
    fn worst_case_density_reproduces_level_and_norm(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=2, p in 1usize..=2, a in 0.05f64..2.0) {
        let sys = random_stable(seed, n, m, p, 0.3);
        let ts = TimeScale::new(0.7).unwrap();
        let sol = match aninorm::anisotropic_norm(&sys, ts, a) {
            Ok(s) => s,
            Err(Error::AnisotropyOutOfReach { .. }) | Err(Error::NonroundRequired) => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        };
        prop_assert!((sol.achieved_anisotropy - a).abs() <= 1e-8);
        prop_assert!(sol.diagnostics.monotonicity_violations.is_empty());
        let wc = aninorm::worst_case_filter(&sys, ts, &sol).unwrap();
        prop_assert!(linalg::spectral_abscissa(&wc.ct_closed_loop) < 0.0);
        let grid = PhiGrid::resolving(linalg::spectral_radius(&wc.dt_closed_loop));
        let dens = wc.density().unwrap();
        let aq = spectral::mean_anisotropy(&dens, ts, grid).unwrap();
        let gq = spectral::rms_gain(&sys, &dens, ts, grid).unwrap();
        prop_assert!((aq - a).abs() <= 1e-6, "{} vs {}", aq, a);
        prop_assert!((gq - sol.norm_value).abs() <= 1e-6 * (1.0 + sol.norm_value), "{} vs {}", gq, sol.norm_value);
        let dt = bilinear::to_discrete(&sys, ts).unwrap();
        prop_assert!(aninorm::isometry_residual(&dt, &sol, grid).unwrap() <= 1e-8);
    }

    #[test]
    fn sweep_is_monotone_and_bounded(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=2, p in 1usize..=2) {
        let sys = random_stable(seed, n, m, p, 0.3);
        let ts = TimeScale::new(1.0).unwrap();
        let dt = bilinear::to_discrete(&sys, ts).unwrap();
        prop_assume!(!aninorm::is_round(&dt).unwrap());
        let h = hinf_dt(&dt).unwrap();
        let grid = [0.0, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
        let pts = aninorm::sweep(&sys, ts, &grid).unwrap();
        for w in pts.windows(2) {
            prop_assert!(w[1].norm >= w[0].norm - 1e-12);
        }
        for pt in &pts {
            prop_assert!(pt.norm <= h * (1.0 + 1e-9));
        }
    }
}

#[test]
fn norm_identity_holds_for_every_time_scale() {
    let sys = random_stable(11, 3, 2, 2, 0.4);
    for t in [0.05, 0.5, 5.0, 50.0] {
        let ts = TimeScale::new(t).unwrap();
        let sol = aninorm::anisotropic_norm(&sys, ts, 0.7).unwrap();
        let lhs = sol.norm_value.powi(2) * sol.q;
        let rhs = 1.0 - 2.0 / sol.input_variance;
        assert!((lhs - rhs).abs() < 1e-10, "T = {t}");
        let wc = aninorm::worst_case_filter(&sys, ts, &sol).unwrap();
        let expected = (wc.ct_closed_loop.clone() - sys.a() - sys.b() * &wc.ct_l).norm();
        assert!(expected < 1e-12);
    }
}

#[test]
fn zero_level_is_the_weighted_h2_norm() {
    for seed in 0..5 {
        let sys = random_stable(seed, 3, 2, 3, 0.4);
        let ts = TimeScale::new(0.3).unwrap();
        let sol = aninorm::anisotropic_norm(&sys, ts, 0.0).unwrap();
        let dt = bilinear::to_discrete(&sys, ts).unwrap();
        let white = aninorm_core::h2_dt(&dt).unwrap() / 2f64.sqrt();
        assert!((sol.norm_value - white).abs() <= 1e-12);
        let wc = aninorm::worst_case_filter(&sys, ts, &sol).unwrap();
        assert!(wc.ct_l.norm() == 0.0);
        assert!((wc.ct_m.clone() - aninorm_core::Mat::identity(2, 2)).norm() == 0.0);
    }
}

#[test]
fn tolerance_option_is_honoured() {
    let sys = random_stable(3, 2, 1, 1, 0.5);
    let ts = TimeScale::new(1.0).unwrap();
    let loose = aninorm::anisotropic_norm_with(&sys, ts, 0.4, NormOptions { tol: 1e-3 }).unwrap();
    assert!((loose.achieved_anisotropy - 0.4).abs() <= 1e-3);
    assert!(aninorm::anisotropic_norm_with(&sys, ts, 0.4, NormOptions { tol: 0.0 }).is_err());
    assert!(aninorm::anisotropic_norm(&sys, ts, -1.0).is_err());
}
