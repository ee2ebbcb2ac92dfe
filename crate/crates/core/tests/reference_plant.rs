//! Four-state plant at T = 0.1890. Reference values come from an
//! independent dense-matrix computation on the same 4-decimal inputs.

use aninorm_core::bilinear::{self, TimeScale};
use aninorm_core::statespace::{mat, validate_ct};
use aninorm_core::{aninorm, examples, h2_dt, hinf_dt, linalg, Mat};

fn ts() -> TimeScale {
    TimeScale::new(0.1890).unwrap()
}

fn max_abs(x: &Mat) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[test]
fn spectrum_and_time_bounds() {
    let r = validate_ct(&examples::four_state_plant());
    assert!(r.hurwitz);
    let mut real: Vec<f64> = r.eigenvalues.iter().filter(|l| l.im.abs() < 1e-12).map(|l| l.re).collect();
    real.sort_by(f64::total_cmp);
    assert!((real[0] + 0.759534).abs() < 1e-5, "{real:?}");
    assert!((real[1] + 0.238576).abs() < 1e-5, "{real:?}");
    let pair = r.eigenvalues.iter().find(|l| l.im > 0.0).unwrap();
    assert!((pair.re + 0.2406).abs() < 5e-4 && (pair.im - 2.0265).abs() < 5e-4, "{pair}");
    assert!((r.fast_bound - 0.49002).abs() < 1e-5);
    assert!((r.slow_bound - 4.19153).abs() < 1e-5);
}

#[test]
fn conversion_matches_printed_block_to_rounding_of_inputs() {
    let printed = mat(
        6,
        7,
        &[
            0.5246, 0.1804, -0.3191, -0.3102, 0.0442, -0.1691, -0.0622, //
            0.1844, 0.8411, 0.8756, -0.2496, -0.0442, -0.2533, -0.1464, //
            -0.3739, -0.6849, 0.6671, 0.0505, -0.3604, 0.2125, 0.2644, //
            0.1758, -0.2185, 0.3503, 1.0034, -0.1540, 0.0891, 0.1317, //
            -0.5696, -0.1267, -0.9532, -1.8180, -0.2815, 0.9332, -0.1675, //
            -0.1803, -2.3962, -3.3308, -1.9290, -1.4465, 0.6799, -0.1520,
        ],
    );
    let dt = bilinear::to_discrete(&examples::four_state_plant(), ts()).unwrap();
    let mut block = Mat::zeros(6, 7);
    block.view_mut((0, 0), (4, 4)).copy_from(dt.a());
    block.view_mut((0, 4), (4, 3)).copy_from(dt.b());
    block.view_mut((4, 0), (2, 4)).copy_from(dt.c());
    block.view_mut((4, 4), (2, 3)).copy_from(dt.d());
    assert!(max_abs(&(block - printed)) < 1e-3);
}

#[test]
fn norms() {
    let dt = bilinear::to_discrete(&examples::four_state_plant(), ts()).unwrap();
    let h2 = h2_dt(&dt).unwrap() / 3f64.sqrt();
    assert!((h2 - 4.62109).abs() < 1e-5, "{h2}");
    assert!((h2 - 4.6211).abs() < 1e-3);
    let hinf = hinf_dt(&dt).unwrap();
    assert!((hinf - 23.02593).abs() < 1e-5, "{hinf}");
}

#[test]
fn anisotropic_norm_and_worst_case() {
    let sys = examples::four_state_plant();
    let sol = aninorm::anisotropic_norm(&sys, ts(), 1.2264).unwrap();
    assert!((sol.norm_value - 17.68537).abs() < 1e-4, "{}", sol.norm_value);
    assert!((sol.q - 0.00188585).abs() < 1e-8, "{}", sol.q);
    let wc = aninorm::worst_case_filter(&sys, ts(), &sol).unwrap();
    let l = mat(
        3,
        4,
        &[
            -0.0286, 0.0285, -0.0657, -0.0423, //
            -0.0220, -0.1366, -0.0369, 0.1185, //
            0.0356, -0.1055, -0.0105, 0.1713,
        ],
    );
    let m = mat(
        3,
        3,
        &[
            1.0040, 0.0091, 0.0048, //
            -0.0121, 1.0011, 0.0034, //
            -0.0046, -0.0036, 1.0000,
        ],
    );
    assert!(max_abs(&(&wc.ct_l - l)) < 2e-3);
    assert!(max_abs(&(&wc.ct_m - m)) < 2e-3);
    assert!(linalg::spectral_abscissa(&wc.ct_closed_loop) < 0.0);
}

#[test]
fn sweep_climbs_toward_hinf() {
    let sys = examples::four_state_plant();
    let dt = bilinear::to_discrete(&sys, ts()).unwrap();
    let hinf = hinf_dt(&dt).unwrap();
    let grid: Vec<f64> = (0..=30).map(f64::from).collect();
    let pts = aninorm::sweep(&sys, ts(), &grid).unwrap();
    assert!((pts[0].norm - 4.62109).abs() < 1e-5);
    for w in pts.windows(2) {
        assert!(w[1].norm >= w[0].norm);
    }
    let last = pts.last().unwrap();
    assert!((last.norm - hinf).abs() < 0.01 * hinf);
    assert!(last.saturated);
}
