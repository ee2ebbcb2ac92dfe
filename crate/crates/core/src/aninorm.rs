//! The `(T, a)`-anisotropic norm and its worst-case input.
//!
//! For admissible `q ∈ (0, 1/‖F_T‖∞²)` the Riccati solution `(R, L, M)`
//! determines a shaping filter `G_T` with realization
//! `(A_T + B_T L, B_T M, L, M)`. With `P` its controllability Gramian and
//! `v = Tr(L P Lᵀ + M²)` the input variance,
//!
//! ```text
//! 𝒜(q)    = −½ ln det(m M² / v)
//! norm(q) = sqrt((1 − m/v) / q)
//! ```
//!
//! and the norm at level `a` is `norm(q)` at the root of `𝒜(q) = a`.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bilinear::{self, TimeScale};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat};
use crate::quadrature::PhiGrid;
use crate::solvers::{self, DareOutcome, DareSolution};
use crate::spectral::{self, Side, SpectralDensity};
use crate::statespace::{self, CtStateSpace, DtStateSpace};

/// Relative gap below `1/‖F_T‖∞²` for the initial upper end of the bracket.
const Q_HI_GAP: f64 = 1e-6;
const Q_LO_FACTOR: f64 = 1e-12;
const GAP_HALVINGS: usize = 40;
const ROUNDNESS_NODES: usize = 64;
const ROUNDNESS_TOL: f64 = 1e-10;

/// Everything Theorem-style formulas derive from one admissible `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QEvaluation {
    pub q: f64,
    pub aniso: f64,
    pub gain: f64,
    pub riccati: DareSolution,
    pub p: Mat,
    pub input_variance: f64,
}

/// Mean anisotropy and norm value at `q`. Fails with `InadmissibleQ` when
/// the Riccati equation has no admissible solution.
pub fn anisotropy_and_gain_of_q(sys: &DtStateSpace, q: f64) -> Result<QEvaluation> {
    let riccati = match solvers::dare_q(sys, q)? {
        DareOutcome::Admissible(s) => s,
        DareOutcome::Inadmissible(reason) => {
            return Err(Error::InadmissibleQ { q, reason: reason.as_str().to_string() })
        }
    };
    let m = sys.m() as f64;
    let closed_loop = sys.a() + sys.b() * &riccati.l;
    let m2 = &riccati.m * &riccati.m;
    let p = solvers::solve_dlyap(&closed_loop, &(sys.b() * &m2 * sys.b().transpose()))?;
    let lpl = (&riccati.l * &p * riccati.l.transpose()).trace();
    // Tr(M²) − m = Tr(M² · defect) since M⁻² = I − defect.
    let excess = lpl + (&m2 * &riccati.defect).trace();
    let input_variance = m + excess;
    let gain = (excess / (q * input_variance)).max(0.0).sqrt();
    // −½ ln det(m M²/v) = ½ (m ln(v/m) + ln det(I − defect))
    let (defect_eigs, _) = linalg::sym_eig(&riccati.defect);
    let logdet_s: f64 = defect_eigs.iter().map(|&d| (-d).ln_1p()).sum();
    let aniso = 0.5 * (m * (excess / m).ln_1p() + logdet_s);
    Ok(QEvaluation { q, aniso: aniso.max(0.0), gain, riccati, p, input_variance })
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// `(q, 𝒜(q))` pairs visited during the search, in evaluation order.
    pub evaluations: Vec<(f64, f64)>,
    /// Adjacent pairs (in `q` order) where `𝒜` decreased.
    pub monotonicity_violations: Vec<((f64, f64), (f64, f64))>,
    pub hinf: f64,
    pub riccati_iterations: usize,
    pub riccati_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnisotropicNormSolution {
    /// `0` for the white-noise sentinel at `a = 0`.
    pub q: f64,
    pub r_t: Mat,
    pub l_t: Mat,
    pub m_t: Mat,
    pub p_t: Mat,
    pub norm_value: f64,
    pub requested_anisotropy: f64,
    pub achieved_anisotropy: f64,
    pub input_variance: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOptions {
    /// Target accuracy of `|𝒜(q) − a|`.
    pub tol: f64,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self { tol: 1e-9 }
    }
}

/// `true` when `Λ_T(φ) = λI` for one constant `λ` on a 64-node grid.
pub fn is_round(sys: &DtStateSpace) -> Result<bool> {
    let grid = PhiGrid::new(ROUNDNESS_NODES)?;
    let m = sys.m();
    let lams = grid
        .nodes()
        .map(|phi| spectral::gram_dt(sys, phi, Side::LeftFstarF))
        .collect::<Result<Vec<CMat>>>()?;
    let mean = lams.iter().map(|l| linalg::trace_re(l) / m as f64).sum::<f64>() / lams.len() as f64;
    let scaled = CMat::identity(m, m) * Complex64::new(mean, 0.0);
    let spread = lams.iter().map(|l| (l - &scaled).norm()).fold(0.0, f64::max);
    Ok(spread <= ROUNDNESS_TOL * mean.max(1.0))
}

fn white_sentinel(dt: &DtStateSpace, a: f64) -> Result<AnisotropicNormSolution> {
    let (n, m) = (dt.n(), dt.m());
    let p_t = solvers::solve_dlyap(dt.a(), &(dt.b() * dt.b().transpose()))?;
    Ok(AnisotropicNormSolution {
        q: 0.0,
        r_t: Mat::zeros(n, n),
        l_t: Mat::zeros(m, n),
        m_t: Mat::identity(m, m),
        p_t,
        norm_value: statespace::h2_dt(dt)? / (m as f64).sqrt(),
        requested_anisotropy: a,
        achieved_anisotropy: 0.0,
        input_variance: m as f64,
        diagnostics: Diagnostics::default(),
    })
}

pub fn anisotropic_norm(sys: &CtStateSpace, ts: TimeScale, a: f64) -> Result<AnisotropicNormSolution> {
    anisotropic_norm_with(sys, ts, a, NormOptions::default())
}

pub fn anisotropic_norm_with(sys: &CtStateSpace, ts: TimeScale, a: f64, opts: NormOptions) -> Result<AnisotropicNormSolution> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidArgument(format!("mean anisotropy level must be finite and nonnegative, got {a}")));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let dt = bilinear::to_discrete(sys, ts)?;
    if a == 0.0 {
        return white_sentinel(&dt, a);
    }
    anisotropic_norm_dt(&dt, a, opts)
}

/// Solves `𝒜(q) = a` for a discrete system.
pub fn anisotropic_norm_dt(dt: &DtStateSpace, a: f64, opts: NormOptions) -> Result<AnisotropicNormSolution> {
    if a == 0.0 {
        return white_sentinel(dt, a);
    }
    if is_round(dt)? {
        return Err(Error::NonroundRequired);
    }
    let hinf = statespace::hinf_dt(dt)?;
    let boundary = 1.0 / (hinf * hinf);
    let mut visited: Vec<(f64, f64)> = Vec::new();
    let mut best: Option<QEvaluation> = None;

    let eval = |q: f64, visited: &mut Vec<(f64, f64)>| -> Result<QEvaluation> {
        let e = anisotropy_and_gain_of_q(dt, q)?;
        visited.push((q, e.aniso));
        Ok(e)
    };

    // Upper end: move toward the boundary until 𝒜 exceeds a.
    let mut gap = Q_HI_GAP;
    let mut q_hi = (1.0 - gap) * boundary;
    let mut reached = false;
    for _ in 0..=GAP_HALVINGS {
        match eval(q_hi, &mut visited) {
            Ok(e) => {
                let above = e.aniso >= a;
                if best.as_ref().is_none_or(|b| e.aniso > b.aniso) {
                    best = Some(e);
                }
                if above {
                    reached = true;
                    break;
                }
            }
            Err(Error::InadmissibleQ { .. }) => break,
            Err(e) => return Err(e),
        }
        gap *= 0.5;
        let next = (1.0 - gap) * boundary;
        if next <= q_hi {
            break;
        }
        q_hi = next;
    }
    if !reached {
        let b = best.ok_or(Error::InadmissibleQ { q: q_hi, reason: "no admissible q near the boundary".into() })?;
        return Err(Error::AnisotropyOutOfReach {
            requested: a,
            max_achievable: b.aniso,
            q_max: b.q,
            norm_at_q_max: b.gain,
        });
    }

    let mut q_lo = Q_LO_FACTOR * boundary;
    let mut lo_eval = eval(q_lo, &mut visited)?;
    let mut shrink = 0;
    while lo_eval.aniso > a {
        shrink += 1;
        if shrink > 20 {
            return Err(Error::Bracket { lo: q_lo, hi: q_hi, f_lo: lo_eval.aniso - a, f_hi: 0.0 });
        }
        q_lo *= 1e-3;
        lo_eval = eval(q_lo, &mut visited)?;
    }

    let q = solvers::find_root_monotone(
        |q| Ok(eval(q, &mut visited)?.aniso - a),
        (q_lo, q_hi),
        opts.tol,
        1e-14 * q_hi,
    )?;
    let e = anisotropy_and_gain_of_q(dt, q)?;

    let mut sorted = visited.clone();
    sorted.sort_by(|x, y| x.0.total_cmp(&y.0));
    sorted.dedup_by(|x, y| x.0 == y.0);
    let monotonicity_violations = sorted
        .windows(2)
        .filter(|w| w[1].1 < w[0].1)
        .map(|w| (w[0], w[1]))
        .collect();

    Ok(AnisotropicNormSolution {
        q,
        norm_value: e.gain,
        requested_anisotropy: a,
        achieved_anisotropy: e.aniso,
        input_variance: e.input_variance,
        diagnostics: Diagnostics {
            evaluations: visited,
            monotonicity_violations,
            hinf,
            riccati_iterations: e.riccati.iterations,
            riccati_residual: e.riccati.residual,
        },
        r_t: e.riccati.r,
        l_t: e.riccati.l,
        m_t: e.riccati.m,
        p_t: e.p,
    })
}

/// Worst-case shaping filter in both domains.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseFilter {
    /// `A_T + B_T L_T`
    pub dt_closed_loop: Mat,
    /// `B_T M_T`
    pub dt_input_gain: Mat,
    pub dt_l: Mat,
    pub dt_m: Mat,
    /// `L_T (I + A_T + B_T L_T)⁻¹`
    pub ct_l: Mat,
    /// `(I − ct_L B_T) M_T`; not symmetric in general.
    pub ct_m: Mat,
    /// `A + B ct_L`
    pub ct_closed_loop: Mat,
}

impl WorstCaseFilter {
    /// Discrete shaping filter `G_T` with realization
    /// `(A_T + B_T L_T, B_T M_T, L_T, M_T)`.
    pub fn dt_filter(&self) -> Result<DtStateSpace> {
        DtStateSpace::new(self.dt_closed_loop.clone(), self.dt_input_gain.clone(), self.dt_l.clone(), self.dt_m.clone())
    }

    pub fn density(&self) -> Result<SpectralDensity> {
        Ok(SpectralDensity::RationalDt(self.dt_filter()?))
    }
}

pub fn worst_case_filter(sys: &CtStateSpace, ts: TimeScale, sol: &AnisotropicNormSolution) -> Result<WorstCaseFilter> {
    let dt = bilinear::to_discrete(sys, ts)?;
    let n = dt.n();
    if sol.l_t.shape() != (dt.m(), n) || sol.m_t.shape() != (dt.m(), dt.m()) {
        return Err(Error::DimensionMismatch("solution does not match the system".into()));
    }
    let acl = dt.a() + dt.b() * &sol.l_t;
    let eye = Mat::identity(n, n);
    let (shift_inv, condition) =
        linalg::inverse_with_condition(&(&eye + &acl)).ok_or(Error::SingularShift { condition: f64::INFINITY })?;
    if condition > 1e14 {
        return Err(Error::SingularShift { condition });
    }
    let ct_l = &sol.l_t * &shift_inv;
    let ct_m = (Mat::identity(dt.m(), dt.m()) - &ct_l * dt.b()) * &sol.m_t;
    let ct_closed_loop = sys.a() + sys.b() * &ct_l;

    let radius = linalg::spectral_radius(&acl);
    if radius >= 1.0 {
        return Err(Error::SpectralRadius { radius });
    }
    let expected = &shift_inv * (&acl - &eye) * ts.omega();
    let mismatch = linalg::fro(&(&ct_closed_loop - &expected));
    if mismatch > 1e-9 * (1.0 + linalg::fro(&expected)) {
        return Err(Error::Consistency(format!("continuous closed loop differs from its discrete image by {mismatch:e}")));
    }
    let abscissa = linalg::spectral_abscissa(&ct_closed_loop);
    if abscissa >= 0.0 {
        return Err(Error::NotHurwitz { abscissa });
    }
    Ok(WorstCaseFilter {
        dt_input_gain: dt.b() * &sol.m_t,
        dt_closed_loop: acl,
        dt_l: sol.l_t.clone(),
        dt_m: sol.m_t.clone(),
        ct_l,
        ct_m,
        ct_closed_loop,
    })
}

/// Largest deviation of `Θ_T* Θ_T` from `I_m` on `grid`, where
/// `Θ_T = [√q F_T; G_T⁻¹]`, combined with the relative residual of the
/// variance identity `E|ϖ|² = q E|ζ|² + m`. The variances are integrated
/// on `grid` refined, if needed, to resolve the worst-case poles.
pub fn isometry_residual(sys: &DtStateSpace, sol: &AnisotropicNormSolution, grid: PhiGrid) -> Result<f64> {
    if sol.q <= 0.0 {
        return Err(Error::InvalidArgument("isometry needs q > 0; the white-noise sentinel has none".into()));
    }
    let (n, m, p) = (sys.n(), sys.m(), sys.p());
    let sq = sol.q.sqrt();
    let (m_inv, _) = linalg::inverse_with_condition(&sol.m_t).ok_or(Error::SingularShift { condition: f64::INFINITY })?;
    let mut c = Mat::zeros(p + m, n);
    let mut d = Mat::zeros(p + m, m);
    c.rows_mut(0, p).copy_from(&(sys.c() * sq));
    c.rows_mut(p, m).copy_from(&(-(&m_inv * &sol.l_t)));
    d.rows_mut(0, p).copy_from(&(sys.d() * sq));
    d.rows_mut(p, m).copy_from(&m_inv);
    let theta = DtStateSpace::new(sys.a().clone(), sys.b().clone(), c, d)?;
    let eye = CMat::identity(m, m);
    let worst = (0..grid.len())
        .into_par_iter()
        .map(|j| Ok((spectral::gram_dt(&theta, grid.node(j), Side::LeftFstarF)? - &eye).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);

    let acl = sys.a() + sys.b() * &sol.l_t;
    let fine = PhiGrid::resolving(linalg::spectral_radius(&acl));
    let fine = if fine.len() > grid.len() { fine } else { grid };
    let input = DtStateSpace::new(acl.clone(), sys.b() * &sol.m_t, sol.l_t.clone(), sol.m_t.clone())?;
    let output = DtStateSpace::new(acl, sys.b() * &sol.m_t, sys.c() + sys.d() * &sol.l_t, sys.d() * &sol.m_t)?;
    let var_in = spectral::output_power_dt(&input, fine)?;
    let var_out = spectral::output_power_dt(&output, fine)?;
    let variance = (var_in - sol.q * var_out - m as f64).abs() / var_in;
    Ok(worst.max(variance))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub a: f64,
    pub norm: f64,
    pub q: f64,
    /// The level was beyond numerical reach; `norm` and `q` are the values
    /// at the closest admissible `q` to the boundary.
    pub saturated: bool,
}

/// Anisotropic norms over an increasing grid of levels.
pub fn sweep(sys: &CtStateSpace, ts: TimeScale, a_grid: &[f64]) -> Result<Vec<SweepPoint>> {
    if a_grid.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(Error::InvalidArgument("anisotropy levels must be finite and nonnegative".into()));
    }
    if a_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("anisotropy levels must be strictly increasing".into()));
    }
    let dt = bilinear::to_discrete(sys, ts)?;
    a_grid
        .par_iter()
        .map(|&a| match anisotropic_norm_dt(&dt, a, NormOptions::default()) {
            Ok(s) => Ok(SweepPoint { a, norm: s.norm_value, q: s.q, saturated: false }),
            Err(Error::AnisotropyOutOfReach { q_max, norm_at_q_max, .. }) => {
                Ok(SweepPoint { a, norm: norm_at_q_max, q: q_max, saturated: true })
            }
            Err(e) => Err(e),
        })
        .collect()
}

/// Unit vector helper for concentrated densities.
pub fn unit(v: &[Complex64]) -> DVector<Complex64> {
    let x = DVector::from_column_slice(v);
    let n = x.norm();
    x / Complex64::new(n, 0.0)
}
