//! Spectral densities, RMS gains and mean anisotropy.
//!
//! A continuous density `S(ω)` is carried to the circle by
//! `S_T(φ) = S(−Ω tan(φ/2))`. Since `Σ(ω) dω = dφ` under `φ = 2 arctan(ωT)`,
//! every `Σ`-weighted integral over the real line becomes an integral over
//! the punctured circle, where the trapezoid rule converges geometrically
//! for rational integrands.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::bilinear::{self, TimeScale};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat};
use crate::quadrature::{adaptive_gk, PhiGrid};
use crate::statespace::{self, CtStateSpace, DtStateSpace};

/// Determinants at or below this value break the Paley–Wiener condition.
pub const DET_FLOOR: f64 = 1e-300;
const MIN_DENOMINATOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// `κ I_dim`
    ConstantScalar { kappa: f64, dim: usize },
    /// `S(ω) = G(iω) G(iω)*` for a square continuous shaping filter.
    RationalCt(CtStateSpace),
    /// `S_T(φ) = G_T(e^{iφ}) G_T(e^{iφ})*` for a square discrete shaping filter.
    RationalDt(DtStateSpace),
    /// Pair of Cauchy peaks at `±ω₀` of width `γ` carrying `u u*` and `ū uᵀ`.
    Concentrated { omega0: f64, u: DVector<Complex64>, gamma: f64 },
}

impl SpectralDensity {
    pub fn dim(&self) -> usize {
        match self {
            SpectralDensity::ConstantScalar { dim, .. } => *dim,
            SpectralDensity::RationalCt(g) => g.p(),
            SpectralDensity::RationalDt(g) => g.p(),
            SpectralDensity::Concentrated { u, .. } => u.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralDensity::ConstantScalar { kappa, dim } => {
                if !(kappa.is_finite() && *kappa > 0.0) || *dim == 0 {
                    return Err(Error::InvalidArgument(format!("constant density needs kappa > 0 and dim > 0, got {kappa}, {dim}")));
                }
            }
            SpectralDensity::RationalCt(g) => {
                if g.m() != g.p() {
                    return Err(Error::DimensionMismatch(format!("shaping filter is {}x{}, expected square", g.p(), g.m())));
                }
            }
            SpectralDensity::RationalDt(g) => {
                if g.m() != g.p() {
                    return Err(Error::DimensionMismatch(format!("shaping filter is {}x{}, expected square", g.p(), g.m())));
                }
            }
            SpectralDensity::Concentrated { omega0, u, gamma } => {
                let norm = u.norm();
                if !(gamma.is_finite() && *gamma > 0.0 && omega0.is_finite()) || u.is_empty() {
                    return Err(Error::InvalidArgument("concentrated density needs finite omega0, gamma > 0".into()));
                }
                if (norm - 1.0).abs() > 1e-10 {
                    return Err(Error::InvalidArgument(format!("direction must be a unit vector, |u| = {norm}")));
                }
            }
        }
        Ok(())
    }

    /// Continuous-frequency value `S(ω)`. Discrete filters are evaluated at
    /// the circle point corresponding to `ω`.
    pub fn eval_ct(&self, omega: f64, ts: TimeScale) -> Result<CMat> {
        match self {
            SpectralDensity::ConstantScalar { kappa, dim } => Ok(CMat::identity(*dim, *dim) * Complex64::new(*kappa, 0.0)),
            SpectralDensity::RationalCt(g) => gram_ct(g, omega, Side::RightGGstar),
            SpectralDensity::RationalDt(g) => gram_dt(g, -ts.phi_of_omega(omega), Side::RightGGstar),
            SpectralDensity::Concentrated { omega0, u, gamma } => {
                let w1 = gamma / PI / (gamma * gamma + (omega - omega0).powi(2));
                let w2 = gamma / PI / (gamma * gamma + (omega + omega0).powi(2));
                let uu = u * u.adjoint();
                let conj = u.map(|v| v.conj());
                let vv = &conj * conj.adjoint();
                Ok(linalg::hermitian_part(&(uu * Complex64::new(w1, 0.0) + vv * Complex64::new(w2, 0.0))))
            }
        }
    }

    /// Circle value `S_T(φ)`.
    pub fn eval_dt(&self, phi: f64, ts: TimeScale) -> Result<CMat> {
        match self {
            SpectralDensity::RationalDt(g) => gram_dt(g, phi, Side::RightGGstar),
            SpectralDensity::ConstantScalar { .. } => self.eval_ct(0.0, ts),
            _ => self.eval_ct(-ts.omega_of_phi(phi), ts),
        }
    }
}

/// Which Gram product of a transfer matrix to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `F*F`, the gain matrix `Λ`.
    LeftFstarF,
    /// `GG*`, a spectral density.
    RightGGstar,
}

fn gram(f: CMat, side: Side) -> CMat {
    let g = match side {
        Side::LeftFstarF => f.adjoint() * f,
        Side::RightGGstar => &f * f.adjoint(),
    };
    linalg::hermitian_part(&g)
}

/// `Σ(ω) = 2T / (1 + (ωT)²)`, the OU low-pass weighting.
pub fn sigma(omega: f64, ts: TimeScale) -> f64 {
    let t = ts.t();
    2.0 * t / (1.0 + (omega * t).powi(2))
}

pub fn gram_ct(sys: &CtStateSpace, omega: f64, side: Side) -> Result<CMat> {
    Ok(gram(statespace::eval_tf_ct(sys, Complex64::new(0.0, omega))?, side))
}

pub fn gram_dt(sys: &DtStateSpace, phi: f64, side: Side) -> Result<CMat> {
    Ok(gram(statespace::eval_tf_dt(sys, Complex64::from_polar(1.0, phi))?, side))
}

/// Evaluates `f` at every grid node concurrently, keeping node order.
fn on_grid<T, F>(grid: &PhiGrid, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(f64) -> Result<T> + Sync,
{
    (0..grid.len()).into_par_iter().map(|j| f(grid.node(j))).collect()
}

fn check_dim(sys_m: usize, s: &SpectralDensity) -> Result<()> {
    s.validate()?;
    if s.dim() != sys_m {
        return Err(Error::DimensionMismatch(format!("density is {0}x{0}, system has {sys_m} inputs", s.dim())));
    }
    Ok(())
}

fn gain_ratio(num: f64, den: f64) -> Result<f64> {
    if !(den > MIN_DENOMINATOR) {
        return Err(Error::ZeroDenominator(den));
    }
    Ok((num / den).max(0.0).sqrt())
}

/// Concentrated densities on the `θ` chart `ω = ±ω₀ + γ tan θ`, where the
/// Cauchy weights become the uniform measure `dθ/π`. Returns the two
/// `Σ`-weighted integrals `(∫⟨Λ,S⟩Σ dω, ∫Tr S Σ dω)`.
fn concentrated_integrals(sys: &CtStateSpace, omega0: f64, u: &DVector<Complex64>, gamma: f64, ts: TimeScale) -> Result<(f64, f64)> {
    let conj = u.map(|v| v.conj());
    let uu = u.norm_squared();
    let quad = |x: &DVector<Complex64>, lam: &CMat| (x.adjoint() * lam * x)[(0, 0)].re;
    let integrand = |theta: f64| -> Result<Vec<f64>> {
        let tan = theta.tan();
        let w1 = omega0 + gamma * tan;
        let w2 = -omega0 + gamma * tan;
        let s1 = sigma(w1, ts);
        let s2 = sigma(w2, ts);
        let l1 = gram_ct(sys, w1, Side::LeftFstarF)?;
        let l2 = gram_ct(sys, w2, Side::LeftFstarF)?;
        Ok(vec![(s1 * quad(u, &l1) + s2 * quad(&conj, &l2)) / PI, (s1 + s2) * uu / PI])
    };
    let h = 0.5 * PI;
    let omega = ts.omega();
    let mut breaks = Vec::new();
    for centre in [-omega0, omega0] {
        for shift in [-omega, 0.0, omega] {
            breaks.push(((centre + shift) / gamma).atan());
        }
    }
    let v = adaptive_gk(integrand, -h, h, &breaks, 16, 2, 1e-15, 1e-13)?;
    Ok((v[0], v[1]))
}

/// RMS gain of `sys` for inputs with density `s`, low-pass filtered at
/// time scale `T`:
///
/// ```text
/// sqrt( ∫⟨Λ_T(φ), S_T(φ)⟩ dφ / ∫ Tr S_T(φ) dφ )
/// ```
///
/// Rational densities use the trapezoid rule on `grid`; concentrated ones
/// are integrated adaptively around their peaks.
pub fn rms_gain(sys: &CtStateSpace, s: &SpectralDensity, ts: TimeScale, grid: PhiGrid) -> Result<f64> {
    check_dim(sys.m(), s)?;
    if let SpectralDensity::Concentrated { omega0, u, gamma } = s {
        sys.require_hurwitz()?;
        let (num, den) = concentrated_integrals(sys, *omega0, u, *gamma, ts)?;
        return gain_ratio(num, den);
    }
    let dt = bilinear::to_discrete(sys, ts)?;
    let terms = on_grid(&grid, |phi| {
        let lam = gram_dt(&dt, phi, Side::LeftFstarF)?;
        let st = s.eval_dt(phi, ts)?;
        Ok((linalg::frobenius_inner(&lam, &st), linalg::trace_re(&st)))
    })?;
    let num: Vec<f64> = terms.iter().map(|t| t.0).collect();
    let den: Vec<f64> = terms.iter().map(|t| t.1).collect();
    gain_ratio(grid.circle_mean(&num), grid.circle_mean(&den))
}

/// The same gain computed on the real line with `Σ(ω)` as an explicit
/// weight and the continuous transfer function, by adaptive quadrature on
/// the chart `ω = Ω t/(1 − t²)`.
pub fn rms_gain_omega(sys: &CtStateSpace, s: &SpectralDensity, ts: TimeScale) -> Result<f64> {
    check_dim(sys.m(), s)?;
    sys.require_hurwitz()?;
    let omega = ts.omega();
    let integrand = |t: f64| -> Result<Vec<f64>> {
        let den = 1.0 - t * t;
        if den <= 0.0 {
            return Ok(vec![0.0, 0.0]);
        }
        let w = omega * t / den;
        let jac = omega * (1.0 + t * t) / (den * den);
        let weight = sigma(w, ts) * jac;
        let lam = gram_ct(sys, w, Side::LeftFstarF)?;
        let sw = s.eval_ct(w, ts)?;
        Ok(vec![weight * linalg::frobenius_inner(&lam, &sw), weight * linalg::trace_re(&sw)])
    };
    // Preimages of ±ω₀ under the chart, for peaked densities.
    let mut breaks = vec![0.0];
    if let SpectralDensity::Concentrated { omega0, .. } = s {
        for w0 in [-omega0, *omega0] {
            let r = w0 / omega;
            let t = if r == 0.0 { 0.0 } else { (-1.0 + (1.0 + 4.0 * r * r).sqrt()) / (2.0 * r) };
            breaks.push(t);
        }
    }
    let v = adaptive_gk(integrand, -1.0, 1.0, &breaks, 32, 2, 1e-15, 1e-12)?;
    gain_ratio(v[0], v[1])
}

/// White-noise gain `‖F_T‖₂/√m` by the Gramian route.
pub fn white_gain(sys: &CtStateSpace, ts: TimeScale) -> Result<f64> {
    let dt = bilinear::to_discrete(sys, ts)?;
    Ok(statespace::h2_dt(&dt)? / (sys.m() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainLimits {
    /// `‖F(0)‖_F/√m`, reached as `T → ∞`.
    pub limit_t_inf: f64,
    /// `‖D‖_F/√m`, reached as `T → 0`.
    pub limit_t_zero: f64,
    /// `‖F‖₂ √(2/m)`, the coefficient of `√T` as `T → 0` for strictly
    /// proper systems.
    pub small_t_coeff: Option<f64>,
}

pub fn gain_limits(sys: &CtStateSpace) -> Result<GainLimits> {
    sys.require_hurwitz()?;
    let m = sys.m() as f64;
    let limit_t_inf = linalg::fro(&sys.dc_gain()?) / m.sqrt();
    let limit_t_zero = linalg::fro(sys.d()) / m.sqrt();
    let small_t_coeff = match statespace::h2_ct(sys) {
        Ok(h2) => Some(h2 * (2.0 / m).sqrt()),
        Err(Error::NotStrictlyProper) => None,
        Err(e) => return Err(e),
    };
    Ok(GainLimits { limit_t_inf, limit_t_zero, small_t_coeff })
}

/// Per-node `ln det S_T(φ)`. Returns `None` when more than one node falls
/// below [`DET_FLOOR`]; a single such node is clamped to the floor.
fn log_dets(s: &SpectralDensity, ts: TimeScale, grid: &PhiGrid) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    s.validate()?;
    let vals = on_grid(grid, |phi| {
        let st = s.eval_dt(phi, ts)?;
        Ok((linalg::hermitian_det(&st), linalg::trace_re(&st)))
    })?;
    let bad = vals.iter().filter(|v| !(v.0 > DET_FLOOR)).count();
    if bad > 1 {
        return Ok(None);
    }
    let ld = vals.iter().map(|v| v.0.max(DET_FLOOR).ln()).collect();
    let tr = vals.iter().map(|v| v.1).collect();
    Ok(Some((ld, tr)))
}

/// `E|ϖ₀|² = (1/2π) ∫ Tr S_T dφ`; concentrated densities use the adaptive
/// peak chart.
fn input_power(s: &SpectralDensity, ts: TimeScale, grid: &PhiGrid, traces: &[f64]) -> Result<f64> {
    if let SpectralDensity::Concentrated { omega0, u, gamma } = s {
        let one = CtStateSpace::static_gain(Mat::identity(u.len(), u.len()))?;
        let (_, den) = concentrated_integrals(&one, *omega0, u, *gamma, ts)?;
        return Ok(den / (2.0 * PI));
    }
    Ok(grid.circle_mean(traces))
}

/// `ln det Γ = (1/2π) ∫ ln det S_T(φ) dφ`, the one-step prediction error
/// log-determinant. `-inf` when the density is rank deficient.
pub fn innovations_logdet(s: &SpectralDensity, ts: TimeScale, grid: PhiGrid) -> Result<f64> {
    Ok(match log_dets(s, ts, &grid)? {
        Some((ld, _)) => grid.circle_mean(&ld),
        None => f64::NEG_INFINITY,
    })
}

/// Mean anisotropy `𝒜 = −½ (ln det Γ − m ln(E|ϖ₀|²/m))`. `+inf` when the
/// density is rank deficient on the circle.
pub fn mean_anisotropy(s: &SpectralDensity, ts: TimeScale, grid: PhiGrid) -> Result<f64> {
    let Some((ld, tr)) = log_dets(s, ts, &grid)? else {
        return Ok(f64::INFINITY);
    };
    let m = s.dim() as f64;
    let power = input_power(s, ts, &grid, &tr)?;
    if !(power > 0.0) {
        return Err(Error::ZeroDenominator(power));
    }
    let value = -0.5 * (grid.circle_mean(&ld) - m * (power / m).ln());
    Ok(value.max(0.0))
}

/// Mean anisotropy as the circle average of `−½ ln det(m S_T(φ)/E|ϖ₀|²)`.
/// Algebraically equal to [`mean_anisotropy`]; kept as a cross-check.
pub fn mean_anisotropy_pointwise(s: &SpectralDensity, ts: TimeScale, grid: PhiGrid) -> Result<f64> {
    let Some((ld, tr)) = log_dets(s, ts, &grid)? else {
        return Ok(f64::INFINITY);
    };
    let m = s.dim() as f64;
    let power = input_power(s, ts, &grid, &tr)?;
    let shift = m * (m / power).ln();
    let per_node: Vec<f64> = ld.iter().map(|l| -0.5 * (l + shift)).collect();
    Ok(grid.circle_mean(&per_node))
}

/// `E[w_k w_{k+lag}ᵀ] = (1/2π) ∫ e^{i·lag·φ} S_T(φ) dφ` (real part).
pub fn autocovariance(s: &SpectralDensity, lag: i64, ts: TimeScale, grid: PhiGrid) -> Result<Mat> {
    s.validate()?;
    let m = s.dim();
    let vals = on_grid(&grid, |phi| {
        let st = s.eval_dt(phi, ts)?;
        Ok(st * Complex64::from_polar(1.0, lag as f64 * phi))
    })?;
    let mut acc = CMat::zeros(m, m);
    for v in &vals {
        acc += v;
    }
    acc /= Complex64::new(grid.len() as f64, 0.0);
    Ok(acc.map(|v| v.re))
}

/// `(1/2π) ∫ Tr G_T G_T* dφ` for a discrete system of any shape; the
/// variance of its output under unit white noise.
pub fn output_power_dt(sys: &DtStateSpace, grid: PhiGrid) -> Result<f64> {
    let tr = on_grid(&grid, |phi| Ok(linalg::trace_re(&gram_dt(sys, phi, Side::RightGGstar)?)))?;
    Ok(grid.circle_mean(&tr))
}

/// RMS gains under concentrated densities of decreasing width. As `γ ↓ 0`
/// the values approach `sqrt(u* Λ(ω₀) u)`.
pub fn concentrated_gain(
    sys: &CtStateSpace,
    ts: TimeScale,
    omega0: f64,
    u: &DVector<Complex64>,
    gammas: &[f64],
) -> Result<Vec<f64>> {
    gammas
        .iter()
        .map(|&gamma| {
            let s = SpectralDensity::Concentrated { omega0, u: u.clone(), gamma };
            rms_gain(sys, &s, ts, PhiGrid::default())
        })
        .collect()
}
