//! Numerical kernels: Lyapunov equations in both time domains, the
//! q-parameterized Riccati equation behind the anisotropic norm, and a
//! bracketing root finder for monotone scalar functions.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::statespace::DtStateSpace;

/// `ρ(Â) ≥ 1 − SCHUR_MARGIN` is treated as unstable.
pub const SCHUR_MARGIN: f64 = 1e-12;
/// Largest state dimension accepted by the dense Kronecker solve.
pub const CLYAP_MAX_N: usize = 64;
/// Smallest eigenvalue of `I − qDᵀD − BᵀRB` still regarded as positive.
pub const POSITIVITY_FLOOR: f64 = 1e-12;
/// Cap on Riccati fixed-point sweeps.
pub const DARE_MAX_ITER: usize = 100_000;
const RICCATI_RESIDUAL_TOL: f64 = 1e-10;
const ROOT_MAX_ITER: usize = 200;

/// Sum of `Âᵏ Q Âᵏᵀ` by repeated squaring. `closed_loop` must be Schur.
fn smith_doubling(closed_loop: &Mat, rhs: &Mat) -> Mat {
    let mut p = linalg::symmetrize(rhs);
    let mut a = closed_loop.clone();
    for _ in 0..64 {
        let inc = &a * &p * a.transpose();
        let inc_norm = linalg::fro(&inc);
        p += inc;
        if inc_norm <= 1e-17 * (1.0 + linalg::fro(&p)) {
            break;
        }
        a = &a * &a;
    }
    linalg::symmetrize(&p)
}

/// Solves `P = Â P Âᵀ + rhs` for Schur-stable `Â`.
///
/// The solution is refined by one correction step when the doubling sum
/// leaves a residual above `1e-10·(1 + ‖P‖_F)`.
pub fn solve_dlyap(closed_loop: &Mat, rhs: &Mat) -> Result<Mat> {
    let n = closed_loop.nrows();
    if closed_loop.ncols() != n || rhs.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "dlyap: closed loop {:?}, rhs {:?}",
            closed_loop.shape(),
            rhs.shape()
        )));
    }
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    let radius = linalg::spectral_radius(closed_loop);
    if radius >= 1.0 - SCHUR_MARGIN {
        return Err(Error::SpectralRadius { radius });
    }
    let mut p = smith_doubling(closed_loop, rhs);
    for _ in 0..3 {
        let residual = rhs + closed_loop * &p * closed_loop.transpose() - &p;
        if linalg::fro(&residual) <= 1e-12 * (1.0 + linalg::fro(&p)) {
            break;
        }
        p += smith_doubling(closed_loop, &residual);
    }
    Ok(linalg::symmetrize(&p))
}

/// Solves `AᵀQ + QA + rhs = 0` for Hurwitz `A` by a dense Kronecker solve.
pub fn solve_clyap(a: &Mat, rhs: &Mat) -> Result<Mat> {
    let n = a.nrows();
    if a.ncols() != n || rhs.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!("clyap: A {:?}, rhs {:?}", a.shape(), rhs.shape())));
    }
    if n == 0 {
        return Ok(Mat::zeros(0, 0));
    }
    if n > CLYAP_MAX_N {
        return Err(Error::TooLarge { n, limit: CLYAP_MAX_N });
    }
    let abscissa = linalg::spectral_abscissa(a);
    if abscissa >= -1e-12 {
        return Err(Error::SpectralAbscissa { abscissa });
    }
    // vec(AᵀQ + QA) = (I ⊗ Aᵀ + Aᵀ ⊗ I) vec(Q) for column-major vec.
    let nn = n * n;
    let mut k = Mat::zeros(nn, nn);
    for j in 0..n {
        for i in 0..n {
            let row = i + j * n;
            for l in 0..n {
                k[(row, l + j * n)] += a[(l, i)];
                k[(row, i + l * n)] += a[(l, j)];
            }
        }
    }
    let b = DVector::from_iterator(nn, rhs.iter().map(|v| -v));
    let x = k
        .lu()
        .solve(&b)
        .ok_or(Error::SpectralAbscissa { abscissa })?;
    Ok(linalg::symmetrize(&Mat::from_column_slice(n, n, x.as_slice())))
}

/// Why a Riccati solve was declared inadmissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InadmissibleReason {
    /// `I − qDᵀD − BᵀRB` lost positive definiteness.
    PositivityLoss,
    /// The iteration cap was reached without a certified solution.
    NoConvergence,
    /// The limit exists but does not stabilize `A_T + B_T L`.
    SpectralRadius,
}

impl InadmissibleReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            InadmissibleReason::PositivityLoss => "PositivityLoss",
            InadmissibleReason::NoConvergence => "NoConvergence",
            InadmissibleReason::SpectralRadius => "SpectralRadius",
        }
    }
}

/// Admissible solution `(R, L, M)` of the Riccati equation at a given `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DareSolution {
    pub q: f64,
    pub r: Mat,
    pub l: Mat,
    /// `M = (I − qDᵀD − BᵀRB)^{-1/2}`, symmetric positive definite.
    pub m: Mat,
    /// `qDᵀD + BᵀRB`, kept so that `M² − I` and `ln det M²` can be formed
    /// without cancellation for small `q`.
    pub defect: Mat,
    pub closed_loop_radius: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DareOutcome {
    Admissible(DareSolution),
    Inadmissible(InadmissibleReason),
}

impl DareOutcome {
    pub fn admissible(self) -> Option<DareSolution> {
        match self {
            DareOutcome::Admissible(s) => Some(s),
            DareOutcome::Inadmissible(_) => None,
        }
    }
}

/// Pieces of the Riccati map evaluated at a given `R`.
struct RiccatiTerms {
    /// `qDᵀD + BᵀRB`
    defect: Mat,
    /// `I − defect`
    s: Mat,
    /// `BᵀRA + qDᵀC`
    n: Mat,
    s_min: f64,
}

struct Riccati<'a> {
    sys: &'a DtStateSpace,
    q: f64,
    qctc: Mat,
    qdtd: Mat,
    qdtc: Mat,
}

impl<'a> Riccati<'a> {
    fn new(sys: &'a DtStateSpace, q: f64) -> Self {
        let c = sys.c();
        let d = sys.d();
        Self {
            sys,
            q,
            qctc: c.transpose() * c * q,
            qdtd: d.transpose() * d * q,
            qdtc: d.transpose() * c * q,
        }
    }

    fn terms(&self, r: &Mat) -> RiccatiTerms {
        let b = self.sys.b();
        let a = self.sys.a();
        let btr = b.transpose() * r;
        let defect = linalg::symmetrize(&(&self.qdtd + &btr * b));
        let m = defect.nrows();
        let s = Mat::identity(m, m) - &defect;
        let n = &btr * a + &self.qdtc;
        let s_min = linalg::min_sym_eigenvalue(&s);
        RiccatiTerms { defect, s, n, s_min }
    }

    /// `AᵀRA + qCᵀC + Nᵀ S⁻¹ N`
    fn map(&self, r: &Mat, t: &RiccatiTerms) -> Option<Mat> {
        let a = self.sys.a();
        let sinv_n = t.s.clone().cholesky()?.solve(&t.n);
        Some(linalg::symmetrize(&(a.transpose() * r * a + &self.qctc + t.n.transpose() * sinv_n)))
    }

    fn gain(&self, t: &RiccatiTerms) -> Option<Mat> {
        Some(t.s.clone().cholesky()?.solve(&t.n))
    }

    /// Builds and certifies the admissible solution from a candidate `R`.
    fn finalize(&self, r: &Mat, iterations: usize) -> Option<std::result::Result<DareSolution, InadmissibleReason>> {
        let t = self.terms(r);
        if t.s_min <= POSITIVITY_FLOOR {
            return Some(Err(InadmissibleReason::PositivityLoss));
        }
        let next = self.map(r, &t)?;
        let residual = linalg::fro(&(&next - r));
        if residual > RICCATI_RESIDUAL_TOL * (1.0 + linalg::fro(r)) {
            return None;
        }
        let gain = self.gain(&t)?;
        let closed = self.sys.a() + self.sys.b() * &gain;
        let radius = linalg::spectral_radius(&closed);
        if radius >= 1.0 - SCHUR_MARGIN {
            return Some(Err(InadmissibleReason::SpectralRadius));
        }
        let (vals, vecs) = linalg::sym_eig(&t.s);
        let m = linalg::sym_fn(&vals, &vecs, |v| 1.0 / v.sqrt());
        Some(Ok(DareSolution {
            q: self.q,
            r: r.clone(),
            l: gain,
            m,
            defect: t.defect,
            closed_loop_radius: radius,
            residual,
            iterations,
        }))
    }

    /// Newton (policy-evaluation) steps started from an iterate that lies
    /// below the stabilizing solution. Each step solves
    /// `R = A_kᵀ R A_k + q C_kᵀ C_k − L_kᵀ L_k` with `A_k = A + B L_k`,
    /// `C_k = C + D L_k`; iterates stay below the stabilizing solution, so a
    /// loss of positivity proves inadmissibility.
    fn newton(&self, start: &Mat) -> NewtonResult {
        let a = self.sys.a();
        let b = self.sys.b();
        let c = self.sys.c();
        let d = self.sys.d();
        let mut r = start.clone();
        let mut last_change = f64::INFINITY;
        for step in 0..50 {
            let t = self.terms(&r);
            if t.s_min <= POSITIVITY_FLOOR {
                return if step > 0 { NewtonResult::Inadmissible } else { NewtonResult::Failed };
            }
            let Some(gain) = self.gain(&t) else {
                return NewtonResult::Failed;
            };
            let closed = a + b * &gain;
            if linalg::spectral_radius(&closed) >= 1.0 - SCHUR_MARGIN {
                return NewtonResult::Failed;
            }
            let ck = c + d * &gain;
            let rhs = ck.transpose() * &ck * self.q - gain.transpose() * &gain;
            let Ok(next) = solve_dlyap(&closed.transpose(), &linalg::symmetrize(&rhs)) else {
                return NewtonResult::Failed;
            };
            let change = linalg::fro(&(&next - &r)) / (1.0 + linalg::fro(&next));
            r = next;
            if change <= 1e-14 || (step >= 3 && change >= last_change && change < 1e-9) {
                return NewtonResult::Converged(r);
            }
            last_change = change;
        }
        NewtonResult::Converged(r)
    }
}

enum NewtonResult {
    Converged(Mat),
    Inadmissible,
    Failed,
}

/// Solves the Riccati equation of the anisotropic-norm computation,
///
/// ```text
/// R = A_TᵀRA_T + qC_TᵀC_T + LᵀM⁻²L
/// L = M²(B_TᵀRA_T + qD_TᵀC_T)
/// M = (I − qD_TᵀD_T − B_TᵀRB_T)^{-1/2}
/// ```
///
/// by monotone fixed-point iteration from `R = 0`, polished by Newton steps
/// once the iterate is close enough for the Newton closed loop to be stable.
/// Admissibility means `M` is well defined and `A_T + B_T L` is Schur.
pub fn dare_q(sys: &DtStateSpace, q: f64) -> Result<DareOutcome> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidArgument(format!("q must be positive and finite, got {q}")));
    }
    sys.require_schur()?;
    let ric = Riccati::new(sys, q);
    let n = sys.n();
    let mut r = Mat::zeros(n, n);
    let mut next_polish = 10;
    for k in 0..DARE_MAX_ITER {
        let t = ric.terms(&r);
        if t.s_min <= POSITIVITY_FLOOR {
            return Ok(DareOutcome::Inadmissible(InadmissibleReason::PositivityLoss));
        }
        let Some(next) = ric.map(&r, &t) else {
            return Ok(DareOutcome::Inadmissible(InadmissibleReason::PositivityLoss));
        };
        let step = linalg::fro(&(&next - &r)) / (1.0 + linalg::fro(&next));
        r = next;
        if step <= 1e-15 {
            return Ok(match ric.finalize(&r, k + 1) {
                Some(Ok(sol)) => DareOutcome::Admissible(sol),
                Some(Err(reason)) => DareOutcome::Inadmissible(reason),
                None => DareOutcome::Inadmissible(InadmissibleReason::NoConvergence),
            });
        }
        if k + 1 == next_polish {
            next_polish *= 2;
            match ric.newton(&r) {
                NewtonResult::Converged(candidate) => {
                    if let Some(Ok(sol)) = ric.finalize(&candidate, k + 1) {
                        return Ok(DareOutcome::Admissible(sol));
                    }
                }
                NewtonResult::Inadmissible => {
                    return Ok(DareOutcome::Inadmissible(InadmissibleReason::PositivityLoss));
                }
                NewtonResult::Failed => {}
            }
        }
    }
    Ok(DareOutcome::Inadmissible(InadmissibleReason::NoConvergence))
}

/// Root of a nondecreasing function on `[lo, hi]` by safeguarded
/// bisection with secant steps.
///
/// Stops when `|f(x)| ≤ tol_f` or the bracket is narrower than `tol_x`, and
/// returns the evaluated point with the smallest `|f|`. Every evaluation
/// point after the endpoints lies strictly inside the current bracket.
pub fn find_root_monotone<F>(mut f: F, bracket: (f64, f64), tol_f: f64, tol_x: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("invalid bracket ({lo}, {hi})")));
    }
    let mut f_lo = f(lo)?;
    if f_lo.abs() <= tol_f {
        return Ok(lo);
    }
    let mut f_hi = f(hi)?;
    if f_hi.abs() <= tol_f {
        return Ok(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Bracket { lo, hi, f_lo, f_hi });
    }
    let mut width = hi - lo;
    let mut force_bisect = false;
    for _ in 0..ROOT_MAX_ITER {
        if hi - lo <= tol_x {
            return Ok(if f_lo.abs() <= f_hi.abs() { lo } else { hi });
        }
        let mid = 0.5 * (lo + hi);
        let mut x = mid;
        if !force_bisect {
            let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
            let margin = 1e-3 * (hi - lo);
            if secant.is_finite() && secant > lo + margin && secant < hi - margin {
                x = secant;
            }
        }
        if !(x > lo && x < hi) {
            x = mid;
        }
        let fx = f(x)?;
        if fx.abs() <= tol_f {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        // Secant steps that fail to halve the bracket are followed by a
        // plain bisection step.
        let new_width = hi - lo;
        force_bisect = !force_bisect && new_width > 0.5 * width;
        width = new_width;
    }
    Err(Error::MaxIter { iterations: ROOT_MAX_ITER })
}
