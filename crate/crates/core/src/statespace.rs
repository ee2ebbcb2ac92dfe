//! Continuous- and discrete-time realizations, stability reports, transfer
//! function evaluation and the H2/H∞ norms.
//!
//! The discrete transfer function follows the generating-function
//! convention `F_T(z) = z C_T (I − z A_T)⁻¹ B_T + D_T`, so the unit disk is the
//! stability region and `z = 0` returns the feedthrough.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, Mat};
use crate::quadrature::PhiGrid;
use crate::solvers::{self, DareOutcome};

/// Hurwitz test threshold on the spectral abscissa.
pub const HURWITZ_MARGIN: f64 = 1e-12;
/// Resolvent condition number above which evaluation is refused.
pub const RESOLVENT_CONDITION_LIMIT: f64 = 1e14;

fn check_dims(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Result<(usize, usize, usize)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch(format!("A is {}x{}", n, a.ncols())));
    }
    let m = d.ncols();
    let p = d.nrows();
    if b.nrows() != n || b.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "B is {}x{}, expected {n}x{m}",
            b.nrows(),
            b.ncols()
        )));
    }
    if c.nrows() != p || c.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "C is {}x{}, expected {p}x{n}",
            c.nrows(),
            c.ncols()
        )));
    }
    if m == 0 || p == 0 {
        return Err(Error::DimensionMismatch("input and output dimensions must be positive".into()));
    }
    if ![a, b, c, d].iter().all(|x| linalg::is_finite(x)) {
        return Err(Error::InvalidArgument("realization has non-finite entries".into()));
    }
    Ok((n, m, p))
}

/// Continuous-time realization `dX = AX dt + B dW`, `dZ = CX dt + D dW`.
///
/// Also used for shaping filters, where the same four matrices play the role
/// of `(α, β, c, d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CtStateSpace {
    a: Mat,
    b: Mat,
    c: Mat,
    d: Mat,
}

impl CtStateSpace {
    pub fn new(a: Mat, b: Mat, c: Mat, d: Mat) -> Result<Self> {
        check_dims(&a, &b, &c, &d)?;
        Ok(Self { a, b, c, d })
    }

    /// Static gain `D` with no state.
    pub fn static_gain(d: Mat) -> Result<Self> {
        let (p, m) = d.shape();
        Self::new(Mat::zeros(0, 0), Mat::zeros(0, m), Mat::zeros(p, 0), d)
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }
    pub fn b(&self) -> &Mat {
        &self.b
    }
    pub fn c(&self) -> &Mat {
        &self.c
    }
    pub fn d(&self) -> &Mat {
        &self.d
    }
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn m(&self) -> usize {
        self.d.ncols()
    }
    pub fn p(&self) -> usize {
        self.d.nrows()
    }

    /// Returns `Err(NotHurwitz)` unless every eigenvalue of `A` has real
    /// part below `-1e-12`.
    pub fn require_hurwitz(&self) -> Result<()> {
        let abscissa = linalg::spectral_abscissa(&self.a);
        if abscissa < -HURWITZ_MARGIN {
            Ok(())
        } else {
            Err(Error::NotHurwitz { abscissa })
        }
    }

    /// Static gain matrix `F(0) = D − C A⁻¹ B`.
    pub fn dc_gain(&self) -> Result<Mat> {
        eval_tf_ct(self, Complex64::new(0.0, 0.0)).map(|g| g.map(|v| v.re))
    }
}

/// Discrete-time realization `x_{k+1} = A_T x_k + B_T ϖ_k`, `ζ_k = C_T x_k + D_T ϖ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct DtStateSpace {
    a: Mat,
    b: Mat,
    c: Mat,
    d: Mat,
}

impl DtStateSpace {
    pub fn new(a: Mat, b: Mat, c: Mat, d: Mat) -> Result<Self> {
        check_dims(&a, &b, &c, &d)?;
        Ok(Self { a, b, c, d })
    }

    pub fn static_gain(d: Mat) -> Result<Self> {
        let (p, m) = d.shape();
        Self::new(Mat::zeros(0, 0), Mat::zeros(0, m), Mat::zeros(p, 0), d)
    }

    pub fn a(&self) -> &Mat {
        &self.a
    }
    pub fn b(&self) -> &Mat {
        &self.b
    }
    pub fn c(&self) -> &Mat {
        &self.c
    }
    pub fn d(&self) -> &Mat {
        &self.d
    }
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    pub fn m(&self) -> usize {
        self.d.ncols()
    }
    pub fn p(&self) -> usize {
        self.d.nrows()
    }

    pub fn spectral_radius(&self) -> f64 {
        linalg::spectral_radius(&self.a)
    }

    pub fn require_schur(&self) -> Result<()> {
        let radius = self.spectral_radius();
        if radius < 1.0 - solvers::SCHUR_MARGIN {
            Ok(())
        } else {
            Err(Error::NotSchur { radius })
        }
    }
}

/// Spectrum of `A` and the two transient time scales `1/ρ(A)` and `ρ(A⁻¹)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub eigenvalues: Vec<Complex64>,
    pub hurwitz: bool,
    pub rho_a: f64,
    /// `+inf` when `A` is singular.
    pub rho_ainv: f64,
    pub fast_bound: f64,
    pub slow_bound: f64,
}

pub fn validate_ct(sys: &CtStateSpace) -> StabilityReport {
    let mut eigenvalues = linalg::eigenvalues(sys.a());
    eigenvalues.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    let abscissa = eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let hurwitz = abscissa < -HURWITZ_MARGIN;
    if eigenvalues.is_empty() {
        return StabilityReport {
            eigenvalues,
            hurwitz,
            rho_a: 0.0,
            rho_ainv: 0.0,
            fast_bound: f64::INFINITY,
            slow_bound: f64::INFINITY,
        };
    }
    let rho_a = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let min_mod = eigenvalues.iter().map(|l| l.norm()).fold(f64::INFINITY, f64::min);
    let rho_ainv = if min_mod <= 1e-14 * rho_a.max(1.0) {
        f64::INFINITY
    } else {
        1.0 / min_mod
    };
    StabilityReport {
        eigenvalues,
        hurwitz,
        rho_a,
        rho_ainv,
        fast_bound: 1.0 / rho_a,
        slow_bound: rho_ainv,
    }
}

fn resolvent_product(shift: CMat, left: &Mat, right: &Mat) -> Result<CMat> {
    let (inv, condition) = linalg::inverse_with_condition_c(&shift)
        .ok_or(Error::ResolventSingular { condition: f64::INFINITY })?;
    if condition > RESOLVENT_CONDITION_LIMIT {
        return Err(Error::ResolventSingular { condition });
    }
    Ok(linalg::to_complex(left) * inv * linalg::to_complex(right))
}

/// `F(s) = C (sI − A)⁻¹ B + D`.
pub fn eval_tf_ct(sys: &CtStateSpace, s: Complex64) -> Result<CMat> {
    let n = sys.n();
    let d = linalg::to_complex(sys.d());
    if n == 0 {
        return Ok(d);
    }
    let shift = CMat::from_fn(n, n, |i, j| {
        let diag = if i == j { s } else { Complex64::new(0.0, 0.0) };
        diag - sys.a()[(i, j)]
    });
    Ok(resolvent_product(shift, sys.c(), sys.b())? + d)
}

/// `F_T(z) = z C_T (I − z A_T)⁻¹ B_T + D_T`.
pub fn eval_tf_dt(sys: &DtStateSpace, z: Complex64) -> Result<CMat> {
    let n = sys.n();
    let d = linalg::to_complex(sys.d());
    if n == 0 {
        return Ok(d);
    }
    let shift = CMat::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 } else { 0.0 };
        Complex64::new(diag, 0.0) - z * sys.a()[(i, j)]
    });
    Ok(resolvent_product(shift, sys.c(), sys.b())? * z + d)
}

/// Unweighted H2 norm of the discrete system via the observability Gramian.
pub fn h2_dt(sys: &DtStateSpace) -> Result<f64> {
    let dd = (sys.d().transpose() * sys.d()).trace();
    if sys.n() == 0 {
        return Ok(dd.sqrt());
    }
    let q = solvers::solve_dlyap(&sys.a().transpose(), &(sys.c().transpose() * sys.c()))?;
    let bqb = (sys.b().transpose() * q * sys.b()).trace();
    Ok((dd + bqb).max(0.0).sqrt())
}

/// Standard H2 norm of a strictly proper continuous system.
pub fn h2_ct(sys: &CtStateSpace) -> Result<f64> {
    if sys.d().iter().any(|&v| v != 0.0) {
        return Err(Error::NotStrictlyProper);
    }
    if sys.n() == 0 {
        return Ok(0.0);
    }
    let q = solvers::solve_clyap(sys.a(), &(sys.c().transpose() * sys.c()))?;
    Ok((sys.b().transpose() * q * sys.b()).trace().max(0.0).sqrt())
}

/// Largest singular value of `F_T(e^{iφ})`.
pub fn sigma_max_dt(sys: &DtStateSpace, phi: f64) -> Result<f64> {
    Ok(linalg::max_singular_value(&eval_tf_dt(sys, Complex64::from_polar(1.0, phi))?))
}

/// Singular values of `F_T` at the nodes of `grid`, one row per node.
pub fn singular_values_dt(sys: &DtStateSpace, grid: &PhiGrid) -> Result<Vec<(f64, Vec<f64>)>> {
    grid.nodes()
        .map(|phi| {
            let f = eval_tf_dt(sys, Complex64::from_polar(1.0, phi))?;
            Ok((phi, linalg::singular_values(&f)))
        })
        .collect()
}

const HINF_SEED_POINTS: usize = 512;
const HINF_REL_TOL: f64 = 1e-8;

/// Golden-section refinement of a local maximum of `σ_max(F_T(e^{iφ}))`
/// bracketed by `[lo, hi]`. Returns the best value found.
fn refine_peak(sys: &DtStateSpace, mut lo: f64, mut hi: f64) -> Result<f64> {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = sigma_max_dt(sys, x1)?;
    let mut f2 = sigma_max_dt(sys, x2)?;
    for _ in 0..80 {
        if hi - lo < 1e-13 {
            break;
        }
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = sigma_max_dt(sys, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = sigma_max_dt(sys, x2)?;
        }
    }
    Ok(f1.max(f2))
}

/// Certified lower bound on `‖F_T‖∞` from a 512-point circle grid with the
/// leading local maxima refined by golden-section search.
pub fn hinf_lower_bound(sys: &DtStateSpace) -> Result<f64> {
    let n = HINF_SEED_POINTS;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let values = (0..n)
        .map(|k| sigma_max_dt(sys, -std::f64::consts::PI + k as f64 * step))
        .collect::<Result<Vec<f64>>>()?;
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&k| {
            let prev = values[(k + n - 1) % n];
            let next = values[(k + 1) % n];
            values[k] >= prev && values[k] >= next
        })
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let mut best = values.iter().copied().fold(0.0, f64::max);
    for &k in peaks.iter().take(8) {
        let centre = -std::f64::consts::PI + k as f64 * step;
        best = best.max(refine_peak(sys, centre - step, centre + step)?);
    }
    Ok(best)
}

/// `q` is admissible for the Riccati equation iff `q < 1/‖F_T‖∞²`.
fn admissible(sys: &DtStateSpace, gamma: f64) -> Result<bool> {
    Ok(matches!(solvers::dare_q(sys, 1.0 / (gamma * gamma))?, DareOutcome::Admissible(_)))
}

/// H∞ norm by bisection on Riccati admissibility, seeded by a grid estimate.
pub fn hinf_dt(sys: &DtStateSpace) -> Result<f64> {
    sys.require_schur()?;
    let seed = hinf_lower_bound(sys)?;
    if seed == 0.0 {
        return Ok(0.0);
    }
    let mut lo = seed;
    let probe = seed * (1.0 + 1e-10);
    if admissible(sys, probe)? {
        return Ok(0.5 * (seed + probe));
    }
    lo = lo.max(probe);
    let d_norm = linalg::max_singular_value(&linalg::to_complex(sys.d()));
    let mut hi = 2.0 * seed + d_norm;
    let mut widen = 0;
    while !admissible(sys, hi)? {
        lo = hi;
        hi *= 2.0;
        widen += 1;
        if widen > 60 {
            return Err(Error::MaxIter { iterations: widen });
        }
    }
    for _ in 0..200 {
        if hi - lo <= 0.1 * HINF_REL_TOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if admissible(sys, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Row-major constructor used in tests and examples.
pub fn mat(rows: usize, cols: usize, data: &[f64]) -> Mat {
    DMatrix::from_row_slice(rows, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_ct() -> CtStateSpace {
        CtStateSpace::new(mat(1, 1, &[-1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.0])).unwrap()
    }

    fn scalar_dt() -> DtStateSpace {
        DtStateSpace::new(mat(1, 1, &[0.0]), mat(1, 1, &[0.5]), mat(1, 1, &[1.0]), mat(1, 1, &[0.5])).unwrap()
    }

    #[test]
    fn rejects_inconsistent_dimensions() {
        let err = CtStateSpace::new(mat(1, 1, &[-1.0]), mat(2, 1, &[1.0, 1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.0]));
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn scalar_report() {
        let r = validate_ct(&scalar_ct());
        assert!(r.hurwitz);
        assert_eq!(r.eigenvalues.len(), 1);
        assert!((r.eigenvalues[0].re + 1.0).abs() < 1e-15);
        assert!((r.fast_bound - 1.0).abs() < 1e-15);
        assert!((r.slow_bound - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_a_reports_infinite_slow_bound() {
        let sys = CtStateSpace::new(mat(1, 1, &[0.0]), mat(1, 1, &[1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.0])).unwrap();
        let r = validate_ct(&sys);
        assert!(!r.hurwitz);
        assert!(r.rho_ainv.is_infinite());
    }

    #[test]
    fn tf_ct_values() {
        let sys = scalar_ct();
        let v = eval_tf_ct(&sys, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v[(0, 0)].re - 0.5).abs() < 1e-15);
        let far = eval_tf_ct(&sys, Complex64::new(1e8, 0.0)).unwrap();
        assert!(far[(0, 0)].norm() < 1e-6);
        assert!(matches!(
            eval_tf_ct(&sys, Complex64::new(-1.0, 0.0)),
            Err(Error::ResolventSingular { .. })
        ));
    }

    #[test]
    fn tf_dt_values() {
        let sys = scalar_dt();
        let v = eval_tf_dt(&sys, Complex64::new(1.0, 0.0)).unwrap();
        assert!((v[(0, 0)].re - 1.0).abs() < 1e-15);
        let z0 = eval_tf_dt(&sys, Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(z0[(0, 0)].re, 0.5);
    }

    #[test]
    fn h2_values() {
        assert!((h2_dt(&scalar_dt()).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        assert!((h2_ct(&scalar_ct()).unwrap() - 0.5f64.sqrt()).abs() < 1e-14);
        let two = CtStateSpace::new(
            -Mat::identity(2, 2),
            Mat::identity(2, 2),
            Mat::identity(2, 2),
            Mat::zeros(2, 2),
        )
        .unwrap();
        assert!((h2_ct(&two).unwrap() - 1.0).abs() < 1e-14);
        let proper = CtStateSpace::new(mat(1, 1, &[-1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[1.0]), mat(1, 1, &[0.1])).unwrap();
        assert_eq!(h2_ct(&proper), Err(Error::NotStrictlyProper));
    }

    #[test]
    fn h2_static_is_frobenius() {
        let d = mat(2, 2, &[1.0, 2.0, -0.5, 0.25]);
        let sys = DtStateSpace::static_gain(d.clone()).unwrap();
        assert!((h2_dt(&sys).unwrap() - d.norm()).abs() < 1e-14);
    }

    #[test]
    fn hinf_values() {
        let h = hinf_dt(&scalar_dt()).unwrap();
        assert!((h - 1.0).abs() < 1e-8, "{h}");
        let d = mat(2, 3, &[1.0, 0.0, 2.0, -1.0, 3.0, 0.5]);
        let sys = DtStateSpace::static_gain(d.clone()).unwrap();
        let expected = linalg::max_singular_value(&linalg::to_complex(&d));
        assert!((hinf_dt(&sys).unwrap() - expected).abs() < 1e-8 * expected);
    }
}
