//! The conformal bridge between the right half-plane and the unit disk.
//!
//! For a time scale `T` with cutoff `Ω = 1/T`, the discrete counterpart of a
//! continuous system satisfies `F_T(z) = F(Ω K(z))` with the Cayley map
//! `K(z) = (1 − z)/(1 + z)`. On realizations this is the map
//!
//! ```text
//! A_T = (I + TA)(I − TA)⁻¹     B_T = T (I − TA)⁻¹ B
//! C_T = 2 C (I − TA)⁻¹         D_T = T C (I − TA)⁻¹ B + D
//! ```
//!
//! which differs from textbook Tustin by a factor of two in the scale.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::statespace::{CtStateSpace, DtStateSpace};

const SHIFT_CONDITION_LIMIT: f64 = 1e14;

/// Time scale of the low-pass filter. `Ω` is always derived as `1/T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeScale {
    t: f64,
}

impl TimeScale {
    pub fn new(t: f64) -> Result<Self> {
        if !(t.is_finite() && (1e-9..=1e9).contains(&t)) {
            return Err(Error::InvalidTimeScale(t));
        }
        Ok(Self { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn omega(&self) -> f64 {
        1.0 / self.t
    }

    /// `φ = 2 arctan(ωT)`
    pub fn phi_of_omega(&self, omega: f64) -> f64 {
        2.0 * (omega * self.t).atan()
    }

    /// `ω = Ω tan(φ/2)`
    pub fn omega_of_phi(&self, phi: f64) -> f64 {
        self.omega() * (0.5 * phi).tan()
    }
}

/// `K(z) = (1 − z)/(1 + z)`; an involution mapping the unit disk onto the
/// right half-plane.
pub fn cayley(z: Complex64) -> Result<Complex64> {
    let den = Complex64::new(1.0, 0.0) + z;
    if den.norm() == 0.0 {
        return Err(Error::InvalidArgument("Cayley map has a pole at z = -1".into()));
    }
    Ok((Complex64::new(1.0, 0.0) - z) / den)
}

fn shifted_inverse(a: &Mat, scale: f64, sign: f64) -> Result<Mat> {
    let n = a.nrows();
    let shift = Mat::identity(n, n) + a * (sign * scale);
    let (inv, condition) =
        linalg::inverse_with_condition(&shift).ok_or(Error::SingularShift { condition: f64::INFINITY })?;
    if condition > SHIFT_CONDITION_LIMIT {
        return Err(Error::SingularShift { condition });
    }
    Ok(inv)
}

/// The realization map without the Hurwitz precondition; used where the
/// stability correspondence itself is under examination.
pub fn bilinear_map(sys: &CtStateSpace, ts: TimeScale) -> Result<DtStateSpace> {
    let t = ts.t();
    let n = sys.n();
    let inv = shifted_inverse(sys.a(), t, -1.0)?;
    let a_t = (Mat::identity(n, n) + sys.a() * t) * &inv;
    let inv_b = &inv * sys.b();
    let b_t = &inv_b * t;
    let c_t = sys.c() * &inv * 2.0;
    let d_t = sys.c() * &inv_b * t + sys.d();
    DtStateSpace::new(a_t, b_t, c_t, d_t)
}

/// Discrete counterpart of a Hurwitz system at time scale `T`.
pub fn to_discrete(sys: &CtStateSpace, ts: TimeScale) -> Result<DtStateSpace> {
    sys.require_hurwitz()?;
    bilinear_map(sys, ts)
}

/// Inverse realization map:
///
/// ```text
/// A = Ω (I + A_T)⁻¹ (A_T − I)    B = 2Ω (I + A_T)⁻¹ B_T
/// C = C_T (I + A_T)⁻¹            D = D_T − C_T (I + A_T)⁻¹ B_T
/// ```
pub fn to_continuous(sys: &DtStateSpace, ts: TimeScale) -> Result<CtStateSpace> {
    sys.require_schur()?;
    inverse_bilinear_map(sys, ts)
}

pub fn inverse_bilinear_map(sys: &DtStateSpace, ts: TimeScale) -> Result<CtStateSpace> {
    let omega = ts.omega();
    let n = sys.n();
    let inv = shifted_inverse(sys.a(), 1.0, 1.0)?;
    let a = &inv * (sys.a() - Mat::identity(n, n)) * omega;
    let inv_b = &inv * sys.b();
    let b = &inv_b * (2.0 * omega);
    let c = sys.c() * &inv;
    let d = sys.d() - sys.c() * &inv_b;
    CtStateSpace::new(a, b, c, d)
}
