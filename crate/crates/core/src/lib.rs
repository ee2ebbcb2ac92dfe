//! Anisotropic norms of continuous-time systems under low-pass filtered
//! stochastic inputs.
//!
//! A stable continuous system is carried to the unit disk by the bilinear
//! map at a chosen time scale `T`. There the RMS gain under a spectral
//! density, the mean anisotropy of that density and the anisotropic norm
//! (the worst gain over densities of bounded mean anisotropy) are computed
//! with Riccati and Lyapunov solvers and cross-checked by quadrature and
//! Monte Carlo simulation.

pub mod aninorm;
pub mod bilinear;
pub mod error;
pub mod examples;
pub mod linalg;
pub mod montecarlo;
pub mod quadrature;
pub mod solvers;
pub mod spectral;
pub mod statespace;

pub use aninorm::{
    anisotropic_norm, anisotropic_norm_with, anisotropy_and_gain_of_q, isometry_residual, sweep, worst_case_filter,
    AnisotropicNormSolution, NormOptions, QEvaluation, SweepPoint, WorstCaseFilter,
};
pub use bilinear::{cayley, to_continuous, to_discrete, TimeScale};
pub use error::{Error, Result};
pub use linalg::{CMat, Mat};
pub use montecarlo::{simulate_ct_em, simulate_dt, validate_solution, Estimate, SimConfig, SimStats, ValidationReport};
pub use quadrature::PhiGrid;
pub use solvers::{dare_q, find_root_monotone, solve_clyap, solve_dlyap, DareOutcome, DareSolution, InadmissibleReason};
pub use spectral::{
    autocovariance, concentrated_gain, gain_limits, gram_ct, gram_dt, innovations_logdet, mean_anisotropy, rms_gain,
    sigma, white_gain, GainLimits, Side, SpectralDensity,
};
pub use statespace::{h2_ct, h2_dt, hinf_dt, validate_ct, CtStateSpace, DtStateSpace, StabilityReport};
