use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the numerical routines.
///
/// Every variant maps to a stable machine-readable code through
/// [`Error::code`], which the command-line front end emits verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hurwitz (spectral abscissa {abscissa:e})")]
    NotHurwitz { abscissa: f64 },

    #[error("matrix is not Schur stable (spectral radius {radius})")]
    NotSchur { radius: f64 },

    #[error("closed-loop spectral radius {radius} is not below one")]
    SpectralRadius { radius: f64 },

    #[error("spectral abscissa {abscissa:e} is not negative")]
    SpectralAbscissa { abscissa: f64 },

    #[error("dense Lyapunov solve limited to n <= {limit}, got n = {n}")]
    TooLarge { n: usize, limit: usize },

    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error(
        "mean anisotropy {requested} is out of numerical reach; \
         largest achieved value {max_achievable} at q = {q_max:e}"
    )]
    AnisotropyOutOfReach {
        requested: f64,
        max_achievable: f64,
        q_max: f64,
        norm_at_q_max: f64,
    },

    #[error("root finder did not converge after {iterations} iterations")]
    MaxIter { iterations: usize },

    #[error("resolvent is numerically singular (condition {condition:e})")]
    ResolventSingular { condition: f64 },

    #[error("shifted matrix is numerically singular (condition {condition:e})")]
    SingularShift { condition: f64 },

    #[error("H2 norm is infinite for a system with nonzero feedthrough")]
    NotStrictlyProper,

    #[error("spectral density integrates to {0:e}; gain is undefined")]
    ZeroDenominator(f64),

    #[error("q = {q} is not admissible ({reason})")]
    InadmissibleQ { q: f64, reason: String },

    #[error("system is round; the anisotropic norm needs a nonround system when a > 0")]
    NonroundRequired,

    #[error("time scale T = {0} outside [1e-9, 1e9]")]
    InvalidTimeScale(f64),

    #[error("system or filter is unstable (spectral radius {radius})")]
    UnstableSystem { radius: f64 },

    #[error("Euler-Maruyama step {em_dt} too large ({reason})")]
    StepTooLarge { em_dt: f64, reason: String },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("consistency check failed: {0}")]
    Consistency(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NotHurwitz { .. } => "NotHurwitz",
            Error::NotSchur { .. } => "NotSchur",
            Error::SpectralRadius { .. } => "SpectralRadiusError",
            Error::SpectralAbscissa { .. } => "SpectralAbscissaError",
            Error::TooLarge { .. } => "TooLarge",
            Error::Bracket { .. } => "BracketError",
            Error::AnisotropyOutOfReach { .. } => "BracketError",
            Error::MaxIter { .. } => "MaxIterError",
            Error::ResolventSingular { .. } => "ResolventSingular",
            Error::SingularShift { .. } => "SingularShift",
            Error::NotStrictlyProper => "NotStrictlyProper",
            Error::ZeroDenominator(_) => "ZeroDenominator",
            Error::InadmissibleQ { .. } => "InadmissibleQ",
            Error::NonroundRequired => "NonroundRequired",
            Error::InvalidTimeScale(_) => "InvalidTimeScale",
            Error::UnstableSystem { .. } => "UnstableSystem",
            Error::StepTooLarge { .. } => "StepTooLarge",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Consistency(_) => "Consistency",
        }
    }

    /// Errors caused by the caller's input rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::DimensionMismatch(_)
                | Error::InvalidArgument(_)
                | Error::InvalidTimeScale(_)
                | Error::InvalidConfig(_)
        )
    }
}
