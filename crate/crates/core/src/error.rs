use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("prefix of length {0} is too short (need at least 8 quotients)")]
    DegeneratePrefix(usize),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("argument {value} outside the evaluable domain (limit {limit})")]
    Domain { value: f64, limit: f64 },
    #[error("range error: {0}")]
    Range(String),
    #[error("quadrature did not reach tolerance: estimate {value}, error {abs_error}")]
    Tolerance { value: f64, abs_error: f64 },
    #[error("integrand tail does not decay (sigma grows at least linearly near t = {at})")]
    NonQuasianalytic { at: f64 },
    #[error("sequence violates (nq) on the prefix: {0}")]
    NqViolation(String),
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("cannot strictify: all quotients are equal on the prefix")]
    CannotStrictify,
    #[error("R_n sum exhausted on the prefix: t = {t} is below the truncation bound {bound}")]
    PrefixExhausted { t: f64, bound: f64 },
    #[error("point (r = {r}, theta = {theta}) lies outside the sector of opening {gamma}*pi")]
    Sector { r: f64, theta: f64, gamma: f64 },
    #[error("sector mismatch: {0} vs {1}")]
    SectorMismatch(f64, f64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("kernel does not decay on the sampled range (order {order})")]
    KernelDecay { order: usize },
    #[error("series has {coeffs} coefficients but only {moments} moments are available")]
    InsufficientMoments { coeffs: usize, moments: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
