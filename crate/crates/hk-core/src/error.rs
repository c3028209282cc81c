use core::fmt;

use num_complex::Complex64;

/// Errors surfaced by the numerical routines.
///
/// No public operation lets NaN/Inf escape silently; failures carry enough
/// context to name the offending input or the best estimate so far.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the supported range of a special function.
    OutOfRange { value: f64, limit: f64 },
    /// A precondition on the inputs was violated.
    InvalidInput(&'static str),
    /// Evaluation requested inside a caustic band where the formula diverges.
    Caustic { q: f64 },
    /// A complex point lies on the branch cut of the HK prefactor.
    BranchCut,
    /// The HK prefactor radicand passed through zero along the trajectory.
    BranchDegeneracy { t: f64 },
    /// Quadrature did not converge within the evaluation budget; carries the
    /// best estimate and its error estimate.
    QuadratureNoConvergence {
        best: Complex64,
        error_estimate: f64,
    },
    /// Newton polishing failed to converge.
    RootNoConvergence { last: Complex64, residual: f64 },
    /// A trajectory left the finite domain; `t` is the escape time.
    Divergence { t: f64, point_index: Option<usize> },
    /// Wavefunction amplitude reached the grid boundary.
    DomainTooSmall { boundary_amplitude: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange { value, limit } => {
                write!(f, "argument {value} outside supported range |x| <= {limit}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Caustic { q } => write!(f, "caustic at q = {q}: amplitude diverges"),
            Error::BranchCut => write!(f, "point lies on the prefactor branch cut"),
            Error::BranchDegeneracy { t } => {
                write!(f, "prefactor radicand degenerate at t = {t}")
            }
            Error::QuadratureNoConvergence { best, error_estimate } => write!(
                f,
                "quadrature did not converge (best estimate {best}, error estimate {error_estimate})"
            ),
            Error::RootNoConvergence { last, residual } => {
                write!(f, "root polishing did not converge (last {last}, |f| = {residual})")
            }
            Error::Divergence { t, point_index } => match point_index {
                Some(i) => write!(f, "trajectory diverged at t = {t} (point {i})"),
                None => write!(f, "trajectory diverged at t = {t}"),
            },
            Error::DomainTooSmall { boundary_amplitude } => write!(
                f,
                "wavefunction reached grid boundary (amplitude {boundary_amplitude}); enlarge the domain"
            ),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
