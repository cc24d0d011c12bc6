use std::fmt;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The all-zero tuple has no projective representative.
    AllZero,
    /// A point was expected to satisfy both quadrics but does not.
    NotOnSurface,
    /// A 128-bit intermediate overflowed during exact evaluation.
    Overflow,
    /// A resource cap was exceeded; the message names the cap and suggests an alternative.
    CapExceeded(String),
    /// A tuple violated a precondition of the requested operation.
    InvalidInput(String),
    /// Raw torsor tuple count came out odd; the 2:1 correspondence guarantees evenness.
    OddTorsorCount { surface: &'static str, b: u64, raw: u64 },
    /// Adaptive quadrature failed to reach the requested tolerance.
    NonConvergent { requested: f64, achieved: f64 },
    /// Polytope is unbounded, so its volume is undefined.
    UnboundedPolytope,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::AllZero => write!(f, "all-zero tuple admits no projective normalization"),
            Error::NotOnSurface => write!(f, "point does not lie on the surface"),
            Error::Overflow => write!(f, "128-bit intermediate overflow"),
            Error::CapExceeded(msg) => write!(f, "resource cap exceeded: {msg}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::OddTorsorCount { surface, b, raw } => write!(
                f,
                "internal consistency failure: raw tuple count {raw} for {surface} at B={b} is odd"
            ),
            Error::NonConvergent { requested, achieved } => write!(
                f,
                "quadrature did not converge: requested {requested:.3e}, achieved {achieved:.3e}"
            ),
            Error::UnboundedPolytope => write!(f, "polytope is unbounded"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
