//! Shared error type.

use std::fmt;

/// Errors surfaced by the library operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A rectangle with no entries was passed where a nonempty one is required.
    EmptyRectangle,
    /// Conditioning on a rectangle whose measure is zero.
    EmptySupport,
    /// Shapes of two arguments do not agree.
    DimensionMismatch { expected: String, found: String },
    /// Point set does not span the ambient space.
    DegeneratePointSet,
    /// Norm-bound certificate required but absent.
    NotCertified,
    /// Brute-force oracle guard: smaller matrix dimension exceeds the limit.
    InstanceTooLarge { min_dim: usize, limit: usize },
    /// Witness hypothesis violated: the +1 class does not carry the majority mass.
    MajorityClassNegative,
    /// Hypothesis mu(Q_1) >= delta violated.
    PlusMassBelowDelta { plus_mass: f64, delta: f64 },
    /// Value out of the documented domain.
    OutOfDomain(String),
    /// Invalid measure (negative weight or mass not 1).
    InvalidMeasure(String),
    /// Text format violation, with 1-based line/column of the offending byte.
    Parse { line: usize, col: usize, msg: String },
    /// Instance size guard for generators.
    GeneratorTooLarge { requested: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyRectangle => write!(f, "empty rectangle"),
            Error::EmptySupport => write!(f, "empty support"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::DegeneratePointSet => write!(f, "degenerate point set"),
            Error::NotCertified => write!(f, "not certified"),
            Error::InstanceTooLarge { min_dim, limit } => {
                write!(f, "instance too large for oracle: min dimension {min_dim} > {limit}")
            }
            Error::MajorityClassNegative => write!(f, "majority class is -1; negate first"),
            Error::PlusMassBelowDelta { plus_mass, delta } => {
                write!(f, "mu(Q_1) = {plus_mass} is below delta = {delta}")
            }
            Error::OutOfDomain(msg) => write!(f, "out of domain: {msg}"),
            Error::InvalidMeasure(msg) => write!(f, "invalid measure: {msg}"),
            Error::Parse { line, col, msg } => write!(f, "parse error at {line}:{col}: {msg}"),
            Error::GeneratorTooLarge { requested, limit } => {
                write!(f, "instance too large to generate: {requested} > {limit}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
