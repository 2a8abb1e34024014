use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter violated a documented invariant. `field` names the
    /// offending parameter.
    Invalid { field: &'static str, rule: String },
    IndexOutOfRange { what: &'static str, index: usize, len: usize },
    /// The price subgame at the given capacities could not be solved.
    Subgame { q1: f64, q2: f64, source: alloc::boxed::Box<Error> },
    NoEquilibrium,
    EmptyCandidates,
}

impl Error {
    pub(crate) fn invalid(field: &'static str, rule: impl Into<String>) -> Self {
        Error::Invalid { field, rule: rule.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Invalid { field, rule } => write!(f, "invalid {field}: {rule}"),
            Error::IndexOutOfRange { what, index, len } => {
                write!(f, "{what} index {index} out of range (len {len})")
            }
            Error::Subgame { q1, q2, source } => {
                write!(f, "price subgame at capacities ({q1}, {q2}) failed: {source}")
            }
            Error::NoEquilibrium => f.write_str("no equilibrium found"),
            Error::EmptyCandidates => f.write_str("no equilibrium candidates to select from"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
