use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Input problems (bad configuration, out-of-range arguments) and numerical
/// failures are kept apart so callers can map them onto distinct exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("config syntax error: {0}")]
    Syntax(String),

    #[error("missing key `{0}`")]
    MissingKey(&'static str),

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("invalid value for `{key}`: {value} ({reason})")]
    InvalidValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("n_sections < n_ions ({n_sections} < {n_ions})")]
    SectionsBelowIons { n_sections: usize, n_ions: usize },

    #[error("pseudopotential invalid: q = {q} (must be < {limit})")]
    PseudopotentialInvalid { q: f64, limit: f64 },

    #[error("invalid target `{spec}`: {reason}")]
    InvalidTarget { spec: String, reason: String },

    #[error("{what}: expected length {expected}, got {found}")]
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("argument {value} outside domain of {function}: {reason}")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("singular matrix at pivot step {step}: |pivot| = {pivot:e} below threshold {threshold:e}")]
    Singular {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("rank-deficient matrix at column {step}: |r_kk| = {pivot:e} below threshold {threshold:e}")]
    RankDeficient {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("matrix too ill-conditioned for working precision (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerical kernels, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::RankDeficient { .. }
                | Error::IllConditioned { .. }
                | Error::NoConvergence { .. }
                | Error::Inconsistent(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
