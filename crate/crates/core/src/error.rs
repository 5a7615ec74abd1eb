use std::fmt;

use thiserror::Error;

/// A single broken invariant found while validating a network description.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// The offending element, e.g. `mode "b2"` or `coupling c->b9`.
    pub element: String,
    pub message: String,
}

impl Violation {
    pub fn new(element: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            element: element.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.element, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid network: {}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no unique steady state (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    #[error("system is not stable (spectral abscissa {abscissa:.6e})")]
    Unstable { abscissa: f64 },

    #[error("resonant divergence: vanishing continued-fraction denominator at chain site {site}")]
    ResonantDivergence { site: usize },

    #[error("non-finite input: {0}")]
    NonFinite(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("unknown mode `{0}`")]
    UnknownMode(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numeric failures (singular or unstable systems, solver breakdown) as opposed to
    /// usage and configuration problems.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. } | Error::Unstable { .. } | Error::ResonantDivergence { .. } | Error::Numeric(_)
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
