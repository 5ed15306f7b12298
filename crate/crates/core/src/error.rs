use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure of a library operation. Every variant records the operation that
/// raised it (`module::operation`) so front ends can report it verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{op}: invalid parameter: {msg}")]
    Parameter { op: &'static str, msg: String },

    #[error("{op}: curve is not embedded: {msg}")]
    Embedding { op: &'static str, msg: String },

    #[error("{op}: degenerate curve: {msg}")]
    DegenerateCurve { op: &'static str, msg: String },

    #[error("{op}: argument outside domain: {msg}")]
    Domain { op: &'static str, msg: String },

    #[error("{op}: no convergence after {iterations} iterations: {msg}")]
    Convergence {
        op: &'static str,
        iterations: usize,
        msg: String,
    },

    #[error("{op}: left the two-intersection neighborhood: {msg}")]
    Topology { op: &'static str, msg: String },

    #[error("{op}: inconsistent geometry: {msg}")]
    Consistency { op: &'static str, msg: String },

    #[error("{op}: near-singular configuration: {msg}")]
    NearSingular { op: &'static str, msg: String },

    #[error("{op}: geometry error: {msg}")]
    Geometry { op: &'static str, msg: String },

    #[error("{op}: residual stagnated: {msg}")]
    NonConvergence { op: &'static str, msg: String },

    #[error("{op}: i/o error: {source}")]
    Io {
        op: &'static str,
        #[source]
        source: std::io::Error,
    },

    #[error("{op}: malformed data: {msg}")]
    Format { op: &'static str, msg: String },
}

impl Error {
    /// The `module::operation` that raised the error.
    pub fn op(&self) -> &'static str {
        match self {
            Error::Parameter { op, .. }
            | Error::Embedding { op, .. }
            | Error::DegenerateCurve { op, .. }
            | Error::Domain { op, .. }
            | Error::Convergence { op, .. }
            | Error::Topology { op, .. }
            | Error::Consistency { op, .. }
            | Error::NearSingular { op, .. }
            | Error::Geometry { op, .. }
            | Error::NonConvergence { op, .. }
            | Error::Io { op, .. }
            | Error::Format { op, .. } => op,
        }
    }

    /// Short machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter { .. } => "parameter",
            Error::Embedding { .. } => "embedding",
            Error::DegenerateCurve { .. } => "degenerate_curve",
            Error::Domain { .. } => "domain",
            Error::Convergence { .. } => "convergence",
            Error::Topology { .. } => "topology",
            Error::Consistency { .. } => "consistency",
            Error::NearSingular { .. } => "near_singular",
            Error::Geometry { .. } => "geometry",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Io { .. } => "io",
            Error::Format { .. } => "format",
        }
    }

    pub(crate) fn param(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Parameter { op, msg: msg.into() }
    }

    pub(crate) fn io(op: &'static str, source: std::io::Error) -> Self {
        Error::Io { op, source }
    }
}
