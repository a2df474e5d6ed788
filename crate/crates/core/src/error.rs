use thiserror::Error;

/// Every failure mode of the library.
///
/// Variants carry enough context to produce a one-line, machine-parsable
/// reason; see [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("superluminal input: |v| = {speed} >= 1")]
    Superluminal { speed: f64 },

    #[error("{quantity} = {value} outside valid interval ({lo}, {hi})")]
    Domain {
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("degenerate temperature: theta = {theta} <= 0")]
    DegenerateTemperature { theta: f64 },

    #[error("{what} did not converge (achieved tolerance {achieved:e})")]
    NonConvergence { what: &'static str, achieved: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no root: {0}")]
    NoRoot(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("subsonic upstream: v = {v} < c_s = {cs}")]
    SubsonicUpstream { v: f64, cs: f64 },

    #[error("unphysical conserved state (E = {e}, S = {s}){}", cell.map(|c| format!(" in cell {c}")).unwrap_or_default())]
    UnphysicalState { e: f64, s: f64, cell: Option<usize> },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Short stable tag used in CLI error lines and FFI status mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Superluminal { .. } => "superluminal",
            Error::Domain { .. } => "domain",
            Error::DegenerateTemperature { .. } => "degenerate-temperature",
            Error::NonConvergence { .. } => "non-convergence",
            Error::InvalidState(_) => "invalid-state",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::NoRoot(_) => "no-root",
            Error::Degenerate(_) => "degenerate",
            Error::SubsonicUpstream { .. } => "subsonic-upstream",
            Error::UnphysicalState { .. } => "unphysical-state",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }

    pub(crate) fn domain(quantity: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Error::Domain {
            quantity,
            value,
            lo,
            hi,
        }
    }

    /// Attach a cell index to an unphysical-state error.
    pub fn in_cell(self, cell: usize) -> Self {
        match self {
            Error::UnphysicalState { e, s, .. } => Error::UnphysicalState {
                e,
                s,
                cell: Some(cell),
            },
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
