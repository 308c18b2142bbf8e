use thiserror::Error;

/// Errors produced by samplers, estimators and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An evaluation was requested outside a function's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Scene sampling produced no base stations within the retry budget.
    #[error("no base stations in the window after {attempts} attempts")]
    NoBaseStations { attempts: u32 },

    /// Ergodic scene sampling found no user in the central selection region.
    #[error("no users in the central selection region after {attempts} attempts")]
    NoUsers { attempts: u32 },

    /// Cell association was requested against an empty base-station pattern.
    #[error("cannot associate: base-station pattern is empty")]
    NoServer,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
