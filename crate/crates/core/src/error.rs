use thiserror::Error;

use crate::syntax::{InvalidChannel, ParseError};

/// Default bound on explored states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "CCS_STATE_CAP";

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Channel(#[from] InvalidChannel),

    #[error("state cap of {cap} states exceeded")]
    StateCap { cap: usize },

    #[error(
        "partition is not a back-and-forth bisimulation: states {x} and {y} disagree on experiment ({shape}, {param})"
    )]
    IllDefinedQuotient {
        x: usize,
        y: usize,
        shape: String,
        param: String,
    },

    #[error("structural error: {0}")]
    Structure(String),

    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Exploration limits shared by the closure builders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub state_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { state_cap: DEFAULT_STATE_CAP }
    }
}

impl Limits {
    pub fn with_cap(state_cap: usize) -> Self {
        Limits { state_cap }
    }

    /// Default limits, with the cap taken from `CCS_STATE_CAP` when it is set
    /// to a valid number.
    pub fn from_env() -> Self {
        std::env::var(STATE_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .map(Limits::with_cap)
            .unwrap_or_default()
    }

    pub(crate) fn check(&self, states: usize) -> Result<()> {
        if states > self.state_cap {
            Err(Error::StateCap { cap: self.state_cap })
        } else {
            Ok(())
        }
    }
}
