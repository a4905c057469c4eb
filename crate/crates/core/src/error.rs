use thiserror::Error;

/// Errors raised by the numeric and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("decomposition did not converge for a {rows}x{cols} matrix")]
    NumericFailure { rows: usize, cols: usize },
    #[error("degenerate direction: a^H R^T a = {value:e} is below the floor")]
    DegenerateDirection { value: f64 },
    #[error("no usable angle on the search grid")]
    DegenerateTrial,
    #[error("trial {trial}: {source}")]
    Trial { trial: u64, source: Box<Error> },
}

impl Error {
    /// Attaches the trial index to an error raised inside a Monte Carlo trial.
    pub fn in_trial(self, trial: u64) -> Self {
        match self {
            already @ Error::Trial { .. } => already,
            other => Error::Trial { trial, source: Box::new(other) },
        }
    }

    /// Innermost error, with trial context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Trial { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
