use std::path::PathBuf;

/// Errors produced by the filters, combiners, simulator and harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke an operation's precondition (length mismatch, bad parameter range, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A component filter produced a non-finite tap.
    #[error("filter {filter} diverged at iteration {iteration} (run {run})")]
    Divergence {
        run: u64,
        iteration: usize,
        filter: usize,
    },

    /// Every output difference was zero, so the least-squares weight is undefined.
    #[error("degenerate denominator: all output differences are zero")]
    DegenerateDenominator,

    /// A configuration document or override could not be applied.
    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
