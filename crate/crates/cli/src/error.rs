use std::path::PathBuf;

use resetctl_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 for numerical failures,
    /// 3 for violated invariants.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse(_) | Self::Config { .. } | Self::Io { .. } => 1,
            Self::Core(
                CoreError::NonConvergence { .. }
                | CoreError::QuadratureNonConvergence { .. }
                | CoreError::NumericalRange(_),
            ) => 2,
            Self::Core(_) => 1,
            Self::Invariant(_) => 3,
        }
    }
}
