use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed config file, with the 1-based line the problem was found on.
    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] errdist::Error),

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input or configuration, 3 for numerical failure during
    /// estimation, 4 when every simulation replication failed, 1 when an
    /// output cannot be written.
    pub fn exit_code(&self) -> u8 {
        use errdist::Error as E;
        match self {
            Self::Config { .. } | Self::Input(_) => 2,
            Self::Output { .. } => 1,
            Self::Core(e) => match e {
                E::SingularDesign { .. }
                | E::NumericalFailure(_)
                | E::DegenerateErrors
                | E::InfeasibleConstraint => 3,
                E::AllReplicationsFailed { .. } => 4,
                _ => 2,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
