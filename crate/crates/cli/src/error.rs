use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error("{origin}:{line}:{column}: {message}")]
    Parse { origin: String, line: usize, column: usize, message: String },

    #[error("invalid model: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("analysis failed: {0}")]
    Analysis(String),
}

impl CliError {
    /// 2 for anything wrong with the input or output, 1 for analysis outcomes.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Hypothesis(_) | CliError::Analysis(_) => 1,
            _ => 2,
        }
    }
}

impl From<netzero_core::Error> for CliError {
    fn from(e: netzero_core::Error) -> Self {
        use netzero_core::Error as E;
        match e {
            E::Hypothesis(msg) | E::NotApplicable(msg) => CliError::Hypothesis(msg),
            E::InvalidNetwork(list) => CliError::Invalid(list),
            E::EmptyNetwork | E::Dimension(_) => CliError::Invalid(vec![e.to_string()]),
            E::InvalidBlockSize => CliError::Argument(e.to_string()),
            other => CliError::Analysis(other.to_string()),
        }
    }
}
