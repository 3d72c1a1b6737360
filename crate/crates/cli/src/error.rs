use curvswim::SwimError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] SwimError),
    #[error("output error: {0}")]
    Output(String),
    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl CliError {
    /// Process exit status: 2 for bad input, 3 for numerical or output
    /// failures, 1 for a failing check suite.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 3,
            CliError::ChecksFailed { .. } => 1,
        }
    }
}
