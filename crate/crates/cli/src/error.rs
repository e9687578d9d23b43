use thiserror::Error;

/// Failures reported by the command-line tool, each with its exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("validation failed: {passed} of {total} points passed, {required} required")]
    Validation { passed: usize, total: usize, required: usize },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Scenario(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Validation { .. } => 4,
        }
    }
}

impl From<dualmode_core::Error> for CliError {
    fn from(e: dualmode_core::Error) -> Self {
        use dualmode_core::Error as E;
        match e {
            E::Unstable { .. }
            | E::InfeasibleFraction { .. }
            | E::InfeasibleAssignment { .. }
            | E::UnstableSimulation { .. }
            | E::NotApplicable(_)
            | E::NonMonotoneBreakaway { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Scenario(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
