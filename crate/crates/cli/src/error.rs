use thiserror::Error;

/// Exit status of a tolerance breach reported by `validate`.
pub const EXIT_TOLERANCE: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Numerical(_) => 5,
        }
    }

    /// Classifies a core error raised while building a scenario from a file.
    pub fn from_load(e: aeris_core::Error) -> Self {
        match e {
            aeris_core::Error::InvalidParameter { .. } => CliError::Schema(e.to_string()),
            other => CliError::from_run(other),
        }
    }

    /// Classifies a core error raised while evaluating a valid scenario.
    pub fn from_run(e: aeris_core::Error) -> Self {
        use aeris_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::Geometry(_) | E::Infeasible(_) | E::BelowCltFloor { .. } => {
                CliError::Infeasible(e.to_string())
            }
            E::SeriesNonConvergence(_)
            | E::Quadrature { .. }
            | E::ApproximationDomain(_)
            | E::Guard(_)
            | E::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<aeris_core::Error> for CliError {
    fn from(e: aeris_core::Error) -> Self {
        CliError::from_run(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
