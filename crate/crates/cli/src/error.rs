use thiserror::Error;

/// Exit codes: 2 parse, 3 fit failure, 4 configuration, 1 anything else.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Fit(_) => 3,
            CliError::Config(_) => 4,
            CliError::Other(_) => 1,
        }
    }
}

impl From<powerburr::Error> for CliError {
    fn from(e: powerburr::Error) -> Self {
        use powerburr::Error as E;
        match e {
            E::AllStartsFailed { .. } | E::BootstrapRefits { .. } => CliError::Fit(e.to_string()),
            E::Config(_) | E::Arity { .. } | E::Probability(_) | E::Domain { .. } => {
                CliError::Config(e.to_string())
            }
            E::EmptySample | E::NonPositiveClaim { .. } => CliError::Parse(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.to_string())
    }
}
