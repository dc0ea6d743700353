use thiserror::Error;

/// Failures of the command-line front end. Input problems exit with 2,
/// computation problems with 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at `{key}`: {message}")]
    Schema { key: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid input: {0}")]
    Input(vortex_images::Error),
    #[error("computation failed: {0}")]
    Compute(vortex_images::Error),
    #[error("configuration is not well separated (q = {q}) and --strict was given")]
    Nonconvergent { q: f64 },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. }
            | CliError::Schema { .. }
            | CliError::Usage(_)
            | CliError::Io { .. }
            | CliError::Input(_) => 2,
            CliError::Compute(_) | CliError::Nonconvergent { .. } => 1,
        }
    }
}

/// Sorts a library error into input or computation failures.
impl From<vortex_images::Error> for CliError {
    fn from(e: vortex_images::Error) -> Self {
        use vortex_images::Error as E;
        match e {
            E::NonpositiveRadius { .. }
            | E::Overlap { .. }
            | E::LaxDomain
            | E::SeedInsideCylinder { .. }
            | E::IndexOutOfRange { .. }
            | E::InvalidSpec(_)
            | E::InvalidArgument(_) => CliError::Input(e),
            E::BudgetExceeded { .. }
            | E::DegenerateComposition
            | E::NonconvergentConfiguration { .. }
            | E::SingularPoint
            | E::ContourThroughSingularity { .. } => CliError::Compute(e),
        }
    }
}
