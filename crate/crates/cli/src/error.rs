use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const UNEXPECTED: i32 = 1;
    /// Failure that the solvability predicates predicted.
    pub const PREDICTED_FAILURE: i32 = 2;
    pub const CONFIG: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::Io(_) => "io",
            Self::Solver(_) => "solver",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => exit::CONFIG,
            Self::Io(_) | Self::Solver(_) => exit::UNEXPECTED,
        }
    }

    /// One line, `error kind=<kind> reason=<json string>`.
    pub fn line(&self) -> String {
        let reason = serde_json::to_string(&self.to_string().replace('\n', " ")).unwrap_or_default();
        format!("error kind={} reason={reason}", self.kind())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
