use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Model(#[from] uwqkd_core::Error),
    #[error("QBER is not monotone in L: {0}")]
    NonMonotone(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 0 is success; 2 usage, 3 config, 4 insufficient statistics, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Config(_) => 3,
            CliError::Model(uwqkd_core::Error::InsufficientStatistics(_)) => 4,
            _ => 1,
        }
    }

    /// The reader of our output went away (e.g. `uwqkd sweep | head`).
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            CliError::Io(e) => Some(e.kind()),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e.kind()),
                _ => None,
            },
            _ => None,
        };
        io == Some(std::io::ErrorKind::BrokenPipe)
    }
}
