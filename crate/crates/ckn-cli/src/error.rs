use ckn_core::CknError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CknError),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(e) => e.kind(),
            Self::Config(_) => "ConfigError",
            Self::Input(_) => "InputError",
            Self::Io(_) => "IoError",
        }
    }

    /// 1 for numerical failures, 2 for anything the caller got wrong.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Core(
                CknError::TailInadequate { .. }
                | CknError::Diverged(_)
                | CknError::MaxIters { .. }
                | CknError::NoConvergence { .. }
                | CknError::Singular(_),
            ) => 1,
            _ => 2,
        }
    }
}
