use wavenf_core::algebra::{AlgebraError, CoeffError};
use wavenf_core::kdv::KdvError;
use wavenf_core::lattice::LatticeError;
use wavenf_core::models::ModelError;

/// Failures of a command, each with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verify(String),
    #[error("{0}")]
    Input(String),
    #[error("algebra: {0}")]
    Algebra(String),
    #[error("blow-up at t = {t}")]
    BlowUp { t: f64 },
    #[error("{context}: {source}")]
    Io { context: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verify(_) | CliError::Io { .. } => 1,
            CliError::Input(_) => 2,
            CliError::Algebra(_) => 3,
            CliError::BlowUp { .. } => 4,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Algebra(a) => a.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        CliError::Algebra(e.to_string())
    }
}

impl From<CoeffError> for CliError {
    fn from(e: CoeffError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<KdvError> for CliError {
    fn from(e: KdvError) -> Self {
        match e {
            KdvError::BlowUp { t } => CliError::BlowUp { t },
            KdvError::Config(m) => CliError::Input(m),
            other => CliError::Algebra(other.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::BlowUp { t } => CliError::BlowUp { t },
            LatticeError::Config(m) => CliError::Input(m),
            LatticeError::Solver(k) => k.into(),
            LatticeError::Algebra(a) => a.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
