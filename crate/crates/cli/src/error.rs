use bcg_core::facts::FactError;
use bcg_core::gmn::GmnError;
use bcg_core::grounder::GroundError;
use bcg_core::logic::ParseError;
use bcg_core::reasoner::ReasonerError;
use bcg_eval::EvalError;
use bcg_kge::checkpoint::CheckpointError;
use bcg_kge::TrainError;
use std::io;
use std::path::PathBuf;

use crate::pipeline::PipelineError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("over budget: {0}")]
    Budget(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Budget(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}

impl From<FactError> for CliError {
    fn from(e: FactError) -> Self {
        match e {
            FactError::Io { path, source } => CliError::Io { path: path.into(), source },
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<GroundError> for CliError {
    fn from(e: GroundError) -> Self {
        match e {
            GroundError::Budget { .. } => CliError::Budget(e.to_string()),
            GroundError::Params(_) => CliError::Config(e.to_string()),
            GroundError::RootArity { .. } => CliError::Parse(e.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::NonFinite { .. } => CliError::Numeric(e.to_string()),
            TrainError::NotBinary(_) => CliError::Parse(e.to_string()),
            TrainError::Empty | TrainError::Config(_) => CliError::Config(e.to_string()),
        }
    }
}

impl From<ReasonerError> for CliError {
    fn from(e: ReasonerError) -> Self {
        match e {
            ReasonerError::Parse { .. } => CliError::Parse(e.to_string()),
            ReasonerError::OutOfRange(_) | ReasonerError::EmptyConjunction => CliError::Numeric(e.to_string()),
            ReasonerError::MissingInit { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Train(e) => e.into(),
            PipelineError::Ground(e) => e.into(),
            PipelineError::Reasoner(e) => e.into(),
        }
    }
}

impl From<GmnError> for CliError {
    fn from(e: GmnError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Config(e.to_string())
    }
}
