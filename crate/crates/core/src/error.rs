use thiserror::Error;

use crate::{ColorId, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient colors: need {needed}, have {available}")]
    InsufficientColors { needed: usize, available: usize },

    #[error("collection is the exceptional configuration (directed triangle against opposite triangles)")]
    Exceptional,

    #[error("no rainbow progress: layer stalled at color {color} before reaching vertex {target}")]
    NoProgress { color: ColorId, target: VertexId },

    #[error("absorber construction failed after {attempts} attempts")]
    AbsorberConstructionFailed { attempts: usize },

    #[error("absorption failed: {0}")]
    AbsorptionFailed(String),

    #[error("stage {stage} failed: {detail}")]
    Stage { stage: &'static str, detail: String },

    #[error("malformed collection: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn stage(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Stage {
            stage,
            detail: detail.into(),
        }
    }
}
