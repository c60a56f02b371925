use thiserror::Error;

/// Errors raised by the geometry, integration and certification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("polyhedron construction failed: {0}")]
    Construction(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("face thrashing: {switches} switches before t = {t}")]
    FaceThrashing {
        t: f64,
        switches: usize,
        events: Vec<crate::flow::FaceEvent>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
