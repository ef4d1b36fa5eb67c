use thiserror::Error;

pub type Result<T> = std::result::Result<T, PdmError>;

#[derive(Debug, Error)]
pub enum PdmError {
    #[error("position {x} lies outside the profile domain [{lo}, {hi}]")]
    Domain { x: f64, lo: f64, hi: f64 },

    /// Nodes where the mass vanishes (or falls below the guard), as `(index, x)`.
    #[error("mass is singular at {} node(s), first at x = {}", .nodes.len(), .nodes.first().map(|n| n.1).unwrap_or(f64::NAN))]
    Singular { nodes: Vec<(usize, f64)> },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("step size collapsed to {h:e} at x = {x}")]
    StepSizeCollapse { x: f64, h: f64 },

    #[error("indicial clash at series order {order}")]
    IndicialClash { order: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl PdmError {
    /// True for errors caused by bad input rather than a numerical failure.
    pub fn is_configuration(&self) -> bool {
        matches!(
            self,
            PdmError::Domain { .. }
                | PdmError::Singular { .. }
                | PdmError::InvalidParameter(_)
                | PdmError::Precondition(_)
                | PdmError::LengthMismatch { .. }
                | PdmError::Json(_)
        )
    }
}
