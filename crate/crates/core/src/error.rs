use thiserror::Error;

/// Failure modes shared by every evaluator in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    /// Input outside the mathematical domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result not representable in f64 (overflow region).
    #[error("range error: {0}")]
    Range(String),
    /// Requested tolerance could not be certified within the work cap.
    #[error("accuracy error: {message} (achieved {achieved:.3e})")]
    Accuracy { message: String, achieved: f64 },
    /// Evaluation point lies on or too close to an integration contour.
    #[error("geometry error: {0}")]
    Geometry(String),
    /// Removable or genuine singularity that the method cannot pass.
    #[error("singular point: {0}")]
    Singular(String),
    /// Method not available for the requested parameters.
    #[error("usage error: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, KernelError>;

impl KernelError {
    pub fn domain(msg: impl Into<String>) -> Self {
        KernelError::Domain(msg.into())
    }

    pub fn accuracy(msg: impl Into<String>, achieved: f64) -> Self {
        KernelError::Accuracy { message: msg.into(), achieved }
    }
}

pub(crate) fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(KernelError::domain(format!("{name} must be finite, got {x}")))
    }
}
