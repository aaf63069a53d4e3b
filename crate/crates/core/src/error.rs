//! Error type shared by every module.

use crate::solvercore::newton::NewtonReport;

/// Failure modes of the numerical routines.
///
/// Solver failures carry the state needed to diagnose them: the Newton report,
/// the ODE state at step-size collapse, or the last healthy PDE snapshot.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("jacobian singular at pivot {pivot}")]
    SingularJacobian { pivot: usize },

    #[error("newton did not converge: {} iterations, final residual {:.3e}", .0.iterations, .0.final_residual)]
    NewtonFailed(Box<NewtonReport>),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64, state: Vec<f64> },

    #[error("integration exceeded {steps} steps at t = {t}")]
    TooManySteps { steps: usize, t: f64 },

    #[error("continuation failed at its first point: {0}")]
    ContinuationStart(String),

    #[error("no interface: profile never exceeds {threshold}")]
    NoInterface { threshold: f64 },

    #[error("left separatrix missed: |w| = {value:.3e} exceeds bound at eta = {eta}")]
    SeparatrixMissed { eta: f64, value: f64 },

    #[error("certificate failed at eta = {eta}: {reason}")]
    Certificate { eta: f64, reason: String },

    #[error("simulation aborted at t = {t}: {reason}")]
    SimulationAbort {
        t: f64,
        reason: String,
        last_healthy: Box<crate::pdesim::Snapshot>,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
