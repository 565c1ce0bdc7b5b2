//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The integrator used up its step budget before reaching the target.
    #[error("integration exceeded {max_steps} steps at t = {t}")]
    StepLimitExceeded { t: f64, max_steps: usize },

    /// NaN or infinity appeared in the state.
    #[error("state became non-finite at t = {t}")]
    NonFiniteState { t: f64 },

    /// The required step fell below machine resolution.
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    /// No matching event sign change before the step budget ran out.
    #[error("no matching event sign change found (searched up to t = {t_last})")]
    EventNotFound { t_last: f64 },

    #[error("eccentricity {e} outside [0, 1)")]
    EccentricityOutOfRange { e: f64 },

    #[error("energy {h} outside (-2, 0)")]
    EnergyOutOfRange { h: f64 },

    #[error("initial velocity {eta} outside (0, 2)")]
    VelocityOutOfRange { eta: f64 },

    #[error("initial amplitude {xi} must be positive")]
    AmplitudeOutOfRange { xi: f64 },

    /// Requested period at or below the infimum 2π/√8 of the period function.
    #[error("target period {t_target} is not attainable (infimum is 2*pi/sqrt(8))")]
    PeriodNotAttainable { t_target: f64 },

    /// (m, p) violates 1 <= p <= floor(sqrt(8)·m).
    #[error("frequency pair ({m}, {p}) violates 1 <= p <= floor(sqrt(8)*m)")]
    InadmissibleFrequency { m: u32, p: u32 },

    /// Shooting iteration left its domain or hit the iteration cap.
    #[error("Newton shooting diverged (parameter {param} after {iterations} iterations)")]
    NewtonDiverged { param: f64, iterations: usize },

    /// A computed Poincaré matrix is not symplectic to tolerance.
    #[error("monodromy determinant {det} deviates from 1 beyond tolerance")]
    DeterminantViolation { det: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A structural identity that must hold to stated tolerance did not.
    #[error("identity `{name}` violated: residual {residual:.3e} exceeds {tol:.1e}")]
    IdentityViolation {
        name: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
