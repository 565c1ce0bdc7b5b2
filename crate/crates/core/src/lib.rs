//! Numerical toolkit for symmetric periodic orbits of the circular and
//! elliptic Sitnikov problems.
//!
//! The crate is organised bottom-up:
//!
//! - [`ode`] — adaptive embedded Runge–Kutta integration with dense output,
//!   event location, and augmented quadrature accumulators;
//! - [`kepler`] — the Kepler equation and the primaries' separation r(t, e);
//! - [`circular`] — the autonomous circular problem: odd/even orbits, the
//!   period function T(h) and its derivative, and inversion of T;
//! - [`hill`] — fundamental solutions, Poincaré matrices, stability
//!   classification, and the Fréchet derivative of the trace;
//! - [`slope`] — the closed-form trace-slope criteria at e = 0 and the
//!   resonant-orbit reference table;
//! - [`continuation`] — shooting for odd/even families at e > 0 and the
//!   monodromy trace along them.
//!
//! ```
//! use sitnikov_core::{circular::FrequencyPair, ode::IntegratorConfig, slope};
//!
//! let cfg = IntegratorConfig::default();
//! let mp = FrequencyPair::new(2, 1)?;
//! let odd = slope::slope_odd(mp, &cfg)?;   // τ′(0) > 0: hyperbolic for small e
//! let even = slope::slope_even(mp, &cfg)?; // τ′(0) < 0: elliptic for small e
//! assert!(odd.tau_prime > 0.0 && even.tau_prime < 0.0);
//! # Ok::<(), sitnikov_core::Error>(())
//! ```

// Negated guards like `!(x > 0.0)` are kept on purpose: they reject NaN,
// which the non-negated forms silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circular;
pub mod continuation;
pub mod error;
pub mod hill;
pub mod kepler;
pub mod ode;
mod root;
pub mod slope;

pub use circular::{CircularOrbit, FrequencyPair};
pub use continuation::{ContinuationPoint, FamilyTrace};
pub use error::{Error, Result};
pub use hill::{Monodromy2x2, StabilityClass};
pub use ode::{EventDirection, EventSpec, IntegratorConfig, PhaseState};
pub use slope::{Parity, SlopeReport, SlopeVerdict};
