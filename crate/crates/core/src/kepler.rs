//! The Kepler equation u − e·sin u = t and the primaries' separation
//! r(t, e) = r₀(1 − e·cos u(t, e)) with r₀ = 1/2, plus the ∂r/∂e slope at
//! e = 0 needed by the mixed-derivative formulas.

use crate::error::{Error, Result};

/// Half the primaries' separation on the circular orbit.
pub const R0: f64 = 0.5;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const RESIDUAL_TOL: f64 = 1e-13;

fn check_eccentricity(e: f64) -> Result<()> {
    if !(0.0..1.0).contains(&e) || !e.is_finite() {
        return Err(Error::EccentricityOutOfRange { e });
    }
    Ok(())
}

/// Solve u − e·sin u = t for the eccentric anomaly u.
///
/// The mean anomaly is range-reduced to [0, 2π) before solving and the
/// result is shifted back, which preserves u(t + 2π) = u(t) + 2π exactly.
/// Newton from u₀ = t + e·sin t, with a bisection fallback on [t − e, t + e]
/// if an iterate ever leaves that interval. Residual is certified ≤ 1e-13.
pub fn solve_kepler(t: f64, e: f64) -> Result<f64> {
    check_eccentricity(e)?;
    Ok(solve_kepler_unchecked(t, e))
}

pub(crate) fn solve_kepler_unchecked(t: f64, e: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&e));
    let turns = (t / TWO_PI).floor();
    let tr = t - TWO_PI * turns;
    let mut u = tr + e * tr.sin();
    let mut converged = false;
    for _ in 0..64 {
        let f = u - e * u.sin() - tr;
        if f.abs() <= RESIDUAL_TOL {
            converged = true;
            break;
        }
        u -= f / (1.0 - e * u.cos());
        if u < tr - e || u > tr + e {
            u = bisect_kepler(tr, e);
            converged = true;
            break;
        }
    }
    if !converged && (u - e * u.sin() - tr).abs() > RESIDUAL_TOL {
        u = bisect_kepler(tr, e);
    }
    u + TWO_PI * turns
}

/// Globally convergent fallback: u ↦ u − e·sin u − t is strictly increasing.
fn bisect_kepler(tr: f64, e: f64) -> f64 {
    let mut lo = tr - e;
    let mut hi = tr + e;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = mid - e * mid.sin() - tr;
        if fm.abs() <= RESIDUAL_TOL * 0.5 {
            return mid;
        }
        if fm < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + hi.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Separation r(t, e) = r₀(1 − e·cos u(t, e)); even and 2π-periodic in t.
pub fn radius(t: f64, e: f64) -> Result<f64> {
    check_eccentricity(e)?;
    Ok(radius_unchecked(t, e))
}

/// Hot-path variant for vector fields whose eccentricity was validated once.
pub(crate) fn radius_unchecked(t: f64, e: f64) -> f64 {
    let u = solve_kepler_unchecked(t, e);
    R0 * (1.0 - e * u.cos())
}

/// ∂r/∂e at e = 0, which is −r₀·cos t.
///
/// At e = 0 one has u = t and ∂u/∂e = sin t, so differentiating r(t, e)
/// gives r₀(−cos u + e·sin u·∂u/∂e)|₀ = −r₀·cos t.
pub fn radius_de(t: f64) -> f64 {
    -R0 * t.cos()
}
