//! The elliptic problem ẍ + x/(x² + r(t, e)²)^{3/2} = 0 for e > 0:
//! Newton shooting for the odd families (X(mπ; η, e) = 0) and even families
//! (Ẋ(mπ; ξ, e) = 0), with the exact shooting derivative supplied by the
//! variational equation, and the 2mπ monodromy trace along each solution.

use std::f64::consts::PI;

use crate::circular::{CircularOrbit, FrequencyPair};
use crate::error::{Error, Result};
use crate::hill::{self, Monodromy2x2, StabilityClass};
use crate::kepler;
use crate::ode::{self, IntegratorConfig, PhaseState};
use crate::slope::Parity;

const SHOOT_TOL: f64 = 1e-10;
const MAX_NEWTON: usize = 25;
const FAMILY_DET_TOL: f64 = 1e-7;

fn check_eccentricity(e: f64) -> Result<()> {
    if !(0.0..1.0).contains(&e) || !e.is_finite() {
        return Err(Error::EccentricityOutOfRange { e });
    }
    Ok(())
}

/// F(x, t, e) = x/(x² + r²(t, e))^{3/2}; odd in x, even and 2π-periodic in
/// t, and identical to the circular force at e = 0.
pub fn force(x: f64, t: f64, e: f64) -> f64 {
    let r = kepler::radius_unchecked(t, e);
    let s = x * x + r * r;
    x / (s * s.sqrt())
}

/// ∂F/∂x = (r² − 2x²)/(x² + r²)^{5/2}, the Hill potential along a solution.
pub fn force_dx(x: f64, t: f64, e: f64) -> f64 {
    let r = kepler::radius_unchecked(t, e);
    let s = x * x + r * r;
    (r * r - 2.0 * x * x) / (s * s * s.sqrt())
}

/// ∂²F/∂t∂e at e = 0: −3x·sin t / (4(x² + r₀²)^{5/2}).
///
/// Equivalently ∂/∂t of (∂F/∂r)·(∂r/∂e) at e = 0, where ∂r/∂e|₀ is
/// [`kepler::radius_de`]; the 1/4 is r₀².
pub fn force_dt_de(x: f64, t: f64) -> f64 {
    let s = x * x + kepler::R0 * kepler::R0;
    -3.0 * x * t.sin() / (4.0 * s * s * s.sqrt())
}

/// Phase-plane vector field (ẋ, −F(x, t, e)).
pub fn field_elliptic(state: PhaseState, e: f64) -> Result<(f64, f64)> {
    check_eccentricity(e)?;
    Ok((state.v, -force(state.x, state.t, e)))
}

fn rhs(e: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |t, y, dy| {
        dy[0] = y[1];
        dy[1] = -force(y[0], t, e);
    }
}

/// Orbit plus one variational column: z = (x, ẋ, y, ẏ), ÿ + F_x(x, t, e)y = 0.
fn shoot_rhs(e: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |t, z, dz| {
        let q = force_dx(z[0], t, e);
        dz[0] = z[1];
        dz[1] = -force(z[0], t, e);
        dz[2] = z[3];
        dz[3] = -q * z[2];
    }
}

/// Orbit plus both fundamental columns: z = (x, ẋ, ψ₁, ψ̇₁, ψ₂, ψ̇₂).
fn monodromy_rhs(e: f64) -> impl Fn(f64, &[f64], &mut [f64]) {
    move |t, z, dz| {
        let q = force_dx(z[0], t, e);
        dz[0] = z[1];
        dz[1] = -force(z[0], t, e);
        dz[2] = z[3];
        dz[3] = -q * z[2];
        dz[4] = z[5];
        dz[5] = -q * z[4];
    }
}

/// One continued (m, p)-solution at eccentricity e.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ContinuationPoint {
    pub e: f64,
    pub mp: FrequencyPair,
    pub parity: Parity,
    /// η(e) for odd families, ξ(e) for even ones.
    pub shoot_param: f64,
    /// |X(mπ)| (odd) or |Ẋ(mπ)| (even) at convergence.
    pub residual: f64,
    pub newton_iterations: usize,
    /// Trace of the 2mπ monodromy along the solution.
    pub tau: f64,
    pub monodromy: Monodromy2x2,
    pub cls: StabilityClass,
}

#[allow(clippy::too_many_arguments)]
fn finish_point(
    mp: FrequencyPair,
    parity: Parity,
    e: f64,
    param: f64,
    residual: f64,
    iterations: usize,
    z0: [f64; 6],
    cfg: &IntegratorConfig,
) -> Result<ContinuationPoint> {
    let span = mp.full_period();
    let z = ode::integrate(monodromy_rhs(e), &z0, 0.0, span, cfg)?;
    let monodromy = Monodromy2x2 {
        a: z[2],
        c: z[3],
        b: z[4],
        d: z[5],
        interval: span,
    };
    let det = monodromy.det();
    if (det - 1.0).abs() > FAMILY_DET_TOL {
        return Err(Error::DeterminantViolation { det });
    }
    let cls = hill::classify(&monodromy)?;
    Ok(ContinuationPoint {
        e,
        mp,
        parity,
        shoot_param: param,
        residual,
        newton_iterations: iterations,
        tau: monodromy.trace(),
        monodromy,
        cls,
    })
}

/// Newton on η ↦ X(mπ; η, e), derivative from the variational column with
/// frame (0, 1). Converges to |X(mπ)| ≤ 1e-10 or reports divergence.
pub fn shoot_odd(
    mp: FrequencyPair,
    e: f64,
    eta_guess: f64,
    cfg: &IntegratorConfig,
) -> Result<ContinuationPoint> {
    check_eccentricity(e)?;
    if !(0.0 < eta_guess && eta_guess < 2.0) {
        return Err(Error::VelocityOutOfRange { eta: eta_guess });
    }
    let m_pi = mp.m() as f64 * PI;
    let f = shoot_rhs(e);
    let mut eta = eta_guess;
    for iteration in 1..=MAX_NEWTON {
        let z = ode::integrate(&f, &[0.0, eta, 0.0, 1.0], 0.0, m_pi, cfg)?;
        let (x_end, sensitivity) = (z[0], z[2]);
        if x_end.abs() <= SHOOT_TOL {
            return finish_point(
                mp,
                Parity::Odd,
                e,
                eta,
                x_end.abs(),
                iteration,
                [0.0, eta, 1.0, 0.0, 0.0, 1.0],
                cfg,
            );
        }
        eta -= x_end / sensitivity;
        if !eta.is_finite() || eta <= 0.0 || eta >= 2.0 {
            return Err(Error::NewtonDiverged {
                param: eta,
                iterations: iteration,
            });
        }
    }
    Err(Error::NewtonDiverged {
        param: eta,
        iterations: MAX_NEWTON,
    })
}

/// Newton on ξ ↦ Ẋ(mπ; ξ, e), derivative from the variational column with
/// frame (1, 0) — the sensitivity of Ẋ to the initial amplitude.
pub fn shoot_even(
    mp: FrequencyPair,
    e: f64,
    xi_guess: f64,
    cfg: &IntegratorConfig,
) -> Result<ContinuationPoint> {
    check_eccentricity(e)?;
    if !(xi_guess > 0.0) {
        return Err(Error::AmplitudeOutOfRange { xi: xi_guess });
    }
    let m_pi = mp.m() as f64 * PI;
    let f = shoot_rhs(e);
    let mut xi = xi_guess;
    for iteration in 1..=MAX_NEWTON {
        let z = ode::integrate(&f, &[xi, 0.0, 1.0, 0.0], 0.0, m_pi, cfg)?;
        let (v_end, sensitivity) = (z[1], z[3]);
        if v_end.abs() <= SHOOT_TOL {
            return finish_point(
                mp,
                Parity::Even,
                e,
                xi,
                v_end.abs(),
                iteration,
                [xi, 0.0, 1.0, 0.0, 0.0, 1.0],
                cfg,
            );
        }
        xi -= v_end / sensitivity;
        if !xi.is_finite() || xi <= 0.0 {
            return Err(Error::NewtonDiverged {
                param: xi,
                iterations: iteration,
            });
        }
    }
    Err(Error::NewtonDiverged {
        param: xi,
        iterations: MAX_NEWTON,
    })
}

fn shoot(
    mp: FrequencyPair,
    parity: Parity,
    e: f64,
    guess: f64,
    cfg: &IntegratorConfig,
) -> Result<ContinuationPoint> {
    match parity {
        Parity::Odd => shoot_odd(mp, e, guess, cfg),
        Parity::Even => shoot_even(mp, e, guess, cfg),
    }
}

/// Where a family trace stopped early.
#[derive(Debug, Clone)]
pub struct FamilyFailure {
    pub e: f64,
    pub error: Error,
}

/// Continuation results up to the first failure, if any.
#[derive(Debug, Clone)]
pub struct FamilyTrace {
    pub points: Vec<ContinuationPoint>,
    pub failure: Option<FamilyFailure>,
}

/// Warm-started continuation over `e_list` (ascending, starting at 0).
/// If Newton diverges at some e the step is bisected once for a better warm
/// start; on repeated failure the earlier points are still returned.
pub fn trace_along_family(
    mp: FrequencyPair,
    parity: Parity,
    e_list: &[f64],
    cfg: &IntegratorConfig,
) -> Result<FamilyTrace> {
    if e_list.is_empty() {
        return Err(Error::PreconditionViolated(
            "e_list must be non-empty".into(),
        ));
    }
    if e_list[0] != 0.0 {
        return Err(Error::PreconditionViolated(
            "e_list must start at e = 0".into(),
        ));
    }
    for w in e_list.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::PreconditionViolated(
                "e_list must be strictly ascending".into(),
            ));
        }
    }
    for &e in e_list {
        check_eccentricity(e)?;
    }

    let orbit = CircularOrbit::for_frequency(mp, cfg)?;
    let mut guess = match parity {
        Parity::Odd => orbit.eta,
        Parity::Even => orbit.xi,
    };
    let mut points: Vec<ContinuationPoint> = Vec::with_capacity(e_list.len());
    let mut failure = None;
    let mut e_prev = 0.0;
    for &e in e_list {
        match shoot(mp, parity, e, guess, cfg) {
            Ok(pt) => {
                guess = pt.shoot_param;
                e_prev = e;
                points.push(pt);
            }
            Err(first_err) => {
                let e_mid = 0.5 * (e_prev + e);
                let retried = shoot(mp, parity, e_mid, guess, cfg)
                    .and_then(|mid| shoot(mp, parity, e, mid.shoot_param, cfg));
                match retried {
                    Ok(pt) => {
                        guess = pt.shoot_param;
                        e_prev = e;
                        points.push(pt);
                    }
                    Err(_) => {
                        failure = Some(FamilyFailure {
                            e,
                            error: first_err,
                        });
                        break;
                    }
                }
            }
        }
    }
    Ok(FamilyTrace { points, failure })
}

/// φ(t) of the shot solution on a sorted nonnegative grid (for symmetry and
/// anti-periodicity checks).
pub fn orbit_samples(
    point: &ContinuationPoint,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<PhaseState>> {
    let y0 = match point.parity {
        Parity::Odd => [0.0, point.shoot_param],
        Parity::Even => [point.shoot_param, 0.0],
    };
    let t_end = times.last().copied().unwrap_or(0.0);
    let states = ode::integrate_samples(rhs(point.e), &y0, 0.0, t_end, times, cfg)?;
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, y)| PhaseState::new(t, y[0], y[1]))
        .collect())
}
