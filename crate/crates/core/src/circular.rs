//! The autonomous circular problem ẍ + x/(x² + r₀²)^{3/2} = 0: energy
//! levels, the odd solutions S(t, η) and even solutions C(t, ξ), the period
//! function T(h) with its derivative, and inversion of T to target periods.
//!
//! Energies follow the shifted convention H(x, ẋ) = ẋ²/2 − 1/√(x² + r₀²),
//! so the center sits at h = −2 and bounded orbits fill h ∈ (−2, 0).

use crate::error::{Error, Result};
use crate::kepler::R0;
use crate::ode::{self, EventDirection, EventSpec, IntegratorConfig, PhaseState};
use crate::root;

/// Infimum of the period function: 2π/√8, the limit of small oscillations.
pub const MIN_PERIOD: f64 = 2.221_441_469_079_183;

/// Restoring force f(x) = x/(x² + r₀²)^{3/2}; odd, with x·f(x) > 0 for x ≠ 0.
pub fn restoring_force(x: f64) -> f64 {
    let s = x * x + R0 * R0;
    x / (s * s.sqrt())
}

/// f′(x) = (r₀² − 2x²)/(x² + r₀²)^{5/2}, the linearization potential.
pub fn restoring_force_dx(x: f64) -> f64 {
    let s = x * x + R0 * R0;
    (R0 * R0 - 2.0 * x * x) / (s * s * s.sqrt())
}

/// Energy H(x, ẋ) = ẋ²/2 − 1/√(x² + r₀²).
pub fn energy(x: f64, v: f64) -> f64 {
    0.5 * v * v - 1.0 / (x * x + R0 * R0).sqrt()
}

pub fn eta_from_energy(h: f64) -> f64 {
    (2.0 * (h + 2.0)).sqrt()
}

pub fn energy_from_eta(eta: f64) -> f64 {
    0.5 * eta * eta - 2.0
}

/// Turning-point amplitude: −1/√(ξ² + r₀²) = h.
pub fn xi_from_energy(h: f64) -> f64 {
    (1.0 / (h * h) - R0 * R0).sqrt()
}

pub fn energy_from_xi(xi: f64) -> f64 {
    -1.0 / (xi * xi + R0 * R0).sqrt()
}

/// Phase-plane vector field of the circular problem: (ẋ, −f(x)).
pub fn field_circular(state: PhaseState) -> (f64, f64) {
    (state.v, -restoring_force(state.x))
}

/// First-order form for the integrator.
pub fn rhs(_t: f64, y: &[f64], dy: &mut [f64]) {
    dy[0] = y[1];
    dy[1] = -restoring_force(y[0]);
}

fn check_energy(h: f64) -> Result<()> {
    if !(-2.0 < h && h < 0.0) {
        return Err(Error::EnergyOutOfRange { h });
    }
    Ok(())
}

fn check_eta(eta: f64) -> Result<()> {
    if !(0.0 < eta && eta < 2.0) {
        return Err(Error::VelocityOutOfRange { eta });
    }
    Ok(())
}

/// Odd solution S(t, η) from (x, ẋ)(0) = (0, η).
pub fn odd_solution(eta: f64, t: f64, cfg: &IntegratorConfig) -> Result<PhaseState> {
    check_eta(eta)?;
    let y = ode::integrate(rhs, &[0.0, eta], 0.0, t, cfg)?;
    Ok(PhaseState::new(t, y[0], y[1]))
}

/// S(t, η) on a sorted nonnegative grid, in one dense-output pass.
pub fn odd_solution_samples(
    eta: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<PhaseState>> {
    check_eta(eta)?;
    solution_samples(&[0.0, eta], times, cfg)
}

/// Even solution C(t, ξ) from (x, ẋ)(0) = (ξ, 0).
pub fn even_solution(xi: f64, t: f64, cfg: &IntegratorConfig) -> Result<PhaseState> {
    if !(xi > 0.0) {
        return Err(Error::AmplitudeOutOfRange { xi });
    }
    let y = ode::integrate(rhs, &[xi, 0.0], 0.0, t, cfg)?;
    Ok(PhaseState::new(t, y[0], y[1]))
}

/// C(t, ξ) on a sorted nonnegative grid, in one dense-output pass.
pub fn even_solution_samples(
    xi: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<PhaseState>> {
    if !(xi > 0.0) {
        return Err(Error::AmplitudeOutOfRange { xi });
    }
    solution_samples(&[xi, 0.0], times, cfg)
}

fn solution_samples(y0: &[f64], times: &[f64], cfg: &IntegratorConfig) -> Result<Vec<PhaseState>> {
    let t_end = times.last().copied().unwrap_or(0.0);
    let states = ode::integrate_samples(rhs, y0, 0.0, t_end, times, cfg)?;
    Ok(times
        .iter()
        .zip(states)
        .map(|(&t, y)| PhaseState::new(t, y[0], y[1]))
        .collect())
}

/// Minimal period T(h), via four times the first turning point of the odd
/// solution. The turning point is a transversal ẋ = 0 crossing, located by
/// the event machinery well below the root-finder tolerances layered on top.
pub fn period(h: f64, cfg: &IntegratorConfig) -> Result<f64> {
    check_energy(h)?;
    let eta = eta_from_energy(h);
    let mut ev = EventSpec::new(|_t, y: &[f64]| y[1], EventDirection::Falling);
    // The turning point gets shallow for large orbits (|v̇| = f(ξ) ~ h²), so
    // a 1e-12 bound on |v| alone would leave ~1e-9 of period noise. Refine
    // down to the bracket-width floor instead; the value bound still holds.
    ev.value_tol = 0.0;
    let (t_quarter, _) = ode::integrate_to_event(rhs, &[0.0, eta], 0.0, &ev, cfg)?;
    Ok(4.0 * t_quarter)
}

/// dT/dh by centered finite difference with step 1e-6·max(1, |h|).
///
/// The exact cross-check against the half-period Poincaré entry
/// b̂ = (η²/2)·T′ lives in the Hill layer, which consumes this value.
pub fn period_derivative(h: f64, cfg: &IntegratorConfig) -> Result<f64> {
    check_energy(h)?;
    let delta = (1e-6 * h.abs().max(1.0)).min(0.5 * -h).min(0.5 * (h + 2.0));
    let tp = (period(h + delta, cfg)? - period(h - delta, cfg)?) / (2.0 * delta);
    if !(tp > 0.0) {
        return Err(Error::IdentityViolation {
            name: "period-monotonicity",
            residual: tp,
            tol: 0.0,
        });
    }
    Ok(tp)
}

/// Invert the monotone period function: find h with T(h) = `t_target`
/// to |T(h) − t_target| ≤ 1e-10, or to the event-noise floor of the
/// numerical period where that floor exceeds 1e-10 (very large orbits).
pub fn solve_energy_for_period(t_target: f64, cfg: &IntegratorConfig) -> Result<f64> {
    const RESIDUAL_TOL: f64 = 1e-10;
    if !(t_target > MIN_PERIOD) || !t_target.is_finite() {
        return Err(Error::PeriodNotAttainable { t_target });
    }
    let lo = -2.0 + 1e-9;
    let t_lo = period(lo, cfg)?;
    if t_lo >= t_target {
        return Err(Error::PeriodNotAttainable { t_target });
    }
    // Expand toward h = 0 with the Kepler-like scaling T ~ (−h)^{−3/2},
    // overshooting slightly so [prev, hi] brackets the target.
    let mut hi = -0.5_f64.min(-lo);
    let mut t_hi = period(hi, cfg)?;
    let mut prev = lo;
    let mut t_prev = t_lo;
    let mut guard = 0;
    while t_hi < t_target {
        prev = hi;
        t_prev = t_hi;
        hi = -(-hi) * 0.9 * (t_hi / t_target).powf(2.0 / 3.0);
        t_hi = period(hi, cfg)?;
        guard += 1;
        if guard > 200 {
            return Err(Error::PeriodNotAttainable { t_target });
        }
    }
    // The numerical period carries event-time noise ~ δv/|v̇| at the turning
    // point, and |v̇| = f(ξ) shrinks like h² toward h = 0. The convergence
    // gate cannot be sharper than that floor.
    let noise_floor = 32.0 * cfg.abs_tol.max(cfg.rel_tol) / restoring_force(xi_from_energy(hi));
    let tol = RESIDUAL_TOL.max(noise_floor);
    let (h_root, residual) = root::illinois(
        |h| match period(h, cfg) {
            Ok(t) => t - t_target,
            Err(_) => f64::NAN,
        },
        prev,
        hi,
        t_prev - t_target,
        t_hi - t_target,
        tol,
        0.0,
        200,
    );
    if residual.abs() > tol {
        return Err(Error::IdentityViolation {
            name: "period-solve-residual",
            residual: residual.abs(),
            tol,
        });
    }
    Ok(h_root)
}

/// Integer frequencies (m, p) with the admissibility bound p² ≤ 8m²,
/// i.e. 1 ≤ p ≤ ⌊√8·m⌋ (checked exactly in integers).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FrequencyPair {
    m: u32,
    p: u32,
}

impl FrequencyPair {
    pub fn new(m: u32, p: u32) -> Result<Self> {
        let admissible = m >= 1 && p >= 1 && (p as u64) * (p as u64) <= 8 * (m as u64) * (m as u64);
        if !admissible {
            return Err(Error::InadmissibleFrequency { m, p });
        }
        Ok(Self { m, p })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Rotation number ϱ = p/m.
    pub fn rotation_number(&self) -> f64 {
        self.p as f64 / self.m as f64
    }

    /// The full period 2mπ over which monodromy and traces are taken.
    pub fn full_period(&self) -> f64 {
        2.0 * self.m as f64 * std::f64::consts::PI
    }

    /// Minimal period 2mπ/p of the underlying orbit at e = 0.
    pub fn orbit_period(&self) -> f64 {
        self.full_period() / self.p as f64
    }

    /// Some(n) iff m = 2pn: the only frequencies with nonzero trace slope.
    pub fn resonance_index(&self) -> Option<u32> {
        if self.m.is_multiple_of(2 * self.p) {
            Some(self.m / (2 * self.p))
        } else {
            None
        }
    }
}

impl std::fmt::Display for FrequencyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.m, self.p)
    }
}

/// One energy level of the circular problem with everything the slope
/// pipeline needs resolved once.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct CircularOrbit {
    pub h: f64,
    pub eta: f64,
    pub xi: f64,
    pub period: f64,
    pub period_derivative: f64,
}

impl CircularOrbit {
    pub fn from_energy(h: f64, cfg: &IntegratorConfig) -> Result<Self> {
        check_energy(h)?;
        Ok(Self {
            h,
            eta: eta_from_energy(h),
            xi: xi_from_energy(h),
            period: period(h, cfg)?,
            period_derivative: period_derivative(h, cfg)?,
        })
    }

    /// The orbit whose minimal period is 2mπ/p.
    pub fn for_frequency(mp: FrequencyPair, cfg: &IntegratorConfig) -> Result<Self> {
        let h = solve_energy_for_period(mp.orbit_period(), cfg)?;
        Self::from_energy(h, cfg)
    }
}
