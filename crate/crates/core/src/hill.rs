//! Hill equations ÿ + q(t)·y = 0: fundamental solutions, Poincaré matrices,
//! stability classification, half-period structure along circular orbits,
//! and the Fréchet derivative of the trace with respect to the potential.

use crate::circular;
use crate::error::{Error, Result};
use crate::ode::{self, IntegratorConfig};

/// Half-width of the numerically meaningful elliptic/hyperbolic gap around
/// |trace| = 2.
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Symplecticity gate for classification.
pub const DET_TOL: f64 = 1e-6;

/// Off-diagonal magnitude that decisively marks parabolic-unstable inside
/// the |trace| ≈ 2 band (√CLASSIFY_TOL; smaller but nonzero entries within
/// the band stay undetermined).
const PARABOLIC_OFFDIAG: f64 = 1e-3;

/// A potential q(t), optionally driven by an auxiliary ODE (e.g. the orbit
/// whose linearization defines q). Fundamental solutions are integrated
/// jointly with the driver in one pass, so q is never interpolated.
pub trait HillSystem {
    /// Period of q(t).
    fn q_period(&self) -> f64;

    fn driver_dim(&self) -> usize {
        0
    }

    fn init_driver(&self, _out: &mut [f64]) {}

    fn driver_rhs(&self, _t: f64, _driver: &[f64], _out: &mut [f64]) {}

    fn q(&self, t: f64, driver: &[f64]) -> f64;
}

/// A closed-form potential.
pub struct PotentialFn<Q> {
    pub q: Q,
    pub period: f64,
}

impl<Q: Fn(f64) -> f64> HillSystem for PotentialFn<Q> {
    fn q_period(&self) -> f64 {
        self.period
    }

    fn q(&self, t: f64, _driver: &[f64]) -> f64 {
        (self.q)(t)
    }
}

/// q(t) = f′(S(t, η)) along the odd circular orbit; minimal period T/2.
pub struct CircularLinearization {
    eta: f64,
    half_period: f64,
}

impl CircularLinearization {
    pub fn new(eta: f64, cfg: &IntegratorConfig) -> Result<Self> {
        let h = circular::energy_from_eta(eta);
        let period = circular::period(h, cfg)?;
        Ok(Self {
            eta,
            half_period: 0.5 * period,
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Minimal period T of the underlying orbit.
    pub fn orbit_period(&self) -> f64 {
        2.0 * self.half_period
    }
}

impl HillSystem for CircularLinearization {
    fn q_period(&self) -> f64 {
        self.half_period
    }

    fn driver_dim(&self) -> usize {
        2
    }

    fn init_driver(&self, out: &mut [f64]) {
        out[0] = 0.0;
        out[1] = self.eta;
    }

    fn driver_rhs(&self, t: f64, driver: &[f64], out: &mut [f64]) {
        circular::rhs(t, driver, out);
    }

    fn q(&self, _t: f64, driver: &[f64]) -> f64 {
        circular::restoring_force_dx(driver[0])
    }
}

/// Entries of a Poincaré matrix over the stated interval:
/// columns (ψ₁, ψ̇₁) and (ψ₂, ψ̇₂) at the interval end.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Monodromy2x2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Interval length the matrix was integrated over.
    pub interval: f64,
}

impl Monodromy2x2 {
    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn mul(&self, rhs: &Monodromy2x2) -> Monodromy2x2 {
        Monodromy2x2 {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
            interval: self.interval + rhs.interval,
        }
    }

    pub fn powi(&self, n: u32) -> Monodromy2x2 {
        let mut acc = Monodromy2x2 {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
            interval: 0.0,
        };
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Linearized stability of a Hill equation from its Poincaré matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum StabilityClass {
    Elliptic,
    Hyperbolic,
    ParabolicStable,
    ParabolicUnstable,
    ParabolicUndetermined,
}

fn hill_init<S: HillSystem + ?Sized>(sys: &S) -> Vec<f64> {
    let d = sys.driver_dim();
    let mut z = vec![0.0; d + 4];
    sys.init_driver(&mut z[..d]);
    z[d] = 1.0; // ψ₁ frame (1, 0)
    z[d + 3] = 1.0; // ψ₂ frame (0, 1)
    z
}

fn hill_rhs<S: HillSystem + ?Sized>(sys: &S) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
    let d = sys.driver_dim();
    move |t, z, dz| {
        let (driver, psi) = z.split_at(d);
        let (ddriver, dpsi) = dz.split_at_mut(d);
        sys.driver_rhs(t, driver, ddriver);
        let q = sys.q(t, driver);
        dpsi[0] = psi[1];
        dpsi[1] = -q * psi[0];
        dpsi[2] = psi[3];
        dpsi[3] = -q * psi[2];
    }
}

fn monodromy_from_state(z: &[f64], d: usize, interval: f64) -> Monodromy2x2 {
    Monodromy2x2 {
        a: z[d],
        c: z[d + 1],
        b: z[d + 2],
        d: z[d + 3],
        interval,
    }
}

/// Both fundamental columns over [0, t_end], integrated as one first-order
/// system (driver + 4) in a single pass.
pub fn fundamental_solutions<S: HillSystem + ?Sized>(
    sys: &S,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Monodromy2x2> {
    let z0 = hill_init(sys);
    let z = ode::integrate(hill_rhs(sys), &z0, 0.0, t_end, cfg)?;
    let mono = monodromy_from_state(&z, sys.driver_dim(), t_end);
    let det = mono.det();
    if (det - 1.0).abs() > DET_TOL {
        return Err(Error::DeterminantViolation { det });
    }
    Ok(mono)
}

/// (ψ₁, ψ̇₁, ψ₂, ψ̇₂) at each of the sorted sample `times`.
pub fn fundamental_samples<S: HillSystem + ?Sized>(
    sys: &S,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<[f64; 4]>> {
    Ok(fundamental_samples_full(sys, times, cfg)?
        .into_iter()
        .map(|(_, psi)| psi)
        .collect())
}

fn fundamental_samples_full<S: HillSystem + ?Sized>(
    sys: &S,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<(Vec<f64>, [f64; 4])>> {
    let d = sys.driver_dim();
    let z0 = hill_init(sys);
    let t_end = times.last().copied().unwrap_or(0.0);
    let states = ode::integrate_samples(hill_rhs(sys), &z0, 0.0, t_end, times, cfg)?;
    Ok(states
        .into_iter()
        .map(|z| {
            let psi = [z[d], z[d + 1], z[d + 2], z[d + 3]];
            (z[..d].to_vec(), psi)
        })
        .collect())
}

/// Classify by the trace, with the parabolic band decided by off-diagonal
/// structure (default tolerance [`CLASSIFY_TOL`]).
pub fn classify(mono: &Monodromy2x2) -> Result<StabilityClass> {
    classify_with(mono, CLASSIFY_TOL)
}

pub fn classify_with(mono: &Monodromy2x2, tol_cls: f64) -> Result<StabilityClass> {
    let det = mono.det();
    if (det - 1.0).abs() > DET_TOL {
        return Err(Error::DeterminantViolation { det });
    }
    let tau = mono.trace();
    if tau.abs() < 2.0 - tol_cls {
        return Ok(StabilityClass::Elliptic);
    }
    if tau.abs() > 2.0 + tol_cls {
        return Ok(StabilityClass::Hyperbolic);
    }
    let off = mono.b.abs().max(mono.c.abs());
    if off <= tol_cls {
        Ok(StabilityClass::ParabolicStable)
    } else if off >= PARABOLIC_OFFDIAG {
        Ok(StabilityClass::ParabolicUnstable)
    } else {
        Ok(StabilityClass::ParabolicUndetermined)
    }
}

/// Pointwise residuals of the closed-form fundamental solutions along an
/// odd circular orbit: ψ₁ = Ṡ/η, ψ̇₁ = −f(S)/η, and ψ₂ = ∂S/∂η (the latter
/// checked against a centered finite difference in η).
#[derive(Debug, Clone, Copy)]
pub struct PsiIdentityReport {
    pub max_psi1_residual: f64,
    pub max_dpsi1_residual: f64,
    pub max_psi2_fd_residual: f64,
}

pub fn verify_psi_identities(
    eta: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<PsiIdentityReport> {
    let sys = CircularLinearization::new(eta, cfg)?;
    let joint = fundamental_samples_full(&sys, times, cfg)?;
    let delta = 1e-6;
    let plus = circular::odd_solution_samples(eta + delta, times, cfg)?;
    let minus = circular::odd_solution_samples(eta - delta, times, cfg)?;
    let mut report = PsiIdentityReport {
        max_psi1_residual: 0.0,
        max_dpsi1_residual: 0.0,
        max_psi2_fd_residual: 0.0,
    };
    for ((orbit, psi), (sp, sm)) in joint.iter().zip(plus.iter().zip(minus.iter())) {
        let (x, v) = (orbit[0], orbit[1]);
        report.max_psi1_residual = report.max_psi1_residual.max((psi[0] - v / eta).abs());
        report.max_dpsi1_residual = report
            .max_dpsi1_residual
            .max((psi[1] + circular::restoring_force(x) / eta).abs());
        let fd = (sp.x - sm.x) / (2.0 * delta);
        report.max_psi2_fd_residual = report.max_psi2_fd_residual.max((psi[2] - fd).abs());
    }
    Ok(report)
}

/// Poincaré structure over half-period multiples of an odd circular orbit:
/// P_{nT/2} = [[(−1)ⁿ, b̂_n], [0, (−1)ⁿ]] with b̂_n = (−1)^{n+1}·n·b̂ and
/// b̂ = (η²/2)·T′(h).
#[derive(Debug, Clone, Copy)]
pub struct HalfPeriodStructure {
    pub n: u32,
    pub monodromy: Monodromy2x2,
    /// ψ₂(T/2)
    pub b_hat: f64,
    /// ψ₂(nT/2)
    pub b_hat_n: f64,
    pub diag_residual: f64,
    pub c_residual: f64,
    /// relative deviation of b̂_n from (−1)^{n+1}·n·b̂
    pub scaling_residual: f64,
    /// relative deviation of b̂_n from (−1)^{n+1}·n·(η²/2)·T′(h)
    pub period_route_residual: f64,
}

const STRUCTURE_TOL: f64 = 1e-6;
const SCALING_RTOL: f64 = 1e-5;
const PERIOD_ROUTE_RTOL: f64 = 1e-4;

pub fn half_period_structure(
    eta: f64,
    n: u32,
    cfg: &IntegratorConfig,
) -> Result<HalfPeriodStructure> {
    if n == 0 {
        return Err(Error::PreconditionViolated("n must be >= 1".into()));
    }
    let sys = CircularLinearization::new(eta, cfg)?;
    let half = sys.q_period();
    let times: Vec<f64> = if n == 1 {
        vec![half]
    } else {
        vec![half, n as f64 * half]
    };
    let psi = fundamental_samples(&sys, &times, cfg)?;
    let b_hat = psi[0][2];
    let last = psi.last().unwrap();
    let mono = Monodromy2x2 {
        a: last[0],
        c: last[1],
        b: last[2],
        d: last[3],
        interval: n as f64 * half,
    };
    let b_hat_n = mono.b;

    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let diag_residual = (mono.a - sign).abs().max((mono.d - sign).abs());
    let c_residual = mono.c.abs();

    let predicted = -sign * n as f64 * b_hat; // (−1)^{n+1}·n·b̂
    let scaling_residual = (b_hat_n - predicted).abs() / predicted.abs().max(f64::MIN_POSITIVE);

    // Energy here is the unshifted η²/2 of the half-period identity; T(h)
    // differs from the shifted convention only by translation, so T′ agrees.
    let h = circular::energy_from_eta(eta);
    let t_prime = circular::period_derivative(h, cfg)?;
    let route = -sign * n as f64 * (0.5 * eta * eta) * t_prime;
    let period_route_residual = (b_hat_n - route).abs() / route.abs().max(f64::MIN_POSITIVE);

    let out = HalfPeriodStructure {
        n,
        monodromy: mono,
        b_hat,
        b_hat_n,
        diag_residual,
        c_residual,
        scaling_residual,
        period_route_residual,
    };
    if diag_residual > STRUCTURE_TOL {
        return Err(Error::IdentityViolation {
            name: "half-period-diagonal",
            residual: diag_residual,
            tol: STRUCTURE_TOL,
        });
    }
    if c_residual > STRUCTURE_TOL {
        return Err(Error::IdentityViolation {
            name: "half-period-lower-left",
            residual: c_residual,
            tol: STRUCTURE_TOL,
        });
    }
    if scaling_residual > SCALING_RTOL {
        return Err(Error::IdentityViolation {
            name: "half-period-scaling",
            residual: scaling_residual,
            tol: SCALING_RTOL,
        });
    }
    if period_route_residual > PERIOD_ROUTE_RTOL {
        return Err(Error::IdentityViolation {
            name: "half-period-period-route",
            residual: period_route_residual,
            tol: PERIOD_ROUTE_RTOL,
        });
    }
    Ok(out)
}

/// The trace of the Poincaré matrix over a fixed interval, seen as a
/// functional of the potential. Its Fréchet derivative has the kernel
/// K(s) = −ψ₂(T)ψ₁²(s) + (ψ₁(T) − ψ̇₂(T))ψ₁(s)ψ₂(s) + ψ̇₁(T)ψ₂²(s).
pub struct FrechetTrace<'a, S: HillSystem + ?Sized> {
    sys: &'a S,
    pub interval: f64,
    pub boundary: Monodromy2x2,
    cfg: IntegratorConfig,
}

impl<'a, S: HillSystem + ?Sized> FrechetTrace<'a, S> {
    pub fn new(sys: &'a S, interval: f64, cfg: &IntegratorConfig) -> Result<Self> {
        let boundary = fundamental_solutions(sys, interval, cfg)?;
        Ok(Self {
            sys,
            interval,
            boundary,
            cfg: cfg.clone(),
        })
    }

    fn kernel_value(&self, psi1: f64, psi2: f64) -> f64 {
        let p = &self.boundary;
        -p.b * psi1 * psi1 + (p.a - p.d) * psi1 * psi2 + p.c * psi2 * psi2
    }

    pub fn kernel_at(&self, s: f64) -> Result<f64> {
        Ok(self.kernel_samples(&[s])?[0])
    }

    pub fn kernel_samples(&self, times: &[f64]) -> Result<Vec<f64>> {
        let psi = fundamental_samples(self.sys, times, &self.cfg)?;
        Ok(psi.iter().map(|p| self.kernel_value(p[0], p[2])).collect())
    }

    /// ∫₀ᵀ K(s)·δq(s) ds, accumulated as an augmented quadrature along the
    /// same joint system that defines the ψ's.
    pub fn directional_derivative(&self, dq: &dyn Fn(f64) -> f64) -> Result<f64> {
        let d = self.sys.driver_dim();
        let z0 = hill_init(self.sys);
        let integrand = |t: f64, z: &[f64]| self.kernel_value(z[d], z[d + 2]) * dq(t);
        let (_, integral) = ode::integrate_with_quadrature(
            hill_rhs(self.sys),
            &z0,
            0.0,
            self.interval,
            integrand,
            &self.cfg,
        )?;
        Ok(integral)
    }
}

/// Kernel of the trace derivative over one period of q.
pub fn trace_frechet_kernel<S: HillSystem + ?Sized>(
    sys: &S,
    s: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    FrechetTrace::new(sys, sys.q_period(), cfg)?.kernel_at(s)
}
