//! Output row schemas. Field order here is the CSV column order and the
//! JSON key order; every row carries the tolerances it was computed with.

use serde::Serialize;

use sitnikov_core::circular::CircularOrbit;
use sitnikov_core::continuation::ContinuationPoint;
use sitnikov_core::ode::IntegratorConfig;
use sitnikov_core::slope::{Parity, SlopeReport, SlopeVerdict};
use sitnikov_core::StabilityClass;

/// CSV view of a row: header names and formatted cells (17 significant
/// digits for floats, RFC 4180 quoting handled by the writer).
pub trait Row {
    fn header() -> Vec<&'static str>;
    fn cells(&self) -> Vec<String>;
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

#[derive(Serialize)]
pub struct Table1Row {
    pub n: u32,
    pub eta: f64,
    pub h: f64,
    pub a_n: f64,
    pub positive: bool,
    pub convergence_delta: f64,
    pub ref_eta: Option<f64>,
    pub ref_h: Option<f64>,
    pub ref_a_n: Option<f64>,
    pub dev_eta: Option<f64>,
    pub dev_h: Option<f64>,
    pub dev_a_n: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Row for Table1Row {
    fn header() -> Vec<&'static str> {
        vec![
            "n",
            "eta",
            "h",
            "a_n",
            "positive",
            "convergence_delta",
            "ref_eta",
            "ref_h",
            "ref_a_n",
            "dev_eta",
            "dev_h",
            "dev_a_n",
            "abs_tol",
            "rel_tol",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_f64(self.eta),
            fmt_f64(self.h),
            fmt_f64(self.a_n),
            self.positive.to_string(),
            fmt_f64(self.convergence_delta),
            fmt_opt(self.ref_eta),
            fmt_opt(self.ref_h),
            fmt_opt(self.ref_a_n),
            fmt_opt(self.dev_eta),
            fmt_opt(self.dev_h),
            fmt_opt(self.dev_a_n),
            fmt_f64(self.abs_tol),
            fmt_f64(self.rel_tol),
        ]
    }
}

fn parity_str(p: Parity) -> &'static str {
    match p {
        Parity::Odd => "odd",
        Parity::Even => "even",
    }
}

fn verdict_str(v: SlopeVerdict) -> &'static str {
    match v {
        SlopeVerdict::Hyperbolic => "hyperbolic",
        SlopeVerdict::Elliptic => "elliptic",
        SlopeVerdict::Undetermined => "undetermined",
    }
}

fn class_str(c: StabilityClass) -> &'static str {
    match c {
        StabilityClass::Elliptic => "elliptic",
        StabilityClass::Hyperbolic => "hyperbolic",
        StabilityClass::ParabolicStable => "parabolic-stable",
        StabilityClass::ParabolicUnstable => "parabolic-unstable",
        StabilityClass::ParabolicUndetermined => "parabolic-undetermined",
    }
}

#[derive(Serialize)]
pub struct SlopeRow {
    pub m: u32,
    pub p: u32,
    pub parity: &'static str,
    pub h: f64,
    pub eta: f64,
    pub xi: f64,
    pub period: f64,
    pub period_derivative: f64,
    pub tau_prime: f64,
    pub tau_prime_raw: f64,
    pub integral_g_cos: f64,
    pub a_n: Option<f64>,
    pub verdict: &'static str,
    pub ibp_residual: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl SlopeRow {
    pub fn new(r: &SlopeReport, cfg: &IntegratorConfig) -> Self {
        Self {
            m: r.mp.m(),
            p: r.mp.p(),
            parity: parity_str(r.parity),
            h: r.orbit.h,
            eta: r.orbit.eta,
            xi: r.orbit.xi,
            period: r.orbit.period,
            period_derivative: r.orbit.period_derivative,
            tau_prime: r.tau_prime,
            tau_prime_raw: r.tau_prime_raw,
            integral_g_cos: r.integral_g_cos,
            a_n: r.a_n,
            verdict: verdict_str(r.verdict),
            ibp_residual: r.ibp_residual,
            abs_tol: cfg.abs_tol,
            rel_tol: cfg.rel_tol,
        }
    }
}

impl Row for SlopeRow {
    fn header() -> Vec<&'static str> {
        vec![
            "m",
            "p",
            "parity",
            "h",
            "eta",
            "xi",
            "period",
            "period_derivative",
            "tau_prime",
            "tau_prime_raw",
            "integral_g_cos",
            "a_n",
            "verdict",
            "ibp_residual",
            "abs_tol",
            "rel_tol",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.p.to_string(),
            self.parity.to_string(),
            fmt_f64(self.h),
            fmt_f64(self.eta),
            fmt_f64(self.xi),
            fmt_f64(self.period),
            fmt_f64(self.period_derivative),
            fmt_f64(self.tau_prime),
            fmt_f64(self.tau_prime_raw),
            fmt_f64(self.integral_g_cos),
            fmt_opt(self.a_n),
            self.verdict.to_string(),
            fmt_f64(self.ibp_residual),
            fmt_f64(self.abs_tol),
            fmt_f64(self.rel_tol),
        ]
    }
}

#[derive(Serialize)]
pub struct ContinueRow {
    pub m: u32,
    pub p: u32,
    pub parity: &'static str,
    pub e: f64,
    pub shoot_param: f64,
    pub residual: f64,
    pub newton_iterations: usize,
    pub tau: f64,
    pub det: f64,
    pub class: &'static str,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl ContinueRow {
    pub fn new(pt: &ContinuationPoint, cfg: &IntegratorConfig) -> Self {
        Self {
            m: pt.mp.m(),
            p: pt.mp.p(),
            parity: parity_str(pt.parity),
            e: pt.e,
            shoot_param: pt.shoot_param,
            residual: pt.residual,
            newton_iterations: pt.newton_iterations,
            tau: pt.tau,
            det: pt.monodromy.det(),
            class: class_str(pt.cls),
            abs_tol: cfg.abs_tol,
            rel_tol: cfg.rel_tol,
        }
    }
}

impl Row for ContinueRow {
    fn header() -> Vec<&'static str> {
        vec![
            "m",
            "p",
            "parity",
            "e",
            "shoot_param",
            "residual",
            "newton_iterations",
            "tau",
            "det",
            "class",
            "abs_tol",
            "rel_tol",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.m.to_string(),
            self.p.to_string(),
            self.parity.to_string(),
            fmt_f64(self.e),
            fmt_f64(self.shoot_param),
            fmt_f64(self.residual),
            self.newton_iterations.to_string(),
            fmt_f64(self.tau),
            fmt_f64(self.det),
            self.class.to_string(),
            fmt_f64(self.abs_tol),
            fmt_f64(self.rel_tol),
        ]
    }
}

#[derive(Serialize)]
pub struct PeriodRow {
    pub h: f64,
    pub eta: f64,
    pub xi: f64,
    pub period: f64,
    pub period_derivative: f64,
    pub t_target: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl PeriodRow {
    pub fn new(orbit: &CircularOrbit, t_target: Option<f64>, cfg: &IntegratorConfig) -> Self {
        Self {
            h: orbit.h,
            eta: orbit.eta,
            xi: orbit.xi,
            period: orbit.period,
            period_derivative: orbit.period_derivative,
            t_target,
            abs_tol: cfg.abs_tol,
            rel_tol: cfg.rel_tol,
        }
    }
}

impl Row for PeriodRow {
    fn header() -> Vec<&'static str> {
        vec![
            "h",
            "eta",
            "xi",
            "period",
            "period_derivative",
            "t_target",
            "abs_tol",
            "rel_tol",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            fmt_f64(self.h),
            fmt_f64(self.eta),
            fmt_f64(self.xi),
            fmt_f64(self.period),
            fmt_f64(self.period_derivative),
            fmt_opt(self.t_target),
            fmt_f64(self.abs_tol),
            fmt_f64(self.rel_tol),
        ]
    }
}
