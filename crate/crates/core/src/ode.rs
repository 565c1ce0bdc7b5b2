//! Adaptive explicit Runge–Kutta integration with dense output, event
//! location, and augmented quadrature accumulators.
//!
//! The stepper is Verner's efficient 6(5) embedded pair (9 stages, FSAL)
//! with PI step-size control and a 6th-order continuous extension that
//! needs one extra stage per interpolated step. Events are located by
//! sign-bracketing on accepted steps followed by a false-position/bisection
//! hybrid on the dense-output polynomial.

use crate::error::{Error, Result};
use crate::root;

/// Scalar integrand of (t, state) carried as a quadrature accumulator.
pub type Integrand<'a> = &'a dyn Fn(f64, &[f64]) -> f64;

/// Tolerances and budgets for one integration.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    /// Absolute local error tolerance per step.
    pub abs_tol: f64,
    /// Relative local error tolerance per step.
    pub rel_tol: f64,
    /// Upper bound on the step magnitude. Also guarantees that the smooth
    /// event functions used here cannot change sign twice within one step.
    pub max_step: f64,
    /// Step budget (accepted + rejected attempts).
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_step: 0.5,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Same budgets with both tolerances halved (self-convergence checks).
    pub fn halved(&self) -> Self {
        Self {
            abs_tol: self.abs_tol / 2.0,
            rel_tol: self.rel_tol / 2.0,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "max_step must be positive ({})",
                self.max_step
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidConfig("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// A point (t, x, ẋ) on a trajectory of a second-order scalar equation.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhaseState {
    pub t: f64,
    pub x: f64,
    pub v: f64,
}

impl PhaseState {
    pub fn new(t: f64, x: f64, v: f64) -> Self {
        Self { t, x, v }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.v.is_finite()
    }
}

/// Which sign changes of the event function count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventDirection {
    /// negative -> positive
    Rising,
    /// positive -> negative
    Falling,
    Any,
}

/// Which matching crossing to return.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventCount {
    First,
    /// 1-based index among matching crossings.
    Nth(usize),
}

/// An event to locate along a trajectory: a scalar function of (t, state)
/// whose matching sign changes are bracketed and refined on dense output.
#[derive(Debug, Clone)]
pub struct EventSpec<G> {
    pub event_fn: G,
    pub direction: EventDirection,
    pub which: EventCount,
    /// Refinement target on |event_fn| at the returned point.
    pub value_tol: f64,
}

impl<G> EventSpec<G>
where
    G: Fn(f64, &[f64]) -> f64,
{
    pub fn new(event_fn: G, direction: EventDirection) -> Self {
        Self {
            event_fn,
            direction,
            which: EventCount::First,
            value_tol: 1e-12,
        }
    }

    pub fn nth(mut self, k: usize) -> Self {
        self.which = EventCount::Nth(k);
        self
    }
}

// Verner's "efficient" 6(5) pair. 9 stages, first-same-as-last; the
// continuous extension is order 6 and needs one extra stage at the
// midpoint of each interpolated step.
const STAGES: usize = 9;
const DENSE_STAGES: usize = 10;
const INTERP_COEFFS: usize = 6;

#[rustfmt::skip]
const A: [[f64; 8]; 9] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.6e-1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.923_996_296_296_296_2e-2, 7.669_337_037_037_037e-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.35975e-1, 0.0, 0.107925, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.318_683_415_233_148_4, 0.0, -5.042_058_063_628_562, 4.220_674_648_395_414, 0.0, 0.0, 0.0, 0.0],
    [-41.872_591_664_327_516, 0.0, 159.432_562_163_137_5, -122.119_213_565_010_03, 5.531_743_066_200_054, 0.0, 0.0, 0.0],
    [-54.430_156_935_316_504, 0.0, 207.067_251_365_018_48, -158.610_813_784_59, 6.991_816_585_950_242, -1.859_723_106_220_323_4e-2, 0.0, 0.0],
    [-54.663_741_787_281_98, 0.0, 207.952_806_255_389_36, -159.288_957_474_499_5, 7.018_743_740_796_944, -1.833_878_590_504_572_2e-2, -5.119_484_997_882_099e-4, 0.0],
    [3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7, 4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07],
];

#[rustfmt::skip]
const B_HIGH: [f64; 9] = [
    3.438_957_868_357_036e-2, 0.0, 0.0, 0.258_262_455_563_350_3, 0.420_937_118_967_353_7,
    4.405_396_469_669_31, -176.483_119_024_298_65, 172.364_133_401_415_07, 0.0,
];

#[rustfmt::skip]
const B_LOW: [f64; 9] = [
    4.909_967_648_382_49e-2, 0.0, 0.0, 0.225_111_222_951_652_42, 0.469_468_225_302_956_2,
    0.806_579_224_998_886_8, 0.0, -0.607_119_489_177_796, 5.686_113_944_047_569_6e-2,
];

#[rustfmt::skip]
const C: [f64; 9] = [
    0.0, 0.6e-1, 9.593_333_333_333_333e-2, 0.1439, 0.4973, 0.9725, 0.9995, 1.0, 1.0,
];

#[rustfmt::skip]
const A_DENSE: [f64; 10] = [
    1.652_415_901_357_280_6e-2, 0.0, 0.0, 0.305_312_818_751_417_9, 0.207_120_093_820_197_9,
    -1.293_879_140_655_123, 57.119_884_115_881_49, -55.879_792_075_109_32,
    2.483_002_829_776_601_4e-2, 0.0,
];

const C_DENSE: f64 = 0.5;

#[rustfmt::skip]
const B_DENSE: [[f64; 6]; 10] = [
    [1.0, -5.308_169_607_103_577, 10.181_680_448_958_68, -7.520_036_991_611_715, 0.934_048_536_863_116_1, 0.746_867_191_577_065],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 6.272_050_253_212_501, -16.026_181_474_677_46, 12.844_356_324_519_618, -1.148_794_504_476_759_1, -1.683_168_143_014_549_8],
    [0.0, 6.876_491_702_846_304, -24.635_767_260_846_333, 33.210_786_483_797_17, -17.494_615_282_636_44, 2.464_041_475_806_649_6],
    [0.0, -35.544_451_710_599_6, 165.701_617_019_024_2, -385.463_539_549_114_3, 442.432_413_701_570_17, -182.720_642_991_211_2],
    [0.0, 1_918.654_856_698_011_4, -9_268.121_508_966_042, 20_858.337_028_772_55, -22_645.827_671_584_81, 8_960.474_176_055_992],
    [0.0, -1_883.069_802_132_718_2, 9_101.025_187_200_634, -20_473.188_551_959_534, 22_209.765_551_256_532, -8_782.168_250_963_5],
    [0.0, 0.119_024_796_351_236_43, -0.125_026_967_050_393_76, 1.779_956_919_394_999_1, -4.660_932_123_043_763, 2.886_977_374_347_921],
    [0.0, -8.0, 32.0, -40.0, 16.0, 0.0],
];

// PI controller constants (error estimator is order 5).
const EXPO1: f64 = 1.0 / 6.0 - 0.75 * BETA;
const BETA: f64 = 0.04;
const SAFETY: f64 = 0.9;
const INV_FAC_MAX: f64 = 0.1; // at most 10x growth
const INV_FAC_MIN: f64 = 5.0; // at most 5x shrink

struct Stepper<'c, F> {
    rhs: F,
    cfg: &'c IntegratorConfig,
    dim: usize,
    dir: f64,
    t: f64,
    y: Vec<f64>,
    f_cur: Vec<f64>,
    h: f64,
    t_prev: f64,
    y_prev: Vec<f64>,
    h_prev: f64,
    k: Vec<Vec<f64>>,
    y_stage: Vec<f64>,
    y_next: Vec<f64>,
    fac_old: f64,
    steps: usize,
    dense_ready: bool,
}

impl<'c, F> Stepper<'c, F>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    fn new(mut rhs: F, y0: &[f64], t0: f64, dir: f64, cfg: &'c IntegratorConfig) -> Result<Self> {
        cfg.validate()?;
        if !y0.iter().all(|v| v.is_finite()) || !t0.is_finite() {
            return Err(Error::NonFiniteState { t: t0 });
        }
        let dim = y0.len();
        let mut f_cur = vec![0.0; dim];
        rhs(t0, y0, &mut f_cur);
        let h0 = dir * 1e-4_f64.min(cfg.max_step);
        Ok(Self {
            rhs,
            cfg,
            dim,
            dir,
            t: t0,
            y: y0.to_vec(),
            f_cur,
            h: h0,
            t_prev: t0,
            y_prev: y0.to_vec(),
            h_prev: h0,
            k: (0..DENSE_STAGES).map(|_| vec![0.0; dim]).collect(),
            y_stage: vec![0.0; dim],
            y_next: vec![0.0; dim],
            fac_old: 1e-4,
            steps: 0,
            dense_ready: false,
        })
    }

    /// One accepted step, never moving past `t_limit` (infinite for events).
    fn step(&mut self, t_limit: f64) -> Result<()> {
        let mut nonfinite_retries = 0usize;
        loop {
            if self.steps >= self.cfg.max_steps {
                return Err(Error::StepLimitExceeded {
                    t: self.t,
                    max_steps: self.cfg.max_steps,
                });
            }
            self.steps += 1;

            let mut h = self.h;
            if h.abs() > self.cfg.max_step {
                h = self.cfg.max_step * self.dir;
            }
            let mut hits_limit = false;
            if t_limit.is_finite() && self.dir * (self.t + h - t_limit) >= 0.0 {
                h = t_limit - self.t;
                hits_limit = true;
            }
            if h.abs() < f64::EPSILON * 16.0 * self.t.abs().max(1.0) {
                if hits_limit {
                    // Degenerate final sliver: snap to the endpoint.
                    self.t_prev = self.t;
                    self.y_prev.copy_from_slice(&self.y);
                    self.h_prev = h;
                    self.t = t_limit;
                    self.dense_ready = false;
                    return Ok(());
                }
                return Err(Error::StepSizeUnderflow { t: self.t });
            }

            self.k[0].copy_from_slice(&self.f_cur);
            for i in 1..STAGES {
                self.y_stage.copy_from_slice(&self.y);
                for (&a, kj) in A[i].iter().zip(self.k.iter().take(i)) {
                    if a != 0.0 {
                        for (ys, kv) in self.y_stage.iter_mut().zip(kj.iter()) {
                            *ys += h * a * kv;
                        }
                    }
                }
                let (head, tail) = self.k.split_at_mut(i);
                let _ = head;
                (self.rhs)(self.t + C[i] * h, &self.y_stage, &mut tail[0]);
            }

            let mut err: f64 = 0.0;
            for m in 0..self.dim {
                let mut hi = 0.0;
                let mut lo = 0.0;
                for j in 0..STAGES {
                    let kjm = self.k[j][m];
                    hi += B_HIGH[j] * kjm;
                    lo += B_LOW[j] * kjm;
                }
                let ynm = self.y[m] + h * hi;
                self.y_next[m] = ynm;
                let scale = self.cfg.abs_tol + self.cfg.rel_tol * self.y[m].abs().max(ynm.abs());
                err = err.max((h * (hi - lo) / scale).abs());
            }

            if !err.is_finite() {
                nonfinite_retries += 1;
                if nonfinite_retries > 32 {
                    return Err(Error::NonFiniteState { t: self.t });
                }
                self.h = h * 0.1;
                continue;
            }

            if err <= 1.0 {
                if !self.y_next.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFiniteState { t: self.t });
                }
                self.t_prev = self.t;
                std::mem::swap(&mut self.y_prev, &mut self.y);
                self.y.copy_from_slice(&self.y_next);
                self.h_prev = h;
                self.t = if hits_limit { t_limit } else { self.t + h };
                // FSAL: the last stage is the derivative at the new point.
                self.f_cur.copy_from_slice(&self.k[STAGES - 1]);
                self.dense_ready = false;

                let fac11 = err.max(1e-60).powf(EXPO1);
                let fac =
                    (fac11 / self.fac_old.powf(BETA) / SAFETY).clamp(INV_FAC_MAX, INV_FAC_MIN);
                self.h = h / fac;
                self.fac_old = err.max(1e-4);
                return Ok(());
            }

            let fac11 = err.powf(EXPO1);
            self.h = h / (fac11 / SAFETY).min(INV_FAC_MIN);
        }
    }

    fn prepare_dense(&mut self) {
        if self.dense_ready {
            return;
        }
        self.y_stage.copy_from_slice(&self.y_prev);
        for (&a, kj) in A_DENSE.iter().zip(self.k.iter()) {
            if a != 0.0 {
                for (ys, kv) in self.y_stage.iter_mut().zip(kj.iter()) {
                    *ys += self.h_prev * a * kv;
                }
            }
        }
        let (head, tail) = self.k.split_at_mut(STAGES);
        let _ = head;
        (self.rhs)(
            self.t_prev + C_DENSE * self.h_prev,
            &self.y_stage,
            &mut tail[0],
        );
        self.dense_ready = true;
    }

    /// Evaluate the order-6 interpolant of the last accepted step.
    fn dense_eval(&mut self, tq: f64, out: &mut [f64]) {
        if tq == self.t {
            out.copy_from_slice(&self.y);
            return;
        }
        self.prepare_dense();
        let s = (tq - self.t_prev) / self.h_prev;
        out.copy_from_slice(&self.y_prev);
        for (b, ki) in B_DENSE.iter().zip(self.k.iter()) {
            let mut poly = b[INTERP_COEFFS - 1];
            for &bj in b[..INTERP_COEFFS - 1].iter().rev() {
                poly = poly * s + bj;
            }
            let cont = s * poly;
            if cont != 0.0 {
                for (o, kv) in out.iter_mut().zip(ki.iter()) {
                    *o += self.h_prev * cont * kv;
                }
            }
        }
    }
}

fn direction_of(t0: f64, t_end: f64) -> f64 {
    if t_end >= t0 {
        1.0
    } else {
        -1.0
    }
}

/// Integrate `rhs` from `t0` to `t_end`, returning the terminal state.
pub fn integrate<F>(
    rhs: F,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec<f64>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if t0 == t_end {
        cfg.validate()?;
        return Ok(y0.to_vec());
    }
    let mut st = Stepper::new(rhs, y0, t0, direction_of(t0, t_end), cfg)?;
    while st.t != t_end {
        st.step(t_end)?;
    }
    Ok(st.y)
}

/// Integrate and evaluate the trajectory at `times` (sorted in integration
/// direction, within [t0, t_end]) via dense output in a single pass.
pub fn integrate_samples<F>(
    rhs: F,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Vec<f64>>>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dir = direction_of(t0, t_end);
    for w in times.windows(2) {
        if dir * (w[1] - w[0]) < 0.0 {
            return Err(Error::PreconditionViolated(
                "sample times must be sorted in integration direction".into(),
            ));
        }
    }
    if let (Some(first), Some(last)) = (times.first(), times.last()) {
        if dir * (first - t0) < 0.0 || dir * (last - t_end) > 0.0 {
            return Err(Error::PreconditionViolated(
                "sample times must lie within the integration span".into(),
            ));
        }
    }

    let mut out = Vec::with_capacity(times.len());
    let mut idx = 0;
    while idx < times.len() && times[idx] == t0 {
        out.push(y0.to_vec());
        idx += 1;
    }
    if t0 == t_end {
        cfg.validate()?;
        return Ok(out);
    }
    let mut st = Stepper::new(rhs, y0, t0, dir, cfg)?;
    let mut buf = vec![0.0; y0.len()];
    while st.t != t_end {
        st.step(t_end)?;
        while idx < times.len() && dir * (times[idx] - st.t) <= 0.0 {
            st.dense_eval(times[idx], &mut buf);
            out.push(buf.clone());
            idx += 1;
        }
    }
    Ok(out)
}

/// Integrate forward from `t0` until the requested event crossing, returning
/// the refined event time and the state there. The search is bounded only by
/// the step budget; a budget exhaustion reports [`Error::EventNotFound`].
pub fn integrate_to_event<F, G>(
    rhs: F,
    y0: &[f64],
    t0: f64,
    event: &EventSpec<G>,
    cfg: &IntegratorConfig,
) -> Result<(f64, Vec<f64>)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> f64,
{
    let target = match event.which {
        EventCount::First => 1,
        EventCount::Nth(k) => {
            if k == 0 {
                return Err(Error::PreconditionViolated(
                    "event index must be >= 1".into(),
                ));
            }
            k
        }
    };
    let mut st = Stepper::new(rhs, y0, t0, 1.0, cfg)?;
    let g0 = (event.event_fn)(t0, y0);
    let mut armed = g0 != 0.0;
    let mut g_prev = g0;
    let mut found = 0usize;
    let mut buf = vec![0.0; y0.len()];
    loop {
        match st.step(f64::INFINITY) {
            Ok(()) => {}
            Err(Error::StepLimitExceeded { t, .. }) => {
                return Err(Error::EventNotFound { t_last: t })
            }
            Err(e) => return Err(e),
        }
        let g_new = (event.event_fn)(st.t, &st.y);
        if !armed {
            armed = g_new != 0.0;
            g_prev = g_new;
            continue;
        }
        let crossed = match event.direction {
            EventDirection::Rising => g_prev < 0.0 && g_new >= 0.0,
            EventDirection::Falling => g_prev > 0.0 && g_new <= 0.0,
            EventDirection::Any => (g_prev < 0.0 && g_new >= 0.0) || (g_prev > 0.0 && g_new <= 0.0),
        };
        if crossed {
            found += 1;
            if found == target {
                if g_new == 0.0 {
                    return Ok((st.t, st.y.clone()));
                }
                let (bracket_lo, bracket_hi) = (st.t_prev, st.t);
                let (t_ev, _) = {
                    let ev_fn = &event.event_fn;
                    root::illinois(
                        |tq| {
                            st.dense_eval(tq, &mut buf);
                            ev_fn(tq, &buf)
                        },
                        bracket_lo,
                        bracket_hi,
                        g_prev,
                        g_new,
                        event.value_tol,
                        0.0,
                        200,
                    )
                };
                st.dense_eval(t_ev, &mut buf);
                return Ok((t_ev, buf));
            }
        }
        g_prev = g_new;
    }
}

/// Integrate with one scalar quadrature accumulator carried as an augmented
/// state component, sharing the integrator's error control. Returns the
/// terminal state and the accumulated integral of `integrand` over the span.
pub fn integrate_with_quadrature<F, G>(
    rhs: F,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    integrand: G,
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, f64)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    G: Fn(f64, &[f64]) -> f64,
{
    let (state, ints) = integrate_with_quadratures(rhs, y0, t0, t_end, &[&integrand], cfg)?;
    Ok((state, ints[0]))
}

/// Same as [`integrate_with_quadrature`] with several accumulators in one pass.
pub fn integrate_with_quadratures<F>(
    mut rhs: F,
    y0: &[f64],
    t0: f64,
    t_end: f64,
    integrands: &[Integrand<'_>],
    cfg: &IntegratorConfig,
) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let q = integrands.len();
    let mut z0 = vec![0.0; n + q];
    z0[..n].copy_from_slice(y0);
    let aug = |t: f64, z: &[f64], dz: &mut [f64]| {
        let (base, _) = z.split_at(n);
        let (dbase, dquad) = dz.split_at_mut(n);
        rhs(t, base, dbase);
        for (d, g) in dquad.iter_mut().zip(integrands.iter()) {
            *d = g(t, base);
        }
    };
    let z = integrate(aug, &z0, t0, t_end, cfg)?;
    let ints = z[n..].to_vec();
    let mut state = z;
    state.truncate(n);
    Ok((state, ints))
}
