//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Criterion 1 compares against the reference table shipped in
//! `data/table1_reference.csv`. Its A_n column (and the eta/h columns for
//! n >= 3) disagrees with converged high-precision recomputation by far more
//! than the +-5e-4 gate, so that criterion reports FAIL by design; the
//! deviations are printed in full. See `tests/convergence.rs` for the
//! converged-value regression this crate is held to.

use std::f64::consts::PI;
use std::time::Instant;

use sitnikov_core::circular::{self, CircularOrbit, FrequencyPair, MIN_PERIOD};
use sitnikov_core::continuation::{self, trace_along_family};
use sitnikov_core::hill::{self, FrechetTrace, PotentialFn, StabilityClass};
use sitnikov_core::ode::IntegratorConfig;
use sitnikov_core::slope::{self, reference, Parity, SlopeVerdict};

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

fn mp(m: u32, p: u32) -> FrequencyPair {
    FrequencyPair::new(m, p).unwrap()
}

fn criterion(name: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] {name}: {detail}");
    assert!(ok, "[{tag}] {name}: {detail}");
}

/// Admissible (m, p) with m <= 4.
fn admissible_m_le_4() -> Vec<FrequencyPair> {
    let mut out = Vec::new();
    for m in 1..=4u32 {
        let cap = (8.0 * (m as f64) * (m as f64)).sqrt().floor() as u32;
        for p in 1..=cap {
            out.push(mp(m, p));
        }
    }
    out
}

#[test]
fn criterion_01_table1_reproduction() {
    let name = "criterion 1 (table-1 reproduction, +-5e-4, < 60 s)";
    let start = Instant::now();
    let rows = slope::conjecture_scan(10, &cfg()).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let mut lines = vec![format!("runtime {elapsed:.1} s")];
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    for (row, re) in rows.iter().zip(reference::table1()) {
        assert_eq!(row.n, re.n);
        let d_eta = (row.eta - re.eta).abs();
        let d_h = (row.h - re.h).abs();
        let d_a = (row.a_n - re.a_n).abs();
        for d in [d_eta, d_h, d_a] {
            worst = worst.max(d);
            if d > 5e-4 {
                failures += 1;
            }
        }
        lines.push(format!(
            "n={:2}  eta {:.6} (ref {:.4}, dev {:.1e})  h {:.6} (ref {:.4}, dev {:.1e})  \
             A {:.6} (ref {:.4}, dev {:.1e})",
            row.n, row.eta, re.eta, d_eta, row.h, re.h, d_h, row.a_n, re.a_n, d_a
        ));
    }
    let ok = failures == 0 && elapsed < 60.0;
    lines.push(format!(
        "{failures}/30 cells exceed 5e-4 (worst {worst:.2e}); computed values carry \
         tolerance-halving certificates (all deltas <= {:.1e})",
        rows.iter()
            .map(|r| r.convergence_delta)
            .fold(0.0f64, f64::max)
    ));
    criterion(name, ok, lines.join("\n  "));
}

#[test]
fn criterion_02_period_function() {
    let name = "criterion 2 (period limits and monotonicity)";
    let c = cfg();
    let t_small = circular::period(-1.999, &c).unwrap();
    let limit_dev = (t_small - MIN_PERIOD).abs();
    let mut ok = limit_dev <= 1e-2;
    let mut detail = format!("T(-1.999) = {t_small:.6} vs 2*pi/sqrt(8) (dev {limit_dev:.2e})");

    let mut last = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut tprime_positive = true;
    for i in 0..20 {
        let h = -1.9 + 1.85 * i as f64 / 19.0; // grid in (-1.9, -0.05)
        let t = circular::period(h, &c).unwrap();
        monotone &= t > last;
        last = t;
        tprime_positive &= circular::period_derivative(h, &c).unwrap() > 0.0;
    }
    ok &= monotone && tprime_positive;
    detail.push_str(&format!(
        "; 20-point grid strictly increasing: {monotone}; T' > 0 everywhere: {tprime_positive}"
    ));
    criterion(name, ok, detail);
}

#[test]
fn criterion_03_structural_identities() {
    let name = "criterion 3 (half-period Poincare structure)";
    let c = cfg();
    let eta1 = circular::eta_from_energy(circular::solve_energy_for_period(4.0 * PI, &c).unwrap());
    let mut worst_det: f64 = 0.0;
    let mut worst_diag: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    let mut worst_scaling: f64 = 0.0;
    let mut worst_route: f64 = 0.0;
    for eta in [eta1, 1.2] {
        for n in 1..=4 {
            // half_period_structure errors out if any residual exceeds its
            // stated tolerance; reaching this point is already a pass.
            let s = hill::half_period_structure(eta, n, &c).unwrap();
            worst_det = worst_det.max((s.monodromy.det() - 1.0).abs());
            worst_diag = worst_diag.max(s.diag_residual);
            worst_c = worst_c.max(s.c_residual);
            worst_scaling = worst_scaling.max(s.scaling_residual);
            worst_route = worst_route.max(s.period_route_residual);
        }
    }
    let ok = worst_det <= 1e-8
        && worst_diag <= 1e-6
        && worst_c <= 1e-6
        && worst_scaling <= 1e-5
        && worst_route <= 1e-4;
    criterion(
        name,
        ok,
        format!(
            "worst |det-1| {worst_det:.1e} (<=1e-8), |a,d -(-1)^n| {worst_diag:.1e} (<=1e-6), \
             |c| {worst_c:.1e} (<=1e-6), b_n scaling rel {worst_scaling:.1e} (<=1e-5), \
             (eta^2/2)T' route rel {worst_route:.1e} (<=1e-4)"
        ),
    );
}

#[test]
fn criterion_04_fundamental_solution_identities() {
    let name = "criterion 4 (psi identities along the orbit)";
    let c = cfg();
    let eta1 = circular::eta_from_energy(circular::solve_energy_for_period(4.0 * PI, &c).unwrap());
    let t_period = 4.0 * PI;
    let times: Vec<f64> = (0..=64).map(|i| t_period * i as f64 / 64.0).collect();
    let rep = hill::verify_psi_identities(eta1, &times, &c).unwrap();
    let ok = rep.max_psi1_residual <= 1e-8
        && rep.max_dpsi1_residual <= 1e-8
        && rep.max_psi2_fd_residual <= 1e-5;
    criterion(
        name,
        ok,
        format!(
            "max |psi1 - S_t/eta| {:.1e} (<=1e-8), max |dpsi1 + f(S)/eta| {:.1e} (<=1e-8), \
             max |psi2 - dS/deta(FD)| {:.1e} (<=1e-5), 65-point grid over one period",
            rep.max_psi1_residual, rep.max_dpsi1_residual, rep.max_psi2_fd_residual
        ),
    );
}

#[test]
fn criterion_05_frechet_kernel() {
    let name = "criterion 5 (trace Frechet kernel, three shapes)";
    let c = cfg();
    let period = 2.0 * PI;
    let base = |t: f64| 1.0 + 0.3 * t.cos();
    let sys = PotentialFn { q: base, period };
    let ft = FrechetTrace::new(&sys, period, &c).unwrap();
    let tau0 = ft.boundary.trace();
    type Shape = fn(f64) -> f64;
    let shapes: [(&str, Shape); 3] = [
        ("constant", |_t| 1.0),
        ("cos t", |t| t.cos()),
        ("sin 2t", |t| (2.0 * t).sin()),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (label, shape) in shapes {
        let predicted = ft.directional_derivative(&shape).unwrap();
        let fd_err = |eps: f64| {
            let bumped = PotentialFn {
                q: |t: f64| base(t) + eps * shape(t),
                period,
            };
            let tau = hill::fundamental_solutions(&bumped, period, &c)
                .unwrap()
                .trace();
            ((tau - tau0) / eps - predicted).abs()
        };
        let e1 = fd_err(1e-5);
        let e2 = fd_err(5e-6);
        // O(eps) agreement plus first-order decay when eps halves.
        let shape_ok = e1 <= 1e-3 && e2 <= 0.75 * e1 + 1e-10;
        ok &= shape_ok;
        details.push(format!(
            "{label}: dtau = {predicted:.6}, fd err {e1:.2e} -> {e2:.2e} ({})",
            if shape_ok {
                "first order"
            } else {
                "NOT first order"
            }
        ));
    }
    criterion(name, ok, details.join("; "));
}

#[test]
fn criterion_06_vanishing_theorems() {
    let name = "criterion 6 (zero slope off resonance, m <= 4)";
    let c = cfg();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for pair in admissible_m_le_4() {
        if pair.resonance_index().is_some() {
            continue;
        }
        for parity in [Parity::Odd, Parity::Even] {
            let rep = slope::vanishing_check(pair, parity, &c).unwrap();
            worst = worst.max(rep.residual);
            count += 1;
        }
    }
    criterion(
        name,
        worst <= 1e-7,
        format!("{count} (m, p, parity) cases, worst |tau'(0)| = {worst:.2e} (<= 1e-7)"),
    );
}

#[test]
fn criterion_07_sign_results() {
    let name = "criterion 7 (odd hyperbolic, even elliptic at rho = 1/2)";
    let c = cfg();
    let mut ok = true;
    let mut details = Vec::new();
    for p in 1..=3u32 {
        let odd = slope::slope_odd(mp(2 * p, p), &c).unwrap();
        let even = slope::slope_even(mp(2 * p, p), &c).unwrap();
        ok &= odd.tau_prime > 0.0 && even.tau_prime < 0.0;
        ok &= odd.verdict == SlopeVerdict::Hyperbolic && even.verdict == SlopeVerdict::Elliptic;
        details.push(format!(
            "(2p,p) p={p}: odd {:+.3}, even {:+.3}",
            odd.tau_prime, even.tau_prime
        ));
    }
    let orbit = CircularOrbit::for_frequency(mp(2, 1), &c).unwrap();
    let odd_pt = continuation::shoot_odd(mp(2, 1), 0.01, orbit.eta, &c).unwrap();
    let even_pt = continuation::shoot_even(mp(2, 1), 0.01, orbit.xi, &c).unwrap();
    ok &= odd_pt.tau > 2.0 && odd_pt.cls == StabilityClass::Hyperbolic;
    ok &= even_pt.tau.abs() < 2.0 && even_pt.cls == StabilityClass::Elliptic;
    details.push(format!(
        "e=0.01: odd tau {:.4} ({:?}), even tau {:.4} ({:?})",
        odd_pt.tau, odd_pt.cls, even_pt.tau, even_pt.cls
    ));
    criterion(name, ok, details.join("; "));
}

#[test]
fn criterion_08_parity_relation() {
    let name = "criterion 8 (even slope = (-1)^n odd slope)";
    let c = cfg();
    let mut worst: f64 = 0.0;
    let mut details = Vec::new();
    for n in 1..=2u32 {
        for p in 1..=2u32 {
            let rel = slope::parity_relation_check(n, p, &c).unwrap();
            worst = worst.max(rel.rel_residual);
            details.push(format!(
                "n={n},p={p}: even {:+.3} vs (-1)^n odd {:+.3} (rel {:.1e})",
                rel.even_slope, rel.odd_slope, rel.rel_residual
            ));
        }
    }
    criterion(name, worst <= 1e-4, details.join("; "));
}

#[test]
fn criterion_09_formula_vs_finite_difference() {
    let name = "criterion 9 (Richardson FD slope vs closed form, rel 1e-2)";
    let c = cfg();
    let e_list = [0.0, 2.5e-3, 5e-3, 1e-2];
    let mut ok = true;
    let mut details = Vec::new();
    for pair in [mp(2, 1), mp(4, 1)] {
        for parity in [Parity::Odd, Parity::Even] {
            let formula = match parity {
                Parity::Odd => slope::slope_odd(pair, &c).unwrap().tau_prime,
                Parity::Even => slope::slope_even(pair, &c).unwrap().tau_prime,
            };
            let tr = trace_along_family(pair, parity, &e_list, &c).unwrap();
            assert!(tr.failure.is_none(), "continuation failed for {pair}");
            let s = |i: usize| (tr.points[i].tau - 2.0) / e_list[i];
            let (s3, s2, s1) = (s(1), s(2), s(3)); // e = 2.5e-3, 5e-3, 1e-2
            let r12 = 2.0 * s2 - s1;
            let r23 = 2.0 * s3 - s2;
            let richardson = (4.0 * r23 - r12) / 3.0;
            let rel = ((richardson - formula) / formula).abs();
            ok &= rel <= 1e-2;
            details.push(format!(
                "{pair} {parity}: formula {formula:+.4}, Richardson {richardson:+.4} (rel {rel:.1e})"
            ));
        }
    }
    criterion(name, ok, details.join("; "));
}

#[test]
fn criterion_10_integration_by_parts() {
    let name = "criterion 10 (raw vs cosine slope form, rel 1e-6, m <= 4)";
    let c = cfg();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for pair in admissible_m_le_4() {
        for parity in [Parity::Odd, Parity::Even] {
            // slope_impl re-derives both forms and already rejects any
            // mismatch beyond 1e-6; record the worst residual seen.
            let rep = match parity {
                Parity::Odd => slope::slope_odd(pair, &c).unwrap(),
                Parity::Even => slope::slope_even(pair, &c).unwrap(),
            };
            worst = worst.max(rep.ibp_residual);
            count += 1;
        }
    }
    criterion(
        name,
        worst <= 1e-6,
        format!("{count} slope reports, worst scaled residual {worst:.2e} (<= 1e-6)"),
    );
}
