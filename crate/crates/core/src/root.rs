//! Bracketed scalar root finding: false position with the Illinois cut,
//! falling back to bisection whenever the secant point degenerates.

/// Refine a root of `f` inside the bracket [a, b] with f(a)·f(b) <= 0.
///
/// Stops when |f| <= `value_tol` or the bracket width drops to
/// max(`x_tol`, a few ulps). Returns the best (abscissa, residual) seen.
#[allow(clippy::too_many_arguments)]
pub(crate) fn illinois<F>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
    value_tol: f64,
    x_tol: f64,
    max_iter: usize,
) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    if fa == 0.0 {
        return (a, 0.0);
    }
    if fb == 0.0 {
        return (b, 0.0);
    }
    debug_assert!(fa.signum() != fb.signum(), "illinois requires a bracket");
    let (mut best, mut best_f) = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    for _ in 0..max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        let lo = a.min(b);
        let hi = a.max(b);
        if !x.is_finite() || x <= lo || x >= hi {
            x = 0.5 * (a + b);
        }
        let fx = f(x);
        if fx.abs() < best_f.abs() {
            best = x;
            best_f = fx;
        }
        if fx.abs() <= value_tol || fx == 0.0 {
            return (x, fx);
        }
        if fx.signum() == fb.signum() {
            // Same side as b: replace b, halve a's weight (Illinois cut).
            b = x;
            fb = fx;
            fa *= 0.5;
        } else {
            a = b;
            fa = fb;
            b = x;
            fb = fx;
        }
        let width = (b - a).abs();
        if width <= x_tol.max(4.0 * f64::EPSILON * (1.0 + b.abs())) {
            break;
        }
    }
    (best, best_f)
}
