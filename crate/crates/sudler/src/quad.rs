//! Quadrature and the integral of `log|2 sin πx|`.

use std::f64::consts::PI;

use quadrature::double_exponential;

/// `∫_a^b f` by double-exponential quadrature to absolute error `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    double_exponential::integrate(f, a, b, tol).integral
}

/// `log(2 sin(πx) / (x(1−x)))`, smooth on `[0, 1]`.
fn smooth_part(x: f64) -> f64 {
    let near = x.min(1.0 - x);
    let far = 1.0 - near;
    if near == 0.0 {
        return (2.0 * PI).ln();
    }
    let t = PI * near;
    (2.0 * t.sin() / t * PI / far).ln()
}

/// `∫_0^y log|2 sin πt| dt` for `y ∈ [0, 1]`.
fn primitive_unit(y: f64) -> f64 {
    // log|2 sin πt| = log t + log(1−t) + smooth_part(t)
    let log_t = if y == 0.0 { 0.0 } else { y * y.ln() - y };
    let log_1mt = if y == 1.0 {
        -1.0
    } else {
        -((1.0 - y) * (1.0 - y).ln() - (1.0 - y)) - 1.0
    };
    log_t + log_1mt + integrate(smooth_part, 0.0, y, 1e-15)
}

/// `∫_{y0}^{y1} log|2 sin πx| dx` for any reals; the integrand is 1-periodic with zero mean.
pub fn log_sin_integral(y0: f64, y1: f64) -> f64 {
    let primitive = |y: f64| primitive_unit(y - y.floor());
    primitive(y1) - primitive(y0)
}
