//! Error-free transforms and argument reduction for `sin(π t / q)`.

use std::f64::consts::PI;

/// `a·b = hi + lo` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    (hi, a.mul_add(b, -hi))
}

/// `a + b = hi + lo` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Representative of `hi + lo` modulo `q` in `[-q/2, q/2]`, or `None` when it
/// is exactly `0 mod q`. Requires `|hi| < 2^52` and integer `q`.
#[inline]
pub fn reduce_symmetric(hi: f64, lo: f64, q: f64) -> Option<f64> {
    let wraps = (hi / q).round();
    // `hi − wraps·q` is exact: both are multiples of ulp(hi) and the result is smaller.
    let head = hi - wraps * q;
    if head == 0.0 && lo == 0.0 {
        return None;
    }
    Some(head + lo)
}

/// `(r + y) mod q` for integer `r ∈ [0, q)` and a shift `y = y_hi + y_lo`.
#[inline]
pub fn shifted_residue(r: u64, y_hi: f64, y_lo: f64, q: f64) -> Option<f64> {
    let (s, e) = two_sum(r as f64, y_hi);
    reduce_symmetric(s, e + y_lo, q)
}

/// `log|sin(π t)|` for `t = hi + lo`, `None` at integers.
pub fn log_abs_sin_pi(hi: f64, lo: f64) -> Option<f64> {
    reduce_symmetric(hi, lo, 1.0).map(|t| (PI * t).sin().abs().ln())
}

/// Symmetric residue of `n` modulo `q` as a signed integer.
#[inline]
pub fn symmetric(n: u64, q: u64) -> i64 {
    if 2 * n > q {
        n as i64 - q as i64
    } else {
        n as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transforms_are_exact() {
        let (h, l) = two_prod(0.1, 3.0);
        assert_eq!(h, 0.30000000000000004);
        assert!(l != 0.0);
        let (s, e) = two_sum(1e16, 1.5);
        assert_eq!(s + e, 1e16 + 1.5);
        assert_eq!(e, 1.5 - (s - 1e16));
    }

    #[test]
    fn reduction_detects_exact_zero() {
        assert_eq!(reduce_symmetric(14.0, 0.0, 7.0), None);
        assert_eq!(reduce_symmetric(15.0, 0.0, 7.0), Some(1.0));
        assert_eq!(reduce_symmetric(13.0, 1e-20, 7.0), Some(-1.0 + 1e-20));
        assert_eq!(shifted_residue(3, -3.0, 0.0, 11.0), None);
        assert!(log_abs_sin_pi(2.0, 0.0).is_none());
        assert!((log_abs_sin_pi(0.5, 0.0).unwrap()).abs() < 1e-16);
    }

    #[test]
    fn symmetric_residues() {
        assert_eq!(symmetric(3, 7), 3);
        assert_eq!(symmetric(4, 7), -3);
        assert_eq!(symmetric(2, 4), 2);
    }
}
