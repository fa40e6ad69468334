//! Fixed-point angles modulo 1.
//!
//! A [`Phase`] stores `floor(y · 2^(64L)) mod 2^(64L)` in `L` little-endian
//! limbs. Addition is exact modular integer addition, so summing `n` copies
//! of a phase gives bit-for-bit the same result as multiplying it by `n`.

use std::f64::consts::PI;

use dashu_int::{IBig, UBig};

use crate::real::{self, Real};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Phase {
    limbs: Vec<u64>,
}

fn modulus(limbs: usize) -> UBig {
    UBig::ONE << (64 * limbs)
}

impl Phase {
    pub fn zero(limbs: usize) -> Self {
        assert!(limbs >= 2, "a phase needs at least two limbs");
        Self {
            limbs: vec![0; limbs],
        }
    }

    pub fn limb_count(&self) -> usize {
        self.limbs.len()
    }

    /// Phase whose scaled integer is `v mod 2^(64L)`.
    pub fn from_scaled(v: &UBig, limbs: usize) -> Self {
        let reduced = v % modulus(limbs);
        let mut out = vec![0u64; limbs];
        for (slot, w) in out.iter_mut().zip(reduced.as_words()) {
            *slot = *w;
        }
        Self { limbs: out }
    }

    fn from_scaled_signed(v: &IBig, limbs: usize) -> Self {
        let m = IBig::from(modulus(limbs));
        let r = ((v % &m) + &m) % &m;
        let r = UBig::try_from(r).expect("non-negative after reduction");
        Self::from_scaled(&r, limbs)
    }

    /// `floor(num · 2^(64L) / den)` reduced mod 1; exact rational input.
    pub fn from_ratio(num: &IBig, den: &UBig, limbs: usize) -> Self {
        assert!(*den != UBig::ZERO, "zero denominator");
        let scaled = num << (64 * limbs);
        let den = IBig::from(den.clone());
        // Floor division for either sign of the numerator.
        let q = {
            let q = &scaled / &den;
            if (&q * &den) > scaled {
                q - IBig::ONE
            } else {
                q
            }
        };
        Self::from_scaled_signed(&q, limbs)
    }

    /// `floor(x · 2^(64L))` reduced mod 1.
    pub fn from_real(x: &Real, limbs: usize) -> Self {
        let repr = x.repr();
        let shift = repr.exponent() + (64 * limbs) as isize;
        let sig = repr.significand();
        let scaled = if shift >= 0 {
            sig << (shift as usize)
        } else {
            sig >> ((-shift) as usize)
        };
        Self::from_scaled_signed(&scaled, limbs)
    }

    pub fn from_f64(x: f64, limbs: usize) -> Self {
        Self::from_real(&real::from_f64(x, 64), limbs)
    }

    pub fn to_scaled(&self) -> UBig {
        UBig::from_words(&self.limbs)
    }

    /// Exact value in `[0, 1)`.
    pub fn to_real(&self, bits: usize) -> Real {
        let scaled = IBig::from(self.to_scaled());
        real::with_bits(Real::from_parts(scaled, -((64 * self.limbs.len()) as isize)), bits)
    }

    pub fn add_assign(&mut self, other: &Phase) {
        debug_assert_eq!(self.limbs.len(), other.limbs.len());
        let mut carry = false;
        for (a, b) in self.limbs.iter_mut().zip(&other.limbs) {
            let (s1, c1) = a.overflowing_add(*b);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *a = s2;
            carry = c1 || c2;
        }
    }

    pub fn add(&self, other: &Phase) -> Phase {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn neg(&self) -> Phase {
        let mut out = Phase {
            limbs: self.limbs.iter().map(|w| !w).collect(),
        };
        let mut one = Phase::zero(self.limbs.len());
        one.limbs[0] = 1;
        out.add_assign(&one);
        out
    }

    /// `self · n mod 1`.
    pub fn mul_u64(&self, n: u64) -> Phase {
        let mut out = vec![0u64; self.limbs.len()];
        let mut carry: u128 = 0;
        for (slot, w) in out.iter_mut().zip(&self.limbs) {
            let t = (*w as u128) * (n as u128) + carry;
            *slot = t as u64;
            carry = t >> 64;
        }
        Phase { limbs: out }
    }

    pub fn mul_ubig(&self, n: &UBig) -> Phase {
        Self::from_scaled(&(self.to_scaled() * n), self.limbs.len())
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|w| *w == 0)
    }

    /// Value in `[0, 1)` rounded to `f64`.
    pub fn to_unit(&self) -> f64 {
        let d = self.signed_dist();
        if d < 0.0 {
            d + 1.0
        } else {
            d
        }
    }

    /// Representative in `[-1/2, 1/2)`, with full relative precision near 0.
    pub fn signed_dist(&self) -> f64 {
        let n = self.limbs.len();
        let negative = self.limbs[n - 1] >> 63 == 1;
        // Two's-complement negation on the fly; keeps the two leading words of |y|.
        let mut carry = true;
        let mut prev = 0u64;
        let mut lead = None;
        for (i, &w) in self.limbs.iter().enumerate() {
            let m = if negative {
                let (s, c) = (!w).overflowing_add(carry as u64);
                carry = c;
                s
            } else {
                w
            };
            if m != 0 {
                lead = Some((i, m, prev));
            }
            prev = m;
        }
        let Some((top, hi, lo)) = lead else {
            return 0.0;
        };
        let head = (((hi as u128) << 64) | lo as u128) as f64;
        let exp = 64 * (top as i32 - 1 - n as i32);
        let v = head * 2f64.powi(exp);
        if negative {
            -v
        } else {
            v
        }
    }

    /// `|2 sin(π y)|`, exactly `0.0` only when `y ≡ 0`.
    #[inline]
    pub fn two_sin(&self) -> f64 {
        2.0 * (PI * self.signed_dist()).sin().abs()
    }

    /// `log|2 sin(π y)|`, or `None` when `y ≡ 0` exactly.
    #[inline]
    pub fn log_two_sin(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let d = self.signed_dist();
        Some((2.0 * (PI * d).sin().abs()).ln())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repeated_addition_matches_multiplication() {
        let a = Phase::from_f64(0.618_033_988_749_894_8, 5);
        let mut acc = Phase::zero(5);
        for _ in 0..1000 {
            acc.add_assign(&a);
        }
        assert_eq!(acc, a.mul_u64(1000));
        assert_eq!(acc, a.mul_ubig(&UBig::from(1000u32)));
    }

    #[test]
    fn signed_distance_wraps() {
        let p = Phase::from_f64(0.75, 3);
        assert_eq!(p.signed_dist(), -0.25);
        assert_eq!(p.to_unit(), 0.75);
        let q = Phase::from_f64(-1e-30, 3);
        assert!((q.signed_dist() + 1e-30).abs() < 1e-45);
    }

    #[test]
    fn ratio_floor_handles_negative_numerators() {
        let third = Phase::from_ratio(&IBig::from(1), &UBig::from(3u8), 3);
        let minus = Phase::from_ratio(&IBig::from(-2), &UBig::from(3u8), 3);
        // floor rounding makes the two differ by at most one unit in the last limb.
        let diff = third.add(&minus.neg());
        assert!(diff.signed_dist().abs() < 1e-50);
    }

    #[test]
    fn zero_phase_has_no_log() {
        assert!(Phase::zero(2).log_two_sin().is_none());
        let half = Phase::from_f64(0.5, 2);
        assert!((half.log_two_sin().unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn real_round_trip() {
        let x = real::ratio(&IBig::from(5), &IBig::from(7), 256);
        let p = Phase::from_real(&x, 5);
        let back = p.to_real(256);
        assert!((real::to_f64(&back) - 5.0 / 7.0).abs() < 1e-16);
    }
}
