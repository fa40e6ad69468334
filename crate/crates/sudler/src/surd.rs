//! Exact quadratic surds `(u + w·√d) / v`.

use dashu_int::ops::{BitTest, Gcd, SquareRoot};
use dashu_int::{IBig, UBig};

use crate::real::{self, Real};

/// `(u + w√d) / v` with `d > 0` not a perfect square and `v > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadSurd {
    pub u: IBig,
    pub w: IBig,
    pub d: UBig,
    pub v: IBig,
}

/// Integer 2×2 matrix acting as `x ↦ (m00·x + m01)/(m10·x + m11)`.
pub type Mobius = [[IBig; 2]; 2];

/// Matrix of the finite segment `[c_1; c_2, …, c_m, x]`.
pub fn segment_matrix(quotients: &[u64]) -> Mobius {
    let mut m: Mobius = [[IBig::ONE, IBig::ZERO], [IBig::ZERO, IBig::ONE]];
    for &c in quotients {
        let c = IBig::from(c);
        let n00 = &m[0][0] * &c + &m[0][1];
        let n10 = &m[1][0] * &c + &m[1][1];
        m = [[n00, m[0][0].clone()], [n10, m[1][0].clone()]];
    }
    m
}

impl QuadSurd {
    /// The fixed point `ρ > 1` of the purely periodic expansion `[c_1; c_2, …, c_m, ρ]`.
    pub fn purely_periodic(period: &[u64]) -> Self {
        assert!(!period.is_empty());
        let [[m00, m01], [m10, m11]] = segment_matrix(period);
        // m10·ρ² + (m11 − m00)·ρ − m01 = 0.
        let b = &m00 - &m11;
        let disc = &b * &b + IBig::from(4) * &m10 * &m01;
        let d = UBig::try_from(disc).expect("positive discriminant");
        let s = QuadSurd {
            u: b,
            w: IBig::ONE,
            d,
            v: IBig::from(2) * m10,
        };
        s.normalized()
    }

    fn normalized(mut self) -> Self {
        let root = self.d.sqrt();
        assert!(&root * &root != self.d, "discriminant must not be a square");
        if self.v < IBig::ZERO {
            self.u = -self.u;
            self.w = -self.w;
            self.v = -self.v;
        }
        let g = self.u.clone().gcd(&self.w);
        let g = IBig::from(g).gcd(&self.v);
        if g > UBig::ONE {
            let g = IBig::from(g);
            self.u /= &g;
            self.w /= &g;
            self.v /= &g;
        }
        self
    }

    /// `(m00·x + m01)/(m10·x + m11)` in exact arithmetic.
    pub fn mobius(&self, m: &Mobius) -> Self {
        let d = IBig::from(self.d.clone());
        // Numerator A + B√d, denominator C + D√d (common factor 1/v cancels).
        let a = &m[0][0] * &self.u + &m[0][1] * &self.v;
        let b = &m[0][0] * &self.w;
        let c = &m[1][0] * &self.u + &m[1][1] * &self.v;
        let e = &m[1][0] * &self.w;
        // Multiply through by the conjugate C − D√d.
        let u = &a * &c - &b * &e * &d;
        let w = &b * &c - &a * &e;
        let v = &c * &c - &e * &e * &d;
        assert!(v != IBig::ZERO, "degenerate Möbius image");
        QuadSurd {
            u,
            w,
            d: self.d.clone(),
            v,
        }
        .normalized()
    }

    pub fn recip(&self) -> Self {
        self.mobius(&[[IBig::ZERO, IBig::ONE], [IBig::ONE, IBig::ZERO]])
    }

    /// `self + num/den`.
    pub fn add_ratio(&self, num: &IBig, den: &IBig) -> Self {
        self.mobius(&[[den.clone(), num.clone()], [IBig::ZERO, den.clone()]])
    }

    fn coefficient_bits(&self) -> usize {
        [&self.u, &self.w, &self.v]
            .iter()
            .map(|x| x.bit_len())
            .max()
            .unwrap_or(0)
            + self.d.bit_len()
    }

    /// Rounds once to `bits`; intermediate guard bits absorb cancellation.
    pub fn to_real(&self, bits: usize) -> Real {
        let guard = bits + 2 * self.coefficient_bits() + 64;
        let root = real::from_uint(&self.d, guard).sqrt();
        let num = real::from_int(&self.u, guard) + real::from_int(&self.w, guard) * root;
        let val = num / real::from_int(&self.v, guard);
        real::with_bits(val, bits)
    }

    pub fn to_f64(&self) -> f64 {
        real::to_f64(&self.to_real(64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_fixed_point() {
        let rho = QuadSurd::purely_periodic(&[1]);
        assert!((rho.to_f64() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn constant_period_root() {
        for a in [1u64, 2, 5, 15, 50] {
            let rho = QuadSurd::purely_periodic(&[a]);
            let af = a as f64;
            let expect = (af + (af * af + 4.0).sqrt()) / 2.0;
            assert!((rho.to_f64() - expect).abs() < 1e-13 * expect);
        }
    }

    #[test]
    fn two_periodic_fixed_point_satisfies_recursion() {
        let rho = QuadSurd::purely_periodic(&[1, 4]);
        let back = rho.mobius(&segment_matrix(&[1, 4]));
        assert_eq!(back, rho);
    }

    #[test]
    fn reciprocal_and_shift() {
        let rho = QuadSurd::purely_periodic(&[3]);
        let r = rho.to_f64();
        assert!((rho.recip().to_f64() - 1.0 / r).abs() < 1e-15);
        let s = rho.add_ratio(&IBig::from(2), &IBig::from(7));
        assert!((s.to_f64() - (r + 2.0 / 7.0)).abs() < 1e-14);
    }

    #[test]
    fn high_precision_value() {
        // √2 − 1 = 1/(2 + (√2 − 1)).
        let rho = QuadSurd::purely_periodic(&[2]);
        let x = rho.recip().to_real(256);
        let two = real::from_u64(2, 256);
        let err = (x.clone() + real::from_u64(1, 256)) * (x + real::from_u64(1, 256)) - two;
        assert!(real::to_f64(&err).abs() < 1e-70);
    }
}
