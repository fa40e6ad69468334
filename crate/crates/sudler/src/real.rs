//! High-precision real scalar and precision configuration.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::{IBig, UBig};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary floating point with a per-value significand length.
pub type Real = FBig<HalfEven, 2>;

/// Environment variable consulted by the CLI for the default `working_bits`.
pub const PRECISION_ENV: &str = "SUDLER_PRECISION_BITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Significant bits of every [`Real`] produced by the engine.
    pub working_bits: usize,
    /// Partial quotients looked ahead when truncating rule-generated tails.
    pub tail_depth: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self {
            working_bits: 256,
            tail_depth: 64,
        }
    }
}

impl PrecisionConfig {
    pub fn new(working_bits: usize, tail_depth: usize) -> Result<Self> {
        let cfg = Self {
            working_bits,
            tail_depth,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.working_bits < 64 {
            return Err(Error::Precision(self.working_bits));
        }
        if self.tail_depth == 0 {
            return Err(Error::PrecisionBudget("tail_depth must be positive".into()));
        }
        Ok(())
    }

    /// Phase limbs: 64 bits of headroom above the working precision.
    pub fn phase_limbs(&self) -> usize {
        (self.working_bits + 64).div_ceil(64)
    }
}

pub fn with_bits(x: Real, bits: usize) -> Real {
    x.with_precision(bits).value()
}

pub fn from_int(n: &IBig, bits: usize) -> Real {
    with_bits(Real::from(n.clone()), bits)
}

pub fn from_uint(n: &UBig, bits: usize) -> Real {
    with_bits(Real::from(n.clone()), bits)
}

pub fn from_u64(n: u64, bits: usize) -> Real {
    with_bits(Real::from(n), bits)
}

/// Exact for every finite `f64`.
pub fn from_f64(x: f64, bits: usize) -> Real {
    let exact = Real::try_from(x).expect("finite f64");
    with_bits(exact, bits.max(64))
}

pub fn ratio(num: &IBig, den: &IBig, bits: usize) -> Real {
    from_int(num, bits) / from_int(den, bits)
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn is_negative(x: &Real) -> bool {
    x.repr().significand() < &IBig::ZERO
}

pub fn is_zero(x: &Real) -> bool {
    x.repr().significand() == &IBig::ZERO
}
