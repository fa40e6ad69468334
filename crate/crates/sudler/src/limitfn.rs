//! Limit functions of normalized shifted products near convergents.
//!
//! For a quadratic irrational the curves `x ↦ P_{q_k}(α, (−1)^k x/q_k)`
//! converge along each residue class of `k` modulo the period. The closed
//! form keeps the zeros of `|2 sin πx|` at `0, ±1` shifted left by the
//! constants `C`, `C − D` and `D`.

use std::f64::consts::PI;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alpha::AlphaSpec;
use crate::cf::ConvergentTable;
use crate::error::{Error, ParseError, Result};
use crate::hexfloat;
use crate::real::{self, Real};
use crate::special::digamma;
use crate::sudler::log_sudler_convergent;
use crate::surd::QuadSurd;

/// Limits of `q_k‖q_kα‖` and `q_{k−1}‖q_kα‖` along one residue class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LimitConstants {
    #[serde(with = "hexfloat::serde_f64")]
    pub c: f64,
    #[serde(with = "hexfloat::serde_f64")]
    pub d: f64,
    /// Residue index, `1 ≤ r ≤ period`.
    pub r: usize,
    pub period: usize,
    /// The partial quotient `a_{k}` of the residue class; it sets the exponent.
    pub a_current: u64,
    /// `a_{k+1}`; it bounds the admissible range of `x`.
    pub a_next: u64,
    #[serde(skip)]
    pub c_real: Option<Real>,
}

impl LimitConstants {
    /// Constants of `[0; (a)]`, where every residue class coincides.
    pub fn constant_period(a: u64) -> Self {
        let af = a as f64;
        let root = (af * af + 4.0).sqrt();
        LimitConstants {
            c: 1.0 / root,
            d: (root - af) / (2.0 * root),
            r: 1,
            period: 1,
            a_current: a,
            a_next: a,
            c_real: None,
        }
    }

    /// Largest `|x|` the closed form is meant for.
    pub fn x_range(&self) -> f64 {
        (2.0 - 2.0 / self.a_next as f64).max(1.0)
    }
}

/// `C_r = 1/(β + γ)` and `D_r = γ·C_r`, where `β = [a_{k+1}; a_{k+2}, …]`
/// and `γ = [0; a_k, a_{k−1}, …]` are continued along the period.
pub fn limit_constants(alpha: &AlphaSpec, r: usize, bits: usize) -> Result<LimitConstants> {
    let period = alpha.period.as_ref().ok_or(Error::NotPeriodic)?;
    let p = period.len();
    if r == 0 || r > p {
        return Err(Error::Domain(format!("residue index r = {r} must lie in 1..={p}")));
    }
    // Index k = k_0 + r + m·p: a_{k+1} = period[r mod p], a_k = period[r − 1].
    let forward: Vec<u64> = (0..p).map(|j| period[(r + j) % p]).collect();
    let backward: Vec<u64> = (0..p).map(|j| period[(r + p - 1 - j) % p]).collect();
    let beta = QuadSurd::purely_periodic(&forward);
    let gamma = QuadSurd::purely_periodic(&backward).recip();
    let guard = bits + 64;
    let beta_r = beta.to_real(guard);
    let gamma_r = gamma.to_real(guard);
    let one = real::from_u64(1, guard);
    let c_real = one / (beta_r + gamma_r.clone());
    let d_real = gamma_r * c_real.clone();
    Ok(LimitConstants {
        c: real::to_f64(&c_real),
        d: real::to_f64(&d_real),
        r,
        period: p,
        a_current: backward[0],
        a_next: forward[0],
        c_real: Some(real::with_bits(c_real, bits)),
    })
}

/// Smallest `k ≥ k_min` in the residue class `r`.
pub fn class_index(alpha: &AlphaSpec, r: usize, k_min: usize) -> Result<usize> {
    let p = alpha.period.as_ref().ok_or(Error::NotPeriodic)?.len();
    let base = alpha.preperiod.len() + r;
    let mut k = base;
    while k < k_min {
        k += p;
    }
    Ok(k)
}

/// `|2 sin πx| / |(x+1) x (x−1)|`, finite at the three integer zeros.
fn sine_over_cubic(x: f64) -> f64 {
    let j = x.round();
    if j.abs() <= 1.0 {
        let t = x - j;
        let sinc = if t == 0.0 { PI } else { (PI * t).sin().abs() / t.abs() };
        let others: f64 = [-1.0, 0.0, 1.0]
            .iter()
            .filter(|&&i| i != j)
            .map(|&i| (x - i).abs())
            .product();
        2.0 * sinc / others
    } else {
        2.0 * (PI * x).sin().abs() / (x * (x + 1.0) * (x - 1.0)).abs()
    }
}

/// Main term of the limit function for the given constants.
pub fn g_closed(lc: &LimitConstants, x: f64) -> Result<f64> {
    if !(x > -2.0 && x < 2.0) {
        return Err(Error::Domain(format!("x = {x} must lie in (−2, 2)")));
    }
    let (c, d) = (lc.c, lc.d);
    let shifted = (x + 1.0 + c - d).abs() * (x + c).abs() * (x - 1.0 + d).abs();
    let exponent = c * ((lc.a_current as f64 / (2.0 * PI)).ln() - digamma(2.0 + x)?);
    Ok(sine_over_cubic(x) * shifted * exponent.exp())
}

/// Main term of `G_α(x)` for `α = [0; (a)]`.
pub fn g_alpha(a: u64, x: f64) -> Result<f64> {
    if a == 0 {
        return Err(Error::Domain("a must be positive".into()));
    }
    g_closed(&LimitConstants::constant_period(a), x)
}

/// Main term of `G_{α,r}(x)` for a periodic `α`.
pub fn g_alpha_r(alpha: &AlphaSpec, r: usize, x: f64) -> Result<f64> {
    g_closed(&limit_constants(alpha, r, 128)?, x)
}

/// `P_{q_k}(α, (−1)^k x/q_k)` on every grid point.
pub fn empirical_limit(table: &ConvergentTable, k: usize, grid: &[f64], budget: u64) -> Result<Vec<f64>> {
    let q = table.q_u64(k).filter(|&q| q <= budget).ok_or_else(|| Error::Budget {
        what: format!("q_{k}"),
        value: table.q(k).to_string(),
        limit: budget.to_string(),
    })?;
    let bits = table.bits();
    grid.par_iter()
        .map(|&x| Ok(log_sudler_convergent(table, k, q, &real::from_f64(x, bits))?.value()))
        .collect()
}

/// Largest `x` in `[lo, hi]` where `f` falls through `level`, refined by bisection.
pub fn find_crossing<F>(f: F, lo: f64, hi: f64, level: f64, samples: usize) -> Result<Option<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    let step = (hi - lo) / samples as f64;
    let mut bracket = None;
    let mut prev = f(lo)? - level;
    for i in 1..=samples {
        let x = lo + i as f64 * step;
        let cur = f(x)? - level;
        if (prev >= 0.0) != (cur >= 0.0) {
            bracket = Some((x - step, x, prev >= 0.0));
        }
        prev = cur;
    }
    let Some((mut a, mut b, above_left)) = bracket else {
        return Ok(None);
    };
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if ((f(m)? - level) >= 0.0) == above_left {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// Minimizer of `log f` on `[lo, hi]` by golden-section search; locates a zero
/// of `f` when `f` vanishes once inside the bracket.
pub fn locate_zero<F>(log_f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = log_f(x1)?;
    let mut f2 = log_f(x2)?;
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = log_f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = log_f(x2)?;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Points `lo, lo + step, …` strictly below `hi + step/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self, String> {
        if !(lo.is_finite() && hi.is_finite() && step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if step <= 0.0 {
            return Err("grid step must be positive".into());
        }
        if hi < lo {
            return Err("grid upper bound lies below the lower bound".into());
        }
        if (hi - lo) / step > 1e8 {
            return Err("grid has more than 10^8 points".into());
        }
        Ok(Grid { lo, hi, step })
    }

    pub fn points(&self) -> Vec<f64> {
        let end = self.hi + self.step / 2.0;
        (0..)
            .map(|i| self.lo + i as f64 * self.step)
            .take_while(|&x| x < end)
            .collect()
    }
}

impl FromStr for Grid {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(ParseError::new(s, 0, "expected lo:hi:step"));
        }
        let mut vals = [0.0; 3];
        let mut pos = 0;
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| ParseError::new(s, pos, format!("not a number: {part:?}")))?;
            pos += part.len() + 1;
        }
        Grid::new(vals[0], vals[1], vals[2]).map_err(|m| ParseError::new(s, 0, m))
    }
}

/// Sup-norm distance between two sampled curves.
pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
