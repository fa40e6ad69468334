//! Cotangent sums attached to a convergent `p_k/q_k`.
//!
//! * `C(p, q; x) = Σ_{n=1}^{q-1} (n/q) cot(π(np + σx)/q)` (Vasyunin-type);
//! * `V_k(x) = Σ_{n=1}^{q_k-1} sin(π n θ_k / q_k) cot(π(n(−1)^k p_k + x)/q_k)`;
//! * `V_k*(x)`, the same sum without `n = q_{k-1}` and `n = q_k − q_{k-1}`,
//!   which removes the poles at `x = ±1`.
//!
//! All sums are evaluated directly in `O(q_k)` with exact integer residues.

use std::f64::consts::PI;

use dashu_int::{IBig, UBig};
use rayon::prelude::*;
use serde::Serialize;

use crate::cf::ConvergentTable;
use crate::error::{Error, Result};
use crate::special::digamma;
use crate::sum::Neumaier;
use crate::trig;

/// Largest `q_k` for which direct summation is attempted.
pub const DEFAULT_Q_BUDGET: u64 = 10_000_000;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SumKind {
    CK,
    VK,
    VKStar,
}

#[derive(Debug, Clone, Serialize)]
pub struct CotangentSumValue {
    pub value: f64,
    pub k: usize,
    pub x: f64,
    pub kind: SumKind,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `((-1)^k p_k) mod q_k` as a machine word.
pub fn residue_step(table: &ConvergentTable, k: usize) -> Result<u64> {
    let q = table.q(k);
    let signed = if k.is_multiple_of(2) {
        table.p(k).clone()
    } else {
        -table.p(k).clone()
    };
    let qi = IBig::from(q.clone());
    let r = ((signed % &qi) + &qi) % &qi;
    u64::try_from(UBig::try_from(r).expect("reduced residue")).map_err(|_| Error::Budget {
        what: "q_k".into(),
        value: q.to_string(),
        limit: u64::MAX.to_string(),
    })
}

/// `q_k` as a word, refusing anything above `budget`.
pub fn q_within(table: &ConvergentTable, k: usize, budget: u64) -> Result<u64> {
    match table.q_u64(k) {
        Some(q) if q <= budget => Ok(q),
        _ => Err(Error::Budget {
            what: format!("q_{k}"),
            value: table.q(k).to_string(),
            limit: budget.to_string(),
        }),
    }
}

/// `Σ_{n=1}^{q-1} (n/q) cot(π(np + σx)/q)` by direct summation.
pub fn vasyunin(p: i64, q: u64, x: f64, sign: i32) -> Result<f64> {
    if q < 2 {
        return Err(Error::Domain(format!("q = {q} must be at least 2")));
    }
    let step = p.rem_euclid(q as i64) as u64;
    if gcd(step, q) != 1 {
        return Err(Error::Domain(format!("gcd({p}, {q}) != 1")));
    }
    let shift = if sign < 0 { -x } else { x };
    let qf = q as f64;
    let mut acc = Neumaier::new();
    let mut r = 0u64;
    for n in 1..q {
        r = (r + step) % q;
        let t = trig::shifted_residue(r, shift, 0.0, qf).ok_or_else(|| {
            Error::Pole(format!("n = {n}: ({n}·{p} + {shift})/{q} is an integer"))
        })?;
        acc.add(n as f64 / qf / (PI * t / qf).tan());
    }
    Ok(acc.value())
}

/// The same sum at `x = 0`, pairing `n` with `q − n`.
pub fn vasyunin_paired(p: i64, q: u64) -> Result<f64> {
    let step = p.rem_euclid(q as i64) as u64;
    if q < 2 || gcd(step, q) != 1 {
        return Err(Error::Domain(format!("gcd({p}, {q}) != 1")));
    }
    let qf = q as f64;
    let mut acc = Neumaier::new();
    for n in 1..q.div_ceil(2) {
        let r = ((n as u128 * step as u128) % q as u128) as u64;
        let cot = 1.0 / (PI * trig::symmetric(r, q) as f64 / qf).tan();
        acc.add((2.0 * n as f64 - qf) / qf * cot);
    }
    Ok(acc.value())
}

/// `C_k(x)` with `σ = (−1)^k`.
pub fn c_k(table: &ConvergentTable, k: usize, x: f64) -> Result<CotangentSumValue> {
    let q = q_within(table, k, DEFAULT_Q_BUDGET)?;
    let qi = IBig::from(q);
    let pk = i64::try_from(((table.p(k) % &qi) + &qi) % &qi).expect("residue below q");
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    Ok(CotangentSumValue {
        value: vasyunin(pk, q, x, sign)?,
        k,
        x,
        kind: SumKind::CK,
    })
}

/// Precomputed weights `sin(π n θ_k/q_k)` and symmetric residues of `n(−1)^k p_k`.
#[derive(Debug, Clone)]
pub struct VkKernel {
    k: usize,
    q: u64,
    q_prev: u64,
    delta: f64,
    a_k: u64,
    weights: Vec<f64>,
    residues: Vec<i64>,
}

impl VkKernel {
    pub fn new(table: &ConvergentTable, k: usize) -> Result<Self> {
        Self::with_budget(table, k, DEFAULT_Q_BUDGET)
    }

    pub fn with_budget(table: &ConvergentTable, k: usize, budget: u64) -> Result<Self> {
        if k < 1 || k > table.k_max() {
            return Err(Error::Domain(format!("k = {k} outside 1..={}", table.k_max())));
        }
        let q = q_within(table, k, budget)?;
        let step = residue_step(table, k)?;
        let ratio = table.theta_f64(k) / q as f64;
        let weights = (1..q).map(|n| (PI * n as f64 * ratio).sin()).collect();
        let mut r = 0u64;
        let residues = (1..q)
            .map(|_| {
                r = ((r as u128 + step as u128) % q as u128) as u64;
                trig::symmetric(r, q)
            })
            .collect();
        Ok(Self {
            k,
            q,
            q_prev: table.q_u64(k - 1).expect("q_{k-1} < q_k"),
            delta: table.delta_f64(k),
            a_k: table.a(k),
            weights,
            residues,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// `sin(π n θ_k/q_k) · cot(π(n(−1)^k p_k + x)/q_k)` for `1 ≤ n < q_k`.
    #[inline]
    pub fn term(&self, n: u64, x: f64) -> f64 {
        let i = (n - 1) as usize;
        let t = PI * (self.residues[i] as f64 + x) / self.q as f64;
        self.weights[i] / t.tan()
    }

    /// `Σ_{n=1}^{m} term(n, x)` with a fixed-order chunked reduction.
    pub fn partial(&self, m: u64, x: f64) -> f64 {
        let m = m.min(self.q - 1) as usize;
        let q = self.q as f64;
        let chunks: Vec<Neumaier> = (0..m.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(m);
                let mut acc = Neumaier::new();
                for i in lo..hi {
                    let t = PI * (self.residues[i] as f64 + x) / q;
                    acc.add(self.weights[i] / t.tan());
                }
                acc
            })
            .collect();
        let mut total = Neumaier::new();
        chunks.iter().for_each(|c| total.merge(c));
        total.value()
    }

    /// `V_k(x)` for `|x| < 1`.
    pub fn v(&self, x: f64) -> Result<f64> {
        if !(x.abs() < 1.0) {
            return Err(Error::Pole(format!("V_{} needs |x| < 1, got {x}", self.k)));
        }
        Ok(self.partial(self.q - 1, x))
    }

    /// `V_k*(x)` for `|x| < 2`, `k ≥ 2`.
    pub fn v_star(&self, x: f64) -> Result<f64> {
        if self.k < 2 {
            return Err(Error::Domain("V_k* needs k ≥ 2".into()));
        }
        if !(x.abs() < 2.0) {
            return Err(Error::Pole(format!("V_{}* needs |x| < 2, got {x}", self.k)));
        }
        // Excluded terms have residues ∓1, the only poles on (−2, 2).
        let skip = [self.q_prev, self.q - self.q_prev];
        let q = self.q as f64;
        let chunks: Vec<Neumaier> = (0..(self.q as usize - 1).div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(self.q as usize - 1);
                let mut acc = Neumaier::new();
                for i in lo..hi {
                    if skip.contains(&(i as u64 + 1)) {
                        continue;
                    }
                    let t = PI * (self.residues[i] as f64 + x) / q;
                    acc.add(self.weights[i] / t.tan());
                }
                acc
            })
            .collect();
        let mut total = Neumaier::new();
        chunks.iter().for_each(|c| total.merge(c));
        Ok(total.value())
    }

    /// The two terms dropped from `V_k*`, i.e. `V_k(x) − V_k*(x)`.
    pub fn excluded_terms(&self, x: f64) -> f64 {
        let mut acc = Neumaier::new();
        acc.add(self.term(self.q_prev, x));
        if self.q - self.q_prev != self.q_prev {
            acc.add(self.term(self.q - self.q_prev, x));
        }
        acc.value()
    }

    /// `δ_k (log(a_k/2π) − ψ(1+x))`, or `ψ(2+x)` when starred.
    pub fn main_term(&self, x: f64, starred: bool) -> Result<f64> {
        main_term(self.delta, self.a_k, x, starred)
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// `δ (log(a/2π) − ψ(1+x))`, or with `ψ(2+x)` when `starred`.
pub fn main_term(delta: f64, a_k: u64, x: f64, starred: bool) -> Result<f64> {
    let shift = if starred { 2.0 } else { 1.0 };
    Ok(delta * ((a_k as f64 / (2.0 * PI)).ln() - digamma(shift + x)?))
}

pub fn v_k(table: &ConvergentTable, k: usize, x: f64) -> Result<CotangentSumValue> {
    Ok(CotangentSumValue {
        value: VkKernel::new(table, k)?.v(x)?,
        k,
        x,
        kind: SumKind::VK,
    })
}

pub fn v_k_star(table: &ConvergentTable, k: usize, x: f64) -> Result<CotangentSumValue> {
    Ok(CotangentSumValue {
        value: VkKernel::new(table, k)?.v_star(x)?,
        k,
        x,
        kind: SumKind::VKStar,
    })
}

pub fn v_k_main_term(table: &ConvergentTable, k: usize, x: f64, starred: bool) -> Result<f64> {
    main_term(table.delta_f64(k), table.a(k), x, starred)
}
