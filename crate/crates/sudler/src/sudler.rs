//! Sudler products: direct, shifted, rational, decomposed, and scanned.

use std::cmp::Ordering;

use dashu_int::UBig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::ConvergentTable;
use crate::cotangent::{residue_step, VkKernel};
use crate::error::{Error, Result};
use crate::hexfloat;
use crate::ostrowski::{self, epsilon_profile, OstrowskiDigits};
use crate::phase::Phase;
use crate::real::{self, Real};
use crate::sum::{LogSumExp, Neumaier};
use crate::trig;

/// Default ceiling on the number of factors a scan or product may touch.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Scans keep the per-`N` array only up to this length.
pub const VALUES_LIMIT: u64 = 1 << 24;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    Decomposed,
    RationalClosedForm,
}

/// `log` of a product magnitude. Vanishing factors are counted, not folded
/// into `-∞`; `log_value` then sums the remaining factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogProduct {
    #[serde(with = "hexfloat::serde_f64")]
    pub log_value: f64,
    pub n_terms: u64,
    pub method: Method,
    pub zero_factors: u64,
}

impl LogProduct {
    pub fn is_zero(&self) -> bool {
        self.zero_factors > 0
    }

    /// The product itself, `0` when a factor vanishes.
    pub fn value(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.log_value.exp()
        }
    }

    /// `log_value`, or an error naming `what` when the product vanishes.
    pub fn finite(&self, what: &str) -> Result<f64> {
        if self.is_zero() {
            Err(Error::ZeroFactor(what.to_owned()))
        } else {
            Ok(self.log_value)
        }
    }
}

fn accumulate(step: &Phase, start: Phase, count: u64) -> (Neumaier, u64) {
    let mut phase = start;
    let mut acc = Neumaier::new();
    let mut zeros = 0;
    // Factors lie in [2^-320, 2]; blocks of 16 stay far from under- and overflow.
    let mut block = 1.0f64;
    let mut len = 0;
    for _ in 0..count {
        phase.add_assign(step);
        let f = phase.two_sin();
        if f == 0.0 {
            zeros += 1;
            continue;
        }
        block *= f;
        len += 1;
        if len == 16 || block < 1e-200 {
            acc.add(block.ln());
            block = 1.0;
            len = 0;
        }
    }
    if len > 0 {
        acc.add(block.ln());
    }
    (acc, zeros)
}

fn check_range(table: &ConvergentTable, n: u64) -> Result<()> {
    // frac_phase enforces 0 ≤ n < q_{K_max} and the bit budget.
    table.frac_phase(&UBig::from(n)).map(|_| ())
}

/// `log P_N(α) = Σ_{n=1}^{N} log|2 sin(π n α)|`.
pub fn log_sudler(table: &ConvergentTable, n: u64) -> Result<LogProduct> {
    check_range(table, n)?;
    let limbs = table.cfg().phase_limbs();
    let (acc, zeros) = accumulate(table.alpha_phase(), Phase::zero(limbs), n);
    Ok(LogProduct {
        log_value: acc.value(),
        n_terms: n,
        method: Method::Direct,
        zero_factors: zeros,
    })
}

/// `log P_M(α, y) = Σ_{n=1}^{M} log|2 sin(π(nα + y))|` with `y` given as a phase.
pub fn log_sudler_phase(table: &ConvergentTable, m: u64, shift: &Phase) -> Result<LogProduct> {
    check_range(table, m)?;
    let (acc, zeros) = accumulate(table.alpha_phase(), shift.clone(), m);
    Ok(LogProduct {
        log_value: acc.value(),
        n_terms: m,
        method: Method::Direct,
        zero_factors: zeros,
    })
}

/// `log P_M(α, sign·x)`.
pub fn log_sudler_shifted(table: &ConvergentTable, m: u64, x: &Real, sign: i8) -> Result<LogProduct> {
    let limbs = table.cfg().phase_limbs();
    let y = if sign < 0 { -x.clone() } else { x.clone() };
    log_sudler_phase(table, m, &Phase::from_real(&y, limbs))
}

/// `log P_{q_k}(α, (−1)^k x / q_k)`, the normalized product near a convergent.
pub fn log_sudler_convergent(table: &ConvergentTable, k: usize, m: u64, x: &Real) -> Result<LogProduct> {
    let bits = table.bits();
    let scaled = x.clone() / real::from_uint(table.q(k), bits);
    log_sudler_shifted(table, m, &scaled, if k.is_multiple_of(2) { 1 } else { -1 })
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `Σ_{n=1}^{N} log|2 sin(π(n·step + y)/q)|` with `y = y_hi + y_lo` in units of `1/q`.
fn rational_kernel(step: u64, q: u64, n: u64, y_hi: f64, y_lo: f64) -> (Neumaier, u64) {
    let qf = q as f64;
    let mut acc = Neumaier::new();
    let mut zeros = 0;
    let mut r = 0u64;
    for _ in 0..n {
        r = ((r as u128 + step as u128) % q as u128) as u64;
        match trig::shifted_residue(r, y_hi, y_lo, qf) {
            Some(t) => acc.add((2.0 * (std::f64::consts::PI * t / qf).sin().abs()).ln()),
            None => zeros += 1,
        }
    }
    (acc, zeros)
}

fn rational_step(p: i64, q: u64) -> Result<u64> {
    if q == 0 {
        return Err(Error::Domain("q must be positive".into()));
    }
    let step = p.rem_euclid(q as i64) as u64;
    if gcd(step, q) != 1 && q > 1 {
        return Err(Error::Domain(format!("gcd({p}, {q}) != 1")));
    }
    if q >= 1 << 52 {
        return Err(Error::Budget {
            what: "q".into(),
            value: q.to_string(),
            limit: (1u64 << 52).to_string(),
        });
    }
    Ok(step)
}

/// `log P_N(p/q, x)` by direct summation with exact residues `np mod q`.
pub fn log_sudler_rational(p: i64, q: u64, n: u64, x: f64) -> Result<LogProduct> {
    let step = rational_step(p, q)?;
    if n >= q {
        return Err(Error::OutOfRange {
            n: n.to_string(),
            bound: q.to_string(),
        });
    }
    let (y_hi, y_lo) = trig::two_prod(q as f64, x);
    let (acc, zeros) = rational_kernel(step, q, n, y_hi, y_lo);
    Ok(LogProduct {
        log_value: acc.value(),
        n_terms: n,
        method: Method::Direct,
        zero_factors: zeros,
    })
}

/// `log P_{q-1}(p/q, x) = log(|sin πqx| / |sin πx|)`, or `log q` for integer `x`.
pub fn log_last_term(q: u64, x: f64) -> LogProduct {
    let mut out = LogProduct {
        log_value: (q as f64).ln(),
        n_terms: q.saturating_sub(1),
        method: Method::RationalClosedForm,
        zero_factors: 0,
    };
    if x.fract() == 0.0 {
        return out;
    }
    let (h, l) = trig::two_prod(q as f64, x);
    match (trig::log_abs_sin_pi(h, l), trig::log_abs_sin_pi(x, 0.0)) {
        (Some(num), Some(den)) => out.log_value = num - den,
        _ => {
            out.log_value = f64::NEG_INFINITY;
            out.zero_factors = 1;
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct Factor {
    pub k: usize,
    pub b: u64,
    /// `b δ_k + ε_k`, the shift in units of `1/q_k`.
    #[serde(with = "hexfloat::serde_f64")]
    pub shift: f64,
    pub product: LogProduct,
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub factors: Vec<Factor>,
    /// `Σ_b log P_{q_k}(α, …)` for each `k`; zero where `b_k = 0`.
    #[serde(with = "hexfloat::serde_vec_f64")]
    pub per_k: Vec<f64>,
    #[serde(with = "hexfloat::serde_f64")]
    pub total: f64,
    pub zero_factors: u64,
}

/// `P_N(α) = ∏_k ∏_{b<b_k} P_{q_k}(α, (−1)^k (b δ_k + ε_k)/q_k)`.
pub fn decompose(table: &ConvergentTable, digits: &OstrowskiDigits) -> Result<Decomposition> {
    let eps = epsilon_profile(table, digits)?;
    let bits = table.bits();
    let mut factors = Vec::new();
    let mut per_k = vec![0.0; digits.len()];
    let mut total = Neumaier::new();
    let mut zeros = 0;
    for (k, slot) in per_k.iter_mut().enumerate() {
        let b_k = digits.get(k);
        if b_k == 0 {
            continue;
        }
        let q = table.q_u64(k).ok_or_else(|| Error::Budget {
            what: format!("q_{k}"),
            value: table.q(k).to_string(),
            limit: u64::MAX.to_string(),
        })?;
        let eps_k = eps.get(k).expect("defined where b_k ≥ 1");
        let mut inner = Neumaier::new();
        for b in 0..b_k {
            let shift = real::from_u64(b, bits) * table.delta(k).clone() + eps_k.clone();
            let s = real::to_f64(&shift);
            assert!(s > -1.0 && s < 1.0, "shift b·δ_k + ε_k = {s} left (−1, 1) at k = {k}, b = {b}");
            let product = log_sudler_convergent(table, k, q, &shift)?;
            zeros += product.zero_factors;
            inner.add(product.log_value);
            factors.push(Factor {
                k,
                b,
                shift: s,
                product: LogProduct {
                    method: Method::Decomposed,
                    ..product
                },
            });
        }
        *slot = inner.value();
        total.merge(&inner);
    }
    Ok(Decomposition {
        factors,
        per_k,
        total: total.value(),
        zero_factors: zeros,
    })
}

/// `B_{k,M}(x)`: the part of `log P_M(α, (−1)^k x/q_k)` not captured by the
/// rational product at `p_k/q_k` and its first-order cotangent correction.
pub fn b_transfer(table: &ConvergentTable, k: usize, m: u64, x: f64) -> Result<f64> {
    let kernel = VkKernel::new(table, k)?;
    b_transfer_with(table, &kernel, m, x)
}

/// [`b_transfer`] reusing a prepared kernel for `k`.
pub fn b_transfer_with(table: &ConvergentTable, kernel: &VkKernel, m: u64, x: f64) -> Result<f64> {
    let k = kernel.k();
    let q = kernel.q();
    if m >= q {
        return Err(Error::OutOfRange {
            n: m.to_string(),
            bound: q.to_string(),
        });
    }
    if !(x.abs() < 1.0) {
        return Err(Error::Domain(format!("x = {x} must lie in (−1, 1)")));
    }
    if m == 0 {
        return Ok(0.0);
    }
    let irrational = log_sudler_convergent(table, k, m, &real::from_f64(x, table.bits()))?;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let p_mod = residue_step(table, k)?;
    // Residues of n·p_k; the shift is (−1)^k x in units of 1/q_k.
    let step = if k.is_multiple_of(2) { p_mod } else { (q - p_mod) % q };
    let (acc, zeros) = rational_kernel(step, q, m, sign * x, 0.0);
    if zeros > 0 {
        return Err(Error::ZeroFactor(format!("P_{m}(p_{k}/q_{k}, ·)")));
    }
    let alpha_part = irrational.finite("shifted product at α")?;
    Ok(alpha_part - acc.value() - kernel.partial(m, x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSum {
    #[serde(with = "hexfloat::serde_f64")]
    pub c: f64,
    /// `log Σ_{N<q_K} P_N^c`.
    #[serde(with = "hexfloat::serde_f64")]
    pub log_sum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopEntry {
    pub n: u64,
    #[serde(with = "hexfloat::serde_f64")]
    pub log_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub schema_version: u32,
    pub alpha: String,
    #[serde(rename = "K")]
    pub k: usize,
    pub q_k: u64,
    pub argmax_n: u64,
    pub argmax_digits: Vec<u64>,
    #[serde(with = "hexfloat::serde_f64")]
    pub max_log: f64,
    pub sums: Vec<NormSum>,
    pub top: Vec<TopEntry>,
    #[serde(skip)]
    pub values: Option<Vec<f64>>,
}

impl ScanResult {
    /// `log Σ P_N^c` for a `c` present in the scan.
    pub fn log_sum(&self, c: f64) -> Option<f64> {
        self.sums.iter().find(|s| s.c == c).map(|s| s.log_sum)
    }

    /// `(1/c) log Σ P_N^c`.
    pub fn norm(&self, c: f64) -> Option<f64> {
        self.log_sum(c).map(|v| v / c)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ScanConfig {
    pub budget: u64,
    pub parallelism: usize,
    pub top_m: usize,
    pub keep_values: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            parallelism: rayon::current_num_threads(),
            top_m: 32,
            keep_values: true,
        }
    }
}

struct ChunkScan {
    /// `Σ log f(n)` over the chunk's increments, i.e. `log P_end − log P_start`.
    span: Neumaier,
    lse: Vec<LogSumExp>,
    best: (u64, f64),
    top: Vec<TopEntry>,
    local: Vec<f64>,
}

fn rank(a: &TopEntry, b: &TopEntry) -> Ordering {
    b.log_value.total_cmp(&a.log_value).then(a.n.cmp(&b.n))
}

fn scan_chunk(
    table: &ConvergentTable,
    (start, end, carry): (u64, u64, bool),
    cs: &[f64],
    top_m: usize,
    keep: bool,
) -> Result<ChunkScan> {
    let step = table.alpha_phase();
    let mut phase = step.mul_u64(start);
    let mut run = Neumaier::new();
    let mut lse = vec![LogSumExp::new(); cs.len()];
    let mut best = (start, 0.0);
    let mut top: Vec<TopEntry> = Vec::with_capacity(2 * top_m + 1);
    let mut local = Vec::with_capacity(if keep { (end - start) as usize } else { 0 });
    for n in start..end {
        if n > start {
            phase.add_assign(step);
            let f = phase
                .log_two_sin()
                .ok_or_else(|| Error::ZeroFactor(format!("P_{n} at a rational α")))?;
            run.add(f);
        }
        let v = run.value();
        for (acc, c) in lse.iter_mut().zip(cs) {
            acc.push(c * v);
        }
        if v > best.1 || n == start {
            best = (n, v);
        }
        if top_m > 0 {
            top.push(TopEntry { n, log_value: v });
            if top.len() >= 2 * top_m {
                top.sort_by(rank);
                top.truncate(top_m);
            }
        }
        if keep {
            local.push(v);
        }
    }
    if carry {
        // One more increment carries the span to P_end.
        phase.add_assign(step);
        let f = phase
            .log_two_sin()
            .ok_or_else(|| Error::ZeroFactor(format!("P_{end} at a rational α")))?;
        run.add(f);
    }
    top.sort_by(rank);
    top.truncate(top_m);
    Ok(ChunkScan {
        span: run,
        lse,
        best,
        top,
        local,
    })
}

/// Sweeps `0 ≤ N < q_K`, returning the argmax, top entries and `log Σ P_N^c`.
///
/// Chunk boundaries are fixed, every chunk is evaluated relative to its own
/// start, and chunk results are merged in index order, so the output is
/// bit-identical for every thread count.
pub fn scan(table: &ConvergentTable, k: usize, cs: &[f64], cfg: &ScanConfig) -> Result<ScanResult> {
    if k < 1 || k > table.k_max() {
        return Err(Error::Domain(format!("K = {k} outside 1..={}", table.k_max())));
    }
    let q = match table.q_u64(k) {
        Some(q) if q <= cfg.budget => q,
        _ => {
            return Err(Error::Budget {
                what: format!("q_{k}"),
                value: table.q(k).to_string(),
                limit: cfg.budget.to_string(),
            })
        }
    };
    if cs.iter().any(|c| !(*c > 0.0)) {
        return Err(Error::Domain("every c must be positive".into()));
    }
    check_range(table, q - 1)?;
    let keep = cfg.keep_values && q <= VALUES_LIMIT;
    let n_chunks = q.div_ceil(CHUNK);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let chunks: Vec<ChunkScan> = pool.install(|| {
        (0..n_chunks)
            .into_par_iter()
            .map(|j| {
                let end = ((j + 1) * CHUNK).min(q);
                scan_chunk(table, (j * CHUNK, end, end < q), cs, cfg.top_m, keep)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut seed = Neumaier::new();
    let mut lse = vec![LogSumExp::new(); cs.len()];
    let mut best = (0u64, f64::NEG_INFINITY);
    let mut top = Vec::new();
    let mut values = keep.then(|| Vec::with_capacity(q as usize));
    for chunk in &chunks {
        let base = seed.value();
        for ((acc, part), c) in lse.iter_mut().zip(&chunk.lse).zip(cs) {
            let mut shifted = *part;
            shifted.shift(c * base);
            acc.merge(&shifted);
        }
        let cand = base + chunk.best.1;
        if cand > best.1 {
            best = (chunk.best.0, cand);
        }
        top.extend(chunk.top.iter().map(|e| TopEntry {
            n: e.n,
            log_value: base + e.log_value,
        }));
        if let Some(vals) = values.as_mut() {
            vals.extend(chunk.local.iter().map(|v| base + v));
        }
        seed.merge(&chunk.span);
    }
    top.sort_by(rank);
    top.truncate(cfg.top_m);
    let digits = ostrowski::encode_with_len(table, &UBig::from(best.0), k)?;
    Ok(ScanResult {
        schema_version: crate::SCHEMA_VERSION,
        alpha: table.alpha().render(),
        k,
        q_k: q,
        argmax_n: best.0,
        argmax_digits: digits.digits().to_vec(),
        max_log: best.1,
        sums: cs
            .iter()
            .zip(&lse)
            .map(|(&c, acc)| NormSum {
                c,
                log_sum: acc.value(),
            })
            .collect(),
        top,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::parse_alpha;
    use crate::ostrowski::encode;
    use crate::real::PrecisionConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn table(spec: &str, k: usize) -> ConvergentTable {
        ConvergentTable::build(&parse_alpha(spec).unwrap(), k, PrecisionConfig::default()).unwrap()
    }

    /// Naive `f64` product with `α` rounded once.
    fn naive(alpha: f64, n: u64, x: f64) -> f64 {
        (1..=n)
            .map(|i| (2.0 * (PI * (i as f64 * alpha + x)).sin().abs()).ln())
            .sum()
    }

    #[test]
    fn empty_product_and_small_cases() {
        let t = table("golden", 12);
        assert_eq!(log_sudler(&t, 0).unwrap().log_value, 0.0);
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        for n in [1, 2, 7, 50, 140] {
            let v = log_sudler(&t, n).unwrap().log_value;
            assert!((v - naive(alpha, n, 0.0)).abs() < 1e-11, "N={n}");
        }
        let zero = log_sudler_shifted(&t, 40, &real::from_u64(0, 256), 1).unwrap();
        assert_eq!(zero.log_value, log_sudler(&t, 40).unwrap().log_value);
        assert!(log_sudler(&t, 233).is_err());
    }

    #[test]
    fn golden_products_stay_in_bounded_windows() {
        let t = table("golden", 22);
        let s = scan(&t, 20, &[1.0], &ScanConfig::default()).unwrap();
        let values = s.values.unwrap();
        let lower = values[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        let upper = values[1..]
            .iter()
            .enumerate()
            .map(|(i, v)| v - ((i + 1) as f64).ln())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(lower.exp() > 0.1 && lower.exp() < 10.0);
        assert!(upper.exp() > 0.1 && upper.exp() < 10.0);
    }

    #[test]
    fn rational_examples() {
        let p = log_sudler_rational(1, 5, 2, 0.0).unwrap();
        assert!((p.value() - 5f64.sqrt()).abs() < 1e-14);
        let last = log_last_term(3, 0.25);
        assert!(last.log_value.abs() < 1e-15);
        assert!((log_last_term(7, 3.0).log_value - 7f64.ln()).abs() < 1e-15);
        assert!(log_last_term(4, 0.25).is_zero());
        assert!(log_sudler_rational(2, 6, 1, 0.0).is_err());
        assert!(log_sudler_rational(1, 5, 5, 0.0).is_err());
        let z = log_sudler_rational(1, 4, 3, 0.5).unwrap();
        assert!(z.is_zero());
    }

    #[test]
    fn reflection_identity_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..300 {
            let q = rng.gen_range(2..2000u64);
            let p = loop {
                let p = rng.gen_range(1..q as i64);
                if gcd(p as u64, q) == 1 {
                    break p;
                }
            };
            let n = rng.gen_range(0..q);
            let x = if i % 5 == 0 {
                rng.gen_range(-3..4) as f64
            } else {
                rng.gen_range(-2.0..2.0)
            };
            let a = log_sudler_rational(p, q, n, x).unwrap();
            let b = log_sudler_rational(p, q, q - n - 1, -x).unwrap();
            let c = log_last_term(q, x);
            assert!(!a.is_zero() && !b.is_zero());
            let lhs = a.log_value + b.log_value;
            assert!((lhs - c.log_value).abs() < 1e-10 * (1.0 + c.log_value.abs()), "p/q={p}/{q} N={n} x={x}");
            let closed = log_sudler_rational(p, q, q - 1, x).unwrap();
            assert!((closed.log_value - c.log_value).abs() < 1e-10 * (1.0 + c.log_value.abs()));
        }
    }

    #[test]
    fn decomposition_matches_direct_product() {
        for spec in ["golden", "[0;(2)]", "[0;(5)]", "[0;2,(1,4)]"] {
            let t = table(spec, 8);
            let top = t.q_u64(5).unwrap().min(800);
            for n in 0..top {
                let d = encode(&t, &UBig::from(n)).unwrap();
                let dec = decompose(&t, &d).unwrap();
                let direct = log_sudler(&t, n).unwrap().log_value;
                assert!((dec.total - direct).abs() <= 1e-9 * (1.0 + direct.abs()), "{spec} N={n}");
            }
        }
        let t = table("[0;(5)]", 4);
        let empty = decompose(&t, &encode(&t, &UBig::ZERO).unwrap()).unwrap();
        assert!(empty.factors.is_empty() && empty.total == 0.0);
    }

    #[test]
    fn single_digit_decomposition_telescopes() {
        let t = table("[0;(9)]", 4);
        for b0 in 1..9u64 {
            let d = encode(&t, &UBig::from(b0)).unwrap();
            let dec = decompose(&t, &d).unwrap();
            assert_eq!(dec.factors.len() as u64, b0);
            assert!((dec.total - log_sudler(&t, b0).unwrap().log_value).abs() < 1e-12);
        }
    }

    #[test]
    fn transfer_vanishes_for_empty_range_and_is_small() {
        let t = table("[0;(15)]", 6);
        assert_eq!(b_transfer(&t, 4, 0, 0.3).unwrap(), 0.0);
        let q = t.q_u64(4).unwrap();
        let b = b_transfer(&t, 4, q - 1, 0.3).unwrap();
        // Two-sided shape: B ≤ C/(a² q) above, −B ≤ C/((1−|x|)² a²) below.
        assert!(b <= 10.0 / (15.0 * 15.0 * q as f64), "B = {b:e}");
        assert!(-b <= 10.0 / (0.7 * 0.7 * 15.0 * 15.0), "B = {b:e}");
    }

    #[test]
    fn corollary_identity_links_transfer_and_v_k() {
        // log P_{q_k}(α, (−1)^k x/q_k) = log(f(θ_k + x/q_k) |sin πx|/|sin(πx/q_k)|) + V_k(x) + B_{k,q_k-1}(x)
        let t = table("[0;(7)]", 6);
        for k in [3, 4] {
            let kernel = VkKernel::new(&t, k).unwrap();
            let q = kernel.q();
            for x in [-0.6, -0.1, 0.25, 0.8] {
                let lhs = log_sudler_convergent(&t, k, q, &real::from_f64(x, 256)).unwrap().log_value;
                let th = t.theta_f64(k);
                let qf = q as f64;
                let head = (2.0 * (PI * (th + x / qf)).sin().abs()).ln()
                    + (PI * x).sin().abs().ln()
                    - (PI * x / qf).sin().abs().ln();
                let rhs = head + kernel.v(x).unwrap() + b_transfer_with(&t, &kernel, q - 1, x).unwrap();
                assert!((lhs - rhs).abs() < 1e-10, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn scan_is_deterministic_across_thread_counts() {
        let t = table("[0;(6)]", 5);
        let cs = [0.5, 1.0, 2.0, 64.0];
        let runs: Vec<ScanResult> = [1, 4, 16]
            .iter()
            .map(|&p| {
                scan(&t, 4, &cs, &ScanConfig {
                    parallelism: p,
                    ..ScanConfig::default()
                })
                .unwrap()
            })
            .collect();
        assert_eq!(runs[0], runs[1]);
        assert_eq!(runs[0], runs[2]);
    }

    #[test]
    fn scan_agrees_with_direct_products() {
        let t = table("[0;(6)]", 5);
        let s = scan(&t, 3, &[1.0, 64.0], &ScanConfig::default()).unwrap();
        assert_eq!(s.q_k, 228);
        let values = s.values.as_ref().unwrap();
        for n in [0u64, 1, 17, 220, 227] {
            let d = log_sudler(&t, n).unwrap().log_value;
            assert!((values[n as usize] - d).abs() < 1e-12);
        }
        assert!((values[s.argmax_n as usize] - s.max_log).abs() < 1e-15);
        let norm = s.norm(64.0).unwrap();
        assert!(norm >= s.max_log && norm - s.max_log <= (228f64).ln() / 64.0);
        let digits = &s.argmax_digits;
        for (b, star) in digits.iter().zip([5u64, 5, 5]) {
            assert!(b.abs_diff(star) <= 2);
        }
        let json = serde_json::to_string(&s).unwrap();
        let back: ScanResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back.max_log.to_bits(), s.max_log.to_bits());
        assert_eq!(back.sums, s.sums);
    }

    #[test]
    fn longer_windows_have_larger_maxima() {
        let t = table("[0;(4)]", 8);
        let small = scan(&t, 5, &[1.0], &ScanConfig::default()).unwrap();
        let large = scan(&t, 6, &[1.0], &ScanConfig::default()).unwrap();
        assert!(large.max_log >= small.max_log);
    }
}
