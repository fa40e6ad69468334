//! Constants, digit penalties, the `U_N` surrogate and the prediction formulas
//! for maxima and norms of `P_N(α)`.
//!
//! Every error term is an unspecified `O(·)`; budgets here are the shape of
//! that term times a constant supplied by the caller (normally read from the
//! calibration fixtures).

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::ConvergentTable;
use crate::cotangent::VkKernel;
use crate::error::{Error, Result};
use crate::hexfloat;
use crate::ostrowski::{self, epsilon_profile, OstrowskiDigits};
use crate::quad::{integrate, log_sin_integral};
use crate::special::ln_gamma;
use crate::sudler::{self, decompose, ScanResult};

/// `π√3/2`, the curvature of the digit penalty at `5/6`.
pub const QUADRATIC_SLOPE: f64 = 2.720_699_046_351_326_6;

/// Lower constant of the digit penalty, just below `9·Vol/(25π)`.
pub const PENALTY_FLOOR: f64 = 0.2326;

/// `4π ∫_0^{5/6} log(2 sin πx) dx`.
pub fn vol41() -> f64 {
    4.0 * PI * log_sin_integral(0.0, 5.0 / 6.0)
}

/// `9·Vol/(25π) = (6/5)^2 ∫_0^{5/6} log(2 sin πx) dx`.
pub fn vol_ratio() -> f64 {
    9.0 * vol41() / (25.0 * PI)
}

/// `min_{y ∈ grid} (5/6 − y)^{−2} ∫_y^{5/6} log|2 sin πx| dx` over `steps` points of `[0, 5/6)`.
pub fn penalty_ratio_min(steps: usize) -> (f64, f64) {
    (0..steps)
        .map(|i| {
            let y = (5.0 / 6.0) * i as f64 / steps as f64;
            let gap = 5.0 / 6.0 - y;
            (y, log_sin_integral(y, 5.0 / 6.0) / (gap * gap))
        })
        .fold((0.0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct B2Integrals {
    /// `∫_1^∞ B_2({x}) / (x − 5/6)^2 dx`.
    #[serde(with = "hexfloat::serde_f64")]
    pub shifted: f64,
    /// `∫_1^∞ B_2({x}) / x^2 dx`.
    #[serde(with = "hexfloat::serde_f64")]
    pub plain: f64,
    #[serde(with = "hexfloat::serde_f64")]
    pub shifted_closed: f64,
    #[serde(with = "hexfloat::serde_f64")]
    pub plain_closed: f64,
}

fn bernoulli2(t: f64) -> f64 {
    t * t / 2.0 - t / 2.0 + 1.0 / 12.0
}

/// `∫_1^∞ B_2({x}) / (x − s)^2 dx` for `s < 1`.
fn periodized_b2(s: f64) -> f64 {
    const UNITS: u32 = 200;
    let head: f64 = (1..UNITS)
        .map(|m| integrate(|t| bernoulli2(t) / (m as f64 + t - s).powi(2), 0.0, 1.0, 1e-17))
        .sum();
    // Each unit contributes ≈ g''(midpoint)·∫B_2(t)(t−½)^2/2 = 1/(120 u^4).
    head + 1.0 / (360.0 * (UNITS as f64 - s).powi(3))
}

pub fn bernoulli_b2_integrals() -> Result<B2Integrals> {
    let ln_g16 = ln_gamma(1.0 / 6.0)?;
    let shifted_closed =
        1.0 / 3.0 - (ln_g16 - (5.0 / 6.0) * 2f64.ln() - 3f64.ln() / 3.0 - 0.5 * PI.ln());
    let plain_closed = -11.0 / 12.0 + 0.5 * (2.0 * PI).ln();
    Ok(B2Integrals {
        shifted: periodized_b2(5.0 / 6.0),
        plain: periodized_b2(0.0),
        shifted_closed,
        plain_closed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// `b_k ≤ 0.99·a_{k+1}`: the integral formula applies.
    FormulaIi,
    /// Below `k_0`, where only the quadratic law is used.
    Quadratic,
    /// `b_k > 0.99·a_{k+1}`: the integral is reported but carries no guarantee.
    OutOfRegime,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DkTerm {
    pub k: usize,
    pub b: u64,
    pub b_star: u64,
    pub a_next: u64,
    #[serde(with = "hexfloat::serde_f64")]
    pub main: f64,
    #[serde(with = "hexfloat::serde_f64")]
    pub quad: f64,
    pub regime: Regime,
}

impl DkTerm {
    /// The value entering the prediction.
    pub fn value(&self) -> f64 {
        match self.regime {
            Regime::Quadratic => self.quad,
            Regime::FormulaIi | Regime::OutOfRegime => self.main,
        }
    }

    /// `|b − b*|/a + [b ≤ 0.01a]·log a`, plus `log a` outside the formula's range.
    pub fn error_shape(&self) -> f64 {
        let a = self.a_next as f64;
        let mut s = self.b.abs_diff(self.b_star) as f64 / a;
        if self.b as f64 <= 0.01 * a || self.regime == Regime::OutOfRegime {
            s += a.ln();
        }
        s
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DkTerms {
    pub k0: usize,
    pub terms: Vec<DkTerm>,
}

impl DkTerms {
    pub fn total(&self) -> f64 {
        self.terms.iter().map(DkTerm::value).sum()
    }

    pub fn error_shape(&self) -> f64 {
        self.terms.iter().map(DkTerm::error_shape).sum()
    }
}

/// `a ∫_{b/a}^{b*/a} log|2 sin πx| dx`.
pub fn dk_main(a: u64, b: u64, b_star: u64) -> f64 {
    let af = a as f64;
    af * log_sin_integral(b as f64 / af, b_star as f64 / af)
}

/// `(π√3/2)(b − b*)^2 / a`.
pub fn dk_quad(a: u64, b: u64, b_star: u64) -> f64 {
    let d = b as f64 - b_star as f64;
    QUADRATIC_SLOPE * d * d / a as f64
}

pub fn d_k_terms(table: &ConvergentTable, digits: &OstrowskiDigits, k0: usize) -> DkTerms {
    let terms = (0..digits.len())
        .map(|k| {
            let a = table.a(k + 1);
            let b = digits.get(k);
            let b_star = 5 * a / 6;
            let regime = if k < k0 {
                Regime::Quadratic
            } else if b as f64 <= 0.99 * a as f64 {
                Regime::FormulaIi
            } else {
                Regime::OutOfRegime
            };
            DkTerm {
                k,
                b,
                b_star,
                a_next: a,
                main: dk_main(a, b, b_star),
                quad: dk_quad(a, b, b_star),
                regime,
            }
        })
        .collect();
    DkTerms { k0, terms }
}

/// Whether `log a_k / a_{k+1} ≤ T` for `k_0 ≤ k ≤ K`.
pub fn satisfies_growth(table: &ConvergentTable, k0: usize, k_top: usize, t: f64) -> bool {
    (k0.max(1)..=k_top).all(|k| (table.a(k) as f64).ln() / table.a(k + 1) as f64 <= t)
}

/// `log u_k(N)` given the prepared kernel for `k`; zero when `b_k = 0`.
pub fn log_u_k_with(kernel: &VkKernel, b_k: u64, delta: f64, eps: f64) -> Result<f64> {
    if b_k == 0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for b in 0..b_k {
        let x = b as f64 * delta + eps;
        if b >= 1 {
            acc += (2.0 * (PI * x).sin().abs()).ln();
        }
        acc += kernel.v(x)?;
    }
    let edge = b_k as f64 * delta + eps;
    if !(edge > 0.0) {
        return Err(Error::Pole(format!("boundary shift {edge} is not positive")));
    }
    Ok(acc + (2.0 * PI * edge).ln())
}

pub fn u_k_value(table: &ConvergentTable, digits: &OstrowskiDigits, k: usize, budget: u64) -> Result<f64> {
    let b_k = digits.get(k);
    if b_k == 0 {
        return Ok(0.0);
    }
    let eps = epsilon_profile(table, digits)?;
    let kernel = VkKernel::with_budget(table, k, budget)?;
    log_u_k_with(&kernel, b_k, table.delta_f64(k), eps.get_f64(k).expect("b_k ≥ 1"))
}

/// `log U_N` split into its parts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnBreakdown {
    pub k0: usize,
    /// `log u_k(N)`; zero below `k_0`.
    #[serde(with = "hexfloat::serde_vec_f64")]
    pub log_u: Vec<f64>,
    /// `E_k(N)`: the decomposition's `k`-th inner sum minus `log u_k(N)`.
    #[serde(with = "hexfloat::serde_vec_f64")]
    pub e: Vec<f64>,
    #[serde(with = "hexfloat::serde_f64")]
    pub log_un: f64,
    /// Decomposition factors with `k < k_0`.
    #[serde(with = "hexfloat::serde_f64")]
    pub below_k0: f64,
    /// `log P_N` from the decomposition.
    #[serde(with = "hexfloat::serde_f64")]
    pub log_pn: f64,
}

pub fn u_n_breakdown(table: &ConvergentTable, digits: &OstrowskiDigits, k0: usize, budget: u64) -> Result<UnBreakdown> {
    let eps = epsilon_profile(table, digits)?;
    let dec = decompose(table, digits)?;
    let len = digits.len();
    let mut log_u = vec![0.0; len];
    let mut e = vec![0.0; len];
    for k in k0..len {
        let b_k = digits.get(k);
        if b_k == 0 {
            continue;
        }
        let kernel = VkKernel::with_budget(table, k, budget)?;
        log_u[k] = log_u_k_with(&kernel, b_k, table.delta_f64(k), eps.get_f64(k).expect("b_k ≥ 1"))?;
        e[k] = dec.per_k[k] - log_u[k];
    }
    Ok(UnBreakdown {
        k0,
        log_un: log_u.iter().sum(),
        below_k0: dec.per_k[..k0.min(len)].iter().sum(),
        log_pn: dec.total,
        log_u,
        e,
    })
}

/// Main terms against an oracle value with a shaped budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredictionReport {
    pub label: String,
    #[serde(with = "hexfloat::serde_f64")]
    pub prediction: f64,
    #[serde(with = "hexfloat::serde_f64")]
    pub observed: f64,
    #[serde(with = "hexfloat::serde_f64")]
    pub error_budget: f64,
    /// Only `observed − prediction ≤ error_budget` is required.
    #[serde(default)]
    pub one_sided: bool,
    pub pass: bool,
}

impl PredictionReport {
    pub fn new(label: impl Into<String>, prediction: f64, observed: f64, error_budget: f64) -> Self {
        PredictionReport {
            label: label.into(),
            prediction,
            observed,
            error_budget,
            one_sided: false,
            pass: (prediction - observed).abs() <= error_budget,
        }
    }

    /// `observed ≤ bound`.
    pub fn upper(label: impl Into<String>, observed: f64, bound: f64) -> Self {
        PredictionReport {
            label: label.into(),
            prediction: 0.0,
            observed,
            error_budget: bound,
            one_sided: true,
            pass: observed <= bound,
        }
    }

    pub fn deviation(&self) -> f64 {
        (self.prediction - self.observed).abs()
    }
}

/// `(V/4π) Σ a_k + ½ Σ log a_k` over `k = 1..=K`.
pub fn pnstar_main(table: &ConvergentTable, k_top: usize) -> f64 {
    let v = vol41() / (4.0 * PI);
    (1..=k_top)
        .map(|k| {
            let a = table.a(k) as f64;
            v * a + 0.5 * a.ln()
        })
        .sum()
}

/// `Σ_{k=1}^{K} (1 + log(a_k a_{k+1}))/a_{k+1} + 1`.
pub fn pnstar_shape(table: &ConvergentTable, k_top: usize) -> f64 {
    1.0 + (1..=k_top)
        .map(|k| {
            let (a, b) = (table.a(k) as f64, table.a(k + 1) as f64);
            (1.0 + (a * b).ln()) / b
        })
        .sum::<f64>()
}

pub fn log_p_n_star(table: &ConvergentTable, k_top: usize) -> Result<f64> {
    let digits = ostrowski::n_star(table, k_top)?;
    let n = ostrowski::decode_u64(table, &digits)?;
    sudler::log_sudler(table, n)?.finite("P_{N*}")
}

pub fn pnstar_prediction(table: &ConvergentTable, k_top: usize, constant: f64) -> Result<PredictionReport> {
    Ok(PredictionReport::new(
        format!("log P_N* at K={k_top}"),
        pnstar_main(table, k_top),
        log_p_n_star(table, k_top)?,
        constant * pnstar_shape(table, k_top),
    ))
}

/// `(1/2c) Σ_{k=1}^{K} log(2a_k/(√3 c))`.
pub fn lcnorm_correction(table: &ConvergentTable, k_top: usize, c: f64) -> f64 {
    (1..=k_top)
        .map(|k| (2.0 * table.a(k) as f64 / (3f64.sqrt() * c)).ln())
        .sum::<f64>()
        / (2.0 * c)
}

/// The norm theorem's error sum plus one.
pub fn lcnorm_shape(table: &ConvergentTable, k_top: usize, c: f64) -> f64 {
    1.0 + (1..=k_top)
        .map(|k| {
            let a = table.a(k) as f64;
            let l = (a / c + 2.0).ln();
            l.sqrt() / (c * a).sqrt() + l.powf(1.5) / (c.powf(1.5) * a.sqrt()) + 1.0 / a
        })
        .sum::<f64>()
}

pub fn lcnorm_prediction(
    table: &ConvergentTable,
    scan: &ScanResult,
    c: f64,
    log_pn_star: f64,
    constant: f64,
) -> Result<PredictionReport> {
    if c < 0.01 {
        return Err(Error::Domain(format!("c = {c} must be at least 0.01")));
    }
    let observed = scan
        .norm(c)
        .ok_or_else(|| Error::Domain(format!("scan has no sum for c = {c}")))?;
    let k_top = scan.k;
    Ok(PredictionReport::new(
        format!("L^c norm at c={c}, K={k_top}"),
        log_pn_star + lcnorm_correction(table, k_top, c),
        observed,
        constant * lcnorm_shape(table, k_top, c),
    ))
}

/// One deviation per `N`: `log P_N − log P_{N*}` against `−Σ d_k(N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem1Sample {
    pub n: u64,
    pub observed: f64,
    pub prediction: f64,
    /// `Σ_k d_k` error shape + `Σ_{k=1}^{K} 1/a_k` + 1.
    pub shape: f64,
}

impl Theorem1Sample {
    pub fn report(&self, constant: f64) -> PredictionReport {
        PredictionReport::new(
            format!("N={}", self.n),
            self.prediction,
            self.observed,
            constant * self.shape,
        )
    }
}

pub fn theorem1_samples(table: &ConvergentTable, k_top: usize, k0: usize, sample: &[u64]) -> Result<Vec<Theorem1Sample>> {
    let star = log_p_n_star(table, k_top)?;
    let harmonic: f64 = (1..=k_top).map(|k| 1.0 / table.a(k) as f64).sum();
    sample
        .par_iter()
        .map(|&n| {
            let digits = ostrowski::encode_with_len(table, &n.into(), k_top)?;
            let dk = d_k_terms(table, &digits, k0);
            let observed = sudler::log_sudler(table, n)?.log_value - star;
            Ok(Theorem1Sample {
                n,
                observed,
                prediction: -dk.total(),
                shape: dk.error_shape() + harmonic + 1.0,
            })
        })
        .collect()
}

pub fn theorem1_check(
    table: &ConvergentTable,
    k_top: usize,
    k0: usize,
    sample: &[u64],
    constant: f64,
) -> Result<Vec<PredictionReport>> {
    Ok(theorem1_samples(table, k_top, k0, sample)?
        .iter()
        .map(|s| s.report(constant))
        .collect())
}

/// Least-squares slope `s` of `(D(+j) + D(−j))/2 ≈ s·j²/a`, where `D(±j)` is
/// the drop of `log P_N` when digit `m` of `N*` moves by `±j`.
pub fn quadratic_slope(table: &ConvergentTable, k_top: usize, m: usize, max_j: u64) -> Result<f64> {
    let star = ostrowski::n_star(table, k_top)?;
    let base = log_p_n_star(table, k_top)?;
    let a = table.a(m + 1);
    let b_star = star.get(m);
    let drop = |b: u64| -> Result<f64> {
        let moved = ostrowski::project(table, &star, m, b)?;
        let n = ostrowski::decode_u64(table, &moved)?;
        Ok(base - sudler::log_sudler(table, n)?.log_value)
    };
    let (mut num, mut den) = (0.0, 0.0);
    for j in 1..=max_j {
        let sym = 0.5 * (drop(b_star + j)? + drop(b_star - j)?);
        let x = (j * j) as f64 / a as f64;
        num += sym * x;
        den += x * x;
    }
    Ok(num / den)
}

/// `max_k |b̂_k − b_k*|` for the argmax digits of a scan.
pub fn argmax_distance(table: &ConvergentTable, scan: &ScanResult) -> u64 {
    scan.argmax_digits
        .iter()
        .enumerate()
        .map(|(k, &b)| b.abs_diff(5 * table.a(k + 1) / 6))
        .max()
        .unwrap_or(0)
}

/// Uniform sample of `count` integers in `[0, bound)` from a seeded generator.
pub fn sample_below(bound: u64, count: usize, seed: u64) -> Vec<u64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0..bound)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::parse_alpha;
    use crate::real::PrecisionConfig;

    fn table(spec: &str, k_max: usize) -> ConvergentTable {
        ConvergentTable::build(&parse_alpha(spec).unwrap(), k_max, PrecisionConfig::default()).unwrap()
    }

    #[test]
    fn volume_constants() {
        assert!((vol41() - 2.029_883_212_819_307).abs() < 1e-10);
        assert!((vol41() / (4.0 * PI) - 0.161533).abs() < 1e-6);
        assert!((vol_ratio() - 0.232_607_48).abs() < 1e-8);
        assert!((QUADRATIC_SLOPE - PI * 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn b2_integrals_match_closed_forms() {
        let b = bernoulli_b2_integrals().unwrap();
        assert!((b.shifted - b.shifted_closed).abs() < 1e-6, "{b:?}");
        assert!((b.plain - b.plain_closed).abs() < 1e-6, "{b:?}");
        assert!((b.plain_closed - 0.002_271_9).abs() < 1e-7);
    }

    #[test]
    fn penalty_ratio_minimum_at_origin() {
        let (y, v) = penalty_ratio_min(500);
        assert_eq!(y, 0.0);
        assert!((v - vol_ratio()).abs() < 1e-12);
    }

    #[test]
    fn dk_terms_vanish_at_star() {
        let t = table("[0;(50)]", 6);
        let star = ostrowski::n_star(&t, 3).unwrap();
        let dk = d_k_terms(&t, &star, 1);
        assert!(dk.terms.iter().all(|d| d.main == 0.0 && d.quad == 0.0));
        assert_eq!(dk.terms[0].regime, Regime::Quadratic);
        assert_eq!(dk.terms[1].regime, Regime::FormulaIi);
    }

    #[test]
    fn dk_main_zero_digit() {
        let v = dk_main(50, 0, 41);
        assert!((v - 50.0 * log_sin_integral(0.0, 0.82)).abs() < 1e-12);
        assert!(v > PENALTY_FLOOR * 41.0 * 41.0 / 50.0);
    }

    #[test]
    fn dk_main_and_quad_agree_near_star() {
        let a = 600;
        let b_star = 500;
        for j in [1u64, 3, 10] {
            let main = dk_main(a, b_star + j, b_star);
            let quad = dk_quad(a, b_star + j, b_star);
            let j = j as f64;
            let af = a as f64;
            assert!((main - quad).abs() < 3.0 * (j / af + j.powi(3) / (af * af)), "j = {j}");
        }
    }

    #[test]
    fn pnstar_prediction_matches_arithmetic() {
        let t = table("[0;(50)]", 6);
        let main = pnstar_main(&t, 3);
        assert!((main - 3.0 * (vol41() / (4.0 * PI) * 50.0 + 0.5 * 50f64.ln())).abs() < 1e-12);
        assert!((main - 30.10).abs() < 0.01);
    }

    #[test]
    fn u_k_vanishes_for_zero_digit() {
        let t = table("[0;(20)]", 6);
        let digits = OstrowskiDigits::new(&t, vec![3, 0, 7, 1]).unwrap();
        assert_eq!(u_k_value(&t, &digits, 1, 1 << 20).unwrap(), 0.0);
    }

    #[test]
    fn e_k_upper_envelope() {
        let t = table("[0;(20)]", 7);
        let bound = t.q_u64(4).unwrap();
        for n in sample_below(bound, 40, 7) {
            let digits = ostrowski::encode_with_len(&t, &n.into(), 4).unwrap();
            let br = u_n_breakdown(&t, &digits, 1, 1 << 24).unwrap();
            for k in 1..4 {
                let scale = t.a(k + 1) as f64 * t.q_u64(k).unwrap() as f64;
                assert!(br.e[k] * scale < 5.0, "N = {n}, k = {k}, E = {}", br.e[k]);
            }
            let direct = sudler::log_sudler(&t, n).unwrap().log_value;
            assert!((br.log_pn - direct).abs() < 1e-8 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn slope_recovered_at_large_quotient() {
        let t = table("[0;(50)]", 6);
        let s = quadratic_slope(&t, 3, 1, 5).unwrap();
        assert!((s / QUADRATIC_SLOPE - 1.0).abs() < 0.15, "slope {s}");
    }

    #[test]
    fn report_pass_flag() {
        assert!(PredictionReport::new("x", 1.0, 1.5, 0.5).pass);
        assert!(!PredictionReport::new("x", 1.0, 1.6, 0.5).pass);
        assert!(PredictionReport::upper("x", -7.0, 0.5).pass);
        assert!(!PredictionReport::upper("x", 0.6, 0.5).pass);
    }
}
