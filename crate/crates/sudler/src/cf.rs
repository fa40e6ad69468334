//! Convergent tables: exact `p_k/q_k` plus high-precision `δ_k`, `η_k`, `θ_k`.
//!
//! `δ_k` comes from the tail identity `1/δ_k = β_{k+1} + γ_k` where
//! `β_{k+1} = [a_{k+1}; a_{k+2}, …]` and `γ_k = q_{k-1}/q_k`. Periodic tails are
//! exact surds, rational tails exact fractions, rule tails truncated
//! continued fractions with a certified truncation bound.

use dashu_int::ops::BitTest;
use dashu_int::{IBig, UBig};
use serde::Serialize;

use crate::alpha::AlphaSpec;
use crate::error::{Error, Result};
use crate::hexfloat;
use crate::phase::Phase;
use crate::real::{self, PrecisionConfig, Real};
use crate::surd::{segment_matrix, QuadSurd};

/// Value of a forward tail `β_j`.
#[derive(Debug, Clone)]
enum Tail {
    Surd(QuadSurd),
    Ratio(IBig, IBig),
    Approx(Real),
    Infinite,
}

#[derive(Debug, Clone)]
pub struct ConvergentTable {
    alpha: AlphaSpec,
    cfg: PrecisionConfig,
    k_max: usize,
    /// `a[k]` for `1 ≤ k ≤ k_max + 1` when available; `a[0]` is unused.
    a: Vec<u64>,
    p: Vec<IBig>,
    q: Vec<UBig>,
    theta: Vec<Real>,
    delta: Vec<Real>,
    eta: Vec<Real>,
    theta_f: Vec<f64>,
    delta_f: Vec<f64>,
    eta_f: Vec<f64>,
    alpha_value: Real,
    alpha_phase: Phase,
}

impl ConvergentTable {
    pub fn build(alpha: &AlphaSpec, k_max: usize, cfg: PrecisionConfig) -> Result<Self> {
        cfg.validate()?;
        if k_max < 1 {
            return Err(Error::Domain("K_max must be at least 1".into()));
        }
        let finite = alpha.finite_len();
        if let Some(n) = finite {
            if k_max > n {
                return Err(Error::RationalExhausted {
                    requested: k_max,
                    last: n,
                });
            }
        }
        let bits = cfg.working_bits;
        // Quotients a_1..=a_{k_max+1} (a rational spec may stop at a_{k_max}).
        let mut a = vec![0u64];
        for k in 1..=k_max + 1 {
            match alpha.quotient(k)? {
                Some(v) => a.push(v),
                None => break,
            }
        }
        let last = a.len() - 1;
        let mut p = vec![IBig::from(alpha.integer_part)];
        let mut q = vec![UBig::ONE];
        let (mut p_prev, mut q_prev) = (IBig::ONE, UBig::ZERO);
        for &ak in &a[1..] {
            let pk = IBig::from(ak) * p.last().unwrap() + &p_prev;
            let qk = UBig::from(ak) * q.last().unwrap() + &q_prev;
            p_prev = p.last().unwrap().clone();
            q_prev = q.last().unwrap().clone();
            p.push(pk);
            q.push(qk);
        }

        let top = (k_max + 1).min(last.max(k_max));
        let mut delta = Vec::with_capacity(top + 1);
        for k in 0..=top {
            let gamma_num = if k == 0 {
                IBig::ZERO
            } else {
                IBig::from(q[k - 1].clone())
            };
            let gamma_den = IBig::from(q[k].clone());
            let tail = tail_value(alpha, &a, k + 1, &cfg)?;
            delta.push(delta_from_tail(&tail, &gamma_num, &gamma_den, bits));
        }
        let mut theta = Vec::with_capacity(k_max + 1);
        let mut eta = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            theta.push(delta[k].clone() / real::from_uint(&q[k], bits));
            let e = if k + 1 < delta.len() && k + 1 < q.len() {
                delta[k + 1].clone() * real::from_uint(&q[k], bits)
                    / real::from_uint(&q[k + 1], bits)
            } else {
                real::from_u64(0, bits)
            };
            eta.push(e);
        }
        delta.truncate(k_max + 1);

        let beta1 = tail_value(alpha, &a, 1, &cfg)?;
        let frac = match &beta1 {
            Tail::Surd(s) => s.recip().to_real(bits),
            Tail::Ratio(n, d) => real::ratio(d, n, bits),
            Tail::Approx(r) => real::from_u64(1, bits) / r.clone(),
            Tail::Infinite => real::from_u64(0, bits),
        };
        let alpha_value = frac.clone() + real::from_int(&IBig::from(alpha.integer_part), bits);
        let alpha_phase = match &beta1 {
            Tail::Ratio(n, d) => Phase::from_ratio(d, &UBig::try_from(n.clone()).unwrap(), cfg.phase_limbs()),
            _ => Phase::from_real(&frac, cfg.phase_limbs()),
        };
        let to_f = |v: &Vec<Real>| v.iter().map(real::to_f64).collect::<Vec<_>>();
        Ok(Self {
            alpha: alpha.clone(),
            cfg,
            k_max,
            theta_f: to_f(&theta),
            delta_f: to_f(&delta),
            eta_f: to_f(&eta),
            a,
            p,
            q,
            theta,
            delta,
            eta,
            alpha_value,
            alpha_phase,
        })
    }

    pub fn alpha(&self) -> &AlphaSpec {
        &self.alpha
    }

    pub fn cfg(&self) -> &PrecisionConfig {
        &self.cfg
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn bits(&self) -> usize {
        self.cfg.working_bits
    }

    /// `a_k` for `1 ≤ k ≤ k_max + 1` (the last only when it exists).
    pub fn a(&self, k: usize) -> u64 {
        assert!(k >= 1, "a_0 is the integer part; see alpha().integer_part");
        self.a[k]
    }

    pub fn try_a(&self, k: usize) -> Option<u64> {
        (k >= 1).then(|| self.a.get(k).copied()).flatten()
    }

    pub fn p(&self, k: usize) -> &IBig {
        &self.p[k]
    }

    pub fn q(&self, k: usize) -> &UBig {
        &self.q[k]
    }

    pub fn q_u64(&self, k: usize) -> Option<u64> {
        u64::try_from(self.q.get(k)?.clone()).ok()
    }

    /// Highest index with a stored denominator (`k_max` or `k_max + 1`).
    pub fn q_len(&self) -> usize {
        self.q.len()
    }

    /// `(-1)^k (q_k α − p_k)`; equals `‖q_k α‖` except at `k = 0` with `a_1 = 1`.
    pub fn theta(&self, k: usize) -> &Real {
        &self.theta[k]
    }

    /// `q_k θ_k`.
    pub fn delta(&self, k: usize) -> &Real {
        &self.delta[k]
    }

    /// `q_k θ_{k+1}`.
    pub fn eta(&self, k: usize) -> &Real {
        &self.eta[k]
    }

    pub fn theta_f64(&self, k: usize) -> f64 {
        self.theta_f[k]
    }

    pub fn delta_f64(&self, k: usize) -> f64 {
        self.delta_f[k]
    }

    pub fn eta_f64(&self, k: usize) -> f64 {
        self.eta_f[k]
    }

    pub fn alpha_value(&self) -> &Real {
        &self.alpha_value
    }

    /// `{α}` as a fixed-point phase.
    pub fn alpha_phase(&self) -> &Phase {
        &self.alpha_phase
    }

    /// `q_{k+1} p_k − q_k p_{k+1}`, exact.
    pub fn determinant(&self, k: usize) -> IBig {
        IBig::from(self.q[k + 1].clone()) * &self.p[k] - IBig::from(self.q[k].clone()) * &self.p[k + 1]
    }

    fn check_frac_budget(&self, n: &UBig) -> Result<()> {
        let bound = &self.q[self.k_max];
        if n >= bound {
            return Err(Error::OutOfRange {
                n: n.to_string(),
                bound: bound.to_string(),
            });
        }
        if self.bits() <= n.bit_len() + 64 {
            return Err(Error::PrecisionBudget(format!(
                "working_bits {} must exceed bit-length({n}) + 64",
                self.bits()
            )));
        }
        Ok(())
    }

    /// `{nα}` as a phase, exact multiple of the stored `{α}`.
    pub fn frac_phase(&self, n: &UBig) -> Result<Phase> {
        self.check_frac_budget(n)?;
        Ok(self.alpha_phase.mul_ubig(n))
    }

    /// `{nα} ∈ [0, 1)`.
    pub fn frac_part(&self, n: &UBig) -> Result<Real> {
        Ok(self.frac_phase(n)?.to_real(self.bits()))
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            schema_version: crate::SCHEMA_VERSION,
            alpha: self.alpha.render(),
            k_max: self.k_max,
            working_bits: self.cfg.working_bits,
            rows: (0..=self.k_max)
                .map(|k| TableRow {
                    k,
                    a: if k == 0 {
                        self.alpha.integer_part.to_string()
                    } else {
                        self.a[k].to_string()
                    },
                    p: self.p[k].to_string(),
                    q: self.q[k].to_string(),
                    theta: hexfloat::format_real(&self.theta[k]),
                    delta: hexfloat::format_real(&self.delta[k]),
                    eta: hexfloat::format_real(&self.eta[k]),
                })
                .collect(),
            alpha_value: hexfloat::format_real(&self.alpha_value),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub k: usize,
    pub a: String,
    pub p: String,
    pub q: String,
    pub theta: String,
    pub delta: String,
    pub eta: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableJson {
    pub schema_version: u32,
    pub alpha: String,
    pub k_max: usize,
    pub working_bits: usize,
    pub rows: Vec<TableRow>,
    pub alpha_value: String,
}

/// `β_j = [a_j; a_{j+1}, …]` for `j ≥ 1`.
fn tail_value(alpha: &AlphaSpec, a: &[u64], j: usize, cfg: &PrecisionConfig) -> Result<Tail> {
    if let Some(n) = alpha.finite_len() {
        if j > n {
            return Ok(Tail::Infinite);
        }
        let (num, den) = alpha.preperiod[j - 1..]
            .iter()
            .rev()
            .fold((IBig::ONE, IBig::ZERO), |(num, den), &c| {
                (IBig::from(c) * &num + &den, num)
            });
        return Ok(Tail::Ratio(num, den));
    }
    if let Some(period) = &alpha.period {
        let k0 = alpha.preperiod.len();
        if j > k0 {
            let phase = (j - k0 - 1) % period.len();
            let rotated: Vec<u64> = period[phase..].iter().chain(&period[..phase]).copied().collect();
            return Ok(Tail::Surd(QuadSurd::purely_periodic(&rotated)));
        }
        let rho = QuadSurd::purely_periodic(period);
        let m = segment_matrix(&alpha.preperiod[j - 1..]);
        return Ok(Tail::Surd(rho.mobius(&m)));
    }
    truncated_tail(alpha, a, j, cfg).map(Tail::Approx)
}

/// Rule-generated tail, truncated once `1/(Q_{m-1} Q_m) < 2^-(bits+16)`.
fn truncated_tail(alpha: &AlphaSpec, a: &[u64], j: usize, cfg: &PrecisionConfig) -> Result<Real> {
    let bits = cfg.working_bits;
    let quotient = |k: usize| -> Result<u64> {
        match a.get(k) {
            Some(v) if k >= 1 => Ok(*v),
            _ => alpha
                .quotient(k)?
                .ok_or_else(|| Error::Domain("rule tail ended".into())),
        }
    };
    let target = bits + 16;
    let (mut q_prev, mut q_cur) = (UBig::ONE, UBig::from(quotient(j + 1)?));
    let mut depth = 1;
    let mut certified = q_prev.bit_len() + q_cur.bit_len() - 2;
    while certified < target && depth < cfg.tail_depth {
        depth += 1;
        let next = UBig::from(quotient(j + depth)?) * &q_cur + &q_prev;
        q_prev = q_cur;
        q_cur = next;
        certified = q_prev.bit_len() + q_cur.bit_len() - 2;
    }
    if certified < bits / 2 {
        return Err(Error::PrecisionBudget(format!(
            "tail at index {j} certified to 2^-{certified} after {depth} quotients, need 2^-{}",
            bits / 2
        )));
    }
    let guard = bits + 64;
    let mut x = real::from_u64(quotient(j + depth - 1)?, guard);
    for i in (j..j + depth - 1).rev() {
        x = real::from_u64(quotient(i)?, guard) + real::from_u64(1, guard) / x;
    }
    Ok(real::with_bits(x, bits))
}

fn delta_from_tail(tail: &Tail, g_num: &IBig, g_den: &IBig, bits: usize) -> Real {
    match tail {
        Tail::Surd(s) => s.add_ratio(g_num, g_den).recip().to_real(bits),
        Tail::Ratio(n, d) => {
            // 1/(n/d + g_num/g_den) = d·g_den / (n·g_den + g_num·d)
            real::ratio(&(d * g_den), &(n * g_den + g_num * d), bits)
        }
        Tail::Approx(b) => {
            let g = real::ratio(g_num, g_den, bits + 64);
            real::with_bits(real::from_u64(1, bits + 64) / (b.clone() + g), bits)
        }
        Tail::Infinite => real::from_u64(0, bits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::{parse_alpha, DigitRule};

    fn table(spec: &str, k: usize) -> ConvergentTable {
        ConvergentTable::build(&parse_alpha(spec).unwrap(), k, PrecisionConfig::default()).unwrap()
    }

    #[test]
    fn convergents_of_golden_are_fibonacci() {
        let t = table("golden", 10);
        let q: Vec<u64> = (0..=10).map(|k| t.q_u64(k).unwrap()).collect();
        assert_eq!(q, vec![1, 1, 2, 3, 5, 8, 13, 21, 34, 55, 89]);
        assert_eq!(t.p(0), &IBig::from(1));
        assert_eq!(t.p(1), &IBig::from(2));
    }

    #[test]
    fn determinant_alternates() {
        for spec in ["golden", "[0;(2)]", "[0;(5)]", "[0;2,(1,4)]", "rule:powers-of-two"] {
            let t = table(spec, 20);
            for k in 0..20 {
                let expect = if (k + 1) % 2 == 0 { 1 } else { -1 };
                assert_eq!(t.determinant(k), IBig::from(expect), "{spec} k={k}");
            }
        }
    }

    #[test]
    fn delta_limit_for_constant_quotients() {
        for a in [1u64, 2, 5, 15, 50] {
            let t = ConvergentTable::build(&AlphaSpec::constant(a), 12, PrecisionConfig::default())
                .unwrap();
            let af = a as f64;
            let c = 1.0 / (af * af + 4.0).sqrt();
            let mut prev = f64::INFINITY;
            for k in 1..=12 {
                let err = (t.delta_f64(k) - c).abs();
                let qk = real::to_f64(&real::from_uint(t.q(k), 64));
                assert!(err < 1.0 / qk, "a={a} k={k}");
                assert!(err <= prev || err < 1e-15);
                prev = err;
            }
        }
    }

    #[test]
    fn delta_bounds_and_eta_identity() {
        for spec in ["golden", "[0;(2)]", "[0;2,(1,4)]", "[3;1,1,7,(2,9,4)]", "rule:naturals"] {
            let t = table(spec, 15);
            for k in 0..15 {
                let a1 = t.a(k + 1) as f64;
                let d = t.delta_f64(k);
                assert!(d >= 1.0 / (a1 + 2.0) - 1e-15 && d <= 1.0 / a1 + 1e-15, "{spec} k={k}");
                // δ_k q_{k+1}/q_k + η_k = 1
                let lhs = t.delta(k).clone() * real::from_uint(t.q(k + 1), 256)
                    / real::from_uint(t.q(k), 256)
                    + t.eta(k).clone();
                let err = real::to_f64(&(lhs - real::from_u64(1, 256))).abs();
                assert!(err < 2f64.powi(8 - 256), "{spec} k={k} err={err:e}");
                if k > 0 {
                    assert!(t.theta(k) < t.theta(k - 1));
                }
            }
        }
    }

    #[test]
    fn theta_matches_convergent_error() {
        let t = table("[0;2,(1,4)]", 12);
        for k in 0..12 {
            let qa = real::from_uint(t.q(k), 512) * t.alpha_value().clone();
            let diff = qa - real::from_int(t.p(k), 512);
            let signed = if k % 2 == 0 { diff } else { -diff };
            let rel = real::to_f64(&((signed - t.theta(k).clone()) / t.theta(k).clone()));
            assert!(rel.abs() < 1e-60, "k={k}");
        }
    }

    #[test]
    fn golden_fractional_part() {
        let t = table("golden", 10);
        let f = t.frac_part(&UBig::ONE).unwrap();
        assert!((real::to_f64(&f) - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-16);
        assert!(real::is_zero(&t.frac_part(&UBig::ZERO).unwrap()));
        for k in 1..8 {
            let f = real::to_f64(&t.frac_part(t.q(k)).unwrap());
            let th = t.theta_f64(k);
            let expect = if k % 2 == 0 { th } else { 1.0 - th };
            assert!((f - expect).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn rational_tables_stop_at_last_convergent() {
        let r = parse_alpha("[0;3,4,2]").unwrap();
        assert!(matches!(
            ConvergentTable::build(&r, 4, PrecisionConfig::default()),
            Err(Error::RationalExhausted { .. })
        ));
        let t = ConvergentTable::build(&r, 3, PrecisionConfig::default()).unwrap();
        assert_eq!(t.q_u64(3), Some(29));
        assert!(real::is_zero(t.delta(3)));
        assert_eq!(t.p(3), &IBig::from(9));
        assert!((real::to_f64(t.alpha_value()) - 9.0 / 29.0).abs() < 1e-17);
    }

    #[test]
    fn frac_part_rejects_out_of_range() {
        let t = table("golden", 5);
        assert!(t.frac_part(&UBig::from(8u8)).is_err());
        let narrow = ConvergentTable::build(
            &parse_alpha("golden").unwrap(),
            120,
            PrecisionConfig::new(64, 64).unwrap(),
        )
        .unwrap();
        assert!(narrow.frac_part(&UBig::from(3u8)).is_err());
    }

    #[test]
    fn rule_tails_are_certified() {
        let t = ConvergentTable::build(
            &AlphaSpec::from_rule(DigitRule::PowersOfTwo),
            10,
            PrecisionConfig::default(),
        )
        .unwrap();
        assert_eq!(t.a(3), 8);
        let shallow = ConvergentTable::build(
            &AlphaSpec::from_rule(DigitRule::Naturals),
            3,
            PrecisionConfig::new(256, 4).unwrap(),
        );
        assert!(matches!(shallow, Err(Error::PrecisionBudget(_))));
    }
}
