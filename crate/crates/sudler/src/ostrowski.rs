//! Ostrowski numeration `N = Σ b_k q_k` relative to a convergent table.

use dashu_int::UBig;
use serde::{Serialize, Serializer};

use crate::cf::ConvergentTable;
use crate::error::{Error, Result};
use crate::real::{self, Real};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(String),
}

/// Digits `b_0, …, b_{K-1}`, least significant first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OstrowskiDigits {
    digits: Vec<u64>,
    validity: Validity,
}

impl Serialize for OstrowskiDigits {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.digits.serialize(s)
    }
}

impl OstrowskiDigits {
    /// Wraps raw digits and records whether they obey the digit rules.
    pub fn new(table: &ConvergentTable, digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() || digits.len() > table.k_max() {
            return Err(Error::Domain(format!(
                "digit vector length {} must lie in 1..={}",
                digits.len(),
                table.k_max()
            )));
        }
        let validity = check(table, &digits);
        Ok(Self { digits, validity })
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn validity(&self) -> &Validity {
        &self.validity
    }

    pub fn is_valid(&self) -> bool {
        self.validity == Validity::Valid
    }

    pub fn get(&self, k: usize) -> u64 {
        self.digits.get(k).copied().unwrap_or(0)
    }

    fn require_valid(&self) -> Result<()> {
        match &self.validity {
            Validity::Valid => Ok(()),
            Validity::Invalid(why) => Err(Error::InvalidDigits(why.clone())),
        }
    }
}

fn check(table: &ConvergentTable, digits: &[u64]) -> Validity {
    for (k, &b) in digits.iter().enumerate() {
        let a = table.a(k + 1);
        if k == 0 && b >= a {
            return Validity::Invalid(format!("b_0 = {b} must be below a_1 = {a}"));
        }
        if b > a {
            return Validity::Invalid(format!("b_{k} = {b} exceeds a_{} = {a}", k + 1));
        }
        if k > 0 && b == a && digits[k - 1] != 0 {
            return Validity::Invalid(format!(
                "b_{k} = a_{} forces b_{} = 0, found {}",
                k + 1,
                k - 1,
                digits[k - 1]
            ));
        }
    }
    Validity::Valid
}

/// Greedy expansion with the shortest length `K ≥ 1` such that `N < q_K`.
pub fn encode(table: &ConvergentTable, n: &UBig) -> Result<OstrowskiDigits> {
    let k_max = table.k_max();
    if n >= table.q(k_max) {
        return Err(Error::OutOfRange {
            n: n.to_string(),
            bound: table.q(k_max).to_string(),
        });
    }
    let len = (1..=k_max).find(|&k| n < table.q(k)).expect("bounded by q_{K_max}");
    encode_with_len(table, n, len)
}

/// Expansion padded with leading zeros to exactly `len` digits.
pub fn encode_with_len(table: &ConvergentTable, n: &UBig, len: usize) -> Result<OstrowskiDigits> {
    if len == 0 || len > table.k_max() || n >= table.q(len) {
        return Err(Error::OutOfRange {
            n: n.to_string(),
            bound: table.q(len.min(table.k_max())).to_string(),
        });
    }
    let mut rem = n.clone();
    let mut digits = vec![0u64; len];
    for k in (0..len).rev() {
        let q = table.q(k);
        let b = &rem / q;
        rem -= &b * q;
        digits[k] = u64::try_from(b).expect("digit bounded by a partial quotient");
    }
    debug_assert_eq!(rem, UBig::ZERO);
    let out = OstrowskiDigits::new(table, digits)?;
    debug_assert!(out.is_valid());
    Ok(out)
}

pub fn decode(table: &ConvergentTable, digits: &OstrowskiDigits) -> Result<UBig> {
    digits.require_valid()?;
    Ok(digits
        .digits
        .iter()
        .enumerate()
        .map(|(k, &b)| UBig::from(b) * table.q(k))
        .sum())
}

/// Convenience for `decode` when `N` is known to fit a machine word.
pub fn decode_u64(table: &ConvergentTable, digits: &OstrowskiDigits) -> Result<u64> {
    let n = decode(table, digits)?;
    u64::try_from(n.clone()).map_err(|_| Error::Budget {
        what: "N".into(),
        value: n.to_string(),
        limit: u64::MAX.to_string(),
    })
}

/// `b_k* = ⌊5 a_{k+1} / 6⌋` for `k < K`.
pub fn n_star(table: &ConvergentTable, len: usize) -> Result<OstrowskiDigits> {
    let digits = (0..len).map(|k| 5 * table.a(k + 1) / 6).collect();
    OstrowskiDigits::new(table, digits)
}

/// Regularized digit bound: `0` when `a_next = 2`, else `⌊(1 − δ_T) a_next⌋`.
pub fn b_double_star(a_next: u64, delta_t: f64) -> u64 {
    if a_next == 2 {
        0
    } else {
        ((1.0 - delta_t) * a_next as f64).floor() as u64
    }
}

/// `min{1/(4π e^{2T}), 1/100}`.
pub fn default_delta_t(t: f64) -> f64 {
    (1.0 / (4.0 * std::f64::consts::PI * (2.0 * t).exp())).min(0.01)
}

/// Replaces digit `m` by `value`; a carry-rule violation is an error.
pub fn project(
    table: &ConvergentTable,
    digits: &OstrowskiDigits,
    m: usize,
    value: u64,
) -> Result<OstrowskiDigits> {
    if m >= digits.len() {
        return Err(Error::Domain(format!("index {m} outside 0..{}", digits.len())));
    }
    if value > table.a(m + 1) {
        return Err(Error::InvalidDigits(format!(
            "replacement {value} exceeds a_{} = {}",
            m + 1,
            table.a(m + 1)
        )));
    }
    let mut next = digits.digits.clone();
    next[m] = value;
    let out = OstrowskiDigits::new(table, next)?;
    out.require_valid()?;
    Ok(out)
}

/// All valid digit vectors of length `len`, in increasing order of the value.
pub fn enumerate_digits(table: &ConvergentTable, len: usize) -> Vec<Vec<u64>> {
    fn rec(table: &ConvergentTable, k: usize, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        // Digits are filled from the most significant end.
        if k == usize::MAX {
            let mut v = prefix.clone();
            v.reverse();
            out.push(v);
            return;
        }
        let a = table.a(k + 1);
        let hi = if k == 0 { a - 1 } else { a };
        let forced_zero = prefix.last().is_some_and(|&upper| {
            let upper_k = k + 1;
            upper == table.a(upper_k + 1)
        });
        let hi = if forced_zero { 0 } else { hi };
        for b in 0..=hi {
            prefix.push(b);
            rec(table, k.wrapping_sub(1), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if len > 0 {
        rec(table, len - 1, &mut Vec::new(), &mut out);
    }
    out
}

/// `ε_k(N) = q_k Σ_{ℓ>k} (−1)^{k+ℓ} b_ℓ θ_ℓ`, defined where `b_k ≥ 1`.
#[derive(Debug, Clone)]
pub struct EpsilonProfile {
    eps: Vec<Option<Real>>,
    eps_f64: Vec<Option<f64>>,
}

impl EpsilonProfile {
    pub fn get(&self, k: usize) -> Option<&Real> {
        self.eps.get(k).and_then(Option::as_ref)
    }

    pub fn get_f64(&self, k: usize) -> Option<f64> {
        self.eps_f64.get(k).copied().flatten()
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }
}

pub fn epsilon_profile(table: &ConvergentTable, digits: &OstrowskiDigits) -> Result<EpsilonProfile> {
    digits.require_valid()?;
    let bits = table.bits();
    let len = digits.len();
    let mut eps = vec![None; len];
    // tail = Σ_{ℓ>k} (−1)^ℓ b_ℓ θ_ℓ
    let mut tail = real::from_u64(0, bits);
    for k in (0..len).rev() {
        let b = digits.get(k);
        if b >= 1 {
            let scaled = tail.clone() * real::from_uint(table.q(k), bits);
            eps[k] = Some(if k % 2 == 0 { scaled } else { -scaled });
        }
        if b >= 1 {
            let term = real::from_u64(b, bits) * table.theta(k).clone();
            tail = if k % 2 == 0 { tail + term } else { tail - term };
        }
    }
    let eps_f64 = eps.iter().map(|e| e.as_ref().map(real::to_f64)).collect();
    Ok(EpsilonProfile { eps, eps_f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::parse_alpha;
    use crate::real::PrecisionConfig;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn table(spec: &str, k: usize) -> ConvergentTable {
        ConvergentTable::build(&parse_alpha(spec).unwrap(), k, PrecisionConfig::default()).unwrap()
    }

    /// Greedy oracle on plain integers.
    fn greedy(q: &[u64], mut n: u64, len: usize) -> Vec<u64> {
        let mut out = vec![0; len];
        for k in (0..len).rev() {
            out[k] = n / q[k];
            n %= q[k];
        }
        out
    }

    #[test]
    fn known_expansions() {
        let t = table("[0;(2)]", 6);
        assert_eq!(encode(&t, &UBig::from(8u8)).unwrap().digits(), &[1, 1, 1]);
        let g = table("golden", 8);
        assert_eq!(encode(&g, &UBig::from(4u8)).unwrap().digits(), &[0, 1, 0, 1]);
        assert_eq!(encode(&g, &UBig::ZERO).unwrap().digits(), &[0]);
        let six = table("[0;(6)]", 4);
        let star = n_star(&six, 3).unwrap();
        assert_eq!(star.digits(), &[5, 5, 5]);
        assert_eq!(decode(&six, &star).unwrap(), UBig::from(220u8));
        let fifty = table("[0;(50)]", 5);
        assert_eq!(n_star(&fifty, 4).unwrap().digits(), &[41, 41, 41, 41]);
    }

    #[test]
    fn round_trip_and_greedy_agree() {
        for spec in ["golden", "[0;(2)]", "[0;(5)]", "[0;2,(1,4)]"] {
            let t = table(spec, 8);
            let q: Vec<u64> = (0..=8).map(|k| t.q_u64(k).unwrap()).collect();
            for n in 0..q[6] {
                let d = encode(&t, &UBig::from(n)).unwrap();
                assert_eq!(d.digits(), greedy(&q, n, d.len()).as_slice());
                assert_eq!(decode_u64(&t, &d).unwrap(), n, "{spec} N={n}");
            }
        }
    }

    #[test]
    fn enumeration_is_a_bijection_onto_the_initial_segment() {
        for spec in ["golden", "[0;(3)]", "[0;2,(1,4)]"] {
            let t = table(spec, 6);
            for len in 1..=5 {
                let all = enumerate_digits(&t, len);
                let mut values: Vec<u64> = all
                    .into_iter()
                    .map(|d| decode_u64(&t, &OstrowskiDigits::new(&t, d).unwrap()).unwrap())
                    .collect();
                values.sort_unstable();
                let expect: Vec<u64> = (0..t.q_u64(len).unwrap()).collect();
                assert_eq!(values, expect, "{spec} K={len}");
            }
        }
    }

    #[test]
    fn double_star_cases() {
        assert_eq!(b_double_star(2, 0.3), 0);
        assert_eq!(b_double_star(100, 0.01), 99);
        assert_eq!(b_double_star(1, 0.01), 0);
        assert!((default_delta_t(2.0) - 1.0 / (4.0 * std::f64::consts::PI * 4f64.exp())).abs() < 1e-15);
        assert_eq!(default_delta_t(1.0), 0.01);
        assert_eq!(default_delta_t(0.0), 0.01);
    }

    #[test]
    fn projection_replaces_or_refuses() {
        let t = table("[0;(50)]", 5);
        let star = n_star(&t, 4).unwrap();
        assert_eq!(project(&t, &star, 2, 41).unwrap(), star);
        assert_eq!(project(&t, &star, 2, 0).unwrap().digits(), &[41, 41, 0, 41]);
        assert!(matches!(project(&t, &star, 2, 50), Err(Error::InvalidDigits(_))));
        assert!(project(&t, &star, 0, 50).is_err());
    }

    #[test]
    fn epsilon_bounds_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in ["golden", "[0;(2)]", "[0;(5)]", "[0;2,(1,4)]", "[0;(50)]"] {
            let t = table(spec, 12);
            let top = t.q_u64(11).unwrap();
            for _ in 0..2000 {
                let n = rng.gen_range(0..top);
                let d = encode(&t, &UBig::from(n)).unwrap();
                let eps = epsilon_profile(&t, &d).unwrap();
                for k in 0..d.len() {
                    match eps.get_f64(k) {
                        None => assert_eq!(d.get(k), 0),
                        Some(e) => {
                            let lo = -t.delta_f64(k) + t.eta_f64(k);
                            assert!(lo > -1.0);
                            assert!(e >= lo - 1e-15 && e <= t.eta_f64(k) + 1e-15, "{spec} N={n} k={k}");
                            assert!(t.eta_f64(k) < 0.5);
                        }
                    }
                }
                if d.get(d.len() - 1) >= 1 {
                    assert!(real::is_zero(eps.get(d.len() - 1).unwrap()));
                }
            }
        }
    }

    #[test]
    fn strengthened_lower_bound_under_digit_hypothesis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gap = 0.1;
        for spec in ["[0;(5)]", "[0;(20)]", "[0;2,(1,4)]"] {
            let t = table(spec, 10);
            let top = t.q_u64(9).unwrap();
            for _ in 0..3000 {
                let d = encode(&t, &UBig::from(rng.gen_range(0..top))).unwrap();
                let eps = epsilon_profile(&t, &d).unwrap();
                for k in 0..d.len().saturating_sub(1) {
                    let (Some(e), next) = (eps.get_f64(k), d.get(k + 1)) else { continue };
                    if (next as f64) <= (1.0 - gap) * t.a(k + 2) as f64 {
                        assert!(e >= -(1.0 - gap / 3.0) * t.delta_f64(k) - 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn star_epsilon_ratio_tends_to_minus_five_sixths() {
        let t = table("[0;(60)]", 6);
        let star = n_star(&t, 6).unwrap();
        let eps = epsilon_profile(&t, &star).unwrap();
        for k in 0..5 {
            let ratio = eps.get_f64(k).unwrap() / t.delta_f64(k);
            assert!((ratio + 5.0 / 6.0).abs() < 2.0 / 60.0, "k={k} ratio={ratio}");
        }
    }
}
