//! α specifications: finite, eventually periodic, or rule-generated
//! continued fractions.
//!
//! Grammar (whitespace is ignored everywhere):
//!
//! ```text
//! spec  := alias | "rule:" name | "[" int ( ";" items? )? "]"
//! items := pq ( "," pq )* ( "," period )? | period
//! period:= "(" pq ( "," pq )* ")"
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError, Result};

/// Named generators for well-approximable test numbers (`a_0 = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DigitRule {
    /// `a_k = 2^k`.
    PowersOfTwo,
    /// `a_k = k`.
    Naturals,
}

impl DigitRule {
    pub fn name(self) -> &'static str {
        match self {
            DigitRule::PowersOfTwo => "powers-of-two",
            DigitRule::Naturals => "naturals",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        match name {
            "powers-of-two" => Some(DigitRule::PowersOfTwo),
            "naturals" => Some(DigitRule::Naturals),
            _ => None,
        }
    }

    pub fn quotient(self, k: usize) -> Result<u64> {
        match self {
            DigitRule::PowersOfTwo => {
                if k >= 64 {
                    Err(Error::QuotientOverflow(k))
                } else {
                    Ok(1u64 << k)
                }
            }
            DigitRule::Naturals => Ok(k as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphaSpec {
    pub integer_part: i64,
    pub preperiod: Vec<u64>,
    pub period: Option<Vec<u64>>,
    pub rule: Option<DigitRule>,
}

impl AlphaSpec {
    pub fn periodic(integer_part: i64, preperiod: Vec<u64>, period: Vec<u64>) -> Self {
        assert!(!period.is_empty(), "period must be non-empty");
        Self {
            integer_part,
            preperiod,
            period: Some(period),
            rule: None,
        }
    }

    /// `[0; (a)]`.
    pub fn constant(a: u64) -> Self {
        Self::periodic(0, vec![], vec![a])
    }

    pub fn rational(integer_part: i64, quotients: Vec<u64>) -> Self {
        Self {
            integer_part,
            preperiod: quotients,
            period: None,
            rule: None,
        }
    }

    pub fn from_rule(rule: DigitRule) -> Self {
        Self {
            integer_part: 0,
            preperiod: vec![],
            period: None,
            rule: Some(rule),
        }
    }

    pub fn is_rational(&self) -> bool {
        self.period.is_none() && self.rule.is_none()
    }

    pub fn is_periodic(&self) -> bool {
        self.period.is_some()
    }

    /// Number of partial quotients `a_1, a_2, …` of a rational spec.
    pub fn finite_len(&self) -> Option<usize> {
        self.is_rational().then_some(self.preperiod.len())
    }

    /// `a_k` for `k ≥ 1`; `None` past the end of a rational spec.
    pub fn quotient(&self, k: usize) -> Result<Option<u64>> {
        assert!(k >= 1, "partial quotients are indexed from 1");
        if k <= self.preperiod.len() {
            return Ok(Some(self.preperiod[k - 1]));
        }
        let j = k - self.preperiod.len() - 1;
        if let Some(period) = &self.period {
            return Ok(Some(period[j % period.len()]));
        }
        if let Some(rule) = self.rule {
            return rule.quotient(k).map(Some);
        }
        Ok(None)
    }

    pub fn render(&self) -> String {
        self.to_string()
    }

    fn validate(&self) -> Result<()> {
        if self.preperiod.contains(&0) {
            return Err(Error::Domain("partial quotients must be positive".into()));
        }
        if let Some(p) = &self.period {
            if p.is_empty() || p.contains(&0) {
                return Err(Error::Domain("period must be non-empty and positive".into()));
            }
            if self.rule.is_some() {
                return Err(Error::Domain("rule and period are exclusive".into()));
            }
        }
        Ok(())
    }
}

impl fmt::Display for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(rule) = self.rule {
            if self.integer_part == 0 && self.preperiod.is_empty() {
                return write!(f, "rule:{}", rule.name());
            }
        }
        write!(f, "[{}", self.integer_part)?;
        if self.preperiod.is_empty() && self.period.is_none() {
            return write!(f, "]");
        }
        write!(f, ";")?;
        let pre: Vec<String> = self.preperiod.iter().map(u64::to_string).collect();
        write!(f, "{}", pre.join(","))?;
        if let Some(p) = &self.period {
            if !pre.is_empty() {
                write!(f, ",")?;
            }
            let per: Vec<String> = p.iter().map(u64::to_string).collect();
            write!(f, "({})", per.join(","))?;
        }
        write!(f, "]")
    }
}

struct Cursor<'a> {
    input: &'a str,
    chars: Vec<(usize, char)>,
    at: usize,
}

impl<'a> Cursor<'a> {
    fn new(input: &'a str) -> Self {
        let chars = input
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Self {
            input,
            chars,
            at: 0,
        }
    }

    fn pos(&self) -> usize {
        self.chars
            .get(self.at)
            .map(|(i, _)| *i)
            .unwrap_or(self.input.len())
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.at).map(|(_, c)| *c)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::new(self.input, self.pos(), msg)
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn integer(&mut self) -> Result<(i128, usize), ParseError> {
        let start = self.pos();
        let negative = self.peek() == Some('-');
        if negative {
            self.at += 1;
        }
        let mut digits = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            digits.push(c);
            self.at += 1;
        }
        if digits.is_empty() {
            return Err(self.err("expected an integer"));
        }
        let v: i128 = digits
            .parse()
            .map_err(|_| ParseError::new(self.input, start, "integer out of range"))?;
        Ok((if negative { -v } else { v }, start))
    }

    fn quotient(&mut self) -> Result<u64, ParseError> {
        let (v, start) = self.integer()?;
        if v <= 0 {
            return Err(ParseError::new(
                self.input,
                start,
                "partial quotients a_k (k >= 1) must be positive",
            ));
        }
        u64::try_from(v).map_err(|_| ParseError::new(self.input, start, "partial quotient too large"))
    }

    fn remainder(&self) -> String {
        self.chars[self.at..].iter().map(|(_, c)| *c).collect()
    }
}

pub fn parse_alpha(spec: &str) -> Result<AlphaSpec, ParseError> {
    let mut cur = Cursor::new(spec);
    let compact = cur.remainder();
    match compact.as_str() {
        "golden" => return Ok(AlphaSpec::periodic(1, vec![], vec![1])),
        "sqrt2" => return Ok(AlphaSpec::periodic(1, vec![], vec![2])),
        _ => {}
    }
    if let Some(name) = compact.strip_prefix("rule:") {
        return DigitRule::from_name(name)
            .map(AlphaSpec::from_rule)
            .ok_or_else(|| {
                cur.at = 5;
                cur.err(format!("unknown rule '{name}'"))
            });
    }
    if cur.peek() != Some('[') {
        return Err(cur.err("expected '[', an alias (golden, sqrt2) or rule:<name>"));
    }
    cur.at += 1;
    let (a0, a0_pos) = cur.integer()?;
    let integer_part =
        i64::try_from(a0).map_err(|_| ParseError::new(spec, a0_pos, "a_0 out of range"))?;
    let mut preperiod = Vec::new();
    let mut period = None;
    if cur.peek() == Some(';') {
        cur.at += 1;
        loop {
            match cur.peek() {
                Some(']') if preperiod.is_empty() => break,
                Some('(') => {
                    cur.at += 1;
                    if cur.peek() == Some(')') {
                        return Err(cur.err("empty period"));
                    }
                    let mut p = vec![cur.quotient()?];
                    while cur.peek() == Some(',') {
                        cur.at += 1;
                        p.push(cur.quotient()?);
                    }
                    cur.expect(')')?;
                    period = Some(p);
                    break;
                }
                _ => {
                    preperiod.push(cur.quotient()?);
                    if cur.peek() == Some(',') {
                        cur.at += 1;
                    } else {
                        break;
                    }
                }
            }
        }
    }
    cur.expect(']')?;
    if cur.peek().is_some() {
        return Err(cur.err("trailing input"));
    }
    let alpha = AlphaSpec {
        integer_part,
        preperiod,
        period,
        rule: None,
    };
    alpha
        .validate()
        .map_err(|e| ParseError::new(spec, 0, e.to_string()))?;
    Ok(alpha)
}

impl FromStr for AlphaSpec {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_alpha(s)
    }
}

impl Serialize for AlphaSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for AlphaSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_alpha(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grammar_cases() {
        let a = parse_alpha("[0;(5)]").unwrap();
        assert_eq!(a, AlphaSpec::constant(5));
        let g = parse_alpha("golden").unwrap();
        assert_eq!((g.integer_part, g.period.clone()), (1, Some(vec![1])));
        let m = parse_alpha("[0;2,(1,4)]").unwrap();
        assert_eq!(m.preperiod, vec![2]);
        assert_eq!(m.period, Some(vec![1, 4]));
        assert_eq!(parse_alpha(" [ 3 ; 7 , 15 ] ").unwrap().render(), "[3;7,15]");
        assert_eq!(parse_alpha("[2]").unwrap().render(), "[2]");
        assert_eq!(parse_alpha("[2;]").unwrap().render(), "[2]");
        assert_eq!(parse_alpha("sqrt2").unwrap().render(), "[1;(2)]");
        assert_eq!(
            parse_alpha("rule:powers-of-two").unwrap().rule,
            Some(DigitRule::PowersOfTwo)
        );
        assert_eq!(parse_alpha("[-1;(3)]").unwrap().integer_part, -1);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_alpha("[0;3,0,2]").unwrap_err();
        assert_eq!(e.position, 5);
        let e = parse_alpha("[0;()]").unwrap_err();
        assert!(e.message.contains("empty period"));
        let e = parse_alpha("[0; -2]").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(parse_alpha("[0;(1),2]").is_err());
        assert!(parse_alpha("rule:fibonacci").is_err());
        assert!(parse_alpha("[0;1").is_err());
    }

    #[test]
    fn quotient_indexing() {
        let a = parse_alpha("[0;2,(1,4)]").unwrap();
        let q: Vec<u64> = (1..=6).map(|k| a.quotient(k).unwrap().unwrap()).collect();
        assert_eq!(q, vec![2, 1, 4, 1, 4, 1]);
        let r = parse_alpha("[0;3,4]").unwrap();
        assert_eq!(r.quotient(3).unwrap(), None);
        let p2 = AlphaSpec::from_rule(DigitRule::PowersOfTwo);
        assert_eq!(p2.quotient(5).unwrap(), Some(32));
        assert!(p2.quotient(64).is_err());
    }

    fn arb_spec() -> impl Strategy<Value = AlphaSpec> {
        (
            -5i64..5,
            prop::collection::vec(1u64..60, 0..4),
            prop::option::of(prop::collection::vec(1u64..60, 1..4)),
        )
            .prop_map(|(a0, pre, per)| AlphaSpec {
                integer_part: a0,
                preperiod: pre,
                period: per,
                rule: None,
            })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(spec in arb_spec()) {
            let text = spec.render();
            let back = parse_alpha(&text).unwrap();
            prop_assert_eq!(&back, &spec);
            prop_assert_eq!(back.render(), text);
        }
    }
}
