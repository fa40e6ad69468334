//! Hexadecimal floating-point strings for bit-exact serialization.
//!
//! `f64` values render as C99 `%a` text (`0x1.8p+1`); [`Real`] values render
//! with an integer significand (`0x3p-1`). Both forms parse back exactly.

use dashu_int::ops::BitTest;
use dashu_int::IBig;

use crate::error::ParseError;
use crate::real::{self, Real};

pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let mant = bits & ((1u64 << 52) - 1);
    if biased == 0 && mant == 0 {
        return format!("{sign}0x0p+0");
    }
    let (lead, exp) = if biased == 0 { (0, -1022) } else { (1, biased - 1023) };
    let mut frac = format!("{mant:013x}");
    while frac.ends_with('0') {
        frac.pop();
    }
    if frac.is_empty() {
        format!("{sign}0x{lead}p{exp:+}")
    } else {
        format!("{sign}0x{lead}.{frac}p{exp:+}")
    }
}

pub fn format_real(x: &Real) -> String {
    let repr = x.repr();
    let sig = repr.significand();
    let (sign, mag) = if *sig < IBig::ZERO {
        ("-", -sig.clone())
    } else {
        ("", sig.clone())
    };
    format!("{sign}0x{mag:x}p{:+}", repr.exponent())
}

struct Parts {
    significand: IBig,
    exponent: isize,
}

fn parse_parts(s: &str) -> Result<Parts, ParseError> {
    let err = |pos: usize, msg: &str| ParseError::new(s, pos, msg);
    let bytes = s.as_bytes();
    let mut i = 0;
    let negative = match bytes.first() {
        Some(b'-') => {
            i += 1;
            true
        }
        Some(b'+') => {
            i += 1;
            false
        }
        _ => false,
    };
    if !s[i..].starts_with("0x") && !s[i..].starts_with("0X") {
        return Err(err(i, "expected 0x prefix"));
    }
    i += 2;
    let mut digits = String::new();
    let mut frac_digits = 0isize;
    let mut seen_point = false;
    while i < bytes.len() && bytes[i] != b'p' && bytes[i] != b'P' {
        let c = bytes[i] as char;
        if c == '.' {
            if seen_point {
                return Err(err(i, "second radix point"));
            }
            seen_point = true;
        } else if c.is_ascii_hexdigit() {
            digits.push(c);
            if seen_point {
                frac_digits += 1;
            }
        } else {
            return Err(err(i, "invalid hex digit"));
        }
        i += 1;
    }
    if digits.is_empty() {
        return Err(err(i, "missing significand"));
    }
    if i >= bytes.len() {
        return Err(err(i, "missing binary exponent"));
    }
    let exp_text = &s[i + 1..];
    let exponent: isize = exp_text
        .parse()
        .map_err(|_| err(i + 1, "invalid binary exponent"))?;
    let mag = IBig::from_str_radix(&digits, 16).map_err(|_| err(2, "invalid significand"))?;
    let significand = if negative { -mag } else { mag };
    Ok(Parts {
        significand,
        exponent: exponent - 4 * frac_digits,
    })
}

pub fn parse_f64(s: &str) -> Result<f64, ParseError> {
    match s {
        "nan" => return Ok(f64::NAN),
        "inf" => return Ok(f64::INFINITY),
        "-inf" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    let parts = parse_parts(s)?;
    if parts.significand == IBig::ZERO {
        return Ok(if s.starts_with('-') { -0.0 } else { 0.0 });
    }
    let bits = parts.significand.bit_len().max(64);
    let r = real::with_bits(Real::from_parts(parts.significand, parts.exponent), bits);
    Ok(real::to_f64(&r))
}

/// Parses either hex form; the result carries at least `bits` of precision.
pub fn parse_real(s: &str, bits: usize) -> Result<Real, ParseError> {
    let parts = parse_parts(s)?;
    let need = parts.significand.bit_len().max(bits).max(1);
    Ok(real::with_bits(
        Real::from_parts(parts.significand, parts.exponent),
        need,
    ))
}

pub mod serde_f64 {
    //! `#[serde(with = "...")]` adapter storing an `f64` as a hex string.
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format_f64(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_f64(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_vec_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(xs.iter().map(|x| super::format_f64(*x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse_f64(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_renderings() {
        assert_eq!(format_f64(1.0), "0x1p+0");
        assert_eq!(format_f64(3.0), "0x1.8p+1");
        assert_eq!(format_f64(-0.0), "-0x0p+0");
        assert_eq!(format_f64(f64::MIN_POSITIVE / 4.0), "0x0.4p-1022");
        assert_eq!(parse_f64("0x1.8p+1").unwrap(), 3.0);
    }

    #[test]
    fn real_round_trip_is_exact() {
        let x = real::ratio(&IBig::from(-22), &IBig::from(7), 256);
        let s = format_real(&x);
        let y = parse_real(&s, 256).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn malformed_input_reports_position() {
        let e = parse_f64("0x1.g").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(parse_f64("1.5").is_err());
        assert!(parse_f64("0x1.5").is_err());
    }

    proptest! {
        #[test]
        fn f64_round_trip(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back = parse_f64(&format_f64(x)).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
