//! Digamma and log-gamma for positive arguments.

use statrs::function::gamma;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

fn positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("{name} needs x > 0, got {x}")));
    }
    Ok(())
}

/// `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    positive("digamma", x)?;
    Ok(gamma::digamma(x))
}

/// `log Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    positive("ln_gamma", x)?;
    Ok(gamma::ln_gamma(x))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digamma_at_integers() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-14);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-14);
        // ψ(1/2) = −γ − 2 log 2
        let half = -EULER_GAMMA - 2.0 * 2f64.ln();
        assert!((digamma(0.5).unwrap() - half).abs() < 1e-14);
        assert!(digamma(0.0).is_err());
        assert!(digamma(-1.5).is_err());
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-15);
        assert!((ln_gamma(0.5).unwrap() - 0.5 * PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0).unwrap() - 362_880f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn reflection_at_one_sixth() {
        let prod = (ln_gamma(1.0 / 6.0).unwrap() + ln_gamma(5.0 / 6.0).unwrap()).exp();
        assert!((prod - 2.0 * PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn digamma_recurrence(x in 0.01f64..10.0) {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            prop_assert!((lhs - 1.0 / x).abs() <= 1e-13 * (1.0 / x).max(1.0));
        }

        #[test]
        fn ln_gamma_recurrence(x in 0.01f64..10.0) {
            let lhs = ln_gamma(x + 1.0).unwrap() - ln_gamma(x).unwrap();
            prop_assert!((lhs - x.ln()).abs() < 5e-13);
        }
    }
}
