//! Compensated summation and log-sum-exp accumulation.

/// Neumaier's improved Kahan–Babuška summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_value(v: f64) -> Self {
        Self { sum: v, comp: 0.0 }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Streaming `log Σ exp(v_i)`, kept as a running maximum plus a scaled sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    scaled: Neumaier,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: Neumaier::new(),
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        if v <= self.max {
            self.scaled.add((v - self.max).exp());
        } else {
            let factor = (self.max - v).exp();
            let rescaled = self.scaled.value() * factor;
            self.scaled = Neumaier::with_value(rescaled);
            self.scaled.add(1.0);
            self.max = v;
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max >= other.max {
            let f = (other.max - self.max).exp();
            self.scaled.add(other.scaled.value() * f);
        } else {
            let f = (self.max - other.max).exp();
            let mine = self.scaled.value() * f;
            self.scaled = other.scaled;
            self.scaled.add(mine);
            self.max = other.max;
        }
    }

    /// Adds `by` to every pushed value.
    pub fn shift(&mut self, by: f64) {
        if self.max != f64::NEG_INFINITY {
            self.max += by;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        self.max + self.scaled.value().ln()
    }
}
