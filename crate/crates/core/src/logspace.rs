//! Streaming log-sum-exp.

/// Accumulates `log Σ exp(x_i)` without overflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp { max: f64::NEG_INFINITY, scaled: 0.0 }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    /// `-inf` when nothing finite was pushed.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.max == f64::NEG_INFINITY
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

pub fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<LogSumExp>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_in_range() {
        let xs = [0.5, 2.0, -1.0, 0.0];
        let naive = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(xs) - naive).abs() < 1e-14);
    }

    #[test]
    fn survives_large_arguments() {
        // log(e^1234 + e^1232) = 1232 + log(e^2 + 1)
        let v = log_sum_exp([1234.0, 1232.0]);
        assert!((v - (1232.0 + (2f64.exp() + 1.0).ln())).abs() < 1e-12);
        assert!(((1234f64).exp() + (1232f64).exp()).ln().is_infinite());
    }

    #[test]
    fn empty_is_negative_infinity() {
        assert_eq!(log_sum_exp([]), f64::NEG_INFINITY);
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, 3.0]), 3.0);
    }
}
