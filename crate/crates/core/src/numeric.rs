//! Small numerical kernels shared by the engines: compensated summation,
//! binomial coefficients, and the log-gamma function.

use std::f64::consts::PI;

/// Neumaier-compensated accumulator.
///
/// Long exact enumerations (tens of millions of terms) lose several digits
/// with naive summation; this keeps the error at O(ε) independent of length.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of a sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Binomial coefficient C(n, k) in u64; panics on overflow (not reachable
/// for the state spaces handled here, n ≤ 62).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication
        acc = acc
            .checked_mul(n - i)
            .expect("binomial coefficient overflow")
            / (i + 1);
    }
    acc
}

/// Factorial as u64, for the small permutation groups enumerated densely.
pub fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

// Bernoulli-number coefficients B_{2k} / (2k (2k-1)) for k = 1..10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

// Arguments are shifted up to at least this value before the asymptotic
// series is applied. At x = 15 the tenth term is below 1e-22.
const STIRLING_SHIFT: f64 = 15.0;

/// Natural logarithm of Γ(x) for x > 0.
///
/// Uses the Stirling asymptotic series after shifting the argument with the
/// recurrence Γ(x+1) = xΓ(x). Absolute error is below 1e-13 on [1, 50];
/// Γ(1) = Γ(2) = 1 are returned exactly.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x == 1.0 || x == 2.0 {
        return 0.0;
    }
    let mut z = x;
    let mut log_shift = 0.0;
    // accumulate the product x(x+1)... in blocks to avoid one log per step
    let mut prod = 1.0;
    while z < STIRLING_SHIFT {
        prod *= z;
        if prod > 1e280 {
            log_shift += prod.ln();
            prod = 1.0;
        }
        z += 1.0;
    }
    log_shift += prod.ln();

    let inv = 1.0 / z;
    let inv2 = inv * inv;
    let mut series = 0.0;
    let mut power = inv;
    for c in STIRLING_COEFFS {
        series += c * power;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - log_shift
}

/// Γ(x) via [`ln_gamma`].
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}

/// log(Σ exp(terms)) evaluated stably.
pub fn log_sum_exp(terms: impl IntoIterator<Item = f64>) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max == f64::INFINITY {
        return max;
    }
    max + compensated_sum(terms.iter().map(|t| (t - max).exp())).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial(k: u64) -> f64 {
        (1..=k).map(|i| (i as f64).ln()).sum()
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(xs), 2.0);
        let naive: f64 = xs.iter().sum();
        assert_ne!(naive, 2.0);
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (1..1000).map(|i| 1.0 / i as f64).collect();
        let whole = compensated_sum(xs.iter().copied());
        let mut left: CompensatedSum = xs[..400].iter().copied().collect();
        let right: CompensatedSum = xs[400..].iter().copied().collect();
        left.merge(&right);
        assert!((left.value() - whole).abs() < 1e-15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(14, 7), 3432);
        assert_eq!(binomial(28, 14), 40_116_600);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(factorial(6), 720);
    }

    #[test]
    fn ln_gamma_integers_match_factorials() {
        for k in 1..=49u64 {
            let x = (k + 1) as f64;
            assert!((ln_gamma(x) - ln_factorial(k)).abs() < 1e-10, "x={x}");
        }
        assert_eq!(ln_gamma(1.0), 0.0);
        assert_eq!(ln_gamma(2.0), 0.0);
    }

    #[test]
    fn ln_gamma_half_integers() {
        // Γ(k + 1/2) = (2k)! √π / (4^k k!)
        for k in 0..=49u64 {
            let x = k as f64 + 0.5;
            let expect = ln_factorial(2 * k) + 0.5 * PI.ln()
                - (k as f64) * 4f64.ln()
                - ln_factorial(k);
            assert!((ln_gamma(x) - expect).abs() < 1e-10, "x={x}");
        }
        assert!((gamma(3.5) - 15.0 / 8.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_is_stable() {
        let v = log_sum_exp([1000.0, 1000.0]);
        assert!((v - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp([]), f64::NEG_INFINITY);
    }
}
