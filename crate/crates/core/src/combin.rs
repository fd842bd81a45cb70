// Exact factorial arithmetic for the closed-form sums. Everything is carried
// as a BigInt rational and only converted to f64 once the ratio is formed, so
// large intermediate factorials never overflow or lose digits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

pub(crate) fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// Π num! / Π den!, evaluated exactly then rounded once.
pub(crate) fn fact_ratio(num: &[u64], den: &[u64]) -> f64 {
    let n = num.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
    let d = den.iter().fold(BigInt::one(), |acc, &k| acc * factorial(k));
    BigRational::new(n, d).to_f64().expect("finite ratio")
}

pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    fact_ratio(&[n], &[k, n - k])
}

/// Converts a value known to be a non-negative integer (stored as f64 from a
/// half-integer sum like j+m) to u64.
#[inline]
pub(crate) fn iu(x: f64) -> u64 {
    let r = x.round();
    debug_assert!(r >= 0.0 && (x - r).abs() < 1e-9, "expected integer, got {x}");
    r as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_factorials() {
        assert_eq!(factorial(0), BigInt::one());
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(fact_ratio(&[6], &[4]), 30.0);
        assert_eq!(binomial(6, 2), 15.0);
        assert_eq!(binomial(2, 3), 0.0);
    }

    #[test]
    fn huge_ratio_is_exact() {
        // 200!/199! would overflow f64 factorials on the way.
        assert_eq!(fact_ratio(&[200], &[199]), 200.0);
    }
}
