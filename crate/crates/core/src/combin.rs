//! Exact binomials and logarithms of big integers.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// `C(n, k)` exactly; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        // acc * (n - i) is divisible by i + 1 at every step.
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Natural log of a positive big integer from its top 63 bits.
pub fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 63 {
        return x.to_u64().map_or(f64::NAN, |v| (v as f64).ln());
    }
    let shift = bits - 63;
    let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Nearest `f64` to a big integer (infinite past the `f64` range).
pub fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_binomials() {
        assert_eq!(binomial(6, 2), BigUint::from(15u32));
        assert_eq!(binomial(20, 4), BigUint::from(4845u32));
        assert_eq!(binomial(5, 0), BigUint::one());
        assert_eq!(binomial(3, 4), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
    }

    #[test]
    fn pascal_rule_holds() {
        for n in 1..60u64 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn ln_of_large_binomial() {
        // ln C(1000, 500) via lgamma-free summation of logs.
        let exact: f64 =
            (501..=1000).map(|i| (i as f64).ln()).sum::<f64>() - (1..=500).map(|i| (i as f64).ln()).sum::<f64>();
        let got = ln_big(&binomial(1000, 500));
        assert!((got - exact).abs() / exact < 1e-12, "{got} vs {exact}");
        assert!((ln_big(&BigUint::from(435u32)) - 435f64.ln()).abs() < 1e-15);
    }
}
