//! Exact and log-space binomial coefficients.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact `C(n, r)` in `u128`. Returns 0 when `r > n`.
///
/// Panics on overflow, which cannot happen for `n <= 128`.
pub fn binom(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1); divide by the gcd first to stay in range.
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let num = num / d;
        acc = a.checked_mul(num).expect("binomial overflows u128");
    }
    acc
}

/// `C(n, r)` for signed arguments; zero outside `0 <= r <= n`.
pub fn binom_i(n: i64, r: i64) -> u128 {
    if n < 0 || r < 0 || r > n {
        0
    } else {
        binom(n as u64, r as u64)
    }
}

/// Exact arbitrary-precision `C(n, r)`.
pub fn binom_big(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Natural log of a big unsigned integer (`-inf` for zero).
pub fn ln_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `ln C(n, r)` for real `n >= 0` and integer `r`, `-inf` when the
/// coefficient is zero.
///
/// Small `r` is summed term by term, which keeps full relative precision
/// even when `n` is astronomically large; large `r` falls back to log-gamma.
pub fn ln_binom(n: f64, r: f64) -> f64 {
    if r < 0.0 || n < 0.0 || r > n {
        return f64::NEG_INFINITY;
    }
    let r = if n - r < r && (n - r).fract() == 0.0 {
        n - r
    } else {
        r
    };
    if r == 0.0 {
        return 0.0;
    }
    if r <= 1.0e6 {
        let terms = r as u64;
        let mut sum = 0.0;
        let mut comp = 0.0;
        for t in 0..terms {
            let term = ((n - t as f64) / (t as f64 + 1.0)).ln();
            // Kahan summation
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
        }
        sum
    } else {
        use statrs::function::gamma::ln_gamma;
        ln_gamma(n + 1.0) - ln_gamma(r + 1.0) - ln_gamma(n - r + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binom(5, 2), 10);
        assert_eq!(binom(4, 0), 1);
        assert_eq!(binom(3, 5), 0);
        assert_eq!(binom_i(-1, 0), 0);
        assert_eq!(binom(64, 32), 1_832_624_140_942_590_534);
        assert_eq!(binom(100, 50), 100_891_344_545_564_193_334_812_497_256);
    }

    #[test]
    fn big_matches_u128() {
        for n in 0..70u64 {
            for r in 0..=n {
                assert_eq!(binom_big(n, r), BigUint::from(binom(n, r)));
            }
        }
    }

    #[test]
    fn pascal_rule() {
        for n in 1..90u64 {
            for r in 1..n {
                assert_eq!(binom(n, r), binom(n - 1, r - 1) + binom(n - 1, r));
            }
        }
    }

    #[test]
    fn log_binomials() {
        assert!((ln_binom(10.0, 3.0) - 120f64.ln()).abs() < 1e-12);
        assert_eq!(ln_binom(3.0, 4.0), f64::NEG_INFINITY);
        let exact = ln_big(&binom_big(400, 200));
        assert!((ln_binom(400.0, 200.0) - exact).abs() < 1e-9 * exact);
        assert!((ln_big(&BigUint::from(660u32)) - 660f64.ln()).abs() < 1e-12);
    }
}
