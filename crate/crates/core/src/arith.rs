//! Exact integer utilities: k-th roots, perfect-power recognition and a few
//! gcd/primality helpers shared by the rest of the crate.

use serde::{Deserialize, Serialize};

use crate::error::ArithError;

/// A term `value` written as `base^exponent`.
///
/// Even exponents use the nonnegative root; odd exponents keep the sign of
/// the value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PowerWitness {
    pub value: i128,
    pub exponent: u32,
    pub base: i128,
}

impl PowerWitness {
    pub fn new(value: i128, exponent: u32) -> Option<Self> {
        kth_power_base(value, exponent).map(|base| PowerWitness {
            value,
            exponent,
            base,
        })
    }

    /// Re-checks `base^exponent == value` and the sign convention.
    pub fn is_valid(&self) -> bool {
        if self.exponent < 2 {
            return false;
        }
        if self.exponent % 2 == 0 && self.base < 0 {
            return false;
        }
        checked_pow_i128(self.base, self.exponent) == Some(self.value)
    }
}

pub fn checked_pow_u128(base: u128, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

pub fn checked_pow_i128(base: i128, exp: u32) -> Option<i128> {
    let mut acc: i128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// `root^k <= x`, computed without overflow.
fn pow_le(root: u128, k: u32, x: u128) -> bool {
    match checked_pow_u128(root, k) {
        Some(p) => p <= x,
        None => false,
    }
}

/// Floor of the k-th root of `x` and whether it is exact.
///
/// Integer Newton iteration from an overestimate; the result is verified
/// with exact arithmetic.
pub fn int_nth_root(x: u128, k: u32) -> Result<(u128, bool), ArithError> {
    if k == 0 {
        return Err(ArithError::ZeroExponent);
    }
    if x < 2 || k == 1 {
        return Ok((x, true));
    }
    if k >= 128 {
        // x < 2^128 so the root is 1
        return Ok((1, x == 1));
    }
    let bits = 128 - x.leading_zeros();
    // 2^ceil(bits/k) > x^(1/k)
    let shift = bits.div_ceil(k);
    let mut r: u128 = if shift >= 128 { u128::MAX } else { 1u128 << shift };
    loop {
        // r_next = ((k-1) r + x / r^(k-1)) / k
        let rk1 = checked_pow_u128(r, k - 1);
        let quotient = match rk1 {
            Some(p) if p > 0 => x / p,
            _ => 0,
        };
        let next = ((k as u128 - 1) * r + quotient) / k as u128;
        if next >= r {
            break;
        }
        r = next;
    }
    while !pow_le(r, k, x) {
        r -= 1;
    }
    while pow_le(r + 1, k, x) {
        r += 1;
    }
    let exact = checked_pow_u128(r, k) == Some(x);
    Ok((r, exact))
}

/// The base `b` with `b^k == x`, if any.
///
/// `0` is a k-th power for every k. Even k yields the nonnegative root and
/// rejects negative `x`.
pub fn kth_power_base(x: i128, k: u32) -> Option<i128> {
    if k < 2 {
        return None;
    }
    if x < 0 && k % 2 == 0 {
        return None;
    }
    let (root, exact) = int_nth_root(x.unsigned_abs(), k).ok()?;
    if !exact {
        return None;
    }
    let root = i128::try_from(root).ok()?;
    Some(if x < 0 { -root } else { root })
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut f = 3;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

pub fn primes_below(limit: u64) -> Vec<u64> {
    (2..limit).filter(|&p| is_prime(p)).collect()
}

/// Modular exponentiation for moduli below 2^32.
pub fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Smallest prime `n >= min` such that `value` is an n-th power with a
/// base outside {-1, 0, 1}. Exponents are bounded by the bit length.
pub fn nontrivial_prime_power_exponent(value: i128, min: u32) -> Option<u32> {
    if value.unsigned_abs() < 2 {
        return None;
    }
    let max = 128 - value.unsigned_abs().leading_zeros();
    (min..=max)
        .filter(|&n| is_prime(n as u64))
        .find(|&n| kth_power_base(value, n).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nth_root_examples() {
        assert_eq!(int_nth_root(0, 5).unwrap(), (0, true));
        assert_eq!(int_nth_root(6241, 2).unwrap(), (79, true));
        assert_eq!(int_nth_root(3125, 5).unwrap(), (5, true));
        assert_eq!(int_nth_root(3124, 5).unwrap(), (4, false));
        assert_eq!(int_nth_root(7, 1).unwrap(), (7, true));
        assert!(matches!(int_nth_root(9, 0), Err(ArithError::ZeroExponent)));
    }

    #[test]
    fn nth_root_extremes() {
        assert_eq!(int_nth_root(u128::MAX, 2).unwrap().0, u64::MAX as u128);
        assert_eq!(int_nth_root(u128::MAX, 127).unwrap(), (2, false));
        assert_eq!(int_nth_root(u128::MAX, 200).unwrap(), (1, false));
        assert_eq!(int_nth_root(1u128 << 127, 127).unwrap(), (2, true));
    }

    #[test]
    fn kth_power_examples() {
        assert_eq!(kth_power_base(32, 5), Some(2));
        assert_eq!(kth_power_base(-243, 5), Some(-3));
        assert_eq!(kth_power_base(-4, 2), None);
        assert_eq!(kth_power_base(0, 7), Some(0));
        assert_eq!(kth_power_base(49, 2), Some(7));
        assert_eq!(kth_power_base(50, 2), None);
        assert_eq!(kth_power_base(-1, 3), Some(-1));
    }

    #[test]
    fn witness_sign_conventions() {
        let w = PowerWitness::new(-243, 5).unwrap();
        assert_eq!(w.base, -3);
        assert!(w.is_valid());
        assert!(PowerWitness::new(-9, 2).is_none());
        let bad = PowerWitness {
            value: 9,
            exponent: 2,
            base: -3,
        };
        assert!(!bad.is_valid());
    }

    #[test]
    fn prime_power_exponent() {
        assert_eq!(nontrivial_prime_power_exponent(128, 7), Some(7));
        assert_eq!(nontrivial_prime_power_exponent(2, 7), None);
        assert_eq!(nontrivial_prime_power_exponent(1, 7), None);
        assert_eq!(nontrivial_prime_power_exponent(-2187, 7), Some(7));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn root_brackets(x in any::<u64>(), k in 1u32..12) {
                let (r, exact) = int_nth_root(x as u128, k).unwrap();
                prop_assert!(checked_pow_u128(r, k).unwrap() <= x as u128);
                prop_assert!(checked_pow_u128(r + 1, k).map_or(true, |p| p > x as u128));
                prop_assert_eq!(exact, checked_pow_u128(r, k) == Some(x as u128));
            }

            #[test]
            fn power_roundtrip(b in -1000i128..=1000, k in 2u32..=11) {
                let canonical = if k % 2 == 0 { b.abs() } else { b };
                let x = checked_pow_i128(b, k).unwrap();
                prop_assert_eq!(kth_power_base(x, k), Some(canonical));
            }

            #[test]
            fn agrees_with_trial_loop(x in -200_000i128..200_000, k in 2u32..=7) {
                let naive = (-500i128..=500)
                    .filter(|b| k % 2 == 1 || *b >= 0)
                    .find(|b| checked_pow_i128(*b, k) == Some(x));
                prop_assert_eq!(kth_power_base(x, k), naive);
            }
        }
    }
}
