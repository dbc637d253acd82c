//! Integer helpers used across modules.

pub use num::integer::{gcd, lcm};

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_odd_prime(p: u32) -> bool {
    p > 2 && is_prime(p)
}

pub fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    let mut b = base % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result * b % modulus;
        }
        b = b * b % modulus;
        exp >>= 1;
    }
    result
}

/// Multiplicative order of `r` modulo `p`, or `None` when `r` is not a unit.
pub fn mult_order(r: u64, p: u64) -> Option<u64> {
    if gcd(r % p, p) != 1 {
        return None;
    }
    let mut k = 1;
    let mut acc = r % p;
    while acc != 1 % p {
        acc = acc * r % p;
        k += 1;
    }
    Some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u32> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(!is_odd_prime(2));
        assert!(is_odd_prime(3));
    }

    #[test]
    fn orders_mod_p() {
        assert_eq!(mult_order(2, 5), Some(4));
        assert_eq!(mult_order(4, 5), Some(2));
        assert_eq!(mult_order(1, 7), Some(1));
        assert_eq!(mult_order(0, 7), None);
        assert_eq!(pow_mod(2, 12, 5), 1);
    }
}
