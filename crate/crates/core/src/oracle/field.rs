//! Arithmetic in a prime field small enough that products fit in `u64`.

/// Deterministic Miller–Rabin primality test.  The witness set {2, 7, 61}
/// is exact for every n below 4,759,123,141, which covers all 32-bit
/// moduli this crate accepts.
pub fn is_prime(n: u64) -> bool {
    assert!(
        n < 4_759_123_141,
        "primality witnesses only cover moduli below 2^32"
    );
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 61] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let s = d.trailing_zeros();
    d >>= s;
    'witness: for a in [2u64, 7, 61] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    base %= m;
    let mut acc = 1u64 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// F_p for a prime p < 2^32.  Elements are kept reduced, so a product of
/// two of them stays below 2^64 and plain `u64` arithmetic suffices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    /// Requires a prime modulus below 2^32; checked up front so every
    /// later inverse is well defined.
    pub fn new(p: u64) -> Option<Self> {
        (p < (1 << 32) && is_prime(p)).then_some(PrimeField { p })
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p { s - self.p } else { s }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b { a - b } else { a + self.p - b }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 { 0 } else { self.p - a }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.p
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a nonzero element, via Fermat.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p - 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_spot_checks() {
        assert!(is_prime(2));
        assert!(is_prime(61));
        assert!(is_prime(2_147_483_647));
        assert!(is_prime(2_147_483_629));
        assert!(is_prime(4_294_967_291));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(!is_prime(2_147_483_647u64 * 2 - 1)); // 4294967293 = 9241 * 464773
        assert!(!is_prime(561)); // Carmichael
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        // Agreement with trial division on a dense range.
        for n in 0..2000u64 {
            let slow = n >= 2 && (2..n).all(|k| n % k != 0);
            assert_eq!(is_prime(n), slow, "n={n}");
        }
    }

    #[test]
    fn field_axioms_mod_small_prime() {
        let f = PrimeField::new(97).unwrap();
        for a in 0..97u64 {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
            for b in 0..97u64 {
                assert_eq!(f.add(a, b), (a + b) % 97);
                assert_eq!(f.mul(a, b), (a * b) % 97);
                assert_eq!(f.sub(a, b), (a + 97 - b) % 97);
            }
        }
    }

    #[test]
    fn field_ops_near_word_size() {
        let p = 4_294_967_291;
        let f = PrimeField::new(p).unwrap();
        let a = p - 1;
        assert_eq!(f.mul(a, a), 1); // (-1)^2
        assert_eq!(f.inv(a), a);
        assert_eq!(f.pow(2, p - 1), 1); // Fermat
        assert_eq!(f.add(a, 1), 0);
    }

    #[test]
    fn rejects_composite_or_oversized_moduli() {
        assert!(PrimeField::new(91).is_none());
        assert!(PrimeField::new(1 << 33).is_none());
    }
}
