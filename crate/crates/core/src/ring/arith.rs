//! Word-sized modular arithmetic modulo prime powers.
//!
//! Every modulus used by the crate is a power `p^k` that fits in 62 bits, so
//! sums of two residues never overflow a `u64` and products fit in a `u128`.

/// Largest `k` with `p^k < 2^62`.
pub fn max_digits(p: u64) -> u32 {
    let mut k = 0;
    let mut acc: u128 = 1;
    while acc * (p as u128) < (1u128 << 62) {
        acc *= p as u128;
        k += 1;
    }
    k
}

/// `p^e`, panicking on overflow (callers validate against [`max_digits`]).
pub fn pow_u64(p: u64, e: u32) -> u64 {
    p.checked_pow(e).expect("prime power exceeds u64")
}

/// A modulus `p^k` with a fast path when products fit in 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Modulus {
    pub p: u64,
    pub k: u32,
    pub m: u64,
    small: bool,
}

impl Modulus {
    pub fn new(p: u64, k: u32) -> Self {
        assert!(k <= max_digits(p), "modulus {p}^{k} too large");
        let m = pow_u64(p, k);
        Modulus { p, k, m, small: m < (1u64 << 32) }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.m {
            s - self.m
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.m - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.m - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.small {
            (a * b) % self.m
        } else {
            ((a as u128 * b as u128) % self.m as u128) as u64
        }
    }

    pub fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1 % self.m;
        a %= self.m;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a unit residue.
    pub fn inv(&self, a: u64) -> Option<u64> {
        inv_mod(a % self.m, self.m)
    }

    /// Reduce a signed integer.
    pub fn from_i64(&self, a: i64) -> u64 {
        let r = (a as i128).rem_euclid(self.m as i128);
        r as u64
    }

    pub fn from_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.m as i128) as u64
    }

    /// Symmetric lift into `(-m/2, m/2]`.
    pub fn lift_signed(&self, a: u64) -> i128 {
        if a > self.m / 2 {
            a as i128 - self.m as i128
        } else {
            a as i128
        }
    }
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// `v_p(x)` for nonzero `x`.
#[inline]
pub fn val_u64(mut x: u64, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// `v_p` of a nonzero signed integer.
pub fn val_i128(x: i128, p: u64) -> u32 {
    debug_assert!(x != 0);
    let mut x = x.unsigned_abs();
    let p = p as u128;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// Deterministic primality test by trial division (inputs are small).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// `floor(log_p(n))` for `n >= 1`.
pub fn ilog(p: u64, n: u64) -> u32 {
    let mut k = 0;
    let mut acc = p;
    while acc <= n {
        k += 1;
        match acc.checked_mul(p) {
            Some(a) => acc = a,
            None => break,
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_two_mod_625() {
        assert_eq!(inv_mod(2, 625), Some(313));
        assert_eq!(inv_mod(5, 625), None);
    }

    #[test]
    fn digits_fit() {
        for p in [3u64, 5, 7, 11, 13] {
            let k = max_digits(p);
            assert!((p as u128).pow(k) < (1u128 << 62));
            assert!((p as u128).pow(k + 1) >= (1u128 << 62));
        }
        assert_eq!(max_digits(5), 26);
    }

    #[test]
    fn modulus_paths_agree() {
        let small = Modulus::new(5, 8);
        let big = Modulus::new(5, 20);
        let a = 123_456u64;
        let b = 98_765u64;
        assert_eq!(small.mul(a, b), ((a as u128 * b as u128) % 390_625) as u64);
        assert_eq!(big.mul(a, b) % 390_625, small.mul(a, b));
        assert_eq!(small.lift_signed(small.from_i64(-6)), -6);
    }

    #[test]
    fn logs_and_primes() {
        assert_eq!(ilog(5, 24), 1);
        assert_eq!(ilog(5, 25), 2);
        assert_eq!(ilog(5, 35), 2);
        assert!(is_prime(13) && !is_prime(15) && !is_prime(1));
    }
}
