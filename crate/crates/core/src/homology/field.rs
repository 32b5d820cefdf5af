//! Arithmetic modulo a random 62-bit prime.

use rand::Rng;

use crate::rng::rng_from_seed;

/// Primes are drawn from `[2^61, 2^62)`.
pub const PRIME_BITS: u32 = 62;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve prime bases are exact for
/// every 64-bit input.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
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

/// A uniformly random prime in `[2^61, 2^62)` determined by `seed`.
pub fn random_prime(seed: u64) -> u64 {
    let mut rng = rng_from_seed(seed);
    loop {
        let candidate = rng.gen_range(1u64 << (PRIME_BITS - 1)..1u64 << PRIME_BITS) | 1;
        if is_prime(candidate) {
            return candidate;
        }
    }
}

/// `F_p` for an odd prime `p < 2^62`. Elements are canonical residues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    p: u64,
}

/// Multiplier with a precomputed quotient estimate, for multiplying many
/// values by the same constant (Shoup's method).
#[derive(Clone, Copy, Debug)]
pub struct Scaled {
    c: u64,
    quotient: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Self {
        assert!(
            p > 2 && p < 1 << 62 && is_prime(p),
            "{p} is not an odd prime below 2^62"
        );
        PrimeField { p }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.p as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        pow_mod(a, self.p - 2, self.p)
    }

    pub fn scaled(&self, c: u64) -> Scaled {
        Scaled {
            c,
            quotient: (((c as u128) << 64) / self.p as u128) as u64,
        }
    }

    /// `c·b mod p` for a precomputed `c`.
    #[inline]
    pub fn mul_scaled(&self, s: Scaled, b: u64) -> u64 {
        let q = ((s.quotient as u128 * b as u128) >> 64) as u64;
        let r = s.c.wrapping_mul(b).wrapping_sub(q.wrapping_mul(self.p));
        if r >= self.p {
            r - self.p
        } else {
            r
        }
    }
}
