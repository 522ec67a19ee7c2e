use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest modulus `p^m` accepted; keeps products inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The chain ring `Z/p^m`. With `m = 1` this is the prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Zpm {
    p: u64,
    m: u32,
    modulus: u64,
}

impl Zpm {
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidRing("exponent m must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..m {
            modulus = modulus
                .checked_mul(p)
                .filter(|&q| q <= MAX_MODULUS)
                .ok_or_else(|| Error::InvalidRing(format!("{p}^{m} exceeds 2^31")))?;
        }
        Ok(Zpm { p, m, modulus })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `Z/p^n` for `n <= m` (the quotient by `p^n`).
    pub fn truncate(&self, n: u32) -> Zpm {
        Zpm::new(self.p, n.clamp(1, self.m)).expect("smaller exponent of a valid ring")
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    #[inline]
    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn reduce_u(&self, a: u64) -> u64 {
        a % self.modulus
    }

    /// `p^e` as an element (zero once `e >= m`).
    pub fn pow_p(&self, e: u32) -> u64 {
        if e >= self.m {
            0
        } else {
            self.p.pow(e)
        }
    }

    /// `p^e` as an integer (no reduction); `e <= m`.
    pub fn pow_p_int(&self, e: u32) -> u64 {
        self.p.pow(e)
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        b %= self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// p-adic valuation, with `v(0) = m`.
    #[inline]
    pub fn val(&self, a: u64) -> u32 {
        if a == 0 {
            return self.m;
        }
        let mut v = 0;
        let mut x = a;
        while x.is_multiple_of(self.p) {
            x /= self.p;
            v += 1;
        }
        v
    }

    #[inline]
    pub fn is_unit(&self, a: u64) -> bool {
        !a.is_multiple_of(self.p)
    }

    /// Inverse of a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if !self.is_unit(a) {
            return None;
        }
        let (mut old_r, mut r) = (a as i128, self.modulus as i128);
        let (mut old_s, mut s) = (1i128, 0i128);
        while r != 0 {
            let q = old_r / r;
            (old_r, r) = (r, old_r - q * r);
            (old_s, s) = (s, old_s - q * s);
        }
        Some(old_s.rem_euclid(self.modulus as i128) as u64)
    }

    /// Exact division by `p^v` of a representative divisible by `p^v`.
    #[inline]
    pub fn div_pow(&self, a: u64, v: u32) -> u64 {
        debug_assert!(a.is_multiple_of(self.p.pow(v)));
        a / self.p.pow(v)
    }

    /// Reduce into `Z/p^e` (representative in `[0, p^e)`).
    #[inline]
    pub fn mod_pow(&self, a: u64, e: u32) -> u64 {
        if e >= self.m {
            a
        } else {
            a % self.p.pow(e)
        }
    }
}
