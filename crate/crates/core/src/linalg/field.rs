use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Runtime description of a field whose elements are `Self::Elem`.
pub trait Field: Clone + PartialEq + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse of a non-zero element.
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn from_i64(&self, v: i64) -> Self::Elem;
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// The prime field `F_p`, elements are residues in `[0, p)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Fp {
    p: u64,
}

impl Fp {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p >= 1 << 32 {
            return Err(Error::InvalidArgument("prime must be below 2^32".into()));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        base %= self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }
}

impl Field for Fp {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1 % self.p
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        a * b % self.p
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn inv(&self, a: &u64) -> u64 {
        debug_assert!(*a != 0);
        self.pow(*a, self.p - 2)
    }
    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn from_i64(&self, v: i64) -> u64 {
        self.reduce(v)
    }
}

/// The rationals with arbitrary-precision fractions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn inv(&self, a: &BigRational) -> BigRational {
        a.recip()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn from_i64(&self, v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..50).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]);
        assert!(matches!(Fp::new(9), Err(Error::NotPrime(9))));
    }

    #[test]
    fn inverses_mod_p() {
        for p in [2, 3, 5, 7, 13] {
            let f = Fp::new(p).unwrap();
            for a in 1..p {
                assert_eq!(f.mul(&a, &f.inv(&a)), 1);
            }
            assert_eq!(f.reduce(-1), p - 1);
        }
    }
}
