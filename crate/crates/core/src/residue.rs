//! Residue arithmetic modulo `p^K` with a machine-word fast path.
//!
//! `u64` is used whenever `p^K < 2^64` (products go through `u128`); larger
//! moduli fall back to `BigUint`. Only residues live here, never exact
//! polynomial coefficients.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub(crate) trait Residue: Clone + PartialEq + Debug {
    fn from_u64(v: u64) -> Self;
    fn from_biguint(v: &BigUint) -> Self;
    fn to_biguint(&self) -> BigUint;
    fn is_zero(&self) -> bool;
    fn add_mod(&self, o: &Self, m: &Self) -> Self;
    fn mul_mod(&self, o: &Self, m: &Self) -> Self;
    fn rem(&self, m: &Self) -> Self;
    fn rem_u64(&self, p: u64) -> u64;
    fn div_u64(&self, p: u64) -> Self;

    /// Reduction of a signed integer into `[0, m)`.
    fn from_bigint(v: &BigInt, m: &Self) -> Self {
        if let Some(small) = v.to_i64() {
            let mb = m.to_biguint();
            if let Some(mu) = mb.to_u64() {
                let r = (small as i128).rem_euclid(mu as i128) as u64;
                return Self::from_u64(r);
            }
        }
        let mb = BigInt::from(m.to_biguint());
        Self::from_biguint(v.mod_floor(&mb).magnitude())
    }
}

impl Residue for u64 {
    #[inline]
    fn from_u64(v: u64) -> Self {
        v
    }
    fn from_biguint(v: &BigUint) -> Self {
        v.to_u64().expect("residue exceeds the word modulus")
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
    #[inline]
    fn is_zero(&self) -> bool {
        *self == 0
    }
    #[inline]
    fn add_mod(&self, o: &Self, m: &Self) -> Self {
        ((*self as u128 + *o as u128) % *m as u128) as u64
    }
    #[inline]
    fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        ((*self as u128 * *o as u128) % *m as u128) as u64
    }
    #[inline]
    fn rem(&self, m: &Self) -> Self {
        self % m
    }
    #[inline]
    fn rem_u64(&self, p: u64) -> u64 {
        self % p
    }
    #[inline]
    fn div_u64(&self, p: u64) -> Self {
        self / p
    }
}

impl Residue for BigUint {
    fn from_u64(v: u64) -> Self {
        BigUint::from(v)
    }
    fn from_biguint(v: &BigUint) -> Self {
        v.clone()
    }
    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_mod(&self, o: &Self, m: &Self) -> Self {
        (self + o) % m
    }
    fn mul_mod(&self, o: &Self, m: &Self) -> Self {
        (self * o) % m
    }
    fn rem(&self, m: &Self) -> Self {
        self % m
    }
    fn rem_u64(&self, p: u64) -> u64 {
        (self % p).to_u64().unwrap_or(0)
    }
    fn div_u64(&self, p: u64) -> Self {
        self / p
    }
}

/// Table of `p^0, ..., p^K` in residue form.
#[derive(Debug, Clone)]
pub(crate) struct Powers<R> {
    pub p: u64,
    pows: Vec<R>,
}

impl<R: Residue> Powers<R> {
    pub fn new(p: u64, max_exp: u32) -> Self {
        let mut pows = Vec::with_capacity(max_exp as usize + 1);
        let mut acc = BigUint::from(1u32);
        for _ in 0..=max_exp {
            pows.push(R::from_biguint(&acc));
            acc *= p;
        }
        Powers { p, pows }
    }

    #[inline]
    pub fn pow(&self, e: u32) -> &R {
        &self.pows[e as usize]
    }

    /// Valuation of a residue modulo `p^prec`; `None` when it is zero there.
    pub fn valuation(&self, x: &R, prec: u32) -> Option<u32> {
        let x = x.rem(self.pow(prec));
        if x.is_zero() {
            return None;
        }
        let mut v = 0;
        let mut y = x;
        while y.rem_u64(self.p) == 0 {
            y = y.div_u64(self.p);
            v += 1;
        }
        Some(v)
    }
}

/// Horner evaluation modulo `m`.
pub(crate) fn eval<R: Residue>(coeffs: &[R], x: &R, m: &R) -> R {
    let mut acc = R::from_u64(0);
    for c in coeffs.iter().rev() {
        acc = acc.mul_mod(x, m).add_mod(c, m);
    }
    acc
}

/// Formal derivative evaluated modulo `m`.
pub(crate) fn eval_derivative<R: Residue>(coeffs: &[R], x: &R, m: &R) -> R {
    let mut acc = R::from_u64(0);
    for (i, c) in coeffs.iter().enumerate().skip(1).rev() {
        let term = c.mul_mod(&R::from_u64(i as u64).rem(m), m);
        acc = acc.mul_mod(x, m).add_mod(&term, m);
    }
    acc
}

/// Values modulo a small prime `p` (fits comfortably in `u64`).
pub(crate) fn eval_small(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0u64, |acc, &c| ((acc as u128 * x as u128 + c as u128) % p as u128) as u64)
}

pub(crate) fn eval_derivative_small(coeffs: &[u64], x: u64, p: u64) -> u64 {
    coeffs.iter().enumerate().skip(1).rev().fold(0u64, |acc, (i, &c)| {
        let term = (c as u128 * (i as u64 % p) as u128) % p as u128;
        ((acc as u128 * x as u128 + term) % p as u128) as u64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_and_big_agree() {
        let m64: u64 = 3u64.pow(40);
        let mb = BigUint::from(m64);
        let a = m64 - 5;
        let b = m64 / 3 + 17;
        assert_eq!(a.mul_mod(&b, &m64).to_biguint(), BigUint::from(a).mul_mod(&BigUint::from(b), &mb));
        assert_eq!(a.add_mod(&b, &m64).to_biguint(), BigUint::from(a).add_mod(&BigUint::from(b), &mb));
    }

    #[test]
    fn signed_reduction() {
        let m = 27u64;
        assert_eq!(u64::from_bigint(&BigInt::from(-1), &m), 26);
        assert_eq!(BigUint::from_bigint(&BigInt::from(-28), &BigUint::from(27u32)), BigUint::from(26u32));
    }

    #[test]
    fn powers_valuation() {
        let pw: Powers<u64> = Powers::new(2, 10);
        assert_eq!(pw.valuation(&12, 10), Some(2));
        assert_eq!(pw.valuation(&1024, 10), None);
        assert_eq!(pw.valuation(&1024, 9), None);
        assert_eq!(pw.valuation(&512, 10), Some(9));
    }

    #[test]
    fn horner() {
        // X^2 - 1 at 3 mod 8
        let c = [7u64, 0, 1];
        assert_eq!(eval(&c, &3, &8), 0);
        assert_eq!(eval_derivative(&c, &3, &8), 6);
        assert_eq!(eval_small(&[1, 0, 1], 2, 5), 0);
        assert_eq!(eval_derivative_small(&[1, 0, 1], 2, 5), 4);
    }
}
