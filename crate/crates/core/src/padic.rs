//! Exact integer and modular primitives for polynomials over `Z_p`.
//!
//! Everything here is arbitrary precision. Coefficients of `f(r + pX)` grow
//! like `p^deg`, so no fixed-width integer ever holds a polynomial coefficient.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{binomial, Integer};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A rational prime, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^e` as an unsigned big integer.
    pub fn pow(self, e: u32) -> BigUint {
        num_traits::pow(BigUint::from(self.0), e as usize)
    }

    /// Largest `K` with `p^K < 2^64`.
    pub fn max_u64_precision(self) -> u32 {
        let mut k = 0u32;
        let mut acc: u128 = 1;
        while acc * (self.0 as u128) < (1u128 << 64) {
            acc *= self.0 as u128;
            k += 1;
        }
        k
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 {
        return false;
    }
    let mut i = 3u64;
    while i.saturating_mul(i) <= n {
        if n % i == 0 {
            return false;
        }
        i += 2;
    }
    true
}

/// p-adic valuation. `Infinite` is reserved for zero and never takes part in
/// arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Largest `t` with `p^t | x`, or [`Valuation::Infinite`] for zero.
pub fn valuation(x: &BigInt, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinite;
    }
    let p = BigUint::from(p.get());
    let mut m = x.magnitude().clone();
    let mut t = 0u64;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return Valuation::Finite(t);
        }
        m = q;
        t += 1;
    }
}

/// Polynomial with arbitrary-precision integer coefficients, constant term
/// first. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    /// `c * X^k`.
    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `X - c`.
    pub fn linear_root(c: BigInt) -> Self {
        Self::new(vec![-c, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `X^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// `f(x) mod p^k` as a residue in `[0, p^k)`.
    pub fn eval_mod(&self, x: &BigInt, p: Prime, k: u32) -> BigUint {
        let m = BigInt::from(p.pow(k));
        let x = x.mod_floor(&m);
        let v = self
            .coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| (acc * &x + c).mod_floor(&m));
        v.magnitude().clone()
    }

    pub fn derivative(&self) -> IntPolynomial {
        self.hasse_derivative(1)
    }

    /// `D^(j) f = sum_i c_i * C(i, j) * X^(i - j)`.
    pub fn hasse_derivative(&self, j: usize) -> IntPolynomial {
        if j == 0 {
            return self.clone();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(j)
            .map(|(i, c)| c * binomial(BigInt::from(i), BigInt::from(j)))
            .collect();
        IntPolynomial::new(coeffs)
    }

    /// Coefficients of `f(r + X)`; entry `j` is `D^(j) f (r)`.
    pub fn taylor_shift(&self, r: &BigInt) -> IntPolynomial {
        let mut a = self.coeffs.clone();
        let n = a.len();
        if !r.is_zero() {
            for i in 0..n {
                for k in (i..n.saturating_sub(1)).rev() {
                    let t = &a[k + 1] * r;
                    a[k] += t;
                }
            }
        }
        IntPolynomial::new(a)
    }

    /// `f(r + pX)`, computed exactly.
    pub fn shift_scale(&self, r: &BigInt, p: Prime) -> IntPolynomial {
        let shifted = self.taylor_shift(r);
        let pb = p.big();
        let mut scale = BigInt::one();
        let coeffs = shifted
            .coeffs
            .into_iter()
            .map(|c| {
                let out = c * &scale;
                scale *= &pb;
                out
            })
            .collect();
        IntPolynomial::new(coeffs)
    }

    /// `f(pX)`.
    pub fn scale(&self, p: Prime) -> IntPolynomial {
        self.shift_scale(&BigInt::zero(), p)
    }

    /// Splits off the largest power of `p` dividing every coefficient.
    pub fn content_compress(&self, p: Prime) -> Result<(IntPolynomial, u64)> {
        let m = self
            .coeffs
            .iter()
            .filter_map(|c| valuation(c, p).finite())
            .min()
            .ok_or(Error::ZeroPolynomial)?;
        if m == 0 {
            return Ok((self.clone(), 0));
        }
        let div = BigInt::from(p.pow(m as u32));
        let coeffs = self.coeffs.iter().map(|c| c / &div).collect();
        Ok((IntPolynomial::new(coeffs), m))
    }

    /// Gcd of the coefficients (non-negative, zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading().is_some_and(|l| l.sign() == Sign::Minus) {
            c = -c;
        }
        IntPolynomial::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    /// Number of trailing zero coefficients, i.e. the multiplicity of 0 as a
    /// root, together with `f / X^m`.
    pub fn split_zero_root(&self) -> (IntPolynomial, usize) {
        let m = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        (IntPolynomial::new(self.coeffs[m..].to_vec()), m)
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn scalar_mul(&self, c: &BigInt) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Small-coefficient view, if every coefficient fits in an `i64`.
    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let unit = mag.is_one();
            match i {
                0 => write!(f, "{mag}")?,
                1 if unit => f.write_str("X")?,
                1 => write!(f, "{mag}*X")?,
                _ if unit => write!(f, "X^{i}")?,
                _ => write!(f, "{mag}*X^{i}")?,
            }
        }
        Ok(())
    }
}

/// A degree-`n` polynomial whose coefficients are only known modulo `p^K`.
///
/// The degree is tracked separately: the leading residue may be zero even
/// though the underlying polynomial has a known degree (e.g. `f(pX)` for monic
/// `f`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdicApproxPolynomial {
    prime: Prime,
    precision: u32,
    residues: Vec<BigUint>,
    degree: usize,
}

impl PAdicApproxPolynomial {
    pub fn new(prime: Prime, precision: u32, residues: Vec<BigUint>) -> Result<Self> {
        if precision == 0 {
            return Err(Error::Precondition("precision must be at least 1".into()));
        }
        if residues.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        let m = prime.pow(precision);
        if let Some(index) = residues.iter().position(|r| r >= &m) {
            return Err(Error::ResidueOutOfRange { index, precision });
        }
        let degree = residues.len() - 1;
        Ok(PAdicApproxPolynomial {
            prime,
            precision,
            residues,
            degree,
        })
    }

    /// Reduction of an exact polynomial modulo `p^K`.
    pub fn from_int_poly(f: &IntPolynomial, prime: Prime, precision: u32) -> Result<Self> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let m = BigInt::from(prime.pow(precision));
        let residues = f
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&m).magnitude().clone())
            .collect();
        Self::new(prime, precision, residues)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residues(&self) -> &[BigUint] {
        &self.residues
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> BigUint {
        self.prime.pow(self.precision)
    }

    /// Reduces to a lower precision.
    pub fn truncate(&self, precision: u32) -> Result<Self> {
        if precision > self.precision {
            return Err(Error::Precondition(format!(
                "cannot raise precision from {} to {precision} by truncation",
                self.precision
            )));
        }
        let m = self.prime.pow(precision);
        Self::new(
            self.prime,
            precision,
            self.residues.iter().map(|r| r % &m).collect(),
        )
    }

    /// `g(pX)` at the same precision.
    pub fn scale(&self) -> Self {
        let m = self.modulus();
        let p = BigUint::from(self.prime.get());
        let mut s = BigUint::one();
        let residues = self
            .residues
            .iter()
            .map(|r| {
                let out = (r * &s) % &m;
                s = (&s * &p) % &m;
                out
            })
            .collect();
        PAdicApproxPolynomial {
            prime: self.prime,
            precision: self.precision,
            residues,
            degree: self.degree,
        }
    }

    pub fn is_zero_mod(&self) -> bool {
        self.residues.iter().all(Zero::is_zero)
    }

    /// Strassmann bound on the number of roots in `Z_p`: the largest index
    /// whose coefficient has minimal valuation. Coefficients known to be zero
    /// modulo `p^K` have valuation above any nonzero residue, so the bound is
    /// determined whenever some residue is nonzero. Returns `None` otherwise.
    pub fn strassmann_bound(&self) -> Option<usize> {
        let vals: Vec<Valuation> = self
            .residues
            .iter()
            .map(|r| valuation(&BigInt::from(r.clone()), self.prime))
            .collect();
        let min = *vals.iter().min()?;
        if min.is_infinite() {
            return None;
        }
        vals.iter().rposition(|v| *v == min)
    }
}
