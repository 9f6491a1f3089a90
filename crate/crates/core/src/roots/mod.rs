//! Exact counting of distinct roots in `Z_p`, and k-Henselian counting for
//! polynomials known only to finite precision.

mod descent;
mod henselian;
mod squarefree;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{IntPolynomial, Prime};

pub use henselian::{count_henselian_roots, count_henselian_roots_with_cap, HenselianReport, DEFAULT_NODE_CAP};
pub use squarefree::{discriminant_valuation, div_exact, gcd, pseudo_rem, resultant, squarefree_part};

/// Distinct roots in `Z_p`, split by residue class modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootCount {
    pub total: usize,
    pub per_residue: Vec<usize>,
}

impl RootCount {
    fn from_per_residue(per_residue: Vec<usize>) -> Self {
        RootCount {
            total: per_residue.iter().sum(),
            per_residue,
        }
    }
}

/// Number of distinct roots of `f` in `Z_p`.
///
/// A root `0` of multiplicity `m` is split off first. The remaining factor is
/// descended modulo a word-sized power of `p`; a completed modular descent is
/// exact, since every counted root is simple in its disc. Only if precision
/// runs out (a repeated root in `Z_p`, or roots extremely close together) is
/// the squarefree part computed and descended at growing precisions, with the
/// exact discriminant-budgeted descent as the last resort.
pub fn count_roots_zp(f: &IntPolynomial, p: Prime) -> Result<RootCount> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (h, zero_mult) = f.split_zero_root();
    let h = h.primitive_part();
    let mut per = match descent::descend_word(&h, p) {
        Some(per) => per,
        None => {
            let g = squarefree_part(&h);
            match descent::descend_with_ladder(&g, p) {
                Some(per) => per,
                None => exact_descent(&g, p)?,
            }
        }
    };
    if zero_mult > 0 {
        per[0] += 1;
    }
    Ok(RootCount::from_per_residue(per))
}

/// [`count_roots_zp`] for polynomials with machine-integer coefficients, low
/// degree first. Avoids big integers unless the word-sized descent runs out
/// of precision.
pub fn count_roots_i64(coeffs: &[i64], p: Prime) -> Result<RootCount> {
    let Some(first) = coeffs.iter().position(|&c| c != 0) else {
        return Err(Error::ZeroPolynomial);
    };
    let pv = p.get() as i64;
    let h = &coeffs[first..];
    let fast = if h.iter().any(|&c| c % pv != 0) {
        descent::descend_i64(h, p)
    } else {
        None
    };
    match fast {
        Some(mut per) => {
            if first > 0 {
                per[0] += 1;
            }
            Ok(RootCount::from_per_residue(per))
        }
        None => count_roots_zp(&IntPolynomial::from_i64s(coeffs), p),
    }
}

/// Reference implementation: squarefree reduction followed by an exact
/// big-integer descent whose depth is bounded by `v_p(disc) + 1`.
pub fn count_roots_zp_exact(f: &IntPolynomial, p: Prime) -> Result<RootCount> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = squarefree_part(f);
    Ok(RootCount::from_per_residue(exact_descent(&g, p)?))
}

fn exact_descent(g: &IntPolynomial, p: Prime) -> Result<Vec<usize>> {
    let v = discriminant_valuation(g, p)
        .expect("squarefree part has nonzero discriminant");
    descent::descend_exact(g, p, v + 1)
}

/// `C(n, d)`: the number of d-sets among `n` roots.
pub fn d_set_count(n: usize, d: usize) -> BigUint {
    if d > n {
        return BigUint::zero();
    }
    binomial(BigUint::from(n), BigUint::from(d))
}

/// `C(n, d)` as a machine integer, if it fits.
pub fn d_set_count_u128(n: usize, d: usize) -> Option<u128> {
    if d > n {
        return Some(0);
    }
    let d = d.min(n - d);
    let mut acc: u128 = 1;
    for i in 0..d {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Checks `Z_d(f) = sum over d_0 + ... + d_{p-1} = d of prod_r Z_{d_r}(f_r)`
/// with `f_r(X) = f(r + pX)`, counting each `f_r` independently.
pub fn residue_partition_check(f: &IntPolynomial, p: Prime, d: usize) -> Result<bool> {
    let whole = count_roots_zp(f, p)?;
    let mut parts = Vec::with_capacity(p.get() as usize);
    for r in 0..p.get() {
        let fr = f.shift_scale(&BigInt::from(r), p);
        parts.push(count_roots_zp(&fr, p)?.total);
    }
    if parts != whole.per_residue {
        return Ok(false);
    }
    // coefficient of t^d in prod_r (1 + t)^{N_r}
    let mut poly = vec![BigUint::from(1u32)];
    poly.resize(d + 1, BigUint::zero());
    for &n_r in &parts {
        let mut next = vec![BigUint::zero(); d + 1];
        for (a, ca) in poly.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for b in 0..=(d - a) {
                next[a + b] += ca * d_set_count(n_r, b);
            }
        }
        poly = next;
    }
    Ok(poly[d] == d_set_count(whole.total, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn count_examples() {
        let c = count_roots_zp(&poly(&[-1, 0, 1]), p(5)).unwrap();
        assert_eq!(c.total, 2);
        assert_eq!(c.per_residue, vec![0, 1, 0, 0, 1]);
        assert_eq!(count_roots_zp(&poly(&[-2, 0, 1]), p(2)).unwrap().total, 0);
        let c = count_roots_zp(&poly(&[1, 0, 1]), p(5)).unwrap();
        assert_eq!(c.per_residue, vec![0, 0, 1, 1, 0]);
        assert_eq!(count_roots_zp(&IntPolynomial::zero(), p(5)), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn multiplicities_are_erased() {
        // (X - 1)^3 (X + 3)^2 X^4 over Z_2: roots 1, -3, 0
        let mut f = poly(&[0, 0, 0, 0, 1]);
        for _ in 0..3 {
            f = f.mul(&poly(&[-1, 1]));
        }
        for _ in 0..2 {
            f = f.mul(&poly(&[3, 1]));
        }
        let c = count_roots_zp(&f, p(2)).unwrap();
        assert_eq!(c.total, 3);
        assert_eq!(c.per_residue, vec![1, 2]);
        assert_eq!(count_roots_zp_exact(&f, p(2)).unwrap(), c);
    }

    #[test]
    fn close_roots_need_deep_descent() {
        // (X - 1)(X - 1 - 2^80): two roots agreeing in 80 binary digits
        let big = BigInt::from(1) + (BigInt::from(1) << 80);
        let f = IntPolynomial::linear_root(1.into()).mul(&IntPolynomial::linear_root(big));
        let c = count_roots_zp(&f, p(2)).unwrap();
        assert_eq!(c.total, 2);
        assert_eq!(count_roots_zp_exact(&f, p(2)).unwrap().total, 2);
    }

    #[test]
    fn non_monic_inputs() {
        // 2X - 1 has the root 1/2 in Z_3 but none in Z_2
        assert_eq!(count_roots_zp(&poly(&[-1, 2]), p(3)).unwrap().total, 1);
        assert_eq!(count_roots_zp(&poly(&[-1, 2]), p(2)).unwrap().total, 0);
        // 4X^2 - 1 over Z_3: roots +-1/2
        assert_eq!(count_roots_zp(&poly(&[-1, 0, 4]), p(3)).unwrap().total, 2);
        // constants have no roots
        assert_eq!(count_roots_zp(&poly(&[9]), p(3)).unwrap().total, 0);
    }

    #[test]
    fn machine_integer_path_agrees() {
        let cases: &[(&[i64], u64)] = &[
            (&[-1, 0, 1], 5),
            (&[0, 0, 0, 3, 0, 1], 3),
            (&[4, 0, 0, 2], 2),
            (&[1, -2, 1], 2),
            (&[0, 0, 0], 2),
            (&[1, 1, 1, 1, 1, 1, 1], 3),
        ];
        for &(c, prime) in cases {
            assert_eq!(
                count_roots_i64(c, p(prime)),
                count_roots_zp(&poly(c), p(prime)),
                "{c:?} at p = {prime}"
            );
        }
    }

    #[test]
    fn d_set_examples() {
        assert_eq!(d_set_count(5, 2), BigUint::from(10u32));
        assert_eq!(d_set_count(3, 0), BigUint::from(1u32));
        assert_eq!(d_set_count(2, 3), BigUint::zero());
        assert_eq!(d_set_count_u128(200, 3), Some(1_313_400));
    }

    #[test]
    fn partition_examples() {
        assert!(residue_partition_check(&poly(&[-1, 0, 1]), p(5), 2).unwrap());
        assert!(residue_partition_check(&poly(&[0, -1, 0, 1]), p(5), 2).unwrap());
        assert_eq!(d_set_count(count_roots_zp(&poly(&[0, -1, 0, 1]), p(5)).unwrap().total, 2), BigUint::from(3u32));
    }
}
