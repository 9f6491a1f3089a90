//! Slow reference computations by direct enumeration, used to cross-check the
//! fast paths.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::moments::{MomentTable, Rational};
use crate::padic::{PAdicApproxPolynomial, Prime};
use crate::roots::HenselianReport;

const ENUMERATION_LIMIT: u64 = 1 << 22;

fn check_size(p: Prime, e: usize) -> Result<u64> {
    (p.get() as u128)
        .checked_pow(e as u32)
        .filter(|&c| c <= ENUMERATION_LIMIT as u128)
        .map(|c| c as u64)
        .ok_or_else(|| Error::Precondition(format!("{}^{e} cases are too many to enumerate", p.get())))
}

/// Every monic degree-`n` polynomial over `F_p`, low coefficient first, with
/// the leading 1 included.
pub fn monic_polys_mod_p(n: usize, p: Prime) -> Result<Vec<Vec<u64>>> {
    let count = check_size(p, n)?;
    let pv = p.get();
    Ok((0..count)
        .map(|mut idx| {
            let mut c = Vec::with_capacity(n + 1);
            for _ in 0..n {
                c.push(idx % pv);
                idx /= pv;
            }
            c.push(1);
            c
        })
        .collect())
}

/// Multiplicity of each `r in F_p` as a root of a nonzero polynomial over `F_p`.
pub fn root_multiplicities_mod_p(coeffs: &[u64], p: Prime) -> Vec<usize> {
    let pv = p.get();
    (0..pv)
        .map(|r| {
            let mut cur: Vec<u64> = coeffs.to_vec();
            let mut mult = 0;
            while cur.len() > 1 {
                // synthetic division by X - r
                let n = cur.len() - 1;
                let mut q = vec![0u64; n];
                let mut carry = 0u64;
                for i in (0..=n).rev() {
                    let v = (cur[i] + carry) % pv;
                    if i == 0 {
                        carry = v;
                    } else {
                        q[i - 1] = v;
                        carry = v * r % pv;
                    }
                }
                if carry != 0 {
                    break;
                }
                mult += 1;
                cur = q;
            }
            mult
        })
        .collect()
}

/// For each `n <= n_max`, the multiplicity vectors of all `p^n` monic
/// degree-`n` polynomials over `F_p`.
pub fn monic_multiplicity_vectors(n_max: usize, p: Prime) -> Vec<Vec<Vec<usize>>> {
    (0..=n_max)
        .map(|n| {
            monic_polys_mod_p(n, p)
                .expect("caller bounds p^n_max")
                .iter()
                .map(|c| root_multiplicities_mod_p(c, p))
                .collect()
        })
        .collect()
}

/// Monic degree-`m` polynomials over `F_p` with no root in `F_p`, by counting.
pub fn no_root_poly_count_brute(m: usize, p: Prime) -> Result<u64> {
    Ok(monic_polys_mod_p(m, p)?
        .iter()
        .filter(|c| root_multiplicities_mod_p(c, p).iter().all(|&k| k == 0))
        .count() as u64)
}

/// `alpha(n, d)` evaluated straight from its defining sum over all monic
/// polynomials modulo `p`, with every `beta` taken from `table`.
pub fn alpha_direct_sum(table: &MomentTable, n: usize, d: usize) -> Result<Rational> {
    let p = table.prime();
    let mut total = Rational::zero();
    for c in monic_polys_mod_p(n, p)? {
        let mult = root_multiplicities_mod_p(&c, p);
        let mut poly = vec![Rational::zero(); d + 1];
        poly[0] = Rational::one();
        for &n_r in &mult {
            let mut next = vec![Rational::zero(); d + 1];
            for (a, ca) in poly.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for b in 0..=(d - a) {
                    next[a + b] += ca * table.beta(n_r, b)?;
                }
            }
            poly = next;
        }
        total += &poly[d];
    }
    Ok(total / Rational::from_integer(num_traits::pow(BigInt::from(p.get()), n)))
}

/// k-Henselian count straight from the definition: every `x mod p^k` with
/// `g'(x) != 0 mod p^k` is tested against all of its lifts modulo `p^(2k-1)`.
pub fn henselian_count_brute(g: &PAdicApproxPolynomial, k: u32) -> Result<HenselianReport> {
    if k == 0 || g.precision() < 2 * k - 1 {
        return Err(Error::Precondition("need 1 <= k and precision >= 2k - 1".into()));
    }
    let p = g.prime();
    check_size(p, (2 * k - 1) as usize)?;
    let pk = p.pow(k).to_u64().unwrap();
    let lifts = p.pow(k - 1).to_u64().unwrap();
    let top = p.pow(2 * k - 1);
    let small = p.pow(k);
    let coeffs = g.residues();
    let eval = |x: u64, m: &BigUint| -> BigUint {
        let xb = BigUint::from(x);
        coeffs.iter().rev().fold(BigUint::zero(), |acc, c| (acc * &xb + c) % m)
    };
    let eval_d = |x: u64, m: &BigUint| -> BigUint {
        let xb = BigUint::from(x);
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(BigUint::zero(), |acc, (i, c)| (acc * &xb + c * BigUint::from(i)) % m)
    };
    let mut count = 0;
    let mut all_simple = true;
    for x in 0..pk {
        let simple = !eval_d(x, &small).is_zero();
        if !simple {
            if eval(x, &small).is_zero() {
                all_simple = false;
            }
            continue;
        }
        if (0..lifts).any(|t| eval(x + pk * t, &top).is_zero()) {
            count += 1;
        }
    }
    Ok(HenselianReport {
        henselian_count: count,
        all_simple,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::no_root_poly_count;
    use crate::padic::IntPolynomial;
    use crate::roots::count_henselian_roots;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn multiplicities() {
        // (X - 1)^2 X over F_3 = X^3 - 2X^2 + X = X^3 + X^2 + X
        assert_eq!(root_multiplicities_mod_p(&[0, 1, 1, 1], p(3)), vec![1, 2, 0]);
        assert_eq!(root_multiplicities_mod_p(&[1, 1, 1], p(2)), vec![0, 0]);
        assert_eq!(root_multiplicities_mod_p(&[0, 0, 0, 1], p(5)), vec![3, 0, 0, 0, 0]);
    }

    #[test]
    fn rootless_counts_agree() {
        for prime in [2u64, 3, 5] {
            for m in 0..=6 {
                if (prime as u128).pow(m as u32) > 20_000 {
                    continue;
                }
                assert_eq!(
                    BigInt::from(no_root_poly_count_brute(m, p(prime)).unwrap()),
                    no_root_poly_count(m, p(prime)),
                    "p = {prime}, m = {m}"
                );
            }
        }
    }

    #[test]
    fn henselian_brute_agrees_on_examples() {
        let cases: &[(&[i64], u64, u32, u32)] = &[
            (&[-1, 0, 1], 3, 7, 4),
            (&[0, 0, 1], 2, 3, 2),
            (&[-17, 0, 1], 2, 5, 3),
            (&[6, -5, 1], 2, 7, 4),
            (&[-2, 0, 0, 1], 5, 5, 3),
        ];
        for &(c, prime, prec, k) in cases {
            let g = PAdicApproxPolynomial::from_int_poly(&IntPolynomial::from_i64s(c), p(prime), prec).unwrap();
            assert_eq!(henselian_count_brute(&g, k).unwrap(), count_henselian_roots(&g, k).unwrap());
        }
    }
}
