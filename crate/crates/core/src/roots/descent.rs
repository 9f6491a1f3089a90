//! Root descent through residue discs `r + pZ_p`.
//!
//! At each disc, a simple root of the reduction modulo `p` lifts to exactly one
//! root; a multiple root sends us into the rescaled polynomial `f(r + pX) / p^m`.

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::padic::{IntPolynomial, Prime};
use crate::residue::{eval_derivative_small, eval_small, Powers, Residue};

/// Precision ran out before every disc was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Exhausted;

/// Per-residue counts for a polynomial known modulo `p^prec`.
///
/// Exact whenever it returns `Ok`: every counted root is simple in its disc
/// and every pruned disc provably holds no root. Each rescaling consumes at
/// least one digit, so the recursion depth is at most `prec`.
pub(crate) fn descend_mod<R: Residue>(
    coeffs: &[R],
    prec: u32,
    powers: &Powers<R>,
) -> std::result::Result<Vec<usize>, Exhausted> {
    let p = powers.p;
    let low: Vec<u64> = coeffs.iter().map(|c| c.rem_u64(p)).collect();
    let mut per = vec![0usize; p as usize];
    for r in 0..p {
        if eval_small(&low, r, p) != 0 {
            continue;
        }
        if eval_derivative_small(&low, r, p) != 0 {
            per[r as usize] = 1;
            continue;
        }
        let (h, rest) = rescale(coeffs, r, prec, powers)?;
        per[r as usize] = descend_mod(&h, rest, powers)?.iter().sum();
    }
    Ok(per)
}

/// `f(r + pX) / p^m` modulo `p^(prec - m)`, keeping only the coefficients that
/// can be nonzero at that precision.
fn rescale<R: Residue>(
    coeffs: &[R],
    r: u64,
    prec: u32,
    powers: &Powers<R>,
) -> std::result::Result<(Vec<R>, u32), Exhausted> {
    let m = powers.pow(prec);
    let n = coeffs.len();
    let keep = n.min(prec as usize);
    let mut a: Vec<R> = coeffs.to_vec();
    let rr = R::from_u64(r).rem(m);
    if r != 0 {
        for i in 0..keep {
            for k in (i..n - 1).rev() {
                let t = a[k + 1].mul_mod(&rr, m);
                a[k] = a[k].add_mod(&t, m);
            }
        }
    }
    a.truncate(keep);
    for (j, c) in a.iter_mut().enumerate() {
        *c = c.mul_mod(powers.pow(j as u32), m);
    }
    let shift = a
        .iter()
        .filter_map(|c| powers.valuation(c, prec))
        .min()
        .ok_or(Exhausted)?;
    let rest = prec - shift;
    let div = powers.pow(shift).to_biguint();
    let out = a
        .into_iter()
        .map(|c| R::from_biguint(&(c.to_biguint() / &div)))
        .collect();
    Ok((out, rest))
}

/// Descent modulo the largest power of `p` that fits in a machine word.
pub(crate) fn descend_word(f: &IntPolynomial, p: Prime) -> Option<Vec<usize>> {
    let k0 = p.max_u64_precision();
    let powers: Powers<u64> = Powers::new(p.get(), k0);
    let m = *powers.pow(k0);
    let coeffs: Vec<u64> = f.coeffs().iter().map(|c| u64::from_bigint(c, &m)).collect();
    descend_mod(&coeffs, k0, &powers).ok()
}

/// Tries the word-sized precision first, then wider `BigUint` precisions.
pub(crate) fn descend_with_ladder(f: &IntPolynomial, p: Prime) -> Option<Vec<usize>> {
    if let Some(per) = descend_word(f, p) {
        return Some(per);
    }
    let k0 = p.max_u64_precision();
    for mult in [4u32, 16, 64] {
        let k = k0 * mult;
        let powers: Powers<BigUint> = Powers::new(p.get(), k);
        let m = powers.pow(k).clone();
        let coeffs: Vec<BigUint> = f.coeffs().iter().map(|c| BigUint::from_bigint(c, &m)).collect();
        if let Ok(per) = descend_mod(&coeffs, k, &powers) {
            return Some(per);
        }
    }
    None
}

/// Word-sized descent for small integer coefficients, skipping any big-integer
/// conversion.
pub(crate) fn descend_i64(coeffs: &[i64], p: Prime) -> Option<Vec<usize>> {
    let k0 = p.max_u64_precision();
    let powers: Powers<u64> = Powers::new(p.get(), k0);
    let m = *powers.pow(k0);
    let reduced: Vec<u64> = coeffs
        .iter()
        .map(|&c| (c as i128).rem_euclid(m as i128) as u64)
        .collect();
    descend_mod(&reduced, k0, &powers).ok()
}

/// Exact descent on a squarefree polynomial with an explicit depth budget.
pub(crate) fn descend_exact(f: &IntPolynomial, p: Prime, budget: u64) -> Result<Vec<usize>> {
    let mut per = vec![0usize; p.get() as usize];
    descend_exact_into(f, p, budget, 0, &mut per, None)?;
    Ok(per)
}

fn descend_exact_into(
    f: &IntPolynomial,
    p: Prime,
    budget: u64,
    depth: u64,
    per: &mut [usize],
    top: Option<usize>,
) -> Result<()> {
    if depth > budget {
        return Err(Error::DepthBudgetExceeded { budget });
    }
    let df = f.derivative();
    for r in 0..p.get() {
        let rb = BigInt::from(r);
        if f.eval_mod(&rb, p, 1) != BigUint::default() {
            continue;
        }
        let slot = top.unwrap_or(r as usize);
        if df.eval_mod(&rb, p, 1) != BigUint::default() {
            per[slot] += 1;
            continue;
        }
        let (g, _) = f.shift_scale(&rb, p).content_compress(p)?;
        descend_exact_into(&g, p, budget, depth + 1, per, Some(slot))?;
    }
    Ok(())
}
