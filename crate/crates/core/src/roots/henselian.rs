//! Counting k-Henselian roots of a polynomial known modulo `p^K`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::PAdicApproxPolynomial;
use crate::residue::{eval, eval_derivative, Powers, Residue};

pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HenselianReport {
    pub henselian_count: usize,
    /// No `x` with `g(x) = g'(x) = 0 mod p^k` was met.
    pub all_simple: bool,
    pub k: u32,
}

pub fn count_henselian_roots(g: &PAdicApproxPolynomial, k: u32) -> Result<HenselianReport> {
    count_henselian_roots_with_cap(g, k, DEFAULT_NODE_CAP)
}

/// A residue `x mod p^k` is k-Henselian when `g'(x) != 0 mod p^k` and some lift
/// `y mod p^(2k-1)` has `g(y) = 0 mod p^(2k-1)`.
///
/// Roots are grown one digit at a time from the roots modulo `p`; only
/// residues that stay roots are expanded. At depth `k` the lift condition is
/// decided in closed form: with `v = v_p(g'(x)) < k`, a lift exists iff
/// `p^(k+v) | g(x)`.
pub fn count_henselian_roots_with_cap(
    g: &PAdicApproxPolynomial,
    k: u32,
    node_cap: usize,
) -> Result<HenselianReport> {
    if k == 0 {
        return Err(Error::Precondition("Henselian level must be at least 1".into()));
    }
    let needed = 2 * k - 1;
    if g.precision() < needed {
        return Err(Error::PrecisionTooLow {
            precision: g.precision(),
            level: k,
            needed,
        });
    }
    let p = g.prime();
    if needed <= p.max_u64_precision() {
        dfs::<u64>(g, k, node_cap)
    } else {
        dfs::<BigUint>(g, k, node_cap)
    }
}

fn dfs<R: Residue>(g: &PAdicApproxPolynomial, k: u32, node_cap: usize) -> Result<HenselianReport> {
    let top = 2 * k - 1;
    let powers: Powers<R> = Powers::new(g.prime().get(), top);
    let m = powers.pow(top).clone();
    let coeffs: Vec<R> = g
        .residues()
        .iter()
        .map(|r| R::from_biguint(r).rem(&m))
        .collect();
    let p = powers.p;

    let mut count = 0usize;
    let mut all_simple = true;
    let mut nodes = 0usize;
    // (x, j): x < p^j and g(x) = 0 mod p^j
    let mut stack: Vec<(R, u32)> = vec![(R::from_u64(0), 0)];
    while let Some((x, j)) = stack.pop() {
        nodes += 1;
        if nodes > node_cap {
            return Err(Error::NodeCapExceeded { cap: node_cap });
        }
        if j == k {
            let d = eval_derivative(&coeffs, &x, &m);
            match powers.valuation(&d, k) {
                None => all_simple = false,
                Some(v) => {
                    let val = eval(&coeffs, &x, &m);
                    let ok = match powers.valuation(&val, top) {
                        None => true,
                        Some(w) => w >= k + v,
                    };
                    if ok {
                        count += 1;
                    }
                }
            }
            continue;
        }
        let step = powers.pow(j);
        for t in 0..p {
            let y = x.add_mod(&R::from_u64(t).mul_mod(step, &m), &m);
            let val = eval(&coeffs, &y, &m);
            let root = match powers.valuation(&val, top) {
                None => true,
                Some(w) => w > j,
            };
            if root {
                stack.push((y, j + 1));
            }
        }
    }
    Ok(HenselianReport {
        henselian_count: count,
        all_simple,
        k,
    })
}
