//! Exact gcd, squarefree part and discriminant valuation over `Z[X]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::padic::{valuation, IntPolynomial, Prime};

/// Mersenne prime used for the modular coprimality certificate.
const CERT_PRIME: u64 = (1 << 61) - 1;

/// Primitive integer polynomial with the same roots as `f`, each simple.
///
/// `f / gcd(f, f')` with content removed and positive leading coefficient.
/// The zero polynomial is returned unchanged.
pub fn squarefree_part(f: &IntPolynomial) -> IntPolynomial {
    let Some(deg) = f.degree() else {
        return f.clone();
    };
    let f = f.primitive_part();
    if deg == 0 {
        return f;
    }
    let df = f.derivative();

    let lc_mod = f.leading().unwrap().mod_floor(&BigInt::from(CERT_PRIME));
    if !lc_mod.is_zero() {
        let fq = reduce(&f);
        let dq = reduce(&df);
        let gq = gcd_mod(fq, dq);
        if gq.len() == 1 {
            // gcd mod q is 1 and q does not divide lc(f): Res(f, f') != 0
            return f;
        }
        if f.leading().is_some_and(|l| l.abs().is_one()) {
            if let Some(cand) = lift_symmetric(&gq) {
                if let (Some(h), Some(_)) = (div_exact(&f, &cand), div_exact(&df, &cand)) {
                    return h.primitive_part();
                }
            }
        }
    }

    let g = gcd(&f, &df);
    div_exact(&f, &g)
        .expect("gcd divides f over Z by Gauss's lemma")
        .primitive_part()
}

/// Primitive gcd over `Z[X]` via the primitive polynomial remainder sequence.
pub fn gcd(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let mut a = a.primitive_part();
    let mut b = b.primitive_part();
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = pseudo_rem(&a, &b);
        a = b;
        b = r.primitive_part();
    }
    if a.degree() == Some(0) {
        IntPolynomial::from_i64s(&[1])
    } else {
        a
    }
}

/// Pseudo-remainder: `lc(b)^e * a mod b` for a suitable `e`.
pub fn pseudo_rem(a: &IntPolynomial, b: &IntPolynomial) -> IntPolynomial {
    let db = b.degree().expect("division by zero polynomial");
    let lb = b.leading().unwrap().clone();
    let bc = b.coeffs();
    let mut r: Vec<BigInt> = a.coeffs().to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, c) in bc.iter().enumerate() {
            r[shift + j] -= &lr * c;
        }
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    IntPolynomial::new(r)
}

/// `a / b` when `b` divides `a` in `Z[X]`.
pub fn div_exact(a: &IntPolynomial, b: &IntPolynomial) -> Option<IntPolynomial> {
    let db = b.degree()?;
    if a.is_zero() {
        return Some(IntPolynomial::zero());
    }
    let da = a.degree().unwrap();
    if da < db {
        return None;
    }
    let lb = b.leading().unwrap();
    let bc = b.coeffs();
    let mut r: Vec<BigInt> = a.coeffs().to_vec();
    let mut q = vec![BigInt::zero(); da - db + 1];
    for shift in (0..=da - db).rev() {
        let top = &r[shift + db];
        if top.is_zero() {
            continue;
        }
        let (qc, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        for (j, c) in bc.iter().enumerate() {
            r[shift + j] -= &qc * c;
        }
        q[shift] = qc;
    }
    if r.iter().all(Zero::is_zero) {
        Some(IntPolynomial::new(q))
    } else {
        None
    }
}

/// Resultant via fraction-free (Bareiss) elimination of the Sylvester matrix.
pub fn resultant(a: &IntPolynomial, b: &IntPolynomial) -> BigInt {
    let (Some(m), Some(n)) = (a.degree(), b.degree()) else {
        return BigInt::zero();
    };
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    // rows hold coefficients from the leading term down
    for i in 0..n {
        for (j, c) in a.coeffs().iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.coeffs().iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    bareiss_det(mat)
}

fn bareiss_det(mut mat: Vec<Vec<BigInt>>) -> BigInt {
    let n = mat.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if mat[k][k].is_zero() {
            match (k + 1..n).find(|&i| !mat[i][k].is_zero()) {
                Some(i) => {
                    mat.swap(k, i);
                    sign = !sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &mat[i][j] * &mat[k][k] - &mat[i][k] * &mat[k][j];
                mat[i][j] = v / &prev;
            }
        }
        prev = mat[k][k].clone();
    }
    let det = mat[n - 1][n - 1].clone();
    if sign {
        -det
    } else {
        det
    }
}

/// `v_p(disc f)`, or `None` if `f` has a repeated factor (zero discriminant).
pub fn discriminant_valuation(f: &IntPolynomial, p: Prime) -> Option<u64> {
    let deg = f.degree()?;
    if deg <= 1 {
        return Some(0);
    }
    let res = resultant(f, &f.derivative());
    let vr = valuation(&res, p).finite()?;
    let vl = valuation(f.leading().unwrap(), p).finite().unwrap();
    Some(vr - vl)
}

fn reduce(f: &IntPolynomial) -> Vec<u64> {
    let q = BigInt::from(CERT_PRIME);
    let mut v: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| match c.to_i64() {
            Some(s) => (s as i128).rem_euclid(CERT_PRIME as i128) as u64,
            None => c.mod_floor(&q).to_u64().unwrap(),
        })
        .collect();
    trim(&mut v);
    v
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

#[inline]
fn mulq(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % CERT_PRIME as u128) as u64
}

fn invq(a: u64) -> u64 {
    let mut base = a;
    let mut e = CERT_PRIME - 2;
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulq(acc, base);
        }
        base = mulq(base, base);
        e >>= 1;
    }
    acc
}

/// Monic gcd over `F_q`. Zero inputs are handled as in any Euclidean domain.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>) -> Vec<u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = invq(*b.last().unwrap());
        let db = b.len() - 1;
        while a.len() > db && !a.is_empty() {
            let da = a.len() - 1;
            let factor = mulq(a[da], inv);
            let shift = da - db;
            for (j, &c) in b.iter().enumerate() {
                let sub = mulq(factor, c);
                a[shift + j] = (a[shift + j] + CERT_PRIME - sub) % CERT_PRIME;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    if let Some(&lead) = a.last() {
        let inv = invq(lead);
        a.iter_mut().for_each(|c| *c = mulq(*c, inv));
    }
    a
}

fn lift_symmetric(g: &[u64]) -> Option<IntPolynomial> {
    let half = CERT_PRIME / 2;
    let coeffs = g
        .iter()
        .map(|&c| {
            if c > half {
                BigInt::from(c) - BigInt::from(CERT_PRIME)
            } else {
                BigInt::from(c)
            }
        })
        .collect();
    let out = IntPolynomial::new(coeffs);
    (!out.is_zero()).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64s(c)
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(squarefree_part(&poly(&[1, -2, 1])), poly(&[-1, 1]));
        assert_eq!(squarefree_part(&poly(&[1, 1, 1])), poly(&[1, 1, 1]));
        assert_eq!(squarefree_part(&poly(&[0, 0, -1, 1])), poly(&[0, -1, 1]));
    }

    #[test]
    fn squarefree_non_monic_uses_prs() {
        // 4 (X - 1)^2 (2X + 1)
        let f = poly(&[-1, 1]).mul(&poly(&[-1, 1])).mul(&poly(&[1, 2])).scalar_mul(&4.into());
        assert_eq!(squarefree_part(&f), poly(&[-1, 1]).mul(&poly(&[1, 2])));
    }

    #[test]
    fn squarefree_high_multiplicity_monic() {
        // X^3 (X + 1)^4 (X^2 + 1)
        let mut f = poly(&[0, 0, 0, 1]);
        for _ in 0..4 {
            f = f.mul(&poly(&[1, 1]));
        }
        f = f.mul(&poly(&[1, 0, 1]));
        let expect = poly(&[0, 1]).mul(&poly(&[1, 1])).mul(&poly(&[1, 0, 1]));
        assert_eq!(squarefree_part(&f), expect);
    }

    #[test]
    fn gcd_and_division() {
        let a = poly(&[-1, 0, 1]);
        let b = poly(&[-1, 1]).mul(&poly(&[2, 1]));
        assert_eq!(gcd(&a, &b), poly(&[-1, 1]));
        assert_eq!(div_exact(&a, &poly(&[1, 1])), Some(poly(&[-1, 1])));
        assert_eq!(div_exact(&a, &poly(&[2, 1])), None);
        assert_eq!(gcd(&poly(&[1, 1]), &poly(&[2, 1])), poly(&[1]));
    }

    #[test]
    fn resultant_and_discriminant() {
        // disc(X^2 + bX + c) = b^2 - 4c
        let f = poly(&[1, 0, 1]);
        assert_eq!(resultant(&f, &f.derivative()), BigInt::from(4));
        assert_eq!(discriminant_valuation(&f, Prime::new(2).unwrap()), Some(2));
        assert_eq!(discriminant_valuation(&poly(&[1, -2, 1]), Prime::new(2).unwrap()), None);
        // Res(X - 2, X - 5) = -3 up to sign convention
        assert_eq!(resultant(&poly(&[-2, 1]), &poly(&[-5, 1])).abs(), BigInt::from(3));
        // disc(X^3 - X) = 4
        let g = poly(&[0, -1, 0, 1]);
        assert_eq!(discriminant_valuation(&g, Prime::new(2).unwrap()), Some(2));
    }
}
