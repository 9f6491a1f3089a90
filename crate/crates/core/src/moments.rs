//! Exact factorial-moment constants `alpha(n, d)`, `beta(n, d)` and `gamma(d)`.
//!
//! `alpha(n, d)` is `E[Z_d(f)]` for `f` Haar-uniform among monic degree-`n`
//! polynomials over `Z_p`, and `beta(n, d)` the same for monic `f = X^n mod p`.
//! They satisfy a coupled recurrence:
//!
//! ```text
//! alpha(n,d) = p^-n * sum_{fbar monic over F_p} sum_{d_0+..+d_{p-1}=d} prod_r beta(n_r, d_r)
//! beta(n,d)  = p^-C(n,2) alpha(n,d) + (p-1) sum_{d<=s<r<n} p^-C(r+1,2) p^s alpha(s,d)
//! ```
//!
//! where `n_r` is the multiplicity of `r` as a root of `fbar`. Grouping `fbar`
//! by its multiplicity vector `(n_0, .., n_{p-1})` leaves a rootless cofactor
//! of degree `n - sum n_r`, counted by [`no_root_poly_count`]. The inner sum is
//! then the coefficient of `x^s t^d` in `G(x, t)^p` with
//! `G = sum_{m,e} beta(m, e) x^m t^e`, which is what the table accumulates.
//!
//! At `(n, d)` with `n >= 2` the two equations reference each other (through
//! `fbar = (X - r)^n` and the `p^-C(n,2)` term), so each level is a 2x2 solve.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::oracle;
use crate::padic::Prime;

pub type Rational = BigRational;

type XPoly = Vec<Rational>;

/// Monic degree-`m` polynomials over `F_p` without a root in `F_p`, by
/// inclusion-exclusion over the set of roots.
pub fn no_root_poly_count(m: usize, p: Prime) -> BigInt {
    let pb = BigInt::from(p.get());
    (0..=m.min(p.get() as usize)).fold(BigInt::zero(), |acc, j| {
        let term = binomial(pb.clone(), BigInt::from(j)) * num_traits::pow(pb.clone(), m - j);
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// Stirling number of the second kind `S(m, d)`.
pub fn stirling2(m: usize, d: usize) -> BigUint {
    if d > m {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::zero(); d + 1];
    row[0] = BigUint::one();
    for i in 1..=m {
        for k in (1..=d.min(i)).rev() {
            let keep = &row[k] * BigUint::from(k);
            row[k] = keep + &row[k - 1];
        }
        row[0] = BigUint::zero();
    }
    row[d].clone()
}

/// `E[N^m] = sum_{d=1}^m S(m, d) d! E[Z_d]`. `factorial_moments[d - 1]` holds
/// `E[Z_d]`.
pub fn factorial_to_raw_moments(factorial_moments: &[Rational], m: usize) -> Result<Rational> {
    if factorial_moments.len() < m {
        return Err(Error::Precondition(format!(
            "need factorial moments up to d = {m}, got {}",
            factorial_moments.len()
        )));
    }
    let mut fact = BigUint::one();
    let mut acc = Rational::zero();
    for d in 1..=m {
        fact *= BigUint::from(d);
        let w = BigInt::from(stirling2(m, d) * &fact);
        acc += &factorial_moments[d - 1] * Rational::from_integer(w);
    }
    Ok(acc)
}

/// Limiting mean `(p-1)/(p+1)` and variance
/// `(p^2+1)^2 (p-1) / ((p^4+p^3+p^2+p+1)(p+1))` of the root count.
pub fn theoretical_mean_variance(p: Prime) -> (Rational, Rational) {
    let p = BigInt::from(p.get());
    let one = BigInt::one();
    let mean = Rational::new(&p - &one, &p + &one);
    let p2 = &p * &p;
    let num = (&p2 + &one) * (&p2 + &one) * (&p - &one);
    let den = (&p2 * &p2 + &p2 * &p + &p2 + &p + &one) * (&p + &one);
    (mean, Rational::new(num, den))
}

/// `h_p(x) = x log_p(1/x) + (1-x) log_p(1/(1-x))` on `[0, 1)`.
pub fn binary_entropy(x: f64, p: Prime) -> Result<f64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::EntropyDomain(x));
    }
    let lp = (p.get() as f64).ln();
    let term = |y: f64| if y == 0.0 { 0.0 } else { -y * y.ln() / lp };
    Ok(term(x) + term(1.0 - x))
}

/// Error exponent `C = 1/4 - h_p(4 log p * ratio) / 4`, where `ratio` is
/// `limsup d / log n`.
pub fn error_exponent_c(ratio: &Rational, p: Prime) -> Result<f64> {
    let r = ratio
        .to_f64()
        .ok_or_else(|| Error::Precondition("ratio is not representable".into()))?;
    let x = 4.0 * (p.get() as f64).ln() * r;
    Ok(0.25 - 0.25 * binary_entropy(x, p)?)
}

/// `log_2 |x|` for a nonzero rational, without going through `f64` range.
pub fn log2_rational(x: &Rational) -> f64 {
    log2_biguint(x.numer().magnitude()) - log2_biguint(x.denom().magnitude())
}

fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    let top: BigUint = x >> shift;
    top.to_f64().unwrap().log2() + shift as f64
}

/// How the sum over monic polynomials modulo `p` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaSum {
    /// Group by multiplicity vectors weighted by rootless cofactor counts.
    MultiplicityVectors,
    /// Enumerate all `p^n` monic polynomials. Only for tiny `p^n`.
    BruteForce,
}

const BRUTE_FORCE_LIMIT: u128 = 1 << 20;

/// Exact `alpha(n, d)`, `beta(n, d)` for `n <= n_max`, `d <= d_max`, and
/// `gamma(d)` for `d <= d_max`, at one fixed prime.
#[derive(Debug, Clone)]
pub struct MomentTable {
    prime: Prime,
    d_max: usize,
    n_max: usize,
    // indexed [d][n]
    alpha: Vec<Vec<Rational>>,
    beta: Vec<Vec<Rational>>,
    gamma: Vec<Rational>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticRow {
    pub d: usize,
    pub log_beta_over_d2: f64,
    pub log_gamma_over_d2: f64,
    pub log_alpha_over_d2: f64,
}

impl MomentTable {
    /// Table large enough for `gamma(d)`, stability and the geometric-weight
    /// identity up to `d_max` (`n_max = 2 d_max + 3`).
    pub fn new(prime: Prime, d_max: usize) -> Self {
        Self::build(prime, d_max, 2 * d_max + 3, AlphaSum::MultiplicityVectors)
            .expect("multiplicity-vector construction cannot fail")
    }

    pub fn build(prime: Prime, d_max: usize, n_max: usize, method: AlphaSum) -> Result<Self> {
        if n_max < 2 * d_max {
            return Err(Error::Precondition(format!(
                "n_max = {n_max} must be at least 2 d_max = {}",
                2 * d_max
            )));
        }
        if method == AlphaSum::BruteForce {
            let count = (prime.get() as u128).checked_pow(n_max as u32);
            if count.is_none_or(|c| c > BRUTE_FORCE_LIMIT) {
                return Err(Error::Precondition(format!(
                    "brute force over {}^{n_max} polynomials is too large",
                    prime.get()
                )));
            }
        }
        let mut t = MomentTable {
            prime,
            d_max,
            n_max,
            alpha: vec![vec![Rational::zero(); n_max + 1]; d_max + 1],
            beta: vec![vec![Rational::zero(); n_max + 1]; d_max + 1],
            gamma: Vec::new(),
        };
        t.fill(method);
        t.gamma = t.gamma_series();
        Ok(t)
    }

    fn fill(&mut self, method: AlphaSum) {
        let p = self.prime.get() as usize;
        let pr = Rational::from_integer(BigInt::from(p));
        let nm = self.n_max;
        let no_root: Vec<Rational> = (0..=nm)
            .map(|m| Rational::from_integer(no_root_poly_count(m, self.prime)))
            .collect();
        let monic = (method == AlphaSum::BruteForce)
            .then(|| oracle::monic_multiplicity_vectors(nm, self.prime));

        // pow_g[j][a] = [t^a] G^j as a polynomial in x
        let mut pow_g: Vec<Vec<XPoly>> = vec![Vec::new(); p + 1];

        for d in 0..=self.d_max {
            if d == 0 {
                for n in 0..=nm {
                    self.alpha[0][n] = Rational::one();
                    self.beta[0][n] = Rational::one();
                }
                let mut acc = unit_poly(nm);
                pow_g[0].push(acc.clone());
                for row in pow_g.iter_mut().skip(1) {
                    acc = mul_trunc(&acc, &self.beta[0], nm);
                    row.push(acc.clone());
                }
                continue;
            }

            // [t^d] G^p with every beta(., d) still unknown (taken as zero)
            let provisional = self.level_power(&pow_g, d, p, d - 1);
            let e0 = &pow_g[p - 1][0];

            for n in d..=nm {
                if n == 1 {
                    self.alpha[1][1] = Rational::one();
                    self.beta[1][1] = Rational::one();
                    continue;
                }
                let k_known = match &monic {
                    None => {
                        let mut k = Rational::zero();
                        for s in 0..=n {
                            // beta(m, d) for m < n is known; beta(n, d) is the unknown
                            let mut c = provisional[s].clone();
                            let mut conv = Rational::zero();
                            for m in d..=s.min(n - 1) {
                                conv += &self.beta[d][m] * &e0[s - m];
                            }
                            c += &pr * conv;
                            k += &no_root[n - s] * c;
                        }
                        k
                    }
                    Some(vectors) => self.brute_inner_sum(&vectors[n], n, d),
                };
                let c_n = pow_neg(self.prime, n * (n - 1) / 2);
                let mut s_sum = Rational::zero();
                for s in d..n {
                    for r in s + 1..n {
                        s_sum += pow_neg(self.prime, (r + 1) * r / 2)
                            * pow_pos(self.prime, s)
                            * &self.alpha[d][s];
                    }
                }
                s_sum *= Rational::from_integer(BigInt::from(p - 1));
                let p_neg_n = pow_neg(self.prime, n);
                let rhs = &p_neg_n * k_known + &p_neg_n * &pr * &s_sum;
                let det = Rational::one() - &p_neg_n * &pr * &c_n;
                let a = rhs / det;
                self.beta[d][n] = &c_n * &a + s_sum;
                self.alpha[d][n] = a;
            }

            for j in 0..=p {
                let row = self.level_power(&pow_g, d, j, d);
                pow_g[j].push(row);
            }
        }
    }

    /// `[t^d] G^j`, using the level-`b` coefficients of `G` for `b <= upto` only.
    fn level_power(&self, pow_g: &[Vec<XPoly>], d: usize, j: usize, upto: usize) -> XPoly {
        let nm = self.n_max;
        let mut q = zero_poly(nm);
        for i in 1..=j {
            let mut next = mul_trunc(&q, &self.beta[0], nm);
            for b in 1..=upto {
                add_assign(&mut next, &mul_trunc(&pow_g[i - 1][d - b], &self.beta[b], nm));
            }
            q = next;
        }
        q
    }

    /// Sum over all monic degree-`n` polynomials mod p of the t^d coefficient
    /// of `prod_r B_{n_r}(t)`, with `beta(n, d)` itself excluded.
    fn brute_inner_sum(&self, vectors: &[Vec<usize>], n: usize, d: usize) -> Rational {
        let mut k = Rational::zero();
        for v in vectors {
            let mut poly = vec![Rational::zero(); d + 1];
            poly[0] = Rational::one();
            for &n_r in v {
                let mut next = vec![Rational::zero(); d + 1];
                for (a, ca) in poly.iter().enumerate() {
                    if ca.is_zero() {
                        continue;
                    }
                    for b in 0..=(d - a) {
                        if n_r == n && b == d {
                            continue;
                        }
                        let bv = &self.beta[b][n_r];
                        if !bv.is_zero() {
                            next[a + b] += ca * bv;
                        }
                    }
                }
                poly = next;
            }
            k += &poly[d];
        }
        k
    }

    fn gamma_series(&self) -> Vec<Rational> {
        let stable: Vec<Rational> = (0..=self.d_max).map(|d| self.beta[d][2 * d].clone()).collect();
        series_power(&stable, self.prime.get() as usize - 1)
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    fn check(&self, n: usize, d: usize) -> Result<()> {
        if n > self.n_max || d > self.d_max {
            return Err(Error::OutOfTable {
                n,
                d,
                n_max: self.n_max,
                d_max: self.d_max,
            });
        }
        Ok(())
    }

    pub fn alpha(&self, n: usize, d: usize) -> Result<&Rational> {
        self.check(n, d)?;
        Ok(&self.alpha[d][n])
    }

    pub fn beta(&self, n: usize, d: usize) -> Result<&Rational> {
        self.check(n, d)?;
        Ok(&self.beta[d][n])
    }

    pub fn alpha_beta(&self, n: usize, d: usize) -> Result<(Rational, Rational)> {
        Ok((self.alpha(n, d)?.clone(), self.beta(n, d)?.clone()))
    }

    /// `alpha(d) = alpha(2d, d)`.
    pub fn alpha_stable(&self, d: usize) -> Result<&Rational> {
        self.alpha(2 * d, d)
    }

    /// `beta(d) = beta(2d, d)`.
    pub fn beta_stable(&self, d: usize) -> Result<&Rational> {
        self.beta(2 * d, d)
    }

    /// `alpha(n, d)` and `beta(n, d)` agree for `n = 2d, 2d + 1, 2d + 2`.
    pub fn verify_stability(&self, d: usize) -> Result<()> {
        self.check(2 * d + 2, d)?;
        for (name, row) in [("alpha", &self.alpha[d]), ("beta", &self.beta[d])] {
            let base = &row[2 * d];
            for n in [2 * d + 1, 2 * d + 2] {
                if &row[n] != base {
                    return Err(Error::StabilityViolation {
                        d,
                        detail: format!("{name}({n}, {d}) = {} differs from {base}", row[n]),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn gamma(&self, d: usize) -> Result<&Rational> {
        self.gamma.get(d).ok_or(Error::OutOfTable {
            n: 2 * d,
            d,
            n_max: self.n_max,
            d_max: self.d_max,
        })
    }

    pub fn gammas(&self) -> &[Rational] {
        &self.gamma
    }

    /// `sum alpha(d) t^d = (sum beta(d) t^d)^p` and
    /// `gamma(d) = sum_{d_1+..+d_{p-1}=d} prod beta(d_r)` up to `d_max`.
    pub fn series_identity_check(&self, d_max: usize) -> Result<bool> {
        self.check(2 * d_max, d_max)?;
        let stable: Vec<Rational> = (0..=d_max).map(|d| self.beta[d][2 * d].clone()).collect();
        let pth = series_power(&stable, self.prime.get() as usize);
        let alpha_ok = (0..=d_max).all(|d| self.alpha[d][2 * d] == pth[d]);
        let gamma_ok = (0..=d_max).all(|d| {
            let mut total = Rational::zero();
            for_each_composition(d, self.prime.get() as usize - 1, &mut |parts| {
                total += parts
                    .iter()
                    .fold(Rational::one(), |acc, &e| acc * &stable[e]);
            });
            total == self.gamma[d]
        });
        Ok(alpha_ok && gamma_ok)
    }

    /// `beta(d) = (1 - 1/p) sum_{m<n} beta(m,d) p^-m + beta(n,d) p^-n`.
    pub fn beta_geometric_identity(&self, d: usize, n: usize) -> Result<bool> {
        self.check(n, d)?;
        let pinv = Rational::new(BigInt::one(), BigInt::from(self.prime.get()));
        let mut sum = Rational::zero();
        for m in 0..n {
            sum += &self.beta[d][m] * pow_neg(self.prime, m);
        }
        let lhs = (Rational::one() - pinv) * sum + &self.beta[d][n] * pow_neg(self.prime, n);
        Ok(&lhs == self.beta_stable(d)?)
    }

    /// `alpha(d) = (1 - p) sum_{m<n} alpha(m,d) p^m + alpha(n,d) p^n`.
    pub fn alpha_geometric_identity(&self, d: usize, n: usize) -> Result<bool> {
        self.check(n, d)?;
        let pr = Rational::from_integer(BigInt::from(self.prime.get()));
        let mut sum = Rational::zero();
        for m in 0..n {
            sum += &self.alpha[d][m] * pow_pos(self.prime, m);
        }
        let lhs = (Rational::one() - pr) * sum + &self.alpha[d][n] * pow_pos(self.prime, n);
        Ok(&lhs == self.alpha_stable(d)?)
    }

    /// Rows `(d, log_p beta(d)/d^2, log_p gamma(d)/d^2, log_p alpha(d)/d^2)` for
    /// `1 <= d <= d_max`, to set against `-p/(2(p-1))`, `-p/(2(p-1)^2)` and
    /// `-1/(2(p-1))`.
    pub fn asymptotic_table(&self, d_max: usize) -> Result<Vec<AsymptoticRow>> {
        if d_max < 2 {
            return Err(Error::Precondition("asymptotic table needs d_max >= 2".into()));
        }
        self.check(2 * d_max, d_max)?;
        let lp = (self.prime.get() as f64).log2();
        (1..=d_max)
            .map(|d| {
                let d2 = (d * d) as f64;
                let lg = |x: &Rational| -> Result<f64> {
                    if !x.is_positive() {
                        return Err(Error::Precondition(format!("non-positive table value at d = {d}")));
                    }
                    Ok(log2_rational(x) / lp / d2)
                };
                Ok(AsymptoticRow {
                    d,
                    log_beta_over_d2: lg(&self.beta[d][2 * d])?,
                    log_gamma_over_d2: lg(&self.gamma[d])?,
                    log_alpha_over_d2: lg(&self.alpha[d][2 * d])?,
                })
            })
            .collect()
    }

    /// Full table as CSV: `n,d,alpha_num,alpha_den,beta_num,beta_den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,d,alpha_num,alpha_den,beta_num,beta_den\n");
        for d in 0..=self.d_max {
            for n in 0..=self.n_max {
                let a = &self.alpha[d][n];
                let b = &self.beta[d][n];
                out.push_str(&format!(
                    "{n},{d},{},{},{},{}\n",
                    a.numer(),
                    a.denom(),
                    b.numer(),
                    b.denom()
                ));
            }
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<_> = (0..=self.d_max)
            .flat_map(|d| {
                (0..=self.n_max).map(move |n| {
                    json!({
                        "n": n,
                        "d": d,
                        "alpha": rational_json(&self.alpha[d][n]),
                        "beta": rational_json(&self.beta[d][n]),
                    })
                })
            })
            .collect();
        json!({
            "prime": self.prime.get(),
            "d_max": self.d_max,
            "n_max": self.n_max,
            "rows": rows,
            "gamma": self.gamma.iter().map(rational_json).collect::<Vec<_>>(),
        })
    }

    #[doc(hidden)]
    /// Overwrites `gamma(d)`; used to exercise failure reporting.
    pub fn tamper_gamma(&mut self, d: usize, value: Rational) {
        self.gamma[d] = value;
    }
}

/// `{"num": "...", "den": "..."}` with decimal strings.
pub fn rational_json(x: &Rational) -> serde_json::Value {
    json!({ "num": x.numer().to_string(), "den": x.denom().to_string() })
}

fn pow_neg(p: Prime, e: usize) -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(p.get()), e))
}

fn pow_pos(p: Prime, e: usize) -> Rational {
    Rational::from_integer(num_traits::pow(BigInt::from(p.get()), e))
}

fn zero_poly(n: usize) -> XPoly {
    vec![Rational::zero(); n + 1]
}

fn unit_poly(n: usize) -> XPoly {
    let mut v = zero_poly(n);
    v[0] = Rational::one();
    v
}

fn mul_trunc(a: &[Rational], b: &[Rational], n: usize) -> XPoly {
    let mut out = zero_poly(n);
    for (i, x) in a.iter().enumerate().take(n + 1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n + 1 - i) {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn add_assign(a: &mut XPoly, b: &[Rational]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// `(sum s_d t^d)^k` truncated to the length of `s`.
fn series_power(s: &[Rational], k: usize) -> Vec<Rational> {
    let n = s.len();
    let mut acc = vec![Rational::zero(); n];
    if n == 0 {
        return acc;
    }
    acc[0] = Rational::one();
    for _ in 0..k {
        acc = mul_trunc(&acc, s, n - 1);
    }
    acc
}

/// Calls `f` with every weak composition of `d` into `parts` parts.
fn for_each_composition(d: usize, parts: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(left: usize, slots: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slots == 1 {
            cur.push(left);
            f(cur);
            cur.pop();
            return;
        }
        for x in 0..=left {
            cur.push(x);
            rec(left - x, slots - 1, cur, f);
            cur.pop();
        }
    }
    if parts == 0 {
        if d == 0 {
            f(&[]);
        }
        return;
    }
    rec(d, parts, &mut Vec::with_capacity(parts), f);
}
