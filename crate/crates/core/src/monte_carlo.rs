//! Sampling experiments: estimate `E[Z_d(f)]` for random monic polynomials and
//! compare with the exact constants from [`crate::moments`].
//!
//! Every worker draws from its own ChaCha8 stream `(seed, worker index)` and
//! fills a fixed quota of accepted samples, so a report depends only on the
//! seed, the worker count and the configuration. All accumulators are exact
//! integers.

use std::thread;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::moments::{rational_json, MomentTable, Rational};
use crate::padic::{IntPolynomial, PAdicApproxPolynomial, Prime};
use crate::roots::{count_henselian_roots, count_roots_i64, d_set_count_u128};

/// Default Henselian level for Haar models.
pub const DEFAULT_HENSELIAN_LEVEL: u32 = 20;
/// Default additive slack in the statistical pass rule.
pub const DEFAULT_SLACK: f64 = 0.02;
const MAX_ESCALATIONS: u32 = 3;

/// Law of the non-leading coefficients `xi_0, ..., xi_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub enum CoeffKind {
    /// Integers drawn with the given exact probabilities.
    FiniteSupport {
        values: Vec<i64>,
        probabilities: Vec<Rational>,
    },
    /// Haar measure on `Z_p`, sampled modulo `p^precision`.
    Haar { precision: u32 },
    /// Haar measure on `pZ_p`, sampled modulo `p^precision`.
    HaarMultipleOfP { precision: u32 },
    /// Uniform on `Upsilon_k`: coefficient `i` is `p^i a_i` with `a_i` uniform
    /// modulo `p^(k-i)`. The polynomial is `f(pX) mod p^k` for Haar `f`, so
    /// the leading term is `p^n X^n`.
    Upsilon { level: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoeffDistribution {
    pub prime: Prime,
    pub kind: CoeffKind,
}

impl CoeffDistribution {
    pub fn finite_support(prime: Prime, values: Vec<i64>, probabilities: Vec<Rational>) -> Result<Self> {
        let dist = CoeffDistribution {
            prime,
            kind: CoeffKind::FiniteSupport { values, probabilities },
        };
        dist.weights()?;
        Ok(dist)
    }

    /// Equal mass on each listed value.
    pub fn uniform(prime: Prime, values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let q = Rational::new(BigInt::one(), BigInt::from(values.len()));
        let probs = vec![q; values.len()];
        Self::finite_support(prime, values, probs)
    }

    pub fn plus_minus_one(prime: Prime) -> Self {
        Self::uniform(prime, vec![-1, 1]).expect("valid support")
    }

    pub fn haar(prime: Prime, precision: u32) -> Self {
        CoeffDistribution {
            prime,
            kind: CoeffKind::Haar { precision },
        }
    }

    pub fn haar_multiple_of_p(prime: Prime, precision: u32) -> Self {
        CoeffDistribution {
            prime,
            kind: CoeffKind::HaarMultipleOfP { precision },
        }
    }

    pub fn upsilon(prime: Prime, level: u32) -> Self {
        CoeffDistribution {
            prime,
            kind: CoeffKind::Upsilon { level },
        }
    }

    /// Integer weights over a common denominator for finite-support laws.
    fn weights(&self) -> Result<Option<(Vec<i64>, Vec<u64>)>> {
        let CoeffKind::FiniteSupport { values, probabilities } = &self.kind else {
            return Ok(None);
        };
        if values.is_empty() || values.len() != probabilities.len() {
            return Err(Error::InvalidDistribution(
                "need one probability per value and a nonempty support".into(),
            ));
        }
        if probabilities.iter().any(Signed::is_negative) {
            return Err(Error::InvalidDistribution("negative probability".into()));
        }
        if probabilities.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::InvalidDistribution("probabilities must sum to 1".into()));
        }
        let den = probabilities
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let weights = probabilities
            .iter()
            .map(|q| (q.numer() * (&den / q.denom())).to_u64())
            .collect::<Option<Vec<u64>>>()
            .filter(|_| den.to_u64().is_some())
            .ok_or_else(|| Error::InvalidDistribution("probability denominators are too large".into()))?;
        Ok(Some((values.clone(), weights)))
    }

    pub fn describe(&self) -> serde_json::Value {
        match &self.kind {
            CoeffKind::FiniteSupport { values, probabilities } => json!({
                "kind": "finite-support",
                "values": values,
                "probabilities": probabilities.iter().map(rational_json).collect::<Vec<_>>(),
            }),
            CoeffKind::Haar { precision } => json!({ "kind": "haar", "precision": precision }),
            CoeffKind::HaarMultipleOfP { precision } => {
                json!({ "kind": "haar-multiple-of-p", "precision": precision })
            }
            CoeffKind::Upsilon { level } => json!({ "kind": "upsilon", "level": level }),
        }
    }

    /// Probability that a coefficient is `0` exactly.
    fn mass_at_zero(&self) -> Rational {
        match &self.kind {
            CoeffKind::FiniteSupport { values, probabilities } => values
                .iter()
                .zip(probabilities)
                .filter(|(v, _)| **v == 0)
                .map(|(_, q)| q.clone())
                .sum(),
            _ => Rational::zero(),
        }
    }
}

/// `tau = 1 - sum_x Pr(xi = x mod p)^2`. Zero means the coefficients are
/// constant modulo `p`, which the main theorem excludes.
pub fn tau_diagnostic(dist: &CoeffDistribution) -> Result<Rational> {
    let p = dist.prime.get();
    let tau = match &dist.kind {
        CoeffKind::FiniteSupport { values, probabilities } => {
            let mut mass = vec![Rational::zero(); p as usize];
            for (v, q) in values.iter().zip(probabilities) {
                mass[(*v as i128).rem_euclid(p as i128) as usize] += q;
            }
            Rational::one() - mass.iter().map(|m| m * m).sum::<Rational>()
        }
        CoeffKind::Haar { .. } => Rational::one() - Rational::new(BigInt::one(), BigInt::from(p)),
        CoeffKind::HaarMultipleOfP { .. } | CoeffKind::Upsilon { .. } => {
            return Err(Error::Precondition(
                "tau is defined for finite-support and Haar coefficients".into(),
            ))
        }
    };
    if tau.is_zero() {
        return Err(Error::AssumptionViolated(
            "collision deficit tau is 0: coefficients are constant modulo p".into(),
        ));
    }
    Ok(tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conditioning {
    None,
    /// Keep only samples whose constant term is a `p`-adic unit.
    UnitConstantTerm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub distribution: CoeffDistribution,
    pub degree: usize,
    pub d: usize,
    pub sample_count: u64,
    pub seed: u64,
    pub workers: usize,
    pub condition: Conditioning,
    /// Henselian level `k` for Haar models; samples are drawn modulo
    /// `p^(2k-1)` unless the distribution asks for more.
    pub henselian_level: u32,
}

impl ExperimentConfig {
    pub fn new(distribution: CoeffDistribution, degree: usize, d: usize, sample_count: u64) -> Self {
        ExperimentConfig {
            distribution,
            degree,
            d,
            sample_count,
            seed: 0,
            workers: 1,
            condition: Conditioning::None,
            henselian_level: DEFAULT_HENSELIAN_LEVEL,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_condition(mut self, condition: Conditioning) -> Self {
        self.condition = condition;
        self
    }

    pub fn with_henselian_level(mut self, k: u32) -> Self {
        self.henselian_level = k;
        self
    }

    pub fn prime(&self) -> Prime {
        self.distribution.prime
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::InvalidConfig("sample_count must be at least 1".into()));
        }
        if self.degree == 0 {
            return Err(Error::InvalidConfig("degree must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be at least 1".into()));
        }
        self.distribution.weights()?;
        let k = self.henselian_level;
        match self.distribution.kind {
            CoeffKind::Haar { precision } | CoeffKind::HaarMultipleOfP { precision } => {
                if k == 0 {
                    return Err(Error::InvalidConfig("Henselian level must be at least 1".into()));
                }
                if precision < 2 * k - 1 {
                    return Err(Error::InvalidConfig(format!(
                        "Haar precision {precision} is below 2k - 1 = {} for k = {k}",
                        2 * k - 1
                    )));
                }
            }
            CoeffKind::Upsilon { level } if level < 2 => {
                return Err(Error::InvalidConfig(format!(
                    "Upsilon level {level} leaves no Henselian level (need k >= 2)"
                )));
            }
            _ => {}
        }
        if self.condition == Conditioning::UnitConstantTerm && !self.unit_possible() {
            return Err(Error::InvalidConfig(
                "conditioning on a unit constant term is impossible: every coefficient is divisible by p".into(),
            ));
        }
        Ok(())
    }

    fn unit_possible(&self) -> bool {
        let p = self.prime().get() as i64;
        match &self.distribution.kind {
            CoeffKind::FiniteSupport { values, probabilities } => values
                .iter()
                .zip(probabilities)
                .any(|(v, q)| v % p != 0 && q.is_positive()),
            CoeffKind::Haar { .. } | CoeffKind::Upsilon { .. } => true,
            CoeffKind::HaarMultipleOfP { .. } => false,
        }
    }

    pub fn describe(&self) -> serde_json::Value {
        json!({
            "distribution": self.distribution.describe(),
            "degree": self.degree,
            "d": self.d,
            "sample_count": self.sample_count,
            "workers": self.workers,
            "condition": self.condition,
            "henselian_level": self.henselian_level,
        })
    }
}

/// Sums over the accepted samples of `N`, `N^2`, `Z_1 = N` and `Z_2 = C(N, 2)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct RootSums {
    pub n: u128,
    pub n_sq: u128,
    pub z1: u128,
    pub z2: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub mean: f64,
    pub stderr: f64,
    pub samples_used: u64,
    pub samples_rejected: u64,
    #[serde(serialize_with = "ser_opt_rational")]
    pub target: Option<Rational>,
    pub z_score: Option<f64>,
    /// Upper bound on how far uncertified Henselian counts can pull the mean
    /// below the true value. Zero for exact counting.
    pub bias_bound: f64,
    /// Samples whose Henselian count stayed uncertified after escalation.
    pub uncertified: u64,
    pub seed: u64,
    pub workers: usize,
    pub sum_zd: u128,
    pub sum_zd_sq: u128,
    pub root_sums: RootSums,
}

impl EstimateReport {
    /// `|mean - target| <= 4 stderr + slack + bias_bound`. Without a target
    /// there is nothing to check and the result is `false`.
    pub fn passes(&self, slack: f64) -> bool {
        match &self.target {
            Some(t) => (self.mean - t.to_f64().unwrap_or(f64::NAN)).abs()
                <= 4.0 * self.stderr + slack + self.bias_bound,
            None => false,
        }
    }

    /// Exact sample mean `sum Z_d / samples_used`.
    pub fn exact_mean(&self) -> Rational {
        Rational::new(BigInt::from(self.sum_zd), BigInt::from(self.samples_used))
    }

    fn with_target(mut self, target: Rational) -> Self {
        let t = target.to_f64().unwrap_or(0.0);
        self.z_score = if self.stderr > 0.0 {
            Some((self.mean - t) / self.stderr)
        } else if self.exact_mean() == target {
            Some(0.0)
        } else {
            None
        };
        self.target = Some(target);
        self
    }
}

fn ser_opt_rational<S: Serializer>(x: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x {
        Some(q) => rational_json(q).serialize(s),
        None => s.serialize_none(),
    }
}

/// A drawn polynomial: exact for finite-support laws, otherwise known modulo
/// a power of `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum SampledPolynomial {
    Exact(IntPolynomial),
    Approx(PAdicApproxPolynomial),
}

/// Draws one monic degree-`n` polynomial (for Upsilon, `f(pX) mod p^k`).
pub fn sample_polynomial(dist: &CoeffDistribution, n: usize, rng: &mut ChaCha8Rng) -> Result<SampledPolynomial> {
    if n == 0 {
        return Err(Error::Precondition("degree must be at least 1".into()));
    }
    let sampler = Sampler::new(dist)?;
    Ok(match sampler.draw(n, rng) {
        Draw::Small(c) => SampledPolynomial::Exact(IntPolynomial::from_i64s(&c)),
        Draw::Residues { residues, precision } => {
            SampledPolynomial::Approx(PAdicApproxPolynomial::new(dist.prime, precision, residues)?)
        }
    })
}

/// RNG for one worker stream.
pub fn worker_rng(seed: u64, worker: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker as u64);
    rng
}

enum Draw {
    Small(Vec<i64>),
    Residues { residues: Vec<BigUint>, precision: u32 },
}

struct Sampler {
    prime: Prime,
    kind: CoeffKind,
    table: Option<(Vec<i64>, Vec<u64>, u64)>,
}

impl Sampler {
    fn new(dist: &CoeffDistribution) -> Result<Self> {
        let table = dist.weights()?.map(|(v, w)| {
            let total = w.iter().sum();
            (v, w, total)
        });
        Ok(Sampler {
            prime: dist.prime,
            kind: dist.kind.clone(),
            table,
        })
    }

    fn draw(&self, n: usize, rng: &mut ChaCha8Rng) -> Draw {
        let p = self.prime;
        match &self.kind {
            CoeffKind::FiniteSupport { .. } => {
                let (values, weights, total) = self.table.as_ref().unwrap();
                let mut c = Vec::with_capacity(n + 1);
                for _ in 0..n {
                    let mut u = rng.gen_range(0..*total);
                    let mut idx = 0;
                    while u >= weights[idx] {
                        u -= weights[idx];
                        idx += 1;
                    }
                    c.push(values[idx]);
                }
                c.push(1);
                Draw::Small(c)
            }
            CoeffKind::Haar { precision } => {
                let mut r: Vec<BigUint> = (0..n).map(|_| uniform_digits(rng, p, *precision)).collect();
                r.push(BigUint::one());
                Draw::Residues { residues: r, precision: *precision }
            }
            CoeffKind::HaarMultipleOfP { precision } => {
                let pb = BigUint::from(p.get());
                let mut r: Vec<BigUint> = (0..n)
                    .map(|_| uniform_digits(rng, p, precision - 1) * &pb)
                    .collect();
                r.push(BigUint::one());
                Draw::Residues { residues: r, precision: *precision }
            }
            CoeffKind::Upsilon { level } => {
                let k = *level;
                let m = p.pow(k);
                let r: Vec<BigUint> = (0..=n)
                    .map(|i| {
                        let pi = p.pow(i.min(k as usize) as u32);
                        if i == n {
                            pi % &m
                        } else if (i as u32) < k {
                            uniform_digits(rng, p, k - i as u32) * pi
                        } else {
                            BigUint::zero()
                        }
                    })
                    .collect();
                Draw::Residues { residues: r, precision: k }
            }
        }
    }
}

/// Uniform residue modulo `p^e`, assembled from word-sized blocks of base-`p`
/// digits.
fn uniform_digits(rng: &mut ChaCha8Rng, p: Prime, e: u32) -> BigUint {
    let block = p.max_u64_precision();
    let mut out = BigUint::zero();
    let mut scale = BigUint::one();
    let mut left = e;
    while left > 0 {
        let take = left.min(block);
        let bound = p.get().pow(take);
        out += &scale * BigUint::from(rng.gen_range(0..bound));
        scale *= BigUint::from(bound);
        left -= take;
    }
    out
}

/// Which polynomial built from the sample gets counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    Sample,
    /// `f(pX)` for the sampled `f`.
    Scaled,
}

#[derive(Default)]
struct Partial {
    used: u64,
    rejected: u64,
    sum_zd: u128,
    sum_zd_sq: u128,
    roots: RootSums,
    uncertified: u64,
    // sum of C(upper, d) - C(lower, d) over uncertified samples
    bias_num: u128,
    tail_hits: u64,
    split_hits: u64,
}

struct Outcome {
    count: usize,
    upper: Option<usize>,
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    sampler: Sampler,
    target: Target,
    /// `(threshold, total degree)` for tail experiments.
    tail: Option<usize>,
}

impl Runner<'_> {
    fn run(&self) -> Result<Partial> {
        let cfg = self.config;
        let w = cfg.workers as u64;
        let quotas: Vec<u64> = (0..w)
            .map(|i| cfg.sample_count / w + u64::from(i < cfg.sample_count % w))
            .collect();
        let results: Vec<Result<Partial>> = if cfg.workers == 1 {
            vec![self.worker(0, quotas[0])]
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = quotas
                    .iter()
                    .enumerate()
                    .map(|(i, &q)| s.spawn(move || self.worker(i, q)))
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            })
        };
        let mut total = Partial::default();
        for r in results {
            let r = r?;
            total.used += r.used;
            total.rejected += r.rejected;
            total.sum_zd = add(total.sum_zd, r.sum_zd)?;
            total.sum_zd_sq = add(total.sum_zd_sq, r.sum_zd_sq)?;
            total.roots.n = add(total.roots.n, r.roots.n)?;
            total.roots.n_sq = add(total.roots.n_sq, r.roots.n_sq)?;
            total.roots.z1 = add(total.roots.z1, r.roots.z1)?;
            total.roots.z2 = add(total.roots.z2, r.roots.z2)?;
            total.uncertified += r.uncertified;
            total.bias_num = add(total.bias_num, r.bias_num)?;
            total.tail_hits += r.tail_hits;
            total.split_hits += r.split_hits;
        }
        Ok(total)
    }

    fn worker(&self, index: usize, quota: u64) -> Result<Partial> {
        let cfg = self.config;
        let mut rng = worker_rng(cfg.seed, index);
        let mut acc = Partial::default();
        let p = cfg.prime();
        while acc.used < quota {
            let draw = self.sampler.draw(cfg.degree, &mut rng);
            if cfg.condition == Conditioning::UnitConstantTerm && !unit_constant(&draw, p) {
                acc.rejected += 1;
                continue;
            }
            let out = self.count(draw, &mut rng)?;
            let n = out.count as u128;
            let zd = binom(out.count, cfg.d)?;
            acc.used += 1;
            acc.sum_zd = add(acc.sum_zd, zd)?;
            acc.sum_zd_sq = add(acc.sum_zd_sq, mul(zd, zd)?)?;
            acc.roots.n = add(acc.roots.n, n)?;
            acc.roots.n_sq = add(acc.roots.n_sq, n * n)?;
            acc.roots.z1 = add(acc.roots.z1, n)?;
            acc.roots.z2 = add(acc.roots.z2, binom(out.count, 2)?)?;
            if let Some(upper) = out.upper {
                acc.uncertified += 1;
                let gap = binom(upper.max(out.count), cfg.d)? - zd;
                acc.bias_num = add(acc.bias_num, gap)?;
            }
            if let Some(threshold) = self.tail {
                if out.count >= threshold {
                    acc.tail_hits += 1;
                }
                if out.count >= cfg.degree {
                    acc.split_hits += 1;
                }
            }
        }
        Ok(acc)
    }

    fn count(&self, draw: Draw, rng: &mut ChaCha8Rng) -> Result<Outcome> {
        let p = self.config.prime();
        match draw {
            Draw::Small(c) => {
                let count = match self.target {
                    Target::Sample => count_roots_i64(&c, p)?.total,
                    Target::Scaled => {
                        let f = IntPolynomial::from_i64s(&c).scale(p);
                        crate::roots::count_roots_zp(&f, p)?.total
                    }
                };
                Ok(Outcome { count, upper: None })
            }
            Draw::Residues { residues, precision } => self.count_approx(residues, precision, rng),
        }
    }

    fn count_approx(&self, mut residues: Vec<BigUint>, mut precision: u32, rng: &mut ChaCha8Rng) -> Result<Outcome> {
        let p = self.config.prime();
        let (mut k, escalations) = match self.sampler.kind {
            CoeffKind::Upsilon { level } => (level / 2, 0),
            _ => (self.config.henselian_level, MAX_ESCALATIONS),
        };
        let mut round = 0;
        loop {
            let mut g = PAdicApproxPolynomial::new(p, precision, residues.clone())?;
            if self.target == Target::Scaled {
                g = g.scale();
            }
            let report = count_henselian_roots(&g, k);
            let lower = match report {
                Ok(r) if r.all_simple => {
                    return Ok(Outcome {
                        count: r.henselian_count,
                        upper: None,
                    })
                }
                Ok(r) => r.henselian_count,
                Err(Error::NodeCapExceeded { .. }) => 0,
                Err(e) => return Err(e),
            };
            if round == escalations {
                let upper = g.strassmann_bound().unwrap_or(g.degree());
                return Ok(Outcome {
                    count: lower,
                    upper: Some(upper),
                });
            }
            round += 1;
            k *= 2;
            let wider = 2 * k - 1;
            if wider > precision {
                let shift = p.pow(precision);
                let leading = residues.len() - 1;
                for (i, r) in residues.iter_mut().enumerate() {
                    // the monic leading coefficient is exact
                    if i == leading {
                        continue;
                    }
                    *r += uniform_digits(rng, p, wider - precision) * &shift;
                }
                precision = wider;
            }
        }
    }
}

fn unit_constant(draw: &Draw, p: Prime) -> bool {
    match draw {
        Draw::Small(c) => c[0] % p.get() as i64 != 0,
        Draw::Residues { residues, .. } => !(&residues[0] % p.get()).is_zero(),
    }
}

fn add(a: u128, b: u128) -> Result<u128> {
    a.checked_add(b)
        .ok_or_else(|| Error::Overflow("sample accumulator exceeded 128 bits".into()))
}

fn mul(a: u128, b: u128) -> Result<u128> {
    a.checked_mul(b)
        .ok_or_else(|| Error::Overflow("squared d-set count exceeded 128 bits".into()))
}

fn binom(n: usize, d: usize) -> Result<u128> {
    d_set_count_u128(n, d).ok_or_else(|| Error::Overflow(format!("C({n}, {d}) exceeds 128 bits")))
}

fn summarize(cfg: &ExperimentConfig, acc: &Partial) -> EstimateReport {
    let m = BigInt::from(acc.used);
    let s1 = BigInt::from(acc.sum_zd);
    let s2 = BigInt::from(acc.sum_zd_sq);
    let mean = Rational::new(s1.clone(), m.clone());
    let stderr = if acc.used > 1 {
        // sample variance / M = (M S2 - S1^2) / (M^2 (M - 1))
        let var_over_m = Rational::new(&m * &s2 - &s1 * &s1, &m * &m * (&m - 1));
        var_over_m.to_f64().unwrap_or(0.0).max(0.0).sqrt()
    } else {
        0.0
    };
    let bias = Rational::new(BigInt::from(acc.bias_num), m);
    EstimateReport {
        mean: mean.to_f64().unwrap_or(f64::NAN),
        stderr,
        samples_used: acc.used,
        samples_rejected: acc.rejected,
        target: None,
        z_score: None,
        bias_bound: bias.to_f64().unwrap_or(f64::INFINITY),
        uncertified: acc.uncertified,
        seed: cfg.seed,
        workers: cfg.workers,
        sum_zd: acc.sum_zd,
        sum_zd_sq: acc.sum_zd_sq,
        root_sums: acc.roots,
    }
}

fn run(cfg: &ExperimentConfig, target: Target, tail: Option<usize>) -> Result<(EstimateReport, Partial)> {
    cfg.validate()?;
    let runner = Runner {
        config: cfg,
        sampler: Sampler::new(&cfg.distribution)?,
        target,
        tail,
    };
    let acc = runner.run()?;
    Ok((summarize(cfg, &acc), acc))
}

/// Mean of `C(N(f), d)` over accepted samples. For finite-precision models `N`
/// is the Henselian count.
pub fn estimate_zd(config: &ExperimentConfig) -> Result<EstimateReport> {
    Ok(run(config, Target::Sample, None)?.0)
}

/// Estimate conditioned on `p` not dividing the constant term, against the
/// main term `gamma(d)`. Requires `tau > 0`.
pub fn verify_main_theorem(config: &ExperimentConfig) -> Result<EstimateReport> {
    let p = config.prime();
    match config.distribution.kind {
        CoeffKind::FiniteSupport { .. } | CoeffKind::Haar { .. } => {}
        _ => {
            return Err(Error::Precondition(
                "the main theorem concerns finite-support or Haar coefficients".into(),
            ))
        }
    }
    tau_diagnostic(&config.distribution)?;
    let cfg = config.clone().with_condition(Conditioning::UnitConstantTerm);
    let table = MomentTable::new(p, config.d);
    let target = table.gamma(config.d)?.clone();
    Ok(estimate_zd(&cfg)?.with_target(target))
}

/// Coefficients in `{0} union Z_p^x`, no conditioning; target
/// `gamma(d) + Pr(xi_0 = 0) gamma(d - 1)` with `gamma(-1) = 0`.
pub fn verify_nonunit_theorem(config: &ExperimentConfig) -> Result<EstimateReport> {
    let p = config.prime();
    let CoeffKind::FiniteSupport { values, .. } = &config.distribution.kind else {
        return Err(Error::Precondition(
            "the non-unit theorem needs finite-support coefficients".into(),
        ));
    };
    if let Some(v) = values.iter().find(|&&v| v != 0 && v % p.get() as i64 == 0) {
        return Err(Error::Precondition(format!(
            "value {v} is neither 0 nor a {p}-adic unit"
        )));
    }
    if config.condition != Conditioning::None {
        return Err(Error::Precondition("the non-unit theorem is unconditional".into()));
    }
    tau_diagnostic(&config.distribution)?;
    let table = MomentTable::new(p, config.d);
    let mut target = table.gamma(config.d)?.clone();
    if config.d >= 1 {
        target += config.distribution.mass_at_zero() * table.gamma(config.d - 1)?;
    }
    Ok(estimate_zd(config)?.with_target(target))
}

/// Counts roots of `f(pX)` for Haar-uniform monic `f`; target `beta(d)`.
pub fn verify_scaled_haar(config: &ExperimentConfig) -> Result<EstimateReport> {
    if !matches!(config.distribution.kind, CoeffKind::Haar { .. }) {
        return Err(Error::Precondition("scaled-Haar experiment needs Haar coefficients".into()));
    }
    if 2 * config.d > config.degree {
        return Err(Error::Precondition(format!(
            "need d <= n/2, got d = {} and n = {}",
            config.d, config.degree
        )));
    }
    let table = MomentTable::new(config.prime(), config.d);
    let target = table.beta_stable(config.d)?.clone();
    Ok(run(config, Target::Scaled, None)?.0.with_target(target))
}

/// Henselian count at level `floor(k/2)` of a uniform element of `Upsilon_k`;
/// target `beta(d)`.
pub fn verify_upsilon(config: &ExperimentConfig) -> Result<EstimateReport> {
    let CoeffKind::Upsilon { level } = config.distribution.kind else {
        return Err(Error::Precondition("Upsilon experiment needs the Upsilon model".into()));
    };
    if level < 2 {
        return Err(Error::InvalidConfig(format!(
            "Upsilon level {level} leaves no Henselian level (need k >= 2)"
        )));
    }
    let table = MomentTable::new(config.prime(), config.d);
    let target = table.beta_stable(config.d)?.clone();
    Ok(estimate_zd(config)?.with_target(target))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailThreshold {
    /// `N >= ceil(ln n)`.
    LogN,
    /// `N >= ceil(n^lambda)`.
    Power(f64),
}

impl TailThreshold {
    pub fn value(self, n: usize) -> usize {
        let x = match self {
            TailThreshold::LogN => (n as f64).ln(),
            TailThreshold::Power(lambda) => (n as f64).powf(lambda),
        };
        // guard against n^1 landing a hair above n
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r as usize
        } else {
            x.ceil() as usize
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub threshold: usize,
    pub hits: u64,
    pub fraction: f64,
    /// Samples with `n` distinct roots.
    pub totally_split: u64,
    pub samples_used: u64,
    pub samples_rejected: u64,
    /// Collision deficit of the coefficient law, when defined and positive.
    #[serde(serialize_with = "ser_opt_rational")]
    pub tau: Option<Rational>,
    pub seed: u64,
    pub workers: usize,
}

/// Empirical `Pr(N(f) >= threshold)` among accepted samples.
pub fn tail_probability(config: &ExperimentConfig, threshold: TailThreshold) -> Result<TailReport> {
    let t = threshold.value(config.degree);
    let (_, acc) = run(config, Target::Sample, Some(t))?;
    Ok(TailReport {
        threshold: t,
        hits: acc.tail_hits,
        fraction: acc.tail_hits as f64 / acc.used as f64,
        totally_split: acc.split_hits,
        samples_used: acc.used,
        samples_rejected: acc.rejected,
        tau: tau_diagnostic(&config.distribution).ok(),
        seed: config.seed,
        workers: config.workers,
    })
}
