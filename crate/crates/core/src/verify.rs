//! Self-checks: exact identities of the moment tables and root counter, and
//! the seeded sampling experiments, each reported as pass or fail.

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::moments::{log2_rational, no_root_poly_count, theoretical_mean_variance, MomentTable, Rational};
use crate::monte_carlo::{
    tail_probability, verify_main_theorem, verify_nonunit_theorem, verify_upsilon, CoeffDistribution,
    Conditioning, EstimateReport, ExperimentConfig, TailThreshold, DEFAULT_SLACK,
};
use crate::oracle::{alpha_direct_sum, no_root_poly_count_brute};
use crate::padic::{IntPolynomial, PAdicApproxPolynomial, Prime};
use crate::roots::{count_henselian_roots, count_roots_zp, discriminant_valuation, residue_partition_check};

pub const EXACT_CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 14];
pub const STOCHASTIC_CRITERIA: [u8; 5] = [9, 10, 11, 12, 13];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Exact,
    Stochastic,
    All,
}

impl Suite {
    pub fn criteria(self) -> Vec<u8> {
        match self {
            Suite::Exact => EXACT_CRITERIA.to_vec(),
            Suite::Stochastic => STOCHASTIC_CRITERIA.to_vec(),
            Suite::All => (1..=14).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub seed: u64,
    pub workers: usize,
    pub samples: u64,
    pub slack: f64,
    /// Perturb every `gamma(d)`, `d >= 1`, to exercise the failure path.
    pub tamper_gamma: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 42,
            workers: 1,
            samples: 100_000,
            slack: DEFAULT_SLACK,
            tamper_gamma: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub criterion: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = std::result::Result<String, String>;

pub fn criterion_name(id: u8) -> &'static str {
    match id {
        1 => "exact gamma(1)",
        2 => "variance identity",
        3 => "power-series identities",
        4 => "n-stability",
        5 => "initial conditions",
        6 => "combinatorial oracle",
        7 => "root-counting oracle",
        8 => "geometric-weight identity",
        9 => "Monte Carlo main theorem",
        10 => "non-unit theorem",
        11 => "Upsilon / scaled Haar",
        12 => "tail bound",
        13 => "determinism",
        14 => "asymptotic sanity",
        _ => "unknown",
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<CriterionResult> {
    suite.criteria().into_iter().map(|id| run_criterion(id, opts)).collect()
}

pub fn run_criterion(id: u8, opts: &VerifyOptions) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => gamma_one(opts),
        2 => variance(opts),
        3 => series(opts),
        4 => stability(opts),
        5 => initial(opts),
        6 => combinatorial(),
        7 => root_oracle(opts),
        8 => geometric(opts),
        9 => main_theorem(opts).and_then(|r| judge(&r, opts.slack)),
        10 => nonunit(opts),
        11 => upsilon(opts),
        12 => tail(opts),
        13 => determinism(opts),
        14 => asymptotic(opts),
        _ => Err(format!("no criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CriterionResult {
        criterion: id,
        name: criterion_name(id),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn p(n: u64) -> Prime {
    Prime::new(n).expect("small prime")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn table(prime: u64, d_max: usize, opts: &VerifyOptions) -> MomentTable {
    let mut t = MomentTable::new(p(prime), d_max);
    if opts.tamper_gamma {
        for d in 1..=d_max {
            let g = t.gamma(d).unwrap().clone();
            t.tamper_gamma(d, g * q(1001, 1000));
        }
    }
    t
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gamma_one(opts: &VerifyOptions) -> Check {
    for prime in [2u64, 3, 5, 7] {
        let g = table(prime, 1, opts).gamma(1).unwrap().clone();
        let want = q(prime as i64 - 1, prime as i64 + 1);
        check(g == want, || format!("p = {prime}: gamma(1) = {g}, expected {want}"))?;
    }
    Ok("gamma(1) = (p-1)/(p+1) for p in {2,3,5,7}".into())
}

fn variance(opts: &VerifyOptions) -> Check {
    for prime in [2u64, 3, 5] {
        let t = table(prime, 2, opts);
        let (g1, g2) = (t.gamma(1).unwrap(), t.gamma(2).unwrap());
        let var = q(2, 1) * g2 + g1 - g1 * g1;
        let want = theoretical_mean_variance(p(prime)).1;
        check(var == want, || format!("p = {prime}: 2 gamma(2) + gamma(1) - gamma(1)^2 = {var}, expected {want}"))?;
    }
    Ok("variance closed form for p in {2,3,5}".into())
}

fn series(opts: &VerifyOptions) -> Check {
    for prime in [2u64, 3] {
        let t = table(prime, 5, opts);
        check(t.series_identity_check(5).unwrap(), || format!("p = {prime}: identity fails"))?;
    }
    Ok("power-series identities up to d = 5 for p in {2,3}".into())
}

fn stability(opts: &VerifyOptions) -> Check {
    for prime in [2u64, 3] {
        let t = table(prime, 4, opts);
        for d in 0..=4 {
            t.verify_stability(d).map_err(|e| format!("p = {prime}: {e}"))?;
        }
    }
    Ok("n-stability for d <= 4, p in {2,3}".into())
}

fn initial(opts: &VerifyOptions) -> Check {
    for prime in [2u64, 3, 5, 7] {
        let t = table(prime, 3, opts);
        for n in 0..=t.n_max() {
            check(t.alpha(n, 0).unwrap().is_one() && t.beta(n, 0).unwrap().is_one(), || {
                format!("p = {prime}: ({n}, 0) is not 1")
            })?;
        }
        for d in 1..=3 {
            for n in 0..d {
                check(t.alpha(n, d).unwrap().is_zero() && t.beta(n, d).unwrap().is_zero(), || {
                    format!("p = {prime}: ({n}, {d}) is not 0")
                })?;
            }
        }
        check(t.alpha(1, 1).unwrap().is_one() && t.beta(1, 1).unwrap().is_one(), || {
            format!("p = {prime}: (1, 1) is not 1")
        })?;
    }
    Ok("initial conditions for p in {2,3,5,7}".into())
}

fn combinatorial() -> Check {
    for prime in [2u64, 3] {
        for m in 0..=6 {
            let brute = no_root_poly_count_brute(m, p(prime)).map_err(|e| e.to_string())?;
            check(BigInt::from(brute) == no_root_poly_count(m, p(prime)), || {
                format!("p = {prime}, m = {m}: rootless count mismatch")
            })?;
        }
    }
    let t = MomentTable::new(p(2), 3);
    for n in 0..=6 {
        for d in 0..=3 {
            let direct = alpha_direct_sum(&t, n, d).map_err(|e| e.to_string())?;
            check(&direct == t.alpha(n, d).unwrap(), || format!("alpha({n}, {d}) mismatch"))?;
        }
    }
    Ok("rootless counts and alpha by enumeration agree".into())
}

fn root_oracle(opts: &VerifyOptions) -> Check {
    let mut checked = 0;
    for prime in [2u64, 3, 5].map(p) {
        for idx in 0..7usize.pow(5) {
            let mut x = idx;
            let c: Vec<i64> = (0..5)
                .map(|_| {
                    let v = (x % 7) as i64 - 3;
                    x /= 7;
                    v
                })
                .collect();
            let f = IntPolynomial::from_i64s(&c);
            let Some(v) = (!f.is_zero()).then(|| discriminant_valuation(&f, prime)).flatten() else {
                continue;
            };
            let fast = count_roots_zp(&f, prime).map_err(|e| e.to_string())?.total;
            let mut k = v as u32 + 1;
            let slow = loop {
                let g = PAdicApproxPolynomial::from_int_poly(&f, prime, 2 * k - 1).map_err(|e| e.to_string())?;
                let r = count_henselian_roots(&g, k).map_err(|e| e.to_string())?;
                if r.all_simple {
                    break r.henselian_count;
                }
                k *= 2;
            };
            check(fast == slow, || format!("p = {prime}, f = {f}: {fast} vs {slow}"))?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for i in 0..1000 {
        let prime = p([2, 3, 5][i % 3]);
        let mut c: Vec<i64> = (0..6).map(|_| rng.gen_range(-20..=20)).collect();
        c.push(rng.gen_range(1..=4));
        let f = IntPolynomial::from_i64s(&c);
        let d = rng.gen_range(0..=3);
        check(residue_partition_check(&f, prime, d).map_err(|e| e.to_string())?, || {
            format!("partition identity fails for {f}, p = {prime}, d = {d}")
        })?;
    }
    Ok(format!("{checked} squarefree polynomials, 1000 partition checks"))
}

fn geometric(opts: &VerifyOptions) -> Check {
    for prime in [2u64, 3] {
        let t = table(prime, 3, opts);
        for d in 0..=3 {
            check(t.beta_geometric_identity(d, 2 * d + 3).unwrap(), || {
                format!("p = {prime}, d = {d}: identity fails")
            })?;
        }
    }
    Ok("geometric-weight identity at n = 2d+3".into())
}

fn judge(r: &EstimateReport, slack: f64) -> Check {
    let line = format!(
        "mean {:.5}, target {}, stderr {:.5}, bias bound {:.2e}",
        r.mean,
        r.target.as_ref().map(ToString::to_string).unwrap_or_default(),
        r.stderr,
        r.bias_bound
    );
    if r.passes(slack) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main_theorem(opts: &VerifyOptions) -> std::result::Result<EstimateReport, String> {
    let cfg = ExperimentConfig::new(CoeffDistribution::plus_minus_one(p(3)), 200, 1, opts.samples)
        .with_seed(opts.seed)
        .with_workers(opts.workers);
    verify_main_theorem(&cfg).map_err(|e| e.to_string())
}

fn nonunit(opts: &VerifyOptions) -> Check {
    let dist = CoeffDistribution::uniform(p(3), vec![0, 1]).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig::new(dist, 200, 1, opts.samples)
        .with_seed(opts.seed)
        .with_workers(opts.workers);
    judge(&verify_nonunit_theorem(&cfg).map_err(|e| e.to_string())?, opts.slack)
}

fn upsilon(opts: &VerifyOptions) -> Check {
    let cfg = ExperimentConfig::new(CoeffDistribution::upsilon(p(2), 12), 50, 1, opts.samples)
        .with_seed(opts.seed)
        .with_workers(opts.workers);
    judge(&verify_upsilon(&cfg).map_err(|e| e.to_string())?, opts.slack)
}

fn tail(opts: &VerifyOptions) -> Check {
    let cfg = ExperimentConfig::new(CoeffDistribution::plus_minus_one(p(2)), 1000, 1, opts.samples)
        .with_seed(opts.seed)
        .with_workers(opts.workers)
        .with_condition(Conditioning::UnitConstantTerm);
    let r = tail_probability(&cfg, TailThreshold::LogN).map_err(|e| e.to_string())?;
    let line = format!(
        "Pr(N >= {}) = {:.2e}, {} totally split of {}",
        r.threshold, r.fraction, r.totally_split, r.samples_used
    );
    if r.fraction <= 1e-4 && r.totally_split == 0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn determinism(opts: &VerifyOptions) -> Check {
    let a = serde_json::to_string(&main_theorem(opts)?).map_err(|e| e.to_string())?;
    let b = serde_json::to_string(&main_theorem(opts)?).map_err(|e| e.to_string())?;
    check(a == b, || "reports differ".into())?;
    Ok("two runs give identical reports".into())
}

fn asymptotic(opts: &VerifyOptions) -> Check {
    let t = table(2, 10, opts);
    for d in 1..=10 {
        let g = t.gamma(d).unwrap();
        check(g.is_positive(), || format!("gamma({d}) is not positive"))?;
        if d >= 6 {
            let r = log2_rational(g) / (d * d) as f64;
            check(r <= -0.25, || format!("log2 gamma({d}) / d^2 = {r}"))?;
        }
    }
    Ok("gamma(d) > 0 and log2 gamma(d)/d^2 <= -1/4 for 6 <= d <= 10".into())
}
