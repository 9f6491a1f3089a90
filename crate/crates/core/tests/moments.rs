use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use padic_roots::moments::{
    factorial_to_raw_moments, stirling2, theoretical_mean_variance, AlphaSum, MomentTable,
};
use padic_roots::oracle::alpha_direct_sum;
use padic_roots::Prime;

fn p(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn q(s: &str) -> BigRational {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    BigRational::new(n.parse().unwrap(), d.parse().unwrap())
}

// Values from an independent enumeration over multiplicity vectors, computed
// once and frozen here.
#[test]
fn frozen_values_p2() {
    let t = MomentTable::new(p(2), 3);
    assert_eq!(t.alpha_stable(1).unwrap(), &q("2/3"));
    assert_eq!(t.beta_stable(1).unwrap(), &q("1/3"));
    assert_eq!(t.alpha_stable(2).unwrap(), &q("44/279"));
    assert_eq!(t.beta_stable(2).unwrap(), &q("13/558"));
    assert_eq!(t.alpha_stable(3).unwrap(), &q("113761504/7007123781"));
    assert_eq!(t.beta_stable(3).unwrap(), &q("4929235/14014247562"));
    // gamma = beta at p = 2
    for d in 0..=3 {
        assert_eq!(t.gamma(d).unwrap(), t.beta_stable(d).unwrap());
    }
}

#[test]
fn frozen_values_p3() {
    let t = MomentTable::new(p(3), 3);
    assert_eq!(t.alpha_stable(1).unwrap(), &q("3/4"));
    assert_eq!(t.beta_stable(1).unwrap(), &q("1/4"));
    assert_eq!(t.alpha_stable(2).unwrap(), &q("837/3872"));
    assert_eq!(t.beta_stable(2).unwrap(), &q("37/3872"));
    assert_eq!(t.alpha_stable(3).unwrap(), &q("249674343705/8284177103488"));
    assert_eq!(t.beta_stable(3).unwrap(), &q("16404871651/273377844415104"));
    assert_eq!(t.gamma(2).unwrap(), &q("79/968"));
    assert_eq!(t.gamma(3).unwrap(), &q("167372464093/34172230551888"));
}

#[test]
fn frozen_values_p5() {
    let t = MomentTable::new(p(5), 2);
    assert_eq!(t.alpha_stable(2).unwrap(), &q("16375/56232"));
    assert_eq!(t.beta_stable(2).unwrap(), &q("151/56232"));
    assert_eq!(t.gamma(2).unwrap(), &q("1247/7029"));
    assert_eq!(theoretical_mean_variance(p(5)).1, q("1352/2343"));
}

#[test]
fn spec_variance_examples() {
    assert_eq!(theoretical_mean_variance(p(2)), (q("1/3"), q("25/93")));
    // (9+1)^2 * 2 / (121 * 4) = 50/121
    assert_eq!(theoretical_mean_variance(p(3)), (q("1/2"), q("50/121")));
}

#[test]
fn brute_force_strategy_at_three() {
    let fast = MomentTable::build(p(3), 2, 6, AlphaSum::MultiplicityVectors).unwrap();
    let slow = MomentTable::build(p(3), 2, 6, AlphaSum::BruteForce).unwrap();
    for d in 0..=2 {
        for n in 0..=6 {
            assert_eq!(fast.alpha_beta(n, d).unwrap(), slow.alpha_beta(n, d).unwrap());
        }
    }
}

#[test]
fn direct_sum_at_three_and_five() {
    for (prime, n_top) in [(3u64, 5usize), (5, 4)] {
        let t = MomentTable::new(p(prime), 2);
        for n in 0..=n_top {
            for d in 0..=2 {
                assert_eq!(&alpha_direct_sum(&t, n, d).unwrap(), t.alpha(n, d).unwrap(), "p = {prime}, ({n}, {d})");
            }
        }
    }
}

#[test]
fn out_of_table_lookups() {
    let t = MomentTable::new(p(2), 2);
    assert!(t.alpha(t.n_max() + 1, 1).is_err());
    assert!(t.beta(1, 3).is_err());
    assert!(t.gamma(3).is_err());
    assert!(MomentTable::build(p(2), 3, 5, AlphaSum::MultiplicityVectors).is_err());
}

#[test]
fn table_exports() {
    let t = MomentTable::new(p(3), 1);
    let csv = t.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,d,alpha_num,alpha_den,beta_num,beta_den");
    assert_eq!(lines.len(), 1 + 2 * (t.n_max() + 1));
    assert!(lines.contains(&"2,1,3,4,1,4"));
    let js = t.to_json();
    assert_eq!(js["rows"].as_array().unwrap().len(), 2 * (t.n_max() + 1));
    assert_eq!(js["gamma"][1]["num"], "1");
    assert_eq!(js["gamma"][1]["den"], "2");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stability_and_identities_hold(prime in prop::sample::select(vec![2u64, 3, 5, 7]), d in 0usize..4) {
        let t = MomentTable::new(p(prime), d);
        prop_assert!(t.verify_stability(d).is_ok());
        prop_assert!(t.series_identity_check(d).unwrap());
        prop_assert!(t.beta_geometric_identity(d, 2 * d + 3).unwrap());
        prop_assert!(t.alpha_geometric_identity(d, 2 * d + 3).unwrap());
    }

    #[test]
    fn moments_are_probabilities_scale(prime in prop::sample::select(vec![2u64, 3, 5]), d in 1usize..5) {
        let t = MomentTable::new(p(prime), d);
        let b = t.beta_stable(d).unwrap();
        let a = t.alpha_stable(d).unwrap();
        let g = t.gamma(d).unwrap();
        prop_assert!(b > &BigRational::zero() && b < a);
        prop_assert!(g > &BigRational::zero() && g <= &BigRational::one());
    }

    /// E[N^m] from factorial moments equals the moment of a point mass.
    #[test]
    fn raw_moment_conversion(n in 0usize..12, m in 1usize..6) {
        let fm: Vec<BigRational> = (1..=m)
            .map(|d| BigRational::from_integer(BigInt::from(padic_roots::roots::d_set_count(n, d))))
            .collect();
        let raw = factorial_to_raw_moments(&fm, m).unwrap();
        prop_assert_eq!(raw, BigRational::from_integer(BigInt::from(n).pow(m as u32)));
    }

    #[test]
    fn stirling_recurrence(m in 1usize..20, d in 1usize..20) {
        let lhs = stirling2(m, d);
        let rhs = stirling2(m - 1, d - 1) + num_bigint::BigUint::from(d) * stirling2(m - 1, d);
        prop_assert_eq!(lhs, rhs);
    }
}
