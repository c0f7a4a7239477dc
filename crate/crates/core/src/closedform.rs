//! Exact closed-form counts of Sylow double cosets.
//!
//! Every division here is claimed to be exact by the underlying theorem;
//! a remainder is reported as [`Error::InexactDivision`], never rounded.

use std::collections::BTreeMap;

use log::warn;
use num::bigint::Sign;
use num::{BigInt, BigRational, BigUint, Integer, One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sylow::{is_prime, PAdicProfile};

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn exact_div(num: BigUint, den: &BigUint, what: &str) -> Result<BigUint> {
    let (q, r) = num.div_rem(den);
    if !r.is_zero() {
        return Err(Error::InexactDivision(format!(
            "{}: remainder {} modulo {}",
            what, r, den
        )));
    }
    Ok(q)
}

fn exact_div_signed(num: BigInt, den: &BigUint, what: &str) -> Result<BigUint> {
    if num.is_negative() {
        return Err(Error::InvariantViolation(format!("{} is negative: {}", what, num)));
    }
    exact_div(num.magnitude().clone(), den, what)
}

/// Number of double cosets of the minimal size `|P|`, i.e. `|N(P):P|`.
pub fn count_min_size(n: usize, p: u64) -> Result<BigUint> {
    Ok(PAdicProfile::new(n, p)?.normalizer_index())
}

/// Number of double cosets of size `p·|P|`.
pub fn second_size_count(n: usize, p: u64) -> Result<BigUint> {
    let prof = PAdicProfile::new(n, p)?;
    let a = |i: usize| prof.digit(i) as u64;
    let len = prof.digits.len();
    if p == 2 {
        let adjacent: u64 = (0..len).map(|i| a(i) * a(i + 1)).sum();
        let tall: u64 = (2..len).map(a).sum();
        return Ok(BigUint::from(adjacent + tall));
    }
    let mut sum = BigInt::zero();
    let tail = BigInt::from(factorial(p - 2));
    for i in 0..len {
        if a(i + 1) == 0 {
            continue;
        }
        let term = BigInt::from(binomial(p + a(i), p))
            * BigInt::from(p - 1).pow((i as u64 * (p - 1)) as u32)
            * &tail
            - 1;
        sum += term * a(i + 1);
    }
    let total = BigInt::from(prof.normalizer_index()) * sum;
    exact_div_signed(total, &BigUint::from(p), "second size count")
}

/// Double-coset counts for `n = kp` with `1 ≤ k ≤ p−1`, where `P = C_p^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianCensus {
    pub p: u64,
    pub k: u64,
    pub n: u64,
    /// `a ↦ n_a`, the number of double cosets of size `p^a`, for `k ≤ a ≤ 2k`.
    #[serde(with = "crate::decimal::map")]
    pub values: BTreeMap<u64, BigUint>,
}

fn check_abelian_range(p: u64, k: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 || k >= p.max(2) {
        return Err(Error::OutOfRange {
            what: "k",
            detail: format!("need 1 ≤ k ≤ p−1, got k={} for p={}", k, p),
        });
    }
    if p == 2 {
        warn!("abelian census at p=2 evaluates the formula outside its stated range");
    }
    Ok(())
}

/// `Γ_j = ((k−j)p)!·j!·C(k,j)²·(p(p−1))^j` for `j = 0..=k`.
pub fn gamma_sequence(p: u64, k: u64) -> Vec<BigUint> {
    (0..=k)
        .map(|j| {
            factorial((k - j) * p)
                * factorial(j)
                * binomial(k, j).pow(2)
                * BigUint::from(p * (p - 1)).pow(j as u32)
        })
        .collect()
}

pub fn abelian_census(p: u64, k: u64) -> Result<AbelianCensus> {
    check_abelian_range(p, k)?;
    let gamma = gamma_sequence(p, k);
    let mut values = BTreeMap::new();
    for a in k..=2 * k {
        let low = 2 * k - a;
        let mut sum = BigInt::zero();
        for j in low..=k {
            let term = BigInt::from(&gamma[j as usize] * binomial(j, low));
            if (j - low) % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let pa = BigUint::from(p).pow(a as u32);
        values.insert(a, exact_div_signed(sum, &pa, "abelian census")?);
    }
    Ok(AbelianCensus {
        p,
        k,
        n: k * p,
        values,
    })
}

/// Coefficients (constant term first) of the generating polynomial
/// `f_{k,p}(x) = Σ_i ((k−i)p)!·i!·C(k,i)²·(p(p−1)(x−1))^i`.
pub fn abelian_genfun(p: u64, k: u64) -> Result<Vec<BigUint>> {
    check_abelian_range(p, k)?;
    let gamma = gamma_sequence(p, k);
    let mut coeffs = vec![BigInt::zero(); k as usize + 1];
    for (i, g) in gamma.iter().enumerate() {
        let g = BigInt::from(g.clone());
        // (x−1)^i
        for t in 0..=i {
            let c = BigInt::from(binomial(i as u64, t as u64)) * &g;
            if (i - t) % 2 == 0 {
                coeffs[t] += c;
            } else {
                coeffs[t] -= c;
            }
        }
    }
    coeffs
        .into_iter()
        .enumerate()
        .map(|(t, c)| match c.sign() {
            Sign::Minus => Err(Error::InvariantViolation(format!(
                "coefficient of x^{} is negative: {}",
                t, c
            ))),
            _ => Ok(c.magnitude().clone()),
        })
        .collect()
}

/// `n_a = [x^{2k−a}] f_{k,p} / p^a`, read off the generating polynomial.
pub fn abelian_census_from_genfun(p: u64, k: u64) -> Result<AbelianCensus> {
    let coeffs = abelian_genfun(p, k)?;
    let mut values = BTreeMap::new();
    for a in k..=2 * k {
        let c = coeffs[(2 * k - a) as usize].clone();
        let pa = BigUint::from(p).pow(a as u32);
        values.insert(a, exact_div(c, &pa, "generating function coefficient")?);
    }
    Ok(AbelianCensus {
        p,
        k,
        n: k * p,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub p: u64,
    pub k: u64,
    /// `(kp)!/p^{2k}·(1 − 1/(p−2)!)` as an exact fraction.
    pub lower: String,
    /// `(kp)!/p^{2k}` as an exact fraction.
    pub upper: String,
    #[serde(with = "crate::decimal")]
    pub value: BigUint,
    pub pass: bool,
}

/// Checks `(kp)!/p^{2k}·(1 − 1/(p−2)!) ≤ n_{2k} ≤ (kp)!/p^{2k}` exactly.
pub fn check_bounds_thm33(p: u64, k: u64) -> Result<BoundsCheck> {
    if p < 3 {
        return Err(Error::OutOfRange {
            what: "p",
            detail: "the bounds need p ≥ 3".into(),
        });
    }
    let census = abelian_census(p, k)?;
    let value = census.values[&(2 * k)].clone();
    let upper = BigRational::new(
        BigInt::from(factorial(k * p)),
        BigInt::from(BigUint::from(p).pow(2 * k as u32)),
    );
    let shrink = BigRational::one()
        - BigRational::new(BigInt::one(), BigInt::from(factorial(p - 2)));
    let lower = &upper * shrink;
    let v = BigRational::from_integer(BigInt::from(value.clone()));
    let pass = lower <= v && v <= upper;
    Ok(BoundsCheck {
        p,
        k,
        lower: lower.to_string(),
        upper: upper.to_string(),
        value,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::all_permutations;
    use crate::sylow::SylowStructure;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn grid() -> Vec<(u64, u64)> {
        [3u64, 5, 7, 11, 13]
            .iter()
            .flat_map(|&p| (1..p).map(move |k| (p, k)))
            .collect()
    }

    #[test]
    fn factorial_and_binomial() {
        assert_eq!(factorial(0), big(1));
        assert_eq!(factorial(12), big(479_001_600));
        assert_eq!(binomial(10, 3), big(120));
        assert_eq!(binomial(3, 5), big(0));
        assert_eq!(binomial(60, 30), big(118_264_581_564_861_424));
    }

    #[test]
    fn example_eleven() {
        let c = abelian_census(11, 1).unwrap();
        assert_eq!(c.values[&1], big(10));
        assert_eq!(c.values[&2], big(329_890));
    }

    #[test]
    fn abelian_s6_against_enumeration() {
        let c = abelian_census(3, 2).unwrap();
        assert_eq!(
            c.values.values().cloned().collect::<Vec<_>>(),
            vec![big(8), big(0), big(8)]
        );
        // brute force: a double coset of size 3^a has 3^a elements, so
        // n_a = #{x : |PxP| = 3^a} / 3^a
        let s = SylowStructure::new(6, 3).unwrap();
        let mut hits = BTreeMap::<u64, u64>::new();
        for x in all_permutations(6) {
            let inter = s.intersection_order(&x).unwrap();
            *hits.entry(81 / inter).or_default() += 1;
        }
        for (a, v) in &c.values {
            let size = 3u64.pow(*a as u32);
            let count = hits.get(&size).copied().unwrap_or(0);
            assert_eq!(BigUint::from(count / size), *v);
        }
    }

    #[test]
    fn abelian_p5_k2() {
        let c = abelian_census(5, 2).unwrap();
        assert_eq!(c.values[&2], big(32));
        let mass: BigUint = c.values.iter().map(|(a, v)| v * big(5).pow(*a as u32)).sum();
        assert_eq!(mass, factorial(10));
    }

    #[test]
    fn abelian_invariants_on_grid() {
        for (p, k) in grid() {
            let c = abelian_census(p, k).unwrap();
            let mass: BigUint = c.values.iter().map(|(a, v)| v * big(p).pow(*a as u32)).sum();
            assert_eq!(mass, factorial(k * p), "p={} k={}", p, k);
            assert_eq!(c.values[&k], factorial(k) * big(p - 1).pow(k as u32));
            assert_eq!(abelian_census_from_genfun(p, k).unwrap(), c);
            let f1: BigUint = abelian_genfun(p, k).unwrap().iter().sum();
            assert_eq!(f1, factorial(k * p));
        }
    }

    #[test]
    fn genfun_small_k() {
        for &p in &[3u64, 5, 7, 11] {
            let f = abelian_genfun(p, 1).unwrap();
            // p! + p(p−1)(x−1)
            assert_eq!(f, vec![factorial(p) - big(p * (p - 1)), big(p * (p - 1))]);
        }
        for &p in &[3u64, 5, 7] {
            let f = abelian_genfun(p, 2).unwrap();
            let a = BigInt::from(factorial(2 * p));
            let b = BigInt::from(factorial(p) * big(4 * p * (p - 1)));
            let c = BigInt::from(big(2 * p * p * (p - 1) * (p - 1)));
            let expected = [&a - &b + &c, &b - BigInt::from(2) * &c, c.clone()];
            let got: Vec<BigInt> = f.into_iter().map(BigInt::from).collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn genfun_total_mass() {
        for &(p, k) in &[(3u64, 2u64), (5, 2), (5, 4), (7, 3)] {
            let f1: BigUint = abelian_genfun(p, k).unwrap().iter().sum();
            assert_eq!(f1, factorial(k * p));
        }
    }

    #[test]
    fn abelian_range_errors() {
        assert!(abelian_census(4, 1).is_err());
        assert!(abelian_census(5, 5).is_err());
        assert!(abelian_census(5, 0).is_err());
        // p = 2 is evaluated anyway
        let c = abelian_census(2, 1).unwrap();
        assert_eq!(c.values[&1], big(1));
    }

    #[test]
    fn gamma_decreases() {
        for (p, k) in grid() {
            let g = gamma_sequence(p, k);
            for j in 0..k as usize {
                if (p, k) == (3, 1) {
                    // Γ_0 = 3! = Γ_1: the ratio bound 1/(j+1)(p−2)! is 1 here
                    assert_eq!(g[j + 1], g[j]);
                } else {
                    assert!(g[j + 1] < g[j], "p={} k={} j={}", p, k, j);
                }
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let b = check_bounds_thm33(3, 2).unwrap();
        assert!(b.pass);
        assert_eq!(b.lower, "0");
        assert_eq!(b.upper, "80/9");
        assert_eq!(b.value, big(8));
        assert!(check_bounds_thm33(11, 1).unwrap().pass);
        assert!(check_bounds_thm33(5, 4).unwrap().pass);
        for (p, k) in grid() {
            assert!(check_bounds_thm33(p, k).unwrap().pass, "p={} k={}", p, k);
        }
    }

    #[test]
    fn six_three_has_no_size_27_double_coset() {
        assert_eq!(abelian_census(3, 2).unwrap().values[&3], big(0));
    }

    #[test]
    fn min_size_counts() {
        for n in 1..30 {
            assert_eq!(count_min_size(n, 2).unwrap(), big(1));
        }
        for &p in &[3u64, 5, 7, 11, 13] {
            assert_eq!(count_min_size(p as usize, p).unwrap(), big(p - 1));
        }
        assert_eq!(count_min_size(6, 3).unwrap(), big(8));
    }

    #[test]
    fn second_size_examples() {
        assert_eq!(second_size_count(7, 2).unwrap(), big(3));
        assert_eq!(second_size_count(15, 2).unwrap(), big(5));
        assert_eq!(second_size_count(12, 3).unwrap(), big(40));
        for &p in &[3u64, 5, 7, 11, 13] {
            // n = p: ((p−1)! − (p−1))/p
            let expected = (factorial(p - 1) - big(p - 1)) / big(p);
            assert_eq!(second_size_count(p as usize, p).unwrap(), expected);
        }
        assert_eq!(second_size_count(3, 5).unwrap(), big(0));
    }

    #[test]
    fn second_size_matches_abelian_census() {
        for (p, k) in grid() {
            let c = abelian_census(p, k).unwrap();
            assert_eq!(
                second_size_count((k * p) as usize, p).unwrap(),
                c.values[&(k + 1)],
                "p={} k={}",
                p,
                k
            );
        }
    }
}
