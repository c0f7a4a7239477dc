//! The `verify` suite: formulas against enumeration, in three tiers.

use std::time::Instant;

use log::info;
use num::BigUint;
use serde::Serialize;

use dcos_core::closedform;
use dcos_core::dcos::{self as engine, CensusBudget, CensusTable};
use dcos_core::perm::all_permutations;
use dcos_core::rng::{stream, DEFAULT_SEED};
use dcos_core::sylow::SylowStructure;
use dcos_core::witness;
use dcos_core::Error;

use crate::reference::{table_one_row, TABLE_ONE};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tier {
    Quick,
    Default,
    Full,
}

impl Tier {
    fn name(self) -> &'static str {
        match self {
            Tier::Quick => "quick",
            Tier::Default => "default",
            Tier::Full => "full",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub tier: &'static str,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub checks: Vec<Check>,
}

type Outcome = Result<(String, String), Error>;

struct Suite {
    timing: bool,
    checks: Vec<Check>,
}

impl Suite {
    /// Runs `f`, which returns `(expected, actual)`; the check passes when
    /// they are equal.
    fn check(&mut self, name: String, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let result = f();
        let runtime = self.timing.then(|| start.elapsed().as_secs_f64());
        let check = match result {
            Ok((expected, actual)) => Check {
                status: if expected == actual {
                    Status::Pass
                } else {
                    Status::Fail
                },
                name,
                expected,
                actual,
                reason: None,
                runtime,
            },
            Err(e @ Error::BudgetExceeded { .. }) => Check {
                name,
                status: Status::Skipped,
                expected: String::new(),
                actual: String::new(),
                reason: Some(e.to_string()),
                runtime,
            },
            Err(e) => Check {
                name,
                status: Status::Fail,
                expected: String::new(),
                actual: String::new(),
                reason: Some(e.to_string()),
                runtime,
            },
        };
        info!("{} {:?}", check.name, check.status);
        self.checks.push(check);
    }
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn census(n: usize, p: u64) -> Result<CensusTable, Error> {
    engine::census_exhaustive(n, p, &CensusBudget::default())
}

/// Census counts with trailing zeros removed, as a comma list.
fn trimmed(t: &CensusTable) -> String {
    let mut cells: Vec<&BigUint> = t.counts.iter().collect();
    while cells.len() > 1 && cells.last().is_some_and(|c| *c == &BigUint::ZERO) {
        cells.pop();
    }
    join(&cells)
}

pub fn run(tier: Tier, timing: bool) -> VerifyReport {
    let mut suite = Suite {
        timing,
        checks: Vec::new(),
    };
    let table_max = match tier {
        Tier::Quick => 9,
        Tier::Default => 12,
        Tier::Full => 14,
    };
    let class_max = if tier == Tier::Quick { 12 } else { 18 };
    let grid_max = if tier == Tier::Quick { 9 } else { 11 };

    for n in 1..=table_max {
        suite.check(format!("table-one/census/n={}", n), || {
            let (cells, total) = table_one_row(n).expect("rows 1..=18");
            let t = census(n, 2)?;
            Ok((
                format!("{} total {}", join(cells), total),
                format!("{} total {}", trimmed(&t), t.total),
            ))
        });
    }
    for &(n, cells, total) in TABLE_ONE.iter().filter(|r| r.0 <= class_max) {
        suite.check(format!("table-one/class-total/n={}", n), || {
            Ok((total.to_string(), engine::total_via_classes(n, 2)?.to_string()))
        });
        suite.check(format!("table-one/second-size/n={}", n), || {
            let expected = cells.get(1).copied().unwrap_or(0);
            Ok((expected.to_string(), closedform::second_size_count(n, 2)?.to_string()))
        });
    }
    for &p in &[2u64, 3, 5, 7, 11] {
        let max = match p {
            2 => table_max,
            3 if tier == Tier::Full => 12,
            _ => grid_max,
        };
        for n in 1..=max {
            suite.check(format!("census/p={}/n={}", p, n), || {
                let t = census(n, p)?;
                let expected = format!(
                    "min {} second {} total {}",
                    closedform::count_min_size(n, p)?,
                    closedform::second_size_count(n, p)?,
                    engine::total_via_classes(n, p)?
                );
                let actual = format!("min {} second {} total {}", t.count(0), t.count(1), t.total);
                Ok((expected, actual))
            });
        }
    }
    suite.check("abelian/p=3/k=2/brute-force".into(), || {
        let s = SylowStructure::new(6, 3)?;
        let mut sizes = [0u64; 5];
        for x in all_permutations(6) {
            let inter = s.intersection_order(&x)?;
            // a double coset of size 81/|P ∩ P^x| contains 81/inter elements
            let a = 4 - inter.ilog(3) as usize;
            sizes[a] += 1;
        }
        let counts: Vec<u64> = (2..=4).map(|a| sizes[a] / 3u64.pow(a as u32)).collect();
        let c = closedform::abelian_census(3, 2)?;
        Ok((join(&c.values.values().cloned().collect::<Vec<_>>()), join(&counts)))
    });
    let abelian: &[(u64, u64)] = if tier == Tier::Quick {
        &[(3, 1), (3, 2), (5, 1), (7, 1)]
    } else {
        &[(3, 1), (3, 2), (5, 1), (5, 2), (7, 1), (11, 1)]
    };
    for &(p, k) in abelian {
        suite.check(format!("abelian/p={}/k={}/census", p, k), || {
            let c = closedform::abelian_census(p, k)?;
            let t = census((k * p) as usize, p)?;
            let actual: Vec<BigUint> = (k..=2 * k).map(|a| t.count((a - k) as usize)).collect();
            Ok((join(&c.values.values().cloned().collect::<Vec<_>>()), join(&actual)))
        });
    }
    for p in [3u64, 5, 7, 11, 13] {
        for k in 1..p {
            suite.check(format!("abelian/p={}/k={}/identities", p, k), || {
                let c = closedform::abelian_census(p, k)?;
                let g = closedform::abelian_census_from_genfun(p, k)?;
                let mass: BigUint = c
                    .values
                    .iter()
                    .map(|(a, v)| BigUint::from(p).pow(*a as u32) * v)
                    .sum();
                let nk = closedform::factorial(k) * BigUint::from(p - 1).pow(k as u32);
                let bounds = closedform::check_bounds_thm33(p, k)?;
                let expected = format!("mass {} n_k {} genfun true bounds true", closedform::factorial(k * p), nk);
                let actual = format!(
                    "mass {} n_k {} genfun {} bounds {}",
                    mass,
                    c.values[&k],
                    c == g,
                    bounds.pass
                );
                Ok((expected, actual))
            });
        }
    }
    suite.check("example/p=11/closed-form".into(), || {
        let c = closedform::abelian_census(11, 1)?;
        let p = 11u64;
        let closed = (closedform::factorial(p - 1) - BigUint::from(p - 1)) / BigUint::from(p);
        Ok((
            format!("{},{}", p - 1, closed),
            join(&c.values.values().cloned().collect::<Vec<_>>()),
        ))
    });
    let lemma: &[(usize, u64)] = if tier == Tier::Quick {
        &[(4, 2), (5, 2), (6, 2), (6, 3)]
    } else {
        &[(4, 2), (5, 2), (6, 2), (6, 3), (8, 2), (9, 3)]
    };
    for &(n, p) in lemma {
        suite.check(format!("sylow-intersections/n={}/p={}", n, p), || {
            let r = engine::verify_lemma_d(n, p)?;
            Ok(("true,true".into(), format!("{},{}", r.identity_holds, r.divisibility_holds)))
        });
    }
    let witness_max = if tier == Tier::Quick { 10 } else { 14 };
    for n in 1..=witness_max {
        for p in [2u64, 3, 5, 7, 11, 13] {
            suite.check(format!("witness/n={}/p={}", n, p), || {
                let s = SylowStructure::new(n, p)?;
                let mut built = Vec::new();
                for k in 0..=s.m() {
                    if witness::is_exception(n, p, k) {
                        continue;
                    }
                    let mut rng = stream(DEFAULT_SEED, k as u64);
                    let w = witness::construct_intersection(n, p, k, &mut rng)?;
                    let e = witness::measured_exponent(&s, &w.x, k)?;
                    if e == Some(k) {
                        built.push(k);
                    }
                }
                let expected: Vec<usize> =
                    (0..=s.m()).filter(|&k| !witness::is_exception(n, p, k)).collect();
                Ok((join(&expected), join(&built)))
            });
        }
    }
    for (n, p, k) in witness::exceptions() {
        suite.check(format!("exception/n={}/p={}/k={}", n, p, k), || {
            let s = SylowStructure::new(n, p)?;
            let target = p.pow(k as u32);
            let mut hits = 0u64;
            for x in all_permutations(n) {
                if s.intersection_order(&x)? == target {
                    hits += 1;
                }
            }
            Ok(("0".into(), hits.to_string()))
        });
    }

    let count = |s: Status| suite.checks.iter().filter(|c| c.status == s).count();
    VerifyReport {
        tier: tier.name(),
        passed: count(Status::Pass),
        failed: count(Status::Fail),
        skipped: count(Status::Skipped),
        checks: suite.checks,
    }
}
