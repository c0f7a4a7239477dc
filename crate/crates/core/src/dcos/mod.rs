//! Double cosets `P\S_n/P` of the standard Sylow subgroup.
//!
//! Left cosets `gP` are named by their lexicographically least element,
//! packed into a `u64`. The exhaustive census walks the coset space
//! breadth-first and then splits it into orbits of `P` acting by left
//! multiplication; an orbit of `p^k` cosets is one double coset of size
//! `p^{m+k}`.

pub mod fast;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use log::{debug, info};
use num::{BigUint, ToPrimitive, Zero};
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::closedform::factorial;
use crate::error::{Error, Result};
use crate::perm::{CycleType, Permutation, MAX_PACK_DEGREE};
use crate::rng::par_blocks;
use crate::stats::{std_error, wilson, Interval, Z95};
use crate::sylow::{exact_log, PAdicProfile, StabilizerChain, SylowStructure};

use fast::FastCosets;

/// Default limit on the number of left cosets an exhaustive census visits.
pub const DEFAULT_COSET_LIMIT: u64 = 100_000_000;

/// Bytes per coset key across the visited set and the sorted key list.
const BYTES_PER_KEY: u64 = 24;

const FRONTIER_CHUNK: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusBudget {
    pub coset_space_limit: u64,
}

impl Default for CensusBudget {
    fn default() -> Self {
        CensusBudget {
            coset_space_limit: DEFAULT_COSET_LIMIT,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Sampled,
    Formula,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exhaustive => "exhaustive",
            Method::Sampled => "sampled",
            Method::Formula => "formula",
        })
    }
}

/// Double-coset counts by size: `counts[k]` double cosets of size `p^{m+k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusTable {
    pub n: usize,
    pub p: u64,
    pub m: usize,
    pub method: Method,
    /// One entry per `k` in `0..=m`; empty when only the total is known.
    pub counts: Vec<BigUint>,
    pub total: BigUint,
}

impl CensusTable {
    /// `Σ_k counts[k]·p^{m+k}`.
    pub fn mass(&self) -> BigUint {
        let p = BigUint::from(self.p);
        self.counts
            .iter()
            .enumerate()
            .map(|(k, c)| c * p.pow((self.m + k) as u32))
            .sum()
    }

    pub fn mass_check(&self) -> bool {
        self.mass() == factorial(self.n as u64)
    }

    pub fn count(&self, k: usize) -> BigUint {
        self.counts.get(k).cloned().unwrap_or_default()
    }
}

#[derive(Serialize, Deserialize)]
struct CountEntry {
    k: usize,
    count: String,
}

#[derive(Serialize, Deserialize)]
struct CensusWire {
    n: usize,
    p: u64,
    m: usize,
    method: Method,
    counts: Vec<CountEntry>,
    total: String,
}

fn parse_decimal<E: serde::de::Error>(s: &str) -> std::result::Result<BigUint, E> {
    BigUint::parse_bytes(s.as_bytes(), 10)
        .ok_or_else(|| E::custom(format!("not a decimal integer: {:?}", s)))
}

impl Serialize for CensusTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CensusWire {
            n: self.n,
            p: self.p,
            m: self.m,
            method: self.method,
            counts: self
                .counts
                .iter()
                .enumerate()
                .map(|(k, c)| CountEntry {
                    k,
                    count: c.to_string(),
                })
                .collect(),
            total: self.total.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CensusTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let wire = CensusWire::deserialize(d)?;
        let mut counts = Vec::with_capacity(wire.counts.len());
        for (i, e) in wire.counts.iter().enumerate() {
            if e.k != i {
                return Err(D::Error::custom("counts must be listed for k = 0, 1, 2, …"));
            }
            counts.push(parse_decimal(&e.count)?);
        }
        Ok(CensusTable {
            n: wire.n,
            p: wire.p,
            m: wire.m,
            method: wire.method,
            counts,
            total: parse_decimal(&wire.total)?,
        })
    }
}

/// Lexicographically least element of `gP`.
pub fn canonical_coset_rep(chain: &StabilizerChain, g: &Permutation) -> Result<Permutation> {
    if g.degree() != chain.degree() {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: chain.degree(),
        });
    }
    Ok(chain.canonical_coset_rep(g))
}

/// `|PxP| = |P|²/|P ∩ P^x|`.
pub fn double_coset_size(s: &SylowStructure, x: &Permutation) -> Result<BigUint> {
    let inter = s
        .intersection_order_search(x, u64::MAX)?
        .expect("uncapped search always returns a count");
    let order = s.order();
    Ok(&order * &order / BigUint::from(inter))
}

fn coset_space_size(prof: &PAdicProfile) -> BigUint {
    factorial(prof.n as u64) / prof.order()
}

fn check_census_budget(prof: &PAdicProfile, budget: &CensusBudget) -> Result<u64> {
    let cosets = coset_space_size(prof);
    let fits = prof.n <= MAX_PACK_DEGREE
        && cosets
            .to_u64()
            .is_some_and(|c| c <= budget.coset_space_limit);
    if !fits {
        let bytes = &cosets * BigUint::from(BYTES_PER_KEY);
        return Err(Error::BudgetExceeded {
            what: "exhaustive census",
            required: format!("{} left cosets", cosets),
            limit: format!(
                "{} cosets and n ≤ {}",
                budget.coset_space_limit, MAX_PACK_DEGREE
            ),
            estimate: format!("about {} bytes of coset keys", bytes),
        });
    }
    Ok(cosets.to_u64().unwrap())
}

/// Exact double-coset counts by breadth-first search of the coset space.
pub fn census_exhaustive(n: usize, p: u64, budget: &CensusBudget) -> Result<CensusTable> {
    let s = SylowStructure::new(n, p)?;
    let expected = check_census_budget(s.profile(), budget)?;
    let fc = FastCosets::new(&s);
    let keys = visit_coset_space(&fc, expected)?;
    let orbit_counts = split_into_orbits(&fc, &keys, p, s.m())?;

    let total: BigUint = orbit_counts.iter().sum();
    let table = CensusTable {
        n,
        p,
        m: s.m(),
        method: Method::Exhaustive,
        counts: orbit_counts,
        total,
    };
    if !table.mass_check() {
        return Err(Error::InvariantViolation(format!(
            "census mass {} differs from {}!",
            table.mass(),
            n
        )));
    }
    Ok(table)
}

/// Sorted keys of every left coset, reached from `P` by left
/// multiplication with adjacent transpositions.
fn visit_coset_space(fc: &FastCosets, expected: u64) -> Result<Vec<u64>> {
    let n = fc.degree();
    let mut visited: FxHashSet<u64> =
        FxHashSet::with_capacity_and_hasher(expected as usize, Default::default());
    let start = fc.key(&fast::small_identity());
    visited.insert(start);
    let mut frontier = vec![start];
    let mut depth = 0;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for chunk in frontier.chunks(FRONTIER_CHUNK) {
            let candidates: Vec<u64> = chunk
                .par_iter()
                .flat_map_iter(|&key| {
                    let g = fast::unpack(key, n);
                    (0..n.saturating_sub(1) as u8).map(move |v| fc.key(&fast::swap_values(&g, v)))
                })
                .collect();
            for c in candidates {
                if visited.insert(c) {
                    next.push(c);
                }
            }
        }
        depth += 1;
        debug!("coset BFS depth {}: {} new, {} total", depth, next.len(), visited.len());
        frontier = next;
    }
    if visited.len() as u64 != expected {
        return Err(Error::InvariantViolation(format!(
            "visited {} cosets, expected {}",
            visited.len(),
            expected
        )));
    }
    let mut keys: Vec<u64> = visited.into_iter().collect();
    keys.par_sort_unstable();
    info!("coset space: {} cosets", keys.len());
    Ok(keys)
}

/// Attributes cosets to `P`-orbits, seeding each orbit from the least
/// unattributed key; returns the number of orbits of each size `p^k`.
fn split_into_orbits(fc: &FastCosets, keys: &[u64], p: u64, m: usize) -> Result<Vec<BigUint>> {
    let mut counts = vec![0u64; m + 1];
    let mut done: FxHashSet<u64> =
        FxHashSet::with_capacity_and_hasher(keys.len(), Default::default());
    for &seed in keys {
        if done.contains(&seed) {
            continue;
        }
        let orbit = fc.left_orbit(seed);
        let k = exact_log(orbit.len() as u64, p)
            .filter(|&k| k <= m)
            .ok_or_else(|| {
                Error::InvariantViolation(format!(
                    "orbit of size {} is not a power p^k with k ≤ {}",
                    orbit.len(),
                    m
                ))
            })?;
        counts[k] += 1;
        done.extend(orbit);
    }
    Ok(counts.into_iter().map(BigUint::from).collect())
}

/// Key naming the double coset `PxP`: its least element, packed.
pub struct DoubleCosetKeyer {
    fc: FastCosets,
}

impl DoubleCosetKeyer {
    pub fn new(s: &SylowStructure) -> Result<Self> {
        if s.degree() > MAX_PACK_DEGREE {
            return Err(Error::OutOfRange {
                what: "degree",
                detail: format!("double-coset keys need n ≤ {}", MAX_PACK_DEGREE),
            });
        }
        Ok(DoubleCosetKeyer {
            fc: FastCosets::new(s),
        })
    }

    pub fn key(&self, x: &Permutation) -> u64 {
        self.fc.double_coset_key(&fast::to_small(x))
    }
}

/// `|P\S_n/P|` from the class equation
/// `(n!/|P|²)·Σ_λ |C_λ ∩ P|²/|C_λ| = Σ_λ |C_λ ∩ P|²·z_λ / |P|²`.
pub fn total_via_classes(n: usize, p: u64) -> Result<BigUint> {
    let s = SylowStructure::new(n, p)?;
    // enforces the enumeration guard
    drop(s.elements()?);
    let order = s.profile().order_u64().expect("guarded above");
    let buckets = (0..order)
        .into_par_iter()
        .fold(HashMap::new, |mut local: HashMap<CycleType, u64>, i| {
            let g = s.element_by_index(i).expect("index in range");
            *local.entry(g.cycle_type()).or_default() += 1;
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut sum = BigUint::zero();
    for (ct, c) in &buckets {
        sum += BigUint::from(*c).pow(2) * ct.centralizer_order();
    }
    let order = s.order();
    let denom = &order * &order;
    if !(&sum % &denom).is_zero() {
        return Err(Error::InexactDivision(format!(
            "class sum {} over |P|² = {}",
            sum, denom
        )));
    }
    Ok(sum / denom)
}

/// Class-formula census: only the total is known.
pub fn census_via_classes(n: usize, p: u64) -> Result<CensusTable> {
    let prof = PAdicProfile::new(n, p)?;
    Ok(CensusTable {
        n,
        p,
        m: prof.m,
        method: Method::Formula,
        counts: Vec::new(),
        total: total_via_classes(n, p)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MassCell {
    pub k: usize,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    pub ci95: Interval,
}

/// Estimated probability that a uniform `x` lies in a double coset of
/// size `p^{m+k}`, for each `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledCensus {
    pub n: usize,
    pub p: u64,
    pub m: usize,
    pub method: Method,
    pub samples: u64,
    pub seed: u64,
    pub mass: Vec<MassCell>,
}

impl SampledCensus {
    /// Exact cell probabilities `counts[k]·p^{m+k}/n!` of an exact census.
    pub fn exact_mass(table: &CensusTable) -> Vec<f64> {
        let nf = factorial(table.n as u64);
        let p = BigUint::from(table.p);
        table
            .counts
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let num = c * p.pow((table.m + k) as u32);
                ratio(&num, &nf)
            })
            .collect()
    }
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    // scale to keep 53 bits of the quotient
    let shift = b.bits().saturating_sub(60);
    let a = (a >> shift).to_f64().unwrap_or(f64::INFINITY);
    let b = (b >> shift).to_f64().unwrap_or(f64::INFINITY);
    a / b
}

/// Monte Carlo census: bins uniform samples by double-coset size.
pub fn census_sampled(n: usize, p: u64, samples: u64, seed: u64) -> Result<SampledCensus> {
    let s = SylowStructure::new(n, p)?;
    let m = s.m();
    let blocks = par_blocks(samples, seed, |rng, len| -> Result<Vec<u64>> {
        let mut hist = vec![0u64; m + 1];
        for _ in 0..len {
            let x = Permutation::random_uniform(n, rng);
            let inter = s
                .intersection_order_search(&x, u64::MAX)?
                .expect("uncapped search always returns a count");
            let e = exact_log(inter, p).filter(|&e| e <= m).ok_or_else(|| {
                Error::InvariantViolation(format!("intersection order {} is not a power of p", inter))
            })?;
            hist[m - e] += 1;
        }
        Ok(hist)
    });
    let mut hist = vec![0u64; m + 1];
    for block in blocks {
        for (h, b) in hist.iter_mut().zip(block?) {
            *h += b;
        }
    }
    let mass = hist
        .iter()
        .enumerate()
        .map(|(k, &hits)| {
            let estimate = if samples == 0 {
                0.0
            } else {
                hits as f64 / samples as f64
            };
            MassCell {
                k,
                hits,
                estimate,
                std_error: std_error(estimate, samples),
                ci95: wilson(hits, samples, Z95),
            }
        })
        .collect();
    Ok(SampledCensus {
        n,
        p,
        m,
        method: Method::Sampled,
        samples,
        seed,
        mass,
    })
}

/// Result of counting Sylow subgroups by their intersection with `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaDReport {
    pub n: usize,
    pub p: u64,
    #[serde(with = "crate::decimal")]
    pub sylow_count: BigUint,
    /// `k ↦ d(p^k)`, the number of Sylow subgroups `Q` with `|P : P∩Q| = p^k`.
    #[serde(with = "crate::decimal::map")]
    pub d: BTreeMap<usize, BigUint>,
    pub identity_holds: bool,
    pub divisibility_holds: bool,
}

impl LemmaDReport {
    pub fn pass(&self) -> bool {
        self.identity_holds && self.divisibility_holds
    }
}

/// Largest number of Sylow subgroups [`verify_lemma_d`] will enumerate.
pub const LEMMA_D_LIMIT: u64 = 10_000_000;

/// Every Sylow subgroup `gPg⁻¹`, each as the sorted list of its packed
/// elements, in order of the least coset key `g` producing it. The first
/// entry is `P` itself.
pub fn sylow_subgroups(n: usize, p: u64, limit: u64) -> Result<Vec<Vec<u64>>> {
    let s = SylowStructure::new(n, p)?;
    let prof = s.profile().clone();
    let sylow_count = coset_space_size(&prof) / prof.normalizer_index();
    let work = &sylow_count * prof.order();
    if n > MAX_PACK_DEGREE || sylow_count.to_u64().is_none_or(|c| c > limit) {
        return Err(Error::BudgetExceeded {
            what: "Sylow subgroup enumeration",
            required: format!("{} subgroups", sylow_count),
            limit: format!("{} subgroups and n ≤ {}", limit, MAX_PACK_DEGREE),
            estimate: format!("{} packed elements in total", work),
        });
    }
    let fc = FastCosets::new(&s);
    let elements: Vec<fast::Small> = s.elements()?.map(|g| fast::to_small(&g)).collect();
    let expected = check_census_budget(&prof, &CensusBudget::default())?;
    let keys = visit_coset_space(&fc, expected)?;
    let mut seen: FxHashSet<Vec<u64>> = FxHashSet::default();
    let mut out = Vec::new();
    for key in keys {
        let g = fast::unpack(key, n);
        let mut ginv = fast::small_identity();
        for (i, &v) in g.iter().enumerate() {
            ginv[v as usize] = i as u8;
        }
        let mut conj: Vec<u64> = elements
            .iter()
            .map(|h| fast::pack(&fast::compose(&fast::compose(&g, h), &ginv), n))
            .collect();
        conj.sort_unstable();
        if seen.insert(conj.clone()) {
            out.push(conj);
        }
    }
    if BigUint::from(out.len()) != sylow_count {
        return Err(Error::InvariantViolation(format!(
            "found {} Sylow subgroups, expected {}",
            out.len(),
            sylow_count
        )));
    }
    Ok(out)
}

/// Counts Sylow subgroups by `|P : P∩Q|` and checks
/// `counts[k] = d(p^k)/p^k · |N(P):P|` against the exhaustive census.
pub fn verify_lemma_d(n: usize, p: u64) -> Result<LemmaDReport> {
    let prof = PAdicProfile::new(n, p)?;
    let nindex = prof.normalizer_index();
    let subgroups = sylow_subgroups(n, p, LEMMA_D_LIMIT)?;
    let census = census_exhaustive(n, p, &CensusBudget::default())?;
    let own = &subgroups[0];
    let mut d = BTreeMap::new();
    for q in &subgroups {
        let common = sorted_intersection_len(own, q) as u64;
        let e = exact_log(common, p).ok_or_else(|| {
            Error::InvariantViolation(format!("|P ∩ Q| = {} is not a power of p", common))
        })?;
        *d.entry(prof.m - e).or_insert_with(BigUint::zero) += 1u32;
    }
    let pb = BigUint::from(p);
    let mut identity_holds = true;
    let mut divisibility_holds = true;
    for k in 0..=prof.m {
        let dk = d.get(&k).cloned().unwrap_or_default();
        let pk = pb.pow(k as u32);
        if !(&dk % &pk).is_zero() {
            divisibility_holds = false;
        }
        if census.count(k) * &pk != dk * &nindex {
            identity_holds = false;
        }
    }
    Ok(LemmaDReport {
        n,
        p,
        sylow_count: BigUint::from(subgroups.len()),
        d,
        identity_holds,
        divisibility_holds,
    })
}

/// Size of the intersection of two sorted, duplicate-free lists.
pub fn sorted_intersection_len(a: &[u64], b: &[u64]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

impl CensusTable {
    /// `counts[0]` must equal `|N(P):P|`.
    pub fn min_size_check(&self) -> bool {
        match (self.counts.first(), PAdicProfile::new(self.n, self.p)) {
            (Some(c), Ok(prof)) => *c == prof.normalizer_index(),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests;
