//! Monte Carlo estimates around `f(n, p) = Pr(|P ∩ P^x| > 1)`.
//!
//! Estimators split their samples into fixed blocks drawn from
//! counter-keyed streams (see [`crate::rng`]), so a report depends only on
//! `(seed, samples)`.

mod giant;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dcos::{sorted_intersection_len, sylow_subgroups, total_via_classes, DoubleCosetKeyer};
use crate::error::{Error, Result};
use crate::perm::{all_permutations, Permutation};
use crate::rng::{par_blocks, stream};
use crate::stats::{chi_square_quantile, chi_square_uniform, tv_to_poisson, wilson, Interval, Z95};
use crate::sylow::SylowStructure;

pub use giant::{giant_test, GiantVerdict};

/// A proportion estimate with its Wilson interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub n: usize,
    pub p: u64,
    pub samples: u64,
    pub seed: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci95: Interval,
    /// Wall-clock seconds; only filled in when the caller asks for timing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed: Option<f64>,
}

impl EstimateReport {
    fn new(n: usize, p: u64, samples: u64, seed: u64, successes: u64) -> Self {
        let p_hat = if samples == 0 {
            0.0
        } else {
            successes as f64 / samples as f64
        };
        EstimateReport {
            n,
            p,
            samples,
            seed,
            successes,
            p_hat,
            ci95: wilson(successes, samples, Z95),
            elapsed: None,
        }
    }

    pub fn std_error(&self) -> f64 {
        crate::stats::std_error(self.p_hat, self.samples)
    }

    pub fn overlaps(&self, other: &EstimateReport) -> bool {
        self.ci95.lo <= other.ci95.hi && other.ci95.lo <= self.ci95.hi
    }
}

fn count_hits<F>(samples: u64, seed: u64, hit: F) -> Result<u64>
where
    F: Fn(&mut crate::rng::StreamRng) -> Result<bool> + Sync,
{
    let blocks = par_blocks(samples, seed, |rng, len| -> Result<u64> {
        let mut hits = 0;
        for _ in 0..len {
            if hit(rng)? {
                hits += 1;
            }
        }
        Ok(hits)
    });
    blocks.into_iter().sum()
}

/// Estimates `f(n, p)` from uniform `x ∈ S_n`.
pub fn estimate_f(n: usize, p: u64, samples: u64, seed: u64) -> Result<EstimateReport> {
    let s = SylowStructure::new(n, p)?;
    let hits = count_hits(samples, seed, |rng| {
        let x = Permutation::random_uniform(n, rng);
        s.intersection_nontrivial(&x)
    })?;
    Ok(EstimateReport::new(n, p, samples, seed, hits))
}

/// Largest degree accepted by [`exact_f`].
pub const EXACT_F_MAX_DEGREE: usize = 10;

/// `f(n, p)` as `(#x with |P ∩ P^x| > 1, n!)`, by running over all of `S_n`.
pub fn exact_f(n: usize, p: u64) -> Result<(u64, u64)> {
    if n > EXACT_F_MAX_DEGREE {
        return Err(Error::BudgetExceeded {
            what: "exact f by enumeration of S_n",
            required: format!("n = {}", n),
            limit: format!("n ≤ {}", EXACT_F_MAX_DEGREE),
            estimate: format!("{}! permutations", n),
        });
    }
    let s = SylowStructure::new(n, p)?;
    let mut hits = 0;
    let mut total = 0;
    for x in all_permutations(n) {
        total += 1;
        if s.intersection_nontrivial(&x)? {
            hits += 1;
        }
    }
    Ok((hits, total))
}

/// Where the uniformly random Sylow subgroup of model (2) came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SylowSource {
    /// Drawn from the explicit list of all Sylow subgroups.
    Enumerated,
    /// `P^y` for an independent uniform `y`.
    Conjugated,
}

/// Sylow lists up to this many subgroups are enumerated for model (2).
pub const MODEL_SYLOW_LIMIT: u64 = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCheck {
    pub n: usize,
    pub p: u64,
    pub uniform_x: EstimateReport,
    pub uniform_sylow: EstimateReport,
    pub sylow_source: SylowSource,
    /// Exact `f` when `S_n` is small enough to enumerate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    pub pass: bool,
}

/// Estimates `f` as `Pr(P ∩ P^x ≠ 1)` for uniform `x` and as
/// `Pr(P ∩ Q ≠ 1)` for a uniform Sylow subgroup `Q`, on separate streams.
/// Passes when the two 95% intervals overlap.
pub fn check_model_equivalence(n: usize, p: u64, samples: u64, seed: u64) -> Result<ModelCheck> {
    let uniform_x = estimate_f(n, p, samples, seed)?;
    let sylow_seed = seed ^ 0x5157_4c4f_5753_594c;
    let (hits, sylow_source) = match sylow_subgroups(n, p, MODEL_SYLOW_LIMIT) {
        Ok(list) => {
            let own = &list[0];
            let hits = count_hits(samples, sylow_seed, |rng| {
                let q = &list[rng.random_range(0..list.len())];
                Ok(sorted_intersection_len(own, q) > 1)
            })?;
            (hits, SylowSource::Enumerated)
        }
        Err(Error::BudgetExceeded { .. }) => {
            let s = SylowStructure::new(n, p)?;
            let hits = count_hits(samples, sylow_seed, |rng| {
                let y = Permutation::random_uniform(n, rng);
                s.intersection_nontrivial(&y)
            })?;
            (hits, SylowSource::Conjugated)
        }
        Err(e) => return Err(e),
    };
    let uniform_sylow = EstimateReport::new(n, p, samples, sylow_seed, hits);
    let exact = if n <= 8 {
        let (h, t) = exact_f(n, p)?;
        Some(h as f64 / t as f64)
    } else {
        None
    };
    let pass = uniform_x.overlaps(&uniform_sylow);
    Ok(ModelCheck {
        n,
        p,
        uniform_x,
        uniform_sylow,
        sylow_source,
        exact,
        pass,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingSample {
    pub n: usize,
    #[serde(rename = "W")]
    pub w: usize,
}

fn check_even(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OutOfRange {
            what: "n",
            detail: format!("the matching statistic needs even n, got {}", n),
        });
    }
    Ok(())
}

/// Number of blocks `{2i+1, 2i+2}` that `g` maps onto a block.
pub fn matching_pairs(g: &Permutation) -> Result<usize> {
    check_even(g.degree())?;
    let im = g.images();
    Ok(im.chunks_exact(2).filter(|b| b[0] / 2 == b[1] / 2).count())
}

pub fn matching_statistic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MatchingSample> {
    check_even(n)?;
    let g = Permutation::random_uniform(n, rng);
    Ok(MatchingSample {
        n,
        w: matching_pairs(&g)?,
    })
}

/// Estimates `Pr(W > 0)` for uniform `g ∈ S_n`.
pub fn estimate_w_positive(n: usize, samples: u64, seed: u64) -> Result<EstimateReport> {
    check_even(n)?;
    let hits = count_hits(samples, seed, |rng| Ok(matching_statistic(n, rng)?.w > 0))?;
    Ok(EstimateReport::new(n, 2, samples, seed, hits))
}

/// Empirical law of `W`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingLaw {
    pub n: usize,
    pub samples: u64,
    pub seed: u64,
    /// `counts[w]` = number of samples with `W = w`.
    pub counts: Vec<u64>,
    pub mean: f64,
    pub tv_to_poisson_half: f64,
}

pub fn matching_law(n: usize, samples: u64, seed: u64) -> Result<MatchingLaw> {
    check_even(n)?;
    let blocks = par_blocks(samples, seed, |rng, len| -> Result<Vec<u64>> {
        let mut hist = vec![0u64; n / 2 + 1];
        for _ in 0..len {
            hist[matching_statistic(n, rng)?.w] += 1;
        }
        Ok(hist)
    });
    let mut counts = vec![0u64; n / 2 + 1];
    for block in blocks {
        for (c, b) in counts.iter_mut().zip(block?) {
            *c += b;
        }
    }
    let mean = if samples == 0 {
        0.0
    } else {
        counts.iter().enumerate().map(|(w, &c)| w as f64 * c as f64).sum::<f64>() / samples as f64
    };
    while counts.len() > 1 && counts.last() == Some(&0) {
        counts.pop();
    }
    let tv_to_poisson_half = tv_to_poisson(&counts, 0.5);
    Ok(MatchingLaw {
        n,
        samples,
        seed,
        counts,
        mean,
        tv_to_poisson_half,
    })
}

/// Uniform element of the centralizer of `h`: rotates every cycle
/// independently and shuffles cycles of equal length.
pub fn random_centralizer_element<R: Rng + ?Sized>(h: &Permutation, rng: &mut R) -> Permutation {
    let n = h.degree();
    let mut by_len: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for c in h.cycles() {
        by_len.entry(c.len()).or_default().push(c);
    }
    let mut images = vec![0u32; n];
    for (len, cycles) in by_len {
        let mut target: Vec<usize> = (0..cycles.len()).collect();
        target.shuffle(rng);
        for (src, &dst) in cycles.iter().zip(&target) {
            let shift = rng.random_range(0..len);
            let dst = &cycles[dst];
            for (j, &a) in src.iter().enumerate() {
                images[a] = dst[(j + shift) % len] as u32;
            }
        }
    }
    Permutation::from_raw(images)
}

/// One step of the Burnside process for `(h, k)·g = h g k⁻¹` on `S_n`.
pub fn burnside_step<R: Rng + ?Sized>(
    s: &SylowStructure,
    x: &Permutation,
    rng: &mut R,
) -> Result<Permutation> {
    // h ∈ P with x⁻¹hx ∈ P
    let stab = s.intersection_elements(&x.inverse())?;
    let h = &stab[rng.random_range(0..stab.len())];
    let c = random_centralizer_element(h, rng);
    Ok(c.compose_unchecked(x))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassVisits {
    /// Least element of the double coset, in image notation.
    pub representative: String,
    pub visits: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BurnsideReport {
    pub n: usize,
    pub p: u64,
    pub steps: u64,
    pub seed: u64,
    /// Number of double cosets, from the class formula.
    pub classes: u64,
    pub visited: usize,
    pub visits: Vec<ClassVisits>,
    /// Pearson statistic of the raw visit counts.
    pub chi_square: f64,
    /// Mean variance inflation of the visit frequencies caused by
    /// autocorrelation, estimated by batch means.
    pub design_effect: f64,
    /// Degrees of freedom of the corrected statistic.
    pub corrected_dof: f64,
    pub corrected_chi_square: f64,
    pub critical_01: f64,
    pub uniform: bool,
}

/// Number of batches used to estimate the covariance of the visit frequencies.
pub const BURNSIDE_BATCHES: usize = 50;

/// Second-order Rao–Scott correction of a Pearson statistic against the
/// uniform law on `classes` cells. `batches` holds the visit counts of
/// equal-length stretches of the chain. Returns `(mean design effect,
/// corrected statistic, degrees of freedom)`. The design effect is floored
/// at the independent-sampling value.
fn rao_scott(batches: &[BTreeMap<u64, u64>], classes: u64, chi_square: f64) -> (f64, f64, f64) {
    let dof = (classes - 1) as f64;
    let b = batches.len();
    if b < 2 {
        return (1.0, chi_square, dof);
    }
    let mut keys: Vec<u64> = batches.iter().flat_map(|m| m.keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    let freq: Vec<Vec<f64>> = batches
        .iter()
        .map(|m| {
            let len: u64 = m.values().sum();
            keys.iter()
                .map(|k| m.get(k).copied().unwrap_or(0) as f64 / len as f64)
                .collect()
        })
        .collect();
    let mean: Vec<f64> = (0..keys.len())
        .map(|i| freq.iter().map(|f| f[i]).sum::<f64>() / b as f64)
        .collect();
    let dev: Vec<Vec<f64>> = freq
        .iter()
        .map(|f| f.iter().zip(&mean).map(|(a, m)| a - m).collect())
        .collect();
    // Covariance of a single batch frequency vector, scaled by the batch
    // length and by `classes` (the inverse multinomial covariance on the
    // sum-zero subspace): its trace and squared Frobenius norm are the sum
    // and sum of squares of the generalized design effects.
    let len = batches[0].values().sum::<u64>() as f64;
    let scale = len * classes as f64 / (b - 1) as f64;
    let trace: f64 = dev.iter().map(|d| d.iter().map(|x| x * x).sum::<f64>()).sum::<f64>() * scale;
    let mut frob = 0.0;
    for a in &dev {
        for c in &dev {
            let dot: f64 = a.iter().zip(c).map(|(x, y)| x * y).sum();
            frob += dot * dot;
        }
    }
    let frob = frob * scale * scale;
    if trace <= dof || frob <= 0.0 {
        return (1.0, chi_square, dof);
    }
    let nu = trace * trace / frob;
    (trace / dof, chi_square * nu / trace, nu)
}

/// Runs the Burnside chain from `start` (identity by default) and tests
/// the visit counts for uniformity over all double cosets. Successive
/// states are correlated, so the Pearson statistic gets a Rao–Scott
/// correction from batch means before the 1% test.
pub fn burnside_chain(
    n: usize,
    p: u64,
    steps: u64,
    seed: u64,
    start: Option<Permutation>,
) -> Result<BurnsideReport> {
    let s = SylowStructure::new(n, p)?;
    let keyer = DoubleCosetKeyer::new(&s)?;
    let classes = total_via_classes(n, p)?;
    let classes = num::ToPrimitive::to_u64(&classes).ok_or_else(|| Error::BudgetExceeded {
        what: "Burnside chain",
        required: format!("{} double cosets", classes),
        limit: "2^64 double cosets".into(),
        estimate: "one counter per double coset".into(),
    })?;
    let mut x = match start {
        Some(x) => {
            if x.degree() != n {
                return Err(Error::DegreeMismatch {
                    left: n,
                    right: x.degree(),
                });
            }
            x
        }
        None => Permutation::identity(n),
    };
    let mut rng = stream(seed, 0);
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let batch_len = (steps / BURNSIDE_BATCHES as u64).max(1);
    let mut batches: Vec<BTreeMap<u64, u64>> = Vec::new();
    for step in 0..steps {
        x = burnside_step(&s, &x, &mut rng)?;
        let key = keyer.key(&x);
        *counts.entry(key).or_insert(0) += 1;
        let b = (step / batch_len) as usize;
        if b < BURNSIDE_BATCHES {
            if batches.len() == b {
                batches.push(BTreeMap::new());
            }
            *batches[b].entry(key).or_insert(0) += 1;
        }
    }
    let visited = counts.len();
    let mut observed: Vec<u64> = counts.values().copied().collect();
    observed.resize(classes.max(visited as u64) as usize, 0);
    let (chi_square, design_effect, corrected_chi_square, corrected_dof, critical_01) =
        if classes > 1 {
            let chi = chi_square_uniform(&observed);
            let full = if steps >= BURNSIDE_BATCHES as u64 {
                &batches[..]
            } else {
                &[]
            };
            let (d, corrected, nu) = rao_scott(full, classes, chi);
            (chi, d, corrected, nu, chi_square_quantile(nu, 0.01))
        } else {
            (0.0, 1.0, 0.0, 0.0, 0.0)
        };
    let visits = counts
        .into_iter()
        .map(|(key, visits)| {
            let rep = Permutation::unpack(key, n).expect("keys are packed permutations");
            ClassVisits {
                representative: rep.to_string(),
                visits,
            }
        })
        .collect();
    Ok(BurnsideReport {
        n,
        p,
        steps,
        seed,
        classes,
        visited,
        visits,
        chi_square,
        design_effect,
        corrected_dof,
        corrected_chi_square,
        critical_01,
        uniform: visited as u64 == classes && corrected_chi_square <= critical_01,
    })
}
