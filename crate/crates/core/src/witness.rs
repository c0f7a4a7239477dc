//! Permutations `x` with a prescribed `|P ∩ P^x| = p^k`.
//!
//! Small degrees are handled by randomized search. Larger ones are built
//! recursively from witnesses on blocks, following the standard layout:
//! the first tree covers the largest `p`-power `n_1 ≤ n`, and a tree of
//! height `ℓ` splits into `p` consecutive subtrees of height `ℓ−1`.
//! Nothing is trusted: every returned witness has its intersection order
//! measured exactly.

use std::collections::BTreeSet;
use std::fmt;

use log::debug;
use num::BigUint;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::sylow::{exact_log, SylowStructure, ENUMERATION_LIMIT};

/// Default number of random candidates tried by a search.
pub const DEFAULT_TRIES: u64 = 100_000;

const EXCEPTIONS: [(usize, u64, usize); 6] =
    [(2, 2, 0), (4, 2, 0), (4, 2, 1), (8, 2, 0), (3, 3, 0), (6, 3, 1)];

/// The triples `(n, p, k)` for which no two Sylow subgroups meet in `p^k`.
pub fn exceptions() -> BTreeSet<(usize, u64, usize)> {
    EXCEPTIONS.into_iter().collect()
}

pub fn is_exception(n: usize, p: u64, k: usize) -> bool {
    EXCEPTIONS.contains(&(n, p, k))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessMethod {
    Identity,
    RandomSearch,
    /// Block-diagonal on the first tree and the rest.
    SplitProduct,
    /// Block-diagonal on the `p` subtrees of a single tree.
    SubtreeProduct,
    /// Permutes the bottom blocks of a single tree, keeping offsets.
    BlockLift,
    /// Pair with no common fixed point, patched onto a four-point tail.
    FixedPointShift,
}

impl fmt::Display for WitnessMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessMethod::Identity => "identity",
            WitnessMethod::RandomSearch => "random-search",
            WitnessMethod::SplitProduct => "split-product",
            WitnessMethod::SubtreeProduct => "subtree-product",
            WitnessMethod::BlockLift => "block-lift",
            WitnessMethod::FixedPointShift => "fixed-point-shift",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntersectionWitness {
    pub n: usize,
    pub p: u64,
    pub k: usize,
    pub x: Permutation,
    pub method: WitnessMethod,
    /// Exponents assigned to the blocks, for block constructions.
    pub split: Vec<usize>,
    /// Measured `|P ∩ P^x|`.
    #[serde(with = "crate::decimal")]
    pub intersection_order: BigUint,
}

/// Exponent `e` with `|P ∩ P^x| = p^e`, or `None` when it exceeds `p^max_k`.
pub fn measured_exponent(s: &SylowStructure, x: &Permutation, max_k: usize) -> Result<Option<usize>> {
    if s.contains(x)? {
        return Ok((s.m() <= max_k).then_some(s.m()));
    }
    let cap = match s.p().checked_pow(max_k as u32) {
        Some(c) if c <= ENUMERATION_LIMIT => c,
        _ => {
            return Err(Error::BudgetExceeded {
                what: "intersection count",
                required: format!("up to {}^{} common elements", s.p(), max_k),
                limit: format!("2^26 = {}", ENUMERATION_LIMIT),
                estimate: "one search leaf per common element".into(),
            })
        }
    };
    Ok(s.intersection_order_search(x, cap)?
        .and_then(|c| exact_log(c, s.p())))
}

fn verify(s: &SylowStructure, x: &Permutation, k: usize) -> Result<bool> {
    Ok(measured_exponent(s, x, k)? == Some(k))
}

/// A uniformly random `x` with `P ∩ P^x = 1`.
pub fn find_trivial_intersection<R: Rng + ?Sized>(
    n: usize,
    p: u64,
    rng: &mut R,
    max_tries: u64,
) -> Result<IntersectionWitness> {
    let s = SylowStructure::new(n, p)?;
    if is_exception(n, p, 0) {
        return Err(Error::ProvablyImpossible(format!(
            "every two Sylow {}-subgroups of S_{} intersect nontrivially",
            p, n
        )));
    }
    if s.m() == 0 {
        return finish(&s, Permutation::identity(n), 0, WitnessMethod::Identity, Vec::new());
    }
    for _ in 0..max_tries {
        let x = Permutation::random_uniform(n, rng);
        if !s.intersection_nontrivial(&x)? {
            return finish(&s, x, 0, WitnessMethod::RandomSearch, Vec::new());
        }
    }
    Err(Error::SearchExhausted {
        what: format!("trivial intersection in S_{} at p={}", n, p),
        tries: max_tries,
    })
}

fn finish(
    s: &SylowStructure,
    x: Permutation,
    k: usize,
    method: WitnessMethod,
    split: Vec<usize>,
) -> Result<IntersectionWitness> {
    if !verify(s, &x, k)? {
        return Err(Error::InvariantViolation(format!(
            "{} construction for n={}, p={}, k={} measured {:?}",
            method,
            s.degree(),
            s.p(),
            k,
            measured_exponent(s, &x, s.m())
        )));
    }
    Ok(IntersectionWitness {
        n: s.degree(),
        p: s.p(),
        k,
        x,
        method,
        split,
        intersection_order: BigUint::from(s.p()).pow(k as u32),
    })
}

/// A verified `x` with `|P ∩ P^x| = p^k`.
pub fn construct_intersection<R: Rng + ?Sized>(
    n: usize,
    p: u64,
    k: usize,
    rng: &mut R,
) -> Result<IntersectionWitness> {
    let s = SylowStructure::new(n, p)?;
    if k > s.m() {
        return Err(Error::OutOfRange {
            what: "k",
            detail: format!("k = {} exceeds m = {}", k, s.m()),
        });
    }
    if is_exception(n, p, k) {
        return Err(Error::ProvablyImpossible(format!(
            "no two Sylow {}-subgroups of S_{} meet in a group of order {}^{}",
            p, n, p, k
        )));
    }
    let (x, method, split) = build(&s, k, rng)?;
    finish(&s, x, k, method, split)
}

type Built = (Permutation, WitnessMethod, Vec<usize>);

fn build<R: Rng + ?Sized>(s: &SylowStructure, k: usize, rng: &mut R) -> Result<Built> {
    let (n, p, m) = (s.degree(), s.p(), s.m());
    if k == m {
        return Ok((Permutation::identity(n), WitnessMethod::Identity, Vec::new()));
    }
    if k == 0 {
        let w = find_trivial_intersection(n, p, rng, DEFAULT_TRIES)?;
        return Ok((w.x, w.method, Vec::new()));
    }
    let random_only = n <= 10 || (n, p, k) == (16, 2, 1) || (n == 12 && p == 2 && k <= 2);
    if !random_only {
        let built = if s.trees().len() == 1 {
            build_single_tree(s, k, rng)?
        } else {
            build_split(s, k, rng)?
        };
        if let Some(b) = built {
            return Ok(b);
        }
        debug!("no block construction for n={} p={} k={}; searching", n, p, k);
    }
    let x = random_search(s, k, rng, DEFAULT_TRIES, |_| true)?;
    Ok((x, WitnessMethod::RandomSearch, Vec::new()))
}

/// Random candidates mixing uniform permutations with short products of
/// transpositions, which favour large intersections.
fn random_search<R, F>(s: &SylowStructure, k: usize, rng: &mut R, tries: u64, accept: F) -> Result<Permutation>
where
    R: Rng + ?Sized,
    F: Fn(&Permutation) -> bool,
{
    let n = s.degree();
    for t in 0..tries {
        let x = if t % 2 == 0 || n < 2 {
            Permutation::random_uniform(n, rng)
        } else {
            let len = 1 + (t / 2) as usize % n;
            let mut images: Vec<u32> = (0..n as u32).collect();
            for _ in 0..len {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                images.swap(a, b);
            }
            Permutation::from_zero_based(images)?
        };
        if measured_exponent(s, &x, k)? == Some(k) && accept(&x) {
            return Ok(x);
        }
    }
    Err(Error::SearchExhausted {
        what: format!("|P ∩ P^x| = {}^{} in S_{}", s.p(), k, n),
        tries,
    })
}

/// `x_1 ⊕ x_2 ⊕ …` on consecutive blocks.
fn direct_sum(parts: &[Permutation]) -> Permutation {
    let mut images = Vec::new();
    for part in parts {
        let offset = images.len() as u32;
        images.extend(part.images().iter().map(|&v| v + offset));
    }
    Permutation::from_raw(images)
}

fn allowed(n: usize, p: u64, m: usize, k: usize) -> bool {
    k <= m && !is_exception(n, p, k)
}

/// `n` not a `p`-power: split off the first tree and recurse on both parts.
fn build_split<R: Rng + ?Sized>(s: &SylowStructure, k: usize, rng: &mut R) -> Result<Option<Built>> {
    let (n, p) = (s.degree(), s.p());
    let n1 = s.trees()[0].width;
    let n2 = n - n1;
    let s1 = SylowStructure::new(n1, p)?;
    let s2 = SylowStructure::new(n2, p)?;
    let split = (0..=k.min(s1.m())).find(|&k1| {
        allowed(n1, p, s1.m(), k1) && k - k1 <= s2.m() && allowed(n2, p, s2.m(), k - k1)
    });
    if let Some(k1) = split {
        let (x1, _, _) = build(&s1, k1, rng)?;
        let (x2, _, _) = build(&s2, k - k1, rng)?;
        return Ok(Some((direct_sum(&[x1, x2]), WitnessMethod::SplitProduct, vec![k1, k - k1])));
    }
    if p == 2 && n2 == 4 && k == 1 && n1 >= 16 {
        return fixed_point_shift(s, rng).map(Some);
    }
    Ok(None)
}

/// `n = p^ℓ`.
fn build_single_tree<R: Rng + ?Sized>(s: &SylowStructure, k: usize, rng: &mut R) -> Result<Option<Built>> {
    let (n, p, m) = (s.degree(), s.p(), s.m());
    let pu = p as usize;
    let sub_n = n / pu;
    let sub = SylowStructure::new(sub_n, p)?;
    if k + 1 == m {
        // bottom blocks of size p, permuted by a witness on n/p points
        let top = SylowStructure::new(sub_n, p)?;
        let kt = top.m() - 1;
        if !allowed(sub_n, p, top.m(), kt) {
            return Ok(None);
        }
        let (t, _, _) = build(&top, kt, rng)?;
        let images: Vec<u32> = (0..n)
            .map(|pt| (t.apply(pt / pu) * pu + pt % pu) as u32)
            .collect();
        return Ok(Some((Permutation::from_raw(images), WitnessMethod::BlockLift, vec![kt])));
    }
    let Some(split) = subtree_split(sub_n, p, sub.m(), k) else {
        return Ok(None);
    };
    let mut parts = Vec::with_capacity(pu);
    for &ki in &split {
        parts.push(build(&sub, ki, rng)?.0);
    }
    Ok(Some((direct_sum(&parts), WitnessMethod::SubtreeProduct, split)))
}

/// Lexicographically least `(k_1, …, k_p)` summing to `k`, each realizable
/// on `n'` points, with `k_1 ≠ k_2`.
fn subtree_split(sub_n: usize, p: u64, sub_m: usize, k: usize) -> Option<Vec<usize>> {
    let ok: Vec<usize> = (0..=sub_m).filter(|&e| allowed(sub_n, p, sub_m, e)).collect();
    let slots = p as usize;
    // reach[c][t]: some c allowed values sum to t
    let mut reach = vec![vec![false; k + 1]; slots + 1];
    reach[0][0] = true;
    for c in 1..=slots {
        for t in 0..=k {
            reach[c][t] = ok.iter().any(|&e| e <= t && reach[c - 1][t - e]);
        }
    }
    let mut out = Vec::with_capacity(slots);
    let mut left = k;
    for slot in 0..slots {
        let rest = slots - slot - 1;
        let pick = ok.iter().copied().find(|&e| {
            e <= left && reach[rest][left - e] && !(slot == 1 && e == out[0])
        })?;
        out.push(pick);
        left -= pick;
    }
    Some(out)
}

/// `|P ∩ P^x| = 2` with `x` moving the fixed point of `P`, for
/// `n = 2^j + 1` with `j ≥ 2`.
pub fn lemma27_pair<R: Rng + ?Sized>(j: usize, rng: &mut R) -> Result<Permutation> {
    if j < 2 {
        return Err(Error::OutOfRange {
            what: "exponent",
            detail: format!("need j ≥ 2, got {}", j),
        });
    }
    let n = (1usize << j) + 1;
    let s = SylowStructure::new(n, 2)?;
    let fixed = n - 1;
    let x = if j <= 4 {
        random_search(&s, 1, rng, DEFAULT_TRIES, |x| x.apply(fixed) != fixed)?
    } else {
        // trivial intersection on the first half, recursive pair on the rest
        let half = 1usize << (j - 1);
        let u = find_trivial_intersection(half, 2, rng, DEFAULT_TRIES)?.x;
        let v = lemma27_pair(j - 1, rng)?;
        direct_sum(&[u, v])
    };
    if !verify(&s, &x, 1)? || x.apply(fixed) == fixed {
        return Err(Error::InvariantViolation(format!(
            "pair construction failed at n={}",
            n
        )));
    }
    Ok(x)
}

/// `n = 2^ℓ + 4`, `k = 1`: a pair on the first `2^ℓ + 1` points whose
/// second member fixes some `q ≠ 2^ℓ`, with the four-point tail moved
/// onto `{q} ∪ {2^ℓ+1, 2^ℓ+2, 2^ℓ+3}`.
fn fixed_point_shift<R: Rng + ?Sized>(s: &SylowStructure, rng: &mut R) -> Result<Built> {
    let n = s.degree();
    let n1 = s.trees()[0].width;
    let j = n1.trailing_zeros() as usize;
    let pair = lemma27_pair(j, rng)?;
    // P^pair fixes q = pair⁻¹(n1)
    let q = pair.inverse().apply(n1);
    let tail_src = [q, n1 + 1, n1 + 2, n1 + 3];
    for beta in crate::perm::all_permutations(4) {
        let mut images = vec![0u32; n];
        for y in 0..=n1 {
            if y != q {
                images[y] = pair.apply(y) as u32;
            }
        }
        for (i, &src) in tail_src.iter().enumerate() {
            images[src] = (n1 + beta.apply(i)) as u32;
        }
        let x = Permutation::from_zero_based(images)?;
        if verify(s, &x, 1)? {
            return Ok((x, WitnessMethod::FixedPointShift, vec![1, 0]));
        }
    }
    Err(Error::InvariantViolation(format!(
        "no tail bijection gives a witness at n={}",
        n
    )))
}
