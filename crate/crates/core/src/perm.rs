//! Permutations of `{1, …, n}`.
//!
//! Points are 0-based internally and 1-based in every textual form
//! (parsing, printing, `images_one_based`). `compose(a, b)` applies `b`
//! first, and `conjugate(g, x)` is `x⁻¹·g·x`, so `(g^x)^y = g^(x·y)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num::{BigUint, One};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest degree accepted by [`Permutation::pack`].
pub const MAX_PACK_DEGREE: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n as u32).collect(),
        }
    }

    /// Builds a permutation from 0-based images, checking bijectivity.
    pub fn from_zero_based(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            let v = v as usize;
            if v >= n || seen[v] {
                return Err(Error::InvalidPermutation(format!(
                    "image list {:?} is not a bijection of 0..{}",
                    images, n
                )));
            }
            seen[v] = true;
        }
        Ok(Permutation { images })
    }

    /// Builds a permutation from 1-based images such as `[2, 3, 1]`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let mut zero = Vec::with_capacity(images.len());
        for &v in images {
            if v == 0 {
                return Err(Error::InvalidPermutation("point 0 in 1-based image list".into()));
            }
            zero.push((v - 1) as u32);
        }
        Self::from_zero_based(zero)
    }

    /// Builds a permutation of degree `n` from 1-based cycles.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        let mut images: Vec<u32> = (0..n as u32).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for &pt in cycle {
                if pt == 0 || pt > n {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} outside 1..={}",
                        pt, n
                    )));
                }
                if touched[pt - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "point {} appears twice in cycle notation",
                        pt
                    )));
                }
                touched[pt - 1] = true;
            }
            for (i, &pt) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                images[pt - 1] = (next - 1) as u32;
            }
        }
        Ok(Permutation { images })
    }

    /// Internal constructor for image arrays already known to be bijections.
    pub(crate) fn from_raw(images: Vec<u32>) -> Self {
        debug_assert!(Self::from_zero_based(images.clone()).is_ok());
        Permutation { images }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 0-based point `i`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    #[inline]
    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn images_one_based(&self) -> Vec<usize> {
        self.images.iter().map(|&v| v as usize + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    /// `a·b`, applying `b` first.
    pub fn compose(&self, b: &Permutation) -> Result<Permutation> {
        check_degree(self, b)?;
        Ok(self.compose_unchecked(b))
    }

    #[inline]
    pub(crate) fn compose_unchecked(&self, b: &Permutation) -> Permutation {
        Permutation {
            images: b.images.iter().map(|&j| self.images[j as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// `x⁻¹·g·x`.
    pub fn conjugate(&self, x: &Permutation) -> Result<Permutation> {
        check_degree(self, x)?;
        Ok(self.conjugate_unchecked(x))
    }

    pub(crate) fn conjugate_unchecked(&self, x: &Permutation) -> Permutation {
        // (x⁻¹ g x)(i) = x⁻¹(g(x(i)))
        let xinv = x.inverse();
        Permutation {
            images: x
                .images
                .iter()
                .map(|&xi| xinv.images[self.images[xi as usize] as usize])
                .collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut base = self.clone();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose_unchecked(&base);
            }
            base = base.compose_unchecked(&base);
            e >>= 1;
        }
        acc
    }

    /// Disjoint cycles (0-based), including fixed points, ordered by least element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.apply(start);
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.apply(j);
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_type(&self) -> CycleType {
        let mut multiplicities = BTreeMap::new();
        for c in self.cycles() {
            *multiplicities.entry(c.len()).or_insert(0) += 1;
        }
        CycleType {
            degree: self.degree(),
            multiplicities,
        }
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.degree()).filter(|&i| self.apply(i) == i).collect()
    }

    /// Element order, as the lcm of the cycle lengths.
    pub fn order(&self) -> BigUint {
        let mut acc = BigUint::one();
        for len in self.cycle_type().multiplicities.keys() {
            acc = num::integer::lcm(acc, BigUint::from(*len));
        }
        acc
    }

    /// Cycle notation with 1-based points; fixed points omitted, `()` for the identity.
    pub fn to_cycle_string(&self) -> String {
        let mut s = String::new();
        for c in self.cycles() {
            if c.len() < 2 {
                continue;
            }
            s.push('(');
            let parts: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
            s.push_str(&parts.join(" "));
            s.push(')');
        }
        if s.is_empty() {
            s.push_str("()");
        }
        s
    }

    /// Uniform random permutation of degree `n` (Fisher–Yates on the identity).
    pub fn random_uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Permutation {
        let mut images: Vec<u32> = (0..n as u32).collect();
        images.shuffle(rng);
        Permutation { images }
    }

    /// Packs the image array into 4-bit nibbles, point 1 in the most
    /// significant used nibble, so that numeric order equals lexicographic
    /// order of image arrays of the same degree.
    pub fn pack(&self) -> Result<u64> {
        let n = self.degree();
        if n > MAX_PACK_DEGREE {
            return Err(Error::OutOfRange {
                what: "pack degree",
                detail: format!("{} > {}", n, MAX_PACK_DEGREE),
            });
        }
        Ok(pack_slice(&self.images))
    }

    pub fn unpack(key: u64, n: usize) -> Result<Permutation> {
        if n > MAX_PACK_DEGREE || n == 0 {
            return Err(Error::OutOfRange {
                what: "pack degree",
                detail: format!("{} not in 1..={}", n, MAX_PACK_DEGREE),
            });
        }
        let images = (0..n)
            .map(|i| ((key >> (4 * (n - 1 - i))) & 0xf) as u32)
            .collect();
        Self::from_zero_based(images)
    }

    /// Parses either a 1-based image list (`"2 3 1"`) or cycle notation
    /// (`"(1 2 3)(4 5)"`). For cycle notation the degree is `n` when given,
    /// otherwise the largest point mentioned.
    pub fn parse(s: &str, n: Option<usize>) -> Result<Permutation> {
        let t = s.trim();
        if t.starts_with('(') {
            let cycles = parse_cycles(t)?;
            let max = cycles.iter().flatten().copied().max().unwrap_or(0);
            let degree = match n {
                Some(n) if n < max => {
                    return Err(Error::Parse(format!(
                        "point {} exceeds degree {}",
                        max, n
                    )))
                }
                Some(n) => n,
                None => max,
            };
            if degree == 0 {
                return Err(Error::Parse("cannot infer degree of the identity".into()));
            }
            Permutation::from_cycles(degree, &cycles)
        } else {
            let images: std::result::Result<Vec<usize>, _> = t
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|w| !w.is_empty())
                .map(|w| w.parse::<usize>())
                .collect();
            let images = images.map_err(|e| Error::Parse(format!("{}: {}", s, e)))?;
            if let Some(n) = n {
                if images.len() != n {
                    return Err(Error::DegreeMismatch {
                        left: images.len(),
                        right: n,
                    });
                }
            }
            if images.is_empty() {
                return Err(Error::Parse("empty permutation".into()));
            }
            Permutation::from_images(&images)
        }
    }
}

#[inline]
pub(crate) fn pack_slice(images: &[u32]) -> u64 {
    images.iter().fold(0u64, |acc, &v| (acc << 4) | v as u64)
}

fn parse_cycles(s: &str) -> Result<Vec<Vec<usize>>> {
    let mut cycles = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        if !rest.starts_with('(') {
            return Err(Error::Parse(format!("expected '(' in {:?}", s)));
        }
        let close = rest
            .find(')')
            .ok_or_else(|| Error::Parse(format!("unclosed cycle in {:?}", s)))?;
        let body = &rest[1..close];
        let pts: std::result::Result<Vec<usize>, _> = body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|w| !w.is_empty())
            .map(|w| w.parse::<usize>())
            .collect();
        let pts = pts.map_err(|e| Error::Parse(format!("{}: {}", s, e)))?;
        if !pts.is_empty() {
            cycles.push(pts);
        }
        rest = rest[close + 1..].trim_start();
    }
    Ok(cycles)
}

fn check_degree(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.degree() != b.degree() {
        return Err(Error::DegreeMismatch {
            left: a.degree(),
            right: b.degree(),
        });
    }
    Ok(())
}

impl fmt::Display for Permutation {
    /// 1-based image list.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation[{}]", self)
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Permutation::parse(s, None)
    }
}

impl Serialize for Permutation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Cycle type `j ↦ m_j` (only nonzero multiplicities are stored).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleType {
    degree: usize,
    multiplicities: BTreeMap<usize, usize>,
}

impl CycleType {
    pub fn new(degree: usize, multiplicities: BTreeMap<usize, usize>) -> Result<Self> {
        let total: usize = multiplicities.iter().map(|(j, m)| j * m).sum();
        if total != degree || multiplicities.contains_key(&0) {
            return Err(Error::InvalidPermutation(format!(
                "cycle type {:?} does not partition {}",
                multiplicities, degree
            )));
        }
        let multiplicities = multiplicities.into_iter().filter(|&(_, m)| m > 0).collect();
        Ok(CycleType {
            degree,
            multiplicities,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn multiplicities(&self) -> &BTreeMap<usize, usize> {
        &self.multiplicities
    }

    pub fn multiplicity(&self, j: usize) -> usize {
        self.multiplicities.get(&j).copied().unwrap_or(0)
    }

    /// Centralizer order `z_λ = ∏ j^{m_j} m_j!`.
    pub fn centralizer_order(&self) -> BigUint {
        let mut z = BigUint::one();
        for (&j, &m) in &self.multiplicities {
            z *= BigUint::from(j).pow(m as u32);
            z *= crate::closedform::factorial(m as u64);
        }
        z
    }

    /// Size of the conjugacy class, `n!/z_λ`.
    pub fn class_size(&self) -> BigUint {
        crate::closedform::factorial(self.degree as u64) / self.centralizer_order()
    }
}

/// All `n!` permutations of degree `n` in lexicographic order of image
/// arrays.
pub fn all_permutations(n: usize) -> AllPermutations {
    AllPermutations {
        next: Some((0..n as u32).collect()),
    }
}

pub struct AllPermutations {
    next: Option<Vec<u32>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let cur = self.next.take()?;
        let mut a = cur.clone();
        // standard next-permutation step
        if let Some(i) = (1..a.len()).rev().find(|&i| a[i - 1] < a[i]) {
            let j = (i..a.len()).rev().find(|&j| a[j] > a[i - 1]).unwrap();
            a.swap(i - 1, j);
            a[i..].reverse();
            self.next = Some(a);
        }
        Some(Permutation::from_raw(cur))
    }
}
