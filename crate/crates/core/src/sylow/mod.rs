//! The standard Sylow p-subgroup of `S_n`.
//!
//! `n = Σ a_i p^i` is laid out as a forest: `a_i` trees of height `i`,
//! tallest first, on consecutive points starting at 1. A tree of height
//! `j` covers `p^j` points; its internal nodes at level `l` (1 ≤ l ≤ j) are
//! the aligned blocks of `p^l` points. An element of the group is a
//! labelling `node ↦ r ∈ Z/p`: the point with base-`p` local digits
//! `(d_{j-1} … d_0)` is sent to the point whose digit `l-1` is
//! `d_{l-1} + r(level-l node containing the point)`. Every labelling is an
//! element and the group has exactly `p^m` of them, one label per node.
//!
//! Labels are also the mixed-radix digits of an element's index: trees in
//! layout order, then levels `1..=j`, then nodes left to right, least
//! significant first. The generator list follows the same order (one
//! generator per node, the element with that single label set to 1).

mod chain;
mod search;

pub use chain::{ChainLevel, StabilizerChain};

use num::{BigUint, One, ToPrimitive, Zero};
use serde::Serialize;

use crate::closedform;
use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Largest group order `intersection_order` will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1 << 26;

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PAdicProfile {
    pub n: usize,
    pub p: u64,
    /// `a_0, a_1, …` with no trailing zeros.
    pub digits: Vec<usize>,
    /// Exponent of `p` in `n!`.
    pub m: usize,
    pub digit_sum: usize,
}

impl PAdicProfile {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 {
            return Err(Error::OutOfRange {
                what: "degree",
                detail: "n must be at least 1".into(),
            });
        }
        let pu = p as usize;
        let mut digits = Vec::new();
        let mut rest = n;
        while rest > 0 {
            digits.push(rest % pu);
            rest /= pu;
        }
        let digit_sum: usize = digits.iter().sum();

        let mut legendre = 0usize;
        let mut q = pu;
        while q <= n {
            legendre += n / q;
            match q.checked_mul(pu) {
                Some(next) => q = next,
                None => break,
            }
        }
        let by_digits = (n - digit_sum) / (pu - 1);
        if legendre != by_digits || (n - digit_sum) % (pu - 1) != 0 {
            return Err(Error::InvariantViolation(format!(
                "Legendre sum {} disagrees with digit formula {} for n={}, p={}",
                legendre, by_digits, n, p
            )));
        }
        Ok(PAdicProfile {
            n,
            p,
            digits,
            m: legendre,
            digit_sum,
        })
    }

    pub fn digit(&self, i: usize) -> usize {
        self.digits.get(i).copied().unwrap_or(0)
    }

    /// `|P| = p^m`.
    pub fn order(&self) -> BigUint {
        BigUint::from(self.p).pow(self.m as u32)
    }

    /// `p^m` if it fits in a `u64`.
    pub fn order_u64(&self) -> Option<u64> {
        self.p.checked_pow(self.m as u32)
    }

    /// `|N_{S_n}(P) : P| = ∏_i (p-1)^{i·a_i} · a_i!`.
    pub fn normalizer_index(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (i, &a) in self.digits.iter().enumerate() {
            acc *= BigUint::from(self.p - 1).pow((i * a) as u32);
            acc *= closedform::factorial(a as u64);
        }
        acc
    }
}

/// One tree of the forest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Tree {
    pub height: usize,
    /// First point (0-based).
    pub offset: usize,
    /// `p^height`.
    pub width: usize,
}

#[derive(Clone, Debug)]
pub struct SylowStructure {
    profile: PAdicProfile,
    trees: Vec<Tree>,
    /// `label_base[t][l]` is the index of the first level-`l` node of tree `t`
    /// in the label vector (entry 0 unused).
    label_base: Vec<Vec<usize>>,
    /// Tree index of every point.
    point_tree: Vec<usize>,
    /// `p^l` for `l = 0..=max height`.
    powers: Vec<usize>,
    generators: Vec<Permutation>,
}

impl SylowStructure {
    pub fn new(n: usize, p: u64) -> Result<Self> {
        let profile = PAdicProfile::new(n, p)?;
        let pu = p as usize;
        let max_height = profile.digits.len().saturating_sub(1);
        let mut powers = vec![1usize];
        for _ in 0..max_height {
            powers.push(powers.last().unwrap() * pu);
        }

        let mut trees = Vec::new();
        let mut offset = 0;
        for height in (0..profile.digits.len()).rev() {
            for _ in 0..profile.digits[height] {
                let width = powers[height];
                trees.push(Tree {
                    height,
                    offset,
                    width,
                });
                offset += width;
            }
        }
        debug_assert_eq!(offset, n);

        let mut label_base = Vec::with_capacity(trees.len());
        let mut next = 0;
        for tree in &trees {
            let mut bases = vec![usize::MAX];
            for l in 1..=tree.height {
                bases.push(next);
                next += powers[tree.height - l];
            }
            label_base.push(bases);
        }
        debug_assert_eq!(next, profile.m);

        let mut point_tree = vec![0; n];
        for (t, tree) in trees.iter().enumerate() {
            for pt in &mut point_tree[tree.offset..tree.offset + tree.width] {
                *pt = t;
            }
        }

        let mut s = SylowStructure {
            profile,
            trees,
            label_base,
            point_tree,
            powers,
            generators: Vec::new(),
        };
        let m = s.profile.m;
        s.generators = (0..m)
            .map(|i| {
                let mut labels = vec![0u8; m];
                labels[i] = 1;
                s.element_from_labels(&labels)
            })
            .collect();
        Ok(s)
    }

    pub fn profile(&self) -> &PAdicProfile {
        &self.profile
    }

    pub fn degree(&self) -> usize {
        self.profile.n
    }

    pub fn p(&self) -> u64 {
        self.profile.p
    }

    pub fn m(&self) -> usize {
        self.profile.m
    }

    pub fn trees(&self) -> &[Tree] {
        &self.trees
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn order(&self) -> BigUint {
        self.profile.order()
    }

    pub(crate) fn powers(&self) -> &[usize] {
        &self.powers
    }

    pub(crate) fn point_tree(&self, point: usize) -> usize {
        self.point_tree[point]
    }

    pub(crate) fn label_slot(&self, tree: usize, level: usize, node: usize) -> usize {
        self.label_base[tree][level] + node
    }

    /// Builds the element with the given node labels (`labels.len() == m`).
    pub fn element_from_labels(&self, labels: &[u8]) -> Permutation {
        let p = self.profile.p as usize;
        let mut images: Vec<u32> = (0..self.degree() as u32).collect();
        for (t, tree) in self.trees.iter().enumerate() {
            for local in 0..tree.width {
                let mut image = 0;
                for l in 1..=tree.height {
                    let digit = (local / self.powers[l - 1]) % p;
                    let r = labels[self.label_slot(t, l, local / self.powers[l])] as usize;
                    image += ((digit + r) % p) * self.powers[l - 1];
                }
                images[tree.offset + local] = (tree.offset + image) as u32;
            }
        }
        Permutation::from_raw(images)
    }

    /// Node labels of `g` if `g ∈ P`, `None` otherwise. This is the
    /// structural membership test: each tree must be preserved and the
    /// digit shifts must depend only on the containing node.
    pub fn labels_of(&self, g: &Permutation) -> Option<Vec<u8>> {
        if g.degree() != self.degree() {
            return None;
        }
        let p = self.profile.p as usize;
        let mut labels = vec![u8::MAX; self.profile.m];
        for (t, tree) in self.trees.iter().enumerate() {
            for local in 0..tree.width {
                let img = g.apply(tree.offset + local);
                if img < tree.offset || img >= tree.offset + tree.width {
                    return None;
                }
                let img_local = img - tree.offset;
                for l in 1..=tree.height {
                    let d = (local / self.powers[l - 1]) % p;
                    let e = (img_local / self.powers[l - 1]) % p;
                    let r = ((e + p - d) % p) as u8;
                    let slot = self.label_slot(t, l, local / self.powers[l]);
                    if labels[slot] == u8::MAX {
                        labels[slot] = r;
                    } else if labels[slot] != r {
                        return None;
                    }
                }
            }
        }
        Some(labels)
    }

    pub fn contains(&self, g: &Permutation) -> Result<bool> {
        if g.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                left: g.degree(),
                right: self.degree(),
            });
        }
        Ok(self.labels_of(g).is_some())
    }

    /// Mixed-radix decode; index 0 is the identity.
    pub fn element_by_index(&self, idx: u64) -> Result<Permutation> {
        let order = self.profile.order_u64();
        if order.is_none_or(|o| idx >= o) {
            return Err(Error::OutOfRange {
                what: "element index",
                detail: format!("{} not below {}", idx, self.order()),
            });
        }
        let p = self.profile.p;
        let mut rest = idx;
        let labels: Vec<u8> = (0..self.profile.m)
            .map(|_| {
                let d = (rest % p) as u8;
                rest /= p;
                d
            })
            .collect();
        Ok(self.element_from_labels(&labels))
    }

    /// Inverse of [`element_by_index`](Self::element_by_index).
    pub fn index_of(&self, g: &Permutation) -> Result<u64> {
        if self.profile.order_u64().is_none() {
            return Err(Error::OutOfRange {
                what: "element index",
                detail: format!("group order {} exceeds 64 bits", self.order()),
            });
        }
        let labels = self.labels_of(g).ok_or_else(|| {
            Error::InvalidPermutation(format!("{} is not in the Sylow subgroup", g))
        })?;
        Ok(labels
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.profile.p + d as u64))
    }

    /// Iterates over all `p^m` elements in index order.
    pub fn elements(&self) -> Result<impl Iterator<Item = Permutation> + '_> {
        let order = self.enumeration_order("element enumeration")?;
        Ok((0..order).map(move |i| self.element_by_index(i).expect("index in range")))
    }

    fn enumeration_order(&self, what: &'static str) -> Result<u64> {
        match self.profile.order_u64() {
            Some(o) if o <= ENUMERATION_LIMIT => Ok(o),
            _ => Err(Error::BudgetExceeded {
                what,
                required: format!("{}^{} elements", self.profile.p, self.profile.m),
                limit: format!("2^26 = {}", ENUMERATION_LIMIT),
                estimate: format!("{} group elements to scan", self.order()),
            }),
        }
    }

    /// A central element of order `p` with exactly `a_0` fixed points: every
    /// level-1 node rotated by one, so each bottom block of `p` points is a
    /// `p`-cycle.
    pub fn central_element(&self) -> Result<Permutation> {
        if self.profile.m == 0 {
            return Err(Error::OutOfRange {
                what: "central element",
                detail: format!(
                    "n = {} < p = {}: the Sylow subgroup is trivial",
                    self.profile.n, self.profile.p
                ),
            });
        }
        let mut labels = vec![0u8; self.profile.m];
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.height == 0 {
                continue;
            }
            for node in 0..self.powers[tree.height - 1] {
                labels[self.label_slot(t, 1, node)] = 1;
            }
        }
        Ok(self.element_from_labels(&labels))
    }

    /// `|P ∩ P^x|`, counted by scanning every `h ∈ P` and testing `x·h·x⁻¹ ∈ P`.
    pub fn intersection_order(&self, x: &Permutation) -> Result<u64> {
        self.check_degree(x)?;
        let order = self.enumeration_order("intersection order")?;
        let xinv = x.inverse();
        let mut count = 0;
        for i in 0..order {
            let h = self.element_by_index(i)?;
            if self.labels_of(&h.conjugate_unchecked(&xinv)).is_some() {
                count += 1;
            }
        }
        Ok(count)
    }

    /// `|P ∩ P^x| > 1`, decided by the pruned label search, which stops at
    /// the first common non-identity element. Works at any degree.
    pub fn intersection_nontrivial(&self, x: &Permutation) -> Result<bool> {
        self.check_degree(x)?;
        Ok(search::IntersectionSearch::new(self, x).find_nontrivial())
    }

    /// `|P ∩ P^x|` by the pruned label search instead of a full scan of `P`.
    /// Returns `None` once more than `cap` common elements have been found.
    pub fn intersection_order_search(&self, x: &Permutation, cap: u64) -> Result<Option<u64>> {
        self.check_degree(x)?;
        Ok(search::IntersectionSearch::new(self, x).count(cap))
    }

    /// Elements of `P ∩ P^x` in index order (small groups only).
    pub fn intersection_elements(&self, x: &Permutation) -> Result<Vec<Permutation>> {
        self.check_degree(x)?;
        let order = self.enumeration_order("intersection enumeration")?;
        let xinv = x.inverse();
        let mut out = Vec::new();
        for i in 0..order {
            let h = self.element_by_index(i)?;
            if self.labels_of(&h.conjugate_unchecked(&xinv)).is_some() {
                out.push(h);
            }
        }
        Ok(out)
    }

    pub fn build_chain(&self) -> StabilizerChain {
        let chain = StabilizerChain::schreier_sims(self.degree(), &self.generators);
        debug_assert_eq!(chain.order(), self.order());
        chain
    }

    fn check_degree(&self, x: &Permutation) -> Result<()> {
        if x.degree() != self.degree() {
            return Err(Error::DegreeMismatch {
                left: x.degree(),
                right: self.degree(),
            });
        }
        Ok(())
    }
}

/// `log_p(value)` when `value` is an exact power of `p`.
pub fn exact_log(value: u64, p: u64) -> Option<usize> {
    if value == 0 {
        return None;
    }
    let mut v = value;
    let mut e = 0;
    while v % p == 0 {
        v /= p;
        e += 1;
    }
    (v == 1).then_some(e)
}

/// Same as [`exact_log`] for big integers.
pub fn exact_log_big(value: &BigUint, p: u64) -> Option<usize> {
    if value.is_zero() {
        return None;
    }
    if let Some(v) = value.to_u64() {
        return exact_log(v, p);
    }
    let pb = BigUint::from(p);
    let mut v = value.clone();
    let mut e = 0;
    while (&v % &pb).is_zero() {
        v /= &pb;
        e += 1;
    }
    v.is_one().then_some(e)
}
