//! One-sided test for whether permutations generate `A_n` or `S_n`.

use num::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::closedform::factorial;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::sylow::{is_prime, StabilizerChain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GiantVerdict {
    Giant,
    NotGiant,
    Unknown,
}

/// Groups up to this degree are settled by a stabilizer chain when no
/// certificate turns up.
const CHAIN_DEGREE: usize = 12;

pub fn giant_test<R: Rng + ?Sized>(
    gens: &[Permutation],
    rng: &mut R,
    rounds: usize,
) -> Result<GiantVerdict> {
    let n = gens.first().map_or(0, Permutation::degree);
    if let Some(g) = gens.iter().find(|g| g.degree() != n) {
        return Err(Error::DegreeMismatch {
            left: n,
            right: g.degree(),
        });
    }
    if n < 8 {
        return Err(Error::OutOfRange {
            what: "n",
            detail: format!("giant test needs degree at least 8, got {}", n),
        });
    }
    if orbit_size(gens, n) < n {
        return Ok(GiantVerdict::NotGiant);
    }
    if (1..n).any(|b| minimal_block_size(gens, n, b) < n) {
        return Ok(GiantVerdict::NotGiant);
    }
    let mut walk = ProductReplacement::new(gens, rng);
    for _ in 0..rounds {
        if jordan_certificate(&walk.next(rng)) {
            return Ok(GiantVerdict::Giant);
        }
    }
    if n <= CHAIN_DEGREE {
        let order = StabilizerChain::schreier_sims(n, gens).order();
        let half = factorial(n as u64) / BigUint::from(2u32);
        return Ok(if order >= half {
            GiantVerdict::Giant
        } else {
            GiantVerdict::NotGiant
        });
    }
    Ok(GiantVerdict::Unknown)
}

fn orbit_size(gens: &[Permutation], n: usize) -> usize {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    let mut size = 1;
    while let Some(a) = stack.pop() {
        for g in gens {
            let b = g.apply(a);
            if !seen[b] {
                seen[b] = true;
                size += 1;
                stack.push(b);
            }
        }
    }
    size
}

fn find(parent: &mut [usize], mut a: usize) -> usize {
    while parent[a] != a {
        parent[a] = parent[parent[a]];
        a = parent[a];
    }
    a
}

/// Size of the smallest block containing `0` and `b` (Atkinson).
fn minimal_block_size(gens: &[Permutation], n: usize, b: usize) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    parent[b] = 0;
    let mut queue = vec![(0, b)];
    while let Some((a, c)) = queue.pop() {
        for g in gens {
            let u = find(&mut parent, g.apply(a));
            let v = find(&mut parent, g.apply(c));
            if u != v {
                parent[v] = u;
                queue.push((u, v));
            }
        }
    }
    let root = find(&mut parent, 0);
    (0..n).filter(|&a| find(&mut parent, a) == root).count()
}

/// True when some power of `g` is a `q`-cycle with `q` prime and
/// `n/2 < q < n − 2`, which makes a primitive group giant (Jordan).
fn jordan_certificate(g: &Permutation) -> bool {
    let n = g.degree();
    g.cycles().iter().any(|c| {
        let q = c.len();
        2 * q > n && q + 2 < n && is_prime(q as u64)
    })
}

/// Product replacement with an accumulator.
struct ProductReplacement {
    slots: Vec<Permutation>,
    acc: Permutation,
}

impl ProductReplacement {
    const SLOTS: usize = 10;
    const WARMUP: usize = 60;

    fn new<R: Rng + ?Sized>(gens: &[Permutation], rng: &mut R) -> Self {
        let n = gens[0].degree();
        let slots = (0..Self::SLOTS.max(gens.len()))
            .map(|i| gens[i % gens.len()].clone())
            .collect();
        let mut walk = ProductReplacement {
            slots,
            acc: Permutation::identity(n),
        };
        for _ in 0..Self::WARMUP {
            walk.next(rng);
        }
        walk
    }

    fn next<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Permutation {
        let k = self.slots.len();
        let i = rng.random_range(0..k);
        let j = (i + rng.random_range(1..k)) % k;
        self.slots[i] = if rng.random_bool(0.5) {
            self.slots[i].compose_unchecked(&self.slots[j])
        } else {
            self.slots[j].compose_unchecked(&self.slots[i])
        };
        self.acc = self.acc.compose_unchecked(&self.slots[i]);
        self.acc.clone()
    }
}
