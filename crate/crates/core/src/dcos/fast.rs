//! Fixed-width permutations and a flattened stabilizer chain for the
//! census inner loops.

use rustc_hash::FxHashSet;

use crate::perm::{Permutation, MAX_PACK_DEGREE};
use crate::sylow::{StabilizerChain, SylowStructure};

/// Image array padded with fixed points up to 16 entries.
pub type Small = [u8; MAX_PACK_DEGREE];

pub fn small_identity() -> Small {
    std::array::from_fn(|i| i as u8)
}

pub fn to_small(g: &Permutation) -> Small {
    let mut out = small_identity();
    for (i, &v) in g.images().iter().enumerate() {
        out[i] = v as u8;
    }
    out
}

pub fn from_small(g: &Small, n: usize) -> Permutation {
    Permutation::from_raw(g[..n].iter().map(|&v| v as u32).collect())
}

/// `a∘b`: apply `b` first.
#[inline]
pub fn compose(a: &Small, b: &Small) -> Small {
    std::array::from_fn(|i| a[b[i] as usize])
}

#[inline]
pub fn pack(g: &Small, n: usize) -> u64 {
    g[..n].iter().fold(0u64, |acc, &v| (acc << 4) | v as u64)
}

#[inline]
pub fn unpack(key: u64, n: usize) -> Small {
    let mut out = small_identity();
    for i in 0..n {
        out[i] = ((key >> (4 * (n - 1 - i))) & 0xF) as u8;
    }
    out
}

/// Left multiplication by the transposition `(v, v+1)` of values.
#[inline]
pub fn swap_values(g: &Small, v: u8) -> Small {
    std::array::from_fn(|i| {
        let x = g[i];
        if x == v {
            v + 1
        } else if x == v + 1 {
            v
        } else {
            x
        }
    })
}

struct Level {
    orbit: Vec<u8>,
    transversal: Vec<Small>,
}

/// Canonical left-coset representatives `min(gP)` and double-coset keys.
pub struct FastCosets {
    n: usize,
    levels: Vec<Level>,
    generators: Vec<Small>,
}

impl FastCosets {
    pub fn new(s: &SylowStructure) -> Self {
        Self::from_chain(&s.build_chain(), s.generators())
    }

    pub fn from_chain(chain: &StabilizerChain, generators: &[Permutation]) -> Self {
        assert!(chain.degree() <= MAX_PACK_DEGREE);
        let levels = chain
            .nontrivial_levels()
            .map(|l| Level {
                orbit: l.orbit.iter().map(|&b| b as u8).collect(),
                transversal: l
                    .orbit
                    .iter()
                    .map(|&b| to_small(l.transversal(b).unwrap()))
                    .collect(),
            })
            .collect();
        FastCosets {
            n: chain.degree(),
            levels,
            generators: generators.iter().map(to_small).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Small] {
        &self.generators
    }

    #[inline]
    pub fn canonical(&self, g: &Small) -> Small {
        let mut g = *g;
        for level in &self.levels {
            let mut best = 0;
            let mut best_val = g[level.orbit[0] as usize];
            for (i, &b) in level.orbit.iter().enumerate().skip(1) {
                let v = g[b as usize];
                if v < best_val {
                    best_val = v;
                    best = i;
                }
            }
            if best != 0 {
                g = compose(&g, &level.transversal[best]);
            }
        }
        g
    }

    #[inline]
    pub fn key(&self, g: &Small) -> u64 {
        pack(&self.canonical(g), self.n)
    }

    /// Keys of all left cosets in the orbit of `key` under left
    /// multiplication by `P`, in discovery order.
    pub fn left_orbit(&self, key: u64) -> Vec<u64> {
        let mut seen = FxHashSet::default();
        seen.insert(key);
        let mut orbit = vec![key];
        let mut i = 0;
        while i < orbit.len() {
            let g = unpack(orbit[i], self.n);
            for h in &self.generators {
                let c = self.key(&compose(h, &g));
                if seen.insert(c) {
                    orbit.push(c);
                }
            }
            i += 1;
        }
        orbit
    }

    /// Least packed element of the double coset `PgP`.
    pub fn double_coset_key(&self, g: &Small) -> u64 {
        let start = self.key(g);
        self.left_orbit(start).into_iter().min().unwrap()
    }
}
