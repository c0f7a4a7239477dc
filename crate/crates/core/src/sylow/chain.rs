//! Point-stabilizer chain with base `1, …, n`, built by deterministic
//! Schreier–Sims.

use num::{BigUint, One};

use crate::perm::Permutation;

#[derive(Clone, Debug)]
pub struct ChainLevel {
    pub base: usize,
    /// Strong generators fixing every earlier base point.
    pub generators: Vec<Permutation>,
    /// Orbit of `base` in discovery order.
    pub orbit: Vec<usize>,
    /// `transversal[b]` maps `base` to `b`, for `b` in the orbit.
    transversal: Vec<Option<Permutation>>,
}

impl ChainLevel {
    fn new(n: usize, base: usize) -> Self {
        let mut level = ChainLevel {
            base,
            generators: Vec::new(),
            orbit: Vec::new(),
            transversal: vec![None; n],
        };
        level.rebuild_orbit(n);
        level
    }

    pub fn transversal(&self, b: usize) -> Option<&Permutation> {
        self.transversal[b].as_ref()
    }

    fn rebuild_orbit(&mut self, n: usize) {
        self.transversal = vec![None; n];
        self.transversal[self.base] = Some(Permutation::identity(n));
        self.orbit = vec![self.base];
        let mut i = 0;
        while i < self.orbit.len() {
            let b = self.orbit[i];
            let ub = self.transversal[b].clone().unwrap();
            for s in &self.generators {
                let c = s.apply(b);
                if self.transversal[c].is_none() {
                    self.transversal[c] = Some(s.compose_unchecked(&ub));
                    self.orbit.push(c);
                }
            }
            i += 1;
        }
    }
}

#[derive(Clone, Debug)]
pub struct StabilizerChain {
    n: usize,
    levels: Vec<ChainLevel>,
}

impl StabilizerChain {
    pub fn schreier_sims(n: usize, generators: &[Permutation]) -> Self {
        let mut levels: Vec<ChainLevel> = (0..n).map(|b| ChainLevel::new(n, b)).collect();
        for g in generators.iter().filter(|g| !g.is_identity()) {
            let first_moved = (0..n).find(|&i| g.apply(i) != i).unwrap();
            for level in &mut levels[..=first_moved] {
                level.generators.push(g.clone());
            }
        }
        for level in &mut levels {
            level.rebuild_orbit(n);
        }

        let mut chain = StabilizerChain { n, levels };
        let mut i = n as isize - 1;
        while i >= 0 {
            let l = i as usize;
            match chain.first_failing_schreier_generator(l) {
                Some((residue, drop)) => {
                    for t in l + 1..=drop {
                        chain.levels[t].generators.push(residue.clone());
                        chain.levels[t].rebuild_orbit(n);
                    }
                    i = drop as isize;
                }
                None => i -= 1,
            }
        }
        chain
    }

    /// Sifts every Schreier generator of level `l` through the deeper
    /// levels; returns the first non-trivial residue and its drop-out level.
    fn first_failing_schreier_generator(&self, l: usize) -> Option<(Permutation, usize)> {
        let level = &self.levels[l];
        for &b in &level.orbit {
            let ub = level.transversal[b].as_ref().unwrap();
            for s in &level.generators {
                let sb = s.apply(b);
                let usb = level.transversal[sb].as_ref().unwrap();
                let h = usb.inverse().compose_unchecked(&s.compose_unchecked(ub));
                let (residue, drop) = self.strip(h, l + 1);
                if !residue.is_identity() {
                    return Some((residue, drop));
                }
            }
        }
        None
    }

    fn strip(&self, mut h: Permutation, start: usize) -> (Permutation, usize) {
        for t in start..self.n {
            let level = &self.levels[t];
            let b = h.apply(level.base);
            match &level.transversal[b] {
                Some(u) => h = u.inverse().compose_unchecked(&h),
                None => return (h, t),
            }
        }
        (h, self.n)
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    /// All levels, one per base point `0..n`.
    pub fn levels(&self) -> &[ChainLevel] {
        &self.levels
    }

    /// Levels whose orbit is larger than one point.
    pub fn nontrivial_levels(&self) -> impl Iterator<Item = &ChainLevel> {
        self.levels.iter().filter(|l| l.orbit.len() > 1)
    }

    pub fn transversal_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels
            .iter()
            .fold(BigUint::one(), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Membership by sifting.
    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.n && self.strip(g.clone(), 0).0.is_identity()
    }

    /// Lexicographically least image array in the left coset `g·G`.
    ///
    /// Greedy down the chain: at base point `i`, pick the orbit point `b`
    /// minimizing `g(b)` and continue with `g·u_b`.
    pub fn canonical_coset_rep(&self, g: &Permutation) -> Permutation {
        let mut g = g.clone();
        for level in self.nontrivial_levels() {
            let best = *level
                .orbit
                .iter()
                .min_by_key(|&&b| g.apply(b))
                .expect("orbit contains the base point");
            if best != level.base {
                g = g.compose_unchecked(level.transversal[best].as_ref().unwrap());
            }
        }
        g
    }
}
