//! Depth-first search for `P ∩ P^x` over node labellings of `P`.
//!
//! Labels of `h ∈ P` are fixed in pre-order, so the images of the `p`
//! points under a level-1 node are known as soon as that node is labelled.
//! `h ∈ P^x` means `x·h·x⁻¹ ∈ P`, i.e. the partial map `x(s) ↦ x(h(s))`
//! must extend to a labelling of `P`. Any consistent partial labelling does
//! extend, so the check at each level-1 node is exact and dead branches are
//! cut as soon as they appear.

use std::ops::ControlFlow;

use super::SylowStructure;
use crate::perm::Permutation;

const UNSET: u8 = u8::MAX;

#[derive(Clone, Copy)]
struct Node {
    tree: usize,
    level: usize,
    index: usize,
    slot: usize,
}

pub(super) struct IntersectionSearch<'a> {
    s: &'a SylowStructure,
    x: &'a Permutation,
    p: usize,
    nodes: Vec<Node>,
    labels: Vec<u8>,
    /// Partial labelling of `x·h·x⁻¹` in the same slot layout.
    conj: Vec<u8>,
    trail: Vec<usize>,
    consistent: bool,
}

enum Mode {
    Count { cap: u64, found: u64 },
    Nontrivial,
}

impl<'a> IntersectionSearch<'a> {
    pub(super) fn new(s: &'a SylowStructure, x: &'a Permutation) -> Self {
        let mut nodes = Vec::with_capacity(s.m());
        for (t, tree) in s.trees().iter().enumerate() {
            if tree.height > 0 {
                preorder(s, t, tree.height, 0, &mut nodes);
            }
        }
        let mut search = IntersectionSearch {
            s,
            x,
            p: s.p() as usize,
            nodes,
            labels: vec![0; s.m()],
            conj: vec![UNSET; s.m()],
            trail: Vec::new(),
            consistent: true,
        };
        // Points fixed by all of P are fixed by h as well.
        for tree in s.trees().iter().filter(|t| t.height == 0) {
            let u = x.apply(tree.offset);
            if !search.constrain(u, u) {
                search.consistent = false;
            }
        }
        search.trail.clear();
        search
    }

    pub(super) fn find_nontrivial(mut self) -> bool {
        if !self.consistent {
            return false;
        }
        let mut mode = Mode::Nontrivial;
        self.dfs(0, &mut mode).is_break()
    }

    pub(super) fn count(mut self, cap: u64) -> Option<u64> {
        if !self.consistent {
            return Some(0);
        }
        let mut mode = Mode::Count { cap, found: 0 };
        let overflow = self.dfs(0, &mut mode).is_break();
        match mode {
            Mode::Count { found, .. } if !overflow => Some(found),
            _ => None,
        }
    }

    fn dfs(&mut self, i: usize, mode: &mut Mode) -> ControlFlow<()> {
        if i == self.nodes.len() {
            return match mode {
                Mode::Nontrivial => {
                    if self.labels.iter().any(|&r| r != 0) {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                }
                Mode::Count { cap, found } => {
                    *found += 1;
                    if *found > *cap {
                        ControlFlow::Break(())
                    } else {
                        ControlFlow::Continue(())
                    }
                }
            };
        }
        let node = self.nodes[i];
        for r in 0..self.p as u8 {
            self.labels[node.slot] = r;
            let mark = self.trail.len();
            if node.level > 1 || self.check_block(node) {
                let flow = self.dfs(i + 1, mode);
                if flow.is_break() {
                    self.labels[node.slot] = 0;
                    self.undo(mark);
                    return flow;
                }
            }
            self.undo(mark);
        }
        self.labels[node.slot] = 0;
        ControlFlow::Continue(())
    }

    /// Images of the `p` points under a freshly labelled level-1 node.
    fn check_block(&mut self, node: Node) -> bool {
        let tree = self.s.trees()[node.tree];
        let powers = self.s.powers();
        for d0 in 0..self.p {
            let local = node.index * self.p + d0;
            let mut image = 0;
            for l in 1..=tree.height {
                let digit = (local / powers[l - 1]) % self.p;
                let r = self.labels[self.s.label_slot(node.tree, l, local / powers[l])] as usize;
                image += ((digit + r) % self.p) * powers[l - 1];
            }
            let u = self.x.apply(tree.offset + local);
            let v = self.x.apply(tree.offset + image);
            if !self.constrain(u, v) {
                return false;
            }
        }
        true
    }

    /// Records that the conjugate sends `u` to `v`; false on contradiction.
    fn constrain(&mut self, u: usize, v: usize) -> bool {
        let t = self.s.point_tree(u);
        if self.s.point_tree(v) != t {
            return false;
        }
        let tree = self.s.trees()[t];
        let powers = self.s.powers();
        let (lu, lv) = (u - tree.offset, v - tree.offset);
        for l in 1..=tree.height {
            let d = (lu / powers[l - 1]) % self.p;
            let e = (lv / powers[l - 1]) % self.p;
            let r = ((e + self.p - d) % self.p) as u8;
            let slot = self.s.label_slot(t, l, lu / powers[l]);
            match self.conj[slot] {
                UNSET => {
                    self.conj[slot] = r;
                    self.trail.push(slot);
                }
                c if c != r => return false,
                _ => {}
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let slot = self.trail.pop().unwrap();
            self.conj[slot] = UNSET;
        }
    }
}

fn preorder(s: &SylowStructure, tree: usize, level: usize, index: usize, out: &mut Vec<Node>) {
    out.push(Node {
        tree,
        level,
        index,
        slot: s.label_slot(tree, level, index),
    });
    if level > 1 {
        let p = s.p() as usize;
        for c in 0..p {
            preorder(s, tree, level - 1, index * p + c, out);
        }
    }
}
