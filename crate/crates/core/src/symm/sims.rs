//! Schreier-Sims stabilizer chain, for order and membership queries on groups
//! too large to list.
//!
//! Signs are encoded as a transposition of two extra points appended after the
//! slots, which turns a signed permutation group into an ordinary one.

use std::collections::HashMap;

use super::{SignedPerm, SymmetrySpec};

type Perm = Vec<u32>;

fn mul(a: &Perm, b: &Perm) -> Perm {
    // apply a, then b
    a.iter().map(|&x| b[x as usize]).collect()
}

fn inv(a: &Perm) -> Perm {
    let mut r = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        r[x as usize] = i as u32;
    }
    r
}

fn is_id(a: &Perm) -> bool {
    a.iter().enumerate().all(|(i, &x)| i as u32 == x)
}

struct Level {
    base: u32,
    gens: Vec<Perm>,
    trans: HashMap<u32, Perm>,
}

impl Level {
    fn rebuild(&mut self, npts: usize) {
        let mut trans = HashMap::new();
        trans.insert(self.base, (0..npts as u32).collect::<Perm>());
        let mut stack = vec![self.base];
        while let Some(p) = stack.pop() {
            let up = trans[&p].clone();
            for g in &self.gens {
                let q = g[p as usize];
                if let std::collections::hash_map::Entry::Vacant(e) = trans.entry(q) {
                    e.insert(mul(&up, g));
                    stack.push(q);
                }
            }
        }
        self.trans = trans;
    }
}

pub struct StabChain {
    npts: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(spec: &SymmetrySpec) -> Self {
        let mut chain = StabChain {
            npts: spec.n + 2,
            levels: Vec::new(),
        };
        for g in &spec.generators {
            let p = chain.encode(g);
            let (r, _) = chain.sift(p, 0);
            if !is_id(&r) {
                chain.extend(0, r);
            }
        }
        chain
    }

    fn encode(&self, g: &SignedPerm) -> Perm {
        let n = self.npts as u32 - 2;
        let mut p = g.images.clone();
        if g.sign < 0 {
            p.extend([n + 1, n]);
        } else {
            p.extend([n, n + 1]);
        }
        p
    }

    fn sift(&self, mut g: Perm, start: usize) -> (Perm, usize) {
        for (i, lvl) in self.levels.iter().enumerate().skip(start) {
            let b = g[lvl.base as usize];
            match lvl.trans.get(&b) {
                Some(u) => g = mul(&g, &inv(u)),
                None => return (g, i),
            }
        }
        (g, self.levels.len())
    }

    fn extend(&mut self, i: usize, g: Perm) {
        if i == self.levels.len() {
            let base = g.iter().enumerate().find(|(k, &x)| *k as u32 != x).map(|(k, _)| k as u32);
            let base = base.expect("non-identity element moves a point");
            self.levels.push(Level {
                base,
                gens: Vec::new(),
                trans: HashMap::new(),
            });
        }
        self.levels[i].gens.push(g);
        self.levels[i].rebuild(self.npts);
        let lvl = &self.levels[i];
        let mut schreier = Vec::new();
        for (&p, u) in &lvl.trans {
            for s in &lvl.gens {
                let q = s[p as usize];
                let s_gen = mul(&mul(u, s), &inv(&lvl.trans[&q]));
                if !is_id(&s_gen) {
                    schreier.push(s_gen);
                }
            }
        }
        for s in schreier {
            let (r, _) = self.sift(s, i + 1);
            if !is_id(&r) {
                self.extend(i + 1, r);
            }
        }
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.trans.len() as u128).product()
    }

    pub fn contains(&self, g: &SignedPerm) -> bool {
        let (r, _) = self.sift(self.encode(g), 0);
        is_id(&r)
    }
}

#[cfg(test)]
mod tests {
    use super::super::Group;
    use super::*;

    #[test]
    fn agrees_with_closure() {
        let specs = [
            SymmetrySpec::riemann(),
            SymmetrySpec::symmetric(5, &[0, 1, 2, 3, 4]),
            SymmetrySpec::antisymmetric(4, &[0, 1, 2]).with(&SymmetrySpec::symmetric(4, &[2, 3])),
            SymmetrySpec::none(3),
        ];
        for spec in &specs {
            let g = Group::closure(spec, 100_000).unwrap();
            let c = StabChain::new(spec);
            assert_eq!(c.order(), g.order() as u128);
            for e in &g.elements {
                assert!(c.contains(e));
            }
        }
    }

    #[test]
    fn large_symmetric_group_order() {
        let c = StabChain::new(&SymmetrySpec::symmetric(12, &(0..12).collect::<Vec<_>>()));
        assert_eq!(c.order(), 479_001_600);
    }
}
