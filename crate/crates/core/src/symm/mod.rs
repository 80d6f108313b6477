//! Signed permutation groups acting on tensor slots.
//!
//! A signed permutation `(σ, s)` states the mono-term symmetry
//! `T(L∘σ) = s·T(L)`, where `(L∘σ)[k] = L[σ(k)]` for an index list `L`.

pub mod canon;
mod sims;

use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};

pub use canon::{canonicalize, canonicalize_expr, canonicalize_term, CanonOptions};
pub use sims::StabChain;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedPerm {
    pub images: Vec<u32>,
    pub sign: i8,
}

impl SignedPerm {
    pub fn identity(n: usize) -> Self {
        SignedPerm {
            images: (0..n as u32).collect(),
            sign: 1,
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize, sign: i8) -> Self {
        let mut p = SignedPerm::identity(n);
        p.images.swap(i, j);
        p.sign = sign;
        p
    }

    pub fn from_images(images: Vec<u32>, sign: i8) -> Self {
        SignedPerm { images, sign }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.sign == 1 && self.images.iter().enumerate().all(|(k, &v)| k as u32 == v)
    }

    /// Apply `self`, then `other`.
    pub fn then(&self, other: &SignedPerm) -> SignedPerm {
        SignedPerm {
            images: other.images.iter().map(|&k| self.images[k as usize]).collect(),
            sign: self.sign * other.sign,
        }
    }

    pub fn inverse(&self) -> SignedPerm {
        let mut inv = vec![0u32; self.images.len()];
        for (k, &v) in self.images.iter().enumerate() {
            inv[v as usize] = k as u32;
        }
        SignedPerm {
            images: inv,
            sign: self.sign,
        }
    }

    /// Rearranges a list according to the convention `out[k] = list[σ(k)]`.
    pub fn apply<T: Clone>(&self, list: &[T]) -> Vec<T> {
        self.images.iter().map(|&k| list[k as usize].clone()).collect()
    }

    /// Parity of the underlying permutation as ±1.
    pub fn parity(&self) -> i8 {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut sign = 1i8;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut k = s;
            while !seen[k] {
                seen[k] = true;
                k = self.images[k] as usize;
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }
}

/// A generating set of signed slot permutations.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetrySpec {
    pub n: usize,
    pub generators: Vec<SignedPerm>,
}

impl SymmetrySpec {
    pub fn none(n: usize) -> Self {
        SymmetrySpec {
            n,
            generators: Vec::new(),
        }
    }

    fn chain(n: usize, slots: &[usize], sign: i8) -> Self {
        let generators = slots
            .windows(2)
            .map(|w| SignedPerm::transposition(n, w[0], w[1], sign))
            .collect();
        SymmetrySpec { n, generators }
    }

    /// Full symmetry among `slots`.
    pub fn symmetric(n: usize, slots: &[usize]) -> Self {
        SymmetrySpec::chain(n, slots, 1)
    }

    /// Full antisymmetry among `slots`.
    pub fn antisymmetric(n: usize, slots: &[usize]) -> Self {
        SymmetrySpec::chain(n, slots, -1)
    }

    /// Antisymmetric pairs (1,2), (3,4) and symmetric pair exchange.
    pub fn riemann() -> Self {
        SymmetrySpec {
            n: 4,
            generators: vec![
                SignedPerm::transposition(4, 0, 1, -1),
                SignedPerm::transposition(4, 2, 3, -1),
                SignedPerm::from_images(vec![2, 3, 0, 1], 1),
            ],
        }
    }

    pub fn with(mut self, other: &SymmetrySpec) -> Self {
        assert_eq!(self.n, other.n);
        self.generators.extend(other.generators.iter().cloned());
        self
    }

    /// Independent symmetries on two consecutive slot blocks.
    pub fn direct_sum(&self, other: &SymmetrySpec) -> Self {
        let n = self.n + other.n;
        let mut gens = Vec::new();
        for g in &self.generators {
            let mut images = g.images.clone();
            images.extend((self.n as u32)..(n as u32));
            gens.push(SignedPerm::from_images(images, g.sign));
        }
        for g in &other.generators {
            let mut images: Vec<u32> = (0..self.n as u32).collect();
            images.extend(g.images.iter().map(|&k| k + self.n as u32));
            gens.push(SignedPerm::from_images(images, g.sign));
        }
        SymmetrySpec { n, generators: gens }
    }
}

/// All elements of a finite signed permutation group.
#[derive(Clone, Debug)]
pub struct Group {
    pub n: usize,
    pub elements: Vec<SignedPerm>,
    /// Set when both `+σ` and `-σ` belong to the group, i.e. the tensor vanishes.
    pub contains_minus_identity: bool,
    lookup: HashMap<Vec<u32>, i8>,
}

impl Group {
    pub fn trivial(n: usize) -> Self {
        let id = SignedPerm::identity(n);
        let mut lookup = HashMap::new();
        lookup.insert(id.images.clone(), 1);
        Group {
            n,
            elements: vec![id],
            contains_minus_identity: false,
            lookup,
        }
    }

    /// Breadth-first closure of the generators; errors above `cap` elements.
    pub fn closure(spec: &SymmetrySpec, cap: usize) -> Result<Group> {
        let id = SignedPerm::identity(spec.n);
        let mut seen: HashSet<SignedPerm> = HashSet::new();
        let mut elements = vec![id.clone()];
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &spec.generators {
                let q = p.then(g);
                if seen.insert(q.clone()) {
                    if elements.len() >= cap {
                        return Err(Error::GroupTooLarge(cap));
                    }
                    elements.push(q.clone());
                    queue.push_back(q);
                }
            }
        }
        let mut lookup = HashMap::new();
        let mut minus = false;
        for e in &elements {
            if let Some(s) = lookup.insert(e.images.clone(), e.sign) {
                if s != e.sign {
                    minus = true;
                }
            }
        }
        Ok(Group {
            n: spec.n,
            elements,
            contains_minus_identity: minus,
            lookup,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// The sign attached to an unsigned permutation, if it belongs to the group.
    pub fn sign_of(&self, images: &[u32]) -> Option<i8> {
        if self.contains_minus_identity && self.lookup.contains_key(images) {
            return Some(0);
        }
        self.lookup.get(images).copied()
    }

    pub fn contains(&self, p: &SignedPerm) -> bool {
        match self.sign_of(&p.images) {
            Some(0) => true,
            Some(s) => s == p.sign,
            None => false,
        }
    }
}

/// One representative per right coset `Hσ` of the (unsigned) group in `S_n`,
/// in lexicographic order of the representatives.
pub fn right_transversal(group: &Group) -> Vec<SignedPerm> {
    let n = group.n;
    let mut covered: HashSet<Vec<u32>> = HashSet::new();
    let mut reps = Vec::new();
    for p in permutations(n) {
        if covered.contains(&p) {
            continue;
        }
        let sp = SignedPerm::from_images(p, 1);
        for h in &group.elements {
            covered.insert(h.then(&sp).images);
        }
        reps.push(sp);
    }
    reps
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..n as u32).collect();
    loop {
        out.push(cur.clone());
        // next lexicographic permutation
        let mut i = n;
        while i > 1 && cur[i - 2] >= cur[i - 1] {
            i -= 1;
        }
        if i <= 1 {
            break;
        }
        let p = i - 2;
        let mut j = n - 1;
        while cur[j] <= cur[p] {
            j -= 1;
        }
        cur.swap(p, j);
        cur[p + 1..].reverse();
    }
    out
}
