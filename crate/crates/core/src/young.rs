//! Young tableaux and the projectors built from them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, Index, Label, Session, Term, TensorKind};
use crate::symm::{canonicalize, permutations, SignedPerm, SymmetrySpec};

/// A filling of a Young diagram by index labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tableau {
    pub rows: Vec<Vec<Arc<str>>>,
}

/// Which symmetry the projected tensor shows explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Manifest {
    /// Rows are symmetrized first, columns antisymmetrized last.
    #[default]
    Antisymmetric,
    Symmetric,
}

impl Tableau {
    pub fn new(rows: Vec<Vec<Arc<str>>>) -> Result<Self> {
        let t = Tableau { rows };
        t.validate()?;
        Ok(t)
    }

    pub fn from_strs(rows: &[&[&str]]) -> Result<Self> {
        Tableau::new(rows.iter().map(|r| r.iter().map(|s| Arc::from(*s)).collect()).collect())
    }

    fn validate(&self) -> Result<()> {
        if self.rows.iter().any(|r| r.is_empty()) {
            return Err(Error::Invalid("tableau rows must be nonempty".into()));
        }
        if self.rows.windows(2).any(|w| w[0].len() < w[1].len()) {
            return Err(Error::Invalid("tableau row lengths must weakly decrease".into()));
        }
        let mut seen = HashSet::new();
        for l in self.cells() {
            if !seen.insert(l.clone()) {
                return Err(Error::Invalid(format!("label `{}` appears twice in the tableau", l)));
            }
        }
        Ok(())
    }

    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.len()).collect()
    }

    pub fn cells(&self) -> impl Iterator<Item = &Arc<str>> {
        self.rows.iter().flatten()
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn columns(&self) -> Vec<Vec<Arc<str>>> {
        let w = self.rows.first().map_or(0, |r| r.len());
        (0..w)
            .map(|j| self.rows.iter().filter_map(|r| r.get(j).cloned()).collect())
            .collect()
    }
}

impl std::fmt::Display for Tableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<String> = self.rows.iter().map(|r| format!("{{{}}}", r.join(","))).collect();
        write!(f, "{{{}}}", rows.join(","))
    }
}

/// Number of standard tableaux of a shape, by the hook-length formula.
pub fn hook_length(shape: &[usize]) -> BigInt {
    let n: usize = shape.iter().sum();
    let mut num = BigInt::one();
    for k in 2..=n {
        num *= k;
    }
    let mut den = BigInt::one();
    for (i, &len) in shape.iter().enumerate() {
        for j in 0..len {
            let arm = len - j - 1;
            let leg = shape[i + 1..].iter().filter(|&&l| l > j).count();
            den *= arm + leg + 1;
        }
    }
    num / den
}

/// All standard fillings of `shape` with `1..=n`, rows and columns increasing.
///
/// Numbers are placed in increasing order, trying rows from the top.
pub fn standard_tableaux(shape: &[usize]) -> Vec<Vec<Vec<usize>>> {
    fn go(shape: &[usize], rows: &mut Vec<Vec<usize>>, next: usize, n: usize, out: &mut Vec<Vec<Vec<usize>>>) {
        if next > n {
            out.push(rows.clone());
            return;
        }
        for i in 0..shape.len() {
            let len = rows[i].len();
            if len == shape[i] {
                continue;
            }
            if i > 0 && rows[i - 1].len() <= len {
                continue;
            }
            rows[i].push(next);
            go(shape, rows, next + 1, n, out);
            rows[i].pop();
        }
    }
    let n = shape.iter().sum();
    let mut out = Vec::new();
    go(shape, &mut vec![Vec::new(); shape.len()], 1, n, &mut out);
    out
}

/// Sum over all relabelings of `labels` (signed when `anti`).
fn symmetrize_labels(e: &Expr, labels: &[Arc<str>], anti: bool, session: &Session) -> Result<Expr> {
    if labels.len() < 2 {
        return Ok(e.clone());
    }
    let mut out = Expr::zero();
    for p in permutations(labels.len()) {
        let map: HashMap<Arc<str>, Index> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), Index::up(&labels[p[i] as usize])))
            .collect();
        let sign = if anti { SignedPerm::from_images(p.clone(), 1).parity() } else { 1 };
        let t = e.rename_frees(&map);
        out = out.add(&if sign < 0 { t.neg() } else { t });
    }
    canonicalize(&out, session)
}

fn factorial(n: usize) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Averages over all permutations of `labels`, so symmetric inputs are fixed.
pub fn symmetrize(e: &Expr, labels: &[Arc<str>], session: &Session) -> Result<Expr> {
    let w = Coeff::from(BigRational::new(BigInt::one(), factorial(labels.len())));
    Ok(symmetrize_labels(e, labels, false, session)?.scale(&w))
}

/// Signed average over all permutations of `labels`.
pub fn antisymmetrize(e: &Expr, labels: &[Arc<str>], session: &Session) -> Result<Expr> {
    let w = Coeff::from(BigRational::new(BigInt::one(), factorial(labels.len())));
    Ok(symmetrize_labels(e, labels, true, session)?.scale(&w))
}

/// Projects a dummy-free expression onto a Young tableau of its free indices.
pub fn young_project(e: &Expr, tab: &Tableau, manifest: Manifest, session: &Session) -> Result<Expr> {
    if has_dummies(e) {
        return Err(Error::Invalid("Young projection needs an expression without dummy indices".into()));
    }
    let frees: HashSet<Arc<str>> = e
        .free_indices()?
        .into_iter()
        .filter_map(|i| i.name().map(Arc::from))
        .collect();
    let cells: HashSet<Arc<str>> = tab.cells().cloned().collect();
    if !e.is_zero() && frees != cells {
        return Err(Error::Invalid(format!(
            "tableau {} does not match the free indices of the expression",
            tab
        )));
    }
    let rows = tab.rows.clone();
    let cols = tab.columns();
    let mut out = e.clone();
    let (first, second, anti_first) = match manifest {
        Manifest::Antisymmetric => (rows, cols, false),
        Manifest::Symmetric => (cols, rows, true),
    };
    for l in &first {
        out = symmetrize_labels(&out, l, anti_first, session)?;
    }
    for l in &second {
        out = symmetrize_labels(&out, l, !anti_first, session)?;
    }
    let scale = Coeff::from(BigRational::new(hook_length(&tab.shape()), factorial(tab.size())));
    canonicalize(&out.scale(&scale), session)
}

/// Mono-term symmetries of tensors in the image of the antisymmetric
/// projector: antisymmetry within columns and exchange of equal-length columns.
///
/// `slots` gives the label sitting in each slot of the tensor.
pub fn tableau_symmetric(tab: &Tableau, slots: &[Arc<str>]) -> Result<SymmetrySpec> {
    let n = slots.len();
    if tab.size() != n {
        return Err(Error::Invalid(format!("tableau {} does not fit a tensor of rank {}", tab, n)));
    }
    let pos = |l: &Arc<str>| -> Result<usize> {
        slots
            .iter()
            .position(|s| s == l)
            .ok_or_else(|| Error::Invalid(format!("label `{}` is not a slot of the tensor", l)))
    };
    let mut gens = Vec::new();
    let cols = tab.columns();
    for c in &cols {
        for w in c.windows(2) {
            gens.push(SignedPerm::transposition(n, pos(&w[0])?, pos(&w[1])?, -1));
        }
    }
    for w in cols.windows(2) {
        if w[0].len() != w[1].len() {
            continue;
        }
        let mut images: Vec<u32> = (0..n as u32).collect();
        for (a, b) in w[0].iter().zip(&w[1]) {
            let (i, j) = (pos(a)?, pos(b)?);
            images.swap(i, j);
        }
        gens.push(SignedPerm::from_images(images, 1));
    }
    Ok(SymmetrySpec { n, generators: gens })
}

/// The projector on slot positions: `(coefficient, images)` with the term for
/// `images` placing the content of slot `images[k]` in slot `k`.
fn slot_projector(tab: &[Vec<usize>], n: usize) -> Vec<(Coeff, Vec<usize>)> {
    let cols: Vec<Vec<usize>> = (0..tab[0].len())
        .map(|j| tab.iter().filter_map(|r| r.get(j).copied()).collect())
        .collect();
    // each arrangement maps slot -> label (labels are the initial slot numbers)
    let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    acc.insert((0..n).collect(), BigInt::one());
    let groups: Vec<(&Vec<usize>, bool)> = tab.iter().map(|r| (r, false)).chain(cols.iter().map(|c| (c, true))).collect();
    for (set, anti) in groups {
        if set.len() < 2 {
            continue;
        }
        let mut next: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
        for p in permutations(set.len()) {
            let sign = if anti { SignedPerm::from_images(p.clone(), 1).parity() } else { 1 };
            let relabel: HashMap<usize, usize> = set.iter().enumerate().map(|(i, &l)| (l, set[p[i] as usize])).collect();
            for (arr, c) in &acc {
                let new: Vec<usize> = arr.iter().map(|l| *relabel.get(l).unwrap_or(l)).collect();
                *next.entry(new).or_default() += c * sign;
            }
        }
        next.retain(|_, c| *c != BigInt::from(0));
        acc = next;
    }
    let shape: Vec<usize> = tab.iter().map(|r| r.len()).collect();
    let mut fact = BigInt::one();
    for k in 2..=n {
        fact *= k;
    }
    let norm = BigRational::new(hook_length(&shape), fact);
    acc.into_iter()
        .map(|(arr, c)| (Coeff::from(BigRational::from_integer(c) * &norm), arr))
        .collect()
}

fn riemann_projectors() -> &'static (Vec<(Coeff, Vec<usize>)>, Vec<(Coeff, Vec<usize>)>) {
    static P: OnceLock<(Vec<(Coeff, Vec<usize>)>, Vec<(Coeff, Vec<usize>)>)> = OnceLock::new();
    P.get_or_init(|| {
        // slots: R_{abcd} -> 0..3, derivative index e -> 4
        (
            slot_projector(&[vec![0, 2], vec![1, 3]], 4),
            slot_projector(&[vec![0, 2, 4], vec![1, 3]], 5),
        )
    })
}

/// Replaces every Riemann tensor, and every once-differentiated Riemann
/// tensor, by its Young projection, then canonicalizes.
pub fn riemann_young_project(e: &Expr, session: &Session) -> Result<Expr> {
    let Some(riemann) = session.curvature_head(TensorKind::Riemann).map(Arc::<str>::from) else {
        return Ok(e.clone());
    };
    let (p0, p1) = riemann_projectors();
    let mut out = Vec::new();
    for t in &e.terms {
        let mut terms = vec![t.clone()];
        for k in 0..t.factors.len() {
            let f = &t.factors[k];
            if f.head != riemann || f.derivs.len() > 1 {
                continue;
            }
            let proj = if f.derivs.is_empty() { p0 } else { p1 };
            let mut next = Vec::with_capacity(terms.len() * proj.len());
            for base in &terms {
                let slots = base.factors[k].slots();
                for (c, arr) in proj {
                    let mut nt: Term = base.scaled(c);
                    let new: Vec<Index> = arr.iter().map(|&j| slots[j].clone()).collect();
                    nt.factors[k].set_slots(&new);
                    next.push(nt);
                }
            }
            terms = next;
        }
        out.extend(terms);
    }
    canonicalize(&Expr::from_terms(out), session)
}

/// Whether any term of `e` has a contracted index.
pub fn has_dummies(e: &Expr) -> bool {
    e.terms.iter().any(|t| t.indices().any(|i| matches!(i.label, Label::Dummy(_))))
}
