//! Expression data model: indices, tensor factors, terms and sums.

mod metric;
pub mod numeric;
mod parse;
mod print;
mod rules;
mod session;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::coeff::Coeff;
use crate::error::{Error, Result};

pub use metric::contract_metric;
pub use parse::{apply_covd, divide, make_tensor, parse, parse_ast, power, renumber, Ast, AstIndex};
pub use print::{Format, Printer};
pub use rules::{replace, Rule};
pub use session::{
    Dim, Manifold, MetricInfo, Session, TensorInfo, TensorKind, PERTURBATION, RICCI, RICCI_SCALAR, RIEMANN, WEYL,
};

/// An index label: either a user-visible name or an internal dummy number.
///
/// Dummies are kept in their own namespace so that freshly generated
/// contractions can never collide with a user's labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Name(Arc<str>),
    Dummy(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Index {
    pub label: Label,
    pub up: bool,
}

impl Index {
    pub fn new(name: &str, up: bool) -> Self {
        Index {
            label: Label::Name(Arc::from(name)),
            up,
        }
    }

    pub fn up(name: &str) -> Self {
        Index::new(name, true)
    }

    pub fn down(name: &str) -> Self {
        Index::new(name, false)
    }

    pub fn dummy(k: u32, up: bool) -> Self {
        Index {
            label: Label::Dummy(k),
            up,
        }
    }

    pub fn flipped(&self) -> Self {
        Index {
            label: self.label.clone(),
            up: !self.up,
        }
    }

    pub fn is_dummy(&self) -> bool {
        matches!(self.label, Label::Dummy(_))
    }

    pub fn name(&self) -> Option<&str> {
        match &self.label {
            Label::Name(n) => Some(n),
            Label::Dummy(_) => None,
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.up { "" } else { "-" };
        match &self.label {
            Label::Name(n) => write!(f, "{}{}", sign, n),
            Label::Dummy(k) => write!(f, "{}_{}", sign, k),
        }
    }
}

/// One tensor with its indices, possibly wrapped in covariant derivatives.
///
/// `derivs` lists derivative indices outermost first, so `∇_a ∇_b T` has
/// `derivs = [a, b]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub head: Arc<str>,
    pub indices: Vec<Index>,
    pub derivs: Vec<Index>,
}

impl Factor {
    pub fn new(head: &str, indices: Vec<Index>) -> Self {
        Factor {
            head: Arc::from(head),
            indices,
            derivs: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn nslots(&self) -> usize {
        self.indices.len() + self.derivs.len()
    }

    /// Slots in canonical order: tensor indices, then derivatives innermost first.
    pub fn slots(&self) -> Vec<Index> {
        let mut v = self.indices.clone();
        v.extend(self.derivs.iter().rev().cloned());
        v
    }

    pub fn slot(&self, k: usize) -> &Index {
        if k < self.indices.len() {
            &self.indices[k]
        } else {
            let j = k - self.indices.len();
            &self.derivs[self.derivs.len() - 1 - j]
        }
    }

    pub fn slot_mut(&mut self, k: usize) -> &mut Index {
        if k < self.indices.len() {
            &mut self.indices[k]
        } else {
            let j = k - self.indices.len();
            let n = self.derivs.len();
            &mut self.derivs[n - 1 - j]
        }
    }

    pub fn set_slots(&mut self, slots: &[Index]) {
        let r = self.indices.len();
        self.indices = slots[..r].to_vec();
        self.derivs = slots[r..].iter().rev().cloned().collect();
    }

    pub fn all_indices(&self) -> impl Iterator<Item = &Index> {
        self.indices.iter().chain(self.derivs.iter())
    }

    fn all_indices_mut(&mut self) -> impl Iterator<Item = &mut Index> {
        self.indices.iter_mut().chain(self.derivs.iter_mut())
    }
}

/// A coefficient times a product of factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub coeff: Coeff,
    pub factors: Vec<Factor>,
}

impl Term {
    pub fn new(coeff: Coeff, factors: Vec<Factor>) -> Self {
        Term { coeff, factors }
    }

    pub fn scalar(coeff: Coeff) -> Self {
        Term {
            coeff,
            factors: Vec::new(),
        }
    }

    pub fn from_factor(f: Factor) -> Self {
        Term {
            coeff: Coeff::one(),
            factors: vec![f],
        }
    }

    pub fn indices(&self) -> impl Iterator<Item = &Index> {
        self.factors.iter().flat_map(|f| f.all_indices())
    }

    pub fn indices_mut(&mut self) -> impl Iterator<Item = &mut Index> {
        self.factors.iter_mut().flat_map(|f| f.all_indices_mut())
    }

    pub fn max_dummy(&self) -> Option<u32> {
        self.indices()
            .filter_map(|i| match i.label {
                Label::Dummy(k) => Some(k),
                _ => None,
            })
            .max()
    }

    pub fn next_dummy(&self) -> u32 {
        self.max_dummy().map(|k| k + 1).unwrap_or(0)
    }

    pub fn shift_dummies(&mut self, by: u32) {
        for i in self.indices_mut() {
            if let Label::Dummy(k) = &mut i.label {
                *k += by;
            }
        }
    }

    /// Free indices in slot order (factor by factor, tensor slots then derivatives).
    pub fn free_indices(&self) -> Vec<Index> {
        let mut count: HashMap<&Label, usize> = HashMap::new();
        for i in self.indices() {
            *count.entry(&i.label).or_default() += 1;
        }
        self.factors
            .iter()
            .flat_map(|f| f.slots())
            .filter(|i| count[&i.label] == 1)
            .collect()
    }

    /// Turns every named label that occurs twice with opposite variance into
    /// a fresh dummy, and rejects any other repetition.
    pub fn normalize_labels(mut self) -> Result<Term> {
        let mut seen: BTreeMap<Label, (usize, bool)> = BTreeMap::new();
        for i in self.indices() {
            let e = seen.entry(i.label.clone()).or_insert((0, i.up));
            e.0 += 1;
            if e.0 == 2 && e.1 == i.up {
                return Err(Error::IndexPairing(label_text(&i.label)));
            }
            if e.0 > 2 {
                return Err(Error::IndexPairing(label_text(&i.label)));
            }
        }
        let mut next = self.next_dummy();
        let mut rename: HashMap<Arc<str>, u32> = HashMap::new();
        for (l, (n, _)) in &seen {
            if let Label::Name(s) = l {
                if *n == 2 {
                    rename.insert(s.clone(), next);
                    next += 1;
                }
            }
        }
        if !rename.is_empty() {
            for i in self.indices_mut() {
                if let Label::Name(s) = &i.label {
                    if let Some(k) = rename.get(s) {
                        i.label = Label::Dummy(*k);
                    }
                }
            }
        }
        Ok(self)
    }

    /// Renames dummies to `0, 1, ...` by first appearance in slot order.
    pub fn renumber_dummies(mut self) -> Term {
        let mut map: HashMap<u32, u32> = HashMap::new();
        for f in &self.factors {
            for i in f.slots() {
                if let Label::Dummy(k) = i.label {
                    let n = map.len() as u32;
                    map.entry(k).or_insert(n);
                }
            }
        }
        for i in self.indices_mut() {
            if let Label::Dummy(k) = &mut i.label {
                *k = map[k];
            }
        }
        self
    }

    pub fn mul(&self, other: &Term) -> Result<Term> {
        let mut o = other.clone();
        if let Some(m) = self.max_dummy() {
            o.shift_dummies(m + 1);
        }
        let mut factors = self.factors.clone();
        factors.extend(o.factors);
        Term {
            coeff: &self.coeff * &other.coeff,
            factors,
        }
        .normalize_labels()
    }

    pub fn scaled(&self, c: &Coeff) -> Term {
        Term {
            coeff: &self.coeff * c,
            factors: self.factors.clone(),
        }
    }

    /// Rename free labels. Labels missing from the map are left alone.
    pub fn rename_frees(&self, map: &HashMap<Arc<str>, Index>) -> Term {
        let mut t = self.clone();
        for i in t.indices_mut() {
            if let Label::Name(n) = &i.label {
                if let Some(r) = map.get(n) {
                    i.label = r.label.clone();
                    if !r.up {
                        i.up = !i.up;
                    }
                }
            }
        }
        t
    }

    pub fn has_head(&self, head: &str) -> bool {
        self.factors.iter().any(|f| &*f.head == head)
    }
}

pub(crate) fn label_text(l: &Label) -> String {
    match l {
        Label::Name(n) => n.to_string(),
        Label::Dummy(k) => format!("_{}", k),
    }
}

/// A sum of terms. The empty sum is zero.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Expr {
    pub terms: Vec<Term>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr { terms: Vec::new() }
    }

    pub fn from_term(t: Term) -> Self {
        if t.coeff.is_zero() {
            Expr::zero()
        } else {
            Expr { terms: vec![t] }
        }
    }

    pub fn from_terms(ts: impl IntoIterator<Item = Term>) -> Self {
        Expr {
            terms: ts.into_iter().filter(|t| !t.coeff.is_zero()).collect(),
        }
    }

    pub fn scalar(c: Coeff) -> Self {
        Expr::from_term(Term::scalar(c))
    }

    pub fn factor(f: Factor) -> Self {
        Expr::from_term(Term::from_factor(f))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        Expr { terms }
    }

    pub fn sub(&self, o: &Expr) -> Expr {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Expr {
        self.scale(&Coeff::int(-1))
    }

    pub fn scale(&self, c: &Coeff) -> Expr {
        Expr::from_terms(self.terms.iter().map(|t| t.scaled(c)))
    }

    pub fn mul(&self, o: &Expr) -> Result<Expr> {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(a.mul(b)?);
            }
        }
        Ok(Expr::from_terms(terms))
    }

    /// Free indices shared by all terms; errors when terms disagree.
    pub fn free_indices(&self) -> Result<Vec<Index>> {
        let mut out: Option<Vec<Index>> = None;
        for t in &self.terms {
            let mut f = t.free_indices();
            f.sort();
            match &out {
                None => out = Some(f),
                Some(prev) if *prev != f => {
                    return Err(Error::InhomogeneousFrees(
                        index_list_text(prev),
                        index_list_text(&f),
                    ))
                }
                _ => {}
            }
        }
        Ok(out.unwrap_or_default())
    }

    pub fn map_terms(&self, f: impl Fn(&Term) -> Expr) -> Expr {
        let mut out = Expr::zero();
        for t in &self.terms {
            out.terms.extend(f(t).terms);
        }
        out
    }

    pub fn try_map_terms(&self, f: impl Fn(&Term) -> Result<Expr>) -> Result<Expr> {
        let mut out = Expr::zero();
        for t in &self.terms {
            out.terms.extend(f(t)?.terms);
        }
        Ok(out)
    }

    /// Rename free labels in every term.
    pub fn rename_frees(&self, map: &HashMap<Arc<str>, Index>) -> Expr {
        Expr::from_terms(self.terms.iter().map(|t| t.rename_frees(map)))
    }

    /// Substitute values for constant symbols in all coefficients.
    pub fn substitute_constants(&self, f: &dyn Fn(&str) -> Option<Coeff>) -> Expr {
        Expr::from_terms(self.terms.iter().map(|t| Term {
            coeff: t.coeff.substitute(f),
            factors: t.factors.clone(),
        }))
    }
}

fn index_list_text(v: &[Index]) -> String {
    let parts: Vec<String> = v.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// Applies a covariant derivative with index `idx` to an expression via the
/// Leibniz rule. Coefficients are constant.
pub fn covd(expr: &Expr, idx: &Index) -> Result<Expr> {
    let mut out = Vec::new();
    for t in &expr.terms {
        // the derivative index may pair with a label inside the term
        for k in 0..t.factors.len() {
            let mut nt = t.clone();
            nt.factors[k].derivs.insert(0, idx.clone());
            out.push(nt.normalize_labels()?);
        }
    }
    Ok(Expr::from_terms(out))
}
