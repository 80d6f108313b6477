//! Canonical forms of terms under slot symmetries, factor exchange and dummy
//! relabeling.
//!
//! The canonical arrangement is the lexicographically smallest token sequence
//! over all group actions, where factors are laid out in a fixed type order and
//! each factor contributes its slots (tensor indices, then derivatives from the
//! innermost out). Free indices sort before dummies; dummies are numbered by
//! first appearance. The search places one factor per level and keeps every
//! arrangement that ties for the minimum, so the result is exact.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::error::Result;
use crate::expr::{Expr, Factor, Index, Label, Printer, Session, Term, TensorKind};

use super::Group;

#[derive(Clone, Copy, Debug)]
pub struct CanonOptions {
    /// Treat all free indices as interchangeable tokens (used to compare
    /// contraction patterns irrespective of where the frees sit).
    pub anonymous_frees: bool,
    /// Use declared slot symmetries; when off, only factor exchange and
    /// dummy relabeling act.
    pub slot_symmetries: bool,
    pub curvature_relations: bool,
}

impl Default for CanonOptions {
    fn default() -> Self {
        CanonOptions {
            anonymous_frees: false,
            slot_symmetries: true,
            curvature_relations: true,
        }
    }
}

/// Canonicalizes every term and merges equal tensorial parts.
pub fn canonicalize(expr: &Expr, session: &Session) -> Result<Expr> {
    canonicalize_expr(expr, session, CanonOptions::default())
}

pub fn canonicalize_expr(expr: &Expr, session: &Session, opts: CanonOptions) -> Result<Expr> {
    let canon: Vec<Option<Term>> = expr
        .terms
        .par_iter()
        .map(|t| canonicalize_term(t, session, opts))
        .collect::<Result<_>>()?;
    let mut acc: IndexMap<Vec<Factor>, Coeff> = IndexMap::new();
    for c in canon.into_iter().flatten() {
        let e = acc.entry(c.factors).or_insert_with(Coeff::zero);
        *e = &*e + &c.coeff;
    }
    let mut terms: Vec<Term> = acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(f, c)| Term::new(c, f))
        .collect();
    terms.sort_by(|a, b| term_order(a, b, session));
    Ok(Expr { terms })
}

/// Ordering of canonical terms within a sum.
///
/// Factors are compared from the last one backwards, each by head, then the
/// printed letters of its derivative and tensor slots, with variance only as
/// a tie-break. This puts terms in the order a reader scanning the rightmost
/// factor would expect.
pub fn term_order(a: &Term, b: &Term, session: &Session) -> Ordering {
    display_key(a, session)
        .cmp(&display_key(b, session))
        .then_with(|| a.factors.cmp(&b.factors))
}

type FactorKey = (Arc<str>, Vec<String>, Vec<bool>);

fn display_key(t: &Term, session: &Session) -> Vec<FactorKey> {
    let p = Printer::plain(session);
    let names = p.dummy_names(t);
    let letter = |i: &Index| match &i.label {
        Label::Name(n) => n.to_string(),
        Label::Dummy(k) => names.get(k).cloned().unwrap_or_default(),
    };
    t.factors
        .iter()
        .rev()
        .map(|f| {
            let slots: Vec<&Index> = f.derivs.iter().chain(f.indices.iter()).collect();
            (
                f.head.clone(),
                slots.iter().map(|i| letter(i)).collect(),
                slots.iter().map(|i| !i.up).collect(),
            )
        })
        .collect()
}

/// Factor type order: metrics first, then by head name, then derivative count.
fn type_key(f: &Factor, session: &Session) -> (u8, Arc<str>, usize) {
    let k = if session.kind(&f.head) == TensorKind::Metric { 0 } else { 1 };
    (k, f.head.clone(), f.derivs.len())
}

/// Canonical form of a single term, or `None` when it vanishes.
pub fn canonicalize_term(term: &Term, session: &Session, opts: CanonOptions) -> Result<Option<Term>> {
    if term.coeff.is_zero() {
        return Ok(None);
    }
    let term = if opts.curvature_relations && session.curvature_relations {
        match curvature_relations(term, session) {
            Some(t) => t,
            None => return Ok(None),
        }
    } else {
        term.clone()
    };
    if term.factors.is_empty() {
        return Ok(Some(term));
    }
    Search::new(&term, session, opts)?.run()
}

/// Traces that are fixed by definition: metric traces, contracted curvature,
/// and derivatives of the metric.
pub fn curvature_relations(term: &Term, session: &Session) -> Option<Term> {
    let mut t = term.clone();
    loop {
        let mut changed = false;
        let mut k = 0;
        while k < t.factors.len() {
            let f = &t.factors[k];
            let kind = session.kind(&f.head);
            let trace = self_trace(&f.indices);
            match kind {
                TensorKind::Metric => {
                    if !f.derivs.is_empty() {
                        return None;
                    }
                    if trace.is_some() {
                        t.factors.remove(k);
                        t.coeff = &t.coeff * &session.dim_coeff();
                        changed = true;
                        continue;
                    }
                }
                TensorKind::Weyl if trace.is_some() => return None,
                TensorKind::Riemann => {
                    if let Some((i, j)) = trace {
                        let ix = &f.indices;
                        let r = Coeff::int(session.ricci_sign as i64);
                        let (sign, a, b) = match (i, j) {
                            (0, 1) | (2, 3) => return None,
                            (1, 3) => (1, 0, 2),
                            (0, 2) => (1, 1, 3),
                            (0, 3) => (-1, 1, 2),
                            (1, 2) => (-1, 0, 3),
                            _ => unreachable!(),
                        };
                        let ricci = session.curvature_head(TensorKind::Ricci)?;
                        let nf = Factor {
                            head: Arc::from(ricci),
                            indices: vec![ix[a].clone(), ix[b].clone()],
                            derivs: f.derivs.clone(),
                        };
                        t.factors[k] = nf;
                        t.coeff = &(&t.coeff * &r) * &Coeff::int(sign);
                        changed = true;
                        continue;
                    }
                }
                TensorKind::Ricci if trace.is_some() => {
                    let scalar = session.curvature_head(TensorKind::RicciScalar)?;
                    t.factors[k] = Factor {
                        head: Arc::from(scalar),
                        indices: vec![],
                        derivs: f.derivs.clone(),
                    };
                    changed = true;
                    continue;
                }
                _ => {}
            }
            k += 1;
        }
        if !changed {
            return Some(t);
        }
    }
}

fn self_trace(ix: &[Index]) -> Option<(usize, usize)> {
    for i in 0..ix.len() {
        for j in i + 1..ix.len() {
            if ix[i].label == ix[j].label {
                return Some((i, j));
            }
        }
    }
    None
}

type Tok = u64;

struct Slotted {
    /// Per slot: `Ok(token)` for frees, `Err(dummy id)` for dummies.
    slots: Vec<std::result::Result<Tok, u32>>,
    /// Variance of each slot, needed only when dummies may not be flipped.
    ups: Vec<bool>,
    group: Arc<Group>,
}

#[derive(Clone)]
struct State {
    used: u64,
    dmap: Vec<u32>,
    next: u32,
    sign: i8,
    choices: Vec<(usize, usize)>,
}

struct Search<'a> {
    term: &'a Term,
    factors: Vec<Slotted>,
    /// Positions in canonical order, each listing the candidate factors.
    positions: Vec<Vec<usize>>,
    ndummies: usize,
    flip_ok: bool,
    anonymous: bool,
    dummy_ids: HashMap<Label, u32>,
}

const UNSET: u32 = u32::MAX;

impl<'a> Search<'a> {
    fn new(term: &'a Term, session: &Session, opts: CanonOptions) -> Result<Self> {
        let mut count: HashMap<&Label, usize> = HashMap::new();
        for i in term.indices() {
            *count.entry(&i.label).or_default() += 1;
        }
        let mut frees: Vec<&Index> = term.indices().filter(|i| count[&i.label] == 1).collect();
        frees.sort_by(|a, b| free_cmp(a, b));
        let free_tok: HashMap<&Label, Tok> = frees
            .iter()
            .enumerate()
            .map(|(r, i)| (&i.label, if opts.anonymous_frees { 0 } else { r as Tok }))
            .collect();
        let nfree = frees.len() as Tok;
        let _ = nfree;
        let mut dummy_ids: HashMap<Label, u32> = HashMap::new();
        let mut factors = Vec::with_capacity(term.factors.len());
        for f in &term.factors {
            let group = if opts.slot_symmetries {
                session.factor_group(&f.head, f.derivs.len())?
            } else {
                Arc::new(Group::trivial(f.nslots()))
            };
            let mut slots = Vec::new();
            let mut ups = Vec::new();
            for ix in f.slots() {
                ups.push(ix.up);
                if count[&ix.label] == 1 {
                    slots.push(Ok(free_tok[&ix.label]));
                } else {
                    let n = dummy_ids.len() as u32;
                    let id = *dummy_ids.entry(ix.label.clone()).or_insert(n);
                    slots.push(Err(id));
                }
            }
            factors.push(Slotted { slots, ups, group });
        }
        let mut order: Vec<usize> = (0..term.factors.len()).collect();
        order.sort_by(|&a, &b| type_key(&term.factors[a], session).cmp(&type_key(&term.factors[b], session)));
        let positions = order
            .iter()
            .map(|&p| {
                let key = type_key(&term.factors[p], session);
                order
                    .iter()
                    .copied()
                    .filter(|&q| type_key(&term.factors[q], session) == key)
                    .collect()
            })
            .collect();
        assert!(term.factors.len() <= 64, "too many factors in one term");
        Ok(Search {
            term,
            factors,
            positions,
            ndummies: dummy_ids.len(),
            flip_ok: session.metric.is_some(),
            anonymous: opts.anonymous_frees,
            dummy_ids,
        })
    }

    fn run(&self) -> Result<Option<Term>> {
        if self.factors.iter().any(|f| f.group.contains_minus_identity) {
            return Ok(None);
        }
        let nfree_base: Tok = 1 << 32;
        let mut states = vec![State {
            used: 0,
            dmap: vec![UNSET; self.ndummies],
            next: 0,
            sign: 1,
            choices: Vec::new(),
        }];
        for pos in &self.positions {
            let mut best: Option<Vec<Tok>> = None;
            let mut next_states: Vec<State> = Vec::new();
            let mut seen: HashMap<(u64, Vec<u32>), i8> = HashMap::new();
            for st in &states {
                for &fi in pos {
                    if st.used & (1 << fi) != 0 {
                        continue;
                    }
                    let fac = &self.factors[fi];
                    for (gi, g) in fac.group.elements.iter().enumerate() {
                        let mut toks = Vec::with_capacity(fac.slots.len());
                        let mut dmap = st.dmap.clone();
                        let mut next = st.next;
                        for &src in &g.images {
                            let src = src as usize;
                            let tok = match fac.slots[src] {
                                Ok(t) => t,
                                Err(d) => {
                                    let d = d as usize;
                                    if dmap[d] == UNSET {
                                        dmap[d] = next;
                                        next += 1;
                                    }
                                    let base = nfree_base + 2 * dmap[d] as Tok;
                                    if self.flip_ok {
                                        base
                                    } else {
                                        base + if fac.ups[src] { 0 } else { 1 }
                                    }
                                }
                            };
                            toks.push(tok);
                        }
                        let ord = match &best {
                            None => Ordering::Less,
                            Some(b) => toks.cmp(b),
                        };
                        if ord == Ordering::Greater {
                            continue;
                        }
                        if ord == Ordering::Less {
                            best = Some(toks);
                            next_states.clear();
                            seen.clear();
                        }
                        let used = st.used | (1 << fi);
                        let sign = st.sign * g.sign;
                        let key = (used, dmap.clone());
                        if let Some(&s) = seen.get(&key) {
                            if s != sign && !self.anonymous {
                                return Ok(None);
                            }
                            continue;
                        }
                        seen.insert(key, sign);
                        let mut choices = st.choices.clone();
                        choices.push((fi, gi));
                        next_states.push(State {
                            used,
                            dmap,
                            next,
                            sign,
                            choices,
                        });
                    }
                }
            }
            states = next_states;
        }
        if !self.anonymous {
            let s0 = states[0].sign;
            if states.iter().any(|s| s.sign != s0) {
                return Ok(None);
            }
        }
        Ok(Some(self.rebuild(&states[0])))
    }

    fn rebuild(&self, st: &State) -> Term {
        let mut seen = vec![false; self.ndummies];
        let mut factors = Vec::with_capacity(st.choices.len());
        for &(fi, gi) in &st.choices {
            let orig = &self.term.factors[fi];
            let g = &self.factors[fi].group.elements[gi];
            let slots = g.apply(&orig.slots());
            let new_slots: Vec<Index> = slots
                .into_iter()
                .map(|ix| match self.dummy_ids.get(&ix.label) {
                    Some(&d) => {
                        let k = st.dmap[d as usize];
                        let up = if self.flip_ok { !seen[d as usize] } else { ix.up };
                        seen[d as usize] = true;
                        Index::dummy(k, up)
                    }
                    None => ix,
                })
                .collect();
            let mut f = orig.clone();
            f.set_slots(&new_slots);
            factors.push(f);
        }
        let coeff = if st.sign < 0 {
            -&self.term.coeff
        } else {
            self.term.coeff.clone()
        };
        Term { coeff, factors }
    }
}

/// Free index order: by label, then covariant before contravariant.
fn free_cmp(a: &Index, b: &Index) -> Ordering {
    a.label.cmp(&b.label).then(a.up.cmp(&b.up))
}
