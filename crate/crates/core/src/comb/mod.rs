//! Enumerating tensor structures: contractions, index configurations,
//! ansätze, trace-free projections and dimensionally dependent identities.

mod configurations;
mod contractions;
mod ddis;
mod traceless;

pub use configurations::{index_configurations, make_ansatz};
pub use contractions::all_contractions;
pub use ddis::{construct_ddis, construct_ddis_capped, DDI_DIM_CAP};
pub use traceless::make_traceless;

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Index, Label, Session, Term};
use crate::symm::canon::term_order;
use crate::symm::{canonicalize, SymmetrySpec};

/// The one term of a monomial expression.
fn single_term(expr: &Expr, what: &str) -> Result<Term> {
    match expr.terms.as_slice() {
        [t] => Ok(t.clone()),
        _ => Err(Error::Invalid(format!("{} expects a single product of tensors", what))),
    }
}

/// Replaces each free label `frees[k]` by `frees[images[k]]`, carrying the
/// variance of the destination label along.
fn permute_frees(term: &Term, frees: &[Index], images: &[u32]) -> Term {
    let mut t = term.clone();
    for i in t.indices_mut() {
        if let Some(k) = frees.iter().position(|f| f.label == i.label) {
            *i = frees[images[k] as usize].clone();
        }
    }
    t
}

/// Sum of the signed images of `expr` under a symmetry of its free labels.
fn symmetrize_frees(expr: &Expr, frees: &[Index], sym: &SymmetrySpec, session: &Session) -> Result<Expr> {
    let group = session.group(sym)?;
    let mut terms = Vec::new();
    for g in &group.elements {
        for t in &expr.terms {
            let p = permute_frees(t, frees, &g.images);
            terms.push(if g.sign < 0 { p.scaled(&-crate::Coeff::one()) } else { p });
        }
    }
    canonicalize(&Expr::from_terms(terms), session)
}

/// Scales a canonical expression so that its leading term has coefficient one.
fn normalize(expr: Expr) -> Option<Expr> {
    let lead = expr.terms.first()?.coeff.clone();
    let inv = lead.recip()?;
    Some(expr.scale(&inv))
}

/// Orders a list of canonical expressions term by term and drops repeats.
fn sort_unique(mut list: Vec<Expr>, session: &Session) -> Vec<Expr> {
    list.sort_by(|a, b| expr_order(a, b, session));
    list.dedup();
    list
}

fn expr_order(a: &Expr, b: &Expr, session: &Session) -> Ordering {
    for (x, y) in a.terms.iter().zip(&b.terms) {
        let o = term_order(x, y, session).then_with(|| coeff_desc(&x.coeff, &y.coeff));
        if o != Ordering::Equal {
            return o;
        }
    }
    a.terms.len().cmp(&b.terms.len())
}

/// Larger rational coefficients first; symbolic ones are not ranked.
fn coeff_desc(a: &crate::Coeff, b: &crate::Coeff) -> Ordering {
    match (a.as_rational(), b.as_rational()) {
        (Some(x), Some(y)) => y.cmp(&x),
        _ => Ordering::Equal,
    }
}

/// Checks that the requested free indices are distinct names.
fn check_frees(frees: &[Index]) -> Result<()> {
    for (k, f) in frees.iter().enumerate() {
        if !matches!(f.label, Label::Name(_)) {
            return Err(Error::Invalid("free indices must be named".into()));
        }
        if frees[..k].iter().any(|g| g.label == f.label) {
            return Err(Error::Duplicate(f.to_string()));
        }
    }
    Ok(())
}

/// Removes the auxiliary tensor, handing each of its slots' requested free
/// index to the slot it was contracted with. Two auxiliary slots contracted
/// with each other become a metric.
fn strip_aux(t: &Term, aux: &str, frees: &[Index], session: &Session) -> Result<Term> {
    let mut t = t.clone();
    let pos = t
        .factors
        .iter()
        .position(|f| &*f.head == aux)
        .expect("auxiliary tensor present");
    let slots = t.factors.remove(pos).indices;
    for (k, s) in slots.iter().enumerate() {
        if let Some(l) = slots[..k].iter().position(|o| o.label == s.label) {
            let g = session
                .metric_name()
                .ok_or_else(|| Error::Invalid("a metric is needed to pair two free indices".into()))?;
            t.factors.push(Factor::new(g, vec![frees[l].clone(), frees[k].clone()]));
            continue;
        }
        if slots[k + 1..].iter().any(|o| o.label == s.label) {
            continue;
        }
        for i in t.indices_mut() {
            if i.label == s.label {
                *i = frees[k].clone();
            }
        }
    }
    Ok(t)
}
