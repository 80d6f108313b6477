use std::sync::Arc;

use indexmap::IndexSet;
use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Index, Label, Session, Term, TensorKind};
use crate::symm::canon::{canonicalize_term, CanonOptions};
use crate::symm::{canonicalize, SymmetrySpec};

use super::{check_frees, normalize, single_term, sort_unique, strip_aux, symmetrize_frees};

/// All independent ways of contracting the open indices of `expr` so that
/// exactly `frees` remain, optionally projected onto a symmetry of the frees.
///
/// The frees are carried by an auxiliary tensor whose slots take part in the
/// contractions like any other open slot. Contractions are added one pair at a
/// time and partial results are deduplicated by their pattern alone, with the
/// still-open slots treated as interchangeable.
pub fn all_contractions(
    expr: &Expr,
    frees: &[Index],
    sym: Option<&SymmetrySpec>,
    session: &Session,
) -> Result<Vec<Expr>> {
    check_frees(frees)?;
    let n = frees.len();
    if let Some(s) = sym {
        if s.n != n {
            return Err(Error::RankMismatch {
                head: "free-index symmetry".into(),
                expected: n,
                got: s.n,
            });
        }
    }
    let mut term = single_term(expr, "all_contractions")?;
    term.coeff = Coeff::one();

    let aux = session.fresh_tensor_name("Aux");
    let work = if n == 0 {
        session.clone()
    } else {
        let spec = sym.cloned().unwrap_or_else(|| SymmetrySpec::none(n));
        let w = session.with_tensor(&aux, n, spec, TensorKind::Aux)?;
        let slots = frees
            .iter()
            .enumerate()
            .map(|(k, f)| Index::new(&format!("·{}", k), !f.up))
            .collect();
        term.factors.push(Factor::new(&aux, slots));
        w
    };
    let open = term.free_indices().len();
    if open % 2 != 0 {
        return Err(Error::Invalid(format!(
            "{} open indices cannot be paired to leave {} free",
            open - n,
            n
        )));
    }
    let has_metric = session.metric_name().is_some();
    let anon = CanonOptions {
        anonymous_frees: true,
        ..Default::default()
    };

    let mut layer: Vec<Term> = match canonicalize_term(&term, &work, anon)? {
        Some(t) => vec![pattern_key(t, has_metric)],
        None => Vec::new(),
    };
    for _ in 0..open / 2 {
        let next: Vec<Vec<Term>> = layer
            .par_iter()
            .map(|t| {
                let mut out = Vec::new();
                for c in single_contractions(t, has_metric) {
                    if let Some(c) = canonicalize_term(&c, &work, anon)? {
                        out.push(pattern_key(c, has_metric));
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;
        let set: IndexSet<Term> = next.into_iter().flatten().collect();
        layer = set.into_iter().collect();
    }

    let mut results = Vec::new();
    for t in layer {
        let Some(t) = canonicalize_term(&t, &work, CanonOptions::default())? else {
            continue;
        };
        let stripped = if n == 0 { t } else { strip_aux(&t, &aux, frees, session)? };
        let e = Expr::from_term(stripped);
        let e = match sym {
            Some(s) => symmetrize_frees(&e, frees, s, session)?,
            None => canonicalize(&e, session)?,
        };
        if let Some(e) = normalize(e) {
            results.push(e);
        }
    }
    Ok(sort_unique(results, session))
}

/// A contraction pattern with its remaining free slots renamed in slot order,
/// so that patterns differing only in free labels coincide.
fn pattern_key(mut t: Term, has_metric: bool) -> Term {
    t.coeff = Coeff::one();
    let mut k = 0;
    for f in &mut t.factors {
        for s in 0..f.nslots() {
            let i = f.slot_mut(s);
            if matches!(i.label, Label::Name(_)) {
                i.label = Label::Name(Arc::from(format!("·{}", k).as_str()));
                if has_metric {
                    i.up = true;
                }
                k += 1;
            }
        }
    }
    t
}

/// Every way of contracting one pair of open slots.
fn single_contractions(t: &Term, has_metric: bool) -> Vec<Term> {
    let mut open = Vec::new();
    for (fi, f) in t.factors.iter().enumerate() {
        for s in 0..f.nslots() {
            if matches!(f.slot(s).label, Label::Name(_)) {
                open.push((fi, s));
            }
        }
    }
    let dummy = t.next_dummy();
    let mut out = Vec::new();
    for a in 0..open.len() {
        for b in a + 1..open.len() {
            let (fa, sa) = open[a];
            let (fb, sb) = open[b];
            let (ua, ub) = (t.factors[fa].slot(sa).up, t.factors[fb].slot(sb).up);
            if !has_metric && ua == ub {
                continue;
            }
            let mut c = t.clone();
            let (va, vb) = if has_metric { (true, false) } else { (ua, ub) };
            *c.factors[fa].slot_mut(sa) = Index::dummy(dummy, va);
            *c.factors[fb].slot_mut(sb) = Index::dummy(dummy, vb);
            out.push(c);
        }
    }
    out
}
