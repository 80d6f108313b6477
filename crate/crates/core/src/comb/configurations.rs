use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, Index, Session, Term};
use crate::symm::{canonicalize, permutations};

use super::{normalize, permute_frees, single_term, sort_unique};

/// Every distinct placement of the free labels of a product over its free
/// slots, up to sign.
pub fn index_configurations(expr: &Expr, session: &Session) -> Result<Vec<Expr>> {
    let mut term = single_term(expr, "index_configurations")?;
    term.coeff = Coeff::one();
    let frees = term.free_indices();
    if frees.len() > 10 {
        return Err(Error::Unsupported(format!(
            "{} free indices are too many to permute",
            frees.len()
        )));
    }
    let found: Vec<Option<Expr>> = permutations(frees.len())
        .par_iter()
        .map(|p| {
            let e = Expr::from_term(permute_frees(&term, &frees, p));
            Ok(normalize(canonicalize(&e, session)?))
        })
        .collect::<Result<_>>()?;
    Ok(sort_unique(found.into_iter().flatten().collect(), session))
}

/// `C1*e1 + C2*e2 + ...` with fresh constants registered in the session.
pub fn make_ansatz(exprs: &[Expr], session: &mut Session) -> Result<Expr> {
    let free_set = |e: &Expr| -> Result<BTreeSet<Index>> { Ok(e.free_indices()?.into_iter().collect()) };
    let mut out = Expr::zero();
    let mut first: Option<BTreeSet<Index>> = None;
    for e in exprs {
        let f = free_set(e)?;
        match &first {
            None => first = Some(f),
            Some(g) if *g != f => return Err(Error::InhomogeneousFrees(show(g), show(&f))),
            _ => {}
        }
        let c = session.fresh_constant();
        out = out.add(&e.map_terms(|t: &Term| Expr::from_term(t.scaled(&Coeff::var(&c)))));
    }
    Ok(out)
}

fn show(s: &BTreeSet<Index>) -> String {
    let v: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", v.join(","))
}
