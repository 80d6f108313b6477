use indexmap::IndexMap;
use rayon::prelude::*;

use crate::algebra::collect_tensors;
use crate::algebra::linear::rref;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Index, Label, Session, Term};
use crate::symm::{canonicalize, permutations};

use super::{normalize, permute_frees, sort_unique};

/// Subtracts from `expr` the combination of metric-dressed traces that makes
/// every trace over a pair of its free indices vanish.
///
/// The correction is sought in the span of all index configurations of the
/// expression's traces multiplied by metrics restoring the free indices; the
/// coefficients are rational functions of the dimension.
pub fn make_traceless(expr: &Expr, session: &Session) -> Result<Expr> {
    let g = session
        .metric_name()
        .ok_or_else(|| Error::Invalid("trace removal needs a metric".into()))?
        .to_string();
    let expr = canonicalize(expr, session)?;
    let frees = expr.free_indices()?;
    let n = frees.len();
    if n < 2 || expr.is_zero() {
        return Ok(expr);
    }
    if n > 8 {
        return Err(Error::Unsupported(format!("trace removal for {} free indices", n)));
    }

    let basis = trace_basis(&expr, &frees, &g, session)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();

    // One linear condition per (pair, resulting structure).
    let traces = |e: &Expr| -> Result<Vec<Expr>> {
        pairs
            .iter()
            .map(|&(i, j)| trace(e, &frees[i].label, &frees[j].label, session))
            .collect()
    };
    let own = traces(&expr)?;
    let cols: Vec<Vec<Expr>> = basis.par_iter().map(traces).collect::<Result<_>>()?;
    let m = basis.len();
    let mut rows: IndexMap<(usize, Vec<Factor>), Vec<Coeff>> = IndexMap::new();
    let mut put = |p: usize, e: &Expr, col: usize| {
        for t in &e.terms {
            let row = rows.entry((p, t.factors.clone())).or_insert_with(|| vec![Coeff::zero(); m + 1]);
            row[col] = &row[col] + &t.coeff;
        }
    };
    for (j, c) in cols.iter().enumerate() {
        for (p, e) in c.iter().enumerate() {
            put(p, e, j);
        }
    }
    for (p, e) in own.iter().enumerate() {
        put(p, e, m);
    }
    let r = rref(rows.into_values().collect(), m + 1);
    if r.pivots.contains(&m) {
        return Err(Error::Inconsistent(
            "no combination of traces removes every trace".into(),
        ));
    }
    let mut out = expr.clone();
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        out = out.add(&basis[p].scale(&-&row[m]));
    }
    canonicalize(&out, session)
}

/// All index configurations of the expression with `k >= 1` pairs of free
/// indices traced and the same pairs carried by metrics instead.
fn trace_basis(expr: &Expr, frees: &[Index], g: &str, session: &Session) -> Result<Vec<Expr>> {
    let n = frees.len();
    let mut seeds = Vec::new();
    for pairing in partial_pairings(n) {
        if pairing.is_empty() {
            continue;
        }
        let mut e = expr.clone();
        for &(i, j) in &pairing {
            e = e.try_map_terms(|t| Ok(Expr::from_term(trace_term(t, &frees[i].label, &frees[j].label))))?;
        }
        let metrics: Vec<Factor> = pairing
            .iter()
            .map(|&(i, j)| Factor::new(g, vec![frees[i].clone(), frees[j].clone()]))
            .collect();
        let e = e.mul(&Expr::from_term(Term::new(Coeff::one(), metrics)))?;
        let e = canonicalize(&e, session)?;
        if !e.is_zero() {
            seeds.push(e);
        }
    }
    let perms = permutations(n);
    let found: Vec<Vec<Expr>> = seeds
        .par_iter()
        .map(|e| {
            let mut v = Vec::new();
            for p in &perms {
                let q = Expr::from_terms(e.terms.iter().map(|t| permute_frees(t, frees, p)));
                if let Some(q) = normalize(canonicalize(&q, session)?) {
                    v.push(q);
                }
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    Ok(sort_unique(found.into_iter().flatten().collect(), session))
}

/// Sets of disjoint pairs from `0..n`, including the empty set.
fn partial_pairings(n: usize) -> Vec<Vec<(usize, usize)>> {
    fn go(start: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(cur.clone());
        let n = used.len();
        for i in start..n {
            if used[i] {
                continue;
            }
            for j in i + 1..n {
                if used[j] {
                    continue;
                }
                used[i] = true;
                used[j] = true;
                cur.push((i, j));
                go(i + 1, used, cur, out);
                cur.pop();
                used[i] = false;
                used[j] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(0, &mut vec![false; n], &mut Vec::new(), &mut out);
    out
}

/// Contracts the free labels `p` and `q` of a term with each other.
fn trace_term(t: &Term, p: &Label, q: &Label) -> Term {
    let mut t = t.clone();
    let k = t.next_dummy();
    for i in t.indices_mut() {
        if i.label == *p {
            *i = Index::dummy(k, true);
        } else if i.label == *q {
            *i = Index::dummy(k, false);
        }
    }
    t
}

fn trace(e: &Expr, p: &Label, q: &Label, session: &Session) -> Result<Expr> {
    collect_tensors(&Expr::from_terms(e.terms.iter().map(|t| trace_term(t, p, q))), session)
}
