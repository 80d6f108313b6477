use indexmap::IndexMap;

use crate::algebra::collect_tensors;
use crate::algebra::linear::rref;
use crate::symm::canon::term_order;
use crate::coeff::Coeff;
use crate::error::Result;
use crate::expr::{Expr, Factor, Index, Session, Term, TensorKind};
use crate::young::riemann_young_project;

use super::covds::{commute_adjacent, sort_covds};

const MAX_ROUNDS: usize = 50;

/// Rewrites divergences of curvature tensors taken by their innermost
/// derivative: `∇^d R_abcd` becomes derivatives of the Ricci tensor, and
/// `∇^a R_ab` becomes half the gradient of the scalar curvature.
pub fn apply_contracted_bianchi(expr: &Expr, session: &Session) -> Result<Expr> {
    let mut pending = expr.terms.clone();
    let mut out = Vec::new();
    while let Some(t) = pending.pop() {
        match bianchi_term(&t, session) {
            Some(e) => pending.extend(e.terms),
            None => out.push(t),
        }
    }
    collect_tensors(&Expr::from_terms(out), session)
}

/// Repeats Young projection of the Riemann tensors, contracted Bianchi
/// identities, derivative ordering and metric contraction until nothing
/// changes.
pub fn full_simplification(expr: &Expr, session: &Session) -> Result<Expr> {
    let mut cur = collect_tensors(expr, session)?;
    for _ in 0..MAX_ROUNDS {
        let mut e = reduce_cyclic(&cur, session)?;
        e = move_divergences_inward(&e, session)?;
        e = apply_contracted_bianchi(&e, session)?;
        e = sort_covds(&e, session)?;
        e = collect_tensors(&e, session)?;
        if e == cur {
            return Ok(e);
        }
        cur = e;
    }
    Ok(cur)
}

/// Rewrites Riemann monomials in a preferred basis modulo the cyclic identity.
///
/// Each monomial equals its Young projection, so `m - P(m) = 0` is an
/// identity. Collecting these over every monomial reachable by projection and
/// row-reducing them with the later monomials (in term order) as pivots
/// eliminates those in favour of the earlier ones.
fn reduce_cyclic(expr: &Expr, session: &Session) -> Result<Expr> {
    let key = |t: &Term| Term::new(Coeff::one(), t.factors.clone());
    let mut monos: IndexMap<Term, Expr> = IndexMap::new();
    let mut queue: Vec<Term> = expr.terms.iter().map(key).collect();
    while let Some(m) = queue.pop() {
        if monos.contains_key(&m) || monos.len() > 2000 {
            continue;
        }
        let p = riemann_young_project(&Expr::from_term(m.clone()), session)?;
        queue.extend(p.terms.iter().map(key).filter(|k| !monos.contains_key(k)));
        monos.insert(m, p);
    }
    let mut cols: Vec<Term> = monos.keys().cloned().collect();
    cols.sort_by(|a, b| term_order(b, a, session));
    let index: IndexMap<Term, usize> = cols.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let n = cols.len();
    let rows: Vec<Vec<Coeff>> = monos
        .iter()
        .map(|(m, p)| {
            let mut row = vec![Coeff::zero(); n];
            row[index[m]] = Coeff::one();
            for t in &p.terms {
                let c = index[&key(t)];
                row[c] = &row[c] - &t.coeff;
            }
            row
        })
        .collect();
    let r = rref(rows, n);
    let mut v = vec![Coeff::zero(); n];
    for t in &expr.terms {
        let c = index[&key(t)];
        v[c] = &v[c] + &t.coeff;
    }
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        if v[p].is_zero() {
            continue;
        }
        let f = v[p].clone();
        for (c, x) in row.iter().enumerate() {
            if !x.is_zero() {
                v[c] = &v[c] - &(&f * x);
            }
        }
    }
    let terms = cols
        .into_iter()
        .zip(v)
        .filter(|(_, c)| !c.is_zero())
        .map(|(t, c)| t.scaled(&c));
    collect_tensors(&Expr::from_terms(terms), session)
}

/// Commutes any derivative contracted with a slot of its own curvature
/// factor until it sits directly on the tensor.
fn move_divergences_inward(expr: &Expr, session: &Session) -> Result<Expr> {
    if session.derivs_commute() {
        return Ok(expr.clone());
    }
    let mut pending: Vec<Term> = expr.terms.clone();
    let mut done = Vec::new();
    let mut budget = 10_000usize;
    while let Some(t) = pending.pop() {
        budget = budget.saturating_sub(1);
        match outer_divergence(&t, session) {
            Some((fi, pos)) if budget > 0 => {
                pending.extend(commute_adjacent(&t, fi, pos, session)?.terms);
            }
            _ => done.push(t),
        }
    }
    collect_tensors(&Expr::from_terms(done), session)
}

/// A curvature factor with a non-innermost derivative contracted with one of
/// its own tensor slots, as (factor, position of that derivative).
fn outer_divergence(t: &Term, session: &Session) -> Option<(usize, usize)> {
    for (fi, f) in t.factors.iter().enumerate() {
        if !matches!(session.kind(&f.head), TensorKind::Riemann | TensorKind::Ricci) {
            continue;
        }
        let n = f.derivs.len();
        for pos in 0..n.saturating_sub(1) {
            let d = &f.derivs[pos];
            if d.is_dummy() && f.indices.iter().any(|i| i.label == d.label) {
                return Some((fi, pos));
            }
        }
    }
    None
}

fn bianchi_term(t: &Term, session: &Session) -> Option<Expr> {
    for (fi, f) in t.factors.iter().enumerate() {
        let Some(d) = f.derivs.last() else { continue };
        if !d.is_dummy() {
            continue;
        }
        let Some(j) = f.indices.iter().position(|i| i.label == d.label) else {
            continue;
        };
        let outer = &f.derivs[..f.derivs.len() - 1];
        let with_deriv = |head: &str, indices: Vec<Index>, d: &Index| {
            let mut g = Factor::new(head, indices);
            g.derivs = outer.to_vec();
            g.derivs.push(d.clone());
            g
        };
        let replace = |terms: Vec<(Coeff, Factor)>| {
            Expr::from_terms(terms.into_iter().map(|(c, g)| {
                let mut nt = t.clone();
                nt.factors[fi] = g;
                nt.coeff = &nt.coeff * &c;
                nt
            }))
        };
        match session.kind(&f.head) {
            TensorKind::Riemann => {
                let ricci = session.curvature_head(TensorKind::Ricci)?;
                let i = &f.indices;
                // bring the contracted slot to the last position
                let ((a, b, c), sign) = match j {
                    3 => ((&i[0], &i[1], &i[2]), 1),
                    2 => ((&i[0], &i[1], &i[3]), -1),
                    1 => ((&i[2], &i[3], &i[0]), 1),
                    _ => ((&i[2], &i[3], &i[1]), -1),
                };
                // ∇^d R_abcd = r (∇_b R_ac - ∇_a R_bc)
                let k = Coeff::int(sign * session.ricci_sign as i64);
                return Some(replace(vec![
                    (k.clone(), with_deriv(ricci, vec![a.clone(), c.clone()], b)),
                    (-&k, with_deriv(ricci, vec![b.clone(), c.clone()], a)),
                ]));
            }
            TensorKind::Ricci => {
                let scalar = session.curvature_head(TensorKind::RicciScalar)?;
                let other = &f.indices[1 - j];
                return Some(replace(vec![(Coeff::ratio(1, 2), with_deriv(scalar, vec![], other))]));
            }
            _ => {}
        }
    }
    None
}
