use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{covd, Expr, Factor, Index, Label, Printer, Session, Term, TensorKind};
use crate::symm::canonicalize;

const MAX_ROUNDS: usize = 200;

/// Exchanges the derivatives at positions `pos` and `pos + 1` (counted from
/// the outermost) on factor `fi` of `term`.
///
/// The result equals `term`: its first term is the swapped product, the rest
/// is the commutator written with the Riemann tensor. Nothing is simplified.
pub fn commute_adjacent(term: &Term, fi: usize, pos: usize, session: &Session) -> Result<Expr> {
    let f = &term.factors[fi];
    if pos + 1 >= f.derivs.len() {
        return Err(Error::Invalid(format!("no derivative pair at position {}", pos)));
    }
    let mut swapped = term.clone();
    swapped.factors[fi].derivs.swap(pos, pos + 1);
    let mut out = vec![swapped];
    if session.derivs_commute() {
        return Ok(Expr::from_terms(out));
    }
    let riemann = session
        .curvature_head(TensorKind::Riemann)
        .ok_or_else(|| Error::UndeclaredHead("Riemann".into()))?
        .to_string();
    let s = Coeff::int(session.riemann_sign as i64);

    let (x, y) = (f.derivs[pos].clone(), f.derivs[pos + 1].clone());
    let mut inner = f.clone();
    inner.derivs.drain(..pos + 2);
    let outer = &f.derivs[..pos];

    let mut next = term.next_dummy();
    let mut comm = Vec::new();
    for (j, slot) in inner.slots().into_iter().enumerate() {
        let e = next;
        next += 1;
        let mut xs = inner.clone();
        let (r, c) = if slot.up {
            // [∇x, ∇y] V^s = -s R_{xye}^s V^e
            *xs.slot_mut(j) = Index::dummy(e, true);
            let r = Factor::new(&riemann, vec![x.clone(), y.clone(), Index::dummy(e, false), slot.clone()]);
            (r, -&s)
        } else {
            // [∇x, ∇y] T_s = s R_{xys}^e T_e
            *xs.slot_mut(j) = Index::dummy(e, false);
            let r = Factor::new(&riemann, vec![x.clone(), y.clone(), slot.clone(), Index::dummy(e, true)]);
            (r, s.clone())
        };
        comm.push(Term::new(c, vec![r, xs]));
    }
    let mut comm = Expr::from_terms(comm);
    for d in outer.iter().rev() {
        comm = covd(&comm, d)?;
    }
    let mut rest = term.clone();
    rest.factors.remove(fi);
    for t in comm.terms {
        let mut factors = rest.factors.clone();
        factors.extend(t.factors);
        out.push(Term::new(&rest.coeff * &t.coeff, factors));
    }
    Ok(Expr::from_terms(out))
}

/// Reorders covariant derivatives so that, read from the outside in, their
/// printed labels descend. Each exchange adds the Riemann commutator terms.
/// Derivatives on a flat metric already commute and are left to the
/// canonicalizer.
pub fn sort_covds(expr: &Expr, session: &Session) -> Result<Expr> {
    let mut work = canonicalize(expr, session)?;
    if session.derivs_commute() {
        return Ok(work);
    }
    for _ in 0..MAX_ROUNDS {
        let mut changed = false;
        let mut terms = Vec::new();
        for t in &work.terms {
            match sort_step(t, session)? {
                Some(e) => {
                    changed = true;
                    terms.extend(e.terms);
                }
                None => terms.push(t.clone()),
            }
        }
        if !changed {
            return Ok(work);
        }
        work = canonicalize(&Expr::from_terms(terms), session)?;
    }
    Err(Error::Unsupported("derivative ordering did not settle".into()))
}

/// One exchange that strictly reduces the number of misordered derivative
/// pairs, if such an exchange exists.
fn sort_step(t: &Term, session: &Session) -> Result<Option<Expr>> {
    let before = inversions(t, session);
    if before == 0 {
        return Ok(None);
    }
    let letters = labels(t, session);
    for (fi, f) in t.factors.iter().enumerate() {
        for pos in 0..f.derivs.len().saturating_sub(1) {
            if letters[fi][pos] >= letters[fi][pos + 1] {
                continue;
            }
            let e = commute_adjacent(t, fi, pos, session)?;
            let main = canonicalize(&Expr::from_term(e.terms[0].clone()), session)?;
            let better = match main.terms.first() {
                Some(m) => inversions(m, session) < before,
                None => true,
            };
            if better {
                return Ok(Some(e));
            }
        }
    }
    Ok(None)
}

/// Printed labels of every factor's derivatives, outermost first.
fn labels(t: &Term, session: &Session) -> Vec<Vec<String>> {
    let names = Printer::plain(session).dummy_names(t);
    t.factors
        .iter()
        .map(|f| {
            f.derivs
                .iter()
                .map(|i| match &i.label {
                    Label::Name(n) => n.to_string(),
                    Label::Dummy(k) => names.get(k).cloned().unwrap_or_default(),
                })
                .collect()
        })
        .collect()
}

fn inversions(t: &Term, session: &Session) -> usize {
    labels(t, session)
        .iter()
        .map(|v| {
            (0..v.len())
                .flat_map(|k| (k + 1..v.len()).map(move |l| (k, l)))
                .filter(|&(k, l)| v[k] < v[l])
                .count()
        })
        .sum()
}
