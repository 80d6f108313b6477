use super::{Expr, Label, Session, Term};

/// Eliminates every metric that is contracted with another factor (or with
/// itself), raising and lowering the partner indices.
pub fn contract_metric(expr: &Expr, session: &Session) -> Expr {
    Expr::from_terms(expr.terms.iter().filter_map(|t| contract_term(t, session)))
}

fn contract_term(term: &Term, session: &Session) -> Option<Term> {
    let mut t = term.clone();
    'outer: loop {
        for m in 0..t.factors.len() {
            if !session.is_metric(&t.factors[m].head) {
                continue;
            }
            if !t.factors[m].derivs.is_empty() {
                return None;
            }
            let ix = t.factors[m].indices.clone();
            if ix[0].label == ix[1].label {
                t.factors.remove(m);
                t.coeff = &t.coeff * &session.dim_coeff();
                continue 'outer;
            }
            for (k, other) in [(0usize, 1usize), (1, 0)] {
                let this = &ix[k];
                if !matches!(this.label, Label::Dummy(_)) {
                    continue;
                }
                // locate the partner slot outside this metric
                let mut partner = None;
                for (fi, f) in t.factors.iter().enumerate() {
                    if fi == m {
                        continue;
                    }
                    for s in 0..f.nslots() {
                        if f.slot(s).label == this.label {
                            partner = Some((fi, s));
                        }
                    }
                }
                if let Some((fi, s)) = partner {
                    *t.factors[fi].slot_mut(s) = ix[other].clone();
                    t.factors.remove(m);
                    continue 'outer;
                }
            }
        }
        break;
    }
    if t.coeff.is_zero() {
        return None;
    }
    Some(t.renumber_dummies())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Dim, Printer};
    use std::sync::Arc;

    fn run(text: &str) -> String {
        let s = Session::standard(Dim::Sym(Arc::from("d")));
        let e = contract_metric(&parse(text, &s).unwrap(), &s);
        let e = crate::symm::canonicalize(&e, &s).unwrap();
        Printer::plain(&s).expr(&e)
    }

    #[test]
    fn raises_and_traces() {
        assert_eq!(run("g[a,c]*Ricci[-c,-b]"), "Ricci[a,-b]");
        assert_eq!(run("g[a,-a]"), "d");
        assert_eq!(run("g[b,d]*Riemann[-c,-b,-a,-d]"), "Ricci[-a,-c]");
        assert_eq!(run("g[a,b]*g[-b,-c]"), "g[a,-c]");
        assert_eq!(run("g[a,b]*g[-a,-b]"), "d");
        assert_eq!(run("g[a,b]*CD[-b][RicciScalar[]]"), "CD[a][RicciScalar[]]");
    }
}
