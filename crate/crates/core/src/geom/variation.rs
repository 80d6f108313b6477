use crate::algebra::collect_tensors;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{covd, Expr, Factor, Index, Label, Session, Term, TensorKind, PERTURBATION};
use crate::symm::canonicalize;

use super::metric_name;

/// First-order variation of `expr` under `g_ab -> g_ab + h_ab`, collected.
pub fn vary_metric(expr: &Expr, session: &Session) -> Result<Expr> {
    collect_tensors(&linearize(expr, session)?, session)
}

/// Variational derivative with respect to `target` (the metric with two
/// lower indices, or any other declared field), after integrating by parts.
///
/// The result carries the target's labels with opposite variance and is
/// projected onto the target's symmetry. Metrics produced by the variation
/// are kept explicit; only Kronecker deltas are absorbed.
pub fn var_d(expr: &Expr, target: &Factor, session: &Session) -> Result<Expr> {
    let g = metric_name(session)?;
    if !target.derivs.is_empty() || target.indices.iter().any(|i| !matches!(i.label, Label::Name(_))) {
        return Err(Error::Invalid("vary with respect to a tensor carrying plain index names".into()));
    }
    let info = session
        .tensor(&target.head)
        .ok_or_else(|| Error::UndeclaredHead(target.head.to_string()))?;
    if info.rank != target.indices.len() {
        return Err(Error::RankMismatch {
            head: target.head.to_string(),
            expected: info.rank,
            got: target.indices.len(),
        });
    }
    for t in &expr.terms {
        for i in t.indices() {
            if target.indices.iter().any(|x| x.label == i.label) {
                return Err(Error::Duplicate(i.to_string()));
            }
        }
    }
    let (marked, sym) = if session.is_metric(&target.head) {
        if target.indices.iter().any(|i| i.up) {
            return Err(Error::Unsupported("variation with respect to the inverse metric".into()));
        }
        let lin = linearize(expr, session)?;
        let pairs: Vec<(Term, usize)> = lin
            .terms
            .into_iter()
            .filter_map(|t| {
                let k = t.factors.iter().position(|f| &*f.head == PERTURBATION)?;
                Some((t, k))
            })
            .collect();
        let sym = session.tensor(PERTURBATION).map(|i| i.sym.clone()).unwrap_or(info.sym.clone());
        (pairs, sym)
    } else {
        let mut pairs = Vec::new();
        for t in &expr.terms {
            for (k, f) in t.factors.iter().enumerate() {
                if f.head == target.head {
                    pairs.push((t.clone(), k));
                }
            }
        }
        (pairs, info.sym.clone())
    };

    let flipped: Vec<Index> = target.indices.iter().map(Index::flipped).collect();
    let mut out = Vec::new();
    for (t, k) in marked {
        let mut rest = t.clone();
        let f = rest.factors.remove(k);
        // move every derivative off the varied field, outermost first
        let mut a = Expr::from_term(rest);
        for d in &f.derivs {
            a = covd(&a, d)?;
        }
        if f.derivs.len() % 2 == 1 {
            a = a.neg();
        }
        let deltas: Vec<Factor> = f
            .indices
            .iter()
            .zip(&flipped)
            .map(|(s, t)| Factor::new(&g, vec![s.clone(), t.clone()]))
            .collect();
        for mut term in a.terms {
            term.factors.extend(deltas.iter().cloned());
            out.push(absorb_deltas(term, &g));
        }
    }

    // project onto the symmetry of the varied field
    let group = session.group(&sym)?;
    let weight = Coeff::ratio(1, group.order() as i64);
    let mut terms = Vec::new();
    for p in &group.elements {
        let map = flipped
            .iter()
            .enumerate()
            .map(|(k, i)| (i.name().unwrap().into(), flipped[p.images[k] as usize].clone()))
            .collect::<Vec<(std::sync::Arc<str>, Index)>>();
        let c = if p.sign < 0 { -&weight } else { weight.clone() };
        for t in &out {
            let mut nt = t.scaled(&c);
            for i in nt.indices_mut() {
                if let Label::Name(n) = &i.label {
                    if let Some((_, r)) = map.iter().find(|(m, _)| m == n) {
                        *i = r.clone();
                    }
                }
            }
            terms.push(nt);
        }
    }
    canonicalize(&Expr::from_terms(terms), session)
}

/// `(1/√|g|) δ(√|g| L)/δg_ab` for a scalar `L`.
pub fn var_l(expr: &Expr, target: &Factor, session: &Session) -> Result<Expr> {
    if !session.is_metric(&target.head) {
        return Err(Error::Invalid("the Lagrangian variation is taken with respect to the metric".into()));
    }
    if !expr.free_indices()?.is_empty() {
        return Err(Error::Invalid("the Lagrangian must be a scalar".into()));
    }
    let g = metric_name(session)?;
    let inv: Vec<Index> = target.indices.iter().map(Index::flipped).collect();
    let weight = Expr::factor(Factor::new(&g, inv)).mul(expr)?.scale(&Coeff::ratio(1, 2));
    canonicalize(&var_d(expr, target, session)?.add(&weight), session)
}

/// Removes mixed-variance metrics that contract a dummy, renaming its partner.
fn absorb_deltas(mut t: Term, g: &str) -> Term {
    'outer: loop {
        for m in 0..t.factors.len() {
            let f = &t.factors[m];
            if *f.head != *g || !f.derivs.is_empty() || f.indices[0].up == f.indices[1].up {
                continue;
            }
            for (x, y) in [(0, 1), (1, 0)] {
                let (dx, other) = (f.indices[x].clone(), f.indices[y].clone());
                if !dx.is_dummy() {
                    continue;
                }
                let elsewhere = t
                    .factors
                    .iter()
                    .enumerate()
                    .any(|(j, h)| j != m && h.all_indices().any(|i| i.label == dx.label));
                if !elsewhere {
                    continue;
                }
                t.factors.remove(m);
                for i in t.indices_mut() {
                    if i.label == dx.label {
                        *i = other.clone();
                    }
                }
                continue 'outer;
            }
        }
        return t;
    }
}

/// Variation before collection: each factor varied in turn, with every slot
/// first brought to its metric-independent position.
fn linearize(expr: &Expr, session: &Session) -> Result<Expr> {
    let g = metric_name(session)?;
    let mut out = Vec::new();
    for t in &expr.terms {
        let t = to_natural(t, &g, session)?;
        let mut cx = Ctx {
            session,
            g: g.clone(),
            next: t.next_dummy(),
        };
        for k in 0..t.factors.len() {
            let d = cx.delta_factor(&t.factors[k])?;
            let mut others = t.factors.clone();
            others.remove(k);
            for dt in d.terms {
                let mut factors = others.clone();
                factors.extend(dt.factors);
                out.push(Term::new(&t.coeff * &dt.coeff, factors));
            }
        }
    }
    Ok(Expr::from_terms(out))
}

/// Slot variances in which a head does not depend on the metric.
fn natural(f: &Factor, session: &Session) -> Result<Option<Vec<bool>>> {
    let kind = session.kind(&f.head);
    let idx = match kind {
        TensorKind::Metric | TensorKind::Perturbation => return Ok(None),
        TensorKind::Weyl => {
            return Err(Error::Unsupported(
                "varying the Weyl tensor; rewrite it in terms of the Riemann tensor first".into(),
            ))
        }
        TensorKind::Riemann => vec![false, false, false, true],
        _ => vec![false; f.indices.len()],
    };
    let mut v = idx;
    v.extend(std::iter::repeat_n(false, f.derivs.len()));
    Ok(Some(v))
}

/// Inserts metrics so that every factor carries its natural variances.
fn to_natural(t: &Term, g: &str, session: &Session) -> Result<Term> {
    let mut t = t.clone();
    let mut next = t.next_dummy();
    let mut metrics = Vec::new();
    for f in &mut t.factors {
        let Some(want) = natural(f, session)? else {
            continue;
        };
        let n = f.indices.len();
        for (s, &up) in want.iter().enumerate() {
            let slot = if s < n { &mut f.indices[s] } else { &mut f.derivs[s - n] };
            if slot.up != up {
                let orig = slot.clone();
                *slot = Index::dummy(next, up);
                metrics.push(Factor::new(g, vec![orig, Index::dummy(next, !up)]));
                next += 1;
            }
        }
    }
    t.factors.extend(metrics);
    Ok(t)
}

struct Ctx<'a> {
    session: &'a Session,
    g: String,
    next: u32,
}

impl Ctx<'_> {
    fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next - 1
    }

    fn h(&self, a: Index, b: Index, derivs: Vec<Index>) -> Factor {
        let mut f = Factor::new(PERTURBATION, vec![a, b]);
        f.derivs = derivs;
        f
    }

    /// `δΓ^e_ab = ½ g^ef (∇_a h_fb + ∇_b h_fa - ∇_f h_ab)`.
    fn delta_gamma(&mut self, e: &Index, a: &Index, b: &Index) -> Expr {
        let f = self.fresh();
        let g = Factor::new(&self.g, vec![e.clone(), Index::dummy(f, true)]);
        let fd = Index::dummy(f, false);
        let half = Coeff::ratio(1, 2);
        Expr::from_terms([
            Term::new(half.clone(), vec![g.clone(), self.h(fd.clone(), b.clone(), vec![a.clone()])]),
            Term::new(half.clone(), vec![g.clone(), self.h(fd.clone(), a.clone(), vec![b.clone()])]),
            Term::new(-&half, vec![g, self.h(a.clone(), b.clone(), vec![fd])]),
        ])
    }

    /// `δR_abc^d = s (∇_b δΓ^d_ac - ∇_a δΓ^d_bc)`.
    fn delta_riemann(&mut self, ix: &[Index]) -> Result<Expr> {
        let s = Coeff::int(self.session.riemann_sign as i64);
        let (a, b, c, d) = (&ix[0], &ix[1], &ix[2], &ix[3]);
        let t1 = covd(&self.delta_gamma(d, a, c), b)?;
        let t2 = covd(&self.delta_gamma(d, b, c), a)?;
        Ok(t1.sub(&t2).scale(&s))
    }

    /// `δR_ac = r δR_abc^b`.
    fn delta_ricci(&mut self, ix: &[Index]) -> Result<Expr> {
        let r = Coeff::int(self.session.ricci_sign as i64);
        let b = self.fresh();
        let e = self.delta_riemann(&[ix[0].clone(), Index::dummy(b, false), ix[1].clone(), Index::dummy(b, true)])?;
        Ok(e.scale(&r))
    }

    /// `δR = -g^ae g^cf h_ef R_ac + g^ac δR_ac`.
    fn delta_scalar(&mut self) -> Result<Expr> {
        let ricci = self
            .session
            .curvature_head(TensorKind::Ricci)
            .ok_or_else(|| Error::UndeclaredHead("Ricci".into()))?
            .to_string();
        let (a, c, e, f) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
        let first = Term::new(
            -Coeff::one(),
            vec![
                Factor::new(&self.g, vec![Index::dummy(a, true), Index::dummy(e, true)]),
                Factor::new(&self.g, vec![Index::dummy(c, true), Index::dummy(f, true)]),
                self.h(Index::dummy(e, false), Index::dummy(f, false), vec![]),
                Factor::new(&ricci, vec![Index::dummy(a, false), Index::dummy(c, false)]),
            ],
        );
        let g = Factor::new(&self.g, vec![Index::dummy(a, true), Index::dummy(c, true)]);
        let dr = self.delta_ricci(&[Index::dummy(a, false), Index::dummy(c, false)])?;
        let mut out = vec![first];
        out.extend(dr.terms.into_iter().map(|mut t| {
            t.factors.push(g.clone());
            t
        }));
        Ok(Expr::from_terms(out))
    }

    fn delta_factor(&mut self, f: &Factor) -> Result<Expr> {
        if f.derivs.is_empty() {
            return match self.session.kind(&f.head) {
                TensorKind::Metric => {
                    let (x, y) = (&f.indices[0], &f.indices[1]);
                    Ok(match (x.up, y.up) {
                        (false, false) => Expr::factor(self.h(x.clone(), y.clone(), vec![])),
                        (true, true) => Expr::factor(self.h(x.clone(), y.clone(), vec![])).neg(),
                        _ => Expr::zero(),
                    })
                }
                TensorKind::Riemann => self.delta_riemann(&f.indices),
                TensorKind::Ricci => self.delta_ricci(&f.indices),
                TensorKind::RicciScalar => self.delta_scalar(),
                TensorKind::Weyl => Err(Error::Unsupported("varying the Weyl tensor".into())),
                _ => Ok(Expr::zero()),
            };
        }
        if self.session.kind(&f.head) == TensorKind::Metric {
            return Ok(Expr::zero());
        }
        let d = f.derivs[0].clone();
        let mut inner = f.clone();
        inner.derivs.remove(0);
        let mut out = covd(&self.delta_factor(&inner)?, &d)?;
        // connection terms of the outermost derivative
        for (j, slot) in inner.slots().into_iter().enumerate() {
            let e = self.fresh();
            let mut x = inner.clone();
            let (gamma, sign) = if slot.up {
                *x.slot_mut(j) = Index::dummy(e, true);
                (self.delta_gamma(&slot, &d, &Index::dummy(e, false)), Coeff::one())
            } else {
                *x.slot_mut(j) = Index::dummy(e, false);
                (self.delta_gamma(&Index::dummy(e, true), &d, &slot), -Coeff::one())
            };
            for mut t in gamma.terms {
                t.factors.push(x.clone());
                t.coeff = &t.coeff * &sign;
                out.terms.push(t);
            }
        }
        Ok(out)
    }
}
