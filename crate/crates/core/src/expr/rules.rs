//! Replacement rules: a product of factors rewritten as an expression.

use std::collections::HashMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};

use super::{Expr, Factor, Label, Printer, Session, Term};

/// `pattern -> template / divisor`.
///
/// Named labels in the pattern are placeholders bound to whatever indices sit
/// in the matched slots; the template uses the same names. Pattern labels that
/// occur twice are contractions and only match contractions.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub pattern: Vec<Factor>,
    pub template: Expr,
    /// Scalar factors dividing the template (for solutions like `g^{ab} -> 2 R^{ab} / R`).
    pub divisor: Vec<Factor>,
    /// Match every slot arrangement related by the factors' symmetries.
    pub use_symmetries: bool,
    /// Match any variance placement, raising or lowering in the template.
    pub metric_on_all: bool,
}

impl Rule {
    pub fn new(pattern: Vec<Factor>, template: Expr) -> Self {
        Rule {
            pattern,
            template,
            divisor: Vec::new(),
            use_symmetries: true,
            metric_on_all: true,
        }
    }

    pub fn display(&self, session: &Session) -> String {
        let p = Printer::plain(session);
        let pat = p.term(&Term::new(Coeff::one(), self.pattern.clone()));
        let mut rhs = p.expr(&self.template);
        if !self.divisor.is_empty() {
            let div = p.term(&Term::new(Coeff::one(), self.divisor.clone()));
            rhs = format!("({})/({})", rhs, div);
        }
        format!("{} -> {}", pat, rhs)
    }
}

#[derive(Clone)]
struct Binding {
    /// pattern label -> (term label, variance flipped)
    map: HashMap<Label, (Label, bool)>,
    used: Vec<usize>,
    sign: i8,
}

fn match_factor(
    pat: &Factor,
    fac: &Factor,
    rule: &Rule,
    session: &Session,
    b: &Binding,
    out: &mut Vec<Binding>,
) -> Result<()> {
    if pat.head != fac.head || pat.derivs.len() != fac.derivs.len() {
        return Ok(());
    }
    let slots = fac.slots();
    let pslots = pat.slots();
    let group = if rule.use_symmetries {
        Some(session.factor_group(&fac.head, fac.derivs.len())?)
    } else {
        None
    };
    let identity = [crate::symm::SignedPerm::identity(slots.len())];
    let elems = match &group {
        Some(g) => &g.elements[..],
        None => &identity[..],
    };
    'elem: for g in elems {
        let perm = g.apply(&slots);
        let mut nb = b.clone();
        for (p, q) in pslots.iter().zip(&perm) {
            let flip = p.up != q.up;
            let is_pattern_dummy = pattern_count(&rule.pattern, &p.label) == 2;
            if flip && !rule.metric_on_all && !is_pattern_dummy {
                continue 'elem;
            }
            match nb.map.get(&p.label) {
                Some((l, f)) => {
                    if *l != q.label || *f != flip {
                        continue 'elem;
                    }
                }
                None => {
                    nb.map.insert(p.label.clone(), (q.label.clone(), flip));
                }
            }
        }
        nb.sign *= g.sign;
        out.push(nb);
    }
    Ok(())
}

fn pattern_count(pattern: &[Factor], l: &Label) -> usize {
    pattern.iter().flat_map(|f| f.all_indices()).filter(|i| i.label == *l).count()
}

fn find_matches(term: &Term, rule: &Rule, session: &Session) -> Result<Option<Binding>> {
    let mut states = vec![Binding {
        map: HashMap::new(),
        used: Vec::new(),
        sign: 1,
    }];
    for pat in &rule.pattern {
        let mut next = Vec::new();
        for st in &states {
            for (fi, fac) in term.factors.iter().enumerate() {
                if st.used.contains(&fi) {
                    continue;
                }
                let mut found = Vec::new();
                match_factor(pat, fac, rule, session, st, &mut found)?;
                for mut b in found {
                    b.used.push(fi);
                    next.push(b);
                }
            }
        }
        states = next;
        if states.is_empty() {
            return Ok(None);
        }
    }
    // a pattern dummy must land on a term contraction
    for st in states {
        let ok = st.map.iter().all(|(pl, (tl, _))| {
            if pattern_count(&rule.pattern, pl) != 2 {
                return true;
            }
            st.map.iter().filter(|(_, (l, _))| l == tl).count() == 1
        });
        if ok {
            return Ok(Some(st));
        }
    }
    Ok(None)
}

fn apply(term: &Term, rule: &Rule, b: &Binding) -> Result<Expr> {
    if !rule.divisor.is_empty() {
        return Err(Error::Unsupported(
            "rules that divide by a tensor cannot be substituted".into(),
        ));
    }
    let mut rest = term.clone();
    let mut used = b.used.clone();
    used.sort_unstable();
    for &k in used.iter().rev() {
        rest.factors.remove(k);
    }
    rest.coeff = if b.sign < 0 { -&rest.coeff } else { rest.coeff };
    let shift = term.next_dummy();
    let mut out = Vec::new();
    for t in &rule.template.terms {
        let mut nt = t.clone();
        nt.shift_dummies(shift);
        for ix in nt.indices_mut() {
            if let Label::Name(_) = ix.label {
                if let Some((l, flip)) = b.map.get(&ix.label) {
                    ix.label = l.clone();
                    if *flip {
                        ix.up = !ix.up;
                    }
                }
            }
        }
        let mut combined = rest.clone();
        combined.coeff = &combined.coeff * &nt.coeff;
        combined.factors.extend(nt.factors);
        out.push(combined.normalize_labels()?);
    }
    Ok(Expr::from_terms(out))
}

/// Applies the first matching rule to each term, once.
pub fn replace(expr: &Expr, rules: &[Rule], session: &Session) -> Result<Expr> {
    let mut out = Expr::zero();
    'term: for t in &expr.terms {
        for r in rules {
            if let Some(b) = find_matches(t, r, session)? {
                out.terms.extend(apply(t, r, &b)?.terms);
                continue 'term;
            }
        }
        out.terms.push(t.clone());
    }
    Ok(out)
}
