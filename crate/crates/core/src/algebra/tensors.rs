use std::cmp::Ordering;

use indexmap::IndexMap;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{replace, Expr, Factor, Label, Rule, Session, Term, TensorKind};
use crate::symm::canon::term_order;

use super::linear::rref;
use super::{collect_tensors, Equation};

#[derive(Clone, Debug)]
pub struct TensorSolveOptions {
    /// Solve only for factors with this head.
    pub target: Option<String>,
    pub use_symmetries: bool,
    pub metric_on_all: bool,
}

impl Default for TensorSolveOptions {
    fn default() -> Self {
        TensorSolveOptions {
            target: None,
            use_symmetries: true,
            metric_on_all: true,
        }
    }
}

/// Solves linear tensor equations for uncontracted tensor structures.
///
/// Each inner list is one alternative solution; a factor common to every
/// term of a single equation yields the extra alternative where it vanishes.
pub fn solve_tensors(eqs: &[Equation], opts: &TensorSolveOptions, session: &Session) -> Result<Vec<Vec<Rule>>> {
    let mut exprs = Vec::new();
    for eq in eqs {
        let d = eq.difference(session)?;
        if !d.is_zero() {
            exprs.push(d);
        }
    }
    if exprs.is_empty() {
        return Ok(vec![Vec::new()]);
    }
    if exprs.len() == 1 {
        if let Some(f) = common_factor(&exprs[0], opts) {
            let mut out = Vec::new();
            let reduced = Expr::from_terms(exprs[0].terms.iter().map(|t| {
                let mut t = t.clone();
                let k = t.factors.iter().position(|g| *g == f).unwrap();
                t.factors.remove(k);
                t
            }));
            if let Ok(sols) = solve_tensors(&[Equation::zero(reduced)], opts, session) {
                out.extend(sols);
            }
            let mut vanish = Rule::new(vec![f], Expr::zero());
            vanish.use_symmetries = opts.use_symmetries;
            vanish.metric_on_all = opts.metric_on_all;
            out.push(vec![vanish]);
            return Ok(out);
        }
    }
    Ok(vec![solve_linear(&exprs, opts, session)?])
}

/// A factor without contractions shared by every term.
fn common_factor(e: &Expr, opts: &TensorSolveOptions) -> Option<Factor> {
    let first = e.terms.first()?;
    first
        .factors
        .iter()
        .filter(|f| f.all_indices().all(|i| !i.is_dummy()))
        .filter(|f| opts.target.as_deref().is_none_or(|h| &*f.head == h))
        .find(|f| e.terms.iter().all(|t| t.factors.contains(f)))
        .cloned()
}

/// How a structure can be solved for: the factors forming the pattern and
/// the scalar factors left over as divisor.
struct Pivot {
    pattern: Vec<Factor>,
    divisor: Vec<Factor>,
}

fn pivot_for(structure: &[Factor], opts: &TensorSolveOptions) -> Option<Pivot> {
    if structure.is_empty() {
        return None;
    }
    let Some(head) = &opts.target else {
        return Some(Pivot {
            pattern: structure.to_vec(),
            divisor: Vec::new(),
        });
    };
    for (k, f) in structure.iter().enumerate() {
        if &*f.head != head {
            continue;
        }
        let mut rest = structure.to_vec();
        rest.remove(k);
        let rest_term = Term::new(Coeff::one(), rest.clone());
        let own: Vec<&Label> = f.all_indices().map(|i| &i.label).collect();
        let shares = rest_term.indices().any(|i| own.contains(&&i.label));
        if !shares && rest_term.free_indices().is_empty() {
            return Some(Pivot {
                pattern: vec![f.clone()],
                divisor: rest,
            });
        }
    }
    None
}

fn solve_linear(exprs: &[Expr], opts: &TensorSolveOptions, session: &Session) -> Result<Vec<Rule>> {
    let mut columns: IndexMap<Vec<Factor>, ()> = IndexMap::new();
    for e in exprs {
        for t in &e.terms {
            columns.insert(t.factors.clone(), ());
        }
    }
    let mut cols: Vec<(Vec<Factor>, Option<Pivot>)> = columns
        .into_keys()
        .map(|s| {
            let p = pivot_for(&s, opts);
            (s, p)
        })
        .collect();
    cols.sort_by(|(a, pa), (b, pb)| preference(a, pa.is_some(), b, pb.is_some(), session));
    let n = cols.len();
    let rows: Vec<Vec<Coeff>> = exprs
        .iter()
        .map(|e| {
            let mut row = vec![Coeff::zero(); n];
            for t in &e.terms {
                let j = cols.iter().position(|(s, _)| *s == t.factors).unwrap();
                row[j] = &row[j] + &t.coeff;
            }
            row
        })
        .collect();
    let r = rref(rows, n);
    let mut rules = Vec::new();
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        let Some(pivot) = &cols[p].1 else {
            return Err(Error::NoSolvableStructure(
                "an equation involves no structure that can be solved for".into(),
            ));
        };
        let mut terms = Vec::new();
        for (j, (s, _)) in cols.iter().enumerate() {
            if j != p && !row[j].is_zero() {
                terms.push(Term::new(-&row[j], s.clone()));
            }
        }
        let template = Expr::from_terms(terms);
        let mut divisor = pivot.divisor.clone();
        if !divisor.is_empty() {
            let shift = template.terms.iter().map(|t| t.next_dummy()).max().unwrap_or(0);
            let mut d = Term::new(Coeff::one(), divisor);
            d.shift_dummies(shift);
            divisor = d.factors;
        }
        rules.push(Rule {
            pattern: pivot.pattern.clone(),
            template,
            divisor,
            use_symmetries: opts.use_symmetries,
            metric_on_all: opts.metric_on_all,
        });
    }
    if rules.is_empty() {
        return Err(Error::NoSolvableStructure("no structure to solve for".into()));
    }
    Ok(rules)
}

/// Pivot order: solvable structures first, then those without metrics, then
/// higher rank, then later in canonical order.
fn preference(a: &[Factor], sa: bool, b: &[Factor], sb: bool, session: &Session) -> Ordering {
    let metric = |s: &[Factor]| s.iter().any(|f| session.kind(&f.head) == TensorKind::Metric);
    let rank = |s: &[Factor]| s.iter().map(|f| f.nslots()).sum::<usize>();
    sb.cmp(&sa)
        .then(metric(a).cmp(&metric(b)))
        .then(rank(b).cmp(&rank(a)))
        .then_with(|| {
            let ta = Term::new(Coeff::one(), a.to_vec());
            let tb = Term::new(Coeff::one(), b.to_vec());
            term_order(&tb, &ta, session)
        })
}

/// Checks that each rule set, substituted into the equations, leaves `0 == 0`.
///
/// Rules with a divisor cannot be substituted; for those the equation is
/// multiplied through by the divisor first. Rules are matched only on the
/// structure they were solved for: their metric traces are consequences of
/// the equations, so substituting them would leave residues that vanish only
/// modulo the equations again.
pub fn verify_rules(eqs: &[Equation], rules: &[Rule], session: &Session) -> Result<bool> {
    for eq in eqs {
        let mut d = eq.difference(session)?;
        let mut plain = Vec::new();
        for r in rules {
            let mut r = r.clone();
            r.metric_on_all = false;
            if r.divisor.is_empty() {
                plain.push(r);
            } else {
                // pattern * divisor -> template
                let mut whole = r.clone();
                whole.pattern.extend(r.divisor.iter().cloned());
                whole.divisor.clear();
                plain.push(whole);
            }
        }
        d = replace(&d, &plain, session)?;
        if !collect_tensors(&d, session)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
