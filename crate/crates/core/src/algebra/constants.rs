use std::cmp::Ordering;

use indexmap::IndexMap;
use num_rational::BigRational;

use crate::coeff::{Coeff, Monomial, Poly, Sym};
use crate::error::{Error, Result};
use crate::expr::{Expr, Printer, Session, Term};

use super::linear::rref;
use super::{collect_tensors, Equation};

/// Whether `name` is a constant to solve for (declared, and not the dimension).
pub fn is_unknown(name: &str, session: &Session) -> bool {
    session.is_constant(name) && session.dim_symbol() != Some(name)
}

/// Orders `C2` before `C10`: alphabetic stem first, then trailing number.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let stem = s.trim_end_matches(|c: char| c.is_ascii_digit());
        (stem, s[stem.len()..].parse().ok())
    }
    let (sa, na) = split(a);
    let (sb, nb) = split(b);
    sa.cmp(sb).then(na.cmp(&nb)).then(a.cmp(b))
}

/// An expression grouped by products of constant symbols.
#[derive(Clone, Debug)]
pub struct ConstantGroups {
    /// `(constant monomial, tensor expression)`; the constant-free part has key one.
    pub groups: Vec<(Coeff, Expr)>,
}

impl ConstantGroups {
    pub fn to_expr(&self) -> Expr {
        let mut out = Expr::zero();
        for (k, e) in &self.groups {
            out = out.add(&e.scale(k));
        }
        out
    }

    pub fn display(&self, p: &Printer) -> String {
        if self.groups.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (k, e) in &self.groups {
            let body = p.expr(e);
            if k.is_one() {
                parts.push(body);
            } else if e.len() == 1 && e.terms[0].coeff.is_one() {
                parts.push(format!("{}*{}", k, body));
            } else {
                parts.push(format!("{}*({})", k, body));
            }
        }
        parts.join(" + ")
    }
}

/// Groups the terms of `expr` by the constant symbols multiplying them.
pub fn collect_constants(expr: &Expr, session: &Session) -> ConstantGroups {
    let mut groups: IndexMap<Monomial, Vec<Term>> = IndexMap::new();
    for t in &expr.terms {
        let den_has_unknown = t.coeff.denom().vars().iter().any(|v| is_unknown(v, session));
        if den_has_unknown {
            groups.entry(Monomial::one()).or_default().push(t.clone());
            continue;
        }
        for (m, c) in t.coeff.numer().terms() {
            let (key, rest) = m.split(|v| is_unknown(v, session));
            let num = Poly::from_terms([(rest, c.clone())]);
            let coeff = Coeff::from_parts(num, t.coeff.denom().clone());
            groups
                .entry(key)
                .or_default()
                .push(Term::new(coeff, t.factors.clone()));
        }
    }
    let mut out: Vec<(Coeff, Expr)> = groups
        .into_iter()
        .map(|(m, ts)| (Coeff::from_poly(Poly::from_terms([(m, one())])), Expr::from_terms(ts)))
        .collect();
    out.sort_by(|(a, _), (b, _)| {
        let ka = a.to_string();
        let kb = b.to_string();
        match (a.is_one(), b.is_one()) {
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => natural_cmp(&ka, &kb),
        }
    });
    ConstantGroups { groups: out }
}

fn one() -> BigRational {
    BigRational::from_integer(1.into())
}

/// Scalar equations `form == 0`, each linear in `unknowns`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub unknowns: Vec<Sym>,
    pub equations: Vec<Coeff>,
}

/// Reads off one equation per tensor structure of `lhs - rhs`.
pub fn to_constant_equations(eq: &Equation, unknowns: &[Sym], session: &Session) -> Result<LinearSystem> {
    let diff = eq.difference(session)?;
    let mut equations: Vec<Coeff> = Vec::new();
    for t in &diff.terms {
        check_linear(&t.coeff, unknowns)?;
        if !equations.contains(&t.coeff) {
            equations.push(t.coeff.clone());
        }
    }
    Ok(LinearSystem {
        unknowns: unknowns.to_vec(),
        equations,
    })
}

fn check_linear(c: &Coeff, unknowns: &[Sym]) -> Result<()> {
    let bad = || Error::Nonlinear(format!("coefficient {} is not linear in the unknowns", c));
    if c.denom().vars().iter().any(|v| unknowns.contains(v)) {
        return Err(bad());
    }
    for (m, _) in c.numer().terms() {
        let deg: u32 = unknowns.iter().map(|u| m.exponent(u)).sum();
        if deg > 1 {
            return Err(bad());
        }
    }
    Ok(())
}

/// Values for the solved constants; the others stay free.
pub type Solution = Vec<(Sym, Coeff)>;

/// Solves the tensor equations for the constants by Gauss-Jordan elimination.
///
/// Higher-numbered constants are eliminated first, so solutions express
/// later constants through earlier ones.
pub fn solve_constants(eqs: &[Equation], unknowns: Option<&[Sym]>, session: &Session) -> Result<Solution> {
    let diffs: Vec<Expr> = eqs.iter().map(|e| e.difference(session)).collect::<Result<_>>()?;
    let mut unknowns: Vec<Sym> = match unknowns {
        Some(u) => u.to_vec(),
        None => {
            let mut u: Vec<Sym> = Vec::new();
            for d in &diffs {
                for t in &d.terms {
                    for v in t.coeff.vars() {
                        if is_unknown(&v, session) && !u.contains(&v) {
                            u.push(v);
                        }
                    }
                }
            }
            u
        }
    };
    unknowns.sort_by(|a, b| natural_cmp(b, a));
    let n = unknowns.len();
    let mut rows = Vec::new();
    for d in &diffs {
        for t in &d.terms {
            check_linear(&t.coeff, &unknowns)?;
            let mut row = vec![Coeff::zero(); n + 1];
            for (m, c) in t.coeff.numer().terms() {
                let (key, rest) = m.split(|v| unknowns.iter().any(|u| &**u == v));
                let part = Coeff::from_parts(Poly::from_terms([(rest, c.clone())]), t.coeff.denom().clone());
                let col = match key.factors().first() {
                    None => n,
                    Some((v, _)) => unknowns.iter().position(|u| u == v).unwrap(),
                };
                row[col] = &row[col] + &part;
            }
            rows.push(row);
        }
    }
    let r = rref(rows, n + 1);
    if r.pivots.contains(&n) {
        return Err(Error::Inconsistent("the equations have no solution for the constants".into()));
    }
    let mut sol: Solution = Vec::new();
    for (row, &p) in r.rows.iter().zip(&r.pivots) {
        let mut value = -&row[n];
        for (j, u) in unknowns.iter().enumerate() {
            if j != p && !row[j].is_zero() {
                value = &value - &(&row[j] * &Coeff::var(u));
            }
        }
        sol.push((unknowns[p].clone(), value));
    }
    sol.sort_by(|a, b| natural_cmp(&a.0, &b.0));
    Ok(sol)
}

/// Substitutes `sol` into `expr`.
pub fn apply_solution(expr: &Expr, sol: &Solution) -> Expr {
    expr.substitute_constants(&|name: &str| sol.iter().find(|(k, _)| &**k == name).map(|(_, v)| v.clone()))
}

/// Checks that substituting `sol` turns every equation into `0 == 0`.
pub fn verify_constants(eqs: &[Equation], sol: &Solution, session: &Session) -> Result<bool> {
    for eq in eqs {
        let d = eq.difference(session)?;
        if !collect_tensors(&apply_solution(&d, sol), session)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
