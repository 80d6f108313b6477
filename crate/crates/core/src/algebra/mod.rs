//! Collecting terms and solving equations for constants or tensor structures.

mod constants;
pub mod linear;
mod tensors;

pub use constants::{
    apply_solution, collect_constants, is_unknown, natural_cmp, solve_constants, to_constant_equations, verify_constants,
    ConstantGroups, LinearSystem, Solution,
};
pub use tensors::{solve_tensors, verify_rules, TensorSolveOptions};

use crate::error::Result;
use crate::expr::{contract_metric, Expr, Session};
use crate::symm::canonicalize;

/// `lhs == rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    pub fn new(lhs: Expr, rhs: Expr) -> Self {
        Equation { lhs, rhs }
    }

    /// `expr == 0`.
    pub fn zero(expr: Expr) -> Self {
        Equation { lhs: expr, rhs: Expr::zero() }
    }

    /// `lhs - rhs`, collected.
    pub fn difference(&self, session: &Session) -> Result<Expr> {
        collect_tensors(&self.lhs.sub(&self.rhs), session)
    }
}

/// Contracts metrics, canonicalizes every term and merges terms with the
/// same tensorial part.
pub fn collect_tensors(expr: &Expr, session: &Session) -> Result<Expr> {
    canonicalize(&contract_metric(expr, session), session)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Dim, Printer};
    use std::sync::Arc;

    #[test]
    fn merges_metric_contracted_forms() {
        let mut s = Session::standard(Dim::Sym(Arc::from("d")));
        s.declare_constant("C1").unwrap();
        s.declare_constant("C2").unwrap();
        let e = parse("C1*Ricci[-b,-a] + C2*g[-a,-c]*Ricci[c,-b]", &s).unwrap();
        let c = collect_tensors(&e, &s).unwrap();
        assert_eq!(Printer::plain(&s).expr(&c), "(C1 + C2)*Ricci[-a,-b]");
    }
}
