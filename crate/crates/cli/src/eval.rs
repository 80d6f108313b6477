//! Evaluation of script expressions: tensor arithmetic plus builtin calls.

use std::collections::HashMap;
use std::sync::Arc;

use txs_core::algebra::{
    collect_constants, collect_tensors, solve_constants, solve_tensors, Equation, Solution, TensorSolveOptions,
};
use txs_core::comb::{
    all_contractions, construct_ddis_capped, index_configurations, make_ansatz, make_traceless, DDI_DIM_CAP,
};
use txs_core::expr::{
    apply_covd, contract_metric, divide, make_tensor, power, renumber, replace, Ast, Rule, Session,
};
use txs_core::geom::{
    apply_contracted_bianchi, euler_density_capped, full_simplification, sort_covds, var_d, var_l, vary_metric,
    EULER_DIM_CAP,
};
use txs_core::symm::{canonicalize, SymmetrySpec};
use txs_core::young::{antisymmetrize, riemann_young_project, symmetrize, tableau_symmetric, young_project, Manifest, Tableau};
use txs_core::{Coeff, Error, Expr, Factor, Index, Result};

use crate::value::Value;

/// Builtin functions, with a one-line usage each.
pub const BUILTINS: &[(&str, &str)] = &[
    ("canon", "canon(e): canonical form"),
    ("collect", "collect(e): contract metrics, canonicalize and combine terms"),
    ("contract", "contract(e): contract metrics"),
    ("contractions", "contractions(e, {frees}, sym=...): all independent contractions"),
    ("configurations", "configurations(e): all independent free-index arrangements"),
    ("ansatz", "ansatz({e1, e2, ...}): sum with fresh constants"),
    ("traceless", "traceless(e): trace-free part"),
    ("ddis", "ddis(e, {frees}, dim=N, sym=...): dimensionally dependent identities"),
    ("solve_constants", "solve_constants(eqs, {C1, ...}): solve for constants"),
    ("solve_tensors", "solve_tensors(eqs, use_symmetries=0, metric_on=0, target=T): solve for tensors"),
    ("subst", "subst(e, rules): apply a solution or replacement rules"),
    ("collect_constants", "collect_constants(e): group terms by constants"),
    ("vary", "vary(e): first-order metric variation"),
    ("var_d", "var_d(e, T[-a,-b]): variational derivative"),
    ("var_l", "var_l(L, g[-a,-b]): variation of a Lagrangian density"),
    ("euler", "euler(N): Euler density in N dimensions"),
    ("simplify", "simplify(e): Bianchi identities and derivative sorting"),
    ("sort_covds", "sort_covds(e): order covariant derivatives"),
    ("bianchi", "bianchi(e): contracted Bianchi identities"),
    ("young", "young(e, {{a,b},{c}}, manifest=symmetric): Young projection"),
    ("riemann_young", "riemann_young(e): Young-project every Riemann tensor"),
    ("symmetrize", "symmetrize(e, {a, b}): average over permutations of labels"),
    ("antisymmetrize", "antisymmetrize(e, {a, b}): signed average over permutations"),
    ("item", "item(list, k): k-th element, counting from 1"),
    ("length", "length(list): number of elements"),
];

pub fn is_builtin(name: &str) -> bool {
    BUILTINS.iter().any(|(n, _)| *n == name)
}

pub struct Evaluator<'a> {
    pub session: &'a mut Session,
    pub vars: &'a HashMap<String, Value>,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

impl Evaluator<'_> {
    pub fn eval(&mut self, ast: &Ast) -> Result<Value> {
        match ast {
            Ast::Ident(name) => {
                if let Some(v) = self.vars.get(name) {
                    return Ok(v.clone());
                }
                if self.session.is_constant(name) {
                    return Ok(Value::Expr(Expr::scalar(Coeff::var(name))));
                }
                if self.session.tensor(name).is_some() {
                    return invalid(format!("`{}` needs an index list", name));
                }
                invalid(format!("unknown name `{}`", name))
            }
            Ast::Call(name, args, kw) => self.call(name, args, kw),
            Ast::List(items) => self.list(items),
            Ast::Rule(..) => self.list(std::slice::from_ref(ast)),
            Ast::Equation(a, b) => Ok(Value::Equation(Equation::new(self.expr(a)?, self.expr(b)?))),
            _ => Ok(Value::Expr(self.expr(ast)?)),
        }
    }

    /// Evaluates to a single tensor expression.
    pub fn expr(&mut self, ast: &Ast) -> Result<Expr> {
        let e = match ast {
            Ast::Num(r) => Expr::scalar(Coeff::from(r.clone())),
            Ast::Tensor(h, ix) => make_tensor(h, ix, self.session)?,
            Ast::Deriv(cd, ix, arg) => {
                let a = self.expr(arg)?;
                apply_covd(cd, ix, &a, self.session)?
            }
            Ast::Neg(a) => self.expr(a)?.neg(),
            Ast::Add(a, b) => self.expr(a)?.add(&self.expr(b)?),
            Ast::Sub(a, b) => self.expr(a)?.sub(&self.expr(b)?),
            Ast::Mul(a, b) => self.expr(a)?.mul(&self.expr(b)?)?,
            Ast::Div(a, b) => divide(&self.expr(a)?, &self.expr(b)?)?,
            Ast::Pow(a, n) => power(&self.expr(a)?, *n)?,
            _ => match self.eval(ast)? {
                Value::Expr(e) => e,
                Value::Grouped(g) => g.to_expr(),
                v => return invalid(format!("expected an expression, got a {}", v.kind())),
            },
        };
        Ok(renumber(e))
    }

    fn list(&mut self, items: &[Ast]) -> Result<Value> {
        if !items.is_empty() && items.iter().all(|i| matches!(i, Ast::Rule(l, _) if matches!(**l, Ast::Ident(_)))) {
            let mut sol: Solution = Vec::new();
            for i in items {
                let Ast::Rule(l, r) = i else { unreachable!() };
                let Ast::Ident(k) = &**l else { unreachable!() };
                let v = self.expr(r)?;
                if v.terms.iter().any(|t| !t.factors.is_empty()) {
                    return invalid(format!("the value of `{}` must be a scalar", k));
                }
                let c = v.terms.iter().fold(Coeff::zero(), |acc, t| &acc + &t.coeff);
                sol.push((Arc::from(k.as_str()), c));
            }
            return Ok(Value::Solution(sol));
        }
        if !items.is_empty() && items.iter().all(|i| matches!(i, Ast::Rule(..))) {
            let mut rules = Vec::new();
            for i in items {
                let Ast::Rule(l, r) = i else { unreachable!() };
                let pat = self.expr(l)?;
                let [t] = pat.terms.as_slice() else {
                    return invalid("a rule pattern must be a single product of tensors");
                };
                rules.push(self.rule(t.factors.clone(), r)?);
            }
            return Ok(Value::Rules(rules));
        }
        Ok(Value::List(items.iter().map(|i| self.eval(i)).collect::<Result<_>>()?))
    }

    /// A rule whose right side may be divided by a product of scalar tensors,
    /// as printed for solutions like `g[a,b] -> (2*Ricci[a,b])/(RicciScalar[])`.
    fn rule(&mut self, pattern: Vec<Factor>, rhs: &Ast) -> Result<Rule> {
        if let Ast::Div(num, den) = rhs {
            let d = self.expr(den)?;
            if let [t] = d.terms.as_slice() {
                if !t.factors.is_empty() {
                    if !t.free_indices().is_empty() {
                        return invalid("a rule divisor must be a scalar");
                    }
                    let c = t.coeff.recip().ok_or_else(|| Error::Invalid("division by zero".into()))?;
                    let template = self.expr(num)?.scale(&c);
                    let mut rule = Rule::new(pattern, template);
                    rule.divisor = t.factors.clone();
                    return Ok(rule);
                }
            }
        }
        Ok(Rule::new(pattern, self.expr(rhs)?))
    }

    fn exprs(&mut self, ast: &Ast) -> Result<Vec<Expr>> {
        match self.eval(ast)? {
            Value::List(v) => v
                .into_iter()
                .map(|x| match x {
                    Value::Expr(e) => Ok(e),
                    v => invalid(format!("expected a list of expressions, found a {}", v.kind())),
                })
                .collect(),
            Value::Expr(e) => Ok(vec![e]),
            v => invalid(format!("expected a list of expressions, got a {}", v.kind())),
        }
    }

    fn equations(&mut self, ast: &Ast) -> Result<Vec<Equation>> {
        fn flatten(v: Value, out: &mut Vec<Equation>) -> Result<()> {
            match v {
                Value::Equation(e) => out.push(e),
                Value::Expr(e) => out.push(Equation::zero(e)),
                Value::Grouped(g) => out.push(Equation::zero(g.to_expr())),
                Value::List(items) => {
                    for i in items {
                        flatten(i, out)?;
                    }
                }
                v => return invalid(format!("expected equations, got a {}", v.kind())),
            }
            Ok(())
        }
        let mut out = Vec::new();
        flatten(self.eval(ast)?, &mut out)?;
        Ok(out)
    }

    fn int(&mut self, ast: &Ast) -> Result<i64> {
        let e = self.expr(ast)?;
        let c = match e.terms.as_slice() {
            [] => Some(0),
            [t] if t.factors.is_empty() => t.coeff.as_i64(),
            _ => None,
        };
        c.ok_or_else(|| Error::Invalid("expected an integer".into()))
    }

    fn target(&mut self, ast: &Ast) -> Result<Factor> {
        match ast {
            Ast::Tensor(h, ix) => {
                let e = make_tensor(h, ix, self.session)?;
                Ok(e.terms[0].factors[0].clone())
            }
            _ => invalid("expected a single tensor such as `g[-a,-b]`"),
        }
    }

    fn call(&mut self, name: &str, args: &[Ast], kw: &[(String, Ast)]) -> Result<Value> {
        let arity = |n: usize| -> Result<()> {
            if args.len() < n {
                invalid(format!("`{}` expects {} argument(s)", name, n))
            } else {
                Ok(())
            }
        };
        let opt = |k: &str| kw.iter().find(|(n, _)| n == k).map(|(_, v)| v);
        for (k, _) in kw {
            let known = matches!(
                (name, k.as_str()),
                ("contractions" | "ddis", "sym")
                    | ("ddis", "dim")
                    | ("ddis", "cap")
                    | ("euler", "cap")
                    | ("solve_tensors", "use_symmetries" | "metric_on" | "target")
                    | ("young", "manifest")
            );
            if !known {
                return invalid(format!("`{}` has no option `{}`", name, k));
            }
        }
        let e = |ev: &mut Self, k: usize| ev.expr(&args[k]);
        let v = match name {
            "canon" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(canonicalize(&x, self.session)?)
            }
            "collect" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(collect_tensors(&x, self.session)?)
            }
            "contract" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(contract_metric(&x, self.session))
            }
            "contractions" => {
                arity(1)?;
                let x = e(self, 0)?;
                let frees = match args.get(1) {
                    Some(a) => index_list(a)?,
                    None => Vec::new(),
                };
                let sym = match opt("sym") {
                    Some(a) => Some(sym_spec(a, &labels(&frees))?),
                    None => None,
                };
                let out = all_contractions(&x, &frees, sym.as_ref(), self.session)?;
                Value::List(out.into_iter().map(Value::Expr).collect())
            }
            "configurations" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::List(index_configurations(&x, self.session)?.into_iter().map(Value::Expr).collect())
            }
            "ansatz" => {
                arity(1)?;
                let xs = self.exprs(&args[0])?;
                Value::Expr(make_ansatz(&xs, self.session)?)
            }
            "traceless" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(make_traceless(&x, self.session)?)
            }
            "ddis" => {
                arity(1)?;
                let x = e(self, 0)?;
                let frees = match args.get(1) {
                    Some(a) => index_list(a)?,
                    None => Vec::new(),
                };
                let dim = match opt("dim") {
                    Some(a) => self.int(a)?,
                    None => self
                        .session
                        .dim_int()
                        .ok_or_else(|| Error::Invalid("give `dim=N` for a manifold of symbolic dimension".into()))?,
                };
                let cap = match opt("cap") {
                    Some(a) => self.int(a)?,
                    None => DDI_DIM_CAP,
                };
                let sym = match opt("sym") {
                    Some(a) => Some(sym_spec(a, &labels(&frees))?),
                    None => None,
                };
                let out = construct_ddis_capped(&x, &frees, sym.as_ref(), dim, cap, self.session)?;
                Value::List(out.into_iter().map(Value::Expr).collect())
            }
            "solve_constants" => {
                arity(1)?;
                let eqs = self.equations(&args[0])?;
                let unknowns = match args.get(1) {
                    Some(Ast::List(items)) => Some(
                        items
                            .iter()
                            .map(|i| match i {
                                Ast::Ident(n) => Ok(Arc::from(n.as_str())),
                                _ => invalid("unknowns must be constant names"),
                            })
                            .collect::<Result<Vec<_>>>()?,
                    ),
                    Some(_) => return invalid("unknowns must be a list such as {C1, C2}"),
                    None => None,
                };
                Value::Solution(solve_constants(&eqs, unknowns.as_deref(), self.session)?)
            }
            "solve_tensors" => {
                arity(1)?;
                let eqs = self.equations(&args[0])?;
                let mut o = TensorSolveOptions::default();
                if let Some(a) = opt("use_symmetries") {
                    o.use_symmetries = flag(a)?;
                }
                if let Some(a) = opt("metric_on") {
                    o.metric_on_all = flag(a)?;
                }
                if let Some(a) = opt("target") {
                    match a {
                        Ast::Ident(t) => o.target = Some(t.clone()),
                        _ => return invalid("`target` takes a tensor name"),
                    }
                }
                let mut alts = solve_tensors(&eqs, &o, self.session)?;
                if alts.len() == 1 {
                    Value::Rules(alts.remove(0))
                } else {
                    Value::List(alts.into_iter().map(Value::Rules).collect())
                }
            }
            "subst" => {
                arity(2)?;
                let target = self.eval(&args[0])?;
                let with = self.eval(&args[1])?;
                substitute(target, &with, self.session)?
            }
            "collect_constants" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Grouped(collect_constants(&x, self.session))
            }
            "vary" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(vary_metric(&x, self.session)?)
            }
            "var_d" | "var_l" => {
                arity(2)?;
                let x = e(self, 0)?;
                let t = self.target(&args[1])?;
                Value::Expr(if name == "var_d" {
                    var_d(&x, &t, self.session)?
                } else {
                    var_l(&x, &t, self.session)?
                })
            }
            "euler" => {
                arity(1)?;
                let n = self.int(&args[0])?;
                let cap = match opt("cap") {
                    Some(a) => self.int(a)?,
                    None => EULER_DIM_CAP,
                };
                Value::Expr(euler_density_capped(n, cap, self.session)?)
            }
            "simplify" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(full_simplification(&x, self.session)?)
            }
            "sort_covds" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(sort_covds(&x, self.session)?)
            }
            "bianchi" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(apply_contracted_bianchi(&x, self.session)?)
            }
            "young" => {
                arity(2)?;
                let x = e(self, 0)?;
                let tab = tableau(&args[1])?;
                let manifest = match opt("manifest") {
                    None => Manifest::Antisymmetric,
                    Some(Ast::Ident(m)) if m == "antisymmetric" => Manifest::Antisymmetric,
                    Some(Ast::Ident(m)) if m == "symmetric" => Manifest::Symmetric,
                    Some(_) => return invalid("`manifest` is `symmetric` or `antisymmetric`"),
                };
                Value::Expr(young_project(&x, &tab, manifest, self.session)?)
            }
            "riemann_young" => {
                arity(1)?;
                let x = e(self, 0)?;
                Value::Expr(riemann_young_project(&x, self.session)?)
            }
            "symmetrize" | "antisymmetrize" => {
                arity(2)?;
                let x = e(self, 0)?;
                let ls = labels(&index_list(&args[1])?);
                Value::Expr(if name == "symmetrize" {
                    symmetrize(&x, &ls, self.session)?
                } else {
                    antisymmetrize(&x, &ls, self.session)?
                })
            }
            "item" => {
                arity(2)?;
                let v = self.eval(&args[0])?;
                let k = self.int(&args[1])?;
                let items: Vec<Value> = match v {
                    Value::List(items) => items,
                    Value::Rules(r) => r.into_iter().map(|x| Value::Rules(vec![x])).collect(),
                    v => return invalid(format!("cannot index into a {}", v.kind())),
                };
                if k < 1 || k as usize > items.len() {
                    return invalid(format!("index {} is out of range 1..{}", k, items.len()));
                }
                items[k as usize - 1].clone()
            }
            "length" => {
                arity(1)?;
                let v = self.eval(&args[0])?;
                Value::Expr(Expr::scalar(Coeff::int(v.count() as i64)))
            }
            _ => return invalid(format!("unknown function `{}`", name)),
        };
        Ok(v)
    }
}

fn flag(a: &Ast) -> Result<bool> {
    match a {
        Ast::Num(n) => match Coeff::from(n.clone()).as_i64() {
            Some(0) => Ok(false),
            Some(1) => Ok(true),
            _ => invalid("expected 0 or 1"),
        },
        Ast::Ident(x) if x == "true" || x == "all" => Ok(true),
        Ast::Ident(x) if x == "false" || x == "none" => Ok(false),
        _ => invalid("expected true/false"),
    }
}

/// `{a, -b}` as indices: bare labels are upper, negated labels lower.
pub fn index_list(a: &Ast) -> Result<Vec<Index>> {
    let one = |x: &Ast| -> Result<Index> {
        match x {
            Ast::Ident(l) => Ok(Index::up(l)),
            Ast::Neg(inner) => match &**inner {
                Ast::Ident(l) => Ok(Index::down(l)),
                _ => invalid("expected an index label"),
            },
            _ => invalid("expected an index label"),
        }
    };
    match a {
        Ast::List(items) => items.iter().map(one).collect(),
        x => Ok(vec![one(x)?]),
    }
}

fn labels(ix: &[Index]) -> Vec<Arc<str>> {
    ix.iter().filter_map(|i| i.name().map(Arc::from)).collect()
}

pub fn tableau(a: &Ast) -> Result<Tableau> {
    let Ast::List(rows) = a else {
        return invalid("a tableau is written {{a, b}, {c}}");
    };
    let rows = rows
        .iter()
        .map(|r| match r {
            Ast::List(cells) => cells
                .iter()
                .map(|c| match c {
                    Ast::Ident(l) => Ok(Arc::from(l.as_str())),
                    _ => invalid("tableau cells are index labels"),
                })
                .collect::<Result<Vec<_>>>(),
            _ => invalid("a tableau is written {{a, b}, {c}}"),
        })
        .collect::<Result<Vec<_>>>()?;
    Tableau::new(rows)
}

/// A slot symmetry over tensor slots carrying `slots` labels, written as
/// `symmetric`, `antisymmetric`, `riemann`, `symmetric(a, b)`,
/// `antisymmetric(a, b)`, a tableau `{{a, b}, {c}}`, or a `+`-joined
/// combination of these.
pub fn sym_spec(a: &Ast, slots: &[Arc<str>]) -> Result<SymmetrySpec> {
    let n = slots.len();
    let pos = |l: &Ast| -> Result<usize> {
        match l {
            Ast::Ident(x) | Ast::Tensor(x, _) => slots
                .iter()
                .position(|s| &**s == x)
                .ok_or_else(|| Error::Invalid(format!("`{}` is not a slot label", x))),
            _ => invalid("expected a slot label"),
        }
    };
    match a {
        Ast::Add(x, y) => Ok(sym_spec(x, slots)?.with(&sym_spec(y, slots)?)),
        Ast::Ident(k) => {
            let all: Vec<usize> = (0..n).collect();
            match k.as_str() {
                "none" => Ok(SymmetrySpec::none(n)),
                "symmetric" | "sym" => Ok(SymmetrySpec::symmetric(n, &all)),
                "antisymmetric" | "antisym" => Ok(SymmetrySpec::antisymmetric(n, &all)),
                "riemann" if n == 4 => Ok(SymmetrySpec::riemann()),
                "riemann" => invalid("Riemann symmetry needs four slots"),
                _ => invalid(format!("unknown symmetry `{}`", k)),
            }
        }
        Ast::Call(k, args, _) if matches!(k.as_str(), "symmetric" | "antisymmetric" | "sym" | "antisym") => {
            let idx = args.iter().map(pos).collect::<Result<Vec<_>>>()?;
            Ok(if k.starts_with("sym") {
                SymmetrySpec::symmetric(n, &idx)
            } else {
                SymmetrySpec::antisymmetric(n, &idx)
            })
        }
        Ast::List(_) => tableau_symmetric(&tableau(a)?, slots),
        _ => invalid("unrecognized symmetry"),
    }
}

fn substitute(target: Value, with: &Value, session: &Session) -> Result<Value> {
    Ok(match target {
        Value::List(items) => Value::List(
            items
                .into_iter()
                .map(|i| substitute(i, with, session))
                .collect::<Result<_>>()?,
        ),
        Value::Equation(eq) => {
            let l = substitute(Value::Expr(eq.lhs), with, session)?;
            let r = substitute(Value::Expr(eq.rhs), with, session)?;
            match (l, r) {
                (Value::Expr(lhs), Value::Expr(rhs)) => Value::Equation(Equation::new(lhs, rhs)),
                _ => return invalid("substitution into an equation must give expressions"),
            }
        }
        Value::Grouped(g) => substitute(Value::Expr(g.to_expr()), with, session)?,
        Value::Expr(e) => match with {
            Value::Solution(sol) => Value::Expr(txs_core::algebra::apply_solution(&e, sol)),
            Value::Rules(rules) => Value::Expr(replace(&e, rules, session)?),
            Value::List(alts) => Value::List(
                alts.iter()
                    .map(|a| substitute(Value::Expr(e.clone()), a, session))
                    .collect::<Result<_>>()?,
            ),
            v => return invalid(format!("cannot substitute a {}", v.kind())),
        },
        v => return invalid(format!("cannot substitute into a {}", v.kind())),
    })
}
