//! Values produced by script expressions and their rendering.

use serde_json::{json, Value as Json};
use txs_core::algebra::{collect_tensors, ConstantGroups, Equation, Solution};
use txs_core::expr::{Format, Printer, Rule, Session};
use txs_core::{Expr, Result};

#[derive(Clone, Debug)]
pub enum Value {
    Expr(Expr),
    List(Vec<Value>),
    Equation(Equation),
    Rules(Vec<Rule>),
    Solution(Solution),
    Grouped(ConstantGroups),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Expr(_) => "expression",
            Value::List(_) => "list",
            Value::Equation(_) => "equation",
            Value::Rules(_) => "rule list",
            Value::Solution(_) => "solution",
            Value::Grouped(_) => "grouped expression",
        }
    }

    /// Number of elements of a list-like value, or of terms of an expression.
    pub fn count(&self) -> usize {
        match self {
            Value::Expr(e) => e.len(),
            Value::List(v) => v.len(),
            Value::Rules(r) => r.len(),
            Value::Solution(s) => s.len(),
            Value::Grouped(g) => g.groups.len(),
            Value::Equation(_) => 1,
        }
    }

    pub fn render(&self, session: &Session, format: Format) -> String {
        match format {
            Format::Json => self.json(session).to_string(),
            _ => self.text(session, format),
        }
    }

    fn text(&self, session: &Session, format: Format) -> String {
        let p = Printer::new(session, format);
        let coeff = |c: &txs_core::Coeff| match format {
            Format::Latex => c.to_latex(),
            _ => p.expr(&Expr::scalar(c.clone())),
        };
        let (open, close, arrow) = match format {
            Format::Latex => ("\\{", "\\}", " \\rightarrow "),
            _ => ("{", "}", " -> "),
        };
        match self {
            Value::Expr(e) => p.expr(e),
            Value::List(v) => {
                let items: Vec<String> = v.iter().map(|x| x.text(session, format)).collect();
                format!("{}{}{}", open, items.join(", "), close)
            }
            Value::Equation(eq) => {
                let eqs = if format == Format::Latex { " = " } else { " == " };
                format!("{}{}{}", p.expr(&eq.lhs), eqs, p.expr(&eq.rhs))
            }
            Value::Rules(r) => {
                let items: Vec<String> = r.iter().map(|x| x.display(session)).collect();
                format!("{{{}}}", items.join(", "))
            }
            Value::Solution(s) => {
                let items: Vec<String> = s.iter().map(|(k, v)| format!("{}{}{}", k, arrow, coeff(v))).collect();
                format!("{}{}{}", open, items.join(", "), close)
            }
            Value::Grouped(g) => g.display(&p),
        }
    }

    pub fn json(&self, session: &Session) -> Json {
        let p = Printer::new(session, Format::Json);
        match self {
            Value::Expr(e) => p.json(e),
            Value::List(v) => Json::Array(v.iter().map(|x| x.json(session)).collect()),
            Value::Equation(eq) => json!({ "lhs": p.json(&eq.lhs), "rhs": p.json(&eq.rhs) }),
            Value::Rules(r) => Json::Array(r.iter().map(|x| Json::String(x.display(session))).collect()),
            Value::Solution(s) => Json::Object(
                s.iter()
                    .map(|(k, v)| (k.to_string(), Json::String(v.to_string())))
                    .collect(),
            ),
            Value::Grouped(g) => p.json(&g.to_expr()),
        }
    }
}

/// Exact comparison: expressions after metric contraction and
/// canonicalization, lists elementwise in order, solutions by key.
pub fn values_equal(a: &Value, b: &Value, session: &Session) -> Result<bool> {
    Ok(match (a, b) {
        (Value::Expr(x), Value::Expr(y)) => collect_tensors(&x.sub(y), session)?.is_zero(),
        (Value::Grouped(x), y) => values_equal(&Value::Expr(x.to_expr()), y, session)?,
        (x, Value::Grouped(y)) => values_equal(x, &Value::Expr(y.to_expr()), session)?,
        (Value::List(x), Value::List(y)) => {
            if x.len() != y.len() {
                return Ok(false);
            }
            for (u, v) in x.iter().zip(y) {
                if !values_equal(u, v, session)? {
                    return Ok(false);
                }
            }
            true
        }
        (Value::Solution(x), Value::Solution(y)) => {
            if x.len() != y.len() {
                return Ok(false);
            }
            for (k, v) in x {
                let Some((_, w)) = y.iter().find(|(j, _)| j == k) else {
                    return Ok(false);
                };
                if !(v - w).is_zero() {
                    return Ok(false);
                }
            }
            true
        }
        (Value::Equation(x), Value::Equation(y)) => {
            values_equal(&Value::Expr(x.lhs.sub(&x.rhs)), &Value::Expr(y.lhs.sub(&y.rhs)), session)?
        }
        _ => false,
    })
}

/// Whether a value is zero: an expression or every element of a list.
pub fn is_zero(v: &Value, session: &Session) -> Result<bool> {
    Ok(match v {
        Value::Expr(e) => collect_tensors(e, session)?.is_zero(),
        Value::Grouped(g) => collect_tensors(&g.to_expr(), session)?.is_zero(),
        Value::List(items) => {
            for x in items {
                if !is_zero(x, session)? {
                    return Ok(false);
                }
            }
            true
        }
        Value::Equation(eq) => collect_tensors(&eq.lhs.sub(&eq.rhs), session)?.is_zero(),
        _ => false,
    })
}
