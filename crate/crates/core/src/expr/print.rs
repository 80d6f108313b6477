//! Rendering of expressions as plain text, LaTeX, or JSON.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde_json::json;

use crate::coeff::Coeff;

use super::{Expr, Factor, Index, Label, Session, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Plain,
    Latex,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plain" => Ok(Format::Plain),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{}`", s)),
        }
    }
}

pub struct Printer<'a> {
    session: &'a Session,
    format: Format,
}

impl<'a> Printer<'a> {
    pub fn new(session: &'a Session, format: Format) -> Self {
        Printer { session, format }
    }

    pub fn plain(session: &'a Session) -> Self {
        Printer::new(session, Format::Plain)
    }

    pub fn latex(session: &'a Session) -> Self {
        Printer::new(session, Format::Latex)
    }

    pub fn expr(&self, e: &Expr) -> String {
        match self.format {
            Format::Json => self.json(e).to_string(),
            _ => self.sum(e),
        }
    }

    pub fn json(&self, e: &Expr) -> serde_json::Value {
        let plain = Printer::plain(self.session);
        let terms: Vec<_> = e
            .terms
            .iter()
            .map(|t| {
                let names = plain.dummy_names(t);
                let factors: Vec<String> = t.factors.iter().map(|f| plain.factor(f, &names)).collect();
                json!({ "coefficient": t.coeff.to_string(), "factors": factors })
            })
            .collect();
        json!({ "schema": 1, "terms": terms })
    }

    fn sum(&self, e: &Expr) -> String {
        if e.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, t) in e.terms.iter().enumerate() {
            let (neg, body) = self.term_parts(t);
            match (k == 0, neg) {
                (true, true) => out.push('-'),
                (true, false) => {}
                (false, true) => out.push_str(" - "),
                (false, false) => out.push_str(" + "),
            }
            out.push_str(&body);
        }
        out
    }

    pub fn term(&self, t: &Term) -> String {
        let (neg, body) = self.term_parts(t);
        if neg {
            format!("-{}", body)
        } else {
            body
        }
    }

    /// Sign and magnitude of a term.
    fn term_parts(&self, t: &Term) -> (bool, String) {
        let names = self.dummy_names(t);
        let sep = if self.format == Format::Latex { " " } else { "*" };
        let factors: Vec<String> = t.factors.iter().map(|f| self.factor(f, &names)).collect();
        let simple = t.coeff.numer().len() == 1;
        let (neg, c) = if simple && t.coeff.leading_sign() < 0 {
            (true, -&t.coeff)
        } else {
            (false, t.coeff.clone())
        };
        let cstr = if simple {
            if c.is_one() && !factors.is_empty() {
                None
            } else {
                Some(self.coeff(&c))
            }
        } else if self.format == Format::Latex {
            Some(format!("\\left({}\\right)", self.coeff(&c)))
        } else {
            Some(format!("({})", self.coeff(&c)))
        };
        let mut parts = Vec::new();
        if let Some(s) = cstr {
            parts.push(s);
        }
        parts.extend(factors);
        (neg, parts.join(sep))
    }

    fn coeff(&self, c: &Coeff) -> String {
        match self.format {
            Format::Latex => c.to_latex(),
            _ => c.to_string(),
        }
    }

    /// Letters for the dummies of a term, avoiding its free labels.
    pub fn dummy_names(&self, t: &Term) -> HashMap<u32, String> {
        let used: HashSet<Arc<str>> = t
            .indices()
            .filter_map(|i| match &i.label {
                Label::Name(n) => Some(n.clone()),
                _ => None,
            })
            .collect();
        let mut dummies: Vec<u32> = Vec::new();
        for f in &t.factors {
            for i in f.slots() {
                if let Label::Dummy(k) = i.label {
                    if !dummies.contains(&k) {
                        dummies.push(k);
                    }
                }
            }
        }
        dummies.sort_unstable();
        let alphabet = self.session.alphabet();
        let mut pool = Vec::new();
        let mut round = 0;
        while pool.len() < dummies.len() {
            for a in alphabet {
                let name = if round == 0 { a.to_string() } else { format!("{}{}", a, round) };
                if !used.contains(name.as_str()) {
                    pool.push(name);
                }
            }
            round += 1;
            if alphabet.is_empty() {
                pool.extend((pool.len()..dummies.len()).map(|k| format!("x{}", k)));
            }
        }
        dummies.into_iter().zip(pool).collect()
    }

    fn label(&self, i: &Index, names: &HashMap<u32, String>) -> String {
        match &i.label {
            Label::Name(n) => n.to_string(),
            Label::Dummy(k) => names.get(k).cloned().unwrap_or_else(|| format!("_{}", k)),
        }
    }

    pub fn factor(&self, f: &Factor, names: &HashMap<u32, String>) -> String {
        match self.format {
            Format::Latex => self.factor_latex(f, names),
            _ => {
                let ix: Vec<String> = f
                    .indices
                    .iter()
                    .map(|i| format!("{}{}", if i.up { "" } else { "-" }, self.label(i, names)))
                    .collect();
                let mut s = format!("{}[{}]", f.head, ix.join(","));
                let cd = self.session.covd_name().unwrap_or("CD");
                for d in f.derivs.iter().rev() {
                    s = format!("{}[{}{}][{}]", cd, if d.up { "" } else { "-" }, self.label(d, names), s);
                }
                s
            }
        }
    }

    fn index_groups(&self, ix: &[Index], names: &HashMap<u32, String>) -> String {
        let mut out = String::new();
        let mut k = 0;
        while k < ix.len() {
            let up = ix[k].up;
            let mut j = k;
            let mut labels = String::new();
            while j < ix.len() && ix[j].up == up {
                labels.push_str(&self.label(&ix[j], names));
                j += 1;
            }
            if k > 0 {
                out.push_str("{}");
            }
            out.push_str(if up { "^{" } else { "_{" });
            out.push_str(&labels);
            out.push('}');
            k = j;
        }
        out
    }

    fn factor_latex(&self, f: &Factor, names: &HashMap<u32, String>) -> String {
        let info = self.session.tensor(&f.head);
        let print = info.map(|i| i.print.clone()).unwrap_or_else(|| f.head.to_string());
        let mut s = String::new();
        let nabla = if self.session.is_flat() { "\\partial" } else { "\\nabla" };
        for d in &f.derivs {
            s.push_str(nabla);
            s.push_str(&self.index_groups(std::slice::from_ref(d), names));
        }
        s.push_str(&print);
        s.push_str(&self.index_groups(&f.indices, names));
        s
    }
}
