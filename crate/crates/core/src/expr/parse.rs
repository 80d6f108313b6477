//! Recursive-descent parser for the plain text format.
//!
//! The grammar is slightly wider than what [`parse`] accepts: calls
//! `name(args, key=value)`, brace lists, rules `a -> b` and equations `a == b`
//! are parsed into the [`Ast`] so that the script language can reuse it.

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::coeff::Coeff;
use crate::error::{Error, Result};

use super::{covd, Expr, Factor, Index, Session, Term};

#[derive(Clone, Debug, PartialEq)]
pub struct AstIndex {
    pub label: String,
    pub up: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Num(BigRational),
    Ident(String),
    Tensor(String, Vec<AstIndex>),
    Deriv(String, AstIndex, Box<Ast>),
    Call(String, Vec<Ast>, Vec<(String, Ast)>),
    List(Vec<Ast>),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, u32),
    Rule(Box<Ast>, Box<Ast>),
    Equation(Box<Ast>, Box<Ast>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(&'static str),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

const SYMBOLS: [&str; 15] = ["->", "==", "[", "]", "(", ")", "{", "}", ",", "+", "-", "*", "/", "^", "="];

fn lex(text: &str) -> Result<Lexer> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (l0, c0) = (line, col);
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Int(s.parse().expect("digits")), l0, c0));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            toks.push((Tok::Ident(s), l0, c0));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                toks.push((Tok::Sym(s), l0, c0));
            }
            None => {
                return Err(Error::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{}`", c),
                })
            }
        }
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks })
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (_, line, col) = &self.toks[self.pos];
        Err(Error::Syntax {
            line: *line,
            col: *col,
            msg: msg.into(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Tok::Sym(x) if *x == s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = describe(self.peek());
            self.err(format!("expected `{}`, found {}", s, found))
        }
    }

    fn top(&mut self) -> Result<Ast> {
        let lhs = self.sum()?;
        if self.eat("->") {
            let rhs = self.sum()?;
            return Ok(Ast::Rule(Box::new(lhs), Box::new(rhs)));
        }
        if self.eat("==") {
            let rhs = self.sum()?;
            return Ok(Ast::Equation(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<Ast> {
        let mut lhs = self.product()?;
        loop {
            if self.eat("+") {
                let r = self.product()?;
                lhs = Ast::Add(Box::new(lhs), Box::new(r));
            } else if self.eat("-") {
                let r = self.product()?;
                lhs = Ast::Sub(Box::new(lhs), Box::new(r));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Ast> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat("*") {
                let r = self.unary()?;
                lhs = Ast::Mul(Box::new(lhs), Box::new(r));
            } else if self.eat("/") {
                let r = self.unary()?;
                lhs = Ast::Div(Box::new(lhs), Box::new(r));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Ast> {
        if self.eat("-") {
            return Ok(Ast::Neg(Box::new(self.unary()?)));
        }
        if self.eat("+") {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat("^") {
            match self.bump() {
                Tok::Int(n) => {
                    let n: u32 = n.try_into().map_err(|_| Error::Syntax {
                        line: 0,
                        col: 0,
                        msg: "exponent too large".into(),
                    })?;
                    return Ok(Ast::Pow(Box::new(base), n));
                }
                _ => {
                    self.pos -= 1;
                    return self.err("expected a non-negative integer exponent");
                }
            }
        }
        Ok(base)
    }

    fn index_list(&mut self) -> Result<Vec<AstIndex>> {
        let mut out = Vec::new();
        if self.eat("]") {
            return Ok(out);
        }
        loop {
            let up = !self.eat("-");
            match self.bump() {
                Tok::Ident(label) => out.push(AstIndex { label, up }),
                t => {
                    self.pos -= 1;
                    return self.err(format!("expected an index label, found {}", describe(&t)));
                }
            }
            if self.eat("]") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Ast::Num(BigRational::from_integer(n)))
            }
            Tok::Ident(name) => {
                self.bump();
                if self.eat("[") {
                    let ix = self.index_list()?;
                    if self.eat("[") {
                        if ix.len() != 1 {
                            return self.err("a derivative takes exactly one index");
                        }
                        let arg = self.sum()?;
                        self.expect("]")?;
                        return Ok(Ast::Deriv(name, ix.into_iter().next().unwrap(), Box::new(arg)));
                    }
                    return Ok(Ast::Tensor(name, ix));
                }
                if self.eat("(") {
                    let mut args = Vec::new();
                    let mut kwargs = Vec::new();
                    if !self.eat(")") {
                        loop {
                            if let (Tok::Ident(k), Tok::Sym("=")) = (self.peek().clone(), self.peek_at(1).clone()) {
                                self.bump();
                                self.bump();
                                kwargs.push((k, self.top()?));
                            } else {
                                args.push(self.top()?);
                            }
                            if self.eat(")") {
                                break;
                            }
                            self.expect(",")?;
                        }
                    }
                    return Ok(Ast::Call(name, args, kwargs));
                }
                Ok(Ast::Ident(name))
            }
            Tok::Sym("(") => {
                self.bump();
                let e = self.top()?;
                self.expect(")")?;
                Ok(e)
            }
            Tok::Sym("{") => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat("}") {
                    loop {
                        items.push(self.top()?);
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Ok(Ast::List(items))
            }
            t => self.err(format!("unexpected {}", describe(&t))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{}`", n),
        Tok::Ident(s) => format!("`{}`", s),
        Tok::Sym(s) => format!("`{}`", s),
        Tok::End => "end of input".to_string(),
    }
}

/// Parses text into the syntax tree without interpreting names.
pub fn parse_ast(text: &str) -> Result<Ast> {
    let lx = lex(text)?;
    let mut p = Parser { toks: lx.toks, pos: 0 };
    let ast = p.top()?;
    if *p.peek() != Tok::End {
        let found = describe(p.peek());
        return p.err(format!("unexpected {} after expression", found));
    }
    Ok(ast)
}

/// Parses an expression in the plain format against the session's declarations.
pub fn parse(text: &str, session: &Session) -> Result<Expr> {
    let ast = parse_ast(text)?;
    eval_ast(&ast, session)
}

pub(crate) fn make_index(ix: &AstIndex, session: &Session) -> Result<Index> {
    if !session.is_index_label(&ix.label) {
        return Err(Error::UnknownIndex(ix.label.clone()));
    }
    Ok(Index::new(&ix.label, ix.up))
}

/// Builds a single tensor factor after checking the declaration.
pub fn make_tensor(head: &str, ixs: &[AstIndex], session: &Session) -> Result<Expr> {
    let info = session
        .tensor(head)
        .ok_or_else(|| Error::UndeclaredHead(head.to_string()))?;
    if info.rank != ixs.len() {
        return Err(Error::RankMismatch {
            head: head.to_string(),
            expected: info.rank,
            got: ixs.len(),
        });
    }
    let indices = ixs.iter().map(|i| make_index(i, session)).collect::<Result<Vec<_>>>()?;
    let t = Term::from_factor(Factor::new(head, indices)).normalize_labels()?;
    Ok(Expr::from_term(t))
}

pub fn apply_covd(name: &str, ix: &AstIndex, arg: &Expr, session: &Session) -> Result<Expr> {
    if session.covd_name() != Some(name) {
        return Err(Error::UndeclaredHead(name.to_string()));
    }
    covd(arg, &make_index(ix, session)?)
}

/// Divides by an expression that must be a pure (factor-free) scalar.
pub fn divide(num: &Expr, den: &Expr) -> Result<Expr> {
    if den.terms.iter().any(|t| !t.factors.is_empty()) {
        return Err(Error::Invalid("can only divide by a scalar coefficient".into()));
    }
    let total = den.terms.iter().fold(Coeff::zero(), |acc, t| &acc + &t.coeff);
    let inv = total
        .recip()
        .ok_or_else(|| Error::Invalid("division by zero".into()))?;
    Ok(num.scale(&inv))
}

pub fn power(base: &Expr, n: u32) -> Result<Expr> {
    let mut r = Expr::scalar(Coeff::one());
    for _ in 0..n {
        r = r.mul(base)?;
    }
    Ok(r)
}

fn eval_ast(ast: &Ast, s: &Session) -> Result<Expr> {
    let e = match ast {
        Ast::Num(r) => Expr::scalar(Coeff::from(r.clone())),
        Ast::Ident(name) => {
            if s.is_constant(name) {
                Expr::scalar(Coeff::var(name))
            } else if s.tensor(name).is_some() {
                return Err(Error::Invalid(format!("`{}` needs an index list", name)));
            } else {
                return Err(Error::UndeclaredHead(name.clone()));
            }
        }
        Ast::Tensor(h, ix) => make_tensor(h, ix, s)?,
        Ast::Deriv(cd, ix, arg) => apply_covd(cd, ix, &eval_ast(arg, s)?, s)?,
        Ast::Neg(a) => eval_ast(a, s)?.neg(),
        Ast::Add(a, b) => eval_ast(a, s)?.add(&eval_ast(b, s)?),
        Ast::Sub(a, b) => eval_ast(a, s)?.sub(&eval_ast(b, s)?),
        Ast::Mul(a, b) => eval_ast(a, s)?.mul(&eval_ast(b, s)?)?,
        Ast::Div(a, b) => divide(&eval_ast(a, s)?, &eval_ast(b, s)?)?,
        Ast::Pow(a, n) => power(&eval_ast(a, s)?, *n)?,
        Ast::Call(name, ..) => return Err(Error::Invalid(format!("function call `{}` is not an expression", name))),
        Ast::List(_) | Ast::Rule(..) | Ast::Equation(..) => {
            return Err(Error::Invalid("expected a single expression".into()))
        }
    };
    Ok(renumber(e))
}

/// Renumbers dummies in every term by first appearance in slot order and
/// merges terms whose factors then coincide, so that `(1 + k)*T` stays one term.
pub fn renumber(e: Expr) -> Expr {
    let mut acc: IndexMap<Vec<Factor>, Coeff> = IndexMap::new();
    for t in e.terms {
        let t = t.renumber_dummies();
        let c = acc.entry(t.factors).or_insert_with(Coeff::zero);
        *c = &*c + &t.coeff;
    }
    Expr::from_terms(acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(f, c)| Term::new(c, f)))
}
