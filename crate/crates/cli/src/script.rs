//! The statement language shared by script files and the interactive prompt.
//!
//! A script is a sequence of statements, one per line (a trailing `\`
//! continues a statement on the next line, `#` starts a comment):
//!
//! ```text
//! manifold M 4 a..m
//! metric g on M signature -1
//! tensor T(a,b,c) sym {{a,b},{c}} print T
//! constants k
//! conventions riemann=+1 ricci=+1
//! let x = canon(Ricci[-c,-a])
//! print x
//! canon Ricci[-c,-a]
//! expect x == Ricci[-a,-c]
//! expect-zero x - Ricci[-c,-a]
//! expect-count 1 x
//! check-numeric Riemann[-a,-b,-c,-d] + Riemann[-b,-a,-c,-d]
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::{Duration, Instant};

use txs_core::algebra::collect_tensors;
use txs_core::expr::numeric::{evaluate, lcg, random_assignment};
use txs_core::expr::{parse_ast, Ast, Dim, Format, Session, TensorKind};
use txs_core::{Error, Expr};

use crate::eval::{is_builtin, sym_spec, Evaluator};
use crate::value::{is_zero, values_equal, Value};

#[derive(Clone, Debug)]
pub struct Options {
    pub format: Format,
    pub keep_going: bool,
    /// Seed for the random component assignments of `check-numeric`.
    pub seed: u64,
    /// Sign conventions `(riemann, ricci)` applied before the first statement.
    pub conventions: Option<(i32, i32)>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            format: Format::Plain,
            keep_going: false,
            seed: 1,
            conventions: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Fail,
    Error,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Error => "error",
        })
    }
}

#[derive(Clone, Debug)]
pub struct StatementReport {
    pub line: usize,
    pub source: String,
    pub status: Status,
    pub elapsed: Duration,
    /// Rendered result for `ok`, the message for `fail` and `error`.
    pub output: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub statements: Vec<StatementReport>,
}

impl RunReport {
    /// 0 when every statement succeeded, 1 after an assertion failure,
    /// 2 after any other error.
    pub fn exit_code(&self) -> i32 {
        if self.statements.iter().any(|s| s.status == Status::Error) {
            2
        } else if self.statements.iter().any(|s| s.status == Status::Fail) {
            1
        } else {
            0
        }
    }

    /// Outputs of the successful statements, one per line.
    pub fn outputs(&self) -> String {
        let mut out = String::new();
        for s in &self.statements {
            if let (Status::Ok, Some(o)) = (s.status, &s.output) {
                out.push_str(o);
                out.push('\n');
            }
        }
        out
    }

    /// One status line per statement with its timing.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.statements {
            out.push_str(&format!(
                "line {:>4}  {:<5}  {:>9.3} ms  {}\n",
                s.line,
                s.status,
                s.elapsed.as_secs_f64() * 1e3,
                s.source
            ));
        }
        out
    }
}

/// How a single statement went wrong.
#[derive(Debug)]
pub enum Problem {
    /// An assertion did not hold.
    Fail(String),
    Error(Error),
}

impl From<Error> for Problem {
    fn from(e: Error) -> Self {
        Problem::Error(e)
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Fail(m) => f.write_str(m),
            Problem::Error(e) => write!(f, "{}", e),
        }
    }
}

type Outcome = std::result::Result<Option<String>, Problem>;

/// A statement with the line it starts on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Statement {
    pub line: usize,
    pub text: String,
}

/// Splits source text into statements, dropping comments and blank lines and
/// joining `\` continuations.
pub fn split_statements(src: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    let mut pending: Option<Statement> = None;
    for (k, raw) in src.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim_end();
        let (body, cont) = match line.strip_suffix('\\') {
            Some(b) => (b, true),
            None => (line, false),
        };
        let st = pending.get_or_insert_with(|| Statement {
            line: k + 1,
            text: String::new(),
        });
        if !st.text.is_empty() {
            st.text.push(' ');
        }
        st.text.push_str(body.trim());
        if !cont {
            let st = pending.take().unwrap();
            if !st.text.is_empty() {
                out.push(st);
            }
        }
    }
    if let Some(st) = pending {
        if !st.text.is_empty() {
            out.push(st);
        }
    }
    out
}

pub struct Interpreter {
    pub session: Session,
    pub vars: HashMap<String, Value>,
    pub options: Options,
    transcript: Vec<String>,
}

impl Interpreter {
    /// An interpreter over an empty session.
    pub fn new(options: Options) -> Self {
        Self::with_session(Session::new(), options)
    }

    pub fn with_session(mut session: Session, options: Options) -> Self {
        if let Some((r, c)) = options.conventions {
            session.riemann_sign = r;
            session.ricci_sign = c;
        }
        Interpreter {
            session,
            vars: HashMap::new(),
            options,
            transcript: Vec::new(),
        }
    }

    /// Statements executed without error so far, as a re-runnable script.
    pub fn transcript(&self) -> String {
        let mut s = String::new();
        for t in &self.transcript {
            s.push_str(t);
            s.push('\n');
        }
        s
    }

    /// Runs every statement of `src`, stopping at the first failure unless
    /// `keep_going` is set.
    pub fn run_source(&mut self, src: &str) -> RunReport {
        let mut report = RunReport::default();
        for st in split_statements(src) {
            let r = self.run_statement(&st);
            let stop = r.status != Status::Ok && !self.options.keep_going;
            report.statements.push(r);
            if stop {
                break;
            }
        }
        report
    }

    pub fn run_statement(&mut self, st: &Statement) -> StatementReport {
        let start = Instant::now();
        let outcome = self.execute(&st.text);
        let elapsed = start.elapsed();
        let (status, output) = match outcome {
            Ok(o) => (Status::Ok, o),
            Err(Problem::Fail(m)) => (Status::Fail, Some(format!("line {}: assertion failed: {}", st.line, m))),
            Err(Problem::Error(e)) => (Status::Error, Some(format!("line {}: {}", st.line, e))),
        };
        if status != Status::Error {
            self.transcript.push(st.text.clone());
        }
        StatementReport {
            line: st.line,
            source: st.text.clone(),
            status,
            elapsed,
            output,
        }
    }

    /// Executes one statement, returning its rendered output if it has one.
    pub fn execute(&mut self, text: &str) -> Outcome {
        let text = text.trim();
        let (word, rest) = split_word(text);
        match word {
            "manifold" => self.manifold(rest),
            "metric" => self.metric(rest),
            "tensor" => self.tensor(rest),
            "constants" | "constant" => {
                for c in words(rest) {
                    self.session.declare_constant(c)?;
                }
                Ok(None)
            }
            "conventions" => self.conventions(rest),
            "let" => {
                let (name, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| Error::Invalid("expected `let name = expression`".into()))?;
                let name = name.trim();
                if !is_identifier(name) {
                    return Err(Error::Invalid(format!("`{}` is not a valid name", name)).into());
                }
                if self.session.tensor(name).is_some() || self.session.is_constant(name) {
                    return Err(Error::Duplicate(name.to_string()).into());
                }
                let v = self.eval_text(expr)?;
                self.vars.insert(name.to_string(), v);
                Ok(None)
            }
            "print" => {
                let v = self.eval_text(rest)?;
                Ok(Some(self.render(&v)))
            }
            "expect" => self.expect(rest),
            "expect-zero" => {
                let v = self.eval_text(rest)?;
                if is_zero(&v, &self.session)? {
                    Ok(None)
                } else {
                    Err(Problem::Fail(format!("expected zero, got {}", self.canonical(&v)?)))
                }
            }
            "expect-count" => {
                let (n, e) = split_word(rest);
                let n: usize = n
                    .parse()
                    .map_err(|_| Error::Invalid(format!("`{}` is not a count", n)))?;
                let v = self.eval_text(e)?;
                if v.count() == n {
                    Ok(None)
                } else {
                    Err(Problem::Fail(format!(
                        "expected {} element(s), got {}: {}",
                        n,
                        v.count(),
                        self.render(&v)
                    )))
                }
            }
            "check-numeric" => self.check_numeric(rest),
            w if is_builtin(w) && !rest.is_empty() && !rest.starts_with('(') => {
                let v = self.eval_text(&format!("{}({})", w, rest))?;
                Ok(Some(self.render(&v)))
            }
            _ => {
                let v = self.eval_text(text)?;
                Ok(Some(self.render(&v)))
            }
        }
    }

    pub fn render(&self, v: &Value) -> String {
        v.render(&self.session, self.options.format)
    }

    fn eval_text(&mut self, text: &str) -> Result<Value, Problem> {
        let ast = parse_ast(text.trim())?;
        self.eval_ast(&ast)
    }

    fn eval_ast(&mut self, ast: &Ast) -> Result<Value, Problem> {
        let mut ev = Evaluator {
            session: &mut self.session,
            vars: &self.vars,
        };
        Ok(ev.eval(ast)?)
    }

    /// A value in the normal form used for comparison.
    fn canonical(&self, v: &Value) -> Result<String, Problem> {
        let v = match v {
            Value::Expr(e) => Value::Expr(collect_tensors(e, &self.session)?),
            Value::Grouped(g) => Value::Expr(collect_tensors(&g.to_expr(), &self.session)?),
            v => v.clone(),
        };
        Ok(self.render(&v))
    }

    fn expect(&mut self, rest: &str) -> Outcome {
        let ast = parse_ast(rest.trim())?;
        let Ast::Equation(a, b) = ast else {
            return Err(Error::Invalid("expected `expect left == right`".into()).into());
        };
        let l = self.eval_ast(&a)?;
        let r = self.eval_ast(&b)?;
        if values_equal(&l, &r, &self.session)? {
            Ok(None)
        } else {
            Err(Problem::Fail(format!(
                "sides differ\n  left:  {}\n  right: {}",
                self.canonical(&l)?,
                self.canonical(&r)?
            )))
        }
    }

    /// Evaluates an expression on random integer components and checks that
    /// every component vanishes.
    fn check_numeric(&mut self, rest: &str) -> Outcome {
        const TRIALS: u64 = 10;
        let v = self.eval_text(rest)?;
        let exprs: Vec<Expr> = match v {
            Value::Expr(e) => vec![e],
            Value::List(items) => items
                .into_iter()
                .map(|i| match i {
                    Value::Expr(e) => Ok(e),
                    v => Err(Error::Invalid(format!("cannot evaluate a {}", v.kind()))),
                })
                .collect::<Result<_, _>>()?,
            v => return Err(Error::Invalid(format!("cannot evaluate a {}", v.kind())).into()),
        };
        let dim = self
            .session
            .dim_int()
            .ok_or_else(|| Error::Invalid("numeric checks need a manifold of integer dimension".into()))?;
        for trial in 0..TRIALS {
            let mut next = lcg(self.options.seed.wrapping_add(trial));
            let a = random_assignment(&self.session, dim as usize, &mut next)?;
            for (k, e) in exprs.iter().enumerate() {
                let (_, arr) = evaluate(e, &self.session, &a)?;
                if !arr.is_zero() {
                    return Err(Problem::Fail(format!(
                        "element {} is nonzero for random components (trial {})",
                        k + 1,
                        trial + 1
                    )));
                }
            }
        }
        Ok(None)
    }

    fn manifold(&mut self, rest: &str) -> Outcome {
        let usage = || Error::Invalid("expected `manifold NAME DIM LABELS`, e.g. `manifold M 4 a..m`".into());
        let (name, rest) = split_word(rest);
        let (dim, labels) = split_word(rest);
        if name.is_empty() || dim.is_empty() || labels.is_empty() {
            return Err(usage().into());
        }
        let dim = match dim.parse::<i64>() {
            Ok(n) if n > 0 => Dim::Int(n),
            Ok(_) => return Err(Error::Invalid("the dimension must be positive".into()).into()),
            Err(_) if is_identifier(dim) => Dim::Sym(Arc::from(dim)),
            Err(_) => return Err(usage().into()),
        };
        let alphabet = alphabet(labels)?;
        self.session.declare_manifold(name, dim, alphabet)?;
        Ok(None)
    }

    fn metric(&mut self, rest: &str) -> Outcome {
        let toks = words(rest);
        let usage = || Error::Invalid("expected `metric NAME on MANIFOLD signature ±1 [covd CD] [flat] [print SYMBOL]`".into());
        let name = *toks.first().ok_or_else(usage)?;
        let mut det_sign = -1;
        let mut covd: Option<&str> = None;
        let mut flat = false;
        let mut print = name;
        let mut k = 1;
        while k < toks.len() {
            let arg = toks.get(k + 1).copied();
            match toks[k] {
                "on" => {
                    arg.ok_or_else(usage)?;
                    k += 2;
                }
                "signature" => {
                    det_sign = match arg {
                        Some("-1" | "-") => -1,
                        Some("+1" | "1" | "+") => 1,
                        _ => return Err(usage().into()),
                    };
                    k += 2;
                }
                "covd" => {
                    covd = Some(arg.ok_or_else(usage)?);
                    k += 2;
                }
                "print" => {
                    print = arg.ok_or_else(usage)?;
                    k += 2;
                }
                "flat" => {
                    flat = true;
                    k += 1;
                }
                _ => return Err(usage().into()),
            }
        }
        let covd = covd.unwrap_or(if flat { "PD" } else { "CD" });
        self.session.declare_metric(name, det_sign, covd, flat, print)?;
        Ok(None)
    }

    fn tensor(&mut self, rest: &str) -> Outcome {
        let rest = rest.trim();
        let name_end = rest.find(|c: char| c == '(' || c.is_whitespace()).unwrap_or(rest.len());
        let name = &rest[..name_end];
        if !is_identifier(name) {
            return Err(Error::Invalid("expected `tensor NAME(a,b,...) [sym SPEC] [print SYMBOL]`".into()).into());
        }
        let mut rest = rest[name_end..].trim_start();
        let mut slots: Vec<Arc<str>> = Vec::new();
        if let Some(r) = rest.strip_prefix('(') {
            let close = r
                .find(')')
                .ok_or_else(|| Error::Invalid("missing `)` in the slot list".into()))?;
            for l in r[..close].split(',').map(str::trim).filter(|l| !l.is_empty()) {
                if !is_identifier(l) {
                    return Err(Error::Invalid(format!("`{}` is not a slot label", l)).into());
                }
                slots.push(Arc::from(l));
            }
            rest = r[close + 1..].trim_start();
        }
        let mut print = name.to_string();
        if let Some(pos) = find_word(rest, "print") {
            print = rest[pos + 5..].trim().to_string();
            if print.is_empty() {
                return Err(Error::Invalid("`print` needs a symbol".into()).into());
            }
            rest = rest[..pos].trim_end();
        }
        let spec_text = match rest.strip_prefix("sym") {
            Some(r) if r.is_empty() || r.starts_with(char::is_whitespace) => r.trim_start(),
            _ => rest,
        };
        let spec = if spec_text.is_empty() {
            txs_core::symm::SymmetrySpec::none(slots.len())
        } else {
            sym_spec(&parse_ast(spec_text)?, &slots)?
        };
        self.session
            .declare_tensor(name, slots.len(), spec, &print, TensorKind::Plain)?;
        Ok(None)
    }

    fn conventions(&mut self, rest: &str) -> Outcome {
        let (r, c) = parse_conventions(rest)?;
        if let Some(r) = r {
            self.session.riemann_sign = r;
        }
        if let Some(c) = c {
            self.session.ricci_sign = c;
        }
        Ok(None)
    }
}

/// Reads `riemann=+1 ricci=-1` (space or comma separated, either optional).
pub fn parse_conventions(text: &str) -> txs_core::Result<(Option<i32>, Option<i32>)> {
    let mut out = (None, None);
    for item in words(text) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Invalid(format!("expected `name=±1`, got `{}`", item)))?;
        let v = match v.trim() {
            "+1" | "1" | "+" => 1,
            "-1" | "-" => -1,
            _ => return Err(Error::Invalid(format!("a convention sign is +1 or -1, got `{}`", v))),
        };
        match k.trim() {
            "riemann" => out.0 = Some(v),
            "ricci" => out.1 = Some(v),
            other => return Err(Error::Invalid(format!("unknown convention `{}`", other))),
        }
    }
    Ok(out)
}

/// Declarations equivalent to the default session: a manifold `M` of
/// dimension `dim` with labels `a..z` and a Lorentzian metric `g` with
/// covariant derivative `CD`.
pub fn standard_preamble(dim: &str) -> String {
    format!("manifold M {} a..z\nmetric g on M signature -1\n", dim)
}

/// Runs a script file against a fresh session.
pub fn run_script(path: &Path, options: Options) -> std::io::Result<RunReport> {
    let src = std::fs::read_to_string(path)?;
    Ok(Interpreter::new(options).run_source(&src))
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(k) => (&s[..k], s[k..].trim_start()),
        None => (s, ""),
    }
}

fn words(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .collect()
}

fn find_word(s: &str, w: &str) -> Option<usize> {
    s.match_indices(w).map(|(k, _)| k).find(|&k| {
        let before = s[..k].chars().next_back();
        let after = s[k + w.len()..].chars().next();
        before.is_none_or(char::is_whitespace) && after.is_none_or(char::is_whitespace)
    })
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

/// Index labels written as single labels and `x..y` letter ranges.
fn alphabet(text: &str) -> txs_core::Result<Vec<Arc<str>>> {
    let mut out: Vec<Arc<str>> = Vec::new();
    for item in words(text) {
        if let Some((a, b)) = item.split_once("..") {
            let (mut ca, mut cb) = (a.chars(), b.chars());
            match (ca.next(), ca.next(), cb.next(), cb.next()) {
                (Some(x), None, Some(y), None) if x.is_alphabetic() && y.is_alphabetic() && x <= y => {
                    for c in x..=y {
                        out.push(Arc::from(c.to_string().as_str()));
                    }
                }
                _ => return Err(Error::Invalid(format!("bad label range `{}`", item))),
            }
        } else if is_identifier(item) {
            out.push(Arc::from(item));
        } else {
            return Err(Error::Invalid(format!("`{}` is not an index label", item)));
        }
    }
    Ok(out)
}
