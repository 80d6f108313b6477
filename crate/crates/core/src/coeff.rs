//! Exact coefficients: rational functions in the declared constant symbols.
//!
//! A [`Poly`] is a sparse multivariate polynomial with rational coefficients.
//! A [`Coeff`] is a reduced quotient of two such polynomials. The denominator
//! is always normalized so its leading coefficient (in lex order) is one, and
//! numerator and denominator share no common factor.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Sym = Arc<str>;

/// A power product of symbols, sorted by symbol name.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Sym, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: &Sym) -> Self {
        Monomial(vec![(s.clone(), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &str) -> u32 {
        self.0
            .iter()
            .find(|(v, _)| &**v == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> &[(Sym, u32)] {
        &self.0
    }

    /// Splits into the part over symbols accepted by `pred` and the rest.
    pub fn split(&self, pred: impl Fn(&str) -> bool) -> (Monomial, Monomial) {
        let (a, b): (Vec<_>, Vec<_>) = self.0.iter().cloned().partition(|(v, _)| pred(v));
        (Monomial(a), Monomial(b))
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::new();
        let mut j = 0;
        for (v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *v {
                let oe = other.0[j].1;
                j += 1;
                match e.cmp(&oe) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v.clone(), e - oe)),
                }
            } else {
                out.push((v.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    fn without(&self, s: &str) -> Monomial {
        Monomial(self.0.iter().filter(|(v, _)| &**v != s).cloned().collect())
    }
}

impl Ord for Monomial {
    /// Lex order with alphabetically earlier symbols most significant.
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, ea)), Some((b, eb))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if ea != eb {
                            return ea.cmp(eb);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(name: &str) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(&Sym::from(name)), BigRational::one());
        Poly { terms }
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Monomial, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn degree_in(&self, s: &str) -> u32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..n {
            r = &r * self;
        }
        r
    }

    /// Coefficients of `self` viewed as a univariate polynomial in `s`.
    fn univariate(&self, s: &str) -> Vec<Poly> {
        let deg = self.degree_in(s) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(s) as usize;
            out[e].add_term(m.without(s), c.clone());
        }
        out
    }

    fn from_univariate(coeffs: &[Poly], s: &Sym) -> Poly {
        let mut out = Poly::zero();
        for (e, c) in coeffs.iter().enumerate() {
            let m = if e == 0 {
                Monomial::one()
            } else {
                Monomial(vec![(s.clone(), e as u32)])
            };
            for (k, v) in &c.terms {
                out.add_term(k.mul(&m), v.clone());
            }
        }
        out
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        let (dm, dc) = d.leading().map(|(m, c)| (m.clone(), c.clone()))?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let m = rm.div(&dm)?;
            let c = rc / &dc;
            let t = Poly::from_terms([(m.clone(), c.clone())]);
            rem = &rem - &(d * &t);
            q.add_term(m, c);
        }
        Some(q)
    }

    /// Normalize so that the leading coefficient is one.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => Poly::zero(),
        }
    }

    fn content_in(&self, s: &str) -> Poly {
        let mut g = Poly::zero();
        for c in self.univariate(s) {
            if c.is_zero() {
                continue;
            }
            g = Poly::gcd(&g, &c);
            if g.is_constant() {
                return Poly::one();
            }
        }
        g
    }

    fn pseudo_rem(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
        let mut r: Vec<Poly> = a.to_vec();
        let db = b.len() - 1;
        let lb = &b[db];
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            if lr.is_zero() {
                r.pop();
                continue;
            }
            for c in r.iter_mut() {
                *c = &*c * lb;
            }
            let shift = dr - db;
            for (i, bc) in b.iter().enumerate() {
                let t = bc * &lr;
                r[i + shift] = &r[i + shift] - &t;
            }
            r.pop();
        }
        while r.last().map(|c| c.is_zero()).unwrap_or(false) {
            r.pop();
        }
        r
    }

    /// Monic greatest common divisor.
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.monic();
        }
        if b.is_zero() {
            return a.monic();
        }
        if a.is_constant() || b.is_constant() {
            return Poly::one();
        }
        let va = a.vars();
        let vb = b.vars();
        let x = match va.iter().find(|v| vb.contains(*v)) {
            Some(x) => x.clone(),
            None => {
                // no shared variable: gcd divides the content of each
                let v = va.iter().next().unwrap().clone();
                return Poly::gcd(&a.content_in(&v), b);
            }
        };
        let ca = a.content_in(&x);
        let cb = b.content_in(&x);
        let c = Poly::gcd(&ca, &cb);
        let mut pa = a.div_exact(&ca).expect("content divides").univariate(&x);
        let mut pb = b.div_exact(&cb).expect("content divides").univariate(&x);
        if pa.len() < pb.len() {
            std::mem::swap(&mut pa, &mut pb);
        }
        while pb.len() > 1 {
            let r = Poly::pseudo_rem(&pa, &pb);
            pa = pb;
            if r.is_empty() {
                pb = vec![];
                break;
            }
            let rp = Poly::from_univariate(&r, &x);
            let cont = rp.content_in(&x);
            pb = rp.div_exact(&cont).expect("content divides").univariate(&x);
        }
        let g = if pb.len() == 1 {
            // nonzero constant remainder in x: primitive parts are coprime
            Poly::one()
        } else {
            let p = Poly::from_univariate(&pa, &x);
            let cont = p.content_in(&x);
            p.div_exact(&cont).expect("content divides")
        };
        (&c * &g).monic()
    }

    /// Replace each symbol by a rational function.
    pub fn substitute(&self, f: &dyn Fn(&str) -> Option<Coeff>) -> Coeff {
        let mut acc = Coeff::zero();
        for (m, c) in &self.terms {
            let mut t = Coeff::from(c.clone());
            for (v, e) in &m.0 {
                let base = f(v).unwrap_or_else(|| Coeff::var(v));
                for _ in 0..*e {
                    t = &t * &base;
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    fn fmt_with(&self, f: &mut fmt::Formatter<'_>, latex: bool) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| b.cmp(a)));
        for (i, (m, c)) in ts.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = fmt_monomial(m, latex);
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs, latex))?;
            } else if abs.is_one() {
                write!(f, "{}", mono)?;
            } else if latex {
                write!(f, "{} {}", fmt_rational(&abs, true), mono)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs, false), mono)?;
            }
        }
        Ok(())
    }
}

fn fmt_rational(r: &BigRational, latex: bool) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if latex {
        format!("\\tfrac{{{}}}{{{}}}", r.numer(), r.denom())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_monomial(m: &Monomial, latex: bool) -> String {
    let parts: Vec<String> = m
        .0
        .iter()
        .map(|(v, e)| {
            let name = if latex { latex_symbol(v) } else { v.to_string() };
            if *e == 1 {
                name
            } else if latex {
                format!("{}^{{{}}}", name, e)
            } else {
                format!("{}^{}", name, e)
            }
        })
        .collect();
    parts.join(if latex { " " } else { "*" })
}

/// `C12` renders as `C_{12}`.
fn latex_symbol(s: &str) -> String {
    let split = s.find(|c: char| c.is_ascii_digit());
    match split {
        Some(i) if i > 0 && s[i..].chars().all(|c| c.is_ascii_digit()) => {
            format!("{}_{{{}}}", &s[..i], &s[i..])
        }
        _ => s.to_string(),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_with(f, false)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c.clone());
        }
        r
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut r = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                r.add_term(m1.mul(m2), c1 * c2);
            }
        }
        r
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

/// A reduced rational function over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    num: Poly,
    den: Poly,
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::zero()
    }
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Coeff {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Coeff::from(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Coeff::from(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn var(name: &str) -> Self {
        Coeff {
            num: Poly::var(name),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        Coeff { num: p, den: Poly::one() }
    }

    /// Builds `num / den`, reducing to lowest terms. Panics on a zero denominator.
    pub fn from_parts(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        Coeff::reduce(num, den)
    }

    fn reduce(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return Coeff::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.recip();
            return Coeff {
                num: num.scale(&inv),
                den: Poly::one(),
            };
        }
        let g = Poly::gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        let lc = den.leading().map(|(_, c)| c.clone()).unwrap();
        let inv = lc.recip();
        let den = den.scale(&inv);
        let num = num.scale(&inv);
        if den.is_constant() {
            Coeff { num, den: Poly::one() }
        } else {
            Coeff { num, den }
        }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num.constant_value() == Some(BigRational::one())
    }

    pub fn is_rational(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_rational()
            .filter(|r| r.is_integer())
            .and_then(|r| r.numer().to_i64())
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut v = self.num.vars();
        v.extend(self.den.vars());
        v
    }

    pub fn recip(&self) -> Option<Coeff> {
        if self.is_zero() {
            None
        } else {
            Some(Coeff::reduce(self.den.clone(), self.num.clone()))
        }
    }

    pub fn div(&self, o: &Coeff) -> Option<Coeff> {
        o.recip().map(|r| self * &r)
    }

    pub fn pow(&self, n: u32) -> Coeff {
        Coeff {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    /// Sign of the leading numerator coefficient, used to normalize proportional terms.
    pub fn leading_sign(&self) -> i32 {
        match self.num.leading() {
            Some((_, c)) if c.is_negative() => -1,
            Some(_) => 1,
            None => 0,
        }
    }

    pub fn substitute(&self, f: &dyn Fn(&str) -> Option<Coeff>) -> Coeff {
        let n = self.num.substitute(f);
        let d = self.den.substitute(f);
        n.div(&d).expect("substitution made a denominator vanish")
    }

    /// Substitution that reports a vanishing denominator instead of panicking.
    pub fn try_substitute(&self, f: &dyn Fn(&str) -> Option<Coeff>) -> Option<Coeff> {
        let n = self.num.substitute(f);
        let d = self.den.substitute(f);
        n.div(&d)
    }

    /// Whether the numerator needs parentheses when printed as a product factor.
    pub fn is_compound(&self) -> bool {
        !self.den.is_constant() || self.num.len() > 1
    }

    pub fn to_latex(&self) -> String {
        struct L<'a>(&'a Poly);
        impl fmt::Display for L<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with(f, true)
            }
        }
        if self.den.is_constant() {
            format!("{}", L(&self.num))
        } else {
            format!("\\frac{{{}}}{{{}}}", L(&self.num), L(&self.den))
        }
    }
}

impl From<BigRational> for Coeff {
    fn from(r: BigRational) -> Self {
        Coeff {
            num: Poly::constant(r),
            den: Poly::one(),
        }
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::int(n)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            write!(f, "{}", self.num)
        } else {
            let n = if self.num.len() > 1 {
                format!("({})", self.num)
            } else {
                self.num.to_string()
            };
            let d = if self.den.len() > 1 || !self.den.terms.keys().all(|m| m.0.len() <= 1 && m.degree() <= 1) {
                format!("({})", self.den)
            } else {
                self.den.to_string()
            };
            write!(f, "{}/{}", n, d)
        }
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            let num = &self.num + &o.num;
            if self.den.is_constant() {
                return Coeff { num, den: Poly::one() };
            }
            return Coeff::reduce(num, self.den.clone());
        }
        let num = &(&self.num * &o.den) + &(&o.num * &self.den);
        Coeff::reduce(num, &self.den * &o.den)
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        self + &(-o)
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        if self.is_zero() || o.is_zero() {
            return Coeff::zero();
        }
        if self.den.is_constant() && o.den.is_constant() {
            return Coeff {
                num: &self.num * &o.num,
                den: Poly::one(),
            };
        }
        Coeff::reduce(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for Coeff {
    type Output = Coeff;
    fn add(self, o: Coeff) -> Coeff {
        &self + &o
    }
}

impl Sub for Coeff {
    type Output = Coeff;
    fn sub(self, o: Coeff) -> Coeff {
        &self - &o
    }
}

impl Mul for Coeff {
    type Output = Coeff;
    fn mul(self, o: Coeff) -> Coeff {
        &self * &o
    }
}

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Coeff {
        Coeff::var("d")
    }

    #[test]
    fn reduces_common_factors() {
        // (d^2 - 1)/(d - 1) = d + 1
        let num = &(&d() * &d()) - &Coeff::one();
        let den = &d() - &Coeff::one();
        let q = num.div(&den).unwrap();
        assert_eq!(q, &d() + &Coeff::one());
        assert!(q.denom().is_constant());
    }

    #[test]
    fn multivariate_gcd() {
        let x = Poly::var("x");
        let y = Poly::var("y");
        let a = &(&x + &y) * &(&x - &y);
        let b = &(&x + &y) * &(&x + &Poly::one());
        let g = Poly::gcd(&a, &b);
        assert_eq!(g, (&x + &y).monic());
    }

    #[test]
    fn sums_of_fractions() {
        // 1/(d-2) - 1/(d-1) = 1/((d-2)(d-1))
        let two = Coeff::int(2);
        let a = Coeff::one().div(&(&d() - &two)).unwrap();
        let b = Coeff::one().div(&(&d() - &Coeff::one())).unwrap();
        let s = &a - &b;
        let expect = Coeff::one()
            .div(&(&(&d() - &two) * &(&d() - &Coeff::one())))
            .unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn display_orders_by_degree() {
        let c = &(&Coeff::int(-4) - &Coeff::var("C1")) - &Coeff::var("C2");
        assert_eq!(c.to_string(), "-4 - C1 - C2");
        let c = &(&Coeff::int(2) + &(&Coeff::ratio(1, 2) * &Coeff::var("C1"))) + &Coeff::var("C2");
        assert_eq!(c.to_string(), "2 + 1/2*C1 + C2");
    }

    #[test]
    fn substitution() {
        let c = &Coeff::var("C1") + &Coeff::var("C2");
        let s = c.substitute(&|v| if v == "C2" { Some(Coeff::int(3)) } else { None });
        assert_eq!(s, &Coeff::var("C1") + &Coeff::int(3));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(Coeff::one().div(&Coeff::zero()).is_none());
    }
}
