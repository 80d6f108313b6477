//! Exact component evaluation, used to check symbolic identities numerically.
//!
//! Every tensor is supplied by its all-covariant components; indices that
//! appear upstairs are raised with the inverse of the supplied metric. Ricci,
//! scalar curvature and Weyl components are derived from the Riemann array
//! when not given explicitly.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::symm::SymmetrySpec;

use super::{Expr, Index, Label, Session, TensorKind};

/// A dense array of exact components, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Array {
    pub dim: usize,
    pub rank: usize,
    pub data: Vec<BigRational>,
}

impl Array {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Array {
            dim,
            rank,
            data: vec![BigRational::zero(); dim.pow(rank as u32)],
        }
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &BigRational {
        &self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: BigRational) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
        let total = dim.pow(rank as u32);
        (0..total).map(move |mut k| {
            let mut v = vec![0; rank];
            for slot in (0..rank).rev() {
                v[slot] = k % dim;
                k /= dim;
            }
            v
        })
    }

    /// Symmetrizes over a signed group: `Σ_σ s_σ X[L∘σ]`.
    pub fn symmetrized(&self, spec: &SymmetrySpec, session: &Session) -> Result<Array> {
        let group = session.group(spec)?;
        let mut out = Array::zeros(self.dim, self.rank);
        for idx in Array::multi_indices(self.dim, self.rank) {
            let mut acc = BigRational::zero();
            for g in &group.elements {
                let v = self.get(&g.apply(&idx));
                if g.sign > 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            out.set(&idx, acc);
        }
        Ok(out)
    }

    fn respects(&self, spec: &SymmetrySpec) -> bool {
        Array::multi_indices(self.dim, self.rank).all(|idx| {
            spec.generators.iter().all(|g| {
                let v = self.get(&g.apply(&idx));
                if g.sign > 0 {
                    v == self.get(&idx)
                } else {
                    *v == -self.get(&idx)
                }
            })
        })
    }
}

/// Component values for the heads of an expression.
#[derive(Clone, Debug, Default)]
pub struct Assignment {
    pub dim: usize,
    pub arrays: HashMap<Arc<str>, Array>,
    pub constants: HashMap<Arc<str>, BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn invert(g: &Array) -> Result<Array> {
    let n = g.dim;
    let mut m: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| g.get(&[i, j]).clone()).collect()).collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { rat(1) } else { rat(0) }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| Error::Numeric("singular metric".into()))?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let p = m[col][col].clone();
        for j in 0..n {
            m[col][j] = &m[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    let a = &m[col][j] * &f;
                    m[r][j] -= a;
                    let b = &inv[col][j] * &f;
                    inv[r][j] -= b;
                }
            }
        }
    }
    let mut out = Array::zeros(n, 2);
    for i in 0..n {
        for j in 0..n {
            out.set(&[i, j], inv[i][j].clone());
        }
    }
    Ok(out)
}

/// A random symmetric integer metric with determinant `±1` (sign `det_sign`),
/// built as `L D Lᵀ` with `L` unit lower triangular.
pub fn random_metric(dim: usize, det_sign: i32, next: &mut dyn FnMut() -> i64) -> Array {
    let mut l = vec![vec![0i64; dim]; dim];
    for (i, row) in l.iter_mut().enumerate() {
        row[i] = 1;
        for v in row.iter_mut().take(i) {
            *v = next() % 3;
        }
    }
    let mut d = vec![1i64; dim];
    if det_sign < 0 && dim > 0 {
        d[0] = -1;
    }
    let mut g = Array::zeros(dim, 2);
    for i in 0..dim {
        for j in 0..dim {
            let v: i64 = (0..dim).map(|k| l[i][k] * d[k] * l[j][k]).sum();
            g.set(&[i, j], rat(v));
        }
    }
    g
}

/// Random components respecting each declared tensor's mono-term symmetries.
/// Curvature tensors other than Riemann are left to be derived.
pub fn random_assignment(session: &Session, dim: usize, next: &mut dyn FnMut() -> i64) -> Result<Assignment> {
    let mut a = Assignment {
        dim,
        ..Default::default()
    };
    for t in session.tensors.values() {
        match t.kind {
            TensorKind::Ricci | TensorKind::RicciScalar | TensorKind::Weyl => continue,
            TensorKind::Metric => {
                a.arrays.insert(t.name.clone(), random_metric(dim, session.det_sign(), next));
            }
            _ => {
                let mut raw = Array::zeros(dim, t.rank);
                for v in raw.data.iter_mut() {
                    *v = rat(next());
                }
                a.arrays.insert(t.name.clone(), raw.symmetrized(&t.sym, session)?);
            }
        }
    }
    Ok(a)
}

struct Ctx<'a> {
    session: &'a Session,
    a: &'a Assignment,
    ginv: Option<Array>,
    derived: HashMap<Arc<str>, Array>,
}

impl<'a> Ctx<'a> {
    fn new(session: &'a Session, a: &'a Assignment) -> Result<Self> {
        let mut c = Ctx {
            session,
            a,
            ginv: None,
            derived: HashMap::new(),
        };
        if let Some(m) = session.metric_name() {
            if let Some(g) = a.arrays.get(m) {
                c.ginv = Some(invert(g)?);
            }
        }
        Ok(c)
    }

    fn ginv(&self) -> Result<&Array> {
        self.ginv
            .as_ref()
            .ok_or_else(|| Error::Numeric("no metric components assigned".into()))
    }

    fn covariant(&mut self, head: &Arc<str>) -> Result<Array> {
        if let Some(x) = self.derived.get(head) {
            return Ok(x.clone());
        }
        if let Some(x) = self.a.arrays.get(head) {
            if let Some(info) = self.session.tensor(head) {
                if x.rank != info.rank || x.dim != self.a.dim {
                    return Err(Error::Numeric(format!("array for `{}` has the wrong shape", head)));
                }
                if !x.respects(&info.sym) {
                    return Err(Error::Numeric(format!("array for `{}` violates its symmetry", head)));
                }
            }
            self.derived.insert(head.clone(), x.clone());
            return Ok(x.clone());
        }
        let kind = self.session.kind(head);
        let n = self.a.dim;
        let r = rat(self.session.ricci_sign as i64);
        let x = match kind {
            TensorKind::Ricci => {
                let riem = self.curv(TensorKind::Riemann)?;
                let gi = self.ginv()?.clone();
                let mut out = Array::zeros(n, 2);
                for a in 0..n {
                    for b in 0..n {
                        let mut s = BigRational::zero();
                        for c in 0..n {
                            for d in 0..n {
                                s += gi.get(&[c, d]) * riem.get(&[a, c, b, d]);
                            }
                        }
                        out.set(&[a, b], &s * &r);
                    }
                }
                out
            }
            TensorKind::RicciScalar => {
                let ric = self.curv(TensorKind::Ricci)?;
                let gi = self.ginv()?;
                let mut s = BigRational::zero();
                for a in 0..n {
                    for b in 0..n {
                        s += gi.get(&[a, b]) * ric.get(&[a, b]);
                    }
                }
                Array { dim: n, rank: 0, data: vec![s] }
            }
            TensorKind::Weyl => self.weyl()?,
            _ => return Err(Error::Numeric(format!("no components assigned for `{}`", head))),
        };
        self.derived.insert(head.clone(), x.clone());
        Ok(x)
    }

    fn curv(&mut self, kind: TensorKind) -> Result<Array> {
        let head = self
            .session
            .curvature_head(kind)
            .ok_or_else(|| Error::Numeric("no curvature declared".into()))?;
        self.covariant(&Arc::from(head))
    }

    fn weyl(&mut self) -> Result<Array> {
        let n = self.a.dim;
        if n < 3 {
            return Err(Error::Numeric("the Weyl tensor needs dimension at least 3".into()));
        }
        let riem = self.curv(TensorKind::Riemann)?;
        let r = rat(self.session.ricci_sign as i64);
        let ric = self.curv(TensorKind::Ricci)?;
        let sc = self.curv(TensorKind::RicciScalar)?.data[0].clone();
        let g = self
            .a
            .arrays
            .get(self.session.metric_name().unwrap_or(""))
            .ok_or_else(|| Error::Numeric("no metric components assigned".into()))?
            .clone();
        // trace of the Riemann array over its second and fourth slot
        let t = |a: usize, b: usize| &r * ric.get(&[a, b]);
        let s = &r * &sc;
        let dm2 = rat(n as i64 - 2);
        let dm1 = rat(n as i64 - 1);
        let mut out = Array::zeros(n, 4);
        for idx in Array::multi_indices(n, 4) {
            let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
            let gg = |x: usize, y: usize| g.get(&[x, y]).clone();
            let p = gg(a, c) * t(b, d) - gg(a, d) * t(b, c) - gg(b, c) * t(a, d) + gg(b, d) * t(a, c);
            let q = gg(a, c) * gg(b, d) - gg(a, d) * gg(b, c);
            let v = riem.get(&idx) - &p / &dm2 + &s * &q / (&dm1 * &dm2);
            out.set(&idx, v);
        }
        Ok(out)
    }

    /// The factor's array with the variance given by `ups`.
    fn with_variance(&mut self, head: &Arc<str>, ups: &[bool]) -> Result<Array> {
        let mut x = self.covariant(head)?;
        let n = self.a.dim;
        for (slot, &up) in ups.iter().enumerate() {
            if !up {
                continue;
            }
            let gi = self.ginv()?.clone();
            let mut y = Array::zeros(n, x.rank);
            for idx in Array::multi_indices(n, x.rank) {
                let mut s = BigRational::zero();
                let mut j = idx.clone();
                for c in 0..n {
                    j[slot] = c;
                    s += gi.get(&[idx[slot], c]) * x.get(&j);
                }
                y.set(&idx, s);
            }
            x = y;
        }
        Ok(x)
    }
}

fn coeff_value(c: &Coeff, session: &Session, a: &Assignment) -> Result<BigRational> {
    let dim = a.dim as i64;
    let v = c
        .try_substitute(&|s: &str| {
            if session.dim_symbol() == Some(s) {
                Some(Coeff::int(dim))
            } else {
                a.constants.get(s).map(|r| Coeff::from(r.clone()))
            }
        })
        .ok_or_else(|| Error::Numeric("coefficient has a vanishing denominator".into()))?;
    v.as_rational()
        .ok_or_else(|| Error::Numeric(format!("coefficient `{}` has unassigned symbols", c)))
}

/// Evaluates an expression to the array of its components, indexed by its
/// free indices in sorted order (returned alongside).
pub fn evaluate(expr: &Expr, session: &Session, a: &Assignment) -> Result<(Vec<Index>, Array)> {
    let frees = expr.free_indices()?;
    let n = a.dim;
    let mut ctx = Ctx::new(session, a)?;
    let mut out = Array::zeros(n, frees.len());
    for t in &expr.terms {
        if t.factors.iter().any(|f| !f.derivs.is_empty()) {
            return Err(Error::Numeric("expressions with derivatives cannot be evaluated".into()));
        }
        let c = coeff_value(&t.coeff, session, a)?;
        let mut labels: Vec<Label> = frees.iter().map(|i| i.label.clone()).collect();
        for i in t.indices() {
            if !labels.contains(&i.label) {
                labels.push(i.label.clone());
            }
        }
        let pos: HashMap<&Label, usize> = labels.iter().enumerate().map(|(k, l)| (l, k)).collect();
        let mut arrays = Vec::new();
        for f in &t.factors {
            let ups: Vec<bool> = f.indices.iter().map(|i| i.up).collect();
            let arr = ctx.with_variance(&f.head, &ups)?;
            let slots: Vec<usize> = f.indices.iter().map(|i| pos[&i.label]).collect();
            arrays.push((arr, slots));
        }
        let nl = labels.len();
        let mut vals = vec![0usize; nl];
        let total = n.pow(nl as u32);
        for k in 0..total {
            let mut m = k;
            for slot in (0..nl).rev() {
                vals[slot] = m % n;
                m /= n;
            }
            let mut p = c.clone();
            for (arr, slots) in &arrays {
                let idx: Vec<usize> = slots.iter().map(|&s| vals[s]).collect();
                let v = arr.get(&idx);
                if v.is_zero() {
                    p = BigRational::zero();
                    break;
                }
                p *= v;
            }
            if p.is_zero() {
                continue;
            }
            let o = out.offset(&vals[..frees.len()]);
            out.data[o] += p;
        }
    }
    Ok((frees, out))
}

/// Random signed integers in `[-3, 3]` from a small deterministic generator,
/// convenient where no external RNG is wanted.
pub fn lcg(seed: u64) -> impl FnMut() -> i64 {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 33) % 7) as i64 - 3
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Dim};

    #[test]
    fn metric_trace_is_dimension() {
        let s = Session::standard(Dim::Sym(Arc::from("d")));
        let a = random_assignment(&s, 4, &mut lcg(1)).unwrap();
        let (_, v) = evaluate(&parse("g[a,-a]", &s).unwrap(), &s, &a).unwrap();
        assert_eq!(v.data, vec![rat(4)]);
    }

    #[test]
    fn contracting_the_metric_preserves_values() {
        let s = Session::standard(Dim::Sym(Arc::from("d")));
        let a = random_assignment(&s, 3, &mut lcg(7)).unwrap();
        let e = parse("g[a,c]*Riemann[-c,-b,-d,-e]*g[d,e] + g[a,c]*Ricci[-c,-b]", &s).unwrap();
        let c = crate::expr::contract_metric(&e, &s);
        assert_eq!(evaluate(&e, &s, &a).unwrap(), evaluate(&c, &s, &a).unwrap());
    }

    #[test]
    fn derived_weyl_is_traceless() {
        let s = Session::standard(Dim::Sym(Arc::from("d")));
        let a = random_assignment(&s, 4, &mut lcg(3)).unwrap();
        let (_, v) = evaluate(&parse("Weyl[a,-b,-a,-c]", &s).unwrap(), &s, &a).unwrap();
        assert!(v.is_zero());
    }
}
