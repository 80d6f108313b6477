use itertools::Itertools;
use rayon::prelude::*;

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Index, Label, Session, Term, TensorKind};
use crate::symm::{canonicalize, permutations, SignedPerm, SymmetrySpec};

use super::{check_frees, normalize, single_term, sort_unique, strip_aux, symmetrize_frees};

/// Largest dimension expanded by default; the basic identity has `(d+1)!` terms.
pub const DDI_DIM_CAP: i64 = 4;

/// Dimensionally dependent identities built from `expr` in `dim` dimensions,
/// each returned as an expression that vanishes there.
pub fn construct_ddis(
    expr: &Expr,
    frees: &[Index],
    sym: Option<&SymmetrySpec>,
    dim: i64,
    session: &Session,
) -> Result<Vec<Expr>> {
    construct_ddis_capped(expr, frees, sym, dim, DDI_DIM_CAP, session)
}

/// As [`construct_ddis`] with an explicit bound on the dimension.
///
/// The antisymmetrized product of `dim + 1` Kronecker deltas vanishes in
/// `dim` dimensions. Its `2(dim + 1)` indices are contracted with the open
/// slots of `expr` and of an auxiliary tensor carrying the requested frees;
/// leftover open slots are paired among themselves. Every split of the chosen
/// slots into lower and upper delta indices is expanded and canonicalized at
/// the concrete dimension.
pub fn construct_ddis_capped(
    expr: &Expr,
    frees: &[Index],
    sym: Option<&SymmetrySpec>,
    dim: i64,
    cap: i64,
    session: &Session,
) -> Result<Vec<Expr>> {
    if dim < 1 {
        return Err(Error::Invalid("the dimension must be a positive integer".into()));
    }
    if dim > cap {
        return Err(Error::Unsupported(format!(
            "expanding the basic identity in {} dimensions (limit {})",
            dim, cap
        )));
    }
    check_frees(frees)?;
    if session.metric_name().is_none() {
        return Err(Error::Invalid("dimensionally dependent identities need a metric".into()));
    }
    let n = frees.len();
    let target = session.at_dim(dim);
    let mut term = single_term(expr, "construct_ddis")?;
    term.coeff = Coeff::one();

    let aux = session.fresh_tensor_name("Aux");
    let work = if n == 0 {
        target.clone()
    } else {
        let spec = sym.cloned().unwrap_or_else(|| SymmetrySpec::none(n));
        let w = target.with_tensor(&aux, n, spec, TensorKind::Aux)?;
        let slots = frees
            .iter()
            .enumerate()
            .map(|(k, f)| Index::new(&format!("·{}", k), !f.up))
            .collect();
        term.factors.push(Factor::new(&aux, slots));
        w
    };

    let mut open = Vec::new();
    for (fi, f) in term.factors.iter().enumerate() {
        for s in 0..f.nslots() {
            if matches!(f.slot(s).label, Label::Name(_)) {
                open.push((fi, s));
            }
        }
    }
    let m = 2 * (dim as usize + 1);
    if open.len() < m || !(open.len() - m).is_multiple_of(2) {
        return Err(Error::Invalid(format!(
            "{} open indices cannot fill the {} indices of the basic identity in {} dimensions",
            open.len(),
            m,
            dim
        )));
    }

    let half = dim as usize + 1;
    let perms: Vec<SignedPerm> = permutations(half)
        .into_iter()
        .map(|p| {
            let s = SignedPerm::from_images(p, 1);
            let sign = s.parity();
            SignedPerm::from_images(s.images, sign)
        })
        .collect();

    // (lower, upper, leftover pairs), with the first chosen slot always lower
    // since exchanging the two index sets of the identity changes nothing.
    let mut configs = Vec::new();
    for chosen in (0..open.len()).combinations(m) {
        let rest: Vec<usize> = (0..open.len()).filter(|k| !chosen.contains(k)).collect();
        let matchings = perfect_matchings(&rest);
        for lower_tail in chosen[1..].iter().copied().combinations(half - 1) {
            let mut lower = vec![chosen[0]];
            lower.extend(lower_tail);
            let upper: Vec<usize> = chosen.iter().copied().filter(|k| !lower.contains(k)).collect();
            for mt in &matchings {
                configs.push((lower.clone(), upper.clone(), mt.clone()));
            }
        }
    }

    let found: Vec<Option<Expr>> = configs
        .par_iter()
        .map(|(lower, upper, pairs)| {
            let base = term.next_dummy();
            let mut terms = Vec::with_capacity(perms.len());
            for p in &perms {
                let mut t = term.clone();
                let mut k = base;
                let mut link = |t: &mut Term, a: usize, b: usize| {
                    let (fa, sa) = open[a];
                    let (fb, sb) = open[b];
                    *t.factors[fa].slot_mut(sa) = Index::dummy(k, true);
                    *t.factors[fb].slot_mut(sb) = Index::dummy(k, false);
                    k += 1;
                };
                for (i, &a) in lower.iter().enumerate() {
                    link(&mut t, a, upper[p.images[i] as usize]);
                }
                for &(a, b) in pairs {
                    link(&mut t, a, b);
                }
                if p.sign < 0 {
                    t.coeff = -&t.coeff;
                }
                terms.push(t);
            }
            let e = canonicalize(&Expr::from_terms(terms), &work)?;
            if e.is_zero() {
                return Ok(None);
            }
            let e = if n == 0 {
                e
            } else {
                let stripped = e
                    .terms
                    .iter()
                    .map(|t| strip_aux(t, &aux, frees, &target))
                    .collect::<Result<Vec<Term>>>()?;
                Expr::from_terms(stripped)
            };
            let e = match sym {
                Some(s) => symmetrize_frees(&e, frees, s, &target)?,
                None => canonicalize(&e, &target)?,
            };
            Ok(normalize(e))
        })
        .collect::<Result<_>>()?;
    Ok(sort_unique(found.into_iter().flatten().collect(), &target))
}

/// All ways of splitting an even-length list into unordered pairs.
fn perfect_matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for j in 1..items.len() {
        let mut rest = items[1..].to_vec();
        let partner = rest.remove(j - 1);
        for mut m in perfect_matchings(&rest) {
            m.insert(0, (first, partner));
            out.push(m);
        }
    }
    out
}
