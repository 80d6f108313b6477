use rayon::prelude::*;

use crate::algebra::collect_tensors;
use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::expr::{Expr, Factor, Index, Session, Term, TensorKind};
use crate::symm::permutations;

/// Largest `n` for which the dimension `2n` Euler density is built by default.
pub const EULER_DIM_CAP: i64 = 4;

/// The Euler density in even dimension `dim`, normalized so that in two
/// dimensions it is the scalar curvature up to the sign of the metric
/// determinant.
pub fn euler_density(dim: i64, session: &Session) -> Result<Expr> {
    euler_density_capped(dim, EULER_DIM_CAP, session)
}

/// `(-1)^q / 2^n δ^{i1..i2n}_{j1..j2n} R_{i1 i2}^{j1 j2} ... R_{i2n-1 i2n}^{j2n-1 j2n}`
/// where `q` counts negative eigenvalues of a Lorentzian metric.
pub fn euler_density_capped(dim: i64, cap: i64, session: &Session) -> Result<Expr> {
    if dim <= 0 || dim % 2 != 0 {
        return Err(Error::Invalid(format!("the Euler density needs an even positive dimension, got {}", dim)));
    }
    let n = dim / 2;
    if n > cap {
        return Err(Error::Unsupported(format!(
            "Euler density in dimension {} (the cap is {})",
            dim,
            2 * cap
        )));
    }
    let riemann = session
        .curvature_head(TensorKind::Riemann)
        .ok_or_else(|| Error::Invalid("the Euler density needs a curved metric".into()))?
        .to_string();
    let n = n as usize;
    let sign = if session.det_sign() < 0 { -1 } else { 1 };

    // the upper pair of each factor is antisymmetric, so only ordered pairs
    // are summed and the 2^n is absorbed
    let terms: Vec<Term> = permutations(2 * n)
        .into_par_iter()
        .filter(|p| (0..n).all(|k| p[2 * k] < p[2 * k + 1]))
        .map(|p| {
            let factors = (0..n)
                .map(|k| {
                    Factor::new(
                        &riemann,
                        vec![
                            Index::dummy(2 * k as u32, false),
                            Index::dummy(2 * k as u32 + 1, false),
                            Index::dummy(p[2 * k], true),
                            Index::dummy(p[2 * k + 1], true),
                        ],
                    )
                })
                .collect();
            Term::new(Coeff::int(sign * parity(&p)), factors)
        })
        .collect();
    collect_tensors(&Expr::from_terms(terms), session)
}

fn parity(p: &[u32]) -> i64 {
    let mut inv = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}
