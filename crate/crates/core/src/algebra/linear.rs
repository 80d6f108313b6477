//! Gauss-Jordan elimination over the rational-function field.

use crate::coeff::Coeff;

/// Reduced row echelon form of a matrix, with the pivot column of each
/// nonzero row.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Coeff>>,
    pub pivots: Vec<usize>,
}

/// Row-reduces `m`, trying columns in increasing index order for pivots.
pub fn rref(mut m: Vec<Vec<Coeff>>, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip().expect("nonzero pivot");
        for j in 0..ncols {
            if !m[r][j].is_zero() {
                m[r][j] = &m[r][j] * &inv;
            }
        }
        for i in 0..m.len() {
            if i == r || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..ncols {
                if m[r][j].is_zero() {
                    continue;
                }
                let t = &m[r][j] * &f;
                m[i][j] = &m[i][j] - &t;
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    Rref { rows: m, pivots }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_symbolic_system() {
        // x + y = 1, x - d y = 0  =>  y = 1/(1+d), x = d/(1+d)
        let d = Coeff::var("d");
        let m = vec![
            vec![Coeff::one(), Coeff::one(), Coeff::int(-1)],
            vec![Coeff::one(), -&d, Coeff::zero()],
        ];
        let r = rref(m, 3);
        assert_eq!(r.pivots, vec![0, 1]);
        let one_plus_d = &Coeff::one() + &d;
        assert_eq!(-&r.rows[1][2], Coeff::one().div(&one_plus_d).unwrap());
        assert_eq!(-&r.rows[0][2], d.div(&one_plus_d).unwrap());
    }

    #[test]
    fn rank_deficient() {
        let m = vec![
            vec![Coeff::int(1), Coeff::int(2)],
            vec![Coeff::int(2), Coeff::int(4)],
        ];
        let r = rref(m, 2);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.rows.len(), 1);
    }
}
