//! Exact Gaussian elimination over the rationals.
//!
//! The coefficient matrices in this crate are always rational (vector-field
//! derivatives of monomials at rational points). Right-hand sides may be any
//! [`Scalar`]: rationals, floats from transcendental jets, or symbolic
//! polynomials when a solve is carried out for a generic function.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{Rational, Scalar, Tolerance};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("system is rank deficient: rank {rank} < {unknowns} unknowns")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("system is inconsistent at constraint {row} (residual magnitude {residual:e})")]
    Inconsistent { row: usize, residual: f64 },
}

/// Reduced row echelon form of a rational matrix.
#[derive(Clone, Debug)]
pub struct Rref {
    pub rows: Vec<Vec<Rational>>,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn rref(mut rows: Vec<Vec<Rational>>, ncols: usize) -> Rref {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v = &*v - &(&f * pv);
                    }
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    Rref { rows, pivots }
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    rref(rows.to_vec(), ncols).rank()
}

/// Basis of `{v : A v = 0}`, one vector per free column.
pub fn null_space(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let ech = rref(rows.to_vec(), ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !ech.pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Outcome of an exact-matrix solve.
#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub values: Vec<S>,
    pub rank: usize,
    pub constraints: usize,
}

/// Solves `A x = b` where every unknown must be determined. Rows that
/// reduce to zero must carry a negligible right-hand side.
pub fn solve_unique<S: Scalar>(
    matrix: &[Vec<Rational>],
    rhs: &[S],
    tol: &Tolerance,
) -> Result<Solution<S>, SolveError> {
    let ncols = matrix.first().map_or(0, Vec::len);
    let scale = rhs.iter().map(Scalar::magnitude).fold(0.0, f64::max);
    let mut rows = matrix.to_vec();
    let mut b = rhs.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        b.swap(r, p);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v = &*v * &inv;
        }
        b[r] = b[r].clone() * S::from_rational(&inv);
        let pivot_row = rows[r].clone();
        let pivot_b = b[r].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pivot_row) {
                    if !pv.is_zero() {
                        *v = &*v - &(&f * pv);
                    }
                }
                b[i] = b[i].clone() - pivot_b.clone() * S::from_rational(&f);
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let rank = pivots.len();
    if rank < ncols {
        return Err(SolveError::RankDeficient { rank, unknowns: ncols });
    }
    for (i, bi) in b.iter().enumerate().skip(rank) {
        if !bi.is_negligible(tol, scale) {
            return Err(SolveError::Inconsistent { row: i, residual: bi.magnitude() });
        }
    }
    let mut values = vec![S::zero(); ncols];
    for (i, &p) in pivots.iter().enumerate() {
        values[p] = b[i].clone();
    }
    Ok(Solution { values, rank, constraints: matrix.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ns = null_space(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot: Rational = row.iter().zip(v).map(|(x, y)| x * y).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn overdetermined_consistent() {
        let a = m(&[&[1, 0], &[0, 2], &[1, 1]]);
        let b = vec![int(1), int(4), int(3)];
        let s = solve_unique(&a, &b, &Tolerance::default()).unwrap();
        assert_eq!(s.values, vec![int(1), int(2)]);
        assert_eq!(s.rank, 2);
    }

    #[test]
    fn inconsistent_and_deficient() {
        let a = m(&[&[1, 0], &[0, 1], &[1, 1]]);
        let b = vec![int(1), int(1), int(3)];
        assert!(matches!(solve_unique(&a, &b, &Tolerance::default()), Err(SolveError::Inconsistent { .. })));
        let a = m(&[&[1, 1], &[2, 2]]);
        let b = vec![int(1), int(2)];
        assert!(matches!(
            solve_unique(&a, &b, &Tolerance::default()),
            Err(SolveError::RankDeficient { rank: 1, unknowns: 2 })
        ));
    }

    #[test]
    fn float_rhs_tolerance() {
        let a = vec![vec![rat(1, 3)], vec![int(1)]];
        let b = vec![1.0f64 / 3.0, 1.0 + 1e-13];
        let s = solve_unique(&a, &b, &Tolerance::default()).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
    }
}
