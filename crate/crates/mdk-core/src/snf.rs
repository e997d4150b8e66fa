//! Smith normal form and the exact linear-algebra toolkit built on it:
//! rank, kernel and image bases, and exact linear solving.

use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::ring::{RingTag, Scalar};

/// `u * a * v = d` with `u`, `v` invertible over the ring and `d` diagonal
/// with each diagonal entry dividing the next.
#[derive(Clone, Debug)]
pub struct SmithDecomposition<S: Scalar> {
    pub u: Matrix<S>,
    pub v: Matrix<S>,
    pub d: Matrix<S>,
    /// Nonzero diagonal entries of `d`, in divisibility order.
    pub divisors: Vec<S>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SnfError {
    /// Smith normal form is an integer-matrix contract; rational input is
    /// served by plain diagonalization instead.
    UnsupportedRing,
}

impl core::fmt::Display for SnfError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SnfError::UnsupportedRing => write!(f, "smith normal form requires ring Z"),
        }
    }
}

/// Smith normal form over Z. Rejects rational scalars; use [`diagonalize`]
/// for the ring-agnostic operation.
pub fn smith_normal_form<S: Scalar>(a: &Matrix<S>) -> Result<SmithDecomposition<S>, SnfError> {
    if S::RING != RingTag::Integers {
        return Err(SnfError::UnsupportedRing);
    }
    Ok(diagonalize(a))
}

/// Diagonalize by invertible row and column operations, pivoting on the
/// smallest nonzero absolute value. Over Z this is Smith normal form with
/// nonnegative divisors in a divisibility chain; over Q all divisors
/// normalize to 1.
pub fn diagonalize<S: Scalar>(a: &Matrix<S>) -> SmithDecomposition<S> {
    let (rows, cols) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(rows);
    let mut v = Matrix::identity(cols);

    let mut t = 0;
    while t < rows && t < cols {
        let Some((pi, pj)) = min_nonzero(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // Clear row and column t; each failed exact division strictly
        // shrinks |pivot|, so the loop terminates.
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d.get(i, t).is_zero() {
                    continue;
                }
                let q = quotient(d.get(i, t), d.get(t, t));
                if !q.is_zero() {
                    d.row_sub(i, t, &q);
                    u.row_sub(i, t, &q);
                }
                if !d.get(i, t).is_zero() {
                    // Remainder is smaller than the pivot; promote it.
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d.get(t, j).is_zero() {
                    continue;
                }
                let q = quotient(d.get(t, j), d.get(t, t));
                if !q.is_zero() {
                    d.col_sub(j, t, &q);
                    v.col_sub(j, t, &q);
                }
                if !d.get(t, j).is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    dirty = true;
                }
            }
            if !dirty {
                break;
            }
        }

        // Divisibility: the pivot must divide the whole remaining block.
        let mut fixed = true;
        'scan: for i in t + 1..rows {
            for j in t + 1..cols {
                if d.get(i, j).div_exact(d.get(t, t)).is_none() {
                    d.row_add(t, i);
                    u.row_add(t, i);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            t += 1;
        }
    }

    // Normalize pivots: nonnegative over Z, 1 over Q.
    for k in 0..t {
        let p = d.get(k, k).clone();
        if S::RING == RingTag::Rationals {
            let inv = S::one().div_exact(&p).expect("nonzero pivot");
            d.scale_row(k, &inv);
            u.scale_row(k, &inv);
        } else if p < S::zero() {
            let m = -S::one();
            d.scale_row(k, &m);
            u.scale_row(k, &m);
        }
    }

    let divisors = (0..t).map(|k| d.get(k, k).clone()).collect();
    debug_assert_eq!(u.mul(a).mul(&v), d, "U*A*V must equal D");
    SmithDecomposition { u, v, d, divisors }
}

fn min_nonzero<S: Scalar>(m: &Matrix<S>, from: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in from..m.rows() {
        for j in from..m.cols() {
            let e = m.get(i, j);
            if e.is_zero() {
                continue;
            }
            match &best {
                None => best = Some((i, j)),
                Some((bi, bj)) => {
                    if e.abs() < m.get(*bi, *bj).abs() {
                        best = Some((i, j));
                    }
                }
            }
        }
    }
    best
}

/// Truncated quotient used during reduction; over Q it is exact division.
fn quotient<S: Scalar>(a: &S, b: &S) -> S {
    a.div_rem_trunc(b).0
}

impl<S: Scalar> SmithDecomposition<S> {
    pub fn rank(&self) -> usize {
        self.divisors.len()
    }
}

/// Rank over the fraction field (number of nonzero Smith divisors).
pub fn rank<S: Scalar>(a: &Matrix<S>) -> usize {
    diagonalize(a).rank()
}

/// Basis of `ker(a)` as the columns of the result. Over Z the basis spans a
/// saturated direct summand (columns of a unimodular matrix).
pub fn kernel_basis<S: Scalar>(a: &Matrix<S>) -> Matrix<S> {
    let snf = diagonalize(a);
    let r = snf.rank();
    let cols: Vec<usize> = (r..a.cols()).collect();
    let all_rows: Vec<usize> = (0..a.cols()).collect();
    snf.v.submatrix(&all_rows, &cols)
}

/// Basis of `im(a)` as the columns of the result: the first `rank` columns
/// of `a * v`, which are linearly independent and span the image over the
/// ring (not just its saturation).
pub fn image_basis<S: Scalar>(a: &Matrix<S>) -> Matrix<S> {
    let snf = diagonalize(a);
    let av = a.mul(&snf.v);
    let r = snf.rank();
    let rows: Vec<usize> = (0..a.rows()).collect();
    let cols: Vec<usize> = (0..r).collect();
    av.submatrix(&rows, &cols)
}

/// Exact solutions of `a * x = b` for each column of `b`; `None` when some
/// column has no solution over the ring.
pub fn solve_matrix<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> Option<Matrix<S>> {
    assert_eq!(a.rows(), b.rows(), "solve dimension mismatch");
    let snf = diagonalize(a);
    let r = snf.rank();
    let ub = snf.u.mul(b);
    let mut y = Matrix::zero(a.cols(), b.cols());
    for c in 0..b.cols() {
        for k in 0..a.rows() {
            let rhs = ub.get(k, c);
            if k < r {
                let q = rhs.div_exact(snf.d.get(k, k))?;
                y.set(k, c, q);
            } else if !rhs.is_zero() {
                return None;
            }
        }
    }
    Some(snf.v.mul(&y))
}

/// Exact solution of `a * x = b` for a single right-hand side.
pub fn solve<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Option<Vec<S>> {
    let bm = Matrix::column(b.to_vec());
    solve_matrix(a, &bm).map(|x| x.col(0))
}

/// Does `b` lie in the column span of `a` over the ring?
pub fn in_image<S: Scalar>(a: &Matrix<S>, b: &[S]) -> bool {
    solve(a, b).is_some()
}
