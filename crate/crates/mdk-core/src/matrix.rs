//! Dense exact matrices. Maps act on column vectors: a morphism `f: X -> Y`
//! between based modules is stored as a `rank(Y) x rank(X)` matrix and
//! composition is the matrix product `mat(g) * mat(f)`.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::ring::Scalar;

/// Row-major dense matrix over an exact scalar ring.
/// Zero-row and zero-column matrices are legal and arise constantly as
/// differentials of degenerate complexes.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> core::fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn new(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix::new(rows, cols, vec![S::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
        }
        Matrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| S::from_i64(v)).collect())
                .collect(),
        )
    }

    /// Matrix of a column vector.
    pub fn column(v: Vec<S>) -> Self {
        let n = v.len();
        Matrix::new(n, 1, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Matrix::identity(self.rows)
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix::new(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Matrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::new(
            self.rows,
            self.cols,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut out: Matrix<S> = Matrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..self.cols {
                    if !v[j].is_zero() && !self.get(i, j).is_zero() {
                        acc = acc + self.get(i, j).clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zero(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
            for j in 0..other.cols {
                out.set(i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Vertical concatenation `[self; other]`.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix::new(self.rows + other.rows, self.cols, data)
    }

    /// Block matrix from a grid of blocks; row/column counts must be
    /// consistent along each grid line.
    pub fn block(grid: &[Vec<&Matrix<S>>]) -> Self {
        assert!(!grid.is_empty());
        let block_cols: Vec<usize> = grid[0].iter().map(|m| m.cols).collect();
        let mut rows_acc: Option<Matrix<S>> = None;
        for row in grid {
            assert_eq!(row.len(), block_cols.len());
            let mut acc: Option<Matrix<S>> = None;
            for (k, m) in row.iter().enumerate() {
                assert_eq!(m.cols, block_cols[k], "block column mismatch");
                acc = Some(match acc {
                    None => (*m).clone(),
                    Some(a) => a.hstack(m),
                });
            }
            let band = acc.unwrap();
            rows_acc = Some(match rows_acc {
                None => band,
                Some(a) => a.vstack(&band),
            });
        }
        rows_acc.unwrap()
    }

    /// Kronecker product with tuple-major indexing:
    /// `(A ⊗ B)[i*rB + k, j*cB + l] = A[i,j] * B[k,l]`.
    pub fn kronecker(&self, other: &Self) -> Self {
        let mut out = Matrix::zero(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + k, j * other.cols + l, a.clone() * b.clone());
                    }
                }
            }
        }
        out
    }

    /// Submatrix of the listed rows and columns, in the listed order.
    /// Kronecker product of coordinate vectors, left factor major.
    pub fn kron_vec(a: &[S], b: &[S]) -> Vec<S> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a {
            for y in b {
                out.push(x.clone() * y.clone());
            }
        }
        out
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Matrix::zero(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by fraction-free Gaussian elimination (Bareiss); exact in
    /// any `Scalar` ring.
    pub fn det(&self) -> S {
        assert_eq!(self.rows, self.cols, "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return S::one();
        }
        let mut a = self.clone();
        let mut sign = S::one();
        let mut prev = S::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return S::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = a.get(i, j).clone() * a.get(k, k).clone()
                        - a.get(i, k).clone() * a.get(k, j).clone();
                    let q = num.div_exact(&prev).expect("Bareiss division is exact");
                    a.set(i, j, q);
                }
                a.set(i, k, S::zero());
            }
            prev = a.get(k, k).clone();
        }
        a.get(n - 1, n - 1).clone() * sign
    }

    pub(crate) fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// `row(i) -= q * row(k)`
    pub(crate) fn row_sub(&mut self, i: usize, k: usize, q: &S) {
        for c in 0..self.cols {
            let v = self.get(i, c).clone() - q.clone() * self.get(k, c).clone();
            self.set(i, c, v);
        }
    }

    /// `col(j) -= q * col(k)`
    pub(crate) fn col_sub(&mut self, j: usize, k: usize, q: &S) {
        for r in 0..self.rows {
            let v = self.get(r, j).clone() - q.clone() * self.get(r, k).clone();
            self.set(r, j, v);
        }
    }

    pub(crate) fn scale_row(&mut self, i: usize, s: &S) {
        for c in 0..self.cols {
            let v = self.get(i, c).clone() * s.clone();
            self.set(i, c, v);
        }
    }

    /// `row(i) += row(k)`
    pub(crate) fn row_add(&mut self, i: usize, k: usize) {
        for c in 0..self.cols {
            let v = self.get(i, c).clone() + self.get(k, c).clone();
            self.set(i, c, v);
        }
    }
}
