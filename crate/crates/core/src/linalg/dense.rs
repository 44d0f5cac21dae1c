//! Small dense row-major matrices over reals, complexes and rationals.

use std::fmt::Debug;
use std::ops::{Index, IndexMut, Neg};

use num_complex::Complex64;
use num_traits::{Num,};

use crate::error::{dim_err, Error, Result};

/// Element type usable in [`Matrix`] arithmetic.
pub trait Scalar: Copy + Debug + Num + Neg<Output = Self> + Send + Sync + 'static {}
impl<T> Scalar for T where T: Copy + Debug + Num + Neg<Output = T> + Send + Sync + 'static {}

/// A scalar with a modulus, needed for pivoting.
pub trait Field: Scalar {
    fn modulus(self) -> f64;
    fn from_f64(x: f64) -> Self;
}

impl Field for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Field for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T = f64> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type DenseComplexMatrix = Matrix<Complex64>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows; panics on ragged input.
    pub fn from_rows<R: AsRef<[T]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.as_ref().len(), m, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Matrix {
            rows: n,
            cols: m,
            data,
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    /// Column vector.
    pub fn column(v: &[T]) -> Self {
        Matrix::from_vec(v.len(), 1, v.to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, k: T) -> Self {
        self.map(|x| x * k)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.shape(), other.shape());
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - other[(i, j)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] = out[(i, j)] + a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(self.cols, x.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// Copy of the `(rows, cols)` block starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Block-diagonal matrix with `n` copies of `self`.
    pub fn kron_identity(&self, n: usize) -> Self {
        let mut out = Matrix::zeros(n * self.rows, n * self.cols);
        for k in 0..n {
            out.set_block(k * self.rows, k * self.cols, self);
        }
        out
    }

    /// Rows and columns reordered: `out[(i, j)] = self[(rp[i], cp[j])]`.
    pub fn select(&self, rp: &[usize], cp: &[usize]) -> Self {
        Matrix::from_fn(rp.len(), cp.len(), |i, j| self[(rp[i], cp[j])])
    }
}

impl Matrix<f64> {
    pub fn to_complex(&self) -> DenseComplexMatrix {
        self.map(|x| Complex64::new(x, 0.0))
    }
}

impl<T: Field> Matrix<T> {
    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.modulus()))
    }

    /// Infinity norm (max absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.modulus()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> Result<Lu<T>> {
        Lu::factor(self)
    }

    pub fn solve(&self, b: &Self) -> Result<Self> {
        self.lu()?.solve_matrix(b)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.solve(&Matrix::identity(self.rows))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Field> Lu<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(dim_err("lu", "square matrix", format!("{:?}", a.shape())));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax <= scale * f64::EPSILON * 1e-3 || !pmax.is_finite() {
                return Err(Error::Singular {
                    context: format!("zero pivot in column {k} of {n}x{n} LU"),
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
            }
            let piv = lu[(k, k)];
            for i in k + 1..n {
                let l = lu[(i, k)] / piv;
                lu[(i, k)] = l;
                if l == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - l * u;
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows;
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc = acc - self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Result<Matrix<T>> {
        if b.rows != self.lu.rows {
            return Err(dim_err("rhs", self.lu.rows, b.rows));
        }
        let mut out = Matrix::zeros(b.rows, b.cols);
        for j in 0..b.cols {
            let x = self.solve_vec(&b.col(j));
            for (i, xi) in x.into_iter().enumerate() {
                out[(i, j)] = xi;
            }
        }
        Ok(out)
    }
}

/// Least-squares solution of an overdetermined real system by Householder QR.
/// Returns the minimizer and the 2-norm of the residual.
pub fn least_squares(a: &Matrix<f64>, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, n) = a.shape();
    if b.len() != m {
        return Err(dim_err("rhs", m, b.len()));
    }
    if m < n {
        return Err(dim_err("least_squares", "rows >= cols", format!("{m}x{n}")));
    }
    let mut r = a.clone();
    let mut y = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)] * r[(i, k)]).sum::<f64>().sqrt();
        if norm <= scale * 1e-13 {
            return Err(Error::Singular {
                context: format!("rank-deficient least-squares column {k}"),
            });
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        for j in k..n {
            let d: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..m {
                r[(i, j)] -= d * v[i - k];
            }
        }
        let d: f64 = (k..m).map(|i| v[i - k] * y[i]).sum::<f64>() * 2.0 / vnorm2;
        for i in k..m {
            y[i] -= d * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in i + 1..n {
            acc -= r[(i, j)] * x[j];
        }
        x[i] = acc / r[(i, i)];
    }
    let residual = y[n..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((x, residual))
}

/// Numerical rank by Gaussian elimination with complete pivoting; pivots
/// below `tol * max|a|` count as zero.
pub fn numerical_rank(a: &Matrix<f64>, tol: f64) -> usize {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let thresh = tol * a.max_abs();
    let mut rank = 0;
    for k in 0..m.min(n) {
        let mut best = (k, k, 0.0);
        for i in k..m {
            for j in k..n {
                if w[(i, j)].abs() > best.2 {
                    best = (i, j, w[(i, j)].abs());
                }
            }
        }
        if best.2 <= thresh {
            break;
        }
        rank += 1;
        let (pi, pj, _) = best;
        for j in 0..n {
            let t = w[(k, j)];
            w[(k, j)] = w[(pi, j)];
            w[(pi, j)] = t;
        }
        for i in 0..m {
            let t = w[(i, k)];
            w[(i, k)] = w[(i, pj)];
            w[(i, pj)] = t;
        }
        for i in k + 1..m {
            let l = w[(i, k)] / w[(k, k)];
            for j in k..n {
                w[(i, j)] -= l * w[(k, j)];
            }
        }
    }
    rank
}

/// Max-abs entrywise difference of two equally shaped matrices.
pub fn max_abs_diff<T: Field>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .fold(0.0, |m, (&x, &y)| m.max((x - y).modulus()))
}
