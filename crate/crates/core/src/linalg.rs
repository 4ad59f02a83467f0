//! Small dense matrices and LU factorisation with partial pivoting.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex;
use num_traits::{Float, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Entry, Real};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Entry> Matrix<E> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![E::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = E::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[E]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows<R: AsRef<[E]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: r, cols: c, data })
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<E>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[E] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn map<F: Entry>(&self, f: impl Fn(E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| f(x)).collect() }
    }

    pub fn scale(&self, s: E) -> Self {
        self.map(|x| x * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[E]) -> Vec<E> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(E::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> E::Real {
        self.data.iter().fold(E::Real::zero(), |m, &x| m.max(x.modulus()))
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> E::Real {
        (0..self.rows)
            .map(|i| self.row(i).iter().fold(E::Real::zero(), |s, &x| s + x.modulus()))
            .fold(E::Real::zero(), |m, s| m.max(s))
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> E::Real {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(E::Real::zero(), |s, i| s + self[(i, j)].modulus()))
            .fold(E::Real::zero(), |m, s| m.max(s))
    }

    /// Copy of the rows `r0..r1`.
    pub fn row_block(&self, r0: usize, r1: usize) -> Self {
        Self { rows: r1 - r0, cols: self.cols, data: self.data[r0 * self.cols..r1 * self.cols].to_vec() }
    }

    /// Swaps rows/columns by the permutation `perm` (new index i holds old `perm[i]`).
    pub fn permute_symmetric(&self, perm: &[usize]) -> Self {
        assert!(self.is_square() && perm.len() == self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(perm[i], perm[j])];
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.modulus().is_finite())
    }

    pub fn max_abs_diff(&self, other: &Self) -> E::Real {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(E::Real::zero(), |m, (&a, &b)| m.max((a - b).modulus()))
    }
}

impl<T: Real> Matrix<T> {
    pub fn to_complex(&self) -> Matrix<Complex<T>> {
        self.map(|x| Complex::new(x, T::zero()))
    }
}

impl<T: Real> Matrix<Complex<T>> {
    pub fn real_part(&self) -> Matrix<T> {
        self.map(|z| z.re)
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

impl<E: Entry> Mul for &Matrix<E> {
    type Output = Matrix<E>;
    fn mul(self, rhs: Self) -> Matrix<E> {
        self.matmul(rhs)
    }
}

/// LU factorisation `P A = L U` of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu<E> {
    lu: Matrix<E>,
    perm: Vec<usize>,
    sign_flips: usize,
    condition: f64,
}

impl<E: Entry> Lu<E> {
    /// Factors `a`. Fails with [`Error::SingularMatrix`] when a pivot vanishes
    /// or the 1-norm condition estimate exceeds the reciprocal of machine
    /// epsilon.
    pub fn factor(a: &Matrix<E>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU of a {}x{} matrix", a.rows, a.cols)));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign_flips = 0;
        let anorm = a.one_norm();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].modulus()))
                .fold((k, E::Real::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax.is_zero() || !pmax.is_finite() {
                return Err(Error::SingularMatrix { condition: f64::INFINITY });
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign_flips += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f.is_zero() {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
        let mut out = Self { lu, perm, sign_flips, condition: 0.0 };
        let inv_norm = out.inverse_one_norm();
        let cond = anorm.as_f64() * inv_norm;
        out.condition = cond;
        if !cond.is_finite() || cond * E::Real::epsilon().as_f64() > 1.0 {
            return Err(Error::SingularMatrix { condition: cond });
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    /// 1-norm condition number of the factored matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, b: &[E]) -> Vec<E> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<E> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }

    pub fn determinant(&self) -> E {
        let mut d = (0..self.dim()).fold(E::one(), |acc, i| acc * self.lu[(i, i)]);
        if self.sign_flips % 2 == 1 {
            d = -d;
        }
        d
    }

    pub fn inverse(&self) -> Matrix<E> {
        let n = self.dim();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![E::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = E::zero());
            e[j] = E::one();
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    fn inverse_one_norm(&self) -> f64 {
        self.inverse().one_norm().as_f64()
    }
}

/// Determinant by LU; a singular matrix yields zero rather than an error.
pub fn determinant<E: Entry>(a: &Matrix<E>) -> E {
    assert!(a.is_square());
    let n = a.rows();
    let mut lu = a.clone();
    let mut det = E::one();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].modulus()))
            .fold((k, E::Real::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax.is_zero() {
            return E::zero();
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            det = -det;
        }
        let pivot = lu[(k, k)];
        det *= pivot;
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    det
}
