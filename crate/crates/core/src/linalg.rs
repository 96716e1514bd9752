//! Small dense complex linear algebra: a row-major matrix type, products, and
//! direct solvers (LU with partial pivoting, Cholesky for Hermitian positive
//! definite systems).

use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{check_len, Error, Result};
use crate::scalar::Real;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    ///
    /// All columns must share one length.
    pub fn from_columns(columns: &[Vec<Complex<T>>]) -> Result<Self> {
        let rows = columns.first().map_or(0, Vec::len);
        for c in columns {
            check_len("matrix column", rows, c.len())?;
        }
        Ok(Self::from_fn(rows, columns.len(), |r, c| columns[c][r]))
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        check_len("row-major buffer", rows * cols, data.len())?;
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex<T>] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        check_len("matmul inner dimension", self.cols, rhs.rows)?;
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᴴ · rhs` without materializing the adjoint.
    pub fn adjoint_mul(&self, rhs: &Self) -> Result<Self> {
        check_len("adjoint_mul inner dimension", self.rows, rhs.rows)?;
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            let a_row = self.row(k);
            let b_row = rhs.row(k);
            for (i, a) in a_row.iter().enumerate() {
                let a = a.conj();
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        check_len("matrix-vector", self.cols, v.len())?;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
            })
            .collect())
    }

    pub fn add_assign_scaled_identity(&mut self, s: T) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            self[(i, i)].re += s;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[r * self.cols + c]
    }
}

/// Solves `A X = B` by LU decomposition with partial pivoting.
pub fn solve<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    let n = a.rows();
    check_len("square system", n, a.cols())?;
    check_len("right-hand side rows", n, b.rows())?;
    let mut lu = a.clone();
    let mut x = b.clone();
    let m = b.cols();

    let scale = lu.data.iter().map(|z| z.norm()).fold(T::zero(), T::max);
    let tiny = scale * T::epsilon() * T::from_count(n.max(1));

    for col in 0..n {
        let (pivot, pivot_mag) = (col..n)
            .map(|r| (r, lu[(r, col)].norm()))
            .fold((col, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(pivot_mag > tiny) {
            return Err(Error::Singular);
        }
        if pivot != col {
            for c in 0..n {
                lu.data.swap(col * n + c, pivot * n + c);
            }
            for c in 0..m {
                x.data.swap(col * m + c, pivot * m + c);
            }
        }
        let inv = lu[(col, col)].inv();
        for r in col + 1..n {
            let factor = lu[(r, col)] * inv;
            if factor.re == T::zero() && factor.im == T::zero() {
                continue;
            }
            for c in col..n {
                let v = lu[(col, c)];
                lu[(r, c)] -= factor * v;
            }
            for c in 0..m {
                let v = x[(col, c)];
                x[(r, c)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = lu[(col, col)].inv();
        for c in 0..m {
            let mut acc = x[(col, c)];
            for k in col + 1..n {
                acc -= lu[(col, k)] * x[(k, c)];
            }
            x[(col, c)] = acc * inv;
        }
    }
    Ok(x)
}

/// Lower-triangular Cholesky factor `L` with `A = L Lᴴ`, stored row-major.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: CMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    /// Factorizes a Hermitian positive definite matrix. Only the lower
    /// triangle of `a` is read.
    pub fn new(a: &CMatrix<T>) -> Result<Self> {
        let n = a.rows();
        check_len("square system", n, a.cols())?;
        let mut l = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let (head, tail) = l.data.split_at_mut(i * n);
                let row_i = &tail[..j];
                let row_j: &[Complex<T>] = if j == i { row_i } else { &head[j * n..j * n + j] };
                let s = a[(i, j)] - dot_conj_rhs(row_i, row_j);
                if j == i {
                    if !(s.re > T::zero()) || !s.re.is_finite() {
                        return Err(Error::Singular);
                    }
                    tail[j] = Complex::new(s.re.sqrt(), T::zero());
                } else {
                    let d = head[j * n + j].re;
                    tail[j] = s / d;
                }
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &CMatrix<T> {
        &self.l
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &CMatrix<T>) -> Result<CMatrix<T>> {
        let n = self.l.rows();
        check_len("right-hand side rows", n, b.rows())?;
        let m = b.cols();
        let mut x = b.clone();
        for c in 0..m {
            // L z = b
            for i in 0..n {
                let row = self.l.row(i);
                let mut acc = x[(i, c)];
                for (k, lik) in row.iter().enumerate().take(i) {
                    acc -= lik * x[(k, c)];
                }
                x[(i, c)] = acc / row[i].re;
            }
            // Lᴴ x = z
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for k in i + 1..n {
                    acc -= self.l[(k, i)].conj() * x[(k, c)];
                }
                x[(i, c)] = acc / self.l[(i, i)].re;
            }
        }
        Ok(x)
    }
}

/// `Σ a_k · conj(b_k)` with four independent accumulators.
#[inline]
fn dot_conj_rhs<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let z = T::zero();
    let (mut r0, mut r1, mut r2, mut r3) = (z, z, z, z);
    let (mut i0, mut i1, mut i2, mut i3) = (z, z, z, z);
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        let (x0, y0) = (a[k], b[k]);
        let (x1, y1) = (a[k + 1], b[k + 1]);
        let (x2, y2) = (a[k + 2], b[k + 2]);
        let (x3, y3) = (a[k + 3], b[k + 3]);
        r0 += x0.re * y0.re + x0.im * y0.im;
        i0 += x0.im * y0.re - x0.re * y0.im;
        r1 += x1.re * y1.re + x1.im * y1.im;
        i1 += x1.im * y1.re - x1.re * y1.im;
        r2 += x2.re * y2.re + x2.im * y2.im;
        i2 += x2.im * y2.re - x2.re * y2.im;
        r3 += x3.re * y3.re + x3.im * y3.im;
        i3 += x3.im * y3.re - x3.re * y3.im;
    }
    for k in 4 * chunks..a.len() {
        let (x, y) = (a[k], b[k]);
        r0 += x.re * y.re + x.im * y.im;
        i0 += x.im * y.re - x.re * y.im;
    }
    Complex::new((r0 + r1) + (r2 + r3), (i0 + i1) + (i2 + i3))
}
