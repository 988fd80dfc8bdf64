//! Small dense linear algebra: a row-major matrix, order-independent Gram
//! accumulation and a cyclic Jacobi eigensolver for symmetric matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Off-diagonal Frobenius tolerance, relative to the Frobenius norm.
pub const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;
/// Rows per leaf block of the pairwise Gram reduction.
const GRAM_LEAF_ROWS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diag(&vec![1.0; n])
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid("row-major buffer length does not match shape"));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged rows"));
        }
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn sub_assign(&mut self, other: &Matrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= b;
        }
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    /// Largest entrywise asymmetry `max |a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max(libm::fabs(self[(i, j)] - self[(j, i)]));
            }
        }
        worst
    }

    /// Replaces the matrix by `(M + M') / 2`.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `W'W` for the row block `rows[lo..hi]`, full symmetric storage.
///
/// The reduction tree splits the row range in halves down to fixed-size
/// leaves, so the rounding pattern depends only on the number of rows.
pub fn gram(w: &Matrix) -> Matrix {
    gram_range(w, 0, w.rows())
}

pub fn gram_range(w: &Matrix, lo: usize, hi: usize) -> Matrix {
    let n = w.cols();
    let mut upper = vec![0.0; n * (n + 1) / 2];
    gram_pairwise(w, lo, hi, &mut upper);
    let mut g = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            g[(i, j)] = upper[k];
            g[(j, i)] = upper[k];
            k += 1;
        }
    }
    g
}

fn gram_pairwise(w: &Matrix, lo: usize, hi: usize, out: &mut [f64]) {
    let n = w.cols();
    if hi - lo <= GRAM_LEAF_ROWS {
        for r in lo..hi {
            let row = w.row(r);
            let mut k = 0;
            for i in 0..n {
                let ri = row[i];
                for &rj in &row[i..n] {
                    out[k] += ri * rj;
                    k += 1;
                }
            }
        }
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let mut right = vec![0.0; out.len()];
    gram_pairwise(w, lo, mid, out);
    gram_pairwise(w, mid, hi, &mut right);
    for (a, b) in out.iter_mut().zip(right) {
        *a += b;
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Matrix,
    pub sweeps: usize,
}

impl SymEigen {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// Largest absolute eigenvalue, i.e. the spectral norm.
    pub fn abs_max(&self) -> f64 {
        libm::fmax(libm::fabs(self.min()), libm::fabs(self.max()))
    }
}

/// Cyclic Jacobi eigensolver.
///
/// Only the upper triangle of `a` is read. Sweeps stop once the off-diagonal
/// Frobenius norm drops to `JACOBI_TOL` times the Frobenius norm of `a`.
pub fn sym_eigen(a: &Matrix) -> Result<SymEigen> {
    if !a.is_square() {
        return Err(Error::invalid("eigensolver needs a square matrix"));
    }
    if !a.all_finite() {
        return Err(Error::numeric("non-finite matrix entry", None));
    }
    let n = a.rows();
    let mut m = a.clone();
    for i in 0..n {
        for j in 0..i {
            m[(i, j)] = m[(j, i)];
        }
    }
    let mut v = Matrix::identity(n);
    let target = JACOBI_TOL * m.frobenius();

    let off = |m: &Matrix| {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        libm::sqrt(s)
    };

    let mut sweeps = 0;
    while off(&m) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::numeric("Jacobi eigensolver did not converge", None));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    Ok(SymEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_norm(a: &Matrix) -> Result<f64> {
    Ok(sym_eigen(a)?.abs_max())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let mut r = rng::stream(seed, 0);
        let mut a = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x = rng::gaussian(&mut r);
                a[(i, j)] = x;
                a[(j, i)] = x;
            }
        }
        a
    }

    #[test]
    fn diagonal_matrix_is_its_own_spectrum() {
        let e = sym_eigen(&Matrix::from_diag(&[3.0, -5.0])).unwrap();
        assert_eq!(e.values, vec![-5.0, 3.0]);
        assert_eq!(e.abs_max(), 5.0);
    }

    #[test]
    fn zero_matrix_has_zero_norm() {
        assert_eq!(sym_spectral_norm(&Matrix::zeros(4, 4)).unwrap(), 0.0);
    }

    #[test]
    fn reconstructs_random_symmetric_matrices() {
        for seed in 0..20 {
            let n = 1 + (seed as usize % 12);
            let a = random_symmetric(n, seed);
            let e = sym_eigen(&a).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let rec: f64 = (0..n)
                        .map(|k| e.vectors[(i, k)] * e.values[k] * e.vectors[(j, k)])
                        .sum();
                    assert!((rec - a[(i, j)]).abs() < 1e-10, "n={n} ({i},{j})");
                }
            }
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn rejects_non_finite_input() {
        let mut a = Matrix::identity(3);
        a[(1, 2)] = f64::NAN;
        assert!(matches!(sym_eigen(&a), Err(Error::NumericFailure { .. })));
    }

    #[test]
    fn pairwise_gram_matches_naive_accumulation() {
        let mut r = rng::stream(11, 0);
        let rows = 517;
        let cols = 5;
        let data = (0..rows * cols).map(|_| rng::gaussian(&mut r)).collect();
        let w = Matrix::from_row_major(rows, cols, data).unwrap();
        let g = gram(&w);
        for i in 0..cols {
            for j in 0..cols {
                let naive: f64 = (0..rows).map(|k| w[(k, i)] * w[(k, j)]).sum();
                assert!((g[(i, j)] - naive).abs() < 1e-9 * rows as f64);
            }
        }
        assert_eq!(g.asymmetry(), 0.0);
    }

    #[test]
    fn compensated_sum_recovers_cancelled_terms() {
        let mut s = CompensatedSum::default();
        for x in [1e16, 1.0, -1e16, 1.0] {
            s.add(x);
        }
        assert_eq!(s.value(), 2.0);
    }
}
