//! Small dense linear algebra: packed symmetric matrices with Cholesky, a
//! general row-major matrix with partially pivoted LU, and Jacobi eigenvalues.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Dense symmetric matrix storing the lower triangle row by row.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        SymMatrix { dim, data: vec![0.0; dim * (dim + 1) / 2] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from a full square array; the upper triangle must mirror the lower one.
    pub fn from_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                if rows[i][j] != rows[j][i] {
                    return None;
                }
                m.set(i, j, rows[i][j]);
            }
        }
        Some(m)
    }

    /// `alpha · v vᵀ`.
    pub fn rank_one(alpha: f64, v: &[f64]) -> Self {
        let mut m = Self::zeros(v.len());
        m.add_rank_one(alpha, v);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[packed(i, j)] = v;
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn add_rank_one(&mut self, alpha: f64, v: &[f64]) {
        assert_eq!(v.len(), self.dim);
        for i in 0..self.dim {
            let ai = alpha * v[i];
            if ai == 0.0 {
                continue;
            }
            let row = i * (i + 1) / 2;
            for j in 0..=i {
                self.data[row + j] += ai * v[j];
            }
        }
    }

    /// `self += alpha · other`.
    pub fn axpy(&mut self, alpha: f64, other: &SymMatrix) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scaled(&self, alpha: f64) -> SymMatrix {
        SymMatrix { dim: self.dim, data: self.data.iter().map(|x| alpha * x).collect() }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Frobenius inner product `tr(self · other)`.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        self.svec().iter().zip(other.svec()).map(|(a, b)| a * b).sum()
    }

    /// Isometric vectorisation: diagonal entries as-is, off-diagonals scaled by `√2`.
    pub fn svec(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.data.len());
        for i in 0..self.dim {
            for j in 0..=i {
                let v = self.get(i, j);
                out.push(if i == j { v } else { v * core::f64::consts::SQRT_2 });
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|i| (0..self.dim).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    /// `Q · self · Qᵀ` for a square `Q`.
    pub fn congruence(&self, q: &Matrix) -> SymMatrix {
        assert_eq!(q.cols(), self.dim);
        let qs = q.mul(&self.to_dense());
        let n = q.rows();
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = (0..self.dim).map(|l| qs[(i, l)] * q[(j, l)]).sum();
                out.set(i, j, v);
            }
        }
        out
    }

    /// Cholesky factorisation; `None` unless the matrix is numerically positive definite.
    pub fn cholesky(&self) -> Option<Cholesky> {
        let n = self.dim;
        let mut l = vec![0.0; self.data.len()];
        for i in 0..n {
            for j in 0..=i {
                let mut s = self.get(i, j);
                for t in 0..j {
                    s -= l[packed(i, t)] * l[packed(j, t)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return None;
                    }
                    l[packed(i, i)] = libm::sqrt(s);
                } else {
                    l[packed(i, j)] = s / l[packed(j, j)];
                }
            }
        }
        Some(Cholesky { dim: n, l })
    }

    /// Eigenvalues in ascending order (cyclic Jacobi).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut a = self.to_dense();
        let n = self.dim;
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            let scale: f64 = (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum::<f64>() + off;
            if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / libm::sqrt(t * t + 1.0);
                    let s = t * c;
                    for r in 0..n {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = c * arp - s * arq;
                        a[(r, q)] = s * arp + c * arq;
                    }
                    for r in 0..n {
                        let apr = a[(p, r)];
                        let aqr = a[(q, r)];
                        a[(p, r)] = c * apr - s * aqr;
                        a[(q, r)] = s * apr + c * aqr;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in self.to_rows() {
            writeln!(f, "{r:?}")?;
        }
        Ok(())
    }
}

/// Lower Cholesky factor `L` with `M = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    dim: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| libm::log(self.l[packed(i, i)])).sum::<f64>()
    }

    /// Solves `L y = b` in place.
    fn forward(&self, b: &mut [f64]) {
        for i in 0..self.dim {
            let mut s = b[i];
            for t in 0..i {
                s -= self.l[packed(i, t)] * b[t];
            }
            b[i] = s / self.l[packed(i, i)];
        }
    }

    /// Solves `Lᵀ y = b` in place.
    fn backward(&self, b: &mut [f64]) {
        for i in (0..self.dim).rev() {
            let mut s = b[i];
            for t in i + 1..self.dim {
                s -= self.l[packed(t, i)] * b[t];
            }
            b[i] = s / self.l[packed(i, i)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    /// `vᵀ M^{-1} v = |L^{-1} v|²`.
    pub fn inverse_quadratic_form(&self, v: &[f64]) -> f64 {
        let mut y = v.to_vec();
        self.forward(&mut y);
        y.iter().map(|t| t * t).sum()
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim;
        let mut out = SymMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = 0.0);
            e[j] = 1.0;
            let col = self.solve(&e);
            for i in j..n {
                out.set(i, j, col[i]);
            }
        }
        out
    }
}

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == c), "ragged rows");
        Matrix { rows: rows.len(), cols: c, data: rows.concat() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs[(l, j)];
                }
            }
        }
        out
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

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// LU with partial pivoting; `None` if a pivot falls below `rel_tol · max|a_ij|`.
    pub fn lu(&self, rel_tol: f64) -> Option<Lu> {
        assert_eq!(self.rows, self.cols, "LU of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if n > 0 && scale == 0.0 {
            return None;
        }
        let mut sign = 1.0;
        for k in 0..n {
            let (piv, val) =
                (k..n).map(|i| (i, a[i * n + k].abs())).fold((k, -1.0), |best, c| if c.1 > best.1 { c } else { best });
            if val <= rel_tol * scale {
                return None;
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        Some(Lu { n, a, perm, sign })
    }

    /// Numerical rank by Gaussian elimination with full pivoting.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let (r, c) = (self.rows, self.cols);
        let mut a = self.data.clone();
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if scale == 0.0 {
            return 0;
        }
        let mut rank = 0;
        let mut used_cols = vec![false; c];
        let mut used_rows = vec![false; r];
        loop {
            let mut best = (0, 0, 0.0f64);
            for i in (0..r).filter(|&i| !used_rows[i]) {
                for j in (0..c).filter(|&j| !used_cols[j]) {
                    if a[i * c + j].abs() > best.2 {
                        best = (i, j, a[i * c + j].abs());
                    }
                }
            }
            if best.2 <= rel_tol * scale {
                return rank;
            }
            let (pi, pj, _) = best;
            used_rows[pi] = true;
            used_cols[pj] = true;
            rank += 1;
            for i in (0..r).filter(|&i| !used_rows[i]) {
                let f = a[i * c + pj] / a[pi * c + pj];
                for j in 0..c {
                    a[i * c + j] -= f * a[pi * c + j];
                }
            }
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// `P A = L U` with unit lower `L` stored below the diagonal.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    a: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.a[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.a[i * n + j] * x[j];
            }
            x[i] /= self.a[i * n + i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // Aᵀ = Uᵀ Lᵀ P, so solve Uᵀ z = b, Lᵀ y = z, x = Pᵀ y
        let mut z = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                z[i] -= self.a[j * n + i] * z[j];
            }
            z[i] /= self.a[i * n + i];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                z[i] -= self.a[j * n + i] * z[j];
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    pub fn determinant(&self) -> f64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).product::<f64>() * self.sign
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spd() -> SymMatrix {
        SymMatrix::from_rows(&[vec![4.0, 2.0, 0.6], vec![2.0, 5.0, 1.0], vec![0.6, 1.0, 3.0]]).unwrap()
    }

    #[test]
    fn cholesky_solve_and_inverse() {
        let m = spd();
        let ch = m.cholesky().unwrap();
        let b = [1.0, -2.0, 0.5];
        let x = ch.solve(&b);
        let back = m.mul_vec(&x);
        for (u, v) in back.iter().zip(b) {
            assert!((u - v).abs() < 1e-12);
        }
        let inv = ch.inverse();
        let prod = m.to_dense().mul(&inv.to_dense());
        for i in 0..3 {
            for j in 0..3 {
                assert!((prod[(i, j)] - (i == j) as u8 as f64).abs() < 1e-12);
            }
        }
        let lu = m.to_dense().lu(1e-14).unwrap();
        assert!((libm::log(lu.determinant()) - ch.log_det()).abs() < 1e-12);
        assert!((ch.inverse_quadratic_form(&b) - b.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_semidefinite() {
        let m = SymMatrix::rank_one(1.0, &[1.0, 1.0]);
        assert!(m.cholesky().is_none());
    }

    #[test]
    fn lu_transpose_solve() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        let lu = a.lu(1e-14).unwrap();
        let b = [1.0, 2.0, 3.0];
        let x = lu.solve_transpose(&b);
        let at = a.transpose();
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| at[(i, j)] * x[j]).sum();
            assert!((s - b[i]).abs() < 1e-12);
        }
        assert!((lu.determinant() - a.transpose().lu(1e-14).unwrap().determinant()).abs() < 1e-12);
    }

    #[test]
    fn eigen_and_rank() {
        let ev = spd().eigenvalues();
        let tr: f64 = ev.iter().sum();
        assert!((tr - 12.0).abs() < 1e-10);
        let r1 = SymMatrix::rank_one(2.0, &[1.0, 0.5, 1.0]);
        assert_eq!(r1.to_dense().rank(1e-12), 1);
        let ev = r1.eigenvalues();
        assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12);
        assert!((ev[2] - 4.5).abs() < 1e-12);
    }
}
