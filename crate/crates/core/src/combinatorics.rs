//! Exact integer combinatorics of the subset lattice: binomials, the model
//! matrix `F` of the corner design, its inverse and the transformed regression
//! vectors `F^{-T} f(x)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut, Mul};

use crate::error::{Error, Result};
use crate::model::{BinarySetting, InteractionModel};

/// `C(n, r)` by the multiplicative recurrence; zero when `r < 0`, `n < 0` or `r > n`.
///
/// Panics on `i64` overflow, which cannot happen for `n ≤ 62`.
pub fn binomial(n: i64, r: i64) -> i64 {
    if r < 0 || n < 0 || r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: i128 = 1;
    for i in 0..r {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    i64::try_from(acc).expect("binomial coefficient overflows i64")
}

/// Dense row-major integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                got: rows.iter().map(|x| x.len()).find(|&l| l != c).unwrap_or(0),
            });
        }
        Ok(IntMatrix { rows: r, cols: c, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// Real-valued product `self · v`.
    pub fn mul_vec_f64(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(&a, b)| a as f64 * b).sum()).collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> i128 {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(swap) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return 0;
                };
                for j in 0..n {
                    a.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i * n + j] = (a[i * n + j] * pivot - a[i * n + k] * a[k * n + j]) / prev;
                }
            }
            prev = pivot;
        }
        sign * a[n * n - 1]
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut i64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(l, j)];
                }
            }
        }
        out
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// The model matrix `F` with `F[A, B] = 1` iff `B ⊆ A`; rows are the regression
/// vectors of the corner-design support, so `F` is unit lower triangular.
pub fn model_matrix(m: &InteractionModel) -> IntMatrix {
    let subsets = m.subsets();
    let p = subsets.len();
    let mut f = IntMatrix::zeros(p, p);
    for (i, a) in subsets.iter().enumerate() {
        for (j, b) in subsets.iter().enumerate().take(i + 1) {
            if b.is_subset_of(*a) {
                f[(i, j)] = 1;
            }
        }
    }
    f
}

/// `F^{-1}` with entries `(-1)^{|A|-|B|}` when `B ⊆ A` (Möbius function of the
/// subset lattice).
pub fn inverse_model_matrix(m: &InteractionModel) -> IntMatrix {
    let subsets = m.subsets();
    let p = subsets.len();
    let mut inv = IntMatrix::zeros(p, p);
    for (i, a) in subsets.iter().enumerate() {
        for (j, b) in subsets.iter().enumerate().take(i + 1) {
            if b.is_subset_of(*a) {
                inv[(i, j)] = if (a.len() - b.len()) % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    inv
}

/// `F^{-T} f(x)` in closed form:
/// entry `A` is `(-1)^{d-|A|} C(|A(x)|-|A|-1, d-|A|)` when `A ⊆ A(x)`, else 0.
/// For `|x| ≤ d` this is the unit vector at `A(x)`.
pub fn transform_vector(x: &BinarySetting, m: &InteractionModel) -> Result<Vec<i64>> {
    m.check_setting(x)?;
    let ax = x.support();
    let d = m.d() as i64;
    let mut out = vec![0i64; m.p()];
    if ax.len() <= m.d() {
        let pos = m.position(ax).expect("corner subsets are indexed");
        out[pos] = 1;
        return Ok(out);
    }
    let nx = ax.len() as i64;
    for (i, a) in m.subsets().iter().enumerate() {
        if a.is_subset_of(ax) {
            let na = a.len() as i64;
            let sign = if (d - na) % 2 == 0 { 1 } else { -1 };
            out[i] = sign * binomial(nx - na - 1, d - na);
        }
    }
    Ok(out)
}
