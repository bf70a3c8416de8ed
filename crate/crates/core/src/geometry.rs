//! The information matrix polytope `P(β) = conv{λ(x) f(x) f(x)ᵀ}`, its LMI
//! relaxation (affine hull ∩ PSD cone) and the analytic center of that
//! spectrahedron.
//!
//! Coordinates use the chart `S(u) = V_0 + Σ_i u_i (V_{x_i} - V_0)` based at the
//! vertex of the all-zero setting, with directions taken from the remaining
//! vertices in increasing bitmask order (dependent ones skipped).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fisher::SettingTable;
use crate::linalg::{Matrix, SymMatrix};
use crate::model::{BinarySetting, InteractionModel};
use crate::params::ParameterVector;

/// Relative tolerance for linear independence of chart directions.
const INDEPENDENCE_TOL: f64 = 1e-10;
/// Barycentric / residual tolerance for membership.
pub const MEMBERSHIP_TOL: f64 = 1e-8;
/// Largest gradient norm reported as `Converged`.
const CONVERGED_GRADIENT: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct PolytopeModel {
    /// `(x, λ(x) f(x) f(x)ᵀ)` for all settings.
    pub vertices: Vec<(BinarySetting, SymMatrix)>,
    pub base_index: usize,
    /// `V_x - V_base` for the chosen chart vertices.
    pub directions: Vec<SymMatrix>,
    /// Vertex index behind each direction.
    pub direction_vertices: Vec<usize>,
    /// Chart coordinates of every vertex.
    pub vertex_coordinates: Vec<Vec<f64>>,
    /// Affine dimension of the polytope.
    pub dim: usize,
}

impl PolytopeModel {
    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == self.dim + 1
    }

    pub fn base(&self) -> &SymMatrix {
        &self.vertices[self.base_index].1
    }

    /// `S(u)`.
    pub fn point(&self, u: &[f64]) -> SymMatrix {
        affine_point(self.base(), &self.directions, u)
    }

    /// Average of the vertex coordinates.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertex_coordinates {
            for (ci, vi) in c.iter_mut().zip(v) {
                *ci += vi;
            }
        }
        let n = self.vertices.len() as f64;
        c.iter_mut().for_each(|x| *x /= n);
        c
    }

    /// Chart coordinates of a matrix in the affine hull.
    pub fn coordinates_of(&self, point: &SymMatrix) -> Result<Vec<f64>> {
        if point.dim() != self.base().dim() {
            return Err(Error::DimensionMismatch { expected: self.base().dim(), got: point.dim() });
        }
        let rhs = point.sub(self.base());
        let u = project(&self.directions, &rhs);
        let resid = self.point(&u).sub(point);
        let scale = point.max_abs().max(1.0);
        let residual = resid.max_abs() / scale;
        if residual > MEMBERSHIP_TOL {
            return Err(Error::NotInAffineHull { residual });
        }
        Ok(u)
    }
}

fn affine_point(base: &SymMatrix, directions: &[SymMatrix], u: &[f64]) -> SymMatrix {
    assert_eq!(u.len(), directions.len(), "coordinate count differs from chart dimension");
    let mut s = base.clone();
    for (ui, d) in u.iter().zip(directions) {
        if *ui != 0.0 {
            s.axpy(*ui, d);
        }
    }
    s
}

/// Least-squares coordinates of `target` in the span of `directions`.
fn project(directions: &[SymMatrix], target: &SymMatrix) -> Vec<f64> {
    let n = directions.len();
    if n == 0 {
        return Vec::new();
    }
    let mut gram = SymMatrix::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            gram.set(i, j, directions[i].frobenius_dot(&directions[j]));
        }
    }
    let rhs: Vec<f64> = directions.iter().map(|d| d.frobenius_dot(target)).collect();
    gram.cholesky().expect("chart directions are independent").solve(&rhs)
}

pub fn polytope_vertices(theta: &ParameterVector, m: &InteractionModel) -> Result<PolytopeModel> {
    let table = SettingTable::new(theta, m)?;
    let vertices: Vec<(BinarySetting, SymMatrix)> = table
        .settings
        .iter()
        .zip(table.regressors.iter().zip(&table.intensities))
        .map(|(x, (f, lam))| (*x, SymMatrix::rank_one(*lam, f)))
        .collect();
    let base_index = 0;
    let base = vertices[base_index].1.clone();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut directions = Vec::new();
    let mut direction_vertices = Vec::new();
    for (i, (_, v)) in vertices.iter().enumerate().skip(1) {
        let diff = v.sub(&base);
        let sv = diff.svec();
        let norm0 = libm::sqrt(sv.iter().map(|a| a * a).sum::<f64>());
        let mut r = sv;
        for _ in 0..2 {
            for q in &basis {
                let c: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
                r.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let norm = libm::sqrt(r.iter().map(|a| a * a).sum::<f64>());
        if norm > INDEPENDENCE_TOL * norm0.max(f64::MIN_POSITIVE) {
            r.iter_mut().for_each(|a| *a /= norm);
            basis.push(r);
            directions.push(diff);
            direction_vertices.push(i);
        }
    }
    let vertex_coordinates = vertices.iter().map(|(_, v)| project(&directions, &v.sub(&base))).collect();
    let dim = directions.len();
    Ok(PolytopeModel { vertices, base_index, directions, direction_vertices, vertex_coordinates, dim })
}

/// `{u : S(u) ⪰ 0}` with `S(u) = base + Σ u_i directions_i`.
#[derive(Clone, Debug)]
pub struct LmiSlice {
    pub base: SymMatrix,
    pub directions: Vec<SymMatrix>,
    /// Setting whose vertex sits at `e_i`.
    pub labels: Vec<BinarySetting>,
}

impl LmiSlice {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn matrix_at(&self, u: &[f64]) -> SymMatrix {
        affine_point(&self.base, &self.directions, u)
    }

    pub fn is_strictly_feasible(&self, u: &[f64]) -> bool {
        u.len() == self.dim() && self.matrix_at(u).cholesky().is_some()
    }
}

pub fn lmi_slice(pm: &PolytopeModel) -> LmiSlice {
    LmiSlice {
        base: pm.base().clone(),
        directions: pm.directions.clone(),
        labels: pm.direction_vertices.iter().map(|&i| pm.vertices[i].0).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CenterStatus {
    Converged,
    /// `log det` kept growing past the configured ceiling.
    Unbounded,
    MaxIterations,
}

impl CenterStatus {
    pub fn name(self) -> &'static str {
        match self {
            CenterStatus::Converged => "converged",
            CenterStatus::Unbounded => "unbounded",
            CenterStatus::MaxIterations => "max-iterations",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterConfig {
    pub max_iterations: usize,
    /// Stop once `|∇ log det S(u)| ≤ gradient_tolerance`.
    pub gradient_tolerance: f64,
    /// Stop once the squared Newton decrement falls below this (and the
    /// gradient is small).
    pub decrement_tolerance: f64,
    /// Declare `Unbounded` once `log det` exceeds its start value by this much.
    pub log_det_ceiling: f64,
    /// Declare `Unbounded` once a coordinate exceeds this magnitude.
    pub coordinate_limit: f64,
}

impl Default for CenterConfig {
    fn default() -> Self {
        CenterConfig {
            max_iterations: 500,
            gradient_tolerance: 1e-10,
            decrement_tolerance: 1e-20,
            log_det_ceiling: 50.0,
            coordinate_limit: 1e8,
        }
    }
}

/// Result of a membership test.
#[derive(Clone, Debug, PartialEq)]
pub struct Membership {
    pub inside: bool,
    /// Convex weights on the vertices reproducing the point, when inside.
    pub weights: Option<Vec<(BinarySetting, f64)>>,
    /// Residual of the best convex combination (0 for the simplex shortcut).
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterResult {
    pub coordinates: Vec<f64>,
    pub matrix: SymMatrix,
    pub log_det: f64,
    pub status: CenterStatus,
    pub iterations: usize,
    pub gradient_norm: f64,
    /// Filled by [`locate_center`] and [`center_path`].
    pub membership: Option<Membership>,
}

impl CenterResult {
    pub fn inside_polytope(&self) -> bool {
        self.membership.as_ref().is_some_and(|m| m.inside)
    }
}

/// `log det S(u)`, its gradient `tr(S^{-1} D_i)` and Hessian `-tr(S^{-1} D_i S^{-1} D_j)`.
pub fn log_det_derivatives(slice: &LmiSlice, u: &[f64]) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    if u.len() != slice.dim() {
        return Err(Error::DimensionMismatch { expected: slice.dim(), got: u.len() });
    }
    let chol = slice.matrix_at(u).cholesky().ok_or(Error::InfeasibleStart)?;
    let inv = chol.inverse().to_dense();
    let prods: Vec<Matrix> = slice.directions.iter().map(|d| inv.mul(&d.to_dense())).collect();
    let grad: Vec<f64> = prods.iter().map(Matrix::trace).collect();
    let n = prods.len();
    let mut hess = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let (a, b) = (&prods[i], &prods[j]);
            let dim = a.rows();
            let mut tr = 0.0;
            for r in 0..dim {
                for c in 0..dim {
                    tr += a[(r, c)] * b[(c, r)];
                }
            }
            hess[i][j] = -tr;
            hess[j][i] = -tr;
        }
    }
    Ok((chol.log_det(), grad, hess))
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Damped Newton maximisation of `log det S(u)` from a strictly feasible start.
pub fn analytic_center(slice: &LmiSlice, start: &[f64], cfg: &CenterConfig) -> Result<CenterResult> {
    if start.len() != slice.dim() {
        return Err(Error::DimensionMismatch { expected: slice.dim(), got: start.len() });
    }
    if !slice.is_strictly_feasible(start) {
        return Err(Error::InfeasibleStart);
    }
    let mut u = start.to_vec();
    let (mut ld, mut grad, mut hess) = log_det_derivatives(slice, &u)?;
    let ld_start = ld;
    let mut status = CenterStatus::MaxIterations;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        if norm(&grad) <= cfg.gradient_tolerance {
            status = CenterStatus::Converged;
            break;
        }
        iterations += 1;
        let n = u.len();
        let mut neg_h = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                neg_h.set(i, j, -hess[i][j]);
            }
        }
        let step = match neg_h.cholesky() {
            Some(ch) => ch.solve(&grad),
            None => grad.clone(),
        };
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        // squared Newton decrement: the remaining gain in log det is about slope / 2,
        // and gains below the resolution of `ld` itself cannot be realised
        let floor = cfg.decrement_tolerance.max(4.0 * f64::EPSILON * ld.abs());
        if slope <= floor && norm(&grad) <= CONVERGED_GRADIENT {
            status = CenterStatus::Converged;
            break;
        }
        // log det is self-concordant: with decrement below 1/4 the full step
        // stays feasible and converges quadratically, so no increase test is
        // needed (near the optimum the gain is below the resolution of `ld`)
        let quadratic = slope < 0.0625;
        let mut t = 1.0;
        let mut accepted = None;
        while t > 1e-18 {
            let cand: Vec<f64> = u.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            if let Some(ch) = slice.matrix_at(&cand).cholesky() {
                let cand_ld = ch.log_det();
                if (quadratic && t == 1.0) || cand_ld >= ld + 0.25 * t * slope {
                    accepted = Some(cand);
                    break;
                }
            }
            t /= 2.0;
        }
        let Some(next) = accepted else {
            // no ascent possible in floating point: treat a tiny gradient as converged
            if norm(&grad) <= CONVERGED_GRADIENT {
                status = CenterStatus::Converged;
            }
            break;
        };
        u = next;
        (ld, grad, hess) = log_det_derivatives(slice, &u)?;
        if ld > ld_start + cfg.log_det_ceiling || u.iter().any(|x| x.abs() > cfg.coordinate_limit) {
            status = CenterStatus::Unbounded;
            break;
        }
    }
    if status == CenterStatus::MaxIterations && norm(&grad) <= cfg.gradient_tolerance {
        status = CenterStatus::Converged;
    }
    Ok(CenterResult {
        matrix: slice.matrix_at(&u),
        coordinates: u,
        log_det: ld,
        status,
        iterations,
        gradient_norm: norm(&grad),
        membership: None,
    })
}

/// Analytic center of the polytope's LMI relaxation (started at the vertex
/// centroid unless `start` is given) plus its membership in `P(β)`.
pub fn locate_center(pm: &PolytopeModel, start: Option<&[f64]>, cfg: &CenterConfig) -> Result<CenterResult> {
    let slice = lmi_slice(pm);
    let centroid = pm.centroid();
    let mut res = analytic_center(&slice, start.unwrap_or(&centroid), cfg)?;
    if res.status == CenterStatus::Converged {
        res.membership = Some(polytope_membership(pm, &res.coordinates)?);
    } else {
        res.membership = Some(Membership { inside: false, weights: None, residual: f64::INFINITY });
    }
    Ok(res)
}

/// Whether the chart point `u` is a convex combination of the vertices.
pub fn polytope_membership(pm: &PolytopeModel, u: &[f64]) -> Result<Membership> {
    if u.len() != pm.dim {
        return Err(Error::DimensionMismatch { expected: pm.dim, got: u.len() });
    }
    if pm.is_simplex() {
        let mut w = vec![0.0; pm.vertices.len()];
        w[pm.base_index] = 1.0 - u.iter().sum::<f64>();
        for (ui, &vi) in u.iter().zip(&pm.direction_vertices) {
            w[vi] = *ui;
        }
        let inside = w.iter().all(|x| *x >= -MEMBERSHIP_TOL);
        let weights = inside.then(|| pm.vertices.iter().zip(&w).map(|((x, _), wi)| (*x, wi.max(0.0))).collect());
        return Ok(Membership { inside, weights, residual: 0.0 });
    }
    // rows: Σ_x w_x c_x = u and Σ_x w_x + slack = 1, all variables ≥ 0;
    // the base vertex sits at the origin so it is represented by the slack
    let others: Vec<usize> = (0..pm.vertices.len()).filter(|&i| i != pm.base_index).collect();
    let rows = pm.dim + 1;
    let cols = others.len() + 1;
    let mut a = Matrix::zeros(rows, cols);
    for (j, &vi) in others.iter().enumerate() {
        for r in 0..pm.dim {
            a[(r, j)] = pm.vertex_coordinates[vi][r];
        }
        a[(pm.dim, j)] = 1.0;
    }
    a[(pm.dim, cols - 1)] = 1.0;
    let mut b = u.to_vec();
    b.push(1.0);
    let sol = nnls(&a, &b);
    let fitted: Vec<f64> = (0..rows).map(|r| (0..cols).map(|c| a[(r, c)] * sol[c]).sum()).collect();
    let residual = norm(&fitted.iter().zip(&b).map(|(f, t)| f - t).collect::<Vec<_>>()) / norm(&b).max(1.0);
    let inside = residual <= MEMBERSHIP_TOL;
    let weights = inside.then(|| {
        let mut w = vec![0.0; pm.vertices.len()];
        w[pm.base_index] = sol[cols - 1];
        for (j, &vi) in others.iter().enumerate() {
            w[vi] = sol[j];
        }
        pm.vertices.iter().zip(w).map(|((x, _), wi)| (*x, wi)).collect()
    });
    Ok(Membership { inside, weights, residual })
}

/// Membership of a matrix given directly (must lie in the affine hull).
pub fn matrix_membership(pm: &PolytopeModel, point: &SymMatrix) -> Result<Membership> {
    let u = pm.coordinates_of(point)?;
    polytope_membership(pm, &u)
}

/// Lawson–Hanson non-negative least squares `min |A x - b|, x ≥ 0`.
fn nnls(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let (m, n) = (a.rows(), a.cols());
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let tol = 1e-12 * (1..=n).fold(1.0f64, |acc, _| acc) * a_scale(a);
    let gradient = |x: &[f64]| -> Vec<f64> {
        let r: Vec<f64> = (0..m).map(|i| b[i] - (0..n).map(|j| a[(i, j)] * x[j]).sum::<f64>()).collect();
        (0..n).map(|j| (0..m).map(|i| a[(i, j)] * r[i]).sum()).collect()
    };
    for _outer in 0..3 * n + 10 {
        let w = gradient(&x);
        let Some((j, wj)) =
            (0..n).filter(|&j| !passive[j]).map(|j| (j, w[j])).fold(None, |best: Option<(usize, f64)>, c| match best {
                Some(bb) if bb.1 >= c.1 => Some(bb),
                _ => Some(c),
            })
        else {
            break;
        };
        if wj <= tol {
            break;
        }
        passive[j] = true;
        loop {
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let z = restricted_lstsq(a, b, &idx);
            if idx.iter().zip(&z).all(|(_, zi)| *zi > 0.0) {
                x.iter_mut().for_each(|v| *v = 0.0);
                for (&j, zj) in idx.iter().zip(&z) {
                    x[j] = *zj;
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (&j, zj) in idx.iter().zip(&z) {
                if *zj <= 0.0 {
                    alpha = alpha.min(x[j] / (x[j] - zj));
                }
            }
            for (&j, zj) in idx.iter().zip(&z) {
                x[j] += alpha * (zj - x[j]);
            }
            for &j in &idx {
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
    }
    x
}

fn a_scale(a: &Matrix) -> f64 {
    let mut s = 0.0f64;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            s = s.max(a[(i, j)].abs());
        }
    }
    s.max(1.0)
}

/// Least squares on the columns `idx` via regularised normal equations.
fn restricted_lstsq(a: &Matrix, b: &[f64], idx: &[usize]) -> Vec<f64> {
    let k = idx.len();
    let mut g = SymMatrix::zeros(k);
    let mut rhs = vec![0.0; k];
    for (p, &jp) in idx.iter().enumerate() {
        for (q, &jq) in idx.iter().enumerate().take(p + 1) {
            let v: f64 = (0..a.rows()).map(|i| a[(i, jp)] * a[(i, jq)]).sum();
            g.set(p, q, v);
        }
        rhs[p] = (0..a.rows()).map(|i| a[(i, jp)] * b[i]).sum();
    }
    if let Some(ch) = g.cholesky() {
        return ch.solve(&rhs);
    }
    let ridge = 1e-12 * g.trace().max(1.0);
    for p in 0..k {
        g.set(p, p, g.get(p, p) + ridge);
    }
    g.cholesky().map(|ch| ch.solve(&rhs)).unwrap_or_else(|| vec![0.0; k])
}

/// One row of a center path.
#[derive(Clone, Debug, PartialEq)]
pub struct CenterPathRow {
    pub param: f64,
    pub center: CenterResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenterPath {
    pub rows: Vec<CenterPathRow>,
    /// First row whose center is not inside `P(β)`.
    pub first_exit: Option<usize>,
}

/// Analytic centers along a one-parameter family of polytopes. With
/// `warm_start`, each row starts Newton from the previous converged center
/// when that point is strictly feasible for the new slice.
pub fn center_path<F>(grid: &[f64], mut family: F, cfg: &CenterConfig, warm_start: bool) -> Result<CenterPath>
where
    F: FnMut(f64) -> Result<PolytopeModel>,
{
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut rows: Vec<CenterPathRow> = Vec::with_capacity(grid.len());
    for &param in grid {
        let pm = family(param)?;
        let warm = rows
            .last()
            .filter(|r| warm_start && r.center.status == CenterStatus::Converged)
            .map(|r| r.center.coordinates.clone())
            .filter(|u| lmi_slice(&pm).is_strictly_feasible(u));
        let center = locate_center(&pm, warm.as_deref(), cfg)?;
        rows.push(CenterPathRow { param, center });
    }
    let first_exit = rows.iter().position(|r| !r.center.inside_polytope());
    Ok(CenterPath { rows, first_exit })
}

/// Polytope family with every singleton intensity equal to `λ` (higher-order
/// parameters zero, `β_∅ = 0`).
pub fn symmetric_lambda_polytope(m: &InteractionModel, lambda: f64) -> Result<PolytopeModel> {
    polytope_vertices(&ParameterVector::symmetric(m, &[lambda])?, m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m21() -> InteractionModel {
        InteractionModel::new(2, 1).unwrap()
    }

    /// The 3×3 matrix of the LMI for k = 2, d = 1, written out entrywise.
    fn printed_lmi(l1: f64, l2: f64, x: f64, y: f64, z: f64) -> [[f64; 3]; 3] {
        let p = l1 * l2;
        [
            [1.0 + x * (l1 - 1.0) + y * (l2 - 1.0) + z * (p - 1.0), l1 * x + p * z, l2 * y + p * z],
            [l1 * x + p * z, l1 * x + p * z, p * z],
            [l2 * y + p * z, p * z, l2 * y + p * z],
        ]
    }

    #[test]
    fn simplex_for_two_rules() {
        let theta = ParameterVector::new(&m21(), vec![0.0, 0.3f64.ln(), 0.6f64.ln()]).unwrap();
        let pm = polytope_vertices(&theta, &m21()).unwrap();
        assert_eq!(pm.dim, 3);
        assert!(pm.is_simplex());
        for (_, v) in &pm.vertices {
            assert_eq!(v.to_dense().rank(1e-12), 1);
        }
        let slice = lmi_slice(&pm);
        assert_eq!(slice.matrix_at(&[0.0, 0.0, 0.0]), pm.vertices[0].1);
        for (i, &vi) in pm.direction_vertices.iter().enumerate() {
            let mut e = vec![0.0; 3];
            e[i] = 1.0;
            let s = slice.matrix_at(&e);
            assert!(s.sub(&pm.vertices[vi].1).max_abs() < 1e-15);
        }
        let (x, y, z) = (0.2, -0.1, 0.7);
        let printed = printed_lmi(0.3, 0.6, x, y, z);
        let s = slice.matrix_at(&[x, y, z]);
        for i in 0..3 {
            for j in 0..3 {
                assert!((s.get(i, j) - printed[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn higher_dimensional_polytope_is_not_a_simplex() {
        let m = InteractionModel::new(4, 1).unwrap();
        let pm = polytope_vertices(&ParameterVector::symmetric(&m, &[0.7]).unwrap(), &m).unwrap();
        let diffs: Vec<Vec<f64>> = pm.vertices[1..].iter().map(|(_, v)| v.sub(pm.base()).svec()).collect();
        assert_eq!(pm.dim, Matrix::from_rows(&diffs).rank(1e-10));
        assert!(pm.dim < 15);
        assert!(!pm.is_simplex());
        for (i, c) in pm.vertex_coordinates.iter().enumerate() {
            let mem = polytope_membership(&pm, c).unwrap();
            assert!(mem.inside, "vertex {i}");
        }
        let centroid = polytope_membership(&pm, &pm.centroid()).unwrap();
        assert!(centroid.inside);
        let w = centroid.weights.unwrap();
        assert!((w.iter().map(|(_, w)| w).sum::<f64>() - 1.0).abs() < 1e-9);
        let far: Vec<f64> = pm.centroid().iter().map(|c| c * 50.0).collect();
        assert!(!polytope_membership(&pm, &far).unwrap().inside);
    }

    #[test]
    fn centers_at_unit_lambda() {
        let pm = symmetric_lambda_polytope(&m21(), 1.0).unwrap();
        let c = locate_center(&pm, None, &CenterConfig::default()).unwrap();
        assert_eq!(c.status, CenterStatus::Converged);
        for u in &c.coordinates {
            assert!((u - 0.25).abs() < 1e-9);
        }
        assert!(c.inside_polytope());
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let pm = symmetric_lambda_polytope(&m21(), 0.5).unwrap();
        let slice = lmi_slice(&pm);
        assert_eq!(
            analytic_center(&slice, &[0.0, 0.0, 0.0], &CenterConfig::default()).unwrap_err(),
            Error::InfeasibleStart
        );
    }

    #[test]
    fn small_lambda_is_unbounded() {
        let pm = symmetric_lambda_polytope(&m21(), 0.1).unwrap();
        let c = locate_center(&pm, None, &CenterConfig::default()).unwrap();
        assert_eq!(c.status, CenterStatus::Unbounded);
        assert!(!c.inside_polytope());
    }

    #[test]
    fn simplex_membership() {
        let pm = symmetric_lambda_polytope(&m21(), 0.5).unwrap();
        let mem = polytope_membership(&pm, &[0.3, 0.3, 0.094]).unwrap();
        assert!(mem.inside);
        let w: Vec<f64> = mem.weights.unwrap().iter().map(|(_, w)| *w).collect();
        let expect = [0.306, 0.3, 0.3, 0.094];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(!polytope_membership(&pm, &[0.343, 0.343, -0.023]).unwrap().inside);
        assert!(polytope_membership(&pm, &[0.3, 0.3]).is_err());
    }

    #[test]
    fn matrix_membership_checks_affine_hull() {
        let pm = symmetric_lambda_polytope(&m21(), 0.5).unwrap();
        let inside = pm.point(&[0.2, 0.2, 0.2]);
        assert!(matrix_membership(&pm, &inside).unwrap().inside);
        let off = SymMatrix::identity(3);
        assert!(matches!(matrix_membership(&pm, &off), Err(Error::NotInAffineHull { .. })));
    }

    #[test]
    fn single_point_path() {
        let path =
            center_path(&[1.0], |l| symmetric_lambda_polytope(&m21(), l), &CenterConfig::default(), true).unwrap();
        assert_eq!(path.rows.len(), 1);
        assert_eq!(path.first_exit, None);
        assert!(center_path(&[], |l| symmetric_lambda_polytope(&m21(), l), &CenterConfig::default(), true).is_err());
    }
}
