use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rasch_doe::geometry::{
    center_path, lmi_slice, locate_center, log_det_derivatives, polytope_membership, polytope_vertices,
    symmetric_lambda_polytope, CenterConfig, CenterStatus,
};
use rasch_doe::optimizer::{optimize_design, OptimizerConfig};
use rasch_doe::{InteractionModel, ParameterVector};

fn m21() -> InteractionModel {
    InteractionModel::new(2, 1).unwrap()
}

fn det3(a: [[f64; 3]; 3]) -> f64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

#[test]
fn determinant_matches_displayed_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (l1, l2) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
        let theta = ParameterVector::new(&m21(), vec![0.0, f64::ln(l1), f64::ln(l2)]).unwrap();
        let slice = lmi_slice(&polytope_vertices(&theta, &m21()).unwrap());
        let (x, y, z): (f64, f64, f64) =
            (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let p = l1 * l2;
        let shown = [
            [1.0 + x * (l1 - 1.0) + y * (l2 - 1.0) + z * (p - 1.0), l1 * x + p * z, l2 * y + p * z],
            [l1 * x + p * z, l1 * x + p * z, p * z],
            [l2 * y + p * z, p * z, l2 * y + p * z],
        ];
        let s = slice.matrix_at(&[x, y, z]);
        let ours = det3([0, 1, 2].map(|i| [0, 1, 2].map(|j| s.get(i, j))));
        let want = det3(shown);
        assert!((ours - want).abs() <= 1e-10 * want.abs().max(1e-3), "{ours} vs {want}");
    }
}

#[test]
fn center_is_the_d_optimal_design_while_inside() {
    // inside the simplex the analytic center is the D-optimal weight vector
    let cfg = OptimizerConfig { kw_tolerance: 1e-10, ..Default::default() };
    for lambda in [1.0, 0.9, 0.8, 0.6, 0.5, 0.45] {
        let theta = ParameterVector::symmetric(&m21(), &[lambda]).unwrap();
        let opt = optimize_design(&theta, &m21(), &cfg).unwrap();
        let pm = symmetric_lambda_polytope(&m21(), lambda).unwrap();
        let c = locate_center(&pm, None, &CenterConfig::default()).unwrap();
        assert!(c.inside_polytope());
        let w = c.membership.unwrap().weights.unwrap();
        for (x, wc) in w {
            assert!((wc - opt.design.weight(&x)).abs() < 1e-5, "lambda {lambda} at {x}: {wc}");
        }
    }
}

#[test]
fn warm_and_cold_paths_agree() {
    let grid: Vec<f64> = (0..=40).map(|i| 1.0 - 0.02 * i as f64).collect();
    let cfg = CenterConfig::default();
    let family = |l| symmetric_lambda_polytope(&m21(), l);
    let warm = center_path(&grid, family, &cfg, true).unwrap();
    let cold = center_path(&grid, family, &cfg, false).unwrap();
    assert_eq!(warm.first_exit, cold.first_exit);
    for (a, b) in warm.rows.iter().zip(&cold.rows) {
        assert_eq!(a.center.status, b.center.status);
        if a.center.status == CenterStatus::Converged {
            for (u, v) in a.center.coordinates.iter().zip(&b.center.coordinates) {
                assert!((u - v).abs() < 1e-7);
            }
        }
    }
}

#[test]
fn center_beats_random_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for lambda in [0.9, 0.5, 0.3] {
        let pm = symmetric_lambda_polytope(&m21(), lambda).unwrap();
        let slice = lmi_slice(&pm);
        let c = locate_center(&pm, None, &CenterConfig::default()).unwrap();
        assert_eq!(c.status, CenterStatus::Converged);
        for _ in 0..1000 {
            let u: Vec<f64> = c.coordinates.iter().map(|v| v + rng.random_range(-0.5..0.5)).collect();
            if let Some(ch) = slice.matrix_at(&u).cholesky() {
                assert!(ch.log_det() <= c.log_det + 1e-12);
            }
        }
    }
}

#[test]
fn center_inside_near_unit_intensity() {
    for lambda in [0.9, 0.95, 1.0] {
        let pm = symmetric_lambda_polytope(&m21(), lambda).unwrap();
        assert!(locate_center(&pm, None, &CenterConfig::default()).unwrap().inside_polytope());
    }
}

#[test]
fn membership_of_vertex_midpoints() {
    let m = InteractionModel::new(3, 1).unwrap();
    let pm = polytope_vertices(&ParameterVector::symmetric(&m, &[0.6]).unwrap(), &m).unwrap();
    let n = pm.vertex_coordinates.len();
    for i in 0..n {
        for j in i + 1..n {
            let mid: Vec<f64> =
                pm.vertex_coordinates[i].iter().zip(&pm.vertex_coordinates[j]).map(|(a, b)| 0.5 * (a + b)).collect();
            let mem = polytope_membership(&pm, &mid).unwrap();
            assert!(mem.inside);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converged_centers_are_stationary(l1 in 0.25f64..2.0, l2 in 0.25f64..2.0) {
        let theta = ParameterVector::new(&m21(), vec![0.0, l1.ln(), l2.ln()]).unwrap();
        let pm = polytope_vertices(&theta, &m21()).unwrap();
        let c = locate_center(&pm, None, &CenterConfig::default()).unwrap();
        prop_assume!(c.status == CenterStatus::Converged);
        let (_, grad, _) = log_det_derivatives(&lmi_slice(&pm), &c.coordinates).unwrap();
        for g in grad {
            prop_assert!(g.abs() <= 1e-7);
        }
    }

    #[test]
    fn gradient_matches_finite_differences(
        lambda in 0.2f64..1.0,
        w in prop::collection::vec(0.05f64..1.0, 4),
        dir in 0usize..3,
    ) {
        let total: f64 = w.iter().sum();
        let u: Vec<f64> = w[1..].iter().map(|v| v / total).collect();
        let slice = lmi_slice(&symmetric_lambda_polytope(&m21(), lambda).unwrap());
        let h = 1e-5;
        let (_, grad, hess) = log_det_derivatives(&slice, &u).unwrap();
        let mut up = u.clone();
        let mut dn = u.clone();
        up[dir] += h;
        dn[dir] -= h;
        let (lu, gu, _) = log_det_derivatives(&slice, &up).unwrap();
        let (ld, gd, _) = log_det_derivatives(&slice, &dn).unwrap();
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
        prop_assert!(rel(grad[dir], (lu - ld) / (2.0 * h)) <= 1e-5);
        for j in 0..3 {
            prop_assert!(rel(hess[dir][j], (gu[j] - gd[j]) / (2.0 * h)) <= 1e-5);
        }
    }
}
