use proptest::prelude::*;

use rasch_doe::combinatorics::{binomial, inverse_model_matrix, model_matrix, transform_vector};
use rasch_doe::fisher::regression_vector;
use rasch_doe::InteractionModel;

/// Exact inverse by Gauss–Jordan elimination over the rationals, kept as
/// numerator/denominator pairs in `i128`.
fn rational_inverse(a: &[Vec<i64>]) -> Vec<Vec<(i128, i128)>> {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    fn reduce((n, d): (i128, i128)) -> (i128, i128) {
        let g = gcd(n, d).max(1);
        let s = if d < 0 { -1 } else { 1 };
        (s * n / g, s * d / g)
    }
    let sub = |x: (i128, i128), y: (i128, i128)| reduce((x.0 * y.1 - y.0 * x.1, x.1 * y.1));
    let mul = |x: (i128, i128), y: (i128, i128)| reduce((x.0 * y.0, x.1 * y.1));
    let div = |x: (i128, i128), y: (i128, i128)| reduce((x.0 * y.1, x.1 * y.0));
    let n = a.len();
    let mut m: Vec<Vec<(i128, i128)>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<(i128, i128)> = row.iter().map(|v| (*v as i128, 1)).collect();
            r.extend((0..n).map(|j| ((i == j) as i128, 1)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col].0 != 0).expect("nonsingular");
        m.swap(col, piv);
        let p = m[col][col];
        for j in 0..2 * n {
            m[col][j] = div(m[col][j], p);
        }
        for r in 0..n {
            if r != col && m[r][col].0 != 0 {
                let f = m[r][col];
                for j in 0..2 * n {
                    m[r][j] = sub(m[r][j], mul(f, m[col][j]));
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

#[test]
fn inverse_matches_rational_elimination() {
    for k in 1..=6 {
        for d in 1..=k.min(3) {
            let m = InteractionModel::new(k, d).unwrap();
            let f = model_matrix(&m);
            let rows: Vec<Vec<i64>> = (0..m.p()).map(|i| f.row(i).to_vec()).collect();
            let exact = rational_inverse(&rows);
            let finv = inverse_model_matrix(&m);
            for i in 0..m.p() {
                for j in 0..m.p() {
                    assert_eq!(exact[i][j], (finv[(i, j)] as i128, 1), "k={k} d={d} ({i},{j})");
                }
            }
        }
    }
}

/// `C(n, r)` extended to negative `n` by `C(n, r) = (-1)^r C(r - n - 1, r)`.
fn extended_binomial(n: i64, r: i64) -> i64 {
    if n >= 0 {
        binomial(n, r)
    } else {
        let sign = if r % 2 == 0 { 1 } else { -1 };
        sign * binomial(r - n - 1, r)
    }
}

#[test]
fn alternating_sum_identity() {
    for n in 0..=12i64 {
        for big_k in 0..=n {
            let lhs: i64 = (0..=big_k).map(|j| if j % 2 == 0 { 1 } else { -1 } * binomial(n, j)).sum();
            let sign = if big_k % 2 == 0 { 1 } else { -1 };
            assert_eq!(lhs, sign * extended_binomial(n - 1, big_k), "n={n} K={big_k}");
        }
    }
}

#[test]
fn model_matrix_is_unitriangular() {
    let m = InteractionModel::new(5, 3).unwrap();
    let f = model_matrix(&m);
    assert_eq!(f.determinant(), 1);
    for i in 0..m.p() {
        assert_eq!(f[(i, i)], 1);
        for j in i + 1..m.p() {
            assert_eq!(f[(i, j)], 0);
        }
    }
}

proptest! {
    #[test]
    fn transform_vector_solves_transposed_system(k in 1usize..=9, d_off in 0usize..4, bits in any::<u64>()) {
        let d = 1 + d_off % k;
        let m = InteractionModel::new(k, d).unwrap();
        let x = rasch_doe::BinarySetting::new(k, bits & ((1u64 << k) - 1)).unwrap();
        let g = transform_vector(&x, &m).unwrap();
        let fx: Vec<i64> = regression_vector(&x, &m).unwrap().iter().map(|v| *v as i64).collect();
        prop_assert_eq!(model_matrix(&m).transpose().mul_vec(&g), fx);
    }

    #[test]
    fn transform_vector_is_supported_on_subsets_of_x(k in 2usize..=8, bits in any::<u64>()) {
        let m = InteractionModel::new(k, 2).unwrap();
        let x = rasch_doe::BinarySetting::new(k, bits & ((1u64 << k) - 1)).unwrap();
        let g = transform_vector(&x, &m).unwrap();
        for (a, v) in m.subsets().iter().zip(&g) {
            if !a.is_subset_of(x.support()) {
                prop_assert_eq!(*v, 0);
            }
        }
    }
}
