use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rasch_doe::optimizer::{classify_structure, optimize_design, OptimizerConfig, Structure};
use rasch_doe::regions::{is_corner_optimal_by_theorem, kw_certificate};
use rasch_doe::symmetry::{act_on_design, act_on_parameters, GroupElement};
use rasch_doe::{InteractionModel, ParameterVector};

fn problem() -> impl Strategy<Value = (InteractionModel, ParameterVector)> {
    (1usize..=3, 1usize..=2).prop_flat_map(|(k, d)| {
        let m = InteractionModel::new(k, d.min(k)).unwrap();
        let mm = m.clone();
        (Just(m), prop::collection::vec(-2.0f64..1.0, mm.p())).prop_map(|(m, b)| {
            let t = ParameterVector::new(&m, b).unwrap();
            (m, t)
        })
    })
}

#[test]
fn corner_structure_matches_theorem_on_a_path() {
    let m = InteractionModel::new(3, 1).unwrap();
    for lambda in [0.1, 0.2, 0.3, 0.5, 0.7, 0.9] {
        let theta = ParameterVector::symmetric(&m, &[lambda]).unwrap();
        let res = optimize_design(&theta, &m, &OptimizerConfig::default()).unwrap();
        assert!(res.converged);
        let by_theorem = is_corner_optimal_by_theorem(&theta, &m).unwrap().optimal;
        assert_eq!(res.structure == Structure::Corner, by_theorem, "lambda = {lambda}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn converged_output_is_certified((m, theta) in problem()) {
        let cfg = OptimizerConfig { record_trace: true, ..Default::default() };
        let res = optimize_design(&theta, &m, &cfg).unwrap();
        prop_assert!(res.converged);
        prop_assert!((res.design.total_weight() - 1.0).abs() <= 1e-12);
        prop_assert!(res.max_averaging_residual <= 1e-9);
        let kw = kw_certificate(&res.design, &theta, &m).unwrap();
        prop_assert!(kw.max_value <= m.p() as f64 * (1.0 + cfg.kw_tolerance));
        for pair in res.log_det_trace.windows(2) {
            prop_assert!(pair[1] >= pair[0] - 1e-12 * pair[0].abs().max(1.0));
        }
        if res.design.support_size() == m.p() {
            let p = m.p() as f64;
            for (_, w) in res.design.iter() {
                prop_assert!((w - 1.0 / p).abs() <= 10.0 * cfg.kw_tolerance);
            }
        }
        prop_assert_eq!(classify_structure(&res.design, &m, 10.0 * cfg.kw_tolerance), res.structure);
    }

    #[test]
    fn optimum_is_transported_by_symmetry((m, theta) in problem(), seed in any::<u64>()) {
        let g = GroupElement::random(m.k(), &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let cfg = OptimizerConfig::default();
        let here = optimize_design(&theta, &m, &cfg).unwrap();
        let moved_theta = act_on_parameters(&g, &theta, &m, false).unwrap();
        let there = optimize_design(&moved_theta, &m, &cfg).unwrap();
        prop_assert!((here.log_det - there.log_det).abs() <= 1e-6, "{} vs {}", here.log_det, there.log_det);
        let a = kw_certificate(&here.design, &theta, &m).unwrap();
        let b = kw_certificate(&act_on_design(&g, &here.design).unwrap(), &moved_theta, &m).unwrap();
        prop_assert_eq!(a.optimal, b.optimal);
    }
}
