mod common;

use proptest::prelude::*;
use sopt::oracle::oracle_dp;
use sopt::sliced::{project, sample_directions, slice_value, PointCloud};
use sopt::solver::solve_unsorted;
use sopt::{
    eval_plan_cost, solve, verify_optimality, CostSpec, PartialPlan, SolverConfig, SortedSamples,
};

fn sorted(mut v: Vec<f64>) -> SortedSamples {
    v.sort_by(f64::total_cmp);
    SortedSamples::new(v).unwrap()
}

/// Values on a coarse grid half of the time, so duplicates are common.
fn coords(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-10.0f64..10.0, 0..max_len),
        prop::collection::vec((-4i32..=4).prop_map(f64::from), 0..max_len),
    ]
}

fn exponent() -> impl Strategy<Value = CostSpec> {
    prop_oneof![Just(2.0), 1.1f64..4.0].prop_map(|p| CostSpec::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn value_non_decreasing_in_lambda(x in coords(30), y in coords(30), l1 in 0.0f64..20.0, dl in 0.0f64..20.0) {
        let (x, y) = (sorted(x), sorted(y));
        let a = solve(&x, &y, &SolverConfig::new(l1)).unwrap().value;
        let b = solve(&x, &y, &SolverConfig::new(l1 + dl)).unwrap().value;
        prop_assert!(a <= b + 1e-9 * (1.0 + b.abs()));
        prop_assert!(b <= (l1 + dl) * (x.len() + y.len()) as f64 + 1e-9);
    }

    #[test]
    fn shuffled_inputs_give_same_value(x in coords(25), y in coords(25), lambda in 0.0f64..15.0, seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let cfg = SolverConfig::new(lambda);
        let base = solve_unsorted(&x, &y, &cfg).unwrap();
        let mut rng = common::rng(seed);
        let (mut xs, mut ys) = (x.clone(), y.clone());
        xs.shuffle(&mut rng);
        ys.shuffle(&mut rng);
        let shuffled = solve_unsorted(&xs, &ys, &cfg).unwrap();
        prop_assert!(common::rel_close(base.value, shuffled.value, 1e-12));
        // The reported assignment costs what the solver claims.
        let mut transport = 0.0;
        let mut matched = 0;
        for (i, a) in shuffled.assignment.iter().enumerate() {
            if let Some(j) = *a {
                transport += (xs[i] - ys[j]).powi(2);
                matched += 1;
            }
        }
        let total = transport + lambda * (xs.len() + ys.len() - 2 * matched) as f64;
        prop_assert!(common::rel_close(total, shuffled.value, 1e-9));
    }

    #[test]
    fn monge_inequality(a in -50.0f64..50.0, b in -50.0f64..50.0, c in -50.0f64..50.0, d in -50.0f64..50.0, cost in exponent()) {
        let (xi, xk) = (a.min(b), a.max(b));
        let (yj, yl) = (c.min(d), c.max(d));
        let lhs = cost.eval(xi, yj) + cost.eval(xk, yl);
        let rhs = cost.eval(xi, yl) + cost.eval(xk, yj);
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
    }

    #[test]
    fn reflection_preserves_value_and_plan_cost(x in coords(20), y in coords(20), lambda in 0.0f64..10.0, cost in exponent()) {
        let (x, y) = (sorted(x), sorted(y));
        let cfg = SolverConfig::new(lambda).with_cost(cost);
        let sol = solve(&x, &y, &cfg).unwrap();
        let rx = sorted(x.iter().map(|v| -v).collect());
        let ry = sorted(y.iter().map(|v| -v).collect());
        let rsol = solve(&rx, &ry, &cfg).unwrap();
        prop_assert!(common::rel_close(sol.value, rsol.value, 1e-9));

        let (n, m) = (x.len(), y.len());
        let mut reflected = vec![None; n];
        for (i, j) in sol.plan.pairs() {
            reflected[n - 1 - i] = Some(m - 1 - j);
        }
        let a = eval_plan_cost(&x, &y, &sol.plan, lambda, cost).unwrap();
        let b = eval_plan_cost(&rx, &ry, &PartialPlan::new(reflected), lambda, cost).unwrap();
        prop_assert!(common::rel_close(a, b, 1e-12));
    }

    #[test]
    fn swapping_sides_preserves_value(x in coords(25), y in coords(25), lambda in 0.0f64..10.0) {
        let (x, y) = (sorted(x), sorted(y));
        let a = solve(&x, &y, &SolverConfig::new(lambda)).unwrap().value;
        let b = solve(&y, &x, &SolverConfig::new(lambda)).unwrap().value;
        prop_assert!(common::rel_close(a, b, 1e-9));
    }

    #[test]
    fn certificate_holds_for_any_exponent(x in coords(40), y in coords(40), lambda in 0.0f64..30.0, cost in exponent()) {
        let (x, y) = (sorted(x), sorted(y));
        let sol = solve(&x, &y, &SolverConfig::new(lambda).with_cost(cost)).unwrap();
        let report = verify_optimality(&x, &y, &sol, lambda, cost, 1e-9);
        prop_assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        let dp = oracle_dp(&x, &y, lambda, cost).unwrap();
        prop_assert!(common::rel_close(sol.value, dp.value, 1e-9));
    }

    #[test]
    fn slice_zero_iff_projections_coincide(pts in prop::collection::vec(-3i32..=3, 0..12), shift in prop::bool::ANY, seed in 0u64..100) {
        let coords: Vec<f64> = pts[..pts.len() / 2 * 2].iter().map(|&v| v as f64).collect();
        let x = PointCloud::new(2, coords.clone()).unwrap();
        let mut moved = coords;
        if shift && !moved.is_empty() {
            moved[0] += 0.5;
        }
        let y = PointCloud::new(2, moved).unwrap();
        let dirs = sample_directions(2, 1, seed).unwrap();
        let theta = dirs.get(0);
        let v = slice_value(&x, &y, theta, 1.0, CostSpec::default()).unwrap();
        let same = project(&x, theta).unwrap().values == project(&y, theta).unwrap().values;
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v == 0.0, same);
    }
}
