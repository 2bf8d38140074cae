use proptest::prelude::*;
use scpda_core::dataio::{to_libsvm_string, Dataset, SparseExample};
use scpda_core::*;

fn vec_of(d: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, d)
}

fn svm_problem() -> impl Strategy<Value = ProblemInstance> {
    (1usize..6, 1usize..15, 0.01f64..3.0).prop_flat_map(|(d, n, mu)| {
        prop::collection::vec((prop::bool::ANY, vec_of(d, 3.0)), n).prop_map(move |rows| {
            let examples = rows
                .into_iter()
                .map(|(pos, x)| Example::dense(if pos { 1.0 } else { -1.0 }, &x))
                .collect();
            ProblemInstance::svm(examples, d, mu).unwrap()
        })
    })
}

fn problem_and_points() -> impl Strategy<Value = (ProblemInstance, Vec<f64>, Vec<f64>)> {
    svm_problem().prop_flat_map(|p| {
        let d = p.dim();
        (Just(p), vec_of(d, 4.0), vec_of(d, 4.0))
    })
}

fn feasible_set(d: usize) -> impl Strategy<Value = FeasibleSet> {
    prop_oneof![
        Just(FeasibleSet::WholeSpace),
        (0.01f64..5.0).prop_map(|r| FeasibleSet::l2_ball(r).unwrap()),
        (vec_of(d, 2.0), vec_of(d, 2.0)).prop_map(|(a, b)| {
            let lo: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
            let hi: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
            FeasibleSet::boxed(lo, hi).unwrap()
        }),
    ]
}

fn set_and_points() -> impl Strategy<Value = (FeasibleSet, Vec<f64>, Vec<f64>, Vec<f64>)> {
    (1usize..7).prop_flat_map(|d| (feasible_set(d), vec_of(d, 10.0), vec_of(d, 10.0), vec_of(d, 10.0)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn strong_convexity((p, u, w) in problem_and_points()) {
        let g = p.full_subgradient(&u).unwrap().vector;
        let diff: Vec<f64> = w.iter().zip(&u).map(|(a, b)| a - b).collect();
        let lower = p.objective_value(&u).unwrap() + dot(&g, &diff) + 0.5 * p.mu() * dot(&diff, &diff);
        prop_assert!(p.objective_value(&w).unwrap() >= lower - 1e-9);
    }

    #[test]
    fn subgradient_inequality((p, u, w) in problem_and_points()) {
        let g = p.full_subgradient(&u).unwrap().vector;
        let diff: Vec<f64> = w.iter().zip(&u).map(|(a, b)| a - b).collect();
        prop_assert!(p.objective_value(&w).unwrap() >= p.objective_value(&u).unwrap() + dot(&g, &diff) - 1e-9);
    }

    #[test]
    fn objective_difference_agrees((p, u, w) in problem_and_points()) {
        let direct = p.objective_value(&u).unwrap() - p.objective_value(&w).unwrap();
        let stable = p.objective_difference(&u, &w).unwrap();
        prop_assert!((direct - stable).abs() <= 1e-9 * (1.0 + direct.abs()));
    }

    #[test]
    fn value_and_subgradient_single_pass((p, u, _w) in problem_and_points()) {
        let (f, g) = p.value_and_subgradient(&u).unwrap();
        prop_assert_eq!(f, p.objective_value(&u).unwrap());
        prop_assert_eq!(g.vector, p.full_subgradient(&u).unwrap().vector);
    }

    #[test]
    fn projection_properties((set, v, u, z) in set_and_points()) {
        let pv = set.project(&v).unwrap();
        let pu = set.project(&u).unwrap();
        let pz = set.project(&z).unwrap();
        prop_assert!(set.contains(&pv, 1e-9));
        let ppv = set.project(&pv).unwrap();
        let idem: f64 = ppv.iter().zip(&pv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(idem <= 1e-12);
        let d_proj = pu.iter().zip(&pv).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let d_orig = u.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assert!(d_proj <= d_orig + 1e-9);
        // <v - P(v), z' - P(v)> <= 0 for every z' in the set
        let variational: f64 = (0..v.len()).map(|i| (v[i] - pv[i]) * (pz[i] - pv[i])).sum();
        prop_assert!(variational <= 1e-9);
        if set.contains(&v, 0.0) {
            prop_assert_eq!(pv, v);
        }
    }

    #[test]
    fn quadratic_gradient_vanishes_at_center(c in vec_of(5, 10.0), mu in 0.01f64..10.0) {
        let p = ProblemInstance::quadratic(c.clone(), mu).unwrap();
        prop_assert!(p.full_subgradient(&c).unwrap().vector.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn bound_rhs_nonnegative_and_linear_in_gradients(
        g in prop::collection::vec(0.0f64..100.0, 1..50),
        mu in 0.01f64..10.0,
        scale in 0.0f64..10.0,
    ) {
        let b = theorem2_bound_rhs(&g, mu, ScheduleKind::Linear).unwrap();
        prop_assert!(b.iter().all(|&x| x >= 0.0));
        let scaled: Vec<f64> = g.iter().map(|x| x * scale).collect();
        let bs = theorem2_bound_rhs(&scaled, mu, ScheduleKind::Linear).unwrap();
        for (x, y) in b.iter().zip(&bs) {
            prop_assert!((x * scale - y).abs() <= 1e-9 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn libsvm_round_trip(rows in prop::collection::vec(
        (prop::bool::ANY, prop::collection::btree_map(1u32..500, -1e6f64..1e6, 0..12)),
        1..40,
    )) {
        let examples: Vec<SparseExample> = rows
            .into_iter()
            .map(|(pos, m)| SparseExample { label: if pos { 1 } else { -1 }, entries: m.into_iter().collect() })
            .collect();
        let dim = examples.iter().filter_map(|e| e.entries.last().map(|&(i, _)| i as usize)).max().unwrap_or(0);
        let data = Dataset { examples, dim };
        let text = to_libsvm_string(&data);
        let back = parse_libsvm_str(&text).unwrap();
        // a file with a single label value keeps it
        prop_assert_eq!(back, data);
    }
}
