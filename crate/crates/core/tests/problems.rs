use cat_core::problem::{builtin_corpus, check_derivatives, corpus_entry, Point, ProblemSpec};
use nalgebra::DVector;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Start point plus a uniform perturbation of size `spread`.
fn near_start(start: &Point, spread: f64, rng: &mut ChaCha8Rng) -> Point {
    let x = start.as_vector().map(|v| v + rng.random_range(-spread..spread));
    Point::new(x).unwrap()
}

#[test]
fn corpus_derivatives_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for factory in builtin_corpus() {
        let entry = factory.build();
        for _ in 0..10 {
            let x = near_start(&entry.start, 0.5, &mut rng);
            let report = check_derivatives(&entry.problem, &x, 1e-6).unwrap();
            assert!(report.max_error() <= 1e-5, "{}: {report:?}", factory.name);
        }
    }
}

#[test]
fn generated_instances_have_consistent_derivatives() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in [1, 2] {
        for spec in [ProblemSpec::lds_reference(seed), ProblemSpec::mc_reference(seed)] {
            let entry = spec.build().unwrap();
            let x = near_start(&entry.start, 0.1, &mut rng);
            let report = check_derivatives(&entry.problem, &x, 1e-6).unwrap();
            assert!(report.max_error() <= 1e-5, "{}: {report:?}", entry.name);
        }
    }
}

#[test]
fn registered_minimizers_are_stationary() {
    for factory in builtin_corpus() {
        let entry = factory.build();
        if let Some(x_star) = &entry.x_star {
            let g = entry.problem.gradient(x_star);
            assert!(g.norm() <= 1e-9, "{}: |g| = {}", factory.name, g.norm());
            if let Some(f_star) = entry.f_star {
                let f = entry.problem.value(x_star);
                assert!((f - f_star).abs() <= 1e-9 * (1.0 + f_star.abs()), "{}", factory.name);
            }
        }
    }
}

#[test]
fn unknown_name_is_an_error() {
    assert!(corpus_entry("no_such_problem").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hessians_are_bit_symmetric(idx in 0usize..64, seed in any::<u64>()) {
        let corpus = builtin_corpus();
        let entry = corpus[idx % corpus.len()].build();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = near_start(&entry.start, 2.0, &mut rng);
        let h = entry.problem.hessian(x.as_vector());
        for i in 0..h.nrows() {
            for j in 0..i {
                prop_assert_eq!(h[(i, j)].to_bits(), h[(j, i)].to_bits());
            }
        }
    }

    #[test]
    fn value_and_gradient_agree_with_separate_calls(idx in 0usize..64, seed in any::<u64>()) {
        let corpus = builtin_corpus();
        let entry = corpus[idx % corpus.len()].build();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: DVector<f64> = near_start(&entry.start, 1.0, &mut rng).into_vector();
        let (f, g) = entry.problem.value_and_gradient(&x);
        prop_assert_eq!(f.to_bits(), entry.problem.value(&x).to_bits());
        prop_assert_eq!(g, entry.problem.gradient(&x));
    }
}
