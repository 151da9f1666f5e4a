mod common;

use std::sync::Arc;

use common::*;
use extrafw_core::data_io::{synth_logistic, synth_lowrank};
use extrafw_core::oracles::estimate_lipschitz;
use extrafw_core::{
    CompletionProblem, LogisticProblem, LowRankIterate, Objective, QuadraticProblem, Rank1Atom,
    SparseMatrix,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn logistic_problem(seed: u64) -> LogisticProblem {
    let s = synth_logistic(seed, 60, 12, 4, 2.0).unwrap();
    LogisticProblem::new(s.dataset.features, s.dataset.labels).unwrap()
}

fn completion_problem(seed: u64) -> CompletionProblem {
    CompletionProblem::new(synth_lowrank(seed, 15, 12, 2, 0.3, 0.1).unwrap().observed).unwrap()
}

#[test]
fn gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let q = QuadraticProblem::new(gaussian(&mut rng, 8)).unwrap();
    let lg = logistic_problem(5);
    let mc = completion_problem(5);
    for _ in 0..100 {
        let x = gaussian(&mut rng, q.dim());
        check_gradient(|x| q.evaluate(x).unwrap(), &x).unwrap();
        let x: Vec<f64> = gaussian(&mut rng, lg.dim()).iter().map(|v| 0.5 * v).collect();
        check_gradient(|x| lg.evaluate(x).unwrap(), &x).unwrap();
        let x = gaussian(&mut rng, mc.observed().len());
        check_gradient(|x| mc.evaluate_observed(x).unwrap(), &x).unwrap();
    }
}

#[test]
fn oracles_agree_with_naive_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let c = gaussian(&mut rng, 6);
    let q = QuadraticProblem::new(c.clone()).unwrap();
    let lg = logistic_problem(9);
    let dense: Vec<Vec<f64>> = lg
        .features()
        .to_rows()
        .iter()
        .map(|row| {
            let mut a = vec![0.0; lg.dim()];
            for &(j, v) in row {
                a[j] = v;
            }
            a
        })
        .collect();
    for _ in 0..20 {
        let x = gaussian(&mut rng, 6);
        let (fa, ga) = q.evaluate(&x).unwrap();
        let (fb, gb) = quadratic(&c, &x);
        assert!((fa - fb).abs() <= 1e-12 * (1.0 + fb));
        assert!(ga.iter().zip(&gb).all(|(a, b)| (a - b).abs() <= 1e-12));

        let x = gaussian(&mut rng, lg.dim());
        let (fa, ga) = lg.evaluate(&x).unwrap();
        let (fb, gb) = logistic(&dense, lg.labels(), &x);
        assert!((fa - fb).abs() <= 1e-12 * (1.0 + fb));
        assert!(ga.iter().zip(&gb).all(|(a, b)| (a - b).abs() <= 1e-12));
    }
}

#[test]
fn completion_value_matches_dense_iterate() {
    let mc = completion_problem(2);
    let (m, n) = mc.shape();
    let pattern = mc.observed().entries().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut x = LowRankIterate::zero((m, n), pattern.len());
    for k in 0..6 {
        let p = gaussian(&mut rng, m);
        let q = gaussian(&mut rng, n);
        let atom = Arc::new(Rank1Atom {
            scale: rng.random_range(-3.0..3.0),
            left: p.iter().map(|v| v / norm2(&p)).collect(),
            right: q.iter().map(|v| v / norm2(&q)).collect(),
        });
        x = x.combine(&atom, 2.0 / (k as f64 + 2.0), &pattern);
    }
    let dense = x.materialize();
    let expected: f64 = pattern
        .iter()
        .map(|&(i, j, a)| 0.5 * (dense[i * n + j] - a).powi(2))
        .sum();
    let (value, grad) = mc.evaluate(&x).unwrap();
    assert!((value - expected).abs() <= 1e-10 * (1.0 + expected));
    for (&(i, j, g), &(_, _, a)) in grad.entries().iter().zip(&pattern) {
        assert!((g - (dense[i * n + j] - a)).abs() <= 1e-10);
    }
}

#[test]
fn lipschitz_examples() {
    let single = SparseMatrix::from_rows(2, &[vec![(0, 2.0)]]).unwrap();
    let p = LogisticProblem::new(single, vec![1.0]).unwrap();
    assert!((estimate_lipschitz(&p) - 1.0).abs() < 1e-9);
    let p = LogisticProblem::new(SparseMatrix::identity(2), vec![1.0, -1.0]).unwrap();
    assert!((estimate_lipschitz(&p) - 0.125).abs() < 1e-9);
    let zeros = SparseMatrix::from_rows(3, &[vec![], vec![]]).unwrap();
    let p = LogisticProblem::new(zeros, vec![1.0, -1.0]).unwrap();
    assert_eq!(estimate_lipschitz(&p), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn oracles_are_convex(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lg = logistic_problem(seed % 4);
        let q = QuadraticProblem::new(gaussian(&mut rng, 5)).unwrap();
        let mc = completion_problem(seed % 4);
        let objectives: [(&dyn Fn(&[f64]) -> (f64, Vec<f64>), usize); 3] = [
            (&|x| lg.evaluate(x).unwrap(), lg.dim()),
            (&|x| q.evaluate(x).unwrap(), q.dim()),
            (&|x| mc.evaluate_observed(x).unwrap(), mc.observed().len()),
        ];
        for (f, d) in objectives {
            let x = gaussian(&mut rng, d);
            let y = gaussian(&mut rng, d);
            let (fx, gx) = f(&x);
            let (fy, _) = f(&y);
            let step: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            prop_assert!(fy - fx >= dot(&gx, &step) - 1e-9);
        }
    }

    #[test]
    fn logistic_gradient_is_lipschitz(seed in any::<u64>()) {
        let lg = logistic_problem(seed % 8);
        let l = estimate_lipschitz(&lg);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = gaussian(&mut rng, lg.dim());
        let y = gaussian(&mut rng, lg.dim());
        let (_, gx) = lg.evaluate(&x).unwrap();
        let (_, gy) = lg.evaluate(&y).unwrap();
        let dg: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
        let dx: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        prop_assert!(norm2(&dg) <= l * norm2(&dx) * (1.0 + 1e-6));
    }

    #[test]
    fn l2_argmin_is_optimal(
        c in prop::collection::vec(-5.0..5.0f64, 1..10),
        r in 0.05..1.0f64,
        seed in any::<u64>(),
    ) {
        prop_assume!(norm2(&c) > r * 1.01);
        let q = QuadraticProblem::new(c.clone()).unwrap();
        let (x_star, f_star) = q.argmin_l2(r).unwrap();
        let (f, grad) = quadratic(&c, &x_star);
        prop_assert!((f - f_star).abs() <= 1e-12 * (1.0 + f));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let x = in_l2(&mut rng, c.len(), r);
            let d: Vec<f64> = x.iter().zip(&x_star).map(|(a, b)| a - b).collect();
            prop_assert!(dot(&grad, &d) >= -1e-9);
        }
    }
}
