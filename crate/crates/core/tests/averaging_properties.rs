use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotavg::averaging::{average_coefficients, average_tensor, compact_average, AnyTensor};
use rotavg::oracle::random_rotation;
use rotavg::{enumerate_odd_iso, eval_iso, shared_average, solve_linear_exact, DenseTensor, LinearSolution, Rational};

fn rational_tensor(n: usize, seed: u64) -> DenseTensor<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseTensor::from_fn(n, |_| Rational::frac(rng.random_range(-5..=5), rng.random_range(1..=4))).unwrap()
}

/// The averaged tensor must lie in the span of the isotropic basis.
fn is_isotropic(t: &DenseTensor<Rational>) -> bool {
    let n = t.rank();
    let basis = enumerate_odd_iso(n).unwrap();
    let rows: Vec<Vec<Rational>> = (0..3usize.pow(n as u32))
        .map(|flat| {
            let idx = rotavg::IndexTuple::from_flat_index(flat, n);
            basis.iter().map(|g| Rational::from(eval_iso(g, &idx).unwrap() as i64)).collect()
        })
        .collect();
    !matches!(solve_linear_exact(&rows, t.entries()).unwrap(), LinearSolution::Inconsistent)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn linear(seed_a in any::<u64>(), seed_b in any::<u64>(), p in -4i64..=4, q in 1i64..=3) {
        let a = rational_tensor(5, seed_a);
        let b = rational_tensor(5, seed_b);
        let k = Rational::frac(p, q);
        let lhs = average_tensor(&a.combine(&k, &b, &Rational::one()).unwrap()).unwrap();
        let rhs = average_tensor(&a).unwrap().combine(&k, &average_tensor(&b).unwrap(), &Rational::one()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn idempotent(seed in any::<u64>()) {
        let once = average_tensor(&rational_tensor(5, seed)).unwrap();
        prop_assert_eq!(average_tensor(&once).unwrap(), once);
    }
}

#[test]
fn output_is_isotropic() {
    for (n, seed) in [(3, 1), (5, 2), (5, 3)] {
        let avg = average_tensor(&rational_tensor(n, seed)).unwrap();
        assert!(is_isotropic(&avg), "n={n}");
    }
    assert!(!is_isotropic(&rational_tensor(5, 9)));
}

#[test]
fn float_path_is_rotation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for n in [3, 5, 7, 9] {
        let t = DenseTensor::from_fn(n, |_| rng.random_range(-1.0..1.0)).unwrap();
        let avg = average_tensor(&t).unwrap();
        let r = random_rotation(&mut rng);
        assert!(avg.rotated(&r).max_abs_diff(&avg) < 1e-10, "n={n}");
        assert!(average_tensor(&t.rotated(&r)).unwrap().max_abs_diff(&avg) < 1e-10, "n={n}");
    }
}

#[test]
fn float_matches_rational() {
    let t = rational_tensor(7, 5);
    let f = DenseTensor::new(7, t.entries().iter().map(Rational::to_f64).collect()).unwrap();
    let exact = average_tensor(&t).unwrap();
    let approx = average_tensor(&f).unwrap();
    let worst = exact.entries().iter().zip(approx.entries()).map(|(a, b)| (a.to_f64() - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn compact_coefficients_rebuild_average() {
    let t = rational_tensor(5, 8);
    let op = shared_average(5).unwrap();
    let coeffs = average_coefficients(&op, &t).unwrap();
    let rebuilt = DenseTensor::isotropic(5, &op.basis(), &coeffs).unwrap();
    assert_eq!(rebuilt, average_tensor(&t).unwrap());
    let compact = compact_average(&AnyTensor::Rational(t)).unwrap();
    assert_eq!(compact.coefficients.len(), 10);
}

#[test]
fn rank_eleven_float_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = DenseTensor::from_fn(11, |_| rng.random_range(-1.0..1.0)).unwrap();
    let avg = average_tensor(&t).unwrap();
    assert!(average_tensor(&avg).unwrap().max_abs_diff(&avg) < 1e-10);
}
