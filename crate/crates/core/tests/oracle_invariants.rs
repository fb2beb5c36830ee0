use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rotavg::oracle::{exact_component, mc_component, quad_component, swap_yz, EulerQuadrature};
use rotavg::verify::sample_pairs;
use rotavg::{diag_average, IndexTuple, Rational};

fn t(s: &str) -> IndexTuple {
    s.parse().unwrap()
}

#[test]
fn swap_identity_holds() {
    for n in [3, 5, 7] {
        for (lab, mol) in sample_pairs(n, 40, n as u64, true) {
            let (sign, swapped) = swap_yz(&lab);
            let (msign, mswapped) = swap_yz(&mol);
            let direct = exact_component(n, &lab, &mol).unwrap();
            let via = exact_component(n, &swapped, &mswapped).unwrap();
            assert_eq!(direct, Rational::from((sign * msign) as i64) * via, "{lab};{mol}");
        }
    }
}

#[test]
fn lab_mol_transpose_symmetry() {
    // The average of l^T products equals the average with lab and mol exchanged.
    for (lab, mol) in sample_pairs(7, 60, 11, true) {
        assert_eq!(exact_component(7, &lab, &mol).unwrap(), exact_component(7, &mol, &lab).unwrap());
    }
}

#[test]
fn known_diagonal_values() {
    assert_eq!(exact_component(3, &t("xyz"), &t("xyz")).unwrap(), Rational::frac(1, 6));
    assert_eq!(exact_component(5, &t("xyzzz"), &t("xyzzz")).unwrap(), Rational::frac(1, 10));
    assert_eq!(exact_component(7, &t("xyyyzzz"), &t("xyyyzzz")).unwrap(), Rational::frac(9, 140));
    assert_eq!(diag_average(3, 3, 3).unwrap(), Rational::frac(19, 420));
    assert_eq!(exact_component(3, &t("xxx"), &t("xyz")).unwrap(), Rational::zero());
}

#[test]
fn float_oracles_agree_with_exact() {
    let quad = EulerQuadrature::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (lab, mol) in sample_pairs(5, 10, 4, true) {
        let exact = exact_component(5, &lab, &mol).unwrap().to_f64();
        let q = quad_component(5, &lab, &mol, &quad).unwrap();
        assert!((q - exact).abs() < 1e-12);
        let mc = mc_component(5, &lab, &mol, 20_000, rng.random()).unwrap();
        assert!((mc.estimate - exact).abs() <= 5.0 * mc.stderr + 1e-12, "{lab};{mol}");
    }
}

#[test]
fn rejects_bad_inputs() {
    assert!(exact_component(5, &t("xyz"), &t("xyzzz")).is_err());
    assert!(mc_component(3, &t("xyz"), &t("xyz"), 10, 0).is_err());
    assert!(quad_component(9, &t("xyzzzzzzz"), &t("xyzzzzzzz"), &EulerQuadrature::new(8, 16, 16)).is_err());
    assert!(diag_average(2, 3, 4).is_err());
}
