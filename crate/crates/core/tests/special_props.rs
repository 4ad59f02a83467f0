mod common;

use common::simpson;
use mifde_core::special::{ml, ml_matrix, ml_real, rgamma, MlParams};
use mifde_core::{Complex64, ComplexMatrix64};
use proptest::prelude::*;

proptest! {
    #[test]
    fn value_at_origin(alpha in 0.01f64..=1.0, beta in 0.05f64..6.0) {
        let v = ml_real(alpha, beta, 0.0).unwrap();
        prop_assert!((v - rgamma(beta)).abs() <= 1e-14);
    }

    #[test]
    fn one_by_one_matrix_matches_scalar(alpha in 0.1f64..=1.0, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let z = Complex64::new(re, im);
        let scalar = ml(MlParams::one(alpha), z).unwrap().value;
        let m = ComplexMatrix64::from_vec(1, 1, vec![z]).unwrap();
        let matrix = ml_matrix(alpha, &m).unwrap().value[(0, 0)];
        prop_assert!((scalar - matrix).norm() <= 1e-15 * scalar.norm().max(1.0), "{scalar} vs {matrix}");
    }
}

#[test]
fn derivative_identity_by_central_difference() {
    let h = 1e-5;
    for alpha in [0.3, 0.5, 0.8, 1.0] {
        for beta in [0.5, 1.0, 1.7] {
            for z in [-2.0, -1.1, -0.3, 0.4, 1.1, 2.0] {
                if alpha < 0.5 && f64::abs(z) > 1.1 {
                    continue;
                }
                let fd = (ml_real(alpha, beta, z + h).unwrap() - ml_real(alpha, beta, z - h).unwrap()) / (2.0 * h);
                let exact = ml(MlParams::new(alpha, beta + alpha, 2).unwrap(), Complex64::new(z, 0.0)).unwrap().re();
                let rel = (fd - exact).abs() / exact.abs();
                assert!(rel <= 1e-6, "α={alpha} β={beta} z={z}: {fd} vs {exact}");
            }
        }
    }
}

#[test]
fn term_by_term_integration() {
    // 1 + ∫_0^t λ s^{α−1} E_{α,α}(λ s^α) ds with u = s^α.
    for alpha in [0.3, 0.5, 0.75] {
        for lambda in [-1.0, -0.5] {
            for t in [0.1, 0.5, 1.0, 1.5, 2.0] {
                let f = |u: f64| ml_real(alpha, alpha, lambda * u).unwrap();
                let integral = simpson(&f, 0.0, f64::powf(t, alpha), 1e-12);
                let lhs = 1.0 + lambda / alpha * integral;
                let rhs = ml_real(alpha, 1.0, lambda * f64::powf(t, alpha)).unwrap();
                assert!((lhs - rhs).abs() <= 1e-8, "α={alpha} λ={lambda} t={t}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn large_negative_arguments_flag_cancellation() {
    let quiet = ml(MlParams::one(0.5), Complex64::new(-2.0, 0.0)).unwrap();
    assert!(!quiet.precision_loss);
    let noisy = ml(MlParams::one(1.0), Complex64::new(-30.0, 0.0)).unwrap();
    assert!(noisy.precision_loss);
    assert!(noisy.max_term_magnitude > 1e12 * noisy.value.norm());
    assert!(matches!(
        ml(MlParams::one(0.5), Complex64::new(-30.0, 0.0)),
        Err(mifde_core::Error::OverflowDomain { .. })
    ));
}
