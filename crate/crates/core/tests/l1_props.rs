mod common;

use common::random_matrix;
use mifde_core::l1::{caputo_apply, step_solve, step_solve_richardson, L1Weights, MultiIndexSystem};
use mifde_core::quadrature::fractional_integral;
use mifde_core::series::solve_series;
use mifde_core::special::ml_real;
use mifde_core::stability::rational_index_stable;
use mifde_core::{Matrix64, Order64, RationalOrder, System64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn weights_start_at_one_and_decrease(order in 0.01f64..0.99, n in 2usize..400) {
        let w = L1Weights::new(order, 0.01, n);
        prop_assert_eq!(w.get(1), 1.0);
        for j in 2..=n {
            prop_assert!(w.get(j) < w.get(j - 1));
            prop_assert!(w.get(j) > 0.0);
        }
    }
}

#[test]
fn index_two_agrees_with_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let orders = [RationalOrder::new(1, 2).unwrap(), RationalOrder::one()];
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 0.05).collect();
    let mut found = 0;
    while found < 20 {
        let a = random_matrix(&mut rng, 2, 1.5);
        if !rational_index_stable(&a, &orders).map(|v| v.stable()).unwrap_or(false) {
            continue;
        }
        found += 1;
        let y0 = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let sys = System64::new(a, 1, Order64::Rational(orders[0]), Order64::Rational(orders[1]), y0).unwrap();
        let series = solve_series(&sys, &times, 1e-15).unwrap();
        let l1 = step_solve(&MultiIndexSystem::from(&sys), 1e-3, 1000).unwrap();
        for (j, _) in times.iter().enumerate() {
            for i in 0..2 {
                let gap = (series.state(j)[i] - l1.state(50 * j)[i]).abs();
                assert!(gap <= 5e-2, "system {found}: gap {gap}");
            }
        }
    }
}

fn increment_error(h: f64) -> f64 {
    let alpha = 0.6;
    let n = (1.0 / h).round() as usize;
    let sys = MultiIndexSystem::new(Matrix64::from_vec(1, 1, vec![-1.0]).unwrap(), vec![alpha], vec![1.0]).unwrap();
    let tr = step_solve(&sys, h, n).unwrap();
    let d = caputo_apply(&tr, alpha, h).unwrap();
    let mut samples: Vec<f64> = d.iter().map(|row| row[0]).collect();
    samples.insert(0, -sys.y0()[0]);
    let integral = fractional_integral(&samples, alpha, h);
    let y = tr.component(0);
    integral.iter().zip(&y).fold(0.0f64, |m, (i, yk)| m.max((i - (yk - y[0])).abs()))
}

#[test]
fn integrating_the_discrete_derivative_recovers_the_increment() {
    let coarse = increment_error(1e-2);
    let fine = increment_error(5e-3);
    assert!(coarse <= 5.0 * 1e-2, "coarse error {coarse}");
    assert!(fine <= 5.0 * 5e-3, "fine error {fine}");
    assert!(fine < coarse, "{fine} !< {coarse}");
}

#[test]
fn richardson_beats_plain_stepping() {
    let exact = ml_real(0.5, 1.0, -1.0).unwrap();
    let sys = MultiIndexSystem::new(Matrix64::from_vec(1, 1, vec![-1.0]).unwrap(), vec![0.5], vec![1.0]).unwrap();
    let plain = (step_solve(&sys, 0.01, 100).unwrap().state(100)[0] - exact).abs();
    let extrap = (step_solve_richardson(&sys, 0.01, 100).unwrap().state(100)[0] - exact).abs();
    assert!(extrap < 0.2 * plain, "{extrap} vs {plain}");
}
