mod common;

use common::{random_matrix, simpson};
use mifde_core::special::ml_matrix_real;
use mifde_core::spectral::{decompose, decompose_auto, decompose_commensurate, eval_spectral, rational_orders};
use mifde_core::series::solve_series;
use mifde_core::spectral::solve_spectral;
use mifde_core::{Complex64, Matrix64, Polynomial64, RationalOrder, Spectral64, System64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAIRS: [((i64, i64), (i64, i64)); 5] = [((1, 2), (1, 1)), ((1, 3), (2, 3)), ((1, 3), (1, 2)), ((3, 4), (1, 4)), ((2, 5), (2, 5))];

fn system(rng: &mut ChaCha8Rng, (a, b): ((i64, i64), (i64, i64))) -> System64 {
    let (alpha, beta) = rational_orders(RationalOrder::new(a.0, a.1).unwrap(), RationalOrder::new(b.0, b.1).unwrap());
    let y0 = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    System64::new(random_matrix(rng, 2, 1.0), 1, alpha, beta, y0).unwrap()
}

fn forms(sys: &System64) -> Vec<Spectral64> {
    let mut out: Vec<Spectral64> = decompose(sys).into_iter().collect();
    for k in 1..=3 {
        if let Ok(f) = decompose_commensurate(sys, k) {
            out.push(f);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_fractions_reconstruct_the_quotient(seed in any::<u64>(), pair in 0usize..PAIRS.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = system(&mut rng, PAIRS[pair]);
        for form in forms(&sys) {
            for _ in 0..20 {
                let z = Complex64::from_polar(rng.gen_range(0.2..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
                let d = form.denominator.eval(z);
                for i in 0..2 {
                    let want = form.numerators[i].eval(z) / d;
                    let got = form.reconstruct(i, z);
                    prop_assert!((got - want).norm() <= 1e-10 * want.norm().max(1.0), "{} vs {}", got, want);
                }
            }
        }
    }

    #[test]
    fn poles_and_residues_pair_by_conjugation(seed in any::<u64>(), pair in 0usize..PAIRS.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = system(&mut rng, PAIRS[pair]);
        for form in forms(&sys) {
            for (l, r) in form.poles.iter().zip(&form.residues) {
                let (k, partner) = form
                    .poles
                    .iter()
                    .enumerate()
                    .min_by(|a, b| (a.1 - l.conj()).norm().total_cmp(&(b.1 - l.conj()).norm()))
                    .unwrap();
                prop_assert!((partner - l.conj()).norm() <= 1e-10 * l.norm().max(1.0));
                for i in 0..2 {
                    let scale = r[i].norm().max(1.0);
                    prop_assert!((form.residues[k][i] - r[i].conj()).norm() <= 1e-10 * scale);
                }
            }
        }
    }

    #[test]
    fn initial_value_is_reproduced(seed in any::<u64>(), pair in 0usize..PAIRS.len()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sys = system(&mut rng, PAIRS[pair]);
        for form in forms(&sys) {
            let v = eval_spectral(&form, 0.0).unwrap();
            prop_assert!((v.value[0] - sys.y0()[0]).abs() <= 1e-10);
            prop_assert!((v.value[1] - sys.y0()[1]).abs() <= 1e-10);
        }
    }
}

fn single_pole(lambda: f64, ml_alpha: f64, ml_beta: f64, k0: u32) -> Spectral64 {
    let one = Complex64::new(1.0, 0.0);
    let pole = Complex64::new(lambda, 0.0);
    Spectral64 {
        poles: vec![pole],
        residues: vec![[one, Complex64::new(0.0, 0.0)]],
        ml_alpha,
        ml_beta,
        k0,
        denominator: Polynomial64::from_roots(one, &[pole]),
        numerators: [Polynomial64::new(vec![one]), Polynomial64::new(vec![])],
        swapped: false,
    }
}

#[test]
fn laplace_transform_of_a_single_pole() {
    for (lambda, a, b, k0) in [(-1.0, 0.5, 1.0, 0), (-0.5, 1.0 / 3.0, 2.0 / 3.0, 1), (0.3, 0.5, 1.0, 0)] {
        let form = single_pole(lambda, a, b, k0);
        for s in [1.0f64, 2.0, 4.0] {
            // t = u^{1/α̃} removes the endpoint singularity.
            let f = |u: f64| {
                if u == 0.0 {
                    return 0.0;
                }
                let t = u.powf(1.0 / a);
                (-s * t).exp() * eval_spectral(&form, t).unwrap().value[0] * t / (a * u)
            };
            let got = simpson(&f, 0.0, 50f64.powf(a), 1e-9);
            let want = s.powf(a - b) / (s.powf(a) - lambda);
            assert!((got - want).abs() <= 1e-4, "λ={lambda} α̃={a} s={s}: {got} vs {want}");
        }
    }
}

#[test]
fn equal_orders_collapse_to_matrix_function() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let half = RationalOrder::new(1, 2).unwrap();
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 2, 1.0);
        let y0 = vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let (o, _) = rational_orders::<f64>(half, half);
        let sys = System64::new(a.clone(), 1, o, o, y0.clone()).unwrap();
        let form = decompose_commensurate(&sys, 1).unwrap();
        assert_eq!(form.poles.len(), 2);
        for t in [0.3f64, 1.0] {
            let e = ml_matrix_real(0.5, &a.scale(t.sqrt())).unwrap();
            let want = e.mul_vec(&y0);
            let got = eval_spectral(&form, t).unwrap().value;
            for i in 0..2 {
                assert!((got[i] - want[i]).abs() <= 1e-10, "t={t}: {got:?} vs {want:?}");
            }
        }
    }
}

#[test]
fn general_rational_pairs_match_series() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 0.1).collect();
    for pair in [((1, 3), (1, 2)), ((1, 2), (3, 4)), ((3, 4), (1, 4)), ((17, 20), (19, 20))] {
        for _ in 0..4 {
            let sys = system(&mut rng, pair);
            let form = decompose_auto(&sys).unwrap();
            let spec = solve_spectral(&form, &times).unwrap();
            let series = solve_series(&sys, &times, 1e-15).unwrap();
            let gap = spec.max_abs_diff(&series).unwrap();
            assert!(gap <= 1e-8, "{pair:?}: gap {gap}");
        }
    }
}

#[test]
fn degenerate_systems_are_rejected() {
    let third = RationalOrder::new(1, 3).unwrap();
    let (o1, o2) = rational_orders::<f64>(third, RationalOrder::new(2, 3).unwrap());
    let singular = Matrix64::from_rows(&[[1.0, 2.0], [0.5, 1.0]]).unwrap();
    let sys = System64::new(singular, 1, o1, o2, vec![1.0, 0.0]).unwrap();
    assert!(decompose(&sys).is_err());
    let (h, _) = rational_orders::<f64>(RationalOrder::new(1, 2).unwrap(), third);
    let wrong = System64::new(Matrix64::identity(2).scale(-1.0), 1, h, o1, vec![1.0, 1.0]).unwrap();
    assert!(decompose_commensurate(&wrong, 2).is_err());
}
