use mifde_core::poly::{characteristic_polynomial, find_roots, partial_fractions};
use mifde_core::stability::eigenvalues;
use mifde_core::{Complex64, Matrix64, Polynomial64, RationalOrder};
use proptest::prelude::*;

fn unit_disc() -> impl Strategy<Value = Complex64> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, a)| Complex64::from_polar(r, a))
}

fn matrix2() -> impl Strategy<Value = Matrix64> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(|v| Matrix64::from_vec(2, 2, v.to_vec()).unwrap())
}

fn order() -> impl Strategy<Value = RationalOrder> {
    (1i64..=4, 1i64..=4).prop_filter_map("order in (0, 1]", |(n, d)| if n <= d { RationalOrder::new(n, d).ok() } else { None })
}

proptest! {
    #[test]
    fn roots_reproduce_coefficients(
        mut coeffs in prop::collection::vec(unit_disc(), 2..=13),
        lead in unit_disc(),
    ) {
        let last = coeffs.len() - 1;
        coeffs[last] = lead + Complex64::new(lead.re.signum() * 0.05, 0.0);
        let p = Polynomial64::new(coeffs.clone());
        let roots = find_roots(&p, 1e-12).unwrap();
        prop_assert_eq!(roots.roots.len(), p.degree());
        let rebuilt = Polynomial64::from_roots(p.leading(), &roots.roots);
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        for (a, b) in rebuilt.coeffs().iter().zip(p.coeffs()) {
            prop_assert!((a - b).norm() <= 1e-8 * scale, "{} vs {}", a, b);
        }
    }

    #[test]
    fn equal_orders_give_classical_polynomial(a in matrix2(), ord in order()) {
        let (p, lcm) = characteristic_polynomial(&a, &[ord, ord]).unwrap();
        let step = (ord.numer() * (lcm / ord.denom())) as usize;
        let classical = Polynomial64::from_roots(Complex64::new(1.0, 0.0), &eigenvalues(&a).unwrap());
        let mut expected = vec![Complex64::new(0.0, 0.0); 2 * step + 1];
        for (k, c) in classical.coeffs().iter().enumerate() {
            expected[k * step] = *c;
        }
        prop_assert_eq!(p.coeffs().len(), expected.len());
        for (x, y) in p.coeffs().iter().zip(&expected) {
            prop_assert!((x - y).norm() <= 1e-10 * (1.0 + y.norm()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn real_root_count_obeys_sign_rule(a in matrix2(), o1 in order(), o2 in order()) {
        let (p, _) = characteristic_polynomial(&a, &[o1, o2]).unwrap();
        let Ok(roots) = find_roots(&p, 1e-10) else { return Ok(()); };
        let real = roots.roots.iter().filter(|z| z.im.abs() <= 1e-8 * (1.0 + z.norm())).count();
        let cap = if p.degree() % 2 == 0 { 4 } else { 5 };
        prop_assert!(real <= cap, "{} real roots of degree {}", real, p.degree());
    }

    #[test]
    fn partial_fractions_reconstruct(
        roots in prop::collection::vec(unit_disc(), 2..=6),
        num in prop::collection::vec(unit_disc(), 1..=2),
        probe in unit_disc(),
    ) {
        let spread: Vec<Complex64> = roots.iter().enumerate().map(|(k, r)| r * 0.3 + Complex64::from_polar(1.0 + 0.2 * k as f64, k as f64)).collect();
        let d = Polynomial64::from_roots(Complex64::new(1.0, 0.0), &spread);
        let p = Polynomial64::new(num);
        let pf = partial_fractions(&[p.clone()], &d).unwrap();
        let z = probe * 3.0 + Complex64::new(0.0, 0.017);
        let want = p.eval(z) / d.eval(z);
        let got = pf.reconstruct(0, z);
        prop_assert!((got - want).norm() <= 1e-9 * want.norm().max(1.0), "{} vs {}", got, want);
    }
}
