//! Complex polynomials, simultaneous root finding, partial fractions, and
//! characteristic polynomials of mixed-order systems.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::linalg::{determinant, Matrix};
use crate::order::{lcm, RationalOrder};
use crate::scalar::Real;

/// Polynomial with complex coefficients in ascending powers.
///
/// Trailing (highest-power) exact zeros are trimmed on construction, so the
/// last coefficient is nonzero unless the polynomial is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> ComplexPolynomial<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex::zero());
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, T::zero())).collect())
    }

    /// `leading · Π (z − r)`.
    pub fn from_roots(leading: Complex<T>, roots: &[Complex<T>]) -> Self {
        let mut c = vec![leading];
        for &r in roots {
            let mut next = vec![Complex::zero(); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::new(c)
    }

    /// Sparse constructor from `(power, coefficient)` pairs; repeated powers add.
    pub fn from_terms(terms: &[(usize, Complex<T>)]) -> Self {
        let deg = terms.iter().map(|t| t.0).max().unwrap_or(0);
        let mut c = vec![Complex::zero(); deg + 1];
        for &(p, a) in terms {
            c[p] += a;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn leading(&self) -> Complex<T> {
        *self.coeffs.last().expect("nonempty")
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
    }

    /// Value and the evaluation scale `Σ |c_i| |z|^i`.
    pub fn eval_with_scale(&self, z: Complex<T>) -> (Complex<T>, T) {
        let r = z.norm();
        let mut v = Complex::zero();
        let mut s = T::zero();
        for &c in self.coeffs.iter().rev() {
            v = v * z + c;
            s = s * r + c.norm();
        }
        (v, s)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::new(vec![Complex::zero()]);
        }
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &a)| a * T::from_usize_lossy(i))
            .collect();
        Self::new(c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut c = vec![Complex::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Largest coefficient modulus.
    pub fn coeff_scale(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }
}

/// All roots of a polynomial together with the worst residual `max |p(λ)|`.
#[derive(Clone, Debug)]
pub struct RootSet<T> {
    pub roots: Vec<Complex<T>>,
    pub residual_bound: T,
}

impl<T: Real> RootSet<T> {
    /// Smallest pairwise distance between roots (`+∞` for fewer than two).
    pub fn min_separation(&self) -> T {
        let mut best = T::infinity();
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                best = best.min((self.roots[i] - self.roots[j]).norm());
            }
        }
        best
    }
}

const MAX_SWEEPS: usize = 500;

/// Finds every root of `p` by Aberth–Ehrlich simultaneous iteration.
///
/// Initial guesses are equally spaced on the circle whose radius is the
/// Cauchy bound, rotated by a fixed offset so that they are not symmetric
/// about the real axis. Iteration stops when every update is below
/// `max(1e-14, 4ε)·max(1, |z|)` or after 500 sweeps; each root then receives one
/// Newton polishing step. A root is accepted when
/// `|p(λ)| <= tol · Σ|c_i||λ|^i`, with `tol` raised to `16·ε` if smaller.
pub fn find_roots<T: Real>(p: &ComplexPolynomial<T>, tol: T) -> Result<RootSet<T>> {
    if p.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial".into()));
    }
    if p.degree() == 0 {
        return Err(Error::DegenerateInput("constant polynomial has no roots".into()));
    }
    // Exact zero roots.
    let lead_zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let reduced = ComplexPolynomial::new(p.coeffs()[lead_zeros..].to_vec());
    let mut roots = vec![Complex::zero(); lead_zeros];

    let n = reduced.degree();
    let sweeps;
    if n == 0 {
        sweeps = 0;
    } else if n == 1 {
        let c = reduced.coeffs();
        roots.push(-c[0] / c[1]);
        sweeps = 0;
    } else {
        let (found, used) = aberth(&reduced);
        roots.extend(found);
        sweeps = used;
    }

    let dp = p.derivative();
    for z in roots.iter_mut() {
        if z.is_zero() {
            continue;
        }
        let (v, _) = p.eval_with_scale(*z);
        let d = dp.eval(*z);
        if !d.is_zero() {
            let cand = *z - v / d;
            if p.eval(cand).norm() < v.norm() {
                *z = cand;
            }
        }
    }

    let tol = tol.max(T::lit(16.0) * T::epsilon());
    let mut residual_bound = T::zero();
    let mut ok = true;
    for &z in &roots {
        let (v, s) = p.eval_with_scale(z);
        residual_bound = residual_bound.max(v.norm());
        if !(v.norm() <= tol * s) {
            ok = false;
        }
    }
    if !ok {
        return Err(Error::RootNonConvergence {
            sweeps,
            best: roots.iter().map(|z| num_complex::Complex64::new(z.re.as_f64(), z.im.as_f64())).collect(),
            residual: residual_bound.as_f64(),
        });
    }
    Ok(RootSet { roots, residual_bound })
}

fn aberth<T: Real>(p: &ComplexPolynomial<T>) -> (Vec<Complex<T>>, usize) {
    let n = p.degree();
    let c = p.coeffs();
    let lead = c[n];
    let radius = T::one() + c[..n].iter().fold(T::zero(), |m, a| m.max((*a / lead).norm()));
    let offset = T::lit(0.4);
    let tau = T::lit(std::f64::consts::TAU);
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let th = tau * T::from_usize_lossy(k) / T::from_usize_lossy(n) + offset;
            Complex::from_polar(radius, th)
        })
        .collect();
    let dp = p.derivative();
    let step_tol = T::lit(1e-14).max(T::lit(4.0) * T::epsilon());

    for sweep in 1..=MAX_SWEEPS {
        let mut max_rel = T::zero();
        for k in 0..n {
            let v = p.eval(z[k]);
            if v.is_zero() {
                continue;
            }
            let d = dp.eval(z[k]);
            let ratio = v / d;
            let mut s = Complex::zero();
            for j in 0..n {
                if j != k {
                    let diff = z[k] - z[j];
                    if !diff.is_zero() {
                        s += diff.inv();
                    }
                }
            }
            let denom = Complex::<T>::one() - ratio * s;
            let delta = if denom.is_zero() || !denom.norm().is_finite() { ratio } else { ratio / denom };
            if !delta.re.is_finite() || !delta.im.is_finite() {
                continue;
            }
            z[k] -= delta;
            max_rel = max_rel.max(delta.norm() / T::one().max(z[k].norm()));
        }
        if max_rel <= step_tol {
            return (z, sweep);
        }
    }
    (z, MAX_SWEEPS)
}

/// Partial-fraction residues of `p_i(z)/D(z)` over the simple roots of `D`.
#[derive(Clone, Debug)]
pub struct PartialFractions<T> {
    pub poles: Vec<Complex<T>>,
    /// `residues[i][j]` belongs to numerator `i` and pole `j`.
    pub residues: Vec<Vec<Complex<T>>>,
}

impl<T: Real> PartialFractions<T> {
    /// `Σ_j A_j/(z − λ_j)` for numerator `i`.
    pub fn reconstruct(&self, i: usize, z: Complex<T>) -> Complex<T> {
        self.poles
            .iter()
            .zip(&self.residues[i])
            .fold(Complex::zero(), |acc, (&l, &a)| acc + a / (z - l))
    }
}

/// Minimum admissible distance between two poles.
pub const SIMPLE_ROOT_SEPARATION: f64 = 1e-8;

/// Residues `A_j = p_i(λ_j)/D'(λ_j)`.
pub fn partial_fractions<T: Real>(
    numerators: &[ComplexPolynomial<T>],
    denominator: &ComplexPolynomial<T>,
) -> Result<PartialFractions<T>> {
    let dd = denominator.degree();
    for p in numerators {
        if !p.is_zero() && p.degree() >= dd {
            return Err(Error::DegreeViolation { numerator: p.degree(), denominator: dd });
        }
    }
    let roots = find_roots(denominator, T::lit(1e-10))?;
    let sep = roots.min_separation();
    if sep <= T::lit(SIMPLE_ROOT_SEPARATION) {
        return Err(Error::RepeatedRoots { distance: sep.as_f64() });
    }
    let dprime = denominator.derivative();
    let derivs: Vec<Complex<T>> = roots.roots.iter().map(|&l| dprime.eval(l)).collect();
    let residues = numerators
        .iter()
        .map(|p| roots.roots.iter().zip(&derivs).map(|(&l, &d)| p.eval(l) / d).collect())
        .collect();
    Ok(PartialFractions { poles: roots.roots, residues })
}

/// Radius of the interpolation circle used by [`characteristic_polynomial`].
const INTERPOLATION_RADIUS: f64 = 1.5;

/// `p(λ) = Det(diag(λ^{Mα_1}, …, λ^{Mα_m}) − A)` where `M` is the least
/// common multiple of the order denominators.
///
/// The determinant is sampled at `deg + 1` points on a circle of radius 1.5
/// and the coefficients are recovered by solving the Vandermonde system,
/// which for equally spaced points on a circle is an inverse DFT.
pub fn characteristic_polynomial<T: Real>(
    a: &Matrix<T>,
    orders: &[RationalOrder],
) -> Result<(ComplexPolynomial<T>, i64)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if orders.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} orders for a {}x{} matrix",
            orders.len(),
            a.rows(),
            a.cols()
        )));
    }
    if orders.is_empty() {
        return Err(domain("empty system"));
    }
    let m_lcm = orders.iter().fold(1i64, |acc, o| lcm(acc, o.denom()));
    let exps: Vec<usize> = orders.iter().map(|o| (o.numer() * (m_lcm / o.denom())) as usize).collect();
    let degree: usize = exps.iter().sum();
    let npts = degree + 1;
    let radius = T::lit(INTERPOLATION_RADIUS);
    let tau = T::lit(std::f64::consts::TAU);
    let n_f = T::from_usize_lossy(npts);

    let ac = a.to_complex();
    let samples: Vec<Complex<T>> = (0..npts)
        .map(|k| {
            let z = Complex::from_polar(radius, tau * T::from_usize_lossy(k) / n_f);
            let mut m = ac.scale(-Complex::one());
            for (i, &e) in exps.iter().enumerate() {
                m[(i, i)] += z.powu(e as u32);
            }
            determinant(&m)
        })
        .collect();

    let mut coeffs = Vec::with_capacity(npts);
    for j in 0..npts {
        let mut acc = Complex::zero();
        for (k, &v) in samples.iter().enumerate() {
            let idx = (j * k) % npts;
            let w = Complex::from_polar(T::one(), -tau * T::from_usize_lossy(idx) / n_f);
            acc += v * w;
        }
        let c = acc / n_f / radius.powi(j as i32);
        // Real input gives real coefficients.
        coeffs.push(Complex::new(c.re, T::zero()));
    }
    // The leading coefficient is exactly one.
    coeffs[degree] = Complex::one();
    Ok((ComplexPolynomial::new(coeffs), m_lcm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn contains(roots: &[Complex<f64>], target: Complex<f64>, tol: f64) -> bool {
        roots.iter().any(|r| (r - target).norm() < tol)
    }

    #[test]
    fn quadratic_roots() {
        let p = ComplexPolynomial::from_real(&[1.0, 0.0, 1.0]);
        let r = find_roots(&p, 1e-12).unwrap();
        assert_eq!(r.roots.len(), 2);
        assert!(contains(&r.roots, c(0.0, 1.0), 1e-14));
        assert!(contains(&r.roots, c(0.0, -1.0), 1e-14));
    }

    #[test]
    fn cubic_roots() {
        let p = ComplexPolynomial::from_real(&[1.0, 1.0, 1.0, 1.0]);
        let r = find_roots(&p, 1e-12).unwrap();
        for t in [c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(contains(&r.roots, t, 1e-13));
        }
    }

    #[test]
    fn boundary_cubic_has_root_on_quarter_angle() {
        // z^3 - z^2 - z + (1 + θ^2) with θ^2 = 2(1+√3) = 3 + 2√3 - 1 ... constant 3+2√3.
        let k = 3.0 + 2.0 * 3.0_f64.sqrt();
        let p = ComplexPolynomial::from_real(&[k, -1.0, -1.0, 1.0]);
        let r = find_roots(&p, 1e-12).unwrap();
        let best = r
            .roots
            .iter()
            .map(|z| (z.arg().abs() - std::f64::consts::FRAC_PI_4).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(best < 1e-12, "closest argument gap {best}");
    }

    #[test]
    fn exact_zero_roots() {
        let p = ComplexPolynomial::from_real(&[0.0, 0.0, -1.0, 1.0]);
        let r = find_roots(&p, 1e-12).unwrap();
        assert_eq!(r.roots.iter().filter(|z| z.is_zero()).count(), 2);
        assert!(contains(&r.roots, c(1.0, 0.0), 1e-15));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(find_roots(&ComplexPolynomial::<f64>::from_real(&[0.0]), 1e-12), Err(Error::DegenerateInput(_))));
        assert!(matches!(find_roots(&ComplexPolynomial::<f64>::from_real(&[2.0]), 1e-12), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn residues_of_simple_fraction() {
        let pf = partial_fractions(
            &[ComplexPolynomial::from_real(&[1.0])],
            &ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]),
        )
        .unwrap();
        for (l, a) in pf.poles.iter().zip(&pf.residues[0]) {
            let expected = if l.re > 0.0 { 0.5 } else { -0.5 };
            assert!((a - c(expected, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn cancelled_factor_has_zero_residues() {
        let pf = partial_fractions(
            &[ComplexPolynomial::from_real(&[1.0, 0.0, 1.0])],
            &ComplexPolynomial::from_real(&[1.0, 1.0, 1.0, 1.0]),
        )
        .unwrap();
        for (l, a) in pf.poles.iter().zip(&pf.residues[0]) {
            let expected = if (l - c(-1.0, 0.0)).norm() < 1e-8 { 1.0 } else { 0.0 };
            assert!((a - c(expected, 0.0)).norm() < 1e-13, "pole {l} residue {a}");
        }
    }

    #[test]
    fn partial_fraction_errors() {
        let d = ComplexPolynomial::from_real(&[1.0, 2.0, 1.0]);
        assert!(matches!(
            partial_fractions(&[ComplexPolynomial::from_real(&[1.0])], &d),
            Err(Error::RepeatedRoots { .. })
        ));
        let d = ComplexPolynomial::from_real(&[-1.0, 0.0, 1.0]);
        assert!(matches!(
            partial_fractions(&[ComplexPolynomial::from_real(&[1.0, 0.0, 1.0])], &d),
            Err(Error::DegreeViolation { .. })
        ));
    }

    #[test]
    fn characteristic_polynomial_scalar() {
        let a = Matrix::<f64>::from_rows(&[[-1.0]]).unwrap();
        let (p, m) = characteristic_polynomial(&a, &[RationalOrder::new(1, 2).unwrap()]).unwrap();
        assert_eq!(m, 2);
        assert_eq!(p.degree(), 1);
        assert!((p.coeffs()[0].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn characteristic_polynomial_rotation_family() {
        let (d, th) = (0.7_f64, 1.3_f64);
        let a = Matrix::from_rows(&[[d, -th], [th, d]]).unwrap();
        let orders = [RationalOrder::new(1, 2).unwrap(), RationalOrder::one()];
        let (p, m) = characteristic_polynomial(&a, &orders).unwrap();
        assert_eq!(m, 2);
        let expected = [d * d + th * th, -d, -d, 1.0];
        assert_eq!(p.degree(), 3);
        for (got, want) in p.coeffs().iter().zip(expected) {
            assert!((got.re - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn characteristic_polynomial_dimension_checks() {
        let a = Matrix::from_rows(&[[1.0, 2.0]]).unwrap();
        assert!(characteristic_polynomial(&a, &[RationalOrder::one()]).is_err());
        let a = Matrix::<f64>::identity(2);
        assert!(characteristic_polynomial(&a, &[RationalOrder::one()]).is_err());
    }
}
