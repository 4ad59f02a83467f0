//! Closed-form solutions of scalar two-block systems with rational orders as
//! finite sums of Mittag-Leffler functions.
//!
//! With `D^α y₁ = a₁y₁ + a₂y₂`, `D^β y₂ = b₁y₁ + b₂y₂` and `α ≤ β`, the
//! Laplace transform is `Y_i(s) = s^{α−1} p_i(z)/D(z)` for a suitable root
//! `z` of `s`. Partial fractions of `p_i/D` then invert term by term.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{domain, Error, Result};
use crate::order::{lcm, Order, RationalOrder};
use crate::poly::{partial_fractions, ComplexPolynomial};
use crate::scalar::{ComplexCompensatedSum, Real};
use crate::series::MixedSystem;
use crate::special::{ml, MlParams};
use crate::trajectory::{check_times, SolverTag, Trajectory};

/// `y_i(t) = Re Σ_j A_j^{(i)} t^{β̃−1} E_{α̃,β̃}(λ_j t^{α̃})`.
#[derive(Clone, Debug)]
pub struct SpectralForm<T> {
    pub poles: Vec<Complex<T>>,
    /// `residues[j] = (A_j^{(1)}, A_j^{(2)})` in the caller's component order.
    pub residues: Vec<[Complex<T>; 2]>,
    pub ml_alpha: T,
    pub ml_beta: T,
    /// Power of `λ_j` that survives at `t = 0`: `(1 − β̃)/α̃`.
    pub k0: u32,
    /// Denominator `D` and numerators `p_1, p_2` in the relabelled variable.
    pub denominator: ComplexPolynomial<T>,
    pub numerators: [ComplexPolynomial<T>; 2],
    /// Whether the components were swapped to put the smaller order first.
    pub swapped: bool,
}

impl<T: Real> SpectralForm<T> {
    /// `Σ_j A_j^{(i)}/(z − λ_j)` for component `i` in the relabelled order.
    pub fn reconstruct(&self, i: usize, z: Complex<T>) -> Complex<T> {
        let c = if self.swapped { 1 - i } else { i };
        self.poles
            .iter()
            .zip(&self.residues)
            .fold(Complex::zero(), |acc, (&l, a)| acc + a[c] / (z - l))
    }
}

struct Scalar2<T> {
    a1: T,
    a2: T,
    b1: T,
    b2: T,
    y1: T,
    y2: T,
    alpha: Order<T>,
    beta: Order<T>,
    swapped: bool,
}

fn scalar_blocks<T: Real>(system: &MixedSystem<T>) -> Result<Scalar2<T>> {
    if system.dim() != 2 || system.m1() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "closed form needs two scalar blocks, got dimension {} with first block {}",
            system.dim(),
            system.m1()
        )));
    }
    let a = system.a();
    let y = system.y0();
    let (alpha, beta) = (system.alpha(), system.beta());
    if alpha.value() <= beta.value() {
        Ok(Scalar2 { a1: a[(0, 0)], a2: a[(0, 1)], b1: a[(1, 0)], b2: a[(1, 1)], y1: y[0], y2: y[1], alpha, beta, swapped: false })
    } else {
        Ok(Scalar2 { a1: a[(1, 1)], a2: a[(1, 0)], b1: a[(0, 1)], b2: a[(0, 0)], y1: y[1], y2: y[0], alpha: beta, beta: alpha, swapped: true })
    }
}

fn re<T: Real>(x: T) -> Complex<T> {
    Complex::new(x, T::zero())
}

fn assemble<T: Real>(
    s: &Scalar2<T>,
    denominator: ComplexPolynomial<T>,
    numerators: [ComplexPolynomial<T>; 2],
    ml_alpha: T,
    ml_beta: T,
    k0: u32,
) -> Result<SpectralForm<T>> {
    let pf = partial_fractions(&numerators, &denominator)?;
    let residues = (0..pf.poles.len())
        .map(|j| {
            let (r1, r2) = (pf.residues[0][j], pf.residues[1][j]);
            if s.swapped {
                [r2, r1]
            } else {
                [r1, r2]
            }
        })
        .collect();
    Ok(SpectralForm { poles: pf.poles, residues, ml_alpha, ml_beta, k0, denominator, numerators, swapped: s.swapped })
}

/// General rational orders `α = m/n ≤ β = p/q` in the variable `z = s^{1/L}`
/// with `L = lcm(n, q)`, `α = u/L`, `β = v/L`:
/// `D(z) = z^{u+v} − a₁z^v − b₂z^u + D_A`,
/// `p₁ = y₁z^v + a₂y₂z^{v−u} − b₂y₁`, `p₂ = y₂z^v − a₁y₂z^{v−u} + b₁y₁`.
/// For coprime `n, q` this is the variable `s^{1/(nq)}`.
pub fn decompose<T: Real>(system: &MixedSystem<T>) -> Result<SpectralForm<T>> {
    let s = scalar_blocks(system)?;
    let (Some(alpha), Some(beta)) = (s.alpha.as_rational(), s.beta.as_rational()) else {
        return Err(domain("closed form needs rational orders"));
    };
    let nq = lcm(alpha.denom(), beta.denom());
    let mq = (alpha.numer() * (nq / alpha.denom())) as usize;
    let np = (beta.numer() * (nq / beta.denom())) as usize;
    let d_a = s.a1 * s.b2 - s.a2 * s.b1;
    let entry_scale = s.a1.abs().max(s.a2.abs()).max(s.b1.abs()).max(s.b2.abs());
    if d_a.abs() <= T::lit(1e-14) * entry_scale * entry_scale {
        return Err(Error::ZeroRoot);
    }

    let den = ComplexPolynomial::from_terms(&[
        (mq + np, Complex::one()),
        (np, re(-s.a1)),
        (mq, re(-s.b2)),
        (0, re(d_a)),
    ]);
    let p1 = ComplexPolynomial::from_terms(&[(np, re(s.y1)), (np - mq, re(s.a2 * s.y2)), (0, re(-s.b2 * s.y1))]);
    let p2 = ComplexPolynomial::from_terms(&[(np, re(s.y2)), (np - mq, re(-s.a1 * s.y2)), (0, re(s.b1 * s.y1))]);

    let ml_alpha = T::one() / T::lit(nq as f64);
    let ml_beta = T::one() - alpha.value::<T>() + ml_alpha;
    let form = assemble(&s, den, [p1, p2], ml_alpha, ml_beta, (mq - 1) as u32)?;
    if form.poles.iter().any(|z| z.norm() < T::lit(1e-10)) {
        return Err(Error::ZeroRoot);
    }
    Ok(form)
}

/// Commensurate orders `β = Kα` in the variable `w = s^α`:
/// `D(w) = w^{K+1} − a₁w^K − b₂w + D_A` with `α̃ = α`, `β̃ = 1`.
pub fn decompose_commensurate<T: Real>(system: &MixedSystem<T>, k: u32) -> Result<SpectralForm<T>> {
    if k == 0 {
        return Err(domain("K must be a positive integer"));
    }
    let s = scalar_blocks(system)?;
    let matches = match (s.alpha.as_rational(), s.beta.as_rational()) {
        (Some(a), Some(b)) => a.ratio() * i64::from(k) == b.ratio(),
        _ => {
            let (a, b) = (s.alpha.value(), s.beta.value());
            (b - a * T::lit(f64::from(k))).abs() <= T::lit(1e-14) * b
        }
    };
    if !matches {
        return Err(domain(format!(
            "orders {} and {} are not in ratio {k}",
            s.alpha.value(),
            s.beta.value()
        )));
    }
    let ku = k as usize;
    let d_a = s.a1 * s.b2 - s.a2 * s.b1;
    let den = ComplexPolynomial::from_terms(&[
        (ku + 1, Complex::one()),
        (ku, re(-s.a1)),
        (1, re(-s.b2)),
        (0, re(d_a)),
    ]);
    let p1 = ComplexPolynomial::from_terms(&[(ku, re(s.y1)), (ku - 1, re(s.a2 * s.y2)), (0, re(-s.b2 * s.y1))]);
    let p2 = ComplexPolynomial::from_terms(&[(ku, re(s.y2)), (ku - 1, re(-s.a1 * s.y2)), (0, re(s.b1 * s.y1))]);
    assemble(&s, den, [p1, p2], s.alpha.value(), T::one(), 0)
}

/// Routes to [`decompose_commensurate`] when `max/min` of the orders is an
/// integer, otherwise to [`decompose`].
pub fn decompose_auto<T: Real>(system: &MixedSystem<T>) -> Result<SpectralForm<T>> {
    let (a, b) = (system.alpha(), system.beta());
    if let (Some(a), Some(b)) = (a.as_rational(), b.as_rational()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let ratio = hi.ratio() / lo.ratio();
        if ratio.is_integer() {
            return decompose_commensurate(system, *ratio.numer() as u32);
        }
    }
    decompose(system)
}

#[derive(Clone, Debug)]
pub struct SpectralValue<T> {
    pub value: [T; 2],
    /// Largest imaginary part discarded by the real projection.
    pub imag_residual: T,
    pub precision_loss: bool,
}

/// Evaluates the form at `t ≥ 0`. The imaginary parts must cancel to
/// `1e-8·‖y‖` plus rounding of the individual terms.
pub fn eval_spectral<T: Real>(form: &SpectralForm<T>, t: T) -> Result<SpectralValue<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(domain(format!("time {t} must be finite and nonnegative")));
    }
    let mut acc = [ComplexCompensatedSum::new(), ComplexCompensatedSum::new()];
    let mut scale = T::zero();
    let mut precision_loss = false;
    if t.is_zero() {
        for (l, a) in form.poles.iter().zip(&form.residues) {
            let lk = l.powu(form.k0);
            for i in 0..2 {
                let term = a[i] * lk;
                scale = scale.max(term.norm());
                acc[i].add(term);
            }
        }
    } else {
        let factor = t.powf(form.ml_beta - T::one());
        let ta = t.powf(form.ml_alpha);
        let params = MlParams::two(form.ml_alpha, form.ml_beta);
        for (l, a) in form.poles.iter().zip(&form.residues) {
            let rep = ml(params, *l * ta)?;
            precision_loss |= rep.precision_loss;
            let e = rep.value * factor;
            for i in 0..2 {
                let term = a[i] * e;
                scale = scale.max(term.norm());
                acc[i].add(term);
            }
        }
    }
    let y = [acc[0].value(), acc[1].value()];
    let imag_residual = y[0].im.abs().max(y[1].im.abs());
    let norm = y[0].re.abs().max(y[1].re.abs());
    let tolerance = T::lit(1e-8) * norm + T::lit(64.0) * T::epsilon() * scale;
    if imag_residual > tolerance {
        return Err(Error::ConjugacyViolation { residual: imag_residual.as_f64(), tolerance: tolerance.as_f64() });
    }
    Ok(SpectralValue { value: [y[0].re, y[1].re], imag_residual, precision_loss })
}

/// Evaluates the form on a grid of times.
pub fn solve_spectral<T: Real>(form: &SpectralForm<T>, times: &[T]) -> Result<Trajectory<T>> {
    check_times(times)?;
    let rows = times
        .iter()
        .map(|&t| eval_spectral(form, t).map(|v| v.value.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Trajectory::from_rows(times.to_vec(), rows, 2, SolverTag::Spectral { poles: form.poles.len() })
}

/// Orders for a spectral system given as exact rationals.
pub fn rational_orders<T: Real>(alpha: RationalOrder, beta: RationalOrder) -> (Order<T>, Order<T>) {
    (Order::Rational(alpha), Order::Rational(beta))
}
