//! Asymptotic stability of fractional linear systems and the stability
//! boundary of the rotation family `A = [[d, −θ], [θ, d]]`.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::order::RationalOrder;
use crate::poly::{characteristic_polynomial, find_roots};
use crate::scalar::Real;

/// Margins within this distance of zero are reported as marginal.
pub const MARGINAL_BAND: f64 = 1e-9;

/// Roots with modulus below this are excluded from rational-index verdicts.
pub const ZERO_ROOT_CUTOFF: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Stable,
    Marginal,
    Unstable,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Stable => "stable",
            Status::Marginal => "marginal",
            Status::Unstable => "unstable",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootWitness<T> {
    pub root: Complex<T>,
    /// `|arg λ|` in radians.
    pub arg: T,
}

#[derive(Clone, Debug)]
pub struct StabilityVerdict<T> {
    pub status: Status,
    /// `min |arg λ| − sector` over the counted roots, radians.
    pub margin: T,
    /// Half-angle of the excluded sector, radians.
    pub sector: T,
    pub witnesses: Vec<RootWitness<T>>,
    /// Roots too close to zero to have a meaningful argument.
    pub zero_roots: Vec<Complex<T>>,
}

impl<T: Real> StabilityVerdict<T> {
    /// True only for `margin > MARGINAL_BAND`.
    pub fn stable(&self) -> bool {
        self.status == Status::Stable
    }

    fn from_roots(roots: Vec<Complex<T>>, sector: T) -> Self {
        let cutoff = T::lit(ZERO_ROOT_CUTOFF);
        let (zero_roots, counted): (Vec<_>, Vec<_>) = roots.into_iter().partition(|z| z.norm() < cutoff);
        let witnesses: Vec<RootWitness<T>> =
            counted.into_iter().map(|root| RootWitness { root, arg: root.arg().abs() }).collect();
        let margin = witnesses.iter().fold(T::infinity(), |m, w| m.min(w.arg - sector));
        let band = T::lit(MARGINAL_BAND);
        let status = if margin > band {
            Status::Stable
        } else if margin >= -band {
            Status::Marginal
        } else {
            Status::Unstable
        };
        Self { status, margin, sector, witnesses, zero_roots }
    }
}

/// Commensurate order `α` test: stable iff every eigenvalue satisfies
/// `|arg λ| > απ/2`.
pub fn matignon_stable<T: Real>(a: &Matrix<T>, alpha: T) -> Result<StabilityVerdict<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows(), a.cols())));
    }
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(domain(format!("order {alpha} is outside (0, 1]")));
    }
    let eig = eigenvalues(a)?;
    let sector = alpha * T::FRAC_PI_2();
    Ok(StabilityVerdict::from_roots(eig, sector))
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_finite() {
        return Err(domain("matrix has non-finite entries"));
    }
    let n = a.rows();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[(i, j)].as_f64());
    Ok(m.complex_eigenvalues().iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect())
}

/// Mixed rational orders: builds `p(λ) = Det(diag(λ^{Mα_i}) − A)` and
/// checks `|arg λ| > π/(2M)` for every nonzero root.
pub fn rational_index_stable<T: Real>(a: &Matrix<T>, orders: &[RationalOrder]) -> Result<StabilityVerdict<T>> {
    let (p, m) = characteristic_polynomial(a, orders)?;
    let roots = find_roots(&p, T::lit(1e-9))?;
    let sector = T::FRAC_PI_2() / T::lit(m as f64);
    Ok(StabilityVerdict::from_roots(roots.roots, sector))
}

fn check_two_term<T: Real>(alpha: T, beta: T) -> Result<()> {
    if !(alpha > beta && beta > T::zero()) || !alpha.is_finite() {
        return Err(domain(format!("two-term test needs α > β > 0, got α={alpha}, β={beta}")));
    }
    let ratio = (beta / alpha).as_f64();
    let r = RationalOrder::approximate(ratio, 1000)?;
    if (r.value::<f64>() - ratio).abs() > 1e-12 {
        return Err(domain(format!("α/β = {} is not rational", 1.0 / ratio)));
    }
    Ok(())
}

/// Threshold `a*` such that `D^α y + a D^β y + b y = 0` is stable iff
/// `a > a*` (given `b > 0`, `β < 2`, `α − β < 2`).
pub fn two_term_threshold<T: Real>(b: T, alpha: T, beta: T) -> Result<T> {
    check_two_term(alpha, beta)?;
    let half_pi = T::FRAC_PI_2();
    let d = alpha - beta;
    Ok(-(alpha * half_pi).sin() * b.powf(d / alpha)
        / ((beta * half_pi).sin().powf(beta / alpha) * (d * half_pi).sin().powf(d / alpha)))
}

/// Stability of `D^α y + a D^β y + b y = 0`.
pub fn two_term_stable<T: Real>(a: T, b: T, alpha: T, beta: T) -> Result<bool> {
    check_two_term(alpha, beta)?;
    let two = T::lit(2.0);
    if !(beta < two && alpha - beta < two && b > T::zero()) {
        return Ok(false);
    }
    Ok(a > two_term_threshold(b, alpha, beta)?)
}

/// First-order form of `D^α y + a D^β y + b y = 0` with `y₁ = y`,
/// `y₂ = D^β y`: orders `(β, α−β)` and `A = [[0, 1], [−b, −a]]`.
pub fn companion_embedding<T: Real>(
    a: T,
    b: T,
    alpha: RationalOrder,
    beta: RationalOrder,
) -> Result<(Matrix<T>, Vec<RationalOrder>)> {
    if alpha <= beta {
        return Err(domain("companion embedding needs α > β"));
    }
    let diff = RationalOrder::from_ratio(alpha.ratio() - beta.ratio())?;
    let m = Matrix::from_rows(&[[T::zero(), T::one()], [-b, -a]])?;
    Ok((m, vec![beta, diff]))
}

/// Block condition `|arg σ(B)| ≥ βπ/2` on the spectrum of a diagonal block.
pub fn block_sector_condition<T: Real>(block: &Matrix<T>, beta: T) -> Result<bool> {
    let sector = beta * T::FRAC_PI_2();
    Ok(eigenvalues(block)?.iter().all(|z| z.norm() >= T::lit(ZERO_ROOT_CUTOFF) && z.arg().abs() >= sector))
}

/// A point of the stability boundary of `A = [[d, −θ], [θ, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample<T> {
    /// `r^{α−β}`.
    pub x: T,
    /// Modulus of the imaginary-axis root `s = i r`.
    pub r: T,
    pub d: T,
    pub theta: T,
    pub theta_over_d: T,
    /// `arctan(θ/d)/π`.
    pub angle: T,
}

/// Orders sorted so that `hi > lo`.
fn relabel<T: Real>(alpha: T, beta: T) -> Result<(T, T)> {
    for v in [alpha, beta] {
        if !(v > T::zero() && v <= T::one()) {
            return Err(domain(format!("order {v} is outside (0, 1]")));
        }
    }
    if alpha == beta {
        return Err(Error::DegenerateOrders { angle: (alpha / T::lit(2.0)).as_f64() });
    }
    Ok(if alpha > beta { (alpha, beta) } else { (beta, alpha) })
}

/// Boundary sample at parameter `x > 0`, orders already relabelled.
fn sample_at<T: Real>(hi: T, lo: T, x: T) -> BoundarySample<T> {
    let pi = T::PI();
    let half = T::lit(0.5);
    let (sa, sb) = ((hi * pi * half).sin(), (lo * pi * half).sin());
    let sab = ((hi + lo) * pi * half).sin();
    let cab = ((hi + lo) * pi * half).cos();
    let ratio_sq = sa * sb / (sab * sab) * ((x * x + T::one()) / x - T::lit(2.0) * cab);
    let theta_over_d = ratio_sq.sqrt();
    let diff = hi - lo;
    let d = x.powf(hi / diff) * sab / (x * sa + sb);
    BoundarySample {
        x,
        r: x.powf(T::one() / diff),
        d,
        theta: theta_over_d * d,
        theta_over_d,
        angle: theta_over_d.atan() / pi,
    }
}

/// Boundary samples for each `x` in `x_grid`, sorted by `d`.
pub fn boundary_curve<T: Real>(alpha: T, beta: T, x_grid: &[T]) -> Result<Vec<BoundarySample<T>>> {
    let (hi, lo) = relabel(alpha, beta)?;
    if let Some(x) = x_grid.iter().find(|&&x| !(x > T::zero()) || !x.is_finite()) {
        return Err(domain(format!("boundary parameter {x} must be positive")));
    }
    let mut out: Vec<_> = x_grid.iter().map(|&x| sample_at(hi, lo, x)).collect();
    out.sort_by(|a, b| a.d.partial_cmp(&b.d).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Logarithmically spaced grid of `n ≥ 2` points on `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize_lossy(n.max(2) - 1);
    (0..n.max(2)).map(|k| (a + (b - a) * T::from_usize_lossy(k) / last).exp()).collect()
}

/// The boundary sample with a prescribed `d > 0`. `d(x)` is increasing, so
/// `x` is found by bisection in `ln x`.
pub fn boundary_at_d<T: Real>(alpha: T, beta: T, d: T) -> Result<BoundarySample<T>> {
    let (hi, lo) = relabel(alpha, beta)?;
    if !(d > T::zero()) || !d.is_finite() {
        return Err(domain(format!("d = {d} must be positive")));
    }
    let (mut a, mut b) = (T::lit(-1.0), T::one());
    while sample_at(hi, lo, a.exp()).d > d {
        a = a * T::lit(2.0);
        if a < T::lit(-700.0) {
            return Err(domain("d is below the representable boundary range"));
        }
    }
    while sample_at(hi, lo, b.exp()).d < d {
        b = b * T::lit(2.0);
        if b > T::lit(700.0) {
            return Err(domain("d is above the representable boundary range"));
        }
    }
    for _ in 0..200 {
        let mid = (a + b) * T::lit(0.5);
        if sample_at(hi, lo, mid.exp()).d < d {
            a = mid;
        } else {
            b = mid;
        }
        if b - a <= T::epsilon() * T::lit(4.0) * (T::one() + a.abs()) {
            break;
        }
    }
    Ok(sample_at(hi, lo, ((a + b) * T::lit(0.5)).exp()))
}

/// The boundary sample of least `θ/d`, by golden-section search in `ln x`.
pub fn boundary_minimum<T: Real>(alpha: T, beta: T) -> Result<BoundarySample<T>> {
    let (hi, lo) = relabel(alpha, beta)?;
    let f = |u: T| sample_at(hi, lo, u.exp()).theta_over_d;
    let g = T::lit(0.618_033_988_749_894_8);
    let (mut a, mut b) = (T::lit(-10.0), T::lit(10.0));
    let mut c = b - g * (b - a);
    let mut e = a + g * (b - a);
    let (mut fc, mut fe) = (f(c), f(e));
    for _ in 0..200 {
        if fc < fe {
            b = e;
            e = c;
            fe = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + g * (b - a);
            fe = f(e);
        }
        if b - a < T::lit(1e-12) {
            break;
        }
    }
    Ok(sample_at(hi, lo, ((a + b) * T::lit(0.5)).exp()))
}

/// `θ/d` on the boundary for `α = 2β`, as an explicit function of `d`.
pub fn boundary_closed_form<T: Real>(alpha: T, beta: T, d: T) -> Result<T> {
    let (hi, lo) = relabel(alpha, beta)?;
    if (hi - T::lit(2.0) * lo).abs() > T::lit(1e-12) {
        return Err(domain(format!("closed form needs α = 2β, got α={hi}, β={lo}")));
    }
    if !(d > T::zero()) || !d.is_finite() {
        return Err(domain(format!("d = {d} must be positive")));
    }
    let (one, two) = (T::one(), T::lit(2.0));
    let near = |a: T, b: f64| (a - T::lit(b)).abs() <= T::lit(1e-15);
    if near(hi, 1.0) && near(lo, 0.5) {
        return Ok(((one + d) * (one + (one + two / d).sqrt())).sqrt());
    }
    if near(hi, 2.0 / 3.0) && near(lo, 1.0 / 3.0) {
        let half_d = d / two;
        let inner = (one + half_d) * (one + T::lit(8.0) / (T::lit(3.0) * d)).sqrt() + half_d - one;
        return Ok(T::lit(0.375).sqrt() * inner.sqrt());
    }
    let pi = T::PI();
    let s1 = (lo * pi).sin();
    let s_half = (lo * pi / two).sin();
    let s3 = (T::lit(1.5) * lo * pi).sin();
    let d_beta = d * s_half / s3;
    let root = (one + T::lit(4.0) / d * s_half * s3 / (s1 * s1)).sqrt();
    let l_term = two * (T::lit(1.5) * lo * pi).cos() / (lo * pi / two).cos();
    let phi_sq = T::lit(0.5) * (s1 / s3).powi(2) * (d_beta - one + (one + d_beta) * root - l_term);
    Ok(phi_sq.sqrt())
}

/// Infimum of `θ/d` over the boundary, `√(sin(απ/2) sin(βπ/2)) / cos((α+β)π/4)`;
/// `+∞` when `α + β = 2`.
pub fn theorem13_bound<T: Real>(alpha: T, beta: T) -> Result<T> {
    for v in [alpha, beta] {
        if !(v > T::zero() && v <= T::one()) {
            return Err(domain(format!("order {v} is outside (0, 1]")));
        }
    }
    let half_pi = T::FRAC_PI_2();
    let c = ((alpha + beta) * T::FRAC_PI_4()).cos();
    if c.abs() <= T::epsilon() {
        return Ok(T::infinity());
    }
    Ok(((alpha * half_pi).sin() * (beta * half_pi).sin()).sqrt() / c)
}

/// The rotation-family matrix `[[d, −θ], [θ, d]]`.
pub fn rotation_matrix<T: Real>(d: T, theta: T) -> Matrix<T> {
    Matrix::from_rows(&[[d, -theta], [theta, d]]).expect("2x2")
}

/// The real-eigenvalue family `[[d, θ], [θ, d]]` with eigenvalues `d ± θ`.
pub fn symmetric_matrix<T: Real>(d: T, theta: T) -> Matrix<T> {
    Matrix::from_rows(&[[d, theta], [theta, d]]).expect("2x2")
}

/// `(s^α − d)(s^β − d) + θ²` at `s`, the characteristic function of the
/// rotation family.
pub fn rotation_characteristic<T: Real>(alpha: T, beta: T, d: T, theta: T, s: Complex<T>) -> Complex<T> {
    if s.is_zero() {
        return Complex::new(d * d + theta * theta, T::zero());
    }
    let sa = s.powf(alpha);
    let sb = s.powf(beta);
    (sa - d) * (sb - d) + theta * theta
}
