//! Power series solution of two-block mixed-order linear systems.
//!
//! For `D^α y₁ = A₁ y₁ + B₁ y₂`, `D^β y₂ = B₂ y₁ + A₂ y₂` the solution is
//! `y(t) = P(t) y(0)` with
//!
//! ```text
//! P(t) = Σ_{a,b} c_{a,b} t^{aα+bβ} / Γ(1+aα+bβ)
//! ```
//!
//! where the coefficient matrices satisfy `top(c_{a,b}) = top(A c_{a-1,b})`
//! and `bottom(c_{a,b}) = bottom(A c_{a,b-1})`. Grouping by level `n = a+b`
//! gives the pyramid stored here.

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::order::Order;
use crate::quadrature::product_trapezoid_weights;
use crate::scalar::{CompensatedSum, Real};
use crate::special::ln_gamma;
use crate::trajectory::{check_times, SolverTag, Trajectory, Warning};

/// Two-block linear system with block orders `alpha` (first `m1` components)
/// and `beta` (the remaining ones).
#[derive(Clone, Debug)]
pub struct MixedSystem<T> {
    a: Matrix<T>,
    m1: usize,
    alpha: Order<T>,
    beta: Order<T>,
    y0: Vec<T>,
}

impl<T: Real> MixedSystem<T> {
    pub fn new(a: Matrix<T>, m1: usize, alpha: Order<T>, beta: Order<T>, y0: Vec<T>) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows(), a.cols())));
        }
        if m1 > a.rows() {
            return Err(Error::DimensionMismatch(format!("first block size {m1} exceeds dimension {}", a.rows())));
        }
        if y0.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "initial state has length {}, matrix is {}x{}",
                y0.len(),
                a.rows(),
                a.cols()
            )));
        }
        for o in [alpha, beta] {
            let v = o.value();
            if !(v > T::zero() && v <= T::one()) {
                return Err(domain(format!("order {v} is outside (0, 1]")));
            }
        }
        if !a.is_finite() || y0.iter().any(|v| !v.is_finite()) {
            return Err(domain("system has non-finite entries"));
        }
        Ok(Self { a, m1, alpha, beta, y0 })
    }

    /// Scalar system `D^α y = a y`.
    pub fn scalar(a: T, alpha: Order<T>, y0: T) -> Result<Self> {
        Self::new(Matrix::from_vec(1, 1, vec![a])?, 1, alpha, alpha, vec![y0])
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn m1(&self) -> usize {
        self.m1
    }

    pub fn m2(&self) -> usize {
        self.a.rows() - self.m1
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn alpha(&self) -> Order<T> {
        self.alpha
    }

    pub fn beta(&self) -> Order<T> {
        self.beta
    }

    pub fn y0(&self) -> &[T] {
        &self.y0
    }

    pub fn with_y0(&self, y0: Vec<T>) -> Result<Self> {
        Self::new(self.a.clone(), self.m1, self.alpha, self.beta, y0)
    }

    /// Order of component `i`.
    pub fn order_of(&self, i: usize) -> T {
        if i < self.m1 {
            self.alpha.value()
        } else {
            self.beta.value()
        }
    }
}

/// Coefficient pyramid. Level `n ≥ 1` holds `n` blocks `C_{n,j}`; the first
/// `m1` rows of `C_{n,j}` are `α_{n,j}` (exponent `(n−j+1)α + (j−1)β`) and
/// the remaining rows are `β_{n,j}` (exponent `(n−j)α + jβ`).
#[derive(Clone, Debug)]
pub struct CoefficientPyramid<T> {
    a: Matrix<T>,
    m1: usize,
    levels: Vec<Vec<Matrix<T>>>,
}

impl<T: Real> CoefficientPyramid<T> {
    pub fn new(a: &Matrix<T>, m1: usize) -> Self {
        Self { a: a.clone(), m1, levels: vec![vec![Matrix::identity(a.rows())]] }
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Blocks of level `n`; level 0 is the identity.
    pub fn level(&self, n: usize) -> &[Matrix<T>] {
        &self.levels[n]
    }

    /// `α_{n,j}` for `1 ≤ j ≤ n`.
    pub fn alpha_block(&self, n: usize, j: usize) -> Matrix<T> {
        self.levels[n][j - 1].row_block(0, self.m1)
    }

    /// `β_{n,j}` for `1 ≤ j ≤ n`.
    pub fn beta_block(&self, n: usize, j: usize) -> Matrix<T> {
        let m = self.a.rows();
        self.levels[n][j - 1].row_block(self.m1, m)
    }

    /// Level `n+1` from level `n ≥ 1`: `C_{n+1,j} = A·[α_{n,j}; β_{n,j−1}]`
    /// with `α_{n,n+1} = 0` and `β_{n,0} = 0`.
    pub fn next_level(&self, n: usize) -> Vec<Matrix<T>> {
        let m = self.a.rows();
        if n == 0 {
            return vec![self.a.clone()];
        }
        let prev = &self.levels[n];
        (1..=n + 1)
            .map(|j| {
                let mut stacked = Matrix::zeros(m, m);
                if j <= n {
                    for r in 0..self.m1 {
                        for c in 0..m {
                            stacked[(r, c)] = prev[j - 1][(r, c)];
                        }
                    }
                }
                if j >= 2 {
                    for r in self.m1..m {
                        for c in 0..m {
                            stacked[(r, c)] = prev[j - 2][(r, c)];
                        }
                    }
                }
                self.a.matmul(&stacked)
            })
            .collect()
    }

    /// Extends the pyramid to at least `depth` levels.
    pub fn extend_to(&mut self, depth: usize) -> Result<()> {
        while self.depth() < depth {
            let next = self.next_level(self.depth());
            if next.iter().any(|b| !b.is_finite()) {
                return Err(Error::OverflowDomain { log_magnitude: f64::INFINITY });
            }
            self.levels.push(next);
        }
        Ok(())
    }
}

/// Builds levels `0..=depth`.
pub fn build_pyramid<T: Real>(system: &MixedSystem<T>, depth: usize) -> Result<CoefficientPyramid<T>> {
    let mut p = CoefficientPyramid::new(system.a(), system.m1());
    p.extend_to(depth)?;
    Ok(p)
}

/// Series truncation controls.
#[derive(Clone, Copy, Debug)]
pub struct SeriesConfig<T> {
    pub tol: T,
    pub max_levels: usize,
}

pub const DEFAULT_MAX_LEVELS: usize = 300;

impl<T: Real> SeriesConfig<T> {
    pub fn new(tol: T) -> Self {
        Self { tol, max_levels: DEFAULT_MAX_LEVELS }
    }
}

#[derive(Clone, Debug)]
pub struct PReport<T> {
    pub value: Matrix<T>,
    pub levels_used: usize,
    pub max_level_norm: T,
    /// Set when the largest level contribution exceeds `1e12·‖result‖`.
    pub precision_loss: bool,
}

/// `P(t) = Σ_n L_n p_n(t)`, extending the pyramid as needed.
pub fn eval_p<T: Real>(
    pyramid: &mut CoefficientPyramid<T>,
    system: &MixedSystem<T>,
    t: T,
    cfg: &SeriesConfig<T>,
) -> Result<PReport<T>> {
    eval_kernel(pyramid, system, t, T::one(), T::one(), cfg)
}

/// Generalised sum `Σ c_{a,b} t^e Γ(g)/Γ(e+g)` where `g = g_alpha` for
/// the first block of columns and `g = g_beta` for the second. With
/// `g = 1` this is `P(t)`.
fn eval_kernel<T: Real>(
    pyramid: &mut CoefficientPyramid<T>,
    system: &MixedSystem<T>,
    t: T,
    g_alpha: T,
    g_beta: T,
    cfg: &SeriesConfig<T>,
) -> Result<PReport<T>> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(domain(format!("time {t} must be finite and nonnegative")));
    }
    let m = system.dim();
    let m1 = system.m1();
    if t.is_zero() {
        return Ok(PReport {
            value: Matrix::identity(m),
            levels_used: 0,
            max_level_norm: T::one(),
            precision_loss: false,
        });
    }
    let alpha = system.alpha().value();
    let beta = system.beta().value();
    let ln_t = t.ln();
    let lg = [ln_gamma(g_alpha), ln_gamma(g_beta)];
    let gs = [g_alpha, g_beta];
    let weight = |e: T, col_block: usize| (e * ln_t + lg[col_block] - ln_gamma(e + gs[col_block])).exp();

    let mut sums = vec![CompensatedSum::new(); m * m];
    for i in 0..m {
        sums[i * m + i].add(T::one());
    }
    let mut max_level = T::one();
    let mut small_run = 0;

    for n in 1..=cfg.max_levels {
        pyramid.extend_to(n)?;
        let nf = T::from_usize_lossy(n);
        let mut contribution = Matrix::<T>::zeros(m, m);
        for (jm1, block) in pyramid.level(n).iter().enumerate() {
            let jf = T::from_usize_lossy(jm1 + 1);
            let e_top = (nf - jf + T::one()) * alpha + (jf - T::one()) * beta;
            let e_bot = (nf - jf) * alpha + jf * beta;
            let w_top = [weight(e_top, 0), weight(e_top, 1)];
            let w_bot = [weight(e_bot, 0), weight(e_bot, 1)];
            for r in 0..m {
                let w = if r < m1 { &w_top } else { &w_bot };
                for c in 0..m {
                    let cb = usize::from(c >= m1);
                    contribution[(r, c)] += block[(r, c)] * w[cb];
                }
            }
        }
        for (s, &x) in sums.iter_mut().zip(contribution.as_slice()) {
            s.add(x);
        }
        let cnorm = contribution.max_norm();
        if !cnorm.is_finite() {
            return Err(Error::OverflowDomain { log_magnitude: f64::INFINITY });
        }
        max_level = max_level.max(cnorm);
        let snorm = sums.iter().fold(T::zero(), |a, s| a.max(s.value().abs()));
        if cnorm <= cfg.tol * snorm {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let value = Matrix::from_vec(m, m, sums.iter().map(|s| s.value()).collect())?;
            let vnorm = value.max_norm();
            return Ok(PReport {
                value,
                levels_used: n,
                max_level_norm: max_level,
                precision_loss: max_level > T::lit(crate::special::CANCELLATION_FLAG) * vnorm,
            });
        }
    }
    Err(Error::NoConvergence { terms: cfg.max_levels })
}

/// `y(t_k) = P(t_k) y0` on the given grid.
pub fn solve_series<T: Real>(system: &MixedSystem<T>, times: &[T], tol: T) -> Result<Trajectory<T>> {
    solve_series_with(system, times, &SeriesConfig::new(tol))
}

/// [`solve_series`] with an explicit level cap.
pub fn solve_series_with<T: Real>(system: &MixedSystem<T>, times: &[T], cfg: &SeriesConfig<T>) -> Result<Trajectory<T>> {
    check_times(times)?;
    let (tol, cfg) = (cfg.tol, *cfg);
    let mut pyramid = CoefficientPyramid::new(system.a(), system.m1());
    let mut rows = Vec::with_capacity(times.len());
    let mut warnings = Vec::new();
    let mut max_used = 0;
    for &t in times {
        let rep = eval_p(&mut pyramid, system, t, &cfg)?;
        max_used = max_used.max(rep.levels_used);
        if rep.precision_loss {
            warnings.push(Warning::PrecisionLoss { time: t, ratio: rep.max_level_norm / rep.value.max_norm() });
        }
        rows.push(rep.value.mul_vec(system.y0()));
    }
    let mut traj = Trajectory::from_rows(
        times.to_vec(),
        rows,
        system.dim(),
        SolverTag::Series { tol, max_levels_used: max_used },
    )?;
    traj.warnings = warnings;
    Ok(traj)
}

/// Forced response `y(t) = P(t) y0 + ∫₀ᵗ K(t−s) F(s) ds`.
///
/// Column block `c` of the kernel expands as
/// `Σ c_{a,b} (t−s)^{e+γ_c−1}/Γ(e+γ_c)` with `γ_c` the order of block `c`,
/// so the forced part is `Σ c_{a,b} I^{e+γ_c} F_c(t)`. Each fractional
/// integral uses the product-trapezoid rule of its own order on `substeps`
/// uniform subintervals of `[0, t]`; the sum is repeated with twice as many
/// and a change larger than `10·tol` is reported as a warning.
pub fn solve_series_forced<T: Real>(
    system: &MixedSystem<T>,
    forcing: &dyn Fn(T) -> Vec<T>,
    times: &[T],
    substeps: usize,
    tol: T,
) -> Result<Trajectory<T>> {
    check_times(times)?;
    if substeps < 8 {
        return Err(domain(format!("at least 8 substeps are required, got {substeps}")));
    }
    let m = system.dim();
    let cfg = SeriesConfig::new(tol);
    let mut pyramid = CoefficientPyramid::new(system.a(), system.m1());
    let mut rows = Vec::with_capacity(times.len());
    let mut warnings = Vec::new();

    for &t in times {
        let hom = eval_p(&mut pyramid, system, t, &cfg)?.value.mul_vec(system.y0());
        let coarse = forced_part(&mut pyramid, system, forcing, t, substeps, &cfg)?;
        let fine = forced_part(&mut pyramid, system, forcing, t, 2 * substeps, &cfg)?;
        let change = coarse.iter().zip(&fine).fold(T::zero(), |a, (x, y)| a.max((*x - *y).abs()));
        if change > T::lit(10.0) * tol {
            warnings.push(Warning::QuadratureUnderResolved { time: t, change });
        }
        rows.push((0..m).map(|i| hom[i] + fine[i]).collect());
    }
    let mut traj = Trajectory::from_rows(times.to_vec(), rows, m, SolverTag::ForcedSeries { tol, substeps })?;
    traj.warnings = warnings;
    Ok(traj)
}

fn forced_part<T: Real>(
    pyramid: &mut CoefficientPyramid<T>,
    system: &MixedSystem<T>,
    forcing: &dyn Fn(T) -> Vec<T>,
    t: T,
    n: usize,
    cfg: &SeriesConfig<T>,
) -> Result<Vec<T>> {
    let m = system.dim();
    let m1 = system.m1();
    if t.is_zero() {
        return Ok(vec![T::zero(); m]);
    }
    let h = t / T::from_usize_lossy(n);
    let mut samples = vec![Vec::with_capacity(n + 1); m];
    for i in 0..=n {
        let f = forcing(h * T::from_usize_lossy(i));
        if f.len() != m {
            return Err(Error::DimensionMismatch(format!("forcing has length {}, expected {m}", f.len())));
        }
        for (c, v) in f.into_iter().enumerate() {
            samples[c].push(v);
        }
    }
    let orders = [system.alpha().value(), system.beta().value()];
    // I^{e+γ_c} F_c(t) for every column c.
    let integrals = |e: T| -> [Vec<T>; 2] {
        let mut out = [vec![T::zero(); m], vec![T::zero(); m]];
        for (b, &g) in orders.iter().enumerate() {
            let w = product_trapezoid_weights(e + g, n, h);
            for c in 0..m {
                if usize::from(c >= m1) == b {
                    out[b][c] = w.iter().zip(&samples[c]).fold(T::zero(), |acc, (&a, &f)| acc + a * f);
                }
            }
        }
        out
    };
    let merge = |i: &[Vec<T>; 2], c: usize| if c < m1 { i[0][c] } else { i[1][c] };

    let base = integrals(T::zero());
    let mut sums: Vec<CompensatedSum<T>> = (0..m)
        .map(|r| {
            let mut s = CompensatedSum::new();
            s.add(merge(&base, r));
            s
        })
        .collect();
    let (alpha, beta) = (orders[0], orders[1]);
    let mut small_run = 0;
    for lvl in 1..=cfg.max_levels {
        pyramid.extend_to(lvl)?;
        let nf = T::from_usize_lossy(lvl);
        let mut contribution = vec![T::zero(); m];
        for (jm1, block) in pyramid.level(lvl).iter().enumerate() {
            let jf = T::from_usize_lossy(jm1 + 1);
            let top = integrals((nf - jf + T::one()) * alpha + (jf - T::one()) * beta);
            let bot = integrals((nf - jf) * alpha + jf * beta);
            for (r, out) in contribution.iter_mut().enumerate() {
                let i = if r < m1 { &top } else { &bot };
                for c in 0..m {
                    *out += block[(r, c)] * merge(i, c);
                }
            }
        }
        for (s, &x) in sums.iter_mut().zip(&contribution) {
            s.add(x);
        }
        let cnorm = contribution.iter().fold(T::zero(), |a, x| a.max(x.abs()));
        if !cnorm.is_finite() {
            return Err(Error::OverflowDomain { log_magnitude: f64::INFINITY });
        }
        let snorm = sums.iter().fold(T::zero(), |a, s| a.max(s.value().abs()));
        small_run = if cnorm <= cfg.tol * snorm { small_run + 1 } else { 0 };
        if small_run >= 3 {
            return Ok(sums.iter().map(|s| s.value()).collect());
        }
    }
    Err(Error::NoConvergence { terms: cfg.max_levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::RationalOrder;
    use crate::special::{ml_matrix_real, ml_real};

    fn ord(n: i64, d: i64) -> Order<f64> {
        Order::Rational(RationalOrder::new(n, d).unwrap())
    }

    #[test]
    fn identity_matrix_pyramid() {
        let sys = MixedSystem::new(Matrix::identity(2), 1, ord(1, 2), ord(1, 1), vec![1.0, 1.0]).unwrap();
        let p = build_pyramid(&sys, 6).unwrap();
        for n in 1..=6 {
            for j in 1..=n {
                let a = p.alpha_block(n, j);
                let b = p.beta_block(n, j);
                let a_exp = if j == 1 { [1.0, 0.0] } else { [0.0, 0.0] };
                let b_exp = if j == n { [0.0, 1.0] } else { [0.0, 0.0] };
                assert_eq!(a.row(0), &a_exp);
                assert_eq!(b.row(0), &b_exp);
            }
        }
    }

    #[test]
    fn swap_matrix_first_level() {
        let a = Matrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let sys = MixedSystem::new(a, 1, ord(1, 2), ord(1, 1), vec![1.0, 0.0]).unwrap();
        let p = build_pyramid(&sys, 1).unwrap();
        assert_eq!(p.alpha_block(1, 1).row(0), &[0.0, 1.0]);
        assert_eq!(p.beta_block(1, 1).row(0), &[1.0, 0.0]);
        let p0 = build_pyramid(&sys, 0).unwrap();
        assert_eq!(p0.depth(), 0);
        assert_eq!(p0.level(0)[0], Matrix::identity(2));
    }

    #[test]
    fn t_zero_is_identity() {
        let a = Matrix::from_rows(&[[-1.0, 2.0], [0.5, -3.0]]).unwrap();
        let sys = MixedSystem::new(a, 1, ord(1, 3), ord(2, 3), vec![1.0, 2.0]).unwrap();
        let mut p = build_pyramid(&sys, 0).unwrap();
        let r = eval_p(&mut p, &sys, 0.0, &SeriesConfig::new(1e-15)).unwrap();
        assert_eq!(r.value, Matrix::identity(2));
    }

    #[test]
    fn equal_orders_collapse_to_matrix_ml() {
        let a = Matrix::from_rows(&[[-1.0, 0.4, 0.2], [0.3, -0.8, 0.1], [0.0, 0.5, -1.2]]).unwrap();
        let sys = MixedSystem::new(a.clone(), 2, ord(1, 2), ord(1, 2), vec![1.0, 0.0, 0.0]).unwrap();
        let mut p = build_pyramid(&sys, 0).unwrap();
        for t in [0.5_f64, 1.0] {
            let r = eval_p(&mut p, &sys, t, &SeriesConfig::new(1e-16)).unwrap();
            let e = ml_matrix_real(0.5, &a.scale(t.sqrt())).unwrap();
            assert!(r.value.max_abs_diff(&e) < 1e-12);
        }
    }

    #[test]
    fn decoupled_blocks() {
        let sys = MixedSystem::new(Matrix::identity(2), 1, ord(1, 2), ord(1, 1), vec![1.0, 1.0]).unwrap();
        let tr = solve_series(&sys, &[1.0], 1e-16).unwrap();
        assert!((tr.state(0)[0] - ml_real(0.5, 1.0, 1.0).unwrap()).abs() < 1e-13);
        assert!((tr.state(0)[1] - std::f64::consts::E).abs() < 1e-13);
    }

    #[test]
    fn zero_initial_state() {
        let a = Matrix::from_rows(&[[-1.0, 2.0], [0.5, -3.0]]).unwrap();
        let sys = MixedSystem::new(a, 1, ord(1, 3), ord(2, 3), vec![0.0, 0.0]).unwrap();
        let tr = solve_series(&sys, &[0.0, 0.5, 1.0], 1e-14).unwrap();
        assert!(tr.states().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn classical_forced_limit() {
        let sys = MixedSystem::scalar(-1.0, ord(1, 1), 0.0).unwrap();
        let tr = solve_series_forced(&sys, &|_| vec![1.0], &[0.5, 1.0, 2.0], 512, 1e-14).unwrap();
        for (k, &t) in tr.times().iter().enumerate() {
            assert!((tr.state(k)[0] - (1.0 - (-t).exp())).abs() < 1e-5);
        }
    }

    #[test]
    fn zero_forcing_matches_homogeneous() {
        let a = Matrix::from_rows(&[[-1.0, 2.0], [0.5, -3.0]]).unwrap();
        let sys = MixedSystem::new(a, 1, ord(1, 3), ord(2, 3), vec![1.0, -1.0]).unwrap();
        let times = [0.25, 0.5, 1.0];
        let f = solve_series_forced(&sys, &|_| vec![0.0, 0.0], &times, 8, 1e-14).unwrap();
        let h = solve_series(&sys, &times, 1e-14).unwrap();
        assert_eq!(f.states(), h.states());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(MixedSystem::new(Matrix::<f64>::identity(2), 3, ord(1, 2), ord(1, 2), vec![0.0; 2]).is_err());
        assert!(MixedSystem::new(Matrix::<f64>::identity(2), 1, ord(1, 2), ord(1, 2), vec![0.0; 3]).is_err());
        let sys = MixedSystem::scalar(-1.0, ord(1, 2), 1.0).unwrap();
        assert!(solve_series(&sys, &[1.0, 0.5], 1e-12).is_err());
        assert!(solve_series_forced(&sys, &|_| vec![1.0], &[1.0], 4, 1e-12).is_err());
    }

    #[test]
    fn level_cap_reports_no_convergence() {
        let sys = MixedSystem::scalar(-1.0, ord(1, 2), 1.0).unwrap();
        let mut p = build_pyramid(&sys, 0).unwrap();
        let cfg = SeriesConfig { tol: 1e-16, max_levels: 5 };
        assert!(matches!(eval_p(&mut p, &sys, 1.0, &cfg), Err(Error::NoConvergence { .. })));
    }
}
