//! Implicit L1 time stepping for linear systems with per-component Caputo orders.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::scalar::Real;
use crate::series::MixedSystem;
use crate::special::gamma;
use crate::trajectory::{SolverTag, Trajectory};

pub type Forcing<T> = Arc<dyn Fn(T) -> Vec<T> + Send + Sync>;

/// `D^{α_i} y_i = Σ_j A_ij y_j + F_i(t)`.
#[derive(Clone)]
pub struct MultiIndexSystem<T> {
    a: Matrix<T>,
    orders: Vec<T>,
    y0: Vec<T>,
    forcing: Option<Forcing<T>>,
}

impl<T: Real> std::fmt::Debug for MultiIndexSystem<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MultiIndexSystem")
            .field("a", &self.a)
            .field("orders", &self.orders)
            .field("y0", &self.y0)
            .field("forced", &self.forcing.is_some())
            .finish()
    }
}

impl<T: Real> MultiIndexSystem<T> {
    pub fn new(a: Matrix<T>, orders: Vec<T>, y0: Vec<T>) -> Result<Self> {
        if !a.is_square() || a.rows() == 0 {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", a.rows(), a.cols())));
        }
        if orders.len() != a.rows() || y0.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "{} orders and {} initial values for dimension {}",
                orders.len(),
                y0.len(),
                a.rows()
            )));
        }
        if let Some(o) = orders.iter().find(|&&o| !(o > T::zero() && o <= T::one())) {
            return Err(domain(format!("order {o} is outside (0, 1]")));
        }
        if !a.is_finite() || y0.iter().any(|v| !v.is_finite()) {
            return Err(domain("system has non-finite entries"));
        }
        Ok(Self { a, orders, y0, forcing: None })
    }

    pub fn with_forcing(mut self, f: impl Fn(T) -> Vec<T> + Send + Sync + 'static) -> Self {
        self.forcing = Some(Arc::new(f));
        self
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn orders(&self) -> &[T] {
        &self.orders
    }

    pub fn y0(&self) -> &[T] {
        &self.y0
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }
}

impl<T: Real> From<&MixedSystem<T>> for MultiIndexSystem<T> {
    fn from(s: &MixedSystem<T>) -> Self {
        let orders = (0..s.dim()).map(|i| s.order_of(i)).collect();
        Self { a: s.a().clone(), orders, y0: s.y0().to_vec(), forcing: None }
    }
}

/// Discrete Caputo kernel `w_j = j^{1−α} − (j−1)^{1−α}` and scale
/// `c = 1/(Γ(2−α) h^α)`.
#[derive(Clone, Debug)]
pub struct L1Weights<T> {
    pub order: T,
    pub scale: T,
    /// `w[j-1] = w_j` for `j = 1..=n`.
    pub w: Vec<T>,
}

impl<T: Real> L1Weights<T> {
    pub fn new(order: T, h: T, n: usize) -> Self {
        let scale = T::one() / (gamma(T::lit(2.0) - order) * h.powf(order));
        let p = T::one() - order;
        let mut w = Vec::with_capacity(n);
        if n > 0 {
            w.push(T::one());
        }
        for j in 2..=n {
            if p.is_zero() {
                w.push(T::zero());
            } else {
                let jf = T::from_usize_lossy(j);
                w.push(jf.powf(p) - (jf - T::one()).powf(p));
            }
        }
        Self { order, scale, w }
    }

    pub fn get(&self, j: usize) -> T {
        self.w[j - 1]
    }
}

/// `Σ_k w[k]·d[len−1−k]`, i.e. `Σ_{j=2}^{n} w_j d_{n−j+1}`.
fn history<T: Real>(w: &[T], d: &[T]) -> T {
    let len = w.len();
    let mut acc = [T::zero(); 4];
    let mut k = 0;
    while k + 4 <= len {
        for (u, a) in acc.iter_mut().enumerate() {
            *a += w[k + u] * d[len - 1 - k - u];
        }
        k += 4;
    }
    for j in k..len {
        acc[0] += w[j] * d[len - 1 - j];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Implicit L1 scheme on `t_k = k·h`, `k = 0..=n_steps`.
///
/// Step `n` solves `(C − A) y_n = C y_{n−1} − H_n + F(t_n)` where
/// `C = diag(c_i)` and `H_n,i = c_i Σ_{j=2}^{n} w_j (y_{n−j+1,i} − y_{n−j,i})`.
/// The matrix `C − A` is factored once. At order one the weights beyond
/// `w_1` vanish and the scheme is backward Euler.
pub fn step_solve<T: Real>(system: &MultiIndexSystem<T>, h: T, n_steps: usize) -> Result<Trajectory<T>> {
    if !(h > T::zero()) || !h.is_finite() {
        return Err(domain(format!("step size {h} must be positive")));
    }
    if n_steps == 0 {
        return Err(domain("at least one step is required"));
    }
    let m = system.dim();

    // One weight table per distinct order.
    let mut tables: Vec<L1Weights<T>> = Vec::new();
    let mut table_of = Vec::with_capacity(m);
    for &o in system.orders() {
        let idx = match tables.iter().position(|t| t.order == o) {
            Some(i) => i,
            None => {
                tables.push(L1Weights::new(o, h, n_steps));
                tables.len() - 1
            }
        };
        table_of.push(idx);
    }
    let c: Vec<T> = table_of.iter().map(|&k| tables[k].scale).collect();
    let lu = Lu::factor(&Matrix::from_diagonal(&c).sub(system.a()))?;

    let mut rows: Vec<Vec<T>> = Vec::with_capacity(n_steps + 1);
    rows.push(system.y0().to_vec());
    // diffs[i][k-1] = y_{k,i} − y_{k−1,i}
    let mut diffs: Vec<Vec<T>> = vec![Vec::with_capacity(n_steps); m];
    let mut times = Vec::with_capacity(n_steps + 1);
    times.push(T::zero());

    for n in 1..=n_steps {
        let t = h * T::from_usize_lossy(n);
        let prev = &rows[n - 1];
        let f = match &system.forcing {
            Some(f) => {
                let v = f(t);
                if v.len() != m {
                    return Err(Error::DimensionMismatch(format!("forcing has length {}, expected {m}", v.len())));
                }
                v
            }
            None => vec![T::zero(); m],
        };
        let mut rhs = Vec::with_capacity(m);
        for i in 0..m {
            let tab = &tables[table_of[i]];
            let hist = if tab.order.is_one() { T::zero() } else { history(&tab.w[1..n], &diffs[i][..n - 1]) };
            rhs.push(c[i] * prev[i] - c[i] * hist + f[i]);
        }
        let y = lu.solve(&rhs);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::OverflowDomain { log_magnitude: f64::INFINITY });
        }
        for i in 0..m {
            diffs[i].push(y[i] - prev[i]);
        }
        rows.push(y);
        times.push(t);
    }
    Trajectory::from_rows(times, rows, m, SolverTag::L1 { h })
}

/// `2·Y(h/2) − Y(h)` on the coarse grid, cancelling the first-order error term.
pub fn step_solve_richardson<T: Real>(system: &MultiIndexSystem<T>, h: T, n_steps: usize) -> Result<Trajectory<T>> {
    let half = h / T::lit(2.0);
    let (coarse, fine) = std::thread::scope(|s| {
        let fine = s.spawn(|| step_solve(system, half, 2 * n_steps));
        let coarse = step_solve(system, h, n_steps);
        (coarse, fine.join().expect("fine L1 solve panicked"))
    });
    let (coarse, fine) = (coarse?, fine?);
    let m = system.dim();
    let rows = (0..=n_steps)
        .map(|k| {
            let c = coarse.state(k);
            let f = fine.state(2 * k);
            (0..m).map(|i| T::lit(2.0) * f[i] - c[i]).collect()
        })
        .collect();
    Trajectory::from_rows(coarse.times().to_vec(), rows, m, SolverTag::L1Richardson { h })
}

/// Discrete Caputo derivative of every component at nodes `1..=N`, so the
/// result has one entry per sample after the first.
pub fn caputo_apply<T: Real>(samples: &Trajectory<T>, order: T, h: T) -> Result<Vec<Vec<T>>> {
    check_uniform(samples.times(), h)?;
    if !(order > T::zero() && order <= T::one()) {
        return Err(domain(format!("order {order} is outside (0, 1]")));
    }
    let n = samples.len().saturating_sub(1);
    let wts = L1Weights::new(order, h, n);
    let m = samples.dim();
    let diffs: Vec<Vec<T>> = (0..m)
        .map(|i| (1..=n).map(|k| samples.state(k)[i] - samples.state(k - 1)[i]).collect())
        .collect();
    Ok((1..=n)
        .map(|k| {
            (0..m)
                .map(|i| {
                    let s = (1..=k).fold(T::zero(), |acc, j| acc + wts.get(j) * diffs[i][k - j]);
                    wts.scale * s
                })
                .collect()
        })
        .collect())
}

fn check_uniform<T: Real>(times: &[T], h: T) -> Result<()> {
    let tol = T::lit(1e-9) * h.abs();
    if !(h > T::zero()) || times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
        return Err(Error::NonUniformGrid { expected: h.as_f64() });
    }
    Ok(())
}
