//! Datasets for the stability-boundary and trajectory figures.

use crate::error::Result;
use crate::l1::{step_solve, step_solve_richardson, MultiIndexSystem};
use crate::linalg::Matrix;
use crate::scalar::Real;
use crate::stability::{boundary_closed_form, boundary_curve, log_grid, rotation_matrix, symmetric_matrix, BoundarySample};
use crate::trajectory::Trajectory;

/// Boundary curve with its reference angle `(α+β)/4` (units of π), the
/// Matignon angle at the mean order.
#[derive(Clone, Debug)]
pub struct BoundaryFigure<T> {
    pub alpha: T,
    pub beta: T,
    pub samples: Vec<BoundarySample<T>>,
    pub reference_angle: T,
}

pub const BOUNDARY_SAMPLES: usize = 601;

fn boundary_figure<T: Real>(alpha: T, beta: T) -> Result<BoundaryFigure<T>> {
    let grid = log_grid(T::lit(1e-3), T::lit(1e3), BOUNDARY_SAMPLES);
    Ok(BoundaryFigure {
        alpha,
        beta,
        samples: boundary_curve(alpha, beta, &grid)?,
        reference_angle: (alpha + beta) / T::lit(4.0),
    })
}

/// Boundary for orders `(1/2, 1)`.
pub fn fig2<T: Real>() -> Result<BoundaryFigure<T>> {
    boundary_figure(T::one(), T::lit(0.5))
}

/// Boundary for orders `(1/3, 2/3)`.
pub fn fig3<T: Real>() -> Result<BoundaryFigure<T>> {
    boundary_figure(T::lit(2.0 / 3.0), T::lit(1.0 / 3.0))
}

#[derive(Clone, Debug)]
pub struct FigureTrajectory<T> {
    /// Order of the first component.
    pub alpha: T,
    /// Order of the second component.
    pub beta: T,
    pub d: T,
    pub theta: T,
    pub label: String,
    pub a: Matrix<T>,
    pub y0: Vec<T>,
    pub trajectory: Trajectory<T>,
}

/// Step and horizon for the oscillation figures.
#[derive(Clone, Copy, Debug)]
pub struct TrajectoryConfig<T> {
    pub h: T,
    pub t_end: T,
}

impl<T: Real> TrajectoryConfig<T> {
    pub fn oscillation() -> Self {
        Self { h: T::lit(1e-3), t_end: T::lit(40.0) }
    }

    pub fn decay() -> Self {
        Self { h: T::lit(1e-3), t_end: T::lit(10.0) }
    }

    fn steps(&self) -> usize {
        (self.t_end / self.h).round().to_usize().unwrap_or(0).max(1)
    }
}

/// Extra rotation added to the boundary value for the decaying cases.
pub const THETA_SHIFT: f64 = 0.3;

struct Case<T> {
    alpha: T,
    beta: T,
    d: T,
    theta: T,
    label: String,
    y0: [T; 2],
    symmetric: bool,
}

fn oscillation_cases<T: Real>(shifted_only: bool) -> Result<Vec<Case<T>>> {
    let mut out = Vec::new();
    let d = T::one();
    for (alpha, beta) in [(T::lit(0.5), T::one()), (T::lit(1.0 / 3.0), T::lit(2.0 / 3.0))] {
        let boundary = boundary_closed_form(alpha, beta, d)? * d;
        for (theta, tag) in [(boundary, "boundary"), (boundary + T::lit(THETA_SHIFT), "shifted")] {
            if shifted_only && tag == "boundary" {
                continue;
            }
            out.push(Case {
                alpha,
                beta,
                d,
                theta,
                label: format!("{tag}_a{:.4}_b{:.4}", alpha.as_f64(), beta.as_f64()),
                y0: [T::one(), T::zero()],
                symmetric: false,
            });
        }
    }
    Ok(out)
}

fn run_cases<T: Real>(cases: Vec<Case<T>>, cfg: TrajectoryConfig<T>, richardson: bool) -> Result<Vec<FigureTrajectory<T>>> {
    let n = cfg.steps();
    let matrices: Vec<Matrix<T>> = cases
        .iter()
        .map(|c| if c.symmetric { symmetric_matrix(c.d, c.theta) } else { rotation_matrix(c.d, c.theta) })
        .collect();
    let results: Vec<Result<Trajectory<T>>> = std::thread::scope(|s| {
        let handles: Vec<_> = cases
            .iter()
            .zip(&matrices)
            .map(|(c, a)| {
                s.spawn(move || {
                    let sys = MultiIndexSystem::new(a.clone(), vec![c.alpha, c.beta], c.y0.to_vec())?;
                    if richardson {
                        step_solve_richardson(&sys, cfg.h, n)
                    } else {
                        step_solve(&sys, cfg.h, n)
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("figure solve panicked")).collect()
    });
    cases
        .into_iter()
        .zip(matrices)
        .zip(results)
        .map(|((c, a), r)| {
            Ok(FigureTrajectory {
                alpha: c.alpha,
                beta: c.beta,
                d: c.d,
                theta: c.theta,
                label: c.label,
                a,
                y0: c.y0.to_vec(),
                trajectory: r?,
            })
        })
        .collect()
}

/// Rotation family at `d = 1` with `θ` on the boundary and shifted by 0.3,
/// for orders `(1/2, 1)` and `(1/3, 2/3)`; `y0 = (1, 0)`.
/// Trajectories are Richardson-extrapolated L1 solutions.
pub fn fig4<T: Real>(cfg: TrajectoryConfig<T>) -> Result<Vec<FigureTrajectory<T>>> {
    run_cases(oscillation_cases(false)?, cfg, true)
}

/// The two decaying cases of [`fig4`], for phase plots of `y₁` against `y₂`.
pub fn fig5<T: Real>(cfg: TrajectoryConfig<T>) -> Result<Vec<FigureTrajectory<T>>> {
    run_cases(oscillation_cases(true)?, cfg, true)
}

/// Order pairs of the real-eigenvalue figure.
pub const FIG6_ORDERS: [(f64, f64); 4] = [(0.85, 0.95), (0.5, 0.95), (0.2, 0.05), (0.15, 0.95)];

/// `A = [[−1, 1/2], [1/2, −1]]` (eigenvalues −3/2 and −1/2) with
/// `y0 = (1, 1)` for each order pair in [`FIG6_ORDERS`]; plain L1.
pub fn fig6<T: Real>(cfg: TrajectoryConfig<T>) -> Result<Vec<FigureTrajectory<T>>> {
    let cases = FIG6_ORDERS
        .iter()
        .map(|&(a, b)| Case {
            alpha: T::lit(a),
            beta: T::lit(b),
            d: T::lit(-1.0),
            theta: T::lit(0.5),
            label: format!("a{a}_b{b}"),
            y0: [T::one(), T::one()],
            symmetric: true,
        })
        .collect();
    run_cases(cases, cfg, false)
}

/// Indices of strict local maxima and minima of a sampled signal.
pub fn extrema<T: Real>(y: &[T]) -> (Vec<usize>, Vec<usize>) {
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for k in 1..y.len().saturating_sub(1) {
        if y[k] > y[k - 1] && y[k] >= y[k + 1] {
            maxima.push(k);
        } else if y[k] < y[k - 1] && y[k] <= y[k + 1] {
            minima.push(k);
        }
    }
    (maxima, minima)
}

/// Each maximum minus the next minimum.
pub fn peak_to_peak<T: Real>(y: &[T]) -> Vec<T> {
    let (maxima, minima) = extrema(y);
    maxima
        .iter()
        .filter_map(|&k| minima.iter().find(|&&j| j > k).map(|&j| y[k] - y[j]))
        .collect()
}

/// `1 − last/max` over the peak-to-peak amplitudes; zero with fewer than two.
pub fn envelope_decay<T: Real>(amplitudes: &[T]) -> T {
    if amplitudes.len() < 2 {
        return T::zero();
    }
    let max = amplitudes.iter().fold(T::zero(), |m, &a| m.max(a));
    T::one() - *amplitudes.last().expect("nonempty") / max
}

/// Largest `|y₁ − y₂|` over samples with `t ≤ t_max`.
pub fn early_gap<T: Real>(tr: &Trajectory<T>, t_max: T) -> T {
    tr.times()
        .iter()
        .enumerate()
        .take_while(|(_, &t)| t <= t_max)
        .fold(T::zero(), |m, (k, _)| m.max((tr.state(k)[0] - tr.state(k)[1]).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_analysis() {
        let y: Vec<f64> = (0..2000).map(|k| (k as f64 * 0.01).sin() * (-0.01 * k as f64 * 0.01).exp()).collect();
        let pp = peak_to_peak(&y);
        assert!(pp.len() >= 2);
        assert!(pp.windows(2).all(|w| w[1] < w[0]));
        assert!(envelope_decay(&pp) > 0.0);
        let flat: Vec<f64> = (0..2000).map(|k| (k as f64 * 0.01).sin()).collect();
        assert!(envelope_decay(&peak_to_peak(&flat)) < 1e-6);
    }

    #[test]
    fn boundary_figures() {
        let f2 = fig2::<f64>().unwrap();
        assert_eq!(f2.samples.len(), BOUNDARY_SAMPLES);
        assert!((f2.reference_angle - 0.375).abs() < 1e-15);
        let f3 = fig3::<f64>().unwrap();
        assert!((f3.reference_angle - 0.25).abs() < 1e-15);
        let min = f3.samples.iter().map(|s| s.angle).fold(f64::INFINITY, f64::min);
        assert!(min < 0.25 && min > 0.23);
    }

    #[test]
    fn short_fig6_run() {
        let out = fig6::<f64>(TrajectoryConfig { h: 1e-2, t_end: 1.0 }).unwrap();
        assert_eq!(out.len(), 4);
        for f in &out {
            assert_eq!(f.trajectory.len(), 101);
            assert!(f.trajectory.state(100).iter().all(|v| v.abs() < 1.0));
        }
    }
}
