//! Sampled solutions and their CSV form.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Which solver produced a trajectory, with its resolution parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum SolverTag<T> {
    Series { tol: T, max_levels_used: usize },
    ForcedSeries { tol: T, substeps: usize },
    L1 { h: T },
    L1Richardson { h: T },
    Spectral { poles: usize },
}

/// Non-fatal diagnostics attached to a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub enum Warning<T> {
    /// The largest series contribution exceeded `1e12·‖result‖` at `time`.
    PrecisionLoss { time: T, ratio: T },
    /// Doubling the quadrature substeps moved the result by `change`.
    QuadratureUnderResolved { time: T, change: T },
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    times: Vec<T>,
    states: Matrix<T>,
    pub solver: SolverTag<T>,
    pub warnings: Vec<Warning<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(times: Vec<T>, states: Matrix<T>, solver: SolverTag<T>) -> Result<Self> {
        if states.rows() != times.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} state rows for {} times",
                states.rows(),
                times.len()
            )));
        }
        Ok(Self { times, states, solver, warnings: Vec::new() })
    }

    pub(crate) fn from_rows(times: Vec<T>, rows: Vec<Vec<T>>, dim: usize, solver: SolverTag<T>) -> Result<Self> {
        let data: Vec<T> = rows.into_iter().flatten().collect();
        let states = Matrix::from_vec(times.len(), dim, data)?;
        Self::new(times, states, solver)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &Matrix<T> {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states.cols()
    }

    /// State at sample `k`.
    pub fn state(&self, k: usize) -> &[T] {
        self.states.row(k)
    }

    /// Component `i` across all samples.
    pub fn component(&self, i: usize) -> Vec<T> {
        (0..self.len()).map(|k| self.states[(k, i)]).collect()
    }

    /// Keeps every `stride`-th sample, always including the last one.
    pub fn decimate(&self, stride: usize) -> Self {
        let stride = stride.max(1);
        let mut idx: Vec<usize> = (0..self.len()).step_by(stride).collect();
        if let Some(&last) = idx.last() {
            if last + 1 != self.len() {
                idx.push(self.len() - 1);
            }
        }
        let times = idx.iter().map(|&k| self.times[k]).collect();
        let rows = idx.iter().map(|&k| self.state(k).to_vec()).collect();
        let mut out = Self::from_rows(times, rows, self.dim(), self.solver.clone()).expect("consistent shape");
        out.warnings = self.warnings.clone();
        out
    }

    /// Largest componentwise difference against another trajectory on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch("trajectories have different shapes".into()));
        }
        Ok(self.states.max_abs_diff(&other.states))
    }

    /// Writes `t,y1,…,ym` with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "t")?;
        for i in 1..=self.dim() {
            write!(w, ",y{i}")?;
        }
        writeln!(w)?;
        for (k, t) in self.times.iter().enumerate() {
            write!(w, "{:.16e}", t.as_f64())?;
            for v in self.state(k) {
                write!(w, ",{:.16e}", v.as_f64())?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Checks that `times` is nonnegative and strictly increasing.
pub(crate) fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.iter().any(|t| !(*t >= T::zero()) || !t.is_finite()) {
        return Err(Error::Domain("times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("times must be strictly increasing".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let t = Trajectory::from_rows(vec![0.0, 0.5], vec![vec![1.0, 2.0], vec![3.0, 4.0]], 2, SolverTag::L1 { h: 0.5 })
            .unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,y1,y2");
        assert_eq!(lines[2], "5.0000000000000000e-1,3.0000000000000000e0,4.0000000000000000e0");
    }

    #[test]
    fn decimate_keeps_endpoints() {
        let times: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let rows = times.iter().map(|&t| vec![t]).collect();
        let t = Trajectory::from_rows(times, rows, 1, SolverTag::L1 { h: 1.0 }).unwrap();
        let d = t.decimate(4);
        assert_eq!(d.times(), &[0.0, 4.0, 8.0, 9.0]);
    }

    #[test]
    fn time_checks() {
        assert!(check_times(&[0.0, 1.0, 2.0]).is_ok());
        assert!(check_times(&[0.0, 0.0]).is_err());
        assert!(check_times(&[-1.0, 0.0]).is_err());
    }
}
