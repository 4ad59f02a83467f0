use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use mifde_core::figures::{
    early_gap, envelope_decay, fig2, fig3, fig4, fig5, fig6, peak_to_peak, BoundaryFigure, FigureTrajectory,
    TrajectoryConfig,
};
use mifde_core::l1::{step_solve, step_solve_richardson};
use mifde_core::series::solve_series_with;
use mifde_core::special::ml_with;
use mifde_core::spectral::{decompose_auto, solve_spectral};
use mifde_core::stability::{boundary_curve, log_grid, rational_index_stable};
use mifde_core::{Boundary64, Complex64, MlConfig, MlParams, RationalOrder, SeriesConfig, Trajectory64, Warning};

use crate::error::{CliError, CliResult};
use crate::system::{ParsedOrder, ParsedSystem, SystemFile};
use crate::{Common, FigureId, Method};

/// Spacing of the rows written for the trajectory figures.
const FIGURE_OUTPUT_DT: f64 = 1e-2;

/// Early-time window for the component gap reported with fig6.
const FIG6_GAP_WINDOW: f64 = 2.0;

fn warn(err: &mut dyn Write, msg: impl AsRef<str>) {
    let _ = writeln!(err, "warning: {}", msg.as_ref());
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Write { path: path.to_path_buf(), source }
}

fn write_to(path: &Path, f: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> CliResult<()> {
    let file = File::create(path).map_err(io_error(path))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(io_error(path))
}

fn emit(
    target: &Option<PathBuf>,
    out: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> CliResult<()> {
    match target {
        Some(path) => write_to(path, f),
        None => f(out).map_err(io_error(Path::new("<stdout>"))),
    }
}

fn positive(name: &str, v: f64) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("--{name} must be positive and finite, got {v}")))
    }
}

fn load(path: &Path, common: &Common, err: &mut dyn Write) -> CliResult<ParsedSystem> {
    let mut sys = SystemFile::read(path)?.parse()?;
    if let Some(dt) = common.dt {
        sys.dt = positive("dt", dt)?;
    }
    if let Some(tol) = common.tol {
        sys.tol = positive("tol", tol)?;
    }
    if let Some(depth) = common.depth {
        sys.depth = depth;
    }
    for w in &sys.warnings {
        warn(err, w);
    }
    Ok(sys)
}

fn report(tr: &Trajectory64, err: &mut dyn Write) {
    for w in &tr.warnings {
        match w {
            Warning::PrecisionLoss { time, ratio } => {
                warn(err, format!("t = {time}: largest series term is {ratio:.1e} times the result"))
            }
            Warning::QuadratureUnderResolved { time, change } => {
                warn(err, format!("t = {time}: quadrature changed by {change:.1e} on refinement"))
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn mlf(
    alpha: f64,
    beta: f64,
    gamma: u32,
    z: f64,
    z_im: f64,
    common: &Common,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let params = MlParams::new(alpha, beta, gamma)?;
    let mut cfg = MlConfig::default();
    if let Some(tol) = common.tol {
        cfg.tol = positive("tol", tol)?;
    }
    if let Some(depth) = common.depth {
        cfg.max_terms = depth;
    }
    let rep = ml_with(params, Complex64::new(z, z_im), &cfg)?;
    if rep.precision_loss {
        warn(err, "cancellation: the largest term exceeds 1e12 times the value");
    }
    emit(&common.out, out, |w| {
        if z_im == 0.0 && rep.value.im == 0.0 {
            writeln!(w, "{}", rep.value.re)?;
        } else {
            writeln!(w, "{}{:+}i", rep.value.re, rep.value.im)?;
        }
        writeln!(w, "terms_used = {}", rep.terms_used)?;
        writeln!(w, "max_term = {:e}", rep.max_term_magnitude)?;
        writeln!(w, "precision_loss = {}", rep.precision_loss)
    })
}

pub fn solve(
    path: &Path,
    method: Method,
    richardson: bool,
    common: &Common,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CliResult<()> {
    let sys = load(path, common, err)?;
    if richardson && method != Method::L1 {
        return Err(CliError::Input("--richardson applies to the l1 method only".into()));
    }
    let tr = match method {
        Method::Series => {
            let cfg = SeriesConfig { tol: sys.tol, max_levels: sys.depth };
            solve_series_with(&sys.mixed_system("series")?, &sys.times()?, &cfg)?
        }
        Method::L1 => {
            let ms = sys.multi_index()?;
            if richardson {
                step_solve_richardson(&ms, sys.dt, sys.steps()?)?
            } else {
                step_solve(&ms, sys.dt, sys.steps()?)?
            }
        }
        Method::Spectral => {
            let form = decompose_auto(&sys.spectral_system()?)?;
            solve_spectral(&form, &sys.times()?)?
        }
    };
    report(&tr, err);
    emit(&common.out, out, |w| tr.write_csv(w))
}

pub fn check(path: &Path, common: &Common, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let sys = load(path, common, err)?;
    let v = rational_index_stable(&sys.a, &sys.rationals())?;
    emit(&common.out, out, |w| {
        writeln!(w, "{}", v.status)?;
        writeln!(w, "margin = {:e}", v.margin)?;
        writeln!(w, "sector = {:e}", v.sector)?;
        writeln!(w, "roots = {}", v.witnesses.len())?;
        writeln!(w, "zero_roots = {}", v.zero_roots.len())
    })
}

#[derive(Clone, Debug)]
pub struct BoundarySpec {
    pub file: Option<PathBuf>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub x_min: f64,
    pub x_max: f64,
    pub samples: usize,
}

fn boundary_orders(spec: &BoundarySpec, common: &Common, err: &mut dyn Write) -> CliResult<(f64, f64)> {
    let mut from_file = Vec::new();
    if let Some(path) = &spec.file {
        for o in load(path, common, err)?.orders {
            if !from_file.contains(&o.value) {
                from_file.push(o.value);
            }
        }
        if from_file.len() != 2 {
            return Err(CliError::Input(format!("boundary needs two distinct orders, file has {}", from_file.len())));
        }
    }
    let pick = |flag: &Option<String>, k: usize| -> CliResult<f64> {
        match flag {
            Some(text) => Ok(ParsedOrder::parse(text)?.value),
            None => from_file.get(k).copied().ok_or_else(|| CliError::Input("give --alpha and --beta or a system file".into())),
        }
    };
    Ok((pick(&spec.alpha, 0)?, pick(&spec.beta, 1)?))
}

fn write_boundary(w: &mut dyn Write, samples: &[Boundary64]) -> io::Result<()> {
    writeln!(w, "x,r,d,theta,angle")?;
    for s in samples {
        writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", s.x, s.r, s.d, s.theta, s.angle)?;
    }
    Ok(())
}

pub fn boundary(spec: &BoundarySpec, common: &Common, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    let (alpha, beta) = boundary_orders(spec, common, err)?;
    let lo = positive("x-min", spec.x_min)?;
    let hi = positive("x-max", spec.x_max)?;
    if hi <= lo || spec.samples < 2 {
        return Err(CliError::Input("need x-min < x-max and at least two samples".into()));
    }
    let curve = boundary_curve(alpha, beta, &log_grid(lo, hi, spec.samples))?;
    emit(&common.out, out, |w| write_boundary(w, &curve))
}

fn boundary_figure(name: &str, fig: &BoundaryFigure<f64>, dir: &Path, out: &mut dyn Write) -> CliResult<()> {
    let curve = dir.join(format!("{name}_boundary.csv"));
    write_to(&curve, |w| write_boundary(w, &fig.samples))?;
    let reference = dir.join(format!("{name}_reference.csv"));
    let slope = (fig.reference_angle * std::f64::consts::PI).tan();
    write_to(&reference, |w| {
        writeln!(w, "d,theta,angle")?;
        for s in &fig.samples {
            writeln!(w, "{:.16e},{:.16e},{:.16e}", s.d, s.d * slope, fig.reference_angle)?;
        }
        Ok(())
    })?;
    let min = fig.samples.iter().min_by(|a, b| a.angle.total_cmp(&b.angle)).expect("nonempty curve");
    let stdout = |e| CliError::Write { path: "<stdout>".into(), source: e };
    writeln!(out, "{}: {} samples, min angle {:.6} at d = {:.6}", curve.display(), fig.samples.len(), min.angle, min.d)
        .map_err(stdout)?;
    writeln!(out, "{}: reference angle {}", reference.display(), fig.reference_angle).map_err(stdout)
}

fn trajectory_figure(
    id: FigureId,
    figs: &[FigureTrajectory<f64>],
    cfg: &TrajectoryConfig<f64>,
    dir: &Path,
    out: &mut dyn Write,
) -> CliResult<()> {
    let stride = (FIGURE_OUTPUT_DT / cfg.h).round().max(1.0) as usize;
    for f in figs {
        let stem = format!("{}_{}", id.name(), f.label);
        let csv = dir.join(format!("{stem}.csv"));
        let decimated = f.trajectory.decimate(stride);
        write_to(&csv, |w| decimated.write_csv(w))?;
        let orders = [RationalOrder::approximate(f.alpha, 1000)?, RationalOrder::approximate(f.beta, 1000)?];
        SystemFile::from_system(&orders, &f.a, &f.y0, cfg.t_end, Some(cfg.h)).write(&dir.join(format!("{stem}.json")))?;
        let summary = match id {
            FigureId::Fig6 => format!("early gap {:.6}", early_gap(&f.trajectory, FIG6_GAP_WINDOW)),
            _ => {
                let decay = |i: usize| 100.0 * envelope_decay(&peak_to_peak(&f.trajectory.component(i)));
                format!("envelope decay y1 {:.2}%, y2 {:.2}%", decay(0), decay(1))
            }
        };
        writeln!(out, "{}: d = {}, theta = {:.9}, {summary}", csv.display(), f.d, f.theta)
            .map_err(|e| CliError::Write { path: "<stdout>".into(), source: e })?;
    }
    Ok(())
}

pub fn figure(
    id: FigureId,
    out_dir: Option<PathBuf>,
    common: &Common,
    out: &mut dyn Write,
    _err: &mut dyn Write,
) -> CliResult<()> {
    let dir = out_dir
        .or_else(|| common.out.clone())
        .ok_or_else(|| CliError::Input("figure needs an output directory".into()))?;
    fs::create_dir_all(&dir).map_err(io_error(&dir))?;
    let mut cfg = match id {
        FigureId::Fig6 => TrajectoryConfig::decay(),
        _ => TrajectoryConfig::oscillation(),
    };
    if let Some(dt) = common.dt {
        cfg.h = positive("dt", dt)?;
    }
    match id {
        FigureId::Fig2 => boundary_figure(id.name(), &fig2()?, &dir, out),
        FigureId::Fig3 => boundary_figure(id.name(), &fig3()?, &dir, out),
        FigureId::Fig4 => trajectory_figure(id, &fig4(cfg)?, &cfg, &dir, out),
        FigureId::Fig5 => trajectory_figure(id, &fig5(cfg)?, &cfg, &dir, out),
        FigureId::Fig6 => trajectory_figure(id, &fig6(cfg)?, &cfg, &dir, out),
    }
}
