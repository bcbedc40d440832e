use std::io::Write;

use rayon::prelude::*;

use super::{ErrorSpectrum, PriorCovariance};
use crate::error::{invalid, Result};
use crate::graphkit::OperatedWeights;

/// Left end of every lambda grid; `lambda = 0` itself is a limit.
pub const LAMBDA_LO: f64 = 1e-3;
pub const DEFAULT_GRID_SIZE: usize = 400;
pub const DEFAULT_LAMBDA_TOL: f64 = 1e-6;
const ROOT_TOL: f64 = 1e-8;

/// Error and derivative expression sampled on a lambda grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCurve {
    lambdas: Vec<f64>,
    errors: Vec<f64>,
    derivatives: Vec<f64>,
    lambda_star: Option<f64>,
    critical_points: Vec<f64>,
}

impl ErrorCurve {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn errors(&self) -> &[f64] {
        &self.errors
    }

    pub fn derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    pub fn lambda_star(&self) -> Option<f64> {
        self.lambda_star
    }

    pub fn critical_points(&self) -> &[f64] {
        &self.critical_points
    }

    pub fn with_critical_points(mut self, points: Vec<f64>) -> Self {
        self.critical_points = points;
        self
    }

    /// Columns `lambda,error,derivative`.
    pub fn write_csv(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "lambda,error,derivative")?;
        for ((l, e), g) in self.lambdas.iter().zip(&self.errors).zip(&self.derivatives) {
            writeln!(out, "{l},{e},{g}")?;
        }
        Ok(())
    }
}

/// `size` evenly spaced points from `lo` to `hi` inclusive.
pub fn lambda_grid(lo: f64, hi: f64, size: usize) -> Vec<f64> {
    if size == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (size - 1) as f64;
    (0..size)
        .map(|k| {
            if k + 1 == size {
                hi
            } else {
                lo + k as f64 * step
            }
        })
        .collect()
}

pub fn error_curve(w: &OperatedWeights, cov: &PriorCovariance, grid: &[f64]) -> Result<ErrorCurve> {
    if grid.is_empty() || grid.windows(2).any(|p| p[1] <= p[0]) {
        return Err(invalid(
            "lambda grid must be nonempty and strictly increasing",
        ));
    }
    let sp = ErrorSpectrum::new(w, cov)?;
    let points: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&l| Ok((sp.error(l)?, sp.derivative(l)?)))
        .collect::<Result<_>>()?;
    let (errors, derivatives) = points.into_iter().unzip();
    Ok(ErrorCurve {
        lambdas: grid.to_vec(),
        errors,
        derivatives,
        lambda_star: None,
        critical_points: Vec::new(),
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
pub(crate) fn golden_section(
    f: impl Fn(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?))
}

/// Grid scan followed by golden-section refinement around the best point.
pub(crate) fn refine_minimum(
    f: impl Fn(f64) -> Result<f64>,
    grid: &[f64],
    values: &[f64],
    tol: f64,
) -> Result<(f64, f64)> {
    let k = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or_else(|| invalid("empty grid"))?;
    let a = grid[k.saturating_sub(1)];
    let b = grid[(k + 1).min(grid.len() - 1)];
    let (x, fx) = golden_section(f, a, b, tol)?;
    Ok(if fx <= values[k] {
        (x, fx)
    } else {
        (grid[k], values[k])
    })
}

/// Global minimizer of the error over `[1e-3, 1 - 1e-3]`.
pub fn optimize_lambda(
    w: &OperatedWeights,
    cov: &PriorCovariance,
    grid_size: usize,
    tol: f64,
) -> Result<(f64, ErrorCurve)> {
    if grid_size < 16 {
        return Err(invalid(format!(
            "grid needs at least 16 points, got {grid_size}"
        )));
    }
    if !(tol > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    let grid = lambda_grid(LAMBDA_LO, 1.0 - LAMBDA_LO, grid_size);
    let mut curve = error_curve(w, cov, &grid)?;
    let sp = ErrorSpectrum::new(w, cov)?;
    let (star, _) = refine_minimum(|l| sp.error(l), &grid, &curve.errors, tol)?;
    debug_assert!(star > 0.0 && star < 1.0);
    curve.lambda_star = Some(star);
    Ok((star, curve))
}

/// Roots of the derivative on `[1e-3, 1]`: sign changes on a uniform grid,
/// each refined by bisection.
pub fn critical_points(
    w: &OperatedWeights,
    cov: &PriorCovariance,
    grid_size: usize,
) -> Result<Vec<f64>> {
    if grid_size < 64 {
        return Err(invalid(format!(
            "grid needs at least 64 points, got {grid_size}"
        )));
    }
    let grid = lambda_grid(LAMBDA_LO, 1.0, grid_size);
    let sp = ErrorSpectrum::new(w, cov)?;
    let g = |l: f64| sp.derivative(l);
    let values: Vec<f64> = grid.par_iter().map(|&l| g(l)).collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for k in 0..grid.len() - 1 {
        let (ga, gb) = (values[k], values[k + 1]);
        if ga == 0.0 {
            roots.push(grid[k]);
            continue;
        }
        if ga.signum() == gb.signum() || gb == 0.0 && k + 2 < grid.len() {
            continue;
        }
        let (mut a, mut b) = (grid[k], grid[k + 1]);
        while b - a > ROOT_TOL {
            let mid = 0.5 * (a + b);
            let gm = g(mid)?;
            if gm == 0.0 {
                a = mid;
                b = mid;
            } else if gm.signum() == ga.signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        roots.push(0.5 * (a + b));
    }
    Ok(roots)
}
