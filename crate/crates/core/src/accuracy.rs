//! Accuracy-order estimation from parameter sweeps.
//!
//! Each grid value yields the steady-state errors `max |σ^(i)|`; the order is
//! the slope of `ln error` against `ln parameter`.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::control::{ControllerSpec, SlidingController};
use crate::error::{Error, Result};
use crate::lti::LtiSystem;
use crate::scalar::Real;
use crate::sim::{simulate_with, Actuator, SimConfig, TailMaxima};

/// Stand-in for an exactly zero error before taking logarithms.
pub const ERROR_FLOOR: f64 = 1e-300;

/// Minimum grid size for a fit with a meaningful residual.
pub const MIN_GRID_POINTS: usize = 3;

/// Sampling period used in actuator sweeps, as a fraction of the time constant.
pub const ACTUATOR_SAMPLING_RATIO: f64 = 10.0;

/// `τ, μ ∈ {1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2}`.
pub fn default_grid<T: Real>() -> Vec<T> {
    [1e-4, 2e-4, 5e-4, 1e-3, 2e-3, 5e-3, 1e-2].iter().map(|v| T::lit(*v)).collect()
}

/// `count` points evenly spaced in `ln` between `lo` and `hi` inclusive.
pub fn log_spaced<T: Real>(lo: T, hi: T, count: usize) -> Result<Vec<T>> {
    if !(lo > T::zero() && hi > lo && hi.is_finite()) || count < 2 {
        return Err(Error::InvalidGrid(format!("need 0 < lo < hi and at least 2 points, got [{lo}, {hi}] x {count}")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let last = T::from_usize(count - 1).expect("count");
    Ok((0..count)
        .map(|k| {
            if k == 0 {
                lo
            } else if k == count - 1 {
                hi
            } else {
                (a + (b - a) * T::from_usize(k).expect("index") / last).exp()
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit<T> {
    pub slope: T,
    pub intercept: T,
    /// RMS deviation of the data from the line.
    pub residual: T,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn least_squares_line<T: Real>(xs: &[T], ys: &[T]) -> Result<LineFit<T>> {
    if xs.len() != ys.len() {
        return Err(Error::dim("least_squares_line", format!("{} xs vs {} ys", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::DegenerateFit(format!("{} points", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least_squares_line"));
    }
    let count = T::from_usize(xs.len()).expect("length");
    let xm = xs.iter().fold(T::zero(), |a, v| a + *v) / count;
    let ym = ys.iter().fold(T::zero(), |a, v| a + *v) / count;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (x, y) in xs.iter().zip(ys) {
        sxx = sxx + (*x - xm) * (*x - xm);
        sxy = sxy + (*x - xm) * (*y - ym);
    }
    if sxx.is_zero() {
        return Err(Error::DegenerateFit("all abscissae equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let sse = xs.iter().zip(ys).fold(T::zero(), |a, (x, y)| {
        let d = *y - (slope * *x + intercept);
        a + d * d
    });
    Ok(LineFit { slope, intercept, residual: (sse / count).sqrt() })
}

/// Log-log fit of one derivative order across the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct AccuracyFit<T> {
    pub derivative_order: usize,
    /// Estimated accuracy order.
    pub slope: T,
    /// Estimated `ln μᵢ`.
    pub intercept: T,
    pub residual: T,
    /// `(parameter, error)` pairs, ascending in the parameter.
    pub points: Vec<(T, T)>,
    /// Points whose error was exactly zero and was replaced by [`ERROR_FLOOR`].
    pub clamped: Vec<bool>,
}

impl<T: Real> AccuracyFit<T> {
    pub fn any_clamped(&self) -> bool {
        self.clamped.iter().any(|c| *c)
    }

    /// `μ = error / parameter^exponent` at the smallest parameter.
    pub fn constant_at_smallest(&self, exponent: T) -> T {
        let (p, e) = self.points[0];
        e / p.powf(exponent)
    }

    /// Parameters at which `error > μ·parameter^exponent`, with `μ` from
    /// [`Self::constant_at_smallest`] inflated by `slack`.
    pub fn bound_violations(&self, exponent: T, slack: T) -> Vec<T> {
        let mu = self.constant_at_smallest(exponent) * slack;
        self.points.iter().filter(|(p, e)| *e > mu * p.powf(exponent)).map(|(p, _)| *p).collect()
    }
}

/// Fits one line per derivative order. `errors[k][i]` belongs to `grid[k]`.
pub fn fit_errors<T: Real>(grid: &[T], errors: &[Vec<T>]) -> Result<Vec<AccuracyFit<T>>> {
    if grid.len() != errors.len() {
        return Err(Error::dim("fit_errors", format!("{} grid values vs {} error rows", grid.len(), errors.len())));
    }
    let order = errors.first().map_or(0, Vec::len);
    if errors.iter().any(|row| row.len() != order) {
        return Err(Error::dim("fit_errors", "ragged error rows"));
    }
    let mut idx: Vec<usize> = (0..grid.len()).collect();
    idx.sort_by(|a, b| grid[*a].partial_cmp(&grid[*b]).expect("finite grid"));
    let xs: Vec<T> = idx.iter().map(|k| grid[*k].ln()).collect();
    let floor = T::lit(ERROR_FLOOR);
    (0..order)
        .map(|i| {
            let mut points = Vec::with_capacity(idx.len());
            let mut clamped = Vec::with_capacity(idx.len());
            let mut ys = Vec::with_capacity(idx.len());
            for k in &idx {
                let e = errors[*k][i];
                let zero = !(e > T::zero());
                clamped.push(zero);
                points.push((grid[*k], e));
                ys.push(if zero { floor } else { e }.ln());
            }
            let line = least_squares_line(&xs, &ys)?;
            Ok(AccuracyFit {
                derivative_order: i,
                slope: line.slope,
                intercept: line.intercept,
                residual: line.residual,
                points,
                clamped,
            })
        })
        .collect()
}

fn check_grid<T: Real>(grid: &[T]) -> Result<Vec<T>> {
    if grid.len() < MIN_GRID_POINTS {
        return Err(Error::InvalidGrid(format!("{} points, need at least {MIN_GRID_POINTS}", grid.len())));
    }
    if let Some(v) = grid.iter().find(|v| !(**v > T::zero()) || !v.is_finite()) {
        return Err(Error::InvalidGrid(format!("grid value {v} is not positive and finite")));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidGrid("duplicate grid values".into()));
    }
    Ok(sorted)
}

/// Evaluates `measure` at every grid value in parallel and fits the results.
/// Failures are wrapped in [`Error::Sweep`] with the offending value.
pub fn sweep_with<T, F>(grid: &[T], measure: F) -> Result<Vec<AccuracyFit<T>>>
where
    T: Real + Send + Sync,
    F: Fn(T) -> Result<Vec<T>> + Sync,
{
    let sorted = check_grid(grid)?;
    let errors = sorted
        .par_iter()
        .map(|v| measure(*v).map_err(|e| Error::Sweep { value: v.as_f64(), source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    fit_errors(&sorted, &errors)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    /// Vary `τ`; the integration step keeps its ratio to `τ`.
    SamplingPeriod,
    /// Vary the actuator lag `μ` with `τ = μ / ACTUATOR_SAMPLING_RATIO`.
    ActuatorConstant,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::SamplingPeriod => "sampling_period",
            Self::ActuatorConstant => "actuator_constant",
        }
    }

    /// `base` with the swept value substituted.
    pub fn apply<T: Real>(self, base: &SimConfig<T>, value: T) -> SimConfig<T> {
        let ratio = base.h / base.tau;
        let mut cfg = base.clone();
        match self {
            Self::SamplingPeriod => cfg.tau = value,
            Self::ActuatorConstant => {
                cfg.tau = value / T::lit(ACTUATOR_SAMPLING_RATIO);
                cfg.actuator = Actuator::Lag { time_constant: value };
            }
        }
        cfg.h = cfg.tau * ratio;
        cfg
    }
}

impl std::fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Runs the closed loop at each grid value and fits the steady-state errors
/// of `σ, σ̇, …, σ^(r-1)`.
pub fn sweep_and_fit<T: Real + Send + Sync>(
    sys: &LtiSystem<T>,
    c: &[T],
    controller: &ControllerSpec<T>,
    base: &SimConfig<T>,
    parameter: SweepParameter,
    grid: &[T],
) -> Result<Vec<AccuracyFit<T>>> {
    let ctl = SlidingController::new(sys, c, controller.clone())?;
    let order = ctl.order();
    sweep_with(grid, |v| {
        let cfg = parameter.apply(base, v);
        let mut tail = TailMaxima::new(cfg.transient_start(), order);
        simulate_with(sys, &ctl, &cfg, &mut tail)?;
        if tail.samples == 0 {
            return Err(Error::EmptyTail);
        }
        Ok(tail.maxima)
    })
}

/// `parameter,error_i0,…` rows, a blank line, then `i,slope,intercept,residual`.
pub fn write_fits_csv<T: Real, W: Write>(fits: &[AccuracyFit<T>], mut out: W) -> io::Result<()> {
    let cols: Vec<String> = fits.iter().map(|f| format!("error_i{}", f.derivative_order)).collect();
    writeln!(out, "parameter,{}", cols.join(","))?;
    let rows = fits.first().map_or(0, |f| f.points.len());
    for k in 0..rows {
        let mut cells = vec![crate::sim::format_full(fits[0].points[k].0.as_f64())];
        cells.extend(fits.iter().map(|f| crate::sim::format_full(f.points[k].1.as_f64())));
        writeln!(out, "{}", cells.join(","))?;
    }
    writeln!(out)?;
    writeln!(out, "i,slope,intercept,residual")?;
    for f in fits {
        writeln!(
            out,
            "{},{},{},{}",
            f.derivative_order,
            crate::sim::format_full(f.slope.as_f64()),
            crate::sim::format_full(f.intercept.as_f64()),
            crate::sim::format_full(f.residual.as_f64())
        )?;
    }
    Ok(())
}
