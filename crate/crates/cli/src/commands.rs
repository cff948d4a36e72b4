//! The four subcommands. Each returns the text report printed on stdout.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use hosm::accuracy::{default_grid, sweep_and_fit, sweep_with, write_fits_csv, AccuracyFit, SweepParameter};
use hosm::control::SlidingLaw;
use hosm::design::{design_sliding_variable, verify_design, VERIFY_TOLERANCE};
use hosm::linalg::{format_sig, Polynomial};
use hosm::sim::{simulate, steady_state_error};
use num_complex::Complex;

use crate::scenario::{Scenario, TargetSource};
use crate::CliError;

pub struct Output {
    pub digits: usize,
    pub dir: PathBuf,
}

impl Output {
    fn num(&self, v: f64) -> String {
        format_sig(v, self.digits)
    }

    fn vector(&self, v: &[f64]) -> String {
        let cells: Vec<String> = v.iter().map(|x| self.num(*x)).collect();
        format!("[{}]", cells.join(", "))
    }

    fn poly(&self, p: &Polynomial<f64>) -> String {
        p.render("s", self.digits)
    }

    fn complex(&self, z: &Complex<f64>) -> String {
        if z.im == 0.0 {
            self.num(z.re)
        } else {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("{} {sign} {}i", self.num(z.re), self.num(z.im.abs()))
        }
    }

    fn zeros(&self, zs: &[Complex<f64>]) -> String {
        let cells: Vec<String> = zs.iter().map(|z| self.complex(z)).collect();
        cells.join(", ")
    }

    fn create(&self, file_name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| CliError::User(format!("cannot create output directory {}: {e}", self.dir.display())))?;
        let path = self.dir.join(file_name);
        let file = File::create(&path).map_err(|e| CliError::User(format!("cannot write {}: {e}", path.display())))?;
        Ok((path, BufWriter::new(file)))
    }
}

fn io_error(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::User(format!("cannot write {}: {e}", path.display()))
}

/// The sliding variable used by `verify` and `simulate`: the explicit row if given, else the design.
fn sliding_variable(s: &Scenario) -> Result<(Vec<f64>, &'static str), CliError> {
    match &s.explicit_c {
        Some(c) => Ok((c.clone(), "explicit design.c")),
        None => Ok((design_sliding_variable(&s.system, &s.gamma)?.c, "designed from target")),
    }
}

fn controller_line(s: &Scenario, out: &Output) -> String {
    let spec = &s.controller;
    let mut line = format!("{} (order {}), k0 = {}", spec.law(), spec.order(), out.num(spec.k0()));
    if let (SlidingLaw::Twisting, Some(k1)) = (spec.law(), spec.k1()) {
        let _ = write!(line, ", k1 = {}", out.num(k1));
    }
    if spec.drop_feedforward() {
        line.push_str(", feedforward dropped");
    }
    line
}

pub fn design(s: &Scenario, out: &Output) -> Result<String, CliError> {
    let d = design_sliding_variable(&s.system, &s.gamma)?;
    let zeros = d.zeros()?;
    let mut r = String::new();
    let _ = writeln!(r, "scenario: {}", s.name);
    let source = match s.source {
        TargetSource::Gamma => "design.gamma",
        TargetSource::Zeros => "design.zeros",
    };
    let _ = writeln!(r, "gamma: {} (from {source})", out.poly(&d.gamma));
    let _ = writeln!(r, "C: {}", out.vector(&d.c));
    let _ = writeln!(r, "relative degree: {} (target {})", d.realized_r, d.target_r);
    if zeros.is_empty() {
        let _ = writeln!(r, "sliding-mode eigenvalues: none (relative degree equals state dimension)");
    } else {
        let _ = writeln!(r, "sliding-mode eigenvalues: {}", out.zeros(&zeros));
    }
    let _ = writeln!(r, "numerator mismatch: {}", format_sig(d.mismatch, 3));
    let _ = writeln!(r, "controllability condition (1-norm): {}", format_sig(d.controllability_condition, 6));
    if s.explicit_c.is_some() {
        let _ = writeln!(r, "note: design.c is ignored here; run `verify` to check it");
    }
    Ok(r)
}

pub fn verify(s: &Scenario, out: &Output) -> Result<String, CliError> {
    let (c, source) = sliding_variable(s)?;
    let rep = verify_design(&s.system, &c, &s.gamma)?;
    let n = s.system.dim();
    let mut r = String::new();
    let _ = writeln!(r, "scenario: {}", s.name);
    let _ = writeln!(r, "C: {} ({source})", out.vector(&c));
    let _ = writeln!(r, "g(s) = ({}) / ({})", out.poly(&rep.numerator), out.poly(&rep.denominator));
    match rep.relative_degree {
        Some(rd) => {
            let _ = writeln!(r, "relative degree: {rd}");
            if rd == n {
                let _ = writeln!(r, "zeros: none (no sliding dynamics)");
            } else {
                let _ = writeln!(r, "zeros: {}", out.zeros(&rep.zeros));
            }
        }
        None => {
            let _ = writeln!(r, "relative degree: none (output does not see the input)");
        }
    }
    if rep.minimum_phase {
        let _ = writeln!(r, "minimum phase: yes");
    } else {
        let detail = rep.max_real_part.map(|m| format!(" (max Re = {})", out.num(m))).unwrap_or_default();
        let _ = writeln!(r, "minimum phase: NOT minimum phase{detail}");
    }
    let verdict = if rep.mismatch <= VERIFY_TOLERANCE { "matches" } else { "does NOT match" };
    let _ = writeln!(r, "gamma: {}", out.poly(&s.gamma));
    let _ = writeln!(
        r,
        "numerator {verdict} gamma: relative mismatch {} (tolerance {})",
        format_sig(rep.mismatch, 3),
        format_sig(VERIFY_TOLERANCE, 3)
    );
    Ok(r)
}

pub fn simulate_cmd(s: &Scenario, out: &Output) -> Result<String, CliError> {
    let cfg = s
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::User("scenario field `simulation`: required by `simulate`".into()))?;
    let (c, source) = sliding_variable(s)?;
    let traj = simulate(&s.system, &c, &s.controller, cfg)?;

    let (path, mut w) = out.create(&format!("{}_trajectory.csv", s.name))?;
    traj.write_csv(&mut w).map_err(io_error(&path))?;
    std::io::Write::flush(&mut w).map_err(io_error(&path))?;

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let xf = traj.final_state().unwrap_or(&[]);
    let mut r = String::new();
    let _ = writeln!(r, "scenario: {}", s.name);
    let _ = writeln!(r, "C: {} ({source})", out.vector(&c));
    let _ = writeln!(r, "relative degree: {}", s.relative_degree);
    let _ = writeln!(r, "controller: {}", controller_line(s, out));
    let _ = writeln!(
        r,
        "tau = {}, h = {}, t_end = {}, samples = {}",
        out.num(cfg.tau),
        out.num(cfg.h),
        out.num(cfg.t_end),
        traj.len()
    );
    let _ = writeln!(r, "final state: {}", out.vector(xf));
    let x0 = norm(&cfg.x0);
    if x0 > 0.0 {
        let _ = writeln!(r, "|x(t_end)| / |x0|: {}", format_sig(norm(xf) / x0, 6));
    } else {
        let _ = writeln!(r, "|x(t_end)|: {}", format_sig(norm(xf), 6));
    }
    let _ = writeln!(r, "steady-state errors (t >= {}):", out.num(cfg.transient_start()));
    for i in 0..s.controller.order() {
        let e = steady_state_error(&traj, i)?;
        let _ = writeln!(r, "  max |sigma^({i})| = {}", format_sig(e, 6));
    }
    let _ = writeln!(r, "trajectory: {}", path.display());
    write_report(out, &format!("{}_simulate.txt", s.name), &r)?;
    Ok(r)
}

fn write_report(out: &Output, file_name: &str, text: &str) -> Result<(), CliError> {
    let (path, mut w) = out.create(file_name)?;
    std::io::Write::write_all(&mut w, text.as_bytes()).map_err(io_error(&path))?;
    std::io::Write::flush(&mut w).map_err(io_error(&path))
}

fn fit_table(r: &mut String, fits: &[AccuracyFit<f64>], order: Option<usize>, out: &Output) {
    let _ = writeln!(r, "i,slope,intercept,residual{}", if order.is_some() { ",expected" } else { "" });
    for f in fits {
        let _ = write!(r, "{},{},{},{}", f.derivative_order, out.num(f.slope), out.num(f.intercept), out.num(f.residual));
        if let Some(rd) = order {
            let _ = write!(r, ",{}", rd - f.derivative_order);
        }
        r.push('\n');
        if f.any_clamped() {
            let _ = writeln!(r, "  note: zero errors at some grid values were clamped to 1e-300 for derivative {}", f.derivative_order);
        }
    }
}

pub fn sweep(s: &Scenario, out: &Output) -> Result<String, CliError> {
    let base = s
        .simulation
        .as_ref()
        .ok_or_else(|| CliError::User("scenario field `simulation`: required by `sweep`".into()))?;
    let (parameter, grid) = s.sweep.clone().unwrap_or((SweepParameter::SamplingPeriod, default_grid()));
    let (c, source) = sliding_variable(s)?;
    let fits = sweep_and_fit(&s.system, &c, &s.controller, base, parameter, &grid)?;

    let (path, mut w) = out.create(&format!("{}_sweep.csv", s.name))?;
    write_fits_csv(&fits, &mut w).map_err(io_error(&path))?;
    std::io::Write::flush(&mut w).map_err(io_error(&path))?;

    let mut r = String::new();
    let _ = writeln!(r, "scenario: {}", s.name);
    let _ = writeln!(r, "C: {} ({source})", out.vector(&c));
    let _ = writeln!(r, "relative degree: {}", s.relative_degree);
    let _ = writeln!(r, "controller: {}", controller_line(s, out));
    let _ = writeln!(r, "sweep: {parameter} over {}", out.vector(&grid));
    fit_table(&mut r, &fits, Some(s.controller.order()), out);
    let _ = writeln!(r, "sweep data: {}", path.display());
    write_report(out, &format!("{}_sweep.txt", s.name), &r)?;
    Ok(r)
}

/// Fits `error = 3·p²` on the scenario grid (or the default grid); the slope must be 2.
pub fn self_test(s: Option<&Scenario>, out: &Output) -> Result<String, CliError> {
    let grid = s.and_then(|s| s.sweep.as_ref()).map(|(_, g)| g.clone()).unwrap_or_else(default_grid);
    let fits = sweep_with(&grid, |p: f64| Ok(vec![3.0 * p * p]))?;
    let name = s.map_or("self_test", |s| s.name.as_str());
    let (path, mut w) = out.create(&format!("{name}_self_test.csv"))?;
    write_fits_csv(&fits, &mut w).map_err(io_error(&path))?;
    std::io::Write::flush(&mut w).map_err(io_error(&path))?;

    let fit = &fits[0];
    let mut r = String::new();
    let _ = writeln!(r, "self-test: synthetic error 3 p^2 over {}", out.vector(&grid));
    fit_table(&mut r, &fits, None, out);
    let _ = writeln!(r, "slope {:.3} (expected 2.000)", fit.slope);
    if (fit.slope - 2.0).abs() > 1e-9 || fit.residual > 1e-9 {
        return Err(CliError::Numerical(format!("self-test failed:\n{r}")));
    }
    let _ = writeln!(r, "self-test passed");
    Ok(r)
}
