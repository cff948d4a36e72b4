//! Closed-loop simulation under sampled control.
//!
//! The plant `ẋ = Ax + B(v + w(t))` is integrated with classical RK4 at a
//! fixed step `h` that divides the sampling period `τ`. The control is
//! recomputed from the exact state at `tᵢ = iτ` and held until `tᵢ₊₁`. Without
//! an actuator `v = u`; with a first-order lag `μ v̇ = -v + u` the actuator
//! state is integrated alongside the plant, starting at rest.

use std::io::{self, Write};

use crate::control::{ControllerSpec, SlidingController};
use crate::error::{Error, Result};
use crate::lti::LtiSystem;
use crate::scalar::Real;

/// `w(t) = amplitude · sin(frequency · t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Perturbation<T> {
    pub amplitude: T,
    pub frequency: T,
}

impl<T: Real> Perturbation<T> {
    pub fn none() -> Self {
        Self { amplitude: T::zero(), frequency: T::zero() }
    }

    pub fn sine(amplitude: T, frequency: T) -> Self {
        Self { amplitude, frequency }
    }

    pub fn at(&self, t: T) -> T {
        if self.amplitude.is_zero() {
            return T::zero();
        }
        self.amplitude * (self.frequency * t).sin()
    }
}

impl<T: Real> Default for Perturbation<T> {
    fn default() -> Self {
        Self::sine(T::lit(0.5), T::lit(10.0))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Actuator<T> {
    None,
    /// `μ v̇ = -v + u`.
    Lag { time_constant: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig<T> {
    /// Sampling period.
    pub tau: T,
    /// Integration step; must divide `tau` and be at most `tau / 10`.
    pub h: T,
    pub t_end: T,
    pub x0: Vec<T>,
    pub perturbation: Perturbation<T>,
    pub actuator: Actuator<T>,
    /// Fraction of the horizon discarded before measuring steady-state errors.
    pub transient_fraction: T,
}

impl<T: Real> SimConfig<T> {
    /// `h = τ/10`, ten-second horizon, `w = 0.5 sin 10t`, no actuator, half
    /// the horizon treated as transient.
    pub fn new(tau: T, x0: Vec<T>) -> Self {
        Self {
            tau,
            h: tau / T::lit(10.0),
            t_end: T::lit(10.0),
            x0,
            perturbation: Perturbation::default(),
            actuator: Actuator::None,
            transient_fraction: T::lit(0.5),
        }
    }

    pub fn with_h(mut self, h: T) -> Self {
        self.h = h;
        self
    }

    pub fn with_t_end(mut self, t_end: T) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_perturbation(mut self, p: Perturbation<T>) -> Self {
        self.perturbation = p;
        self
    }

    pub fn with_actuator(mut self, a: Actuator<T>) -> Self {
        self.actuator = a;
        self
    }

    pub fn with_transient_fraction(mut self, f: T) -> Self {
        self.transient_fraction = f;
        self
    }

    pub fn transient_start(&self) -> T {
        self.transient_fraction * self.t_end
    }

    /// Checks the invariants and returns the step schedule.
    pub fn schedule(&self, n: usize) -> Result<Schedule<T>> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let all_finite = [self.tau, self.h, self.t_end, self.transient_fraction]
            .iter()
            .chain(&self.x0)
            .all(|v| v.is_finite())
            && self.perturbation.amplitude.is_finite()
            && self.perturbation.frequency.is_finite();
        if !all_finite {
            return bad("non-finite value".into());
        }
        if !(self.tau > T::zero()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.h > T::zero()) || self.h > self.tau / T::lit(10.0) * T::lit(1.0 + 1e-12) {
            return bad(format!("h = {} must be positive and at most tau/10 = {}", self.h, self.tau / T::lit(10.0)));
        }
        let ratio = (self.tau / self.h).round();
        if ((ratio * self.h - self.tau) / self.tau).abs() > T::lit(1e-9) {
            return bad(format!("h = {} does not divide tau = {}", self.h, self.tau));
        }
        if self.t_end < T::lit(100.0) * self.tau * T::lit(1.0 - 1e-12) {
            return bad(format!("t_end = {} shorter than 100 sampling periods", self.t_end));
        }
        if !(self.transient_fraction > T::zero() && self.transient_fraction < T::lit(0.9)) {
            return bad(format!("transient_fraction {} outside (0, 0.9)", self.transient_fraction));
        }
        if self.x0.len() != n {
            return bad(format!("x0 has {} entries, state dimension is {n}", self.x0.len()));
        }
        let mut steps = ratio.to_usize().unwrap_or(0);
        if let Actuator::Lag { time_constant } = self.actuator {
            if !(time_constant > T::zero()) || !time_constant.is_finite() {
                return bad(format!("actuator time constant must be positive, got {time_constant}"));
            }
            // Resolve the lag with at least ten steps per time constant.
            let needed = (T::lit(10.0) * self.tau / time_constant).ceil().to_usize().unwrap_or(usize::MAX);
            steps = steps.max(needed);
        }
        let holds = (self.t_end / self.tau * T::lit(1.0 + 1e-12)).floor().to_usize().unwrap_or(0);
        Ok(Schedule { steps_per_hold: steps, holds, h: self.tau / T::from_usize(steps).expect("step count") })
    }
}

/// Integration grid derived from a [`SimConfig`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule<T> {
    pub steps_per_hold: usize,
    pub holds: usize,
    /// Effective step, `tau / steps_per_hold`.
    pub h: T,
}

/// State feedback evaluated at each sampling instant.
pub trait Feedback<T> {
    fn control(&self, x: &[T]) -> T;

    /// Recorded alongside the state; empty for plain state feedback.
    fn sigma_derivs(&self, x: &[T]) -> Vec<T>;
}

impl<T: Real> Feedback<T> for SlidingController<T> {
    fn control(&self, x: &[T]) -> T {
        SlidingController::control(self, x)
    }

    fn sigma_derivs(&self, x: &[T]) -> Vec<T> {
        SlidingController::sigma_derivs(self, x)
    }
}

/// `u = -K x`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFeedback<T> {
    pub gain: Vec<T>,
}

impl<T: Real> Feedback<T> for LinearFeedback<T> {
    fn control(&self, x: &[T]) -> T {
        -self.gain.iter().zip(x).fold(T::zero(), |acc, (k, v)| acc + *k * *v)
    }

    fn sigma_derivs(&self, _x: &[T]) -> Vec<T> {
        Vec::new()
    }
}

/// One record per sampling instant.
pub trait SampleObserver<T> {
    fn observe(&mut self, t: T, x: &[T], u: T, w: T, sigma_derivs: &[T]);
}

/// Closed-loop samples at every sampling instant, including `t = 0` and the end.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// Control computed at each instant and held over the following interval.
    pub controls: Vec<T>,
    pub perturbations: Vec<T>,
    pub sigma_derivs: Vec<Vec<T>>,
    /// Samples before this time are transient.
    pub transient_start: T,
}

impl<T: Real> Trajectory<T> {
    fn with_capacity(cap: usize, transient_start: T) -> Self {
        Self {
            times: Vec::with_capacity(cap),
            states: Vec::with_capacity(cap),
            controls: Vec::with_capacity(cap),
            perturbations: Vec::with_capacity(cap),
            sigma_derivs: Vec::with_capacity(cap),
            transient_start,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> Option<&[T]> {
        self.states.last().map(Vec::as_slice)
    }

    /// Writes `t,x1,…,xn,u,w,sigma0,…,sigma{r-1}` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let r = self.sigma_derivs.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.push("u".into());
        header.push("w".into());
        header.extend((0..r).map(|i| format!("sigma{i}")));
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.len() {
            let mut row = vec![self.times[k]];
            row.extend_from_slice(&self.states[k]);
            row.push(self.controls[k]);
            row.push(self.perturbations[k]);
            row.extend_from_slice(&self.sigma_derivs[k]);
            let cells: Vec<String> = row.iter().map(|v| format_full(v.as_f64())).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

impl<T: Real> SampleObserver<T> for Trajectory<T> {
    fn observe(&mut self, t: T, x: &[T], u: T, w: T, sigma_derivs: &[T]) {
        self.times.push(t);
        self.states.push(x.to_vec());
        self.controls.push(u);
        self.perturbations.push(w);
        self.sigma_derivs.push(sigma_derivs.to_vec());
    }
}

/// 17 significant digits, scientific notation.
pub fn format_full(v: f64) -> String {
    format!("{v:.16e}")
}

/// Running maxima of `|σ^(i)|` after the transient, without storing samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TailMaxima<T> {
    pub transient_start: T,
    pub maxima: Vec<T>,
    pub samples: usize,
}

impl<T: Real> TailMaxima<T> {
    pub fn new(transient_start: T, order: usize) -> Self {
        Self { transient_start, maxima: vec![T::zero(); order], samples: 0 }
    }
}

impl<T: Real> SampleObserver<T> for TailMaxima<T> {
    fn observe(&mut self, t: T, _x: &[T], _u: T, _w: T, sigma_derivs: &[T]) {
        if t < self.transient_start {
            return;
        }
        self.samples += 1;
        for (m, s) in self.maxima.iter_mut().zip(sigma_derivs) {
            *m = m.max(s.abs());
        }
    }
}

/// Simulates the sliding-mode loop for output `c` and returns every sample.
pub fn simulate<T: Real>(
    sys: &LtiSystem<T>,
    c: &[T],
    controller: &ControllerSpec<T>,
    config: &SimConfig<T>,
) -> Result<Trajectory<T>> {
    let ctl = SlidingController::new(sys, c, controller.clone())?;
    simulate_feedback(sys, &ctl, config)
}

/// Simulates an arbitrary sampled feedback and returns every sample.
pub fn simulate_feedback<T: Real, F: Feedback<T>>(
    sys: &LtiSystem<T>,
    feedback: &F,
    config: &SimConfig<T>,
) -> Result<Trajectory<T>> {
    let schedule = config.schedule(sys.dim())?;
    let mut traj = Trajectory::with_capacity(schedule.holds + 1, config.transient_start());
    run(sys, feedback, config, &schedule, &mut traj);
    Ok(traj)
}

/// Simulates while streaming samples into `observer`.
pub fn simulate_with<T: Real, F: Feedback<T>, O: SampleObserver<T>>(
    sys: &LtiSystem<T>,
    feedback: &F,
    config: &SimConfig<T>,
    observer: &mut O,
) -> Result<()> {
    let schedule = config.schedule(sys.dim())?;
    run(sys, feedback, config, &schedule, observer);
    Ok(())
}

fn run<T: Real, F: Feedback<T>, O: SampleObserver<T>>(
    sys: &LtiSystem<T>,
    feedback: &F,
    config: &SimConfig<T>,
    schedule: &Schedule<T>,
    observer: &mut O,
) {
    let n = sys.dim();
    let lag = match config.actuator {
        Actuator::Lag { time_constant } => Some(time_constant),
        Actuator::None => None,
    };
    let dim = n + usize::from(lag.is_some());
    let mut rk = Rk4::new(sys, config.perturbation, lag, dim);
    let mut z = config.x0.clone();
    if lag.is_some() {
        z.push(T::zero());
    }
    let h = schedule.h;
    let mut step_index = 0usize;
    for hold in 0..=schedule.holds {
        let t = T::from_usize(step_index).expect("step index") * h;
        let x = &z[..n];
        let u = feedback.control(x);
        let xi = feedback.sigma_derivs(x);
        observer.observe(t, x, u, config.perturbation.at(t), &xi);
        if hold == schedule.holds {
            break;
        }
        for _ in 0..schedule.steps_per_hold {
            let t = T::from_usize(step_index).expect("step index") * h;
            rk.step(&mut z, t, h, u);
            step_index += 1;
        }
    }
}

/// Integrates `steps` RK4 steps of size `h` from time `t0` with the input
/// held at `u`. `z` is the plant state, followed by the actuator state when
/// `actuator` is a lag.
#[allow(clippy::too_many_arguments)]
pub fn integrate_held<T: Real>(
    sys: &LtiSystem<T>,
    perturbation: Perturbation<T>,
    actuator: Actuator<T>,
    z: &mut [T],
    t0: T,
    h: T,
    steps: usize,
    u: T,
) -> Result<()> {
    let lag = match actuator {
        Actuator::Lag { time_constant } => Some(time_constant),
        Actuator::None => None,
    };
    let dim = sys.dim() + usize::from(lag.is_some());
    if z.len() != dim {
        return Err(Error::dim("integrate_held", format!("state has {} entries, expected {dim}", z.len())));
    }
    let mut rk = Rk4::new(sys, perturbation, lag, dim);
    for k in 0..steps {
        rk.step(z, t0 + T::from_usize(k).expect("step index") * h, h, u);
    }
    Ok(())
}

/// Allocation-free RK4 for the plant plus optional actuator state.
struct Rk4<'a, T> {
    sys: &'a LtiSystem<T>,
    perturbation: Perturbation<T>,
    lag: Option<T>,
    k: [Vec<T>; 4],
    tmp: Vec<T>,
}

impl<'a, T: Real> Rk4<'a, T> {
    fn new(sys: &'a LtiSystem<T>, perturbation: Perturbation<T>, lag: Option<T>, dim: usize) -> Self {
        let z = || vec![T::zero(); dim];
        Self { sys, perturbation, lag, k: [z(), z(), z(), z()], tmp: z() }
    }

    fn rhs(sys: &LtiSystem<T>, p: &Perturbation<T>, lag: Option<T>, t: T, z: &[T], u: T, out: &mut [T]) {
        let n = sys.dim();
        let a = sys.a().as_slice();
        let b = sys.b().as_slice();
        let applied = match lag {
            Some(_) => z[n],
            None => u,
        };
        let drive = applied + p.at(t);
        for i in 0..n {
            let row = &a[i * n..(i + 1) * n];
            let mut acc = b[i] * drive;
            for (aij, zj) in row.iter().zip(&z[..n]) {
                acc = acc + *aij * *zj;
            }
            out[i] = acc;
        }
        if let Some(mu) = lag {
            out[n] = (u - z[n]) / mu;
        }
    }

    fn step(&mut self, z: &mut [T], t: T, h: T, u: T) {
        let half = h / T::lit(2.0);
        let sixth = h / T::lit(6.0);
        let two = T::lit(2.0);
        let (sys, p, lag) = (self.sys, &self.perturbation, self.lag);
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;

        Self::rhs(sys, p, lag, t, z, u, k1);
        for i in 0..z.len() {
            tmp[i] = z[i] + half * k1[i];
        }
        Self::rhs(sys, p, lag, t + half, tmp, u, k2);
        for i in 0..z.len() {
            tmp[i] = z[i] + half * k2[i];
        }
        Self::rhs(sys, p, lag, t + half, tmp, u, k3);
        for i in 0..z.len() {
            tmp[i] = z[i] + h * k3[i];
        }
        Self::rhs(sys, p, lag, t + h, tmp, u, k4);
        for i in 0..z.len() {
            z[i] = z[i] + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
    }
}

/// `max |σ^(i)|` over samples at or after the transient cut.
pub fn steady_state_error<T: Real>(traj: &Trajectory<T>, i: usize) -> Result<T> {
    let order = traj.sigma_derivs.first().map_or(0, Vec::len);
    if i >= order {
        return Err(Error::InvalidArgument(format!("derivative order {i} not below relative degree {order}")));
    }
    traj.times
        .iter()
        .zip(&traj.sigma_derivs)
        .filter(|(t, _)| **t >= traj.transient_start)
        .map(|(_, xi)| xi[i].abs())
        .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))))
        .ok_or(Error::EmptyTail)
}
