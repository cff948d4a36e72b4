//! Scenario files: JSON schema, bundled examples and validation.

use std::path::Path;

use hosm::accuracy::{default_grid, SweepParameter, MIN_GRID_POINTS};
use hosm::control::{ControllerSpec, SlidingLaw, DEFAULT_GAIN, DEFAULT_TWISTING_GAINS};
use hosm::linalg::{poly_from_roots, Polynomial};
use hosm::lti::{relative_degree, LtiSystem};
use hosm::sim::{Actuator, Perturbation, SimConfig};
use num_complex::Complex;
use serde::Deserialize;

use crate::CliError;

pub const BUNDLED: [(&str, &str); 5] = [
    ("pendulum_r1", include_str!("../scenarios/pendulum_r1.json")),
    ("pendulum_r2", include_str!("../scenarios/pendulum_r2.json")),
    ("pendulum_r3", include_str!("../scenarios/pendulum_r3.json")),
    ("chain3_r1", include_str!("../scenarios/chain3_r1.json")),
    ("chain3_r2", include_str!("../scenarios/chain3_r2.json")),
];

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: Option<String>,
    pub system: SystemJson,
    pub design: DesignJson,
    pub controller: Option<ControllerJson>,
    pub simulation: Option<SimulationJson>,
    pub sweep: Option<SweepJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignJson {
    /// Ascending coefficients of the monic target polynomial.
    pub gamma: Option<Vec<f64>>,
    /// Desired sliding-mode eigenvalues.
    pub zeros: Option<Vec<ZeroJson>>,
    /// Explicit sliding variable, checked against the target by `verify`.
    pub c: Option<Vec<f64>>,
}

/// A real number or an `[re, im]` pair.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ZeroJson {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerJson {
    pub law: LawJson,
    pub order: Option<usize>,
    #[serde(default)]
    pub gains: GainsJson,
    #[serde(default)]
    pub drop_feedforward: bool,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawJson {
    Relay,
    Twisting,
    QuasiContinuous,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsJson {
    pub k0: Option<f64>,
    pub k1: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationJson {
    pub tau: f64,
    pub h: Option<f64>,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    pub x0: Vec<f64>,
    #[serde(default = "default_perturbation")]
    pub perturbation: PerturbationJson,
    #[serde(default)]
    pub actuator: ActuatorJson,
    #[serde(default = "default_transient")]
    pub transient_fraction: f64,
}

fn default_t_end() -> f64 {
    10.0
}

fn default_transient() -> f64 {
    0.5
}

fn default_perturbation() -> PerturbationJson {
    let p = Perturbation::<f64>::default();
    PerturbationJson { amplitude: p.amplitude, frequency: p.frequency }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationJson {
    pub amplitude: f64,
    pub frequency: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ActuatorJson {
    #[default]
    None,
    Lag {
        time_constant: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJson {
    pub parameter: ParameterJson,
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParameterJson {
    SamplingPeriod,
    ActuatorConstant,
}

/// How the target polynomial was given.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSource {
    Gamma,
    Zeros,
}

/// A scenario whose fields have all been checked against each other.
#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub system: LtiSystem<f64>,
    pub gamma: Polynomial<f64>,
    pub source: TargetSource,
    pub explicit_c: Option<Vec<f64>>,
    /// Relative degree implied by the design section.
    pub relative_degree: usize,
    pub controller: ControllerSpec<f64>,
    pub simulation: Option<SimConfig<f64>>,
    pub sweep: Option<(SweepParameter, Vec<f64>)>,
}

/// Reads a scenario from a path, or from the bundled set when no such file exists.
pub fn load(reference: &str) -> Result<Scenario, CliError> {
    let path = Path::new(reference);
    let (text, default_name) = if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::User(format!("cannot read {}: {e}", path.display())))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string();
        (text, stem)
    } else if let Some((name, text)) = BUNDLED.iter().find(|(name, _)| *name == reference) {
        (text.to_string(), name.to_string())
    } else {
        let names: Vec<&str> = BUNDLED.iter().map(|(n, _)| *n).collect();
        return Err(CliError::User(format!(
            "{reference}: no such file, and not a bundled scenario ({})",
            names.join(", ")
        )));
    };
    parse(&text, &default_name)
}

pub fn parse(text: &str, default_name: &str) -> Result<Scenario, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::User(format!("scenario field `{path}`: {}", e.inner()))
    })?;
    validate(file, default_name)
}

fn field(path: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::User(format!("scenario field `{path}`: {msg}"))
}

fn finite(path: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(field(&format!("{path}[{k}]"), "must be finite")),
        None => Ok(()),
    }
}

fn validate(file: ScenarioFile, default_name: &str) -> Result<Scenario, CliError> {
    let name = file.name.unwrap_or_else(|| default_name.to_string());

    let n = file.system.a.len();
    if n == 0 {
        return Err(field("system.a", "must have at least one row"));
    }
    for (i, row) in file.system.a.iter().enumerate() {
        if row.len() != n {
            return Err(field(&format!("system.a[{i}]"), format!("has {} entries, expected {n} (square matrix)", row.len())));
        }
        finite(&format!("system.a[{i}]"), row)?;
    }
    if file.system.b.len() != n {
        return Err(field("system.b", format!("has {} entries, expected {n}", file.system.b.len())));
    }
    finite("system.b", &file.system.b)?;
    let system = LtiSystem::from_rows(&file.system.a, &file.system.b).map_err(|e| field("system", e))?;

    let (gamma, source) = match (&file.design.gamma, &file.design.zeros) {
        (Some(_), Some(_)) => return Err(field("design", "give exactly one of `gamma` and `zeros`, not both")),
        (None, None) => return Err(field("design", "one of `gamma` or `zeros` is required")),
        (Some(coeffs), None) => {
            finite("design.gamma", coeffs)?;
            let p = Polynomial::new(coeffs.clone()).map_err(|e| field("design.gamma", e))?;
            if p.is_zero() {
                return Err(field("design.gamma", "polynomial is zero"));
            }
            if (p.leading() - 1.0).abs() > hosm::design::MONIC_TOLERANCE {
                return Err(field("design.gamma", format!("must be monic, leading coefficient is {}", p.leading())));
            }
            (p, TargetSource::Gamma)
        }
        (None, Some(zeros)) => {
            let roots: Vec<Complex<f64>> = zeros
                .iter()
                .map(|z| match z {
                    ZeroJson::Real(re) => Complex::new(*re, 0.0),
                    ZeroJson::Complex([re, im]) => Complex::new(*re, *im),
                })
                .collect();
            if let Some(k) = roots.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(field(&format!("design.zeros[{k}]"), "must be finite"));
            }
            let p = poly_from_roots(&roots).map_err(|e| field("design.zeros", e))?;
            (p, TargetSource::Zeros)
        }
    };
    let target_path = match source {
        TargetSource::Gamma => "design.gamma",
        TargetSource::Zeros => "design.zeros",
    };
    if gamma.degree() >= n {
        return Err(field(target_path, format!("degree {} too high for a {n}-state system (at most {})", gamma.degree(), n - 1)));
    }
    let implied_r = n - gamma.degree();

    let explicit_c = match file.design.c {
        Some(c) => {
            if c.len() != n {
                return Err(field("design.c", format!("has {} entries, expected {n}", c.len())));
            }
            finite("design.c", &c)?;
            Some(c)
        }
        None => None,
    };
    // The controller acts on the sliding variable actually used.
    let relative_degree = match &explicit_c {
        Some(c) => relative_degree(&system, c).map_err(|e| field("design.c", e))?,
        None => implied_r,
    };

    let controller = match file.controller {
        None => ControllerSpec::default_for_order(relative_degree).map_err(|e| {
            field("controller", format!("{e}; relative degree {relative_degree} needs an explicit controller"))
        })?,
        Some(cj) => {
            let order = cj.order.unwrap_or(relative_degree);
            if order != relative_degree {
                return Err(field(
                    "controller.order",
                    format!("{order} does not match relative degree {relative_degree} of the sliding variable"),
                ));
            }
            let (law, k0, k1) = match cj.law {
                LawJson::Relay => (SlidingLaw::Relay, cj.gains.k0.unwrap_or(DEFAULT_GAIN), None),
                LawJson::QuasiContinuous => (SlidingLaw::QuasiContinuous, cj.gains.k0.unwrap_or(DEFAULT_GAIN), None),
                LawJson::Twisting => (
                    SlidingLaw::Twisting,
                    cj.gains.k0.unwrap_or(DEFAULT_TWISTING_GAINS.0),
                    Some(cj.gains.k1.unwrap_or(DEFAULT_TWISTING_GAINS.1)),
                ),
            };
            if cj.gains.k1.is_some() && law != SlidingLaw::Twisting {
                return Err(field("controller.gains.k1", "only the twisting law takes a second gain"));
            }
            ControllerSpec::new(order, law, k0, k1, cj.drop_feedforward)
                .map_err(|e| field("controller", e))?
        }
    };

    let simulation = match file.simulation {
        None => None,
        Some(s) => {
            let mut cfg = SimConfig::new(s.tau, s.x0)
                .with_t_end(s.t_end)
                .with_perturbation(Perturbation::sine(s.perturbation.amplitude, s.perturbation.frequency))
                .with_transient_fraction(s.transient_fraction)
                .with_actuator(match s.actuator {
                    ActuatorJson::None => Actuator::None,
                    ActuatorJson::Lag { time_constant } => Actuator::Lag { time_constant },
                });
            if let Some(h) = s.h {
                cfg = cfg.with_h(h);
            }
            cfg.schedule(n).map_err(|e| field("simulation", e))?;
            Some(cfg)
        }
    };

    let sweep = match file.sweep {
        None => None,
        Some(sw) => {
            let parameter = match sw.parameter {
                ParameterJson::SamplingPeriod => SweepParameter::SamplingPeriod,
                ParameterJson::ActuatorConstant => SweepParameter::ActuatorConstant,
            };
            let grid = sw.grid.unwrap_or_else(default_grid);
            if grid.len() < MIN_GRID_POINTS {
                return Err(field("sweep.grid", format!("has {} values, need at least {MIN_GRID_POINTS}", grid.len())));
            }
            if let Some(k) = grid.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(field(&format!("sweep.grid[{k}]"), "must be positive and finite"));
            }
            let Some(base) = &simulation else {
                return Err(field("sweep", "needs a `simulation` section for the base configuration"));
            };
            for (k, v) in grid.iter().enumerate() {
                parameter
                    .apply(base, *v)
                    .schedule(n)
                    .map_err(|e| field(&format!("sweep.grid[{k}]"), e))?;
            }
            Some((parameter, grid))
        }
    };

    Ok(Scenario { name, system, gamma, source, explicit_c, relative_degree, controller, simulation, sweep })
}
