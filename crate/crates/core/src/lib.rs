//! Higher-order sliding-mode design for single-input LTI systems.
//!
//! The pipeline runs from a plant `ẋ = Ax + Bu` to a sliding variable
//! `σ = Cx` whose relative degree and sliding-mode eigenvalues are prescribed
//! by a monic polynomial `γ`, then to a sampled sliding-mode controller, a
//! closed-loop simulation, and a log-log estimate of the realized accuracy
//! order.
//!
//! Everything numerical is generic over [`Scalar`]. Linear algebra, the
//! design formula and relative-degree checks also run in exact rational
//! arithmetic; root finding, controllers and simulation need [`Real`]
//! (`f32` or `f64`).
//!
//! ```
//! use hosm::{plants, Polynomial64};
//! use hosm::design::design_sliding_variable;
//!
//! let sys = plants::integrator_chain::<f64>(3);
//! let gamma = Polynomial64::new(vec![1.0, 2.0, 1.0]).unwrap();
//! let design = design_sliding_variable(&sys, &gamma).unwrap();
//! assert_eq!(design.c, vec![1.0, 2.0, 1.0]);
//! assert_eq!(design.realized_r, 1);
//! ```

// `!(x > 0)` is used on purpose so NaN lands on the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accuracy;
pub mod control;
pub mod design;
pub mod error;
pub mod linalg;
pub mod lti;
pub mod plants;
pub mod scalar;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

pub use num_rational::BigRational;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Polynomial64 = linalg::Polynomial<f64>;
pub type System64 = lti::LtiSystem<f64>;
pub type Design64 = design::SlidingDesign<f64>;
pub type Controller64 = control::ControllerSpec<f64>;
pub type SimConfig64 = sim::SimConfig<f64>;
pub type Trajectory64 = sim::Trajectory<f64>;
pub type AccuracyFit64 = accuracy::AccuracyFit<f64>;

pub type Matrix32 = linalg::Matrix<f32>;
pub type Polynomial32 = linalg::Polynomial<f32>;
pub type System32 = lti::LtiSystem<f32>;
pub type Controller32 = control::ControllerSpec<f32>;
pub type SimConfig32 = sim::SimConfig<f32>;

pub type ExactMatrix = linalg::Matrix<BigRational>;
pub type ExactPolynomial = linalg::Polynomial<BigRational>;
pub type ExactSystem = lti::LtiSystem<BigRational>;
pub type ExactDesign = design::SlidingDesign<BigRational>;
