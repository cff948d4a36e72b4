//! Sliding-mode feedback laws of orders one to three.
//!
//! Every law has the form `u = -(C A^r x + f(ξ)) / (C A^(r-1) B)` where
//! `ξ = (σ, σ̇, …, σ^(r-1)) = (Cx, CAx, …, CA^(r-1)x)` is read exactly from the
//! state, and `f` is a relay, twisting or quasi-continuous term.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::lti::{relative_degree, LtiSystem};
use crate::scalar::Real;

/// Gain used by the relay and quasi-continuous laws unless overridden.
pub const DEFAULT_GAIN: f64 = 10.0;

/// Twisting gains `(k₀, k₁)`; satisfy `k₁ > |w|`, `k₀ > k₁ + |w|` for `|w| ≤ 1`.
pub const DEFAULT_TWISTING_GAINS: (f64, f64) = (5.0, 2.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlidingLaw {
    Relay,
    Twisting,
    QuasiContinuous,
}

impl fmt::Display for SlidingLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlidingLaw::Relay => "relay",
            SlidingLaw::Twisting => "twisting",
            SlidingLaw::QuasiContinuous => "quasi_continuous",
        })
    }
}

/// Which law closes the loop, with its gains.
#[derive(Clone, Debug, PartialEq)]
pub struct ControllerSpec<T> {
    order: usize,
    law: SlidingLaw,
    k0: T,
    k1: Option<T>,
    drop_feedforward: bool,
}

impl<T: Real> ControllerSpec<T> {
    /// `k1` is required for the twisting law and rejected otherwise.
    pub fn new(order: usize, law: SlidingLaw, k0: T, k1: Option<T>, drop_feedforward: bool) -> Result<Self> {
        let ok_order = match law {
            SlidingLaw::Relay => order == 1,
            SlidingLaw::Twisting => order == 2,
            SlidingLaw::QuasiContinuous => order == 2 || order == 3,
        };
        if !ok_order {
            return Err(Error::InvalidController(format!("{law} law cannot have order {order}")));
        }
        if !(k0 > T::zero()) || !k0.is_finite() {
            return Err(Error::InvalidController(format!("k0 must be positive, got {k0}")));
        }
        match (law, k1) {
            (SlidingLaw::Twisting, Some(k1)) => {
                if !(k1 > T::zero()) || !(k0 > k1) {
                    return Err(Error::InvalidController(format!("twisting needs k0 > k1 > 0, got k0 = {k0}, k1 = {k1}")));
                }
            }
            (SlidingLaw::Twisting, None) => {
                return Err(Error::InvalidController("twisting law needs k1".into()));
            }
            (_, Some(_)) => {
                return Err(Error::InvalidController(format!("{law} law takes a single gain")));
            }
            (_, None) => {}
        }
        Ok(Self { order, law, k0, k1, drop_feedforward })
    }

    pub fn relay(k0: T) -> Result<Self> {
        Self::new(1, SlidingLaw::Relay, k0, None, false)
    }

    pub fn twisting(k0: T, k1: T) -> Result<Self> {
        Self::new(2, SlidingLaw::Twisting, k0, Some(k1), false)
    }

    pub fn quasi_continuous(order: usize, k0: T) -> Result<Self> {
        Self::new(order, SlidingLaw::QuasiContinuous, k0, None, false)
    }

    /// Relay for `r = 1`, quasi-continuous for `r = 2, 3`, all with gain 10.
    pub fn default_for_order(order: usize) -> Result<Self> {
        let k0 = T::lit(DEFAULT_GAIN);
        match order {
            1 => Self::relay(k0),
            2 | 3 => Self::quasi_continuous(order, k0),
            _ => Err(Error::InvalidController(format!("no controller of order {order}"))),
        }
    }

    /// Omit `C A^r x`, leaving it to be rejected as part of the perturbation.
    pub fn with_drop_feedforward(mut self, drop: bool) -> Self {
        self.drop_feedforward = drop;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn law(&self) -> SlidingLaw {
        self.law
    }

    pub fn k0(&self) -> T {
        self.k0
    }

    pub fn k1(&self) -> Option<T> {
        self.k1
    }

    pub fn drop_feedforward(&self) -> bool {
        self.drop_feedforward
    }

    /// `f(ξ)`, the law's nonlinear term including its gains.
    pub fn nonlinear_term(&self, xi: &[T]) -> T {
        debug_assert_eq!(xi.len(), self.order);
        match (self.law, self.order) {
            (SlidingLaw::Relay, _) => self.k0 * sign(xi[0]),
            (SlidingLaw::Twisting, _) => {
                self.k0 * sign(xi[0]) + self.k1.unwrap_or_else(T::zero) * sign(xi[1])
            }
            (SlidingLaw::QuasiContinuous, 2) => self.k0 * quasi_continuous_2(xi[0], xi[1]),
            (SlidingLaw::QuasiContinuous, _) => self.k0 * quasi_continuous_3(xi[0], xi[1], xi[2]),
        }
    }
}

/// Signum with `sign(0) = 0`.
pub fn sign<T: Real>(v: T) -> T {
    if v > T::zero() {
        T::one()
    } else if v < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// `(σ̇ + |σ|^½ sign σ) / (|σ̇| + |σ|^½)`, zero at the origin. Bounded by one.
pub fn quasi_continuous_2<T: Real>(s: T, ds: T) -> T {
    let root = s.abs().sqrt();
    let den = ds.abs() + root;
    if den.is_zero() {
        return T::zero();
    }
    clamp_unit((ds + root * sign(s)) / den)
}

/// The quasi-continuous ratios are bounded by one; this removes rounding overshoot.
fn clamp_unit<T: Real>(v: T) -> T {
    v.max(-T::one()).min(T::one())
}

/// Order-three quasi-continuous ratio, zero at the origin. Bounded by one.
///
/// With `m = |σ̇| + |σ|^⅔`, the numerator is `σ̈ + 2 (σ̇ + |σ|^⅔ sign σ) / √m`
/// and the denominator `|σ̈| + 2 √m`. Since `|σ̇ + |σ|^⅔ sign σ| ≤ m`, the
/// quotient by `√m` is taken as zero when `m = 0`.
pub fn quasi_continuous_3<T: Real>(s: T, ds: T, dds: T) -> T {
    let s23 = s.abs().powf(T::lit(2.0 / 3.0));
    let m = ds.abs() + s23;
    let root_m = m.sqrt();
    let two = T::lit(2.0);
    let inner = if m.is_zero() { T::zero() } else { (ds + s23 * sign(s)) / root_m };
    let den = dds.abs() + two * root_m;
    if den.is_zero() {
        return T::zero();
    }
    clamp_unit((dds + two * inner) / den)
}

/// `ξ = (σ, σ̇, …, σ^(r-1))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlidingCoordinates<T> {
    pub sigma_derivs: Vec<T>,
}

/// A controller bound to a plant and sliding variable.
#[derive(Clone, Debug)]
pub struct SlidingController<T> {
    spec: ControllerSpec<T>,
    /// `C, CA, …, CA^(r-1)`.
    rows: Vec<Vec<T>>,
    /// `C A^r`.
    feedforward: Vec<T>,
    /// `C A^(r-1) B`.
    input_gain: T,
}

impl<T: Real> SlidingController<T> {
    /// Fails unless the relative degree of `C` equals the controller order.
    pub fn new(sys: &LtiSystem<T>, c: &[T], spec: ControllerSpec<T>) -> Result<Self> {
        let r = relative_degree(sys, c)?;
        if r != spec.order {
            return Err(Error::ControllerMismatch { order: spec.order, relative_degree: r });
        }
        let mut rows = sys.output_powers(c, r + 1);
        let feedforward = rows.pop().expect("r + 1 rows");
        let input_gain = dot(&rows[r - 1], &sys.b_vec());
        Ok(Self { spec, rows, feedforward, input_gain })
    }

    pub fn spec(&self) -> &ControllerSpec<T> {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.spec.order
    }

    pub fn input_gain(&self) -> T {
        self.input_gain
    }

    pub fn sliding_coordinates(&self, x: &[T]) -> SlidingCoordinates<T> {
        SlidingCoordinates { sigma_derivs: self.sigma_derivs(x) }
    }

    pub(crate) fn sigma_derivs(&self, x: &[T]) -> Vec<T> {
        self.rows.iter().map(|row| dot(row, x)).collect()
    }

    pub fn control(&self, x: &[T]) -> T {
        let xi = self.sigma_derivs(x);
        let ff = if self.spec.drop_feedforward { T::zero() } else { dot(&self.feedforward, x) };
        -(ff + self.spec.nonlinear_term(&xi)) / self.input_gain
    }
}
