use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative threshold for dropping negligible leading coefficients.
pub const TRIM_TOLERANCE: f64 = 1e-12;

/// Real-coefficient polynomial, coefficients in ascending degree order.
///
/// Leading coefficients smaller than [`TRIM_TOLERANCE`] times the largest
/// coefficient magnitude are dropped on construction. The zero polynomial
/// has no coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.finite()) {
            return Err(Error::NonFinite("polynomial"));
        }
        let mut coeffs = coeffs;
        let largest = coeffs.iter().map(Scalar::magnitude).fold(T::zero(), T::max_of);
        let cut = T::tolerance(TRIM_TOLERANCE) * largest;
        while coeffs.last().is_some_and(|c| c.is_zero() || c.magnitude() < cut) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    /// Keeps every coefficient. Only an exactly zero leading coefficient is
    /// dropped; use when the degree is known structurally (e.g. monic).
    pub fn with_exact_degree(mut coeffs: Vec<T>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.finite()) {
            return Err(Error::NonFinite("polynomial"));
        }
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Ok(Self { coeffs })
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![T::one()] }
    }

    /// `x - root`.
    pub fn linear(root: T) -> Self {
        Self { coeffs: vec![-root, T::one()] }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    /// Whether the leading coefficient equals one within `tol`.
    pub fn is_monic(&self, tol: f64) -> bool {
        !self.is_zero() && (self.leading() - T::one()).magnitude() <= T::tolerance(tol)
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self { coeffs: out }
    }

    /// Largest coefficient difference over the largest coefficient of `reference`.
    pub fn relative_distance(&self, reference: &Self) -> f64 {
        let len = self.coeffs.len().max(reference.coeffs.len());
        let diff = (0..len)
            .map(|k| (self.coeff(k) - reference.coeff(k)).as_f64().abs())
            .fold(0.0, f64::max);
        let scale = reference.coeffs.iter().map(|c| c.as_f64().abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }

    pub fn cast<U: Scalar>(&self) -> Polynomial<U> {
        Polynomial { coeffs: self.coeffs.iter().map(|c| U::lit(c.as_f64())).collect() }
    }

    /// Renders in descending powers of `var`, with `digits` significant digits.
    pub fn render(&self, var: &str, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            let v = c.as_f64();
            if v == 0.0 {
                continue;
            }
            let mag = v.abs();
            let sign = if v < 0.0 { "-" } else { "+" };
            let num = if mag == 1.0 && k > 0 { String::new() } else { format_sig(mag, digits) };
            let pow = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            let body = match (num.is_empty(), pow.is_empty()) {
                (true, _) => pow,
                (false, true) => num,
                (false, false) => format!("{num} {pow}"),
            };
            terms.push((sign, body));
        }
        let mut out = String::new();
        for (i, (sign, body)) in terms.iter().enumerate() {
            if i == 0 {
                if *sign == "-" {
                    out.push('-');
                }
            } else {
                out.push_str(&format!(" {sign} "));
            }
            out.push_str(body);
        }
        out
    }
}

impl<T: Scalar> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x", 6))
    }
}

/// Shortest decimal rendering with at most `digits` significant digits.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    let s = format!("{:.*e}", digits - 1, v);
    let parsed: f64 = s.parse().unwrap_or(v);
    let plain = format!("{parsed}");
    let sci = format!("{parsed:e}");
    if plain.len() <= sci.len() {
        plain
    } else {
        sci
    }
}
