//! Sliding-variable synthesis by zero placement.
//!
//! For a controllable single-input pair `(A, B)` and a monic `γ` of degree
//! `n - r`, the row `C = e P⁻¹ γ(A)`, with `e = [0 … 0 1]` and `P` the
//! controllability matrix, gives an output of relative degree `r` whose
//! transfer-function numerator is exactly `γ`. The roots of `γ` are then the
//! eigenvalues of the motion on `σ = σ̇ = … = σ^(r-1) = 0`. With
//! `deg γ = n - 1` this is the classical relative-degree-one formula.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    controllability_matrix, eval_matrix_polynomial, format_sig, poly_from_roots, polynomial_roots, Lu, Polynomial,
};
use crate::lti::{relative_degree_with_tolerance, transfer_function_with_tolerance, LtiSystem, RELATIVE_DEGREE_TOLERANCE};
use crate::scalar::{Real, Scalar};

/// Default bound on the relative numerator-vs-γ coefficient mismatch.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

/// `|lead(γ) - 1|` above this is rejected as non-monic.
pub const MONIC_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DesignOptions {
    pub verify_tolerance: f64,
    pub relative_degree_tolerance: f64,
}

impl Default for DesignOptions {
    fn default() -> Self {
        Self { verify_tolerance: VERIFY_TOLERANCE, relative_degree_tolerance: RELATIVE_DEGREE_TOLERANCE }
    }
}

/// A verified sliding variable `σ = C x`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlidingDesign<T> {
    pub c: Vec<T>,
    pub gamma: Polynomial<T>,
    pub target_r: usize,
    pub realized_r: usize,
    /// Numerator of `C (sI - A)⁻¹ B` as realized in floating point.
    pub numerator: Polynomial<T>,
    /// Relative coefficient distance between `numerator` and `gamma`.
    pub mismatch: f64,
    /// 1-norm condition number of `Pᵀ`.
    pub controllability_condition: T,
}

impl<T: Real> SlidingDesign<T> {
    /// Sliding-mode eigenvalues; empty when `r = n`.
    pub fn zeros(&self) -> Result<Vec<Complex<T>>> {
        if self.gamma.degree() == 0 {
            return Ok(Vec::new());
        }
        polynomial_roots(&self.gamma)
    }
}

pub fn design_sliding_variable<T: Scalar>(sys: &LtiSystem<T>, gamma: &Polynomial<T>) -> Result<SlidingDesign<T>> {
    design_sliding_variable_with(sys, gamma, &DesignOptions::default())
}

pub fn design_sliding_variable_with<T: Scalar>(
    sys: &LtiSystem<T>,
    gamma: &Polynomial<T>,
    opts: &DesignOptions,
) -> Result<SlidingDesign<T>> {
    let n = sys.dim();
    if gamma.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let deg = gamma.degree();
    if deg + 1 > n {
        return Err(Error::Degree { degree: deg, min: 0, max: n.saturating_sub(1) });
    }
    if !gamma.is_monic(MONIC_TOLERANCE) {
        return Err(Error::NotMonic { leading: gamma.leading().as_f64() });
    }
    let target_r = n - deg;

    let p = controllability_matrix(sys.a(), sys.b())?;
    let lu = Lu::factor(&p.transpose()).map_err(|e| match e {
        Error::Singular { .. } => Error::Uncontrollable,
        other => other,
    })?;
    let mut e_last = vec![T::zero(); n];
    e_last[n - 1] = T::one();
    // Row e P⁻¹, obtained as the solution of Pᵀ y = eᵀ.
    let y = lu.solve_vec(&e_last);
    let c = eval_matrix_polynomial(gamma, sys.a())?.vec_mul(&y);

    let realized_r = relative_degree_with_tolerance(sys, &c, opts.relative_degree_tolerance).map_err(|e| {
        Error::Verification(format!("designed output has no relative degree ({e})"))
    })?;
    let numerator = transfer_function_with_tolerance(sys, &c, opts.relative_degree_tolerance)?.numerator;
    if realized_r != target_r {
        return Err(Error::Verification(format!(
            "relative degree {realized_r} realized, {target_r} requested; numerator {}",
            numerator.render("s", 6)
        )));
    }
    let mismatch = numerator.relative_distance(gamma);
    if !(mismatch <= opts.verify_tolerance) {
        return Err(Error::Verification(format!(
            "numerator {} differs from gamma {} (relative mismatch {})",
            numerator.render("s", 6),
            gamma.render("s", 6),
            format_sig(mismatch, 3)
        )));
    }
    Ok(SlidingDesign {
        c,
        gamma: gamma.clone(),
        target_r,
        realized_r,
        numerator,
        mismatch,
        controllability_condition: lu.condition_one(),
    })
}

/// Relative-degree-one special case; `beta` must have degree `n - 1`.
pub fn ackermann_utkin<T: Scalar>(sys: &LtiSystem<T>, beta: &Polynomial<T>) -> Result<SlidingDesign<T>> {
    let n = sys.dim();
    if beta.is_zero() || beta.degree() + 1 != n {
        return Err(Error::Degree { degree: beta.degree(), min: n.saturating_sub(1), max: n.saturating_sub(1) });
    }
    design_sliding_variable(sys, beta)
}

/// Designs from desired sliding-mode eigenvalues instead of coefficients.
pub fn design_from_zeros<T: Real>(sys: &LtiSystem<T>, zeros: &[Complex<T>]) -> Result<SlidingDesign<T>> {
    design_sliding_variable(sys, &poly_from_roots(zeros)?)
}

/// Diagnostics for an arbitrary output row against a target polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignReport<T> {
    pub relative_degree: Option<usize>,
    pub numerator: Polynomial<T>,
    pub denominator: Polynomial<T>,
    /// Transmission zeros, i.e. sliding-mode eigenvalues.
    pub zeros: Vec<Complex<T>>,
    pub max_real_part: Option<T>,
    /// Vacuously true when there are no zeros; false without a relative degree.
    pub minimum_phase: bool,
    /// Relative coefficient distance between the numerator and `gamma`.
    pub mismatch: f64,
}

pub fn verify_design<T: Real>(sys: &LtiSystem<T>, c: &[T], gamma: &Polynomial<T>) -> Result<DesignReport<T>> {
    sys.check_output("verify_design", c)?;
    let relative_degree = relative_degree_with_tolerance(sys, c, RELATIVE_DEGREE_TOLERANCE).ok();
    let tf = transfer_function_with_tolerance(sys, c, RELATIVE_DEGREE_TOLERANCE)?;
    let zeros = if tf.numerator.degree() >= 1 { polynomial_roots(&tf.numerator)? } else { Vec::new() };
    let max_real_part = zeros.iter().map(|z| z.re).fold(None, |acc: Option<T>, re| {
        Some(acc.map_or(re, |a| a.max(re)))
    });
    let minimum_phase = relative_degree.is_some() && max_real_part.is_none_or(|m| m < T::zero());
    Ok(DesignReport {
        relative_degree,
        mismatch: tf.numerator.relative_distance(gamma),
        numerator: tf.numerator,
        denominator: tf.denominator,
        zeros,
        max_real_part,
        minimum_phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::plants::{integrator_chain, pendulum};
    use crate::scalar::ratio;
    use num_rational::BigRational;

    fn poly(c: &[f64]) -> Polynomial<f64> {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn chain_relative_degree_one() {
        let d = ackermann_utkin(&integrator_chain(3), &poly(&[1.0, 2.0, 1.0])).unwrap();
        for (got, want) in d.c.iter().zip([1.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert_eq!(d.realized_r, 1);
    }

    #[test]
    fn chain_relative_degree_two() {
        let d = design_sliding_variable(&integrator_chain(3), &poly(&[1.0, 1.0])).unwrap();
        for (got, want) in d.c.iter().zip([1.0, 1.0, 0.0]) {
            assert!((got - want).abs() < 1e-10);
        }
        assert_eq!(d.realized_r, 2);
    }

    #[test]
    fn chain_designs_are_exact_over_rationals() {
        let sys = integrator_chain::<BigRational>(3);
        let beta = Polynomial::new(vec![ratio(1, 1), ratio(2, 1), ratio(1, 1)]).unwrap();
        assert_eq!(design_sliding_variable(&sys, &beta).unwrap().c, vec![ratio(1, 1), ratio(2, 1), ratio(1, 1)]);
        let gamma = Polynomial::new(vec![ratio(1, 1), ratio(1, 1)]).unwrap();
        let d = design_sliding_variable(&sys, &gamma).unwrap();
        assert_eq!(d.c, vec![ratio(1, 1), ratio(1, 1), ratio(0, 1)]);
        assert_eq!(d.mismatch, 0.0);
    }

    #[test]
    fn constant_gamma_on_canonical_form_picks_first_state() {
        // e P̂⁻¹ = [1, 0, …, 0] for a phase-variable realization.
        let sys = LtiSystem::from_rows(
            &[vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0, 0.0], vec![0.0, 0.0, 0.0, 1.0], vec![2.0, -1.0, 3.0, 0.5]],
            &[0.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let d = design_sliding_variable(&sys, &Polynomial::one()).unwrap();
        assert_eq!(d.c, vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(d.realized_r, 4);
        assert!(d.zeros().unwrap().is_empty());
    }

    #[test]
    fn pendulum_matches_frozen_oracle() {
        // Reference rows from an independent dense-inverse computation.
        let cases: [(&[f64], [f64; 4]); 3] = [
            (&[125.0, 75.0, 15.0, 1.0], [-3.184299619667254, -1.9105797718003523, -4.544917243989255, -0.7169000951372718]),
            (&[25.0, 10.0, 1.0], [-0.6368599239334508, -0.2547439695733803, -0.4064708859837807, -0.06208584183069821]),
            (&[5.0, 1.0], [-0.12737198478669015, -0.02547439695733803, -0.0310429209153491, -0.00620858418306982]),
        ];
        for (gamma, want) in cases {
            let d = design_sliding_variable(&pendulum(), &poly(gamma)).unwrap();
            for (g, w) in d.c.iter().zip(want) {
                assert!((g - w).abs() < 1e-12 * w.abs().max(1.0), "{g} vs {w}");
            }
        }
    }

    #[test]
    fn rejects_bad_gamma() {
        let sys = pendulum::<f64>();
        assert!(matches!(design_sliding_variable(&sys, &poly(&[5.0, 2.0])), Err(Error::NotMonic { .. })));
        assert!(matches!(design_sliding_variable(&sys, &poly(&[1.0, 1.0, 1.0, 1.0, 1.0])), Err(Error::Degree { .. })));
        assert_eq!(design_sliding_variable(&sys, &Polynomial::zero()), Err(Error::ZeroPolynomial));
        assert!(matches!(ackermann_utkin(&sys, &poly(&[5.0, 1.0])), Err(Error::Degree { .. })));
    }

    #[test]
    fn rejects_uncontrollable_pair() {
        let sys = LtiSystem::new(Matrix::identity(2), Matrix::column(&[1.0, 0.0]).unwrap()).unwrap();
        assert_eq!(design_sliding_variable(&sys, &poly(&[1.0, 1.0])), Err(Error::Uncontrollable));
    }

    #[test]
    fn from_zeros_matches_coefficients() {
        let z = [Complex::new(-5.0, 0.0); 2];
        let a = design_from_zeros(&pendulum(), &z).unwrap();
        let b = design_sliding_variable(&pendulum(), &poly(&[25.0, 10.0, 1.0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn report_for_designed_output() {
        let gamma = poly(&[25.0, 10.0, 1.0]);
        let d = design_sliding_variable(&pendulum(), &gamma).unwrap();
        let rep = verify_design(&pendulum(), &d.c, &gamma).unwrap();
        assert_eq!(rep.relative_degree, Some(2));
        assert!(rep.minimum_phase);
        assert!(rep.mismatch < 1e-12);
        for z in &rep.zeros {
            assert!((z - Complex::new(-5.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn report_flags_unrelated_output() {
        // σ = x₁: g(s) = 0.97 s² - 1.56·(-3.98)… computed directly below.
        let rep = verify_design(&pendulum(), &[1.0, 0.0, 0.0, 0.0], &poly(&[25.0, 10.0, 1.0])).unwrap();
        assert_eq!(rep.relative_degree, Some(2));
        // C adj(sI-A) B for C = e₁: 0.97 s² + (-1.56·-3.98 - 46.87·0.97)
        let want = poly(&[-1.56 * -3.98 - 46.87 * 0.97, 0.0, 0.97]);
        assert!(rep.numerator.relative_distance(&want) < 1e-12);
        assert!(rep.mismatch > 0.5);
        assert!(!rep.minimum_phase);
    }

    #[test]
    fn unstable_gamma_is_not_minimum_phase() {
        let gamma = poly(&[-1.0, 1.0]);
        let d = design_sliding_variable(&pendulum(), &gamma).unwrap();
        let rep = verify_design(&pendulum(), &d.c, &gamma).unwrap();
        assert!(!rep.minimum_phase);
        assert!((rep.max_real_part.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_output_reported_not_thrown() {
        let rep = verify_design(&pendulum(), &[0.0; 4], &poly(&[5.0, 1.0])).unwrap();
        assert_eq!(rep.relative_degree, None);
        assert!(!rep.minimum_phase);
    }
}
