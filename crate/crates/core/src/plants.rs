//! Reference plants.

use crate::lti::LtiSystem;
use crate::scalar::Scalar;

fn frac<T: Scalar>(numer: i64, denom: i64) -> T {
    T::from_i64(numer).expect("integer") / T::from_i64(denom).expect("integer")
}

/// Linearized inverted pendulum on a cart; states are cart position and
/// velocity, pole angle and angular velocity.
///
/// Entries are built as exact ratios so rational scalars see the decimal values.
pub fn pendulum<T: Scalar>() -> LtiSystem<T> {
    let z = T::zero;
    let o = T::one;
    LtiSystem::from_rows(
        &[
            vec![z(), o(), z(), z()],
            vec![z(), z(), frac(-156, 100), z()],
            vec![z(), z(), z(), o()],
            vec![z(), z(), frac(4687, 100), z()],
        ],
        &[z(), frac(97, 100), z(), frac(-398, 100)],
    )
    .expect("well-formed plant")
}

/// Chain of `n` integrators driven at the last state.
pub fn integrator_chain<T: Scalar>(n: usize) -> LtiSystem<T> {
    let mut a = vec![vec![T::zero(); n]; n];
    for (i, row) in a.iter_mut().enumerate().take(n.saturating_sub(1)) {
        row[i + 1] = T::one();
    }
    let mut b = vec![T::zero(); n];
    if n > 0 {
        b[n - 1] = T::one();
    }
    LtiSystem::from_rows(&a, &b).expect("well-formed plant")
}
