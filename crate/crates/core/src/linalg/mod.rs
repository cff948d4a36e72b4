//! Dense linear algebra and polynomial arithmetic for small state dimensions.

mod householder;
mod lu;
mod matrix;
mod polynomial;
mod roots;
mod structure;

pub use householder::orthogonal_complement_rows;
pub use lu::{solve_linear, LinearSolution, Lu, PIVOT_TOLERANCE};
pub use matrix::{dot, norm2, Matrix};
pub use polynomial::{format_sig, Polynomial, TRIM_TOLERANCE};
pub use roots::{eigenvalues, poly_from_roots, polynomial_roots, sort_roots, IMAGINARY_RESIDUE, MAX_QR_ITERATIONS};
pub use structure::{
    characteristic_polynomial, companion_last_row, controllability_matrix, eval_matrix_polynomial,
    faddeev_leverrier, FaddeevLeVerrier,
};
