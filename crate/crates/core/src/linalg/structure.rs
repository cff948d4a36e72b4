//! Controllability matrix, matrix polynomials and the Faddeev–LeVerrier recursion.

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Polynomial};
use crate::scalar::Scalar;

fn require_square<T: Scalar>(op: &'static str, a: &Matrix<T>) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::dim(op, format!("A is {}x{}, expected square", a.rows(), a.cols())))
    }
}

/// `[B | AB | A²B | … | Aⁿ⁻¹B]`.
pub fn controllability_matrix<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    require_square("controllability_matrix", a)?;
    if b.rows() != a.rows() || b.cols() != 1 {
        return Err(Error::dim(
            "controllability_matrix",
            format!("A is {n}x{n} but B is {}x{}, expected {n}x1", b.rows(), b.cols(), n = a.rows()),
        ));
    }
    let n = a.rows();
    let mut columns = Vec::with_capacity(n);
    let mut col = b.column_vec(0);
    for _ in 0..n {
        let next = a.mul_vec(&col);
        columns.push(std::mem::replace(&mut col, next));
    }
    Matrix::from_columns(&columns)
}

/// `p₀I + p₁A + … + p_d A^d`, by Horner's scheme.
pub fn eval_matrix_polynomial<T: Scalar>(p: &Polynomial<T>, a: &Matrix<T>) -> Result<Matrix<T>> {
    require_square("eval_matrix_polynomial", a)?;
    let n = a.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = &acc * a;
        acc.add_diagonal(c);
    }
    Ok(acc)
}

/// Output of the Faddeev–LeVerrier recursion.
///
/// `adjugate[k]` is the matrix coefficient of `s^(n-1-k)` in `adj(sI - A)`,
/// so `adj(sI - A) = Σ adjugate[k] s^(n-1-k)`.
#[derive(Clone, Debug)]
pub struct FaddeevLeVerrier<T> {
    pub char_poly: Polynomial<T>,
    pub adjugate: Vec<Matrix<T>>,
}

/// Characteristic polynomial and adjugate sequence of `A`.
///
/// `M₁ = I`, `c_{n-k} = -tr(A M_k) / k`, `M_{k+1} = A M_k + c_{n-k} I`.
pub fn faddeev_leverrier<T: Scalar>(a: &Matrix<T>) -> Result<FaddeevLeVerrier<T>> {
    require_square("faddeev_leverrier", a)?;
    let n = a.rows();
    let mut coeffs = vec![T::zero(); n + 1];
    coeffs[n] = T::one();
    let mut adjugate = Vec::with_capacity(n);
    let mut m = Matrix::identity(n);
    for k in 1..=n {
        let am = &m * a;
        let kk = T::from_usize(k).expect("small integer");
        let c = -(am.trace() / kk);
        coeffs[n - k] = c.clone();
        adjugate.push(m);
        m = am;
        m.add_diagonal(&c);
    }
    let char_poly = Polynomial::with_exact_degree(coeffs)?;
    Ok(FaddeevLeVerrier { char_poly, adjugate })
}

/// Monic `det(λI - A)`.
pub fn characteristic_polynomial<T: Scalar>(a: &Matrix<T>) -> Result<Polynomial<T>> {
    Ok(faddeev_leverrier(a)?.char_poly)
}

/// Phase-variable companion matrix of a monic polynomial: ones on the
/// superdiagonal, `-a₀ … -a_{n-1}` in the last row.
pub fn companion_last_row<T: Scalar>(p: &Polynomial<T>) -> Matrix<T> {
    let n = p.degree();
    let lead = p.leading();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = T::one();
    }
    for j in 0..n {
        m[(n - 1, j)] = -(p.coeff(j) / lead.clone());
    }
    m
}
