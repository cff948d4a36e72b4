//! Single-input LTI plants `ẋ = Ax + B(u + w)` and their structural data.

use crate::error::{Error, Result};
use crate::linalg::{
    controllability_matrix, companion_last_row, dot, faddeev_leverrier, norm2, orthogonal_complement_rows,
    Lu, Matrix, Polynomial,
};
use crate::scalar::{Real, Scalar};

/// Default scale-relative threshold for deciding `C Aⁱ B = 0`.
pub const RELATIVE_DEGREE_TOLERANCE: f64 = 1e-9;

/// Normal-form coordinate changes with a larger 1-norm condition are rejected.
pub const MAX_NORMAL_FORM_CONDITION: f64 = 1e8;

/// State matrix `A` (n x n) and input column `B` (n x 1).
#[derive(Clone, Debug, PartialEq)]
pub struct LtiSystem<T> {
    a: Matrix<T>,
    b: Matrix<T>,
}

impl<T: Scalar> LtiSystem<T> {
    pub fn new(a: Matrix<T>, b: Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::dim("LtiSystem", format!("A is {}x{}, expected square", a.rows(), a.cols())));
        }
        if b.rows() != a.rows() || b.cols() != 1 {
            return Err(Error::dim(
                "LtiSystem",
                format!("B is {}x{}, expected {}x1", b.rows(), b.cols(), a.rows()),
            ));
        }
        Ok(Self { a, b })
    }

    /// From row arrays for `A` and the entries of `B`.
    pub fn from_rows(a: &[Vec<T>], b: &[T]) -> Result<Self> {
        Self::new(Matrix::from_rows(a)?, Matrix::column(b)?)
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn b_vec(&self) -> Vec<T> {
        self.b.column_vec(0)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// `Ax + B(u + w)`.
    pub fn derivative(&self, x: &[T], input: T) -> Vec<T> {
        let mut dx = self.a.mul_vec(x);
        for (d, b) in dx.iter_mut().zip(self.b.as_slice()) {
            *d = d.clone() + b.clone() * input.clone();
        }
        dx
    }

    pub(crate) fn check_output(&self, op: &'static str, c: &[T]) -> Result<()> {
        if c.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::dim(op, format!("C has {} entries, state dimension is {}", c.len(), self.dim())))
        }
    }

    /// Rows `C, CA, …, CA^(count-1)`.
    pub fn output_powers(&self, c: &[T], count: usize) -> Vec<Vec<T>> {
        let mut rows = Vec::with_capacity(count);
        let mut row = c.to_vec();
        for _ in 0..count {
            let next = self.a.vec_mul(&row);
            rows.push(std::mem::replace(&mut row, next));
        }
        rows
    }

    /// Markov parameters `C Aⁱ B` for `i = 0..n-1`.
    pub fn markov_parameters(&self, c: &[T]) -> Vec<T> {
        let b = self.b_vec();
        self.output_powers(c, self.dim()).iter().map(|row| dot(row, &b)).collect()
    }

    pub fn cast<U: Scalar>(&self) -> LtiSystem<U> {
        LtiSystem { a: self.a.cast(), b: self.b.cast() }
    }
}

/// Relative degree with the default tolerance.
pub fn relative_degree<T: Scalar>(sys: &LtiSystem<T>, c: &[T]) -> Result<usize> {
    relative_degree_with_tolerance(sys, c, RELATIVE_DEGREE_TOLERANCE)
}

/// Smallest `r ≥ 1` with `|C A^(r-1) B| > rel_tol · ‖C‖ ‖A‖^(r-1) ‖B‖`
/// (Euclidean norms for vectors, Frobenius for `A`).
pub fn relative_degree_with_tolerance<T: Scalar>(sys: &LtiSystem<T>, c: &[T], rel_tol: f64) -> Result<usize> {
    sys.check_output("relative_degree", c)?;
    let (r, _) = first_nonzero_markov(sys, c, rel_tol);
    r.ok_or(Error::NoRelativeDegree)
}

fn first_nonzero_markov<T: Scalar>(sys: &LtiSystem<T>, c: &[T], rel_tol: f64) -> (Option<usize>, Vec<T>) {
    let markov = sys.markov_parameters(c);
    let norm_a = norm2(sys.a.as_slice());
    let base = norm2(c) * norm2(sys.b.as_slice());
    let tol = T::tolerance(rel_tol);
    let r = markov.iter().enumerate().find_map(|(i, m)| {
        let scale = T::lit(base * norm_a.powi(i as i32));
        (m.magnitude() > tol.clone() * scale).then_some(i + 1)
    });
    (r, markov)
}

/// `g(s) = C (sI - A)⁻¹ B` as numerator over the monic characteristic polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction<T> {
    pub numerator: Polynomial<T>,
    pub denominator: Polynomial<T>,
}

/// Transfer function through the Faddeev–LeVerrier adjugate sequence:
/// the coefficient of `s^(n-1-k)` in the numerator is `C M_{k+1} B`.
///
/// Leading coefficients before the first nonzero Markov parameter (by the
/// relative-degree test) are structurally zero and are dropped, so the
/// numerator degree is exactly `n - r`. An output without relative degree
/// has a zero numerator.
pub fn transfer_function<T: Scalar>(sys: &LtiSystem<T>, c: &[T]) -> Result<TransferFunction<T>> {
    transfer_function_with_tolerance(sys, c, RELATIVE_DEGREE_TOLERANCE)
}

pub fn transfer_function_with_tolerance<T: Scalar>(
    sys: &LtiSystem<T>,
    c: &[T],
    rel_tol: f64,
) -> Result<TransferFunction<T>> {
    sys.check_output("transfer_function", c)?;
    let n = sys.dim();
    let fl = faddeev_leverrier(&sys.a)?;
    let b = sys.b_vec();
    let (r, _) = first_nonzero_markov(sys, c, rel_tol);
    let numerator = match r {
        None => Polynomial::zero(),
        Some(r) => {
            // adjugate[k] multiplies s^(n-1-k); keep k >= r-1.
            let mut coeffs: Vec<T> = fl.adjugate[r - 1..]
                .iter()
                .map(|m| dot(&m.vec_mul(c), &b))
                .collect();
            coeffs.reverse();
            debug_assert_eq!(coeffs.len(), n - r + 1);
            Polynomial::with_exact_degree(coeffs)?
        }
    };
    Ok(TransferFunction { numerator, denominator: fl.char_poly })
}

/// Controller (phase-variable) canonical realization of a controllable pair.
#[derive(Clone, Debug)]
pub struct CanonicalForm<T> {
    /// Companion matrix with `-a₀ … -a_{n-1}` in the last row.
    pub a_hat: Matrix<T>,
    /// `eₙ`.
    pub b_hat: Matrix<T>,
    /// `T = P P̂⁻¹`, so that `Â = T⁻¹ A T` and `B̂ = T⁻¹ B`.
    pub t: Matrix<T>,
    pub char_poly: Polynomial<T>,
    /// 1-norm condition number of the controllability matrix `P`.
    pub controllability_condition: T,
}

pub fn to_controller_canonical<T: Scalar>(sys: &LtiSystem<T>) -> Result<CanonicalForm<T>> {
    let n = sys.dim();
    let p = controllability_matrix(&sys.a, &sys.b)?;
    let lu_p = Lu::factor(&p).map_err(|e| match e {
        Error::Singular { .. } => Error::Uncontrollable,
        other => other,
    })?;
    let char_poly = faddeev_leverrier(&sys.a)?.char_poly;
    let a_hat = companion_last_row(&char_poly);
    let mut e_n = vec![T::zero(); n];
    if n > 0 {
        e_n[n - 1] = T::one();
    }
    let b_hat = Matrix::column(&e_n)?;
    let p_hat = controllability_matrix(&a_hat, &b_hat)?;
    // T P̂ = P  ⇔  P̂ᵀ Tᵀ = Pᵀ
    let t = Lu::factor(&p_hat.transpose())?.solve(&p.transpose())?.transpose();
    Ok(CanonicalForm { a_hat, b_hat, t, char_poly, controllability_condition: lu_p.condition_one() })
}

/// Normal-form data for an output of relative degree `r`.
#[derive(Clone, Debug)]
pub struct NormalFormData<T> {
    /// Rows `[B⊥; C; CA; …; CA^(r-1)]`.
    pub t: Matrix<T>,
    /// (n-r) x n, orthonormal rows with `B⊥ B = 0`.
    pub b_perp: Matrix<T>,
    /// Zero-dynamics matrix, (n-r) x (n-r).
    pub a0: Matrix<T>,
    /// Coupling from `ξ` into `η̇`, (n-r) x r.
    pub b0: Matrix<T>,
    pub relative_degree: usize,
    /// 1-norm condition of `T` with the ξ rows scaled to unit norm.
    pub condition: T,
}

/// Splits the state into zero-dynamics coordinates `η = B⊥ x` and output
/// derivatives `ξ = (Cx, CAx, …, CA^(r-1)x)`.
///
/// `B⊥` spans the orthogonal complement of `{B, Cᵀ, (CA)ᵀ, …, (CA^(r-2))ᵀ}`:
/// every such row annihilates `B`, and the rows `C … CA^(r-2)` (which also
/// annihilate `B`) are excluded from its span so that `T` is well conditioned.
pub fn normal_form<T: Real>(sys: &LtiSystem<T>, c: &[T]) -> Result<NormalFormData<T>> {
    let n = sys.dim();
    let r = relative_degree(sys, c)?;
    let xi_rows = sys.output_powers(c, r);
    let mut span = vec![sys.b_vec()];
    span.extend(xi_rows[..r - 1].iter().cloned());
    let b_perp = orthogonal_complement_rows(&Matrix::from_columns(&span)?).map_err(|_| {
        Error::IllConditioned { condition: f64::INFINITY }
    })?;
    // Row scaling of ξ leaves A0 unchanged and only rescales B0, so work with
    // unit-norm rows for accuracy and undo the scaling on B0.
    let scales: Vec<T> = xi_rows.iter().map(|row| T::lit(norm2(row))).collect();
    let unit_rows: Vec<Vec<T>> =
        xi_rows.iter().zip(&scales).map(|(row, s)| row.iter().map(|v| *v / *s).collect()).collect();
    let t_unit = b_perp.vstack(&Matrix::from_rows(&unit_rows)?)?;
    let lu = Lu::factor(&t_unit).map_err(|_| Error::IllConditioned { condition: f64::INFINITY })?;
    let condition = lu.condition_one();
    if condition.as_f64() > MAX_NORMAL_FORM_CONDITION {
        return Err(Error::IllConditioned { condition: condition.as_f64() });
    }
    // Ā = T A T⁻¹  ⇔  Tᵀ Āᵀ = (T A)ᵀ
    let ta = &t_unit * &sys.a;
    let a_bar = Lu::factor(&t_unit.transpose())?.solve(&ta.transpose())?.transpose();
    let m = n - r;
    let mut b0 = a_bar.block(0, m, m, n);
    for i in 0..m {
        for (j, s) in scales.iter().enumerate() {
            b0[(i, j)] = b0[(i, j)] / *s;
        }
    }
    let t = b_perp.vstack(&Matrix::from_rows(&xi_rows)?)?;
    Ok(NormalFormData {
        a0: a_bar.block(0, m, 0, m),
        b0,
        t,
        b_perp,
        relative_degree: r,
        condition,
    })
}

/// Cascades `k` integrators in front of the input: the new state is
/// `(x, u, u̇, …, u^(k-1))` and the new input is `u^(k)`.
pub fn augment_with_integrators<T: Scalar>(sys: &LtiSystem<T>, k: usize) -> Result<LtiSystem<T>> {
    if k == 0 {
        return Err(Error::InvalidArgument("integrator count must be at least 1".into()));
    }
    let n = sys.dim();
    let m = n + k;
    let mut a = Matrix::zeros(m, m);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = sys.a[(i, j)].clone();
        }
        a[(i, n)] = sys.b[(i, 0)].clone();
    }
    for i in n..m - 1 {
        a[(i, i + 1)] = T::one();
    }
    let mut b = Matrix::zeros(m, 1);
    b[(m - 1, 0)] = T::one();
    LtiSystem::new(a, b)
}

/// Zero-pads an output row for a system augmented with `k` integrators.
pub fn pad_output<T: Scalar>(c: &[T], k: usize) -> Vec<T> {
    let mut out = c.to_vec();
    out.extend(std::iter::repeat_n(T::zero(), k));
    out
}
