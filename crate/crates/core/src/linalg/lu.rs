use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Pivots at or below this fraction of `max|M|` mark the matrix singular.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// LU factorization with partial pivoting, `P M = L U`.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    odd_permutation: bool,
    norm_one: T,
}

impl<T: Scalar> Lu<T> {
    pub fn factor(m: &Matrix<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dim("lu", format!("{}x{} is not square", m.rows(), m.cols())));
        }
        let n = m.rows();
        let threshold = T::tolerance(PIVOT_TOLERANCE) * m.max_abs();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut odd_permutation = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].magnitude()))
                .fold((k, T::zero()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if best <= threshold {
                return Err(Error::Singular { pivot: k });
            }
            if p != k {
                perm.swap(p, k);
                odd_permutation = !odd_permutation;
                for j in 0..n {
                    let tmp = lu[(k, j)].clone();
                    lu[(k, j)] = lu[(p, j)].clone();
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)].clone();
            for i in k + 1..n {
                let f = lu[(i, k)].clone() / pivot.clone();
                if f.is_zero() {
                    lu[(i, k)] = f;
                    continue;
                }
                for j in k + 1..n {
                    lu[(i, j)] = lu[(i, j)].clone() - f.clone() * lu[(k, j)].clone();
                }
                lu[(i, k)] = f;
            }
        }
        Ok(Self { lu, perm, odd_permutation, norm_one: m.norm_one() })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn determinant(&self) -> T {
        let d = (0..self.dim()).fold(T::one(), |acc, k| acc * self.lu[(k, k)].clone());
        if self.odd_permutation {
            -d
        } else {
            d
        }
    }

    /// Solves `M x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(b.len(), n, "rhs length");
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] = y[i].clone() - self.lu[(i, j)].clone() * y[j].clone();
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] = y[i].clone() - self.lu[(i, j)].clone() * y[j].clone();
            }
            y[i] = y[i].clone() / self.lu[(i, i)].clone();
        }
        y
    }

    pub fn solve(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if rhs.rows() != self.dim() {
            return Err(Error::dim("solve", format!("rhs has {} rows, system has {}", rhs.rows(), self.dim())));
        }
        let cols: Vec<Vec<T>> = (0..rhs.cols()).map(|j| self.solve_vec(&rhs.column_vec(j))).collect();
        let mut x = Matrix::zeros(self.dim(), rhs.cols());
        for (j, c) in cols.into_iter().enumerate() {
            for (i, v) in c.into_iter().enumerate() {
                x[(i, j)] = v;
            }
        }
        Ok(x)
    }

    /// `‖M‖₁ ‖M⁻¹‖₁`. The inverse is formed column by column; at the sizes
    /// handled here this is cheaper than it is worth to estimate.
    pub fn condition_one(&self) -> T {
        let n = self.dim();
        let mut inv_norm = T::zero();
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.solve_vec(&e);
            let s = col.iter().fold(T::zero(), |acc, v| acc + v.magnitude());
            inv_norm = T::max_of(inv_norm, s);
        }
        self.norm_one.clone() * inv_norm
    }
}

/// Solution of a square linear system with its 1-norm condition number.
#[derive(Clone, Debug)]
pub struct LinearSolution<T> {
    pub x: Matrix<T>,
    pub condition: T,
}

/// Solves `M X = rhs` by LU with partial pivoting.
pub fn solve_linear<T: Scalar>(m: &Matrix<T>, rhs: &Matrix<T>) -> Result<LinearSolution<T>> {
    let lu = Lu::factor(m)?;
    let x = lu.solve(rhs)?;
    Ok(LinearSolution { x, condition: lu.condition_one() })
}
