use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Orthonormal basis of the orthogonal complement of the column span of `v`
/// (n x m, full column rank), returned as the rows of an (n-m) x n matrix.
pub fn orthogonal_complement_rows<T: Real>(v: &Matrix<T>) -> Result<Matrix<T>> {
    let n = v.rows();
    let m = v.cols();
    if m > n {
        return Err(Error::dim("orthogonal_complement", format!("{m} vectors in dimension {n}")));
    }
    let mut r = v.clone();
    let mut q = Matrix::<T>::identity(n);
    let scale = v.max_abs();
    for k in 0..m {
        let norm = (k..n).map(|i| r[(i, k)] * r[(i, k)]).fold(T::zero(), |a, b| a + b).sqrt();
        if norm <= T::tolerance(1e-12) * scale {
            return Err(Error::Singular { pivot: k });
        }
        let alpha = -norm.copysign(r[(k, k)]);
        let mut u: Vec<T> = (0..n).map(|i| if i < k { T::zero() } else { r[(i, k)] }).collect();
        u[k] = u[k] - alpha;
        let unorm2 = u.iter().fold(T::zero(), |a, &b| a + b * b);
        if unorm2.is_zero() {
            continue;
        }
        let two = T::lit(2.0);
        // R <- H R
        for j in 0..m {
            let d = (k..n).fold(T::zero(), |a, i| a + u[i] * r[(i, j)]);
            let f = two * d / unorm2;
            for i in k..n {
                r[(i, j)] = r[(i, j)] - f * u[i];
            }
        }
        // Q <- Q H
        for i in 0..n {
            let d = (k..n).fold(T::zero(), |a, j| a + q[(i, j)] * u[j]);
            let f = two * d / unorm2;
            for j in k..n {
                q[(i, j)] = q[(i, j)] - f * u[j];
            }
        }
    }
    Ok(q.block(0, n, m, n).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    #[test]
    fn complement_is_orthonormal_and_orthogonal() {
        let v = Matrix::from_columns(&[vec![0.0, 0.97, 0.0, -3.98], vec![1.0, 2.0, 0.0, 0.5]]).unwrap();
        let c = orthogonal_complement_rows(&v).unwrap();
        assert_eq!((c.rows(), c.cols()), (2, 4));
        for i in 0..2 {
            for j in 0..2 {
                let d: f64 = dot(c.row_slice(i), c.row_slice(j));
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
            for k in 0..2 {
                assert!(dot::<f64>(c.row_slice(i), &v.column_vec(k)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dependent_columns_rejected() {
        let v = Matrix::from_columns(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]]).unwrap();
        assert!(orthogonal_complement_rows(&v).is_err());
    }

    #[test]
    fn full_span_leaves_empty_complement() {
        let c = orthogonal_complement_rows(&Matrix::<f64>::identity(3)).unwrap();
        assert_eq!(c.rows(), 0);
    }
}
