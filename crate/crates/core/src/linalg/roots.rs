//! Polynomial roots through the eigenvalues of a balanced companion matrix,
//! the inverse map from roots back to real coefficients, and general real
//! eigenvalues through the same QR iteration.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Polynomial};
use crate::scalar::Real;

/// Iteration budget for the Hessenberg QR sweep.
pub const MAX_QR_ITERATIONS: usize = 500;

/// Imaginary residues below this (relative to the coefficient size) are dropped.
pub const IMAGINARY_RESIDUE: f64 = 1e-10;

/// Roots of `p`, sorted by real part then imaginary part.
pub fn polynomial_roots<T: Real>(p: &Polynomial<T>) -> Result<Vec<Complex<T>>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = p.degree();
    if n == 0 {
        return Err(Error::Degree { degree: 0, min: 1, max: usize::MAX });
    }
    // Exact zero roots deflate directly.
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let reduced = Polynomial::with_exact_degree(p.coeffs()[zeros..].to_vec())?;
    let mut roots = vec![Complex::new(T::zero(), T::zero()); zeros];
    if reduced.degree() > 0 {
        let mut h = companion_upper_hessenberg(&reduced);
        balance(&mut h);
        roots.extend(hessenberg_eigenvalues(h)?);
    }
    sort_roots(&mut roots);
    Ok(roots)
}

/// Eigenvalues of a real square matrix, sorted like [`polynomial_roots`].
///
/// Balances, reduces to Hessenberg form by stabilized elimination, then runs
/// the shifted QR iteration. Unlike the roots of the characteristic
/// polynomial this stays accurate for strongly non-normal matrices.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::dim("eigenvalues", format!("{}x{} is not square", a.rows(), a.cols())));
    }
    let mut h = a.clone();
    balance(&mut h);
    reduce_to_hessenberg(&mut h);
    let mut out = hessenberg_eigenvalues(h)?;
    sort_roots(&mut out);
    Ok(out)
}

/// Similarity reduction to upper Hessenberg form by Gaussian elimination
/// with row pivoting.
fn reduce_to_hessenberg<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        let (mut pivot_row, mut x) = (m, T::zero());
        for j in m..n {
            if a[(j, m - 1)].abs() > x.abs() {
                x = a[(j, m - 1)];
                pivot_row = j;
            }
        }
        if pivot_row != m {
            for j in m - 1..n {
                let tmp = a[(pivot_row, j)];
                a[(pivot_row, j)] = a[(m, j)];
                a[(m, j)] = tmp;
            }
            for j in 0..n {
                let tmp = a[(j, pivot_row)];
                a[(j, pivot_row)] = a[(j, m)];
                a[(j, m)] = tmp;
            }
        }
        if x.is_zero() {
            continue;
        }
        for i in m + 1..n {
            let y = a[(i, m - 1)] / x;
            a[(i, m - 1)] = T::zero();
            if y.is_zero() {
                continue;
            }
            for j in m..n {
                a[(i, j)] = a[(i, j)] - y * a[(m, j)];
            }
            for j in 0..n {
                a[(j, m)] = a[(j, m)] + y * a[(j, i)];
            }
        }
    }
}

pub fn sort_roots<T: Real>(roots: &mut [Complex<T>]) {
    roots.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
    });
}

/// Monic real polynomial with the given conjugate-closed roots.
pub fn poly_from_roots<T: Real>(roots: &[Complex<T>]) -> Result<Polynomial<T>> {
    let mut acc = vec![Complex::new(T::one(), T::zero())];
    for r in roots {
        let mut next = vec![Complex::new(T::zero(), T::zero()); acc.len() + 1];
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] = next[k + 1] + c;
            next[k] = next[k] - c * r;
        }
        acc = next;
    }
    let residue = T::lit(IMAGINARY_RESIDUE);
    let mut coeffs = Vec::with_capacity(acc.len());
    for c in acc {
        if c.im.abs() > residue * T::one().max(c.re.abs()) {
            return Err(Error::NotConjugateClosed);
        }
        coeffs.push(c.re);
    }
    Polynomial::with_exact_degree(coeffs)
}

/// Companion matrix with `-a_{n-1}/a_n … -a₀/a_n` in the first row and ones
/// on the subdiagonal; already upper Hessenberg.
fn companion_upper_hessenberg<T: Real>(p: &Polynomial<T>) -> Matrix<T> {
    let n = p.degree();
    let lead = p.leading();
    let mut m = Matrix::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -p.coeff(n - 1 - j) / lead;
    }
    for i in 1..n {
        m[(i, i - 1)] = T::one();
    }
    m
}

/// Diagonal similarity scaling by powers of two to equalize row and column norms.
fn balance<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + a[(j, i)].abs();
                    r = r + a[(i, j)].abs();
                }
            }
            if c.is_zero() || r.is_zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / radix;
            while c < g {
                f = f * radix;
                c = c * sqrdx;
            }
            g = r * radix;
            while c > g {
                f = f / radix;
                c = c / sqrdx;
            }
            if (c + r) / f < T::lit(0.95) * s {
                done = false;
                let ginv = T::one() / f;
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] * ginv;
                    a[(j, i)] = a[(j, i)] * f;
                }
            }
        }
    }
}

/// Eigenvalues of a real upper Hessenberg matrix by the Francis double-shift
/// QR algorithm.
fn hessenberg_eigenvalues<T: Real>(mut a: Matrix<T>) -> Result<Vec<Complex<T>>> {
    let n = a.rows();
    let eps = T::epsilon();
    let zero = T::zero();
    let mut out = Vec::with_capacity(n);
    let mut anorm = zero;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + a[(i, j)].abs();
        }
    }

    let mut total = 0usize;
    let mut its = 0usize;
    let mut shift = zero;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let hi = nn as usize;
        // Look for a negligible subdiagonal element.
        let mut l = hi;
        while l > 0 {
            let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
            if s.is_zero() {
                s = anorm;
            }
            if a[(l, l - 1)].abs() <= eps * s {
                a[(l, l - 1)] = zero;
                break;
            }
            l -= 1;
        }

        let x = a[(hi, hi)];
        if l == hi {
            out.push(Complex::new(x + shift, zero));
            nn -= 1;
            its = 0;
            continue;
        }
        let y = a[(hi - 1, hi - 1)];
        let w = a[(hi, hi - 1)] * a[(hi - 1, hi)];
        if l == hi - 1 {
            let p = T::lit(0.5) * (y - x);
            let q = p * p + w;
            let z = q.abs().sqrt();
            let xs = x + shift;
            if q >= zero {
                let z = p + z.copysign(p);
                let r1 = xs + z;
                let r2 = if z.is_zero() { r1 } else { xs - w / z };
                out.push(Complex::new(r1, zero));
                out.push(Complex::new(r2, zero));
            } else {
                out.push(Complex::new(xs + p, z));
                out.push(Complex::new(xs + p, -z));
            }
            nn -= 2;
            its = 0;
            continue;
        }

        if total >= MAX_QR_ITERATIONS {
            return Err(Error::NoConvergence { iterations: total });
        }
        let (mut x, mut y, mut w) = (x, y, w);
        if its == 10 || its == 20 {
            // Exceptional shift.
            shift = shift + x;
            for i in 0..=hi {
                a[(i, i)] = a[(i, i)] - x;
            }
            let s = a[(hi, hi - 1)].abs() + a[(hi - 1, hi - 2)].abs();
            x = T::lit(0.75) * s;
            y = x;
            w = T::lit(-0.4375) * s * s;
        }
        its += 1;
        total += 1;

        // Find two consecutive small subdiagonal elements.
        let (mut p, mut q, mut r): (T, T, T);
        let mut m = hi - 2;
        loop {
            let z = a[(m, m)];
            let rr = x - z;
            let ss = y - z;
            p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
            q = a[(m + 1, m + 1)] - z - rr - ss;
            r = a[(m + 2, m + 1)];
            let s = p.abs() + q.abs() + r.abs();
            p = p / s;
            q = q / s;
            r = r / s;
            if m == l {
                break;
            }
            let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
            let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
            if u <= eps * v {
                break;
            }
            m -= 1;
        }
        for i in m..hi - 1 {
            a[(i + 2, i)] = zero;
            if i != m {
                a[(i + 2, i - 1)] = zero;
            }
        }

        // Double QR step on rows l..=hi and columns m..=hi.
        for k in m..hi {
            let mut xk = zero;
            if k != m {
                p = a[(k, k - 1)];
                q = a[(k + 1, k - 1)];
                r = if k + 1 != hi { a[(k + 2, k - 1)] } else { zero };
                xk = p.abs() + q.abs() + r.abs();
                if !xk.is_zero() {
                    p = p / xk;
                    q = q / xk;
                    r = r / xk;
                }
            }
            let s = (p * p + q * q + r * r).sqrt().copysign(p);
            if s.is_zero() {
                continue;
            }
            if k == m {
                if l != m {
                    a[(k, k - 1)] = -a[(k, k - 1)];
                }
            } else {
                a[(k, k - 1)] = -s * xk;
            }
            p = p + s;
            let xx = p / s;
            let yy = q / s;
            let zz = r / s;
            q = q / p;
            r = r / p;
            for j in k..=hi {
                let mut pj = a[(k, j)] + q * a[(k + 1, j)];
                if k + 1 != hi {
                    pj = pj + r * a[(k + 2, j)];
                    a[(k + 2, j)] = a[(k + 2, j)] - pj * zz;
                }
                a[(k + 1, j)] = a[(k + 1, j)] - pj * yy;
                a[(k, j)] = a[(k, j)] - pj * xx;
            }
            let mmin = if hi < k + 3 { hi } else { k + 3 };
            for i in l..=mmin {
                let mut pi = xx * a[(i, k)] + yy * a[(i, k + 1)];
                if k + 1 != hi {
                    pi = pi + zz * a[(i, k + 2)];
                    a[(i, k + 2)] = a[(i, k + 2)] - pi * r;
                }
                a[(i, k + 1)] = a[(i, k + 1)] - pi * q;
                a[(i, k)] = a[(i, k)] - pi;
            }
        }
    }
    Ok(out)
}
