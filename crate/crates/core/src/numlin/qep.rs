//! Companion linearization of quadratic pencils.

use crate::error::{Error, Result};
use crate::numlin::lu::Lu;
use crate::numlin::{ComplexMatrix, RealMatrix};
use crate::scalar::{Cx, Real};

/// First companion form of `λ²M + λC + K`: `[[0, I], [−M⁻¹K, −M⁻¹C]]` acting on `(x, λx)`.
pub fn qep_linearize<T: Real>(
    m: &ComplexMatrix<T>,
    c: &ComplexMatrix<T>,
    k: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    for a in [m, c, k] {
        if !a.is_square() {
            return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
        }
    }
    let n = m.rows();
    if c.rows() != n || k.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "pencil blocks have sizes {n}, {}, {}",
            c.rows(),
            k.rows()
        )));
    }
    let tiny = T::epsilon() * m.frobenius_norm();
    let lu = Lu::factor(m, tiny).ok_or(Error::SingularMass)?;
    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        out[(i, n + i)] = Cx::new(T::one(), T::zero());
    }
    let mut col = vec![Cx::new(T::zero(), T::zero()); n];
    for j in 0..n {
        for (src, off) in [(k, 0), (c, n)] {
            for i in 0..n {
                col[i] = src[(i, j)];
            }
            let x = lu.solve(&col);
            for i in 0..n {
                out[(n + i, off + j)] = -x[i];
            }
        }
    }
    Ok(out)
}

/// Companion matrix for the monic real pencil `λ²I + λC + K`.
pub fn companion_monic<T: Real>(c: &RealMatrix<T>, k: &RealMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = c.rows();
    if c.cols() != n || k.rows() != n || k.cols() != n {
        return Err(Error::DimensionMismatch("C and K must be square of equal size".into()));
    }
    let mut out = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        out[(i, n + i)] = Cx::new(T::one(), T::zero());
        for j in 0..n {
            out[(n + i, j)] = Cx::new(-k[(i, j)], T::zero());
            out[(n + i, n + j)] = Cx::new(-c[(i, j)], T::zero());
        }
    }
    Ok(out)
}
