//! Complex LU factorization with partial pivoting.

use crate::numlin::ComplexMatrix;
use crate::scalar::{Cx, Real};

pub(crate) struct Lu<T> {
    n: usize,
    lu: Vec<Cx<T>>,
    piv: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Factors `a`; returns `None` when a pivot falls below `tiny`.
    pub(crate) fn factor(a: &ComplexMatrix<T>, tiny: T) -> Option<Self> {
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, mag) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, T::neg_infinity()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(mag > tiny) {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let d = lu[k * n + k];
            for i in k + 1..n {
                let f = lu[i * n + k] / d;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let u = lu[k * n + j];
                    lu[i * n + j] -= f * u;
                }
            }
        }
        Some(Self { n, lu, piv })
    }

    pub(crate) fn solve(&self, b: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = self.n;
        let mut x: Vec<Cx<T>> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] = x[i] / self.lu[i * n + i];
        }
        x
    }
}
