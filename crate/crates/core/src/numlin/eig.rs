//! Nonsymmetric complex eigensolver: Householder reduction to Hessenberg form,
//! single-shift QR with deflation, eigenvectors by back-substitution on the
//! Schur factor, then residual-driven inverse iteration when needed.

use crate::error::{Error, Result};
use crate::numlin::lu::Lu;
use crate::numlin::ComplexMatrix;
use crate::scalar::{abs1, Cx, Real};

pub const MAX_DIMENSION: usize = 1024;

/// Eigenpairs of a square matrix. Eigenvectors have unit 2-norm.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub eigenvalues: Vec<Cx<T>>,
    pub eigenvectors: Vec<Vec<Cx<T>>>,
    /// `‖Av − λv‖₂` for each pair.
    pub residuals: Vec<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct EigOptions<T> {
    /// Residual target relative to `‖A‖_F`.
    pub residual_tol: T,
    /// Sweep budget per matrix dimension.
    pub sweeps_per_dim: usize,
}

impl<T: Real> Default for EigOptions<T> {
    fn default() -> Self {
        // 1e-9 in double precision; single precision cannot reach it.
        Self { residual_tol: T::lit(1e-9).max(T::epsilon() * T::lit(1e4)), sweeps_per_dim: 100 }
    }
}

/// All eigenvalues and eigenvectors of `a` with default options.
pub fn eig_dense<T: Real>(a: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    eig_dense_with(a, EigOptions::default())
}

pub fn eig_dense_with<T: Real>(a: &ComplexMatrix<T>, opts: EigOptions<T>) -> Result<EigenDecomposition<T>> {
    check_input(a)?;
    let n = a.rows();
    let mut h = a.clone();
    let mut z = ComplexMatrix::identity(n);
    hessenberg(&mut h, Some(&mut z));
    schur(&mut h, Some(&mut z), opts.sweeps_per_dim)?;
    let eigenvalues: Vec<Cx<T>> = (0..n).map(|i| h[(i, i)]).collect();
    let mut eigenvectors = schur_vectors(&h, &z);

    let anorm = a.frobenius_norm();
    let target = opts.residual_tol * anorm.max(T::min_positive_value());
    let mut residuals = Vec::with_capacity(n);
    for k in 0..n {
        let mut r = residual(a, eigenvalues[k], &eigenvectors[k]);
        if r > target {
            if let Some((v, rr)) = inverse_iteration(a, eigenvalues[k], &eigenvectors[k], anorm) {
                if rr < r {
                    eigenvectors[k] = v;
                    r = rr;
                }
            }
        }
        if r > target {
            log::debug!("eigenpair {k} residual {r} above target {target}");
        }
        residuals.push(r);
    }
    Ok(EigenDecomposition { eigenvalues, eigenvectors, residuals })
}

/// Eigenvalues only; skips Schur vector accumulation.
pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<Cx<T>>> {
    check_input(a)?;
    let mut h = a.clone();
    hessenberg(&mut h, None);
    schur(&mut h, None, EigOptions::<T>::default().sweeps_per_dim)?;
    Ok((0..a.rows()).map(|i| h[(i, i)]).collect())
}

fn check_input<T: Real>(a: &ComplexMatrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NonSquare { rows: a.rows(), cols: a.cols() });
    }
    if a.rows() > MAX_DIMENSION {
        return Err(Error::TooLarge(a.rows()));
    }
    Ok(())
}

fn zero<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::zero())
}

fn hessenberg<T: Real>(h: &mut ComplexMatrix<T>, mut z: Option<&mut ComplexMatrix<T>>) {
    let n = h.rows();
    let two = T::lit(2.0);
    for k in 0..n.saturating_sub(2) {
        let xnorm = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<T>().sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let phase = if x0.norm() == T::zero() { Cx::new(T::one(), T::zero()) } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let mut v: Vec<Cx<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        if vnorm == T::zero() {
            continue;
        }
        for c in v.iter_mut() {
            *c = *c / vnorm;
        }
        // H <- (I - 2vv*) H
        for j in k..n {
            let s = v.iter().enumerate().fold(zero::<T>(), |acc, (ii, vi)| acc + vi.conj() * h[(k + 1 + ii, j)]);
            for (ii, vi) in v.iter().enumerate() {
                h[(k + 1 + ii, j)] -= *vi * s * two;
            }
        }
        // H <- H (I - 2vv*)
        for i in 0..n {
            let s = v.iter().enumerate().fold(zero::<T>(), |acc, (jj, vj)| acc + h[(i, k + 1 + jj)] * *vj);
            for (jj, vj) in v.iter().enumerate() {
                h[(i, k + 1 + jj)] -= s * vj.conj() * two;
            }
        }
        if let Some(z) = z.as_deref_mut() {
            for i in 0..n {
                let s = v.iter().enumerate().fold(zero::<T>(), |acc, (jj, vj)| acc + z[(i, k + 1 + jj)] * *vj);
                for (jj, vj) in v.iter().enumerate() {
                    z[(i, k + 1 + jj)] -= s * vj.conj() * two;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = zero();
        }
    }
}

/// Givens rotation `[[c, s], [-conj(s), c]]` mapping `(x, y)` to `(r, 0)`.
fn givens<T: Real>(x: Cx<T>, y: Cx<T>) -> (T, Cx<T>) {
    let ay = y.norm();
    if ay == T::zero() {
        return (T::one(), zero());
    }
    let ax = x.norm();
    if ax == T::zero() {
        return (T::zero(), y.conj() / ay);
    }
    let r = ax.hypot(ay);
    (ax / r, (x / ax) * y.conj() / r)
}

fn schur<T: Real>(h: &mut ComplexMatrix<T>, mut z: Option<&mut ComplexMatrix<T>>, sweeps_per_dim: usize) -> Result<()> {
    let n = h.rows();
    if n == 0 {
        return Ok(());
    }
    let eps = T::epsilon();
    let hnorm = h.frobenius_norm();
    if hnorm == T::zero() {
        return Ok(());
    }
    let cap = sweeps_per_dim * n;
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let mut s = abs1(h[(l - 1, l - 1)]) + abs1(h[(l, l)]);
            if s == T::zero() {
                s = hnorm;
            }
            if abs1(h[(l, l - 1)]) <= eps * s {
                h[(l, l - 1)] = zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        total += 1;
        iter += 1;
        if total > cap {
            return Err(Error::NoConvergence { index: hi });
        }
        let shift = if iter % 10 == 0 {
            // Exceptional shift breaks cycles.
            h[(hi, hi)] + Cx::new(T::lit(0.75) * abs1(h[(hi, hi - 1)]), T::zero())
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = T::lit(0.5);
            let m = (a + d) * half;
            let disc = ((a - d) * half * ((a - d) * half) + b * c).sqrt();
            let (r1, r2) = (m + disc, m - disc);
            if (r1 - d).norm() <= (r2 - d).norm() {
                r1
            } else {
                r2
            }
        };
        let mut x = h[(l, l)] - shift;
        let mut y = h[(l + 1, l)];
        for k in l..hi {
            if k > l {
                x = h[(k, k - 1)];
                y = h[(k + 1, k - 1)];
            }
            let (c, s) = givens(x, y);
            let start = if k > l { k - 1 } else { l };
            for j in start..n {
                let hp = h[(k, j)];
                let hq = h[(k + 1, j)];
                h[(k, j)] = hp * c + s * hq;
                h[(k + 1, j)] = hq * c - s.conj() * hp;
            }
            let stop = (k + 2).min(hi);
            for i in 0..=stop {
                let hp = h[(i, k)];
                let hq = h[(i, k + 1)];
                h[(i, k)] = hp * c + hq * s.conj();
                h[(i, k + 1)] = hq * c - hp * s;
            }
            if let Some(z) = z.as_deref_mut() {
                for i in 0..n {
                    let zp = z[(i, k)];
                    let zq = z[(i, k + 1)];
                    z[(i, k)] = zp * c + zq * s.conj();
                    z[(i, k + 1)] = zq * c - zp * s;
                }
            }
            if k > l {
                h[(k + 1, k - 1)] = zero();
            }
        }
    }
    Ok(())
}

/// Eigenvectors of the upper triangular `t`, mapped back through `z`.
fn schur_vectors<T: Real>(t: &ComplexMatrix<T>, z: &ComplexMatrix<T>) -> Vec<Vec<Cx<T>>> {
    let n = t.rows();
    let tnorm = t.frobenius_norm();
    let smin = (T::epsilon() * tnorm).max(T::min_positive_value());
    let big = T::lit(1e100);
    (0..n)
        .map(|k| {
            let lk = t[(k, k)];
            let mut y = vec![zero(); n];
            y[k] = Cx::new(T::one(), T::zero());
            for j in (0..k).rev() {
                let sum = (j + 1..=k).fold(zero::<T>(), |acc, i| acc + t[(j, i)] * y[i]);
                let mut d = t[(j, j)] - lk;
                if d.norm() < smin {
                    d = Cx::new(smin, T::zero());
                }
                y[j] = -sum / d;
                if y[j].norm() > big {
                    let inv = T::one() / y[j].norm();
                    for v in y.iter_mut().take(k + 1) {
                        *v = *v * inv;
                    }
                }
            }
            let v = z.mul_vec(&y);
            normalize(v)
        })
        .collect()
}

fn normalize<T: Real>(mut v: Vec<Cx<T>>) -> Vec<Cx<T>> {
    let nrm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    if nrm > T::zero() {
        for c in v.iter_mut() {
            *c = *c / nrm;
        }
    }
    v
}

pub(crate) fn residual<T: Real>(a: &ComplexMatrix<T>, lambda: Cx<T>, v: &[Cx<T>]) -> T {
    a.mul_vec(v).iter().zip(v).map(|(av, vi)| (*av - lambda * vi).norm_sqr()).sum::<T>().sqrt()
}

fn inverse_iteration<T: Real>(
    a: &ComplexMatrix<T>,
    lambda: Cx<T>,
    start: &[Cx<T>],
    anorm: T,
) -> Option<(Vec<Cx<T>>, T)> {
    let n = a.rows();
    let mut shifted = a.clone();
    let nudge = T::epsilon() * T::lit(10.0) * anorm.max(T::one());
    for i in 0..n {
        shifted[(i, i)] -= lambda + Cx::new(nudge, nudge);
    }
    let lu = Lu::factor(&shifted, T::min_positive_value())?;
    let mut v = start.to_vec();
    let mut best: Option<(Vec<Cx<T>>, T)> = None;
    for _ in 0..3 {
        v = normalize(lu.solve(&v));
        if v.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            break;
        }
        let r = residual(a, lambda, &v);
        if best.as_ref().map_or(true, |(_, b)| r < *b) {
            best = Some((v.clone(), r));
        }
    }
    best
}
