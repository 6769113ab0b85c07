//! Exact spectra of the full pencil and the measurements that validate the
//! closed-form predictions against them.

mod assign;
#[cfg(test)]
mod properties;

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{all_branches, Node};
use crate::model::{RotorModel, Scales};
use crate::numlin::{companion_monic, eigenvalues};
use crate::perturb::{expansion_coefficients, pencil_roots, reduced_pencil_with, NodeExpansion};
use crate::scalar::{Cx, Real};

pub use assign::min_cost_assignment;

/// Exact spectrum at one speed. `track_ids[k]` labels `eigenvalues[k]` across a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumSample<T> {
    pub omega: T,
    pub scales: Scales<T>,
    pub eigenvalues: Vec<Cx<T>>,
    pub track_ids: Vec<usize>,
}

fn lex<T: Real>(a: &Cx<T>, b: &Cx<T>) -> Ordering {
    a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// All `4n` eigenvalues at speed `omega` with the model's scales, ordered by `(Im, Re)`.
pub fn exact_spectrum<T: Real>(model: &RotorModel<T>, omega: T) -> Result<SpectrumSample<T>> {
    exact_spectrum_with(model, omega, model.scales())
}

pub fn exact_spectrum_with<T: Real>(model: &RotorModel<T>, omega: T, sc: Scales<T>) -> Result<SpectrumSample<T>> {
    let (c, k) = model.pencil_with(omega, sc);
    let mut ev = eigenvalues(&companion_monic(&c, &k)?)?;
    ev.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal).then(lex(a, b)));
    let ids = (0..ev.len()).collect();
    Ok(SpectrumSample { omega, scales: sc, eigenvalues: ev, track_ids: ids })
}

/// Exact spectra on a sorted speed grid with continuity tracking. Grid points are solved
/// in parallel; tracking runs afterwards in grid order, so the result does not depend on
/// scheduling. Each step matches the linear extrapolation of every track to the new
/// eigenvalues by minimum total displacement.
pub fn sweep<T: Real>(model: &RotorModel<T>, grid: &[T], overrides: Option<Scales<T>>) -> Result<Vec<SpectrumSample<T>>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty speed grid".into()));
    }
    if grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("speed grid must be sorted".into()));
    }
    let sc = overrides.unwrap_or_else(|| model.scales());
    let raw: Vec<SpectrumSample<T>> =
        grid.par_iter().map(|&w| exact_spectrum_with(model, w, sc)).collect::<Result<Vec<_>>>()?;
    let mut out: Vec<SpectrumSample<T>> = Vec::with_capacity(raw.len());
    for mut cur in raw {
        if let Some(prev) = out.last() {
            let m = prev.eigenvalues.len();
            // Position of track id `k` in the previous sample, and a linear prediction.
            let mut prev_by_id = vec![Cx::new(T::zero(), T::zero()); m];
            for (pos, &id) in prev.track_ids.iter().enumerate() {
                prev_by_id[id] = prev.eigenvalues[pos];
            }
            let predicted: Vec<Cx<T>> = match out.len() {
                1 => prev_by_id.clone(),
                len => {
                    let pp = &out[len - 2];
                    let mut pp_by_id = vec![Cx::new(T::zero(), T::zero()); m];
                    for (pos, &id) in pp.track_ids.iter().enumerate() {
                        pp_by_id[id] = pp.eigenvalues[pos];
                    }
                    let h_prev = prev.omega - pp.omega;
                    let h_cur = cur.omega - prev.omega;
                    let r = if h_prev > T::zero() { h_cur / h_prev } else { T::zero() };
                    (0..m).map(|k| prev_by_id[k] + (prev_by_id[k] - pp_by_id[k]) * r).collect()
                }
            };
            let cost: Vec<Vec<T>> =
                predicted.iter().map(|p| cur.eigenvalues.iter().map(|e| (e - p).norm_sqr()).collect()).collect();
            let assignment = min_cost_assignment(&cost);
            let mut ids = vec![0usize; m];
            for (track, &pos) in assignment.iter().enumerate() {
                ids[pos] = track;
            }
            cur.track_ids = ids;
        }
        out.push(cur);
    }
    Ok(out)
}

/// Bottleneck distance between two equal-size multisets under the optimal matching.
pub fn multiset_distance<T: Real>(a: &[Cx<T>], b: &[Cx<T>]) -> T {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    let cost: Vec<Vec<T>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    min_cost_assignment(&cost).iter().enumerate().map(|(i, &j)| cost[i][j]).fold(T::zero(), T::max)
}

/// Unperturbed spectrum from the analytic branches.
pub fn analytic_spectrum<T: Real>(omegas: &[T], omega: T) -> Vec<Cx<T>> {
    all_branches(omegas.len()).iter().map(|b| Cx::new(T::zero(), b.frequency(omegas[b.s - 1], omega))).collect()
}

/// Half the distance from `iω0` to the nearest distinct unperturbed eigenvalue at `Ω0`.
pub fn search_radius<T: Real>(node: &Node<T>, omegas: &[T]) -> T {
    let tol = T::lit(1e-9) * (T::one() + node.freq0.abs());
    analytic_spectrum(omegas, node.omega0)
        .iter()
        .map(|z| (z.im - node.freq0).abs())
        .filter(|d| *d > tol)
        .fold(T::infinity(), T::min)
        / T::lit(2.0)
}

/// The two eigenvalues of `ev` nearest `target`, provided both lie within `radius`.
pub fn nearest_pair<T: Real>(ev: &[Cx<T>], target: Cx<T>, radius: T) -> Result<[Cx<T>; 2]> {
    let mut v: Vec<Cx<T>> = ev.to_vec();
    v.sort_by(|a, b| (a - target).norm().partial_cmp(&(b - target).norm()).unwrap_or(Ordering::Equal).then(lex(a, b)));
    let found = v.iter().filter(|z| (*z - target).norm() <= radius).count();
    if found < 2 {
        return Err(Error::InsufficientEigenvalues {
            found,
            radius: radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok([v[0], v[1]])
}

/// The two distinct entries of `ev` closest to `want[0]` and `want[1]` in total distance,
/// returned in the order of `want`.
pub fn matched_pair<T: Real>(ev: &[Cx<T>], want: [Cx<T>; 2]) -> [Cx<T>; 2] {
    let nan = Cx::new(T::nan(), T::nan());
    let mut best = (T::infinity(), [nan, nan]);
    for (i, a) in ev.iter().enumerate() {
        for (j, b) in ev.iter().enumerate() {
            if i == j {
                continue;
            }
            let cost = (*a - want[0]).norm() + (*b - want[1]).norm();
            if cost < best.0 {
                best = (cost, [*a, *b]);
            }
        }
    }
    best.1
}

/// Hausdorff distance between two pairs.
pub fn pair_distance<T: Real>(a: [Cx<T>; 2], b: [Cx<T>; 2]) -> T {
    let d = |x: Cx<T>, set: [Cx<T>; 2]| (x - set[0]).norm().min((x - set[1]).norm());
    d(a[0], b).max(d(a[1], b)).max(d(b[0], a)).max(d(b[1], a))
}

/// Distance between the closed-form pair and its matched exact eigenvalues. Each exact
/// eigenvalue must lie within [`search_radius`] of its prediction.
pub fn approx_error<T: Real>(node: &Node<T>, model: &RotorModel<T>, omega: T, sc: Scales<T>) -> Result<T> {
    let e = expansion_coefficients(node, model)?;
    approx_error_with(&e, model, omega, sc)
}

pub(crate) fn approx_error_with<T: Real>(e: &NodeExpansion<T>, model: &RotorModel<T>, omega: T, sc: Scales<T>) -> Result<T> {
    let node = &e.node;
    let ex = exact_spectrum_with(model, omega, sc)?;
    let (l1, l2) = e.eigen_approx(omega, sc);
    let radius = search_radius(node, model.omegas());
    let pair = matched_pair(&ex.eigenvalues, [l1, l2]);
    let found = pair.iter().zip([l1, l2]).filter(|(x, l)| (*x - l).norm() <= radius).count();
    if found < 2 {
        return Err(Error::InsufficientEigenvalues { found, radius: radius.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(pair_distance([l1, l2], pair))
}

/// Distance between the roots of the reduced pencil `det(R + (λ − λ0)Q) = 0` and the
/// closed-form pair, relative to `max(1, |λ0|)`. Both are first-order objects, so they agree
/// to rounding.
pub fn two_path_discrepancy<T: Real>(node: &Node<T>, model: &RotorModel<T>, omega: T, sc: Scales<T>) -> Result<T> {
    let e = expansion_coefficients(node, model)?;
    let (q, r) = reduced_pencil_with(node, model, omega, sc)?;
    let l0 = Cx::new(T::zero(), node.freq0);
    let (p1, p2) = pencil_roots(&q, &r, l0)?;
    let (a1, a2) = e.eigen_approx(omega, sc);
    Ok(pair_distance([p1, p2], [a1, a2]) / T::one().max(l0.norm()))
}

/// Direction in `(κ, δ, ν, ΔΩ)` along which all four are scaled by `h`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Direction<T> {
    pub kappa: T,
    pub delta: T,
    pub nu: T,
    pub d_omega: T,
}

impl<T: Real> Direction<T> {
    pub fn new(kappa: T, delta: T, nu: T, d_omega: T) -> Self {
        Self { kappa, delta, nu, d_omega }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorReport<T> {
    pub node_id: usize,
    pub h_values: Vec<T>,
    pub errors: Vec<T>,
    pub fitted_slope: T,
}

/// Least-squares slope of `log error` against `log h`. Errors below `1e-13` are left out
/// of the fit; fewer than two usable points reject the fit.
pub fn convergence_order<T: Real>(
    node: &Node<T>,
    model: &RotorModel<T>,
    dir: Direction<T>,
    h_list: &[T],
) -> Result<ErrorReport<T>> {
    if h_list.len() < 3 {
        return Err(Error::InvalidArgument("need at least three step sizes".into()));
    }
    if h_list.iter().any(|h| !(*h > T::zero())) || h_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("step sizes must be positive and decreasing".into()));
    }
    let e = expansion_coefficients(node, model)?;
    let errors = h_list
        .iter()
        .map(|&h| {
            let sc = Scales::new(dir.delta * h, dir.kappa * h, dir.nu * h);
            approx_error_with(&e, model, node.omega0 + dir.d_omega * h, sc)
        })
        .collect::<Result<Vec<T>>>()?;
    let floor = T::lit(1e-13);
    let pts: Vec<(T, T)> =
        h_list.iter().zip(&errors).filter(|(_, e)| **e >= floor).map(|(h, e)| (h.ln(), e.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::FitRejected(format!("{} of {} errors above the 1e-13 floor", pts.len(), errors.len())));
    }
    let fitted_slope = ls_slope(&pts);
    Ok(ErrorReport { node_id: node.id, h_values: h_list.to_vec(), errors, fitted_slope })
}

pub(crate) fn ls_slope<T: Real>(pts: &[(T, T)]) -> T {
    let n = T::from_count(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}
