//! The spectral mesh of the isotropic rotor: straight branches `i(αω_s + εsΩ)`,
//! their crossings, critical speeds and Krein signatures.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Mul, Neg};

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::RotorModel;
use crate::scalar::{i_unit, Cx, Real};

/// A sign `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }

    pub fn of<T: Real>(x: T) -> Self {
        if x < T::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn from_i32(v: i32) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_i32())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i32(self.as_i32())
    }
}

/// Branch label `(s, α, ε)` of the line `λ = i(αω_s + εsΩ)`. Its Krein signature is `α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Branch {
    pub s: usize,
    pub alpha: Sign,
    pub eps: Sign,
}

impl Branch {
    pub fn new(s: usize, alpha: Sign, eps: Sign) -> Self {
        Self { s, alpha, eps }
    }

    /// Speed coefficient `εs` of the branch.
    pub fn slope<T: Real>(&self) -> T {
        self.eps.value::<T>() * T::from_count(self.s)
    }

    /// Imaginary part `αω_s + εsΩ`.
    pub fn frequency<T: Real>(&self, omega_s: T, omega: T) -> T {
        self.alpha.value::<T>() * omega_s + self.slope::<T>() * omega
    }

    /// The branch of the complex-conjugate eigenvalue.
    pub fn conjugate(&self) -> Self {
        Self { s: self.s, alpha: -self.alpha, eps: -self.eps }
    }

    fn order_key(&self) -> (usize, i32, i32) {
        (self.s, -self.alpha.as_i32(), -self.eps.as_i32())
    }
}

pub fn branch_value<T: Real>(b: Branch, omega_s: T, omega: T) -> Cx<T> {
    Cx::new(T::zero(), b.frequency(omega_s, omega))
}

/// All `4n` branches ordered by `s`, then `α = +1` first, then `ε = +1` first.
pub fn all_branches(n: usize) -> Vec<Branch> {
    (1..=n)
        .flat_map(|s| {
            Sign::BOTH.into_iter().flat_map(move |a| Sign::BOTH.into_iter().map(move |e| Branch::new(s, a, e)))
        })
        .collect()
}

/// `(u⁺, u⁻)` with `u⁺` holding `−i` at entry `2s−1`, `1` at entry `2s`, and `u⁻ = conj(u⁺)`.
pub fn doublet_eigenvectors<T: Real>(s: usize, n: usize) -> Result<(Vec<Cx<T>>, Vec<Cx<T>>)> {
    if s == 0 || s > n {
        return Err(Error::IndexOutOfRange(format!("mode {s} of {n}")));
    }
    let mut u = vec![Cx::new(T::zero(), T::zero()); 2 * n];
    u[2 * s - 2] = -i_unit::<T>();
    u[2 * s - 1] = Cx::new(T::one(), T::zero());
    let conj = u.iter().map(|z| z.conj()).collect();
    Ok((u, conj))
}

/// Eigenvector of the branch: `u⁺` for `ε = +1`, `u⁻` for `ε = −1`, independent of `α`.
pub fn branch_eigenvector<T: Real>(b: Branch, n: usize) -> Result<Vec<Cx<T>>> {
    let (up, um) = doublet_eigenvectors(b.s, n)?;
    Ok(if b.eps == Sign::Plus { up } else { um })
}

/// `(ω_1/1, ω_2/2, …, ω_n/n)`.
pub fn critical_speeds<T: Real>(omegas: &[T]) -> Vec<T> {
    omegas.iter().enumerate().map(|(i, &w)| w / T::from_count(i + 1)).collect()
}

/// Smallest critical speed.
pub fn lowest_critical_speed<T: Real>(omegas: &[T]) -> T {
    critical_speeds(omegas).into_iter().fold(T::infinity(), T::min)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Subcritical,
    Supercritical,
    Critical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Subcritical => "subcritical",
            Regime::Supercritical => "supercritical",
            Regime::Critical => "critical",
        })
    }
}

/// A crossing `(Ω0, ω0)` of two branches.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Node<T> {
    pub id: usize,
    pub omega0: T,
    pub freq0: T,
    pub a: Branch,
    pub b: Branch,
    pub sig_product: Sign,
    pub regime: Regime,
    pub clustered: bool,
}

impl<T: Real> Node<T> {
    /// Builds the crossing of two branches, or `None` when they are parallel.
    pub fn from_branches(omegas: &[T], a: Branch, b: Branch) -> Option<Self> {
        let (sa, sb) = (a.slope::<T>(), b.slope::<T>());
        if sa == sb || a.s > omegas.len() || b.s > omegas.len() || a.s == 0 || b.s == 0 {
            return None;
        }
        let (wa, wb) = (omegas[a.s - 1], omegas[b.s - 1]);
        let omega0 = (a.alpha.value::<T>() * wa - b.alpha.value::<T>() * wb) / (sb - sa);
        let freq0 = a.frequency(wa, omega0);
        let tol = T::lit(1e-12) * (T::one() + wa.abs().max(wb.abs()));
        let regime = if freq0.abs() <= tol {
            Regime::Critical
        } else if omega0.abs() < lowest_critical_speed(omegas) {
            Regime::Subcritical
        } else {
            Regime::Supercritical
        };
        Some(Self { id: 0, omega0, freq0, a, b, sig_product: a.alpha * b.alpha, regime, clustered: false })
    }

    pub fn is_definite(&self) -> bool {
        self.sig_product == Sign::Plus
    }

    pub fn is_standstill(&self) -> bool {
        self.omega0 == T::zero()
    }

    /// Same crossing seen on the conjugate branches (`ω0 → −ω0`).
    pub fn conjugate(&self, omegas: &[T]) -> Self {
        let mut c = Self::from_branches(omegas, self.a.conjugate(), self.b.conjugate()).expect("same slopes");
        c.id = self.id;
        c.clustered = self.clustered;
        c
    }
}

/// All crossings with `Ω0` in `[lo, hi]`, sorted by `(Ω0, ω0)` and numbered from 0.
/// Without `include_negative_frequency` only nodes with `ω0 ≥ 0` are kept.
pub fn enumerate_nodes<T: Real>(omegas: &[T], range: (T, T), include_negative_frequency: bool) -> Vec<Node<T>> {
    let (lo, hi) = range;
    let scale = T::one().max(lo.abs()).max(hi.abs());
    let tol = T::lit(1e-12) * scale;
    let wmax = omegas.iter().fold(T::one(), |m, &w| m.max(w));
    let ftol = T::lit(1e-12) * wmax;
    let branches = all_branches(omegas.len());
    let mut nodes = Vec::new();
    for (i, &a) in branches.iter().enumerate() {
        for &b in &branches[i + 1..] {
            let Some(node) = Node::from_branches(omegas, a, b) else { continue };
            if node.omega0 < lo - tol || node.omega0 > hi + tol {
                continue;
            }
            if !include_negative_frequency && node.freq0 < -ftol {
                continue;
            }
            nodes.push(node);
        }
    }
    nodes.sort_by(|x, y| {
        x.omega0
            .partial_cmp(&y.omega0)
            .unwrap_or(Ordering::Equal)
            .then(x.freq0.partial_cmp(&y.freq0).unwrap_or(Ordering::Equal))
            .then(x.a.order_key().cmp(&y.a.order_key()))
            .then(x.b.order_key().cmp(&y.b.order_key()))
    });
    let close = |p: &Node<T>, q: &Node<T>| {
        (p.omega0 - q.omega0).abs() <= tol && (p.freq0 - q.freq0).abs() <= ftol.max(T::lit(1e-12))
    };
    for i in 0..nodes.len() {
        let hit = (0..nodes.len()).any(|j| j != i && close(&nodes[i], &nodes[j]));
        nodes[i].clustered = hit;
        nodes[i].id = i;
    }
    if nodes.iter().any(|n| n.clustered) {
        log::warn!("clustered nodes present; the two-branch theory is applied pairwise");
    }
    nodes
}

/// One sample of the analytic mesh.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshSample<T> {
    pub omega: T,
    pub branch: Branch,
    pub im_lambda: T,
}

/// Analytic branch values on a speed grid; `upper_only` keeps `Im λ ≥ 0`.
pub fn mesh_samples<T: Real>(omegas: &[T], grid: &[T], upper_only: bool) -> Vec<MeshSample<T>> {
    let branches = all_branches(omegas.len());
    let mut out = Vec::new();
    for &omega in grid {
        for &b in &branches {
            let im = b.frequency(omegas[b.s - 1], omega);
            if upper_only && im < T::zero() {
                continue;
            }
            out.push(MeshSample { omega, branch: b, im_lambda: im });
        }
    }
    out
}

/// The indefinite product `i[a, a] = 2 Im(x̄ᵀ(λx + ΩGx))` with `a = (x, λx + ΩGx)`.
pub fn krein_product<T: Real>(model: &RotorModel<T>, omega: T, lambda: Cx<T>, x: &[Cx<T>]) -> T {
    let g = model.gyro();
    let dim = x.len();
    let mut acc = Cx::new(T::zero(), T::zero());
    for i in 0..dim {
        let mut y = lambda * x[i];
        for j in 0..dim {
            y += x[j] * (g[(i, j)] * omega);
        }
        acc += x[i].conj() * y;
    }
    (acc.im) * T::lit(2.0)
}

/// Sign of the indefinite product. Needs a Hamiltonian model (`δ = ν = 0`; a stiffness
/// modification `κK` keeps the system Hamiltonian and is allowed).
pub fn krein_signature<T: Real>(model: &RotorModel<T>, omega: T, lambda: Cx<T>, x: &[Cx<T>]) -> Result<Sign> {
    let sc = model.scales();
    if sc.delta != T::zero() || sc.nu != T::zero() {
        return Err(Error::NonHamiltonian);
    }
    if x.len() != 2 * model.n() {
        return Err(Error::DimensionMismatch(format!("eigenvector length {} for n = {}", x.len(), model.n())));
    }
    let xn: T = x.iter().map(|z| z.norm_sqr()).sum();
    let scale = T::one().max(lambda.norm()).max(omega.abs() * T::from_count(model.n()));
    let tol = T::lit(1e-10) * scale;
    if lambda.im.abs() <= tol {
        return Err(Error::DegenerateSignature(format!("|Im lambda| = {} is below tolerance", lambda.im.abs())));
    }
    let p = krein_product(model, omega, lambda, x);
    if p.abs() <= tol * xn {
        return Err(Error::DegenerateSignature(format!("i[a,a] = {p}")));
    }
    Ok(Sign::of(p))
}
