//! The anisotropic rotor `ẍ + (2ΩG + δD)ẋ + (P + Ω²G² + κK + νN)x = 0` and its builders.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numlin::RealMatrix;
use crate::scalar::Real;

/// Perturbation scales `(δ, κ, ν)` multiplying `D`, `K`, `N`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Scales<T> {
    pub delta: T,
    pub kappa: T,
    pub nu: T,
}

impl<T: Real> Scales<T> {
    pub fn new(delta: T, kappa: T, nu: T) -> Self {
        Self { delta, kappa, nu }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.delta == T::zero() && self.kappa == T::zero() && self.nu == T::zero()
    }
}

/// Real 2x2 sub-block `(s, t)` of a `2n x 2n` matrix (1-based mode indices).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block2x2<T> {
    pub m11: T,
    pub m12: T,
    pub m21: T,
    pub m22: T,
    pub s: usize,
    pub t: usize,
}

impl<T: Real> Block2x2<T> {
    pub fn trace(&self) -> T {
        self.m11 + self.m22
    }

    /// `tr(M I_{εσ})` with `I_{εσ} = diag(ε, σ)`.
    pub fn tr_i(&self, eps: T, sigma: T) -> T {
        eps * self.m11 + sigma * self.m22
    }

    /// `tr(M J_{εσ})` with `J_{εσ} = [[0, −σ], [ε, 0]]`.
    pub fn tr_j(&self, eps: T, sigma: T) -> T {
        eps * self.m12 - sigma * self.m21
    }

    pub fn transpose(&self) -> Self {
        Self { m11: self.m11, m12: self.m21, m21: self.m12, m22: self.m22, s: self.t, t: self.s }
    }

    /// Eigenvalues `(ρ1, ρ2)` with `ρ1 ≥ ρ2`; the block must be symmetric.
    pub fn symmetric_eigenvalues(&self) -> (T, T) {
        let half = T::lit(0.5);
        let mean = (self.m11 + self.m22) * half;
        let rad = ((self.m11 - self.m22) * half).hypot(self.m12);
        (mean + rad, mean - rad)
    }

    /// `tr(self · other)`.
    pub fn tr_product(&self, other: &Self) -> T {
        self.m11 * other.m11 + self.m12 * other.m21 + self.m21 * other.m12 + self.m22 * other.m22
    }
}

/// The 2x2 sub-block with rows `{2s−1, 2s}` and columns `{2t−1, 2t}` (1-based).
pub fn block<T: Real>(m: &RealMatrix<T>, s: usize, t: usize) -> Result<Block2x2<T>> {
    let n = m.rows() / 2;
    if s == 0 || t == 0 || s > n || t > n || m.cols() != m.rows() || m.rows() % 2 != 0 {
        return Err(Error::IndexOutOfRange(format!("block ({s}, {t}) of a {}x{} matrix", m.rows(), m.cols())));
    }
    let (r, c) = (2 * s - 2, 2 * t - 2);
    Ok(Block2x2 { m11: m[(r, c)], m12: m[(r, c + 1)], m21: m[(r + 1, c)], m22: m[(r + 1, c + 1)], s, t })
}

/// `blockdiag(J, 2J, …, nJ)` with `J = [[0, −1], [1, 0]]`.
pub fn gyro_matrix<T: Real>(n: usize) -> Result<RealMatrix<T>> {
    if n == 0 {
        return Err(Error::InvalidArgument("gyroscopic matrix needs n >= 1".into()));
    }
    let mut g = RealMatrix::zeros(2 * n, 2 * n);
    for s in 0..n {
        let w = T::from_count(s + 1);
        g[(2 * s, 2 * s + 1)] = -w;
        g[(2 * s + 1, 2 * s)] = w;
    }
    Ok(g)
}

/// `diag(ω1², ω1², …, ωn², ωn²)`.
pub fn stiffness_matrix<T: Real>(omegas: &[T]) -> RealMatrix<T> {
    let d: Vec<T> = omegas.iter().flat_map(|&w| [w * w, w * w]).collect();
    RealMatrix::diag(&d)
}

/// Validated rotor model. Construct through [`RotorModel::new`] or the loaders.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotorModel<T: Real> {
    n: usize,
    omegas: Vec<T>,
    delta: T,
    kappa: T,
    nu: T,
    #[serde(rename = "D")]
    d: RealMatrix<T>,
    #[serde(rename = "K")]
    k: RealMatrix<T>,
    #[serde(rename = "N")]
    n_mat: RealMatrix<T>,
}

#[derive(Deserialize)]
struct RawModel<T> {
    n: usize,
    omegas: Vec<T>,
    delta: T,
    kappa: T,
    nu: T,
    #[serde(rename = "D")]
    d: Vec<Vec<T>>,
    #[serde(rename = "K")]
    k: Vec<Vec<T>>,
    #[serde(rename = "N")]
    n_mat: Vec<Vec<T>>,
}

impl<T: Real> RotorModel<T> {
    /// Checks the invariants: exact symmetry of `D` and `K`, exact antisymmetry of `N`,
    /// positive strictly increasing frequencies. A violated gap condition only warns.
    pub fn new(
        omegas: Vec<T>,
        d: RealMatrix<T>,
        k: RealMatrix<T>,
        n_mat: RealMatrix<T>,
        scales: Scales<T>,
    ) -> Result<Self> {
        let n = omegas.len();
        if n == 0 {
            return Err(Error::InvalidModel("at least one mode is required".into()));
        }
        if omegas.iter().any(|w| !(w.is_finite() && *w > T::zero())) {
            return Err(Error::InvalidModel("frequencies must be positive and finite".into()));
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidModel("frequencies must be strictly increasing".into()));
        }
        for (name, m) in [("D", &d), ("K", &k), ("N", &n_mat)] {
            if m.rows() != 2 * n || m.cols() != 2 * n {
                return Err(Error::InvalidModel(format!(
                    "{name} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    2 * n,
                    2 * n
                )));
            }
        }
        if !d.is_symmetric() {
            return Err(Error::InvalidModel("D is not symmetric".into()));
        }
        if !k.is_symmetric() {
            return Err(Error::InvalidModel("K is not symmetric".into()));
        }
        if !n_mat.is_antisymmetric() {
            return Err(Error::InvalidModel("N is not antisymmetric".into()));
        }
        if ![scales.delta, scales.kappa, scales.nu].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidModel("scales must be finite".into()));
        }
        let model = Self { n, omegas, delta: scales.delta, kappa: scales.kappa, nu: scales.nu, d, k, n_mat };
        if !model.gap_condition_holds() {
            log::warn!("gap condition omega_(s+1) - omega_s >= omega_s/s is violated; regime labels lose their guarantee");
        }
        Ok(model)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    /// Frequency of mode `s` (1-based).
    pub fn omega(&self, s: usize) -> T {
        self.omegas[s - 1]
    }

    pub fn scales(&self) -> Scales<T> {
        Scales::new(self.delta, self.kappa, self.nu)
    }

    pub fn with_scales(&self, scales: Scales<T>) -> Self {
        Self { delta: scales.delta, kappa: scales.kappa, nu: scales.nu, ..self.clone() }
    }

    pub fn damping(&self) -> &RealMatrix<T> {
        &self.d
    }

    pub fn stiffness(&self) -> &RealMatrix<T> {
        &self.k
    }

    pub fn circulatory(&self) -> &RealMatrix<T> {
        &self.n_mat
    }

    pub fn gyro(&self) -> RealMatrix<T> {
        gyro_matrix(self.n).expect("n >= 1 by construction")
    }

    pub fn gap_condition_holds(&self) -> bool {
        self.omegas.iter().enumerate().zip(self.omegas.iter().skip(1)).all(|((i, &w), &next)| {
            next - w >= w / T::from_count(i + 1)
        })
    }

    /// `(C, K_full)` of the monic pencil at speed `omega` with the model's own scales.
    pub fn pencil_at(&self, omega: T) -> (RealMatrix<T>, RealMatrix<T>) {
        self.pencil_with(omega, self.scales())
    }

    pub fn pencil_with(&self, omega: T, sc: Scales<T>) -> (RealMatrix<T>, RealMatrix<T>) {
        let g = self.gyro();
        let c = g.scaled(omega + omega).add_scaled(sc.delta, &self.d);
        let kf = stiffness_matrix(&self.omegas)
            .add_scaled(omega * omega, &g.matmul(&g))
            .add_scaled(sc.kappa, &self.k)
            .add_scaled(sc.nu, &self.n_mat);
        (c, kf)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: RawModel<T> = serde_json::from_str(text)?;
        let m = Self::new(
            raw.omegas,
            RealMatrix::from_rows(&raw.d)?,
            RealMatrix::from_rows(&raw.k)?,
            RealMatrix::from_rows(&raw.n_mat)?,
            Scales::new(raw.delta, raw.kappa, raw.nu),
        )?;
        if m.n != raw.n {
            return Err(Error::InvalidModel(format!("n = {} but {} frequencies given", raw.n, m.n)));
        }
        Ok(m)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json_string()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn sym_from_upper<T: Real>(dim: usize, entries: &[(usize, usize, f64)]) -> RealMatrix<T> {
    let mut m = RealMatrix::zeros(dim, dim);
    for &(i, j, v) in entries {
        m[(i - 1, j - 1)] = T::lit(v);
        m[(j - 1, i - 1)] = T::lit(v);
    }
    m
}

fn from_f64_rows<T: Real>(rows: &[[f64; 6]; 6]) -> RealMatrix<T> {
    let rows: Vec<Vec<T>> = rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
    RealMatrix::from_rows(&rows).expect("static matrix")
}

/// The three-mode example with frequencies (1, 3, 6) and scales δ = 0.1, κ = 0.2, ν = 0.2.
pub fn example_6dof<T: Real>() -> RotorModel<T> {
    let k = sym_from_upper(
        6,
        &[
            (1, 1, 1.0),
            (1, 2, 2.0),
            (1, 3, 1.0),
            (1, 4, 2.0),
            (2, 2, 1.0),
            (2, 3, 3.0),
            (2, 4, 4.0),
            (3, 3, -3.0),
            (4, 4, -2.5),
            (5, 5, 4.0),
            (6, 6, 2.0),
        ],
    );
    let d = from_f64_rows(&[
        [-1.0, 2.0, 1.0, 7.0, 2.0, -2.0],
        [2.0, 3.0, -2.0, -4.0, 3.0, 1.0],
        [1.0, -2.0, 1.0, 8.0, 2.0, 1.0],
        [7.0, -4.0, 8.0, 3.0, -2.0, 3.0],
        [2.0, 3.0, 2.0, -2.0, 5.0, 5.0],
        [-2.0, 1.0, 1.0, 3.0, 5.0, 6.0],
    ]);
    let n = from_f64_rows(&[
        [0.0, -1.0, 1.0, -1.0, -3.0, 8.0],
        [1.0, 0.0, 2.0, 3.0, 2.0, 4.0],
        [-1.0, -2.0, 0.0, 7.0, 1.0, 3.0],
        [1.0, -3.0, -7.0, 0.0, 8.0, 2.0],
        [3.0, -2.0, -1.0, -8.0, 0.0, 2.0],
        [-8.0, -4.0, -3.0, -2.0, -2.0, 0.0],
    ]);
    let omegas = vec![T::one(), T::lit(3.0), T::lit(6.0)];
    RotorModel::new(omegas, d, k, n, Scales::new(T::lit(0.1), T::lit(0.2), T::lit(0.2))).expect("valid example")
}

/// Mass on two springs `k1`, `k1 + κ` and two dampers in a rotating frame with a
/// circulatory force `β r`, divided through by the mass.
pub fn shaft_model<T: Real>(m: T, k1: T, kappa: T, mu1: T, mu2: T, beta: T) -> Result<RotorModel<T>> {
    if !(m > T::zero()) || !(k1 > T::zero()) {
        return Err(Error::InvalidModel("shaft needs m > 0 and k1 > 0".into()));
    }
    let z = T::zero();
    let d = RealMatrix::diag(&[mu1 / m, mu2 / m]);
    let k = RealMatrix::diag(&[z, T::one() / m]);
    let n = RealMatrix::from_rows(&[vec![z, T::one()], vec![-T::one(), z]])?;
    RotorModel::new(vec![(k1 / m).sqrt()], d, k, n, Scales::new(T::one(), kappa, beta / m))
}
