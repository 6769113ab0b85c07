//! First-order splitting of a double eigenvalue `iω0` at a mesh node: the reduced 2x2
//! pencil, the closed-form coefficient `c`, MacKay cones and instability boundaries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{branch_eigenvector, Node, Sign};
use crate::model::{block, Block2x2, RotorModel, Scales};
use crate::numlin::RealMatrix;
use crate::scalar::{cx, i_unit, re, Cx, Real};

/// Coefficients `A1, A2, B1, B2` at given scales.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Coefficients<T> {
    pub a1: Cx<T>,
    pub a2: Cx<T>,
    pub b1: Cx<T>,
    pub b2: Cx<T>,
}

/// Local data of a node: the four relevant blocks and everything derived from them.
#[derive(Clone, Debug)]
pub struct NodeExpansion<T: Real> {
    pub node: Node<T>,
    pub omega_s: T,
    pub omega_t: T,
    /// Scales the stored coefficients were evaluated at.
    pub scales: Scales<T>,
    pub coeffs: Coefficients<T>,
    pub tr_k_ss: T,
    pub tr_k_tt: T,
    /// `tr(K_st J_{εσ})`.
    pub tr_k_st_j: T,
    /// `tr(K_st I_{εσ})`.
    pub tr_k_st_i: T,
    /// `I_{εσ} = diag(ε, σ)`.
    pub i_sign: [[T; 2]; 2],
    /// `J_{εσ} = [[0, −σ], [ε, 0]]`.
    pub j_sign: [[T; 2]; 2],
    pub d_ss: Block2x2<T>,
    pub d_tt: Block2x2<T>,
    pub d_st: Block2x2<T>,
    pub k_ss: Block2x2<T>,
    pub k_tt: Block2x2<T>,
    pub k_st: Block2x2<T>,
    pub n_st: Block2x2<T>,
    /// `n_{2s−1,2s}` and `n_{2t−1,2t}`.
    pub n_s: T,
    pub n_t: T,
}

/// Signs and integers of the node as scalars.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Labels<T> {
    pub s: T,
    pub t: T,
    pub alpha: T,
    pub beta: T,
    pub eps: T,
    pub sigma: T,
}

impl<T: Real> NodeExpansion<T> {
    pub(crate) fn labels(&self) -> Labels<T> {
        Labels {
            s: T::from_count(self.node.a.s),
            t: T::from_count(self.node.b.s),
            alpha: self.node.a.alpha.value(),
            beta: self.node.b.alpha.value(),
            eps: self.node.a.eps.value(),
            sigma: self.node.b.eps.value(),
        }
    }

    /// `A1, A2, B1, B2` at arbitrary scales with `λ0 = iω0`.
    pub fn coefficients(&self, sc: Scales<T>) -> Coefficients<T> {
        let Labels { eps, sigma, .. } = self.labels();
        let w0 = self.node.freq0;
        let two = T::lit(2.0);
        let a1 = cx(sc.kappa * self.tr_k_ss, sc.delta * w0 * self.d_ss.trace() + eps * two * sc.nu * self.n_s);
        let b1 = cx(sc.kappa * self.tr_k_tt, sc.delta * w0 * self.d_tt.trace() + sigma * two * sc.nu * self.n_t);
        // λ0 = iω0 turns i(δλ0 tr DJ) into the real part −δω0 tr DJ.
        let a2 = cx(
            sigma * sc.nu * self.n_st.tr_i(eps, sigma) - sc.delta * w0 * self.d_st.tr_j(eps, sigma),
            sc.kappa * self.tr_k_st_j,
        );
        let b2 = cx(
            sigma * sc.nu * self.n_st.tr_j(eps, sigma) + sc.delta * w0 * self.d_st.tr_i(eps, sigma),
            -sc.kappa * self.tr_k_st_i,
        );
        Coefficients { a1, a2, b1, b2 }
    }

    /// `c = Re c + i Im c` at speed offset `ΔΩ`, term by term as in the closed form.
    pub fn c_coefficient(&self, d_omega: T, sc: Scales<T>) -> Cx<T> {
        let Labels { s, t, alpha, beta, eps, sigma } = self.labels();
        let co = self.coefficients(sc);
        let (ws, wt) = (self.omega_s, self.omega_t);
        let kappa = sc.kappa;
        let (j, i) = (self.tr_k_st_j, self.tr_k_st_i);
        let c8 = T::lit(8.0);
        let wsw = ws * wt;
        let v = alpha * ws * co.b1.im - beta * wt * co.a1.im;

        let im_c = (alpha * wt * co.a1.im - beta * ws * co.b1.im) / (c8 * wsw) * (s * eps - t * sigma) * d_omega
            + kappa * (alpha * ws * self.tr_k_tt - beta * wt * self.tr_k_ss) * v / (T::lit(32.0) * wsw * wsw)
            - alpha * beta * kappa * (co.a2.re * j - co.b2.re * i) / (c8 * wsw);

        let lin = (t * sigma - s * eps) / T::lit(2.0) * d_omega
            + kappa * (beta * ws * self.tr_k_tt - alpha * wt * self.tr_k_ss) / (c8 * wsw);
        let re_c = lin * lin + alpha * beta * (j * j + i * i) / (T::lit(16.0) * wsw) * kappa * kappa
            - (v * v + T::lit(4.0) * alpha * beta * wsw * (co.a2.re * co.a2.re + co.b2.re * co.b2.re))
                / (T::lit(64.0) * wsw * wsw);
        cx(re_c, im_c)
    }

    /// Centre of the split pair: `iω0` shifted by the mean drift of both branches.
    pub fn base(&self, d_omega: T, sc: Scales<T>) -> Cx<T> {
        let Labels { s, t, alpha, beta, eps, sigma } = self.labels();
        let co = self.coefficients(sc);
        let (ws, wt) = (self.omega_s, self.omega_t);
        let c8 = T::lit(8.0);
        let re_part = -(co.a1.im / (alpha * ws) + co.b1.im / (beta * wt)) / c8;
        let im_part = self.node.freq0
            + d_omega / T::lit(2.0) * (s * eps + t * sigma)
            + sc.kappa / c8 * (self.tr_k_ss / (alpha * ws) + self.tr_k_tt / (beta * wt));
        cx(re_part, im_part)
    }

    /// `(λ₊, λ₋) = base ± i√c` with the principal root, so that
    /// `(Re λ − Re base)(Im λ − Im base) = −Im c / 2` on both members.
    pub fn eigen_approx(&self, omega: T, sc: Scales<T>) -> (Cx<T>, Cx<T>) {
        let d = omega - self.node.omega0;
        let base = self.base(d, sc);
        let r = i_unit::<T>() * self.c_coefficient(d, sc).sqrt();
        (base + r, base - r)
    }
}

/// Builds the expansion at `node` with the model's scales.
pub fn expansion_coefficients<T: Real>(node: &Node<T>, model: &RotorModel<T>) -> Result<NodeExpansion<T>> {
    let (s, t) = (node.a.s, node.b.s);
    if s > model.n() || t > model.n() {
        return Err(Error::IndexOutOfRange(format!("node modes ({s}, {t}) for n = {}", model.n())));
    }
    let (eps, sigma) = (node.a.eps.value::<T>(), node.b.eps.value::<T>());
    let k_st = block(model.stiffness(), s, t)?;
    let z = T::zero();
    let mut e = NodeExpansion {
        node: node.clone(),
        omega_s: model.omega(s),
        omega_t: model.omega(t),
        scales: model.scales(),
        coeffs: Coefficients { a1: re(z), a2: re(z), b1: re(z), b2: re(z) },
        tr_k_ss: block(model.stiffness(), s, s)?.trace(),
        tr_k_tt: block(model.stiffness(), t, t)?.trace(),
        tr_k_st_j: k_st.tr_j(eps, sigma),
        tr_k_st_i: k_st.tr_i(eps, sigma),
        i_sign: [[eps, z], [z, sigma]],
        j_sign: [[z, -sigma], [eps, z]],
        d_ss: block(model.damping(), s, s)?,
        d_tt: block(model.damping(), t, t)?,
        d_st: block(model.damping(), s, t)?,
        k_ss: block(model.stiffness(), s, s)?,
        k_tt: block(model.stiffness(), t, t)?,
        k_st,
        n_st: block(model.circulatory(), s, t)?,
        n_s: model.circulatory()[(2 * s - 2, 2 * s - 1)],
        n_t: model.circulatory()[(2 * t - 2, 2 * t - 1)],
    };
    e.coeffs = e.coefficients(e.scales);
    if node.clustered {
        log::warn!("node {} is clustered; expansion uses only its two labelled branches", node.id);
    }
    Ok(e)
}

/// `c` at the model's scales.
pub fn c_coefficient<T: Real>(node: &Node<T>, model: &RotorModel<T>, d_omega: T, sc: Scales<T>) -> Result<Cx<T>> {
    Ok(expansion_coefficients(node, model)?.c_coefficient(d_omega, sc))
}

pub fn eigen_approx<T: Real>(node: &Node<T>, model: &RotorModel<T>, omega: T, sc: Scales<T>) -> Result<(Cx<T>, Cx<T>)> {
    Ok(expansion_coefficients(node, model)?.eigen_approx(omega, sc))
}

/// 2x2 complex matrix `[[q00, q01], [q10, q11]]`.
pub type Mat2<T> = [[Cx<T>; 2]; 2];

fn bilinear<T: Real>(x: &[Cx<T>], m: &RealMatrix<T>, y: &[Cx<T>]) -> Cx<T> {
    let mut acc = re(T::zero());
    for i in 0..x.len() {
        let mut row = re(T::zero());
        for j in 0..y.len() {
            row += y[j] * m[(i, j)];
        }
        acc += x[i].conj() * row;
    }
    acc
}

/// `Q` and `R` from the doublet eigenvectors at the node, evaluated directly on the full
/// matrices at the model's scales.
pub fn reduced_pencil<T: Real>(node: &Node<T>, model: &RotorModel<T>, omega: T) -> Result<(Mat2<T>, Mat2<T>)> {
    reduced_pencil_with(node, model, omega, model.scales())
}

pub fn reduced_pencil_with<T: Real>(
    node: &Node<T>,
    model: &RotorModel<T>,
    omega: T,
    sc: Scales<T>,
) -> Result<(Mat2<T>, Mat2<T>)> {
    let n = model.n();
    let u = [branch_eigenvector::<T>(node.a, n)?, branch_eigenvector::<T>(node.b, n)?];
    let g = model.gyro();
    let g2 = g.matmul(&g);
    let eye = RealMatrix::identity(2 * n);
    let (w0, o0) = (node.freq0, node.omega0);
    let two = T::lit(2.0);
    let iw0 = cx(T::zero(), w0);
    let mut q = [[re(T::zero()); 2]; 2];
    let mut r = q;
    for x in 0..2 {
        for y in 0..2 {
            let (ux, uy) = (&u[x], &u[y]);
            let ug = bilinear(ux, &g, uy);
            q[x][y] = iw0 * two * bilinear(ux, &eye, uy) + ug * (two * o0);
            r[x][y] = (iw0 * two * ug + bilinear(ux, &g2, uy) * (two * o0)) * (omega - o0)
                + iw0 * bilinear(ux, model.damping(), uy) * sc.delta
                + bilinear(ux, model.stiffness(), uy) * sc.kappa
                + bilinear(ux, model.circulatory(), uy) * sc.nu;
        }
    }
    Ok((q, r))
}

/// Roots of `det(R + (λ − λ0)Q) = 0`.
pub fn pencil_roots<T: Real>(q: &Mat2<T>, r: &Mat2<T>, lambda0: Cx<T>) -> Result<(Cx<T>, Cx<T>)> {
    let a = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    let b = r[0][0] * q[1][1] + q[0][0] * r[1][1] - r[0][1] * q[1][0] - q[0][1] * r[1][0];
    let c = r[0][0] * r[1][1] - r[0][1] * r[1][0];
    let qn: T = q.iter().flatten().map(|z| z.norm_sqr()).sum();
    if a.norm() <= T::epsilon() * T::lit(100.0) * qn {
        return Err(Error::DegeneratePencil);
    }
    let disc = (b * b - a * c * T::lit(4.0)).sqrt();
    let half = T::lit(-0.5);
    let big = if (b.conj() * disc).re >= T::zero() { (b + disc) * half } else { (b - disc) * half };
    let (x1, x2) = if big.norm() == T::zero() { (re(T::zero()), re(T::zero())) } else { (big / a, c / big) };
    Ok((lambda0 + x1, lambda0 + x2))
}

/// Orientation of the Hamiltonian cone of imaginary parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConeOrientation {
    NearVertical,
    NearHorizontal,
}

/// `Re c = a_oo ΔΩ² + 2 a_ok ΔΩ κ + a_kk κ²` for `δ = ν = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadForm<T> {
    pub a_oo: T,
    pub a_ok: T,
    pub a_kk: T,
}

impl<T: Real> QuadForm<T> {
    pub fn eval(&self, d_omega: T, kappa: T) -> T {
        self.a_oo * d_omega * d_omega + T::lit(2.0) * self.a_ok * d_omega * kappa + self.a_kk * kappa * kappa
    }
}

/// The plane `Im λ = ω0 + kappa_slope κ + omega_slope ΔΩ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Plane<T> {
    pub kappa_slope: T,
    pub omega_slope: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MackayCone<T> {
    /// `(Ω0, 0, ω0)`.
    pub apex: (T, T, T),
    pub kappa_slope: T,
    pub omega_slope: T,
    pub re_c: QuadForm<T>,
    pub orientation: ConeOrientation,
    /// Attached membrane, present at mixed-signature nodes.
    pub membrane: Option<Plane<T>>,
}

fn require_hamiltonian<T: Real>(model: &RotorModel<T>) -> Result<()> {
    let sc = model.scales();
    if sc.delta != T::zero() || sc.nu != T::zero() {
        return Err(Error::NonHamiltonian);
    }
    Ok(())
}

pub fn mackay_cone<T: Real>(node: &Node<T>, model: &RotorModel<T>) -> Result<MackayCone<T>> {
    require_hamiltonian(model)?;
    let e = expansion_coefficients(node, model)?;
    let Labels { s, t, alpha, beta, eps, sigma } = e.labels();
    let (ws, wt) = (e.omega_s, e.omega_t);
    let c8 = T::lit(8.0);
    let kappa_slope = (e.tr_k_ss / (alpha * ws) + e.tr_k_tt / (beta * wt)) / c8;
    let omega_slope = (s * eps + t * sigma) / T::lit(2.0);
    let a = (t * sigma - s * eps) / T::lit(2.0);
    let b = (beta * ws * e.tr_k_tt - alpha * wt * e.tr_k_ss) / (c8 * ws * wt);
    let q = alpha * beta * (e.tr_k_st_j * e.tr_k_st_j + e.tr_k_st_i * e.tr_k_st_i) / (T::lit(16.0) * ws * wt);
    let mixed = node.sig_product == Sign::Minus;
    Ok(MackayCone {
        apex: (node.omega0, T::zero(), node.freq0),
        kappa_slope,
        omega_slope,
        re_c: QuadForm { a_oo: a * a, a_ok: a * b, a_kk: b * b + q },
        orientation: if mixed { ConeOrientation::NearHorizontal } else { ConeOrientation::NearVertical },
        membrane: mixed.then_some(Plane { kappa_slope, omega_slope }),
    })
}

/// A straight line `Ω − Ω0 = domega_per_kappa · κ` through the node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryLine<T> {
    pub domega_per_kappa: T,
}

impl<T: Real> BoundaryLine<T> {
    /// `κ` on the line at offset `ΔΩ`; `None` for the vertical line `Ω = Ω0`.
    pub fn kappa_at(&self, d_omega: T) -> Option<T> {
        (self.domega_per_kappa != T::zero()).then(|| d_omega / self.domega_per_kappa)
    }
}

/// The two lines `Re c = 0` bounding the unstable sector of a mixed-signature node.
pub fn instability_boundary<T: Real>(node: &Node<T>, model: &RotorModel<T>) -> Result<[BoundaryLine<T>; 2]> {
    if node.sig_product == Sign::Plus {
        return Err(Error::DefiniteNode);
    }
    require_hamiltonian(model)?;
    let e = expansion_coefficients(node, model)?;
    let Labels { s, t, alpha, beta, eps, sigma } = e.labels();
    let (ws, wt) = (e.omega_s, e.omega_t);
    let k = model.stiffness();
    let (r1, r2, c1, c2) = (2 * node.a.s - 2, 2 * node.a.s - 1, 2 * node.b.s - 2, 2 * node.b.s - 1);
    let den0 = (k[(c1, c1)] + k[(c2, c2)]) / (beta * wt) - (k[(r1, r1)] + k[(r2, r2)]) / (alpha * ws);
    let x = eps * k[(r1, c1)] + sigma * k[(r2, c2)];
    let y = eps * k[(r1, c2)] - sigma * k[(r2, c1)];
    let root = T::lit(2.0) * ((x * x + y * y) / (-alpha * beta * ws * wt)).sqrt();
    let num = T::lit(4.0) * (s * eps - t * sigma);
    Ok([
        BoundaryLine { domega_per_kappa: (den0 + root) / num },
        BoundaryLine { domega_per_kappa: (den0 - root) / num },
    ])
}

/// Half the distance in the `(Ω, ω)` plane to the nearest other node; beyond it the
/// two-branch expansion is not expected to hold.
pub fn validity_radius<T: Real>(node: &Node<T>, others: &[Node<T>]) -> Option<T> {
    others
        .iter()
        .filter(|o| o.omega0 != node.omega0 || o.freq0 != node.freq0)
        .map(|o| (o.omega0 - node.omega0).hypot(o.freq0 - node.freq0) / T::lit(2.0))
        .fold(None, |m: Option<T>, d| Some(m.map_or(d, |m| m.min(d))))
}
