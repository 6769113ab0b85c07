//! Exceptional points of the split pair, the branch-cut line `Im c = 0`, the unfolding
//! classification by the signs of the discriminants, and the standstill-node formulas.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::{Branch, Node, Sign};
use crate::model::{RotorModel, Scales};
use crate::perturb::{expansion_coefficients, NodeExpansion};
use crate::scalar::Real;

const REL_DEGENERATE: f64 = 1e-12;

/// `U`, `D_disc`, `N_disc`. When `α ω_s Im B1 = β ω_t Im A1` the ratio `U` is infinite and
/// so is `D_disc`; the EP loci stay finite and are computed from a rescaled form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Discriminants<T> {
    pub u: T,
    pub d_disc: T,
    pub n_disc: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum UnfoldingClass {
    #[serde(rename = "IM_COFFEE_FILTER_RE_VIADUCT")]
    ImCoffeeFilterReViaduct,
    #[serde(rename = "IM_VIADUCT_RE_COFFEE_FILTER")]
    ImViaductReCoffeeFilter,
    #[serde(rename = "IM_CROSS_RE_SEPARATE")]
    ImCrossReSeparate,
    #[serde(rename = "IM_SEPARATE_RE_CROSS")]
    ImSeparateReCross,
}

impl UnfoldingClass {
    pub fn tag(self) -> &'static str {
        match self {
            Self::ImCoffeeFilterReViaduct => "IM_COFFEE_FILTER_RE_VIADUCT",
            Self::ImViaductReCoffeeFilter => "IM_VIADUCT_RE_COFFEE_FILTER",
            Self::ImCrossReSeparate => "IM_CROSS_RE_SEPARATE",
            Self::ImSeparateReCross => "IM_SEPARATE_RE_CROSS",
        }
    }
}

impl fmt::Display for UnfoldingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// EP loci in the `(Ω, κ)` plane. Coordinates are NaN when `exists` is false; both points
/// sit at `(Ω0, 0)` when `N_disc` vanishes. `classification` is `None` at degenerate
/// boundaries of the mixed-signature table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExceptionalPointPair<T> {
    pub omega_ep_plus: T,
    pub kappa_ep_plus: T,
    pub omega_ep_minus: T,
    pub kappa_ep_minus: T,
    pub exists: bool,
    pub discriminants: Discriminants<T>,
    pub classification: Option<UnfoldingClass>,
}

/// Raw terms behind the discriminants, all free of `κ` and `ΔΩ`.
#[derive(Clone, Copy, Debug)]
struct Terms<T> {
    /// `Re A2 tr(K_st J) − Re B2 tr(K_st I)`.
    p: T,
    /// `α ω_s Im B1 − β ω_t Im A1`.
    v: T,
    /// `αβ (tr(K_st J)² + tr(K_st I)²) / (4 ω_s ω_t)`.
    x: T,
    /// `α ω_t tr K_ss − β ω_s tr K_tt`.
    y: T,
    n_disc: T,
    n_scale: T,
    /// `D_disc · v²`.
    d_scaled: T,
    d_scale: T,
    w4: T,
    denom_speed: T,
    alpha_beta: T,
}

fn terms<T: Real>(e: &NodeExpansion<T>, delta: T, nu: T) -> Terms<T> {
    let co = e.coefficients(Scales::new(delta, T::zero(), nu));
    let (alpha, beta) = (e.node.a.alpha.value::<T>(), e.node.b.alpha.value::<T>());
    let (eps, sigma) = (e.node.a.eps.value::<T>(), e.node.b.eps.value::<T>());
    let (s, t) = (T::from_count(e.node.a.s), T::from_count(e.node.b.s));
    let (ws, wt) = (e.omega_s, e.omega_t);
    let (j, i) = (e.tr_k_st_j, e.tr_k_st_i);
    let ab = alpha * beta;
    let w4 = T::lit(4.0) * ws * wt;
    let p = co.a2.re * j - co.b2.re * i;
    let v = alpha * ws * co.b1.im - beta * wt * co.a1.im;
    let x = ab * (j * j + i * i) / w4;
    let a2b2 = (co.a2.re * co.a2.re + co.b2.re * co.b2.re) / w4;
    let n_disc = (v / w4) * (v / w4) + ab * a2b2;
    Terms {
        p,
        v,
        x,
        y: alpha * wt * e.tr_k_ss - beta * ws * e.tr_k_tt,
        n_disc,
        n_scale: (v / w4) * (v / w4) + a2b2,
        d_scaled: p * p + x * v * v,
        d_scale: p * p + x.abs() * v * v,
        w4,
        denom_speed: w4 * (t * sigma - s * eps),
        alpha_beta: ab,
    }
}

fn is_negligible<T: Real>(x: T, scale: T) -> bool {
    x.abs() <= T::lit(REL_DEGENERATE) * scale
}

fn discriminants<T: Real>(tm: &Terms<T>) -> Discriminants<T> {
    let (u, d_disc) = if tm.v == T::zero() {
        let inf = if tm.p == T::zero() { T::nan() } else { T::infinity() };
        (if tm.p < T::zero() { -inf } else { inf }, inf)
    } else {
        let u = tm.p / tm.v;
        (u, u * u + tm.x)
    };
    Discriminants { u, d_disc, n_disc: tm.n_disc }
}

fn classify_terms<T: Real>(node: &Node<T>, tm: &Terms<T>) -> Result<UnfoldingClass> {
    if node.sig_product == Sign::Plus {
        return Ok(UnfoldingClass::ImCoffeeFilterReViaduct);
    }
    if tm.d_scale == T::zero() || is_negligible(tm.d_scaled, tm.d_scale) {
        return Err(Error::DegenerateDiscriminant("D_disc vanishes".into()));
    }
    if is_negligible(tm.n_disc, tm.n_scale) {
        return Err(Error::DegenerateDiscriminant("N_disc vanishes".into()));
    }
    let d_pos = tm.d_scaled > T::zero();
    let n_pos = tm.n_disc > T::zero();
    Ok(match (d_pos, n_pos) {
        (true, true) => UnfoldingClass::ImCoffeeFilterReViaduct,
        (false, false) => UnfoldingClass::ImViaductReCoffeeFilter,
        (_, true) => UnfoldingClass::ImCrossReSeparate,
        (_, false) => UnfoldingClass::ImSeparateReCross,
    })
}

fn check_perturbation<T: Real>(delta: T, nu: T) -> Result<()> {
    if delta == T::zero() && nu == T::zero() {
        return Err(Error::ZeroPerturbation);
    }
    Ok(())
}

/// EP loci for dissipation `δ` and circulation `ν`, with `κ` as the unfolding parameter.
pub fn exceptional_points<T: Real>(node: &Node<T>, model: &RotorModel<T>, delta: T, nu: T) -> Result<ExceptionalPointPair<T>> {
    check_perturbation(delta, nu)?;
    let e = expansion_coefficients(node, model)?;
    ep_from_expansion(&e, delta, nu)
}

pub(crate) fn ep_from_expansion<T: Real>(e: &NodeExpansion<T>, delta: T, nu: T) -> Result<ExceptionalPointPair<T>> {
    let tm = terms(e, delta, nu);
    if tm.d_scale == T::zero() || is_negligible(tm.d_scaled, tm.d_scale) {
        return Err(Error::DegenerateDiscriminant(format!(
            "D_disc vanishes at node {} (no usable stiffness coupling)",
            e.node.id
        )));
    }
    let disc = discriminants(&tm);
    let classification = classify_terms(&e.node, &tm).ok();
    let nan = T::nan();
    let o0 = e.node.omega0;
    if is_negligible(tm.n_disc, tm.n_scale) {
        return Ok(ExceptionalPointPair {
            omega_ep_plus: o0,
            kappa_ep_plus: T::zero(),
            omega_ep_minus: o0,
            kappa_ep_minus: T::zero(),
            exists: true,
            discriminants: disc,
            classification,
        });
    }
    let ratio = tm.n_disc / tm.d_scaled;
    if ratio <= T::zero() {
        return Ok(ExceptionalPointPair {
            omega_ep_plus: nan,
            kappa_ep_plus: nan,
            omega_ep_minus: nan,
            kappa_ep_minus: nan,
            exists: false,
            discriminants: disc,
            classification,
        });
    }
    let root = ratio.sqrt();
    let sgn_v = if tm.v < T::zero() { -T::one() } else { T::one() };
    let kappa = tm.v.abs() * root;
    let off = (tm.w4 * tm.p * sgn_v + tm.y * tm.v.abs()) * root / tm.denom_speed;
    Ok(ExceptionalPointPair {
        omega_ep_plus: o0 + off,
        kappa_ep_plus: kappa,
        omega_ep_minus: o0 - off,
        kappa_ep_minus: -kappa,
        exists: true,
        discriminants: disc,
        classification,
    })
}

pub fn discriminants_at<T: Real>(node: &Node<T>, model: &RotorModel<T>, delta: T, nu: T) -> Result<Discriminants<T>> {
    let e = expansion_coefficients(node, model)?;
    Ok(discriminants(&terms(&e, delta, nu)))
}

pub fn classify_unfolding<T: Real>(node: &Node<T>, model: &RotorModel<T>, delta: T, nu: T) -> Result<UnfoldingClass> {
    check_perturbation(delta, nu)?;
    let e = expansion_coefficients(node, model)?;
    classify_terms(node, &terms(&e, delta, nu))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CutKind {
    /// `Re c < 0`: imaginary parts coincide, real parts differ.
    Imaginary,
    /// `Re c > 0`: real parts coincide, imaginary parts differ.
    Real,
}

/// Piece of the line between parameters `from` and `to`; `None` is unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CutSegment<T> {
    pub from: Option<T>,
    pub to: Option<T>,
    pub kind: CutKind,
}

/// The line `Im c = 0` through `(Ω0, 0)`, parametrized by arc length `τ` along the unit
/// `direction` (oriented with `dκ ≥ 0`). Along it `Re c(τ) = re_c_quadratic τ² − N_disc/4`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchCut<T> {
    /// `(∂ Im c/∂Ω, ∂ Im c/∂κ)`.
    pub normal: (T, T),
    pub direction: (T, T),
    pub apex: (T, T),
    pub re_c_quadratic: T,
    pub n_disc: T,
    /// `τ` of the EP at positive parameter; the other EP sits at `−τ`.
    pub ep_param: Option<T>,
    pub segments: Vec<CutSegment<T>>,
}

impl<T: Real> BranchCut<T> {
    pub fn point_at(&self, tau: T) -> (T, T) {
        (self.apex.0 + tau * self.direction.0, self.apex.1 + tau * self.direction.1)
    }

    pub fn re_c_at(&self, tau: T) -> T {
        self.re_c_quadratic * tau * tau - self.n_disc / T::lit(4.0)
    }
}

pub fn branch_cut_line<T: Real>(node: &Node<T>, model: &RotorModel<T>, delta: T, nu: T) -> Result<BranchCut<T>> {
    check_perturbation(delta, nu)?;
    let e = expansion_coefficients(node, model)?;
    let tm = terms(&e, delta, nu);
    let co = e.coefficients(Scales::new(delta, T::zero(), nu));
    let (alpha, beta) = (node.a.alpha.value::<T>(), node.b.alpha.value::<T>());
    let (eps, sigma) = (node.a.eps.value::<T>(), node.b.eps.value::<T>());
    let (s, t) = (T::from_count(node.a.s), T::from_count(node.b.s));
    let (ws, wt) = (e.omega_s, e.omega_t);
    let wsw = ws * wt;
    let c8 = T::lit(8.0);
    let g_o_lead = alpha * wt * co.a1.im - beta * ws * co.b1.im;
    let g_omega = g_o_lead / (c8 * wsw) * (s * eps - t * sigma);
    let tr_mix = alpha * ws * e.tr_k_tt - beta * wt * e.tr_k_ss;
    let g_kappa_1 = tr_mix * tm.v / (T::lit(32.0) * wsw * wsw);
    let g_kappa_2 = tm.alpha_beta * tm.p / (c8 * wsw);
    let g_kappa = g_kappa_1 - g_kappa_2;
    let scale = (g_o_lead.abs() / (c8 * wsw) * (s * eps - t * sigma).abs()) + g_kappa_1.abs() + g_kappa_2.abs();
    let norm = g_omega.hypot(g_kappa);
    if scale == T::zero() || norm <= T::lit(REL_DEGENERATE) * scale {
        return Err(Error::DegenerateLine);
    }
    let (mut d_o, mut d_k) = (g_kappa / norm, -g_omega / norm);
    if d_k < T::zero() || (d_k == T::zero() && d_o < T::zero()) {
        d_o = -d_o;
        d_k = -d_k;
    }
    let a = (t * sigma - s * eps) / T::lit(2.0);
    let b = (beta * ws * e.tr_k_tt - alpha * wt * e.tr_k_ss) / (c8 * wsw);
    let q = tm.alpha_beta * (e.tr_k_st_j * e.tr_k_st_j + e.tr_k_st_i * e.tr_k_st_i) / (T::lit(16.0) * wsw);
    let lin = a * d_o + b * d_k;
    let quad = lin * lin + q * d_k * d_k;
    let n = tm.n_disc;
    let kind_of = |re_c_negative: bool| if re_c_negative { CutKind::Imaginary } else { CutKind::Real };
    let (ep_param, segments) = if !is_negligible(n, tm.n_scale) && quad != T::zero() && (n / quad) > T::zero() {
        let tau = (n / (T::lit(4.0) * quad)).sqrt();
        // Re c(0) = −N/4: the inner segment has the sign of −N.
        let inner = kind_of(n > T::zero());
        let outer = kind_of(n < T::zero());
        (
            Some(tau),
            vec![
                CutSegment { from: None, to: Some(-tau), kind: outer },
                CutSegment { from: Some(-tau), to: Some(tau), kind: inner },
                CutSegment { from: Some(tau), to: None, kind: outer },
            ],
        )
    } else {
        let negative = if is_negligible(n, tm.n_scale) { quad < T::zero() } else { n > T::zero() };
        (None, vec![CutSegment { from: None, to: None, kind: kind_of(negative) }])
    };
    Ok(BranchCut {
        normal: (g_omega, g_kappa),
        direction: (d_o, d_k),
        apex: (node.omega0, T::zero()),
        re_c_quadratic: quad,
        n_disc: n,
        ep_param,
        segments,
    })
}

/// Which perturbation acts at a standstill node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AxisMode {
    PureNu,
    PureDelta,
}

/// Standstill node of mode `s`: branches `(s, +1, +1)` and `(s, +1, −1)` at `(0, ω_s)`.
pub fn standstill_node<T: Real>(model: &RotorModel<T>, s: usize) -> Result<Node<T>> {
    if s == 0 || s > model.n() {
        return Err(Error::IndexOutOfRange(format!("mode {s} of {}", model.n())));
    }
    Ok(Node::from_branches(model.omegas(), Branch::new(s, Sign::Plus, Sign::Plus), Branch::new(s, Sign::Plus, Sign::Minus))
        .expect("distinct slopes"))
}

struct AxisData<T> {
    omega_s: T,
    s: T,
    rho_gap: T,
    mu_gap: T,
    n12: T,
    tr_k: T,
    tr_d: T,
    gamma: T,
}

fn axis_data<T: Real>(model: &RotorModel<T>, s: usize) -> Result<(Node<T>, AxisData<T>)> {
    let node = standstill_node(model, s)?;
    let e = expansion_coefficients(&node, model)?;
    let (r1, r2) = e.k_ss.symmetric_eigenvalues();
    let (m1, m2) = e.d_ss.symmetric_eigenvalues();
    let gamma = T::lit(2.0) * e.k_ss.tr_product(&e.d_ss) - e.k_ss.trace() * e.d_ss.trace();
    Ok((
        node,
        AxisData {
            omega_s: e.omega_s,
            s: T::from_count(s),
            rho_gap: r1 - r2,
            mu_gap: m1 - m2,
            n12: e.n_s,
            tr_k: e.tr_k_ss,
            tr_d: e.d_ss.trace(),
            gamma,
        },
    ))
}

fn kappa_ep_nu<T: Real>(d: &AxisData<T>, nu: T) -> Result<T> {
    let scale = d.rho_gap.abs().max(d.tr_k.abs()).max(T::min_positive_value());
    if is_negligible(d.rho_gap, scale) {
        return Err(Error::IsotropicBlock);
    }
    Ok(T::lit(2.0) * nu * d.n12 / d.rho_gap)
}

/// Closed-form EPs at the standstill node of mode `s`. `PureNu` uses the model's `ν`
/// (with `δ = 0`), `PureDelta` its `δ` (with `ν = 0`).
pub fn axis_node_ep<T: Real>(s: usize, model: &RotorModel<T>, mode: AxisMode) -> Result<ExceptionalPointPair<T>> {
    let (node, d) = axis_data(model, s)?;
    let sc = model.scales();
    let (delta, nu) = match mode {
        AxisMode::PureNu => (T::zero(), sc.nu),
        AxisMode::PureDelta => (sc.delta, T::zero()),
    };
    check_perturbation(delta, nu)?;
    let (omega, kappa) = match mode {
        AxisMode::PureNu => (T::zero(), kappa_ep_nu(&d, nu)?),
        AxisMode::PureDelta => (delta * d.mu_gap / (T::lit(4.0) * d.s), T::zero()),
    };
    let e = expansion_coefficients(&node, model)?;
    let tm = terms(&e, delta, nu);
    Ok(ExceptionalPointPair {
        omega_ep_plus: omega,
        kappa_ep_plus: kappa,
        omega_ep_minus: -omega,
        kappa_ep_minus: -kappa,
        exists: true,
        discriminants: discriminants(&tm),
        classification: Some(UnfoldingClass::ImCoffeeFilterReViaduct),
    })
}

/// Regimes of the standstill expansions. The parameter is the free coordinate: `κ` for
/// the circulatory cases (evaluated at speed `Ω`), `Ω` for the dissipative ones.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum AxisCase<T> {
    /// `κ² > κ_EP²`: real parts cross at `Ω = 0`.
    NuCross { kappa: T, omega: T },
    /// `κ² < κ_EP²`: real parts avoid crossing.
    NuAvoid { kappa: T },
    /// `κ = κ_EP`: square-root touching; `Ω` must have the sign of `ν n_{2s−1,2s}`.
    NuAtEp { omega: T },
    /// `Ω² > Ω_EP²`.
    DeltaCut { omega: T, kappa: T },
    /// `Ω² < Ω_EP²`.
    DeltaAvoid { omega: T, kappa: T },
    /// `Ω = Ω_EP`.
    DeltaAtEp { kappa: T },
}

/// Leading-order prediction `Re λ = re_center ± re_split`, `Im λ = im_center ± im_split`.
/// `im_center`/`im_split` are absent where the expansion only describes real parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisAsymptotics<T> {
    pub re_center: T,
    pub re_split: T,
    pub im_center: Option<T>,
    pub im_split: Option<T>,
    pub kappa_ep: T,
    pub omega_ep: T,
    /// `2 tr(K_ss D_ss) − tr K_ss tr D_ss`.
    pub gamma: T,
}

pub fn axis_node_asymptotics<T: Real>(s: usize, model: &RotorModel<T>, case: AxisCase<T>) -> Result<AxisAsymptotics<T>> {
    let (_, d) = axis_data(model, s)?;
    let sc = model.scales();
    let (two, four, sixteen) = (T::lit(2.0), T::lit(4.0), T::lit(16.0));
    let mismatch = |what: &str| Err(Error::RegimeMismatch(what.to_string()));
    let nu_case = matches!(case, AxisCase::NuCross { .. } | AxisCase::NuAvoid { .. } | AxisCase::NuAtEp { .. });
    let mut out = AxisAsymptotics {
        re_center: T::zero(),
        re_split: T::zero(),
        im_center: None,
        im_split: None,
        kappa_ep: T::zero(),
        omega_ep: T::zero(),
        gamma: d.gamma,
    };
    if nu_case {
        if sc.nu == T::zero() {
            return mismatch("circulatory case needs nu != 0");
        }
        let kep = kappa_ep_nu(&d, sc.nu)?;
        out.kappa_ep = kep.abs();
        match case {
            AxisCase::NuCross { kappa, omega } => {
                if kappa * kappa <= kep * kep {
                    return mismatch("nu_cross needs kappa^2 > kappa_EP^2");
                }
                out.re_split = (two * sc.nu * d.s * d.n12 / (d.rho_gap * (kappa * kappa - kep * kep).sqrt()) * omega).abs();
            }
            AxisCase::NuAvoid { kappa } => {
                if kappa * kappa >= kep * kep {
                    return mismatch("nu_avoid needs kappa^2 < kappa_EP^2");
                }
                out.re_split = (d.rho_gap / (four * d.omega_s)).abs() * (kep * kep - kappa * kappa).sqrt();
            }
            AxisCase::NuAtEp { omega } => {
                let arg = two * sc.nu * d.s * d.n12 / d.omega_s * omega;
                if arg < T::zero() {
                    return mismatch("nu_at_ep needs Omega with the sign of nu*n12");
                }
                out.re_split = arg.sqrt() / two;
            }
            _ => unreachable!(),
        }
        return Ok(out);
    }
    if sc.delta == T::zero() {
        return mismatch("dissipative case needs delta != 0");
    }
    let oep = (sc.delta * d.mu_gap / (four * d.s)).abs();
    out.omega_ep = oep;
    out.re_center = -sc.delta * d.tr_d / four;
    match case {
        AxisCase::DeltaCut { omega, kappa } => {
            let gap = omega * omega - oep * oep;
            if gap <= T::zero() {
                return mismatch("delta_cut needs Omega^2 > Omega_EP^2");
            }
            out.im_center = Some(d.omega_s);
            out.im_split = Some(d.s * gap.sqrt());
            out.re_split = (d.gamma / (sixteen * d.s * d.omega_s * gap.sqrt()) * sc.delta * kappa).abs();
        }
        AxisCase::DeltaAvoid { omega, kappa } => {
            let gap = oep * oep - omega * omega;
            if gap <= T::zero() {
                return mismatch("delta_avoid needs Omega^2 < Omega_EP^2");
            }
            out.im_center = Some(d.omega_s + d.tr_k / (four * d.omega_s) * kappa);
            out.im_split = Some((d.gamma / (sixteen * d.s * d.omega_s * gap.sqrt()) * sc.delta * kappa).abs());
            out.re_split = d.s * gap.sqrt();
        }
        AxisCase::DeltaAtEp { kappa } => {
            let split = (sc.delta * kappa * d.gamma / d.omega_s).abs().sqrt() / four;
            out.im_center = Some(d.omega_s + d.tr_k / (four * d.omega_s) * kappa);
            out.im_split = Some(split);
            out.re_split = split;
        }
        _ => unreachable!(),
    }
    Ok(out)
}
