//! Closed-form model of a rotating circular string with a damped, frictional point
//! spring: crossings of the branches `λ = i n (1 + εΩ)`, the split pair near a crossing,
//! its exceptional points and the butterfly-shaped atlas of EPs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mesh::Sign;
use crate::scalar::{Cx, Real};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StringParams<T> {
    pub d: T,
    pub k: T,
    pub mu: T,
}

impl<T: Real> StringParams<T> {
    pub fn new(d: T, k: T, mu: T) -> Self {
        Self { d, k, mu }
    }
}

/// Crossing of branch `(n, ε)` with branch `(m, δ)` at `(Ω0, ω0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StringCrossing<T> {
    pub n: i64,
    pub m: i64,
    pub eps: Sign,
    pub delta: Sign,
    pub omega0: T,
    pub freq0: T,
}

impl<T: Real> StringCrossing<T> {
    /// Definite Krein type iff `nm > 0`.
    pub fn is_definite(&self) -> bool {
        self.n * self.m > 0
    }

    pub fn is_subcritical(&self) -> bool {
        self.omega0.abs() < T::one()
    }
}

pub fn string_crossing<T: Real>(n: i64, eps: Sign, m: i64, delta: Sign) -> Result<StringCrossing<T>> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("string mode numbers must be nonzero".into()));
    }
    let (e, dl) = (eps.as_i32() as i64, delta.as_i32() as i64);
    let den = m * dl - n * e;
    if den == 0 {
        return Err(Error::ParallelBranches);
    }
    let den_t = T::from_int(den);
    Ok(StringCrossing {
        n,
        m,
        eps,
        delta,
        omega0: T::from_int(n - m) / den_t,
        freq0: T::from_int(n * m * (dl - e)) / den_t,
    })
}

struct Consts<T> {
    n: T,
    m: T,
    nm: T,
    eps: T,
    delta: T,
    pi: T,
}

fn consts<T: Real>(c: &StringCrossing<T>) -> Consts<T> {
    let (n, m) = (T::from_int(c.n), T::from_int(c.m));
    Consts { n, m, nm: n * m, eps: c.eps.value(), delta: c.delta.value(), pi: T::PI() }
}

fn require_nonzero_freq<T: Real>(c: &StringCrossing<T>) -> Result<()> {
    if c.freq0 == T::zero() {
        return Err(Error::InvalidArgument(format!(
            "crossing (n={}, m={}) sits at zero frequency; the expansion needs a nonzero doublet",
            c.n, c.m
        )));
    }
    Ok(())
}

/// Linear coefficients of `Im c = a_omega ΔΩ + a_k k`.
fn im_c_coefficients<T: Real>(c: &StringCrossing<T>, d: T, mu: T) -> (T, T) {
    let q = consts(c);
    let (two, four, eight, sixteen) = (T::lit(2.0), T::lit(4.0), T::lit(8.0), T::lit(16.0));
    let w0 = c.freq0;
    let y = q.eps * mu / (four * q.pi) - d * (q.m - q.n) * w0 / (eight * q.pi * q.nm);
    let a_omega = -q.eps * (q.n + q.m) * y;
    let a_k = (two * d * w0 - q.eps * mu * (q.n - q.m)) / (sixteen * q.pi * q.pi * q.nm) - two * (q.m - q.n) / (eight * q.pi * q.nm) * y;
    (a_omega, a_k)
}

/// Coefficient `c` whose square root splits the pair.
pub fn string_c<T: Real>(c: &StringCrossing<T>, p: StringParams<T>, omega: T) -> Cx<T> {
    let q = consts(c);
    let (two, eight, sixteen) = (T::lit(2.0), T::lit(8.0), T::lit(16.0));
    let dw = omega - c.omega0;
    let (a_omega, a_k) = im_c_coefficients(c, p.d, p.mu);
    let im = a_omega * dw + a_k * p.k;
    let lin = (q.eps * q.n - q.delta * q.m) / two * dw + (q.m - q.n) * p.k / (eight * q.pi * q.nm);
    let damp = p.d * (q.m + q.n) * c.freq0;
    let re = lin * lin + p.k * p.k / (sixteen * q.pi * q.pi * q.nm) - damp * damp / (T::lit(64.0) * q.pi * q.pi * q.nm * q.nm);
    Cx::new(re, im)
}

fn base<T: Real>(c: &StringCrossing<T>, p: StringParams<T>, omega: T) -> Cx<T> {
    let q = consts(c);
    let eight_pi_nm = T::lit(8.0) * q.pi * q.nm;
    let re = -p.d * (q.n + q.m) / eight_pi_nm * c.freq0;
    let im = c.freq0 + q.eps * (q.n - q.m) / T::lit(2.0) * (omega - c.omega0) + (q.n + q.m) / eight_pi_nm * p.k;
    Cx::new(re, im)
}

/// `(λ₊, λ₋) = base ± i √c` with the principal root.
pub fn string_eigen_approx<T: Real>(c: &StringCrossing<T>, p: StringParams<T>, omega: T) -> Result<(Cx<T>, Cx<T>)> {
    require_nonzero_freq(c)?;
    let b = base(c, p, omega);
    let r = string_c(c, p, omega).sqrt() * Cx::new(T::zero(), T::one());
    Ok((b + r, b - r))
}

/// EPs of one crossing. `kappa` is the spring stiffness `k`. Coordinates are NaN when
/// `exists` is false; with `d = 0` both EPs merge at `(Ω0, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StringEp<T> {
    pub crossing: StringCrossing<T>,
    pub omega_ep_plus: T,
    pub kappa_ep_plus: T,
    pub omega_ep_minus: T,
    pub kappa_ep_minus: T,
    pub lambda_ep_plus: Cx<T>,
    pub lambda_ep_minus: Cx<T>,
    pub exists: bool,
    pub merged: bool,
    /// `dk/dΩ` of the line `Im c = 0`; `None` when the line is vertical or undefined.
    pub cut_slope: Option<T>,
}

pub fn string_ep<T: Real>(c: &StringCrossing<T>, d: T, mu: T) -> Result<StringEp<T>> {
    if d == T::zero() && mu == T::zero() {
        return Err(Error::ZeroPerturbation);
    }
    require_nonzero_freq(c)?;
    let q = consts(c);
    let w0 = c.freq0;
    let (a_omega, a_k) = im_c_coefficients(c, d, mu);
    let cut_slope = if a_k != T::zero() { Some(-a_omega / a_k) } else { None };
    let at = |o: T, k: T| base(c, StringParams::new(d, k, mu), o);
    let nan = T::nan();
    let mut out = StringEp {
        crossing: *c,
        omega_ep_plus: c.omega0,
        kappa_ep_plus: T::zero(),
        omega_ep_minus: c.omega0,
        kappa_ep_minus: T::zero(),
        lambda_ep_plus: at(c.omega0, T::zero()),
        lambda_ep_minus: at(c.omega0, T::zero()),
        exists: true,
        merged: d == T::zero(),
        cut_slope,
    };
    if out.merged {
        return Ok(out);
    }
    let rad = q.nm * (mu * mu * q.nm + d * d * w0 * w0);
    if rad <= T::zero() {
        out.exists = false;
        out.omega_ep_plus = nan;
        out.kappa_ep_plus = nan;
        out.omega_ep_minus = nan;
        out.kappa_ep_minus = nan;
        out.lambda_ep_plus = Cx::new(nan, nan);
        out.lambda_ep_minus = Cx::new(nan, nan);
        return Ok(out);
    }
    let sq = rad.sqrt();
    let two = T::lit(2.0);
    let dw = q.eps * (q.m + q.n) * d * d * w0 * w0 / (T::lit(8.0) * q.pi * q.nm * sq);
    let k = d * w0 * (two * q.eps * mu * q.nm - d * (q.m - q.n) * w0) / (two * sq);
    out.omega_ep_plus = c.omega0 + dw;
    out.kappa_ep_plus = k;
    out.omega_ep_minus = c.omega0 - dw;
    out.kappa_ep_minus = -k;
    out.lambda_ep_plus = at(out.omega_ep_plus, k);
    out.lambda_ep_minus = at(out.omega_ep_minus, -k);
    Ok(out)
}

/// Frictionless complex-plane EP loci for `ε = +1, δ = −1`:
/// `−d/(4π) + i (2nm/(n+m) ± d (n−m) / (4π √(nm)))`.
pub fn frictionless_ep_loci<T: Real>(n: i64, m: i64, d: T) -> Result<(Cx<T>, Cx<T>)> {
    if n * m <= 0 || n + m == 0 {
        return Err(Error::InvalidArgument("frictionless loci need nm > 0".into()));
    }
    let (nt, mt) = (T::from_int(n), T::from_int(m));
    let four_pi = T::lit(4.0) * T::PI();
    let re = -d / four_pi;
    let centre = T::lit(2.0) * nt * mt / (nt + mt);
    let split = d / four_pi * (nt - mt) / (nt * mt).sqrt();
    Ok((Cx::new(re, centre + split), Cx::new(re, centre - split)))
}

/// EPs of all subcritical crossings `(n, +1) × (m, −1)` with `1 ≤ n, m ≤ n_max` and `Ω0`
/// inside the closed window. Conjugate labels and the relabelled `(−1, +1)` crossings
/// describe the same points and are not repeated.
pub fn butterfly_atlas<T: Real>(d: T, mu: T, n_max: i64, window: (T, T)) -> Result<Vec<StringEp<T>>> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be at least 1".into()));
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        for m in 1..=n_max {
            let c = string_crossing::<T>(n, Sign::Plus, m, Sign::Minus)?;
            if c.omega0 < window.0 || c.omega0 > window.1 {
                continue;
            }
            out.push(string_ep(&c, d, mu)?);
        }
    }
    Ok(out)
}
