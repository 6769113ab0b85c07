//! One function per subcommand, each producing a [`Table`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{resolve_model, usage, Cell, Cli, Command, Common, Failure, Table};
use crate::ep::exceptional_points;
use crate::error::Error;
use crate::mesh::{enumerate_nodes, mesh_samples, Node};
use crate::model::{shaft_model, RotorModel, Scales};
use crate::oracle::{convergence_order, exact_spectrum_with, matched_pair, sweep, two_path_discrepancy, Direction};
use crate::perturb::{expansion_coefficients, validity_radius};
use crate::string::butterfly_atlas;

macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$(Cell::from($x)),*] };
}

type Outcome = Result<(), Failure>;

const DEFAULT_SPEED_WINDOW: (f64, f64) = (0.0, 2.5);
const DEFAULT_SPEED_STEPS: usize = 101;
const SURFACE_STEPS: (usize, usize) = (201, 101);
const SLOPE_THRESHOLD: f64 = 1.8;
const TWO_PATH_THRESHOLD: f64 = 1e-10;
const STEP_SIZES: [f64; 4] = [0.04, 0.02, 0.01, 0.005];

pub(super) fn execute(cli: &Cli) -> Result<(Table, Outcome), Failure> {
    let c = &cli.common;
    let ok = |t: Table| Ok((t, Ok(())));
    match &cli.command {
        Command::Mesh { all_branches } => ok(mesh(c, *all_branches)?),
        Command::Nodes => ok(nodes(c)?),
        Command::Local => ok(local(c)?),
        Command::Surface => ok(surface(c)?),
        Command::EpAtlas => ok(ep_atlas(c)?),
        Command::StringAtlas { d, mu, n_max } => ok(string_atlas(c, *d, *mu, *n_max)?),
        Command::Shaft { m, k1, mu1, mu2, beta } => ok(shaft(c, [*m, *k1, *mu1, *mu2, *beta])?),
        Command::Verify { seed, samples } => verify(c, *seed, *samples),
    }
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive.
pub(crate) fn grid(name: &str, lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>, Failure> {
    if !lo.is_finite() || !hi.is_finite() {
        return Err(usage(format!("{name} range must be finite")));
    }
    if lo > hi {
        return Err(usage(format!("{name} range is empty: min {lo} > max {hi}")));
    }
    if steps == 0 {
        return Err(usage(format!("{name} grid needs at least one step")));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let last = (steps - 1) as f64;
    Ok((0..steps).map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / last }).collect())
}

fn speed_window(c: &Common, default: (f64, f64)) -> Result<(f64, f64), Failure> {
    let w = (c.omega_min.unwrap_or(default.0), c.omega_max.unwrap_or(default.1));
    if !(w.0 <= w.1) {
        return Err(usage(format!("Omega range is empty: min {} > max {}", w.0, w.1)));
    }
    Ok(w)
}

/// Every crossing with `ω0 ≥ 0`; ids are positions in this full listing, so they do not
/// depend on the speed window of a particular command.
pub(crate) fn all_nodes(model: &RotorModel<f64>) -> Vec<Node<f64>> {
    let bound = 2.0 * model.omegas().iter().fold(0.0f64, |m, w| m.max(*w)) + 1.0;
    enumerate_nodes(model.omegas(), (-bound, bound), false)
}

fn selected_nodes(c: &Common, model: &RotorModel<f64>) -> Result<(Vec<Node<f64>>, Vec<Node<f64>>), Failure> {
    let all = all_nodes(model);
    let picked = match c.node {
        Some(id) => vec![all.get(id).cloned().ok_or_else(|| usage(format!("no node with id {id} ({} nodes)", all.len())))?],
        None => {
            let (lo, hi) = speed_window(c, DEFAULT_SPEED_WINDOW)?;
            all.iter().filter(|n| n.omega0 >= lo && n.omega0 <= hi).cloned().collect()
        }
    };
    Ok((picked, all))
}

fn mesh(c: &Common, all_branches: bool) -> Result<Table, Failure> {
    let model = resolve_model(c)?;
    let (lo, hi) = speed_window(c, DEFAULT_SPEED_WINDOW)?;
    let g = grid("Omega", lo, hi, c.omega_steps.unwrap_or(DEFAULT_SPEED_STEPS))?;
    let mut t = Table::new("mesh", &["Omega", "s", "alpha", "eps", "Im_lambda"]);
    for m in mesh_samples(model.omegas(), &g, !all_branches) {
        t.push(row![m.omega, m.branch.s, m.branch.alpha.as_i32(), m.branch.eps.as_i32(), m.im_lambda]);
    }
    Ok(t)
}

fn nodes(c: &Common) -> Result<Table, Failure> {
    let model = resolve_model(c)?;
    if !model.gap_condition_holds() {
        log::warn!("gap condition fails: sub/supercritical labels are not guaranteed");
    }
    let (picked, _) = selected_nodes(c, &model)?;
    let mut t = Table::new(
        "nodes",
        &["node_id", "Omega0", "omega0", "s", "alpha", "eps", "t", "beta", "sigma", "sig_product", "regime", "clustered"],
    );
    for n in picked {
        t.push(row![
            n.id,
            n.omega0,
            n.freq0,
            n.a.s,
            n.a.alpha.as_i32(),
            n.a.eps.as_i32(),
            n.b.s,
            n.b.alpha.as_i32(),
            n.b.eps.as_i32(),
            n.sig_product.as_i32(),
            n.regime.to_string(),
            n.clustered,
        ]);
    }
    Ok(t)
}

fn local(c: &Common) -> Result<Table, Failure> {
    let model = resolve_model(c)?;
    let sc = model.scales();
    let (picked, all) = selected_nodes(c, &model)?;
    let mut t = Table::new(
        "local",
        &[
            "node_id", "Omega0", "omega0", "sig_product", "Re_A1", "Im_A1", "Re_B1", "Im_B1", "Re_A2", "Im_A2", "Re_B2", "Im_B2",
            "Re_c0", "Im_c0", "Re_lambda_plus", "Im_lambda_plus", "Re_lambda_minus", "Im_lambda_minus", "validity_radius",
        ],
    );
    for n in picked {
        if n.clustered {
            log::warn!("node {} is clustered; expansion applied to its branch pair only", n.id);
        }
        let e = expansion_coefficients(&n, &model)?;
        let co = e.coefficients(sc);
        let c0 = e.c_coefficient(0.0, sc);
        let (lp, lm) = e.eigen_approx(n.omega0, sc);
        let radius = validity_radius(&n, &all).unwrap_or(f64::NAN);
        t.push(row![
            n.id,
            n.omega0,
            n.freq0,
            n.sig_product.as_i32(),
            co.a1.re,
            co.a1.im,
            co.b1.re,
            co.b1.im,
            co.a2.re,
            co.a2.im,
            co.b2.re,
            co.b2.im,
            c0.re,
            c0.im,
            lp.re,
            lp.im,
            lm.re,
            lm.im,
            radius,
        ]);
    }
    Ok(t)
}

fn surface(c: &Common) -> Result<Table, Failure> {
    let model = resolve_model(c)?;
    let id = c.node.ok_or_else(|| usage("surface needs --node"))?;
    let all = all_nodes(&model);
    let node = all.get(id).cloned().ok_or_else(|| usage(format!("no node with id {id} ({} nodes)", all.len())))?;
    let sc = model.scales();
    let mut half = 5.0 * sc.kappa.abs().max((sc.delta * node.freq0).abs()).max(sc.nu.abs());
    if half == 0.0 {
        half = 0.05;
    }
    let og = grid(
        "Omega",
        c.omega_min.unwrap_or(node.omega0 - half),
        c.omega_max.unwrap_or(node.omega0 + half),
        c.omega_steps.unwrap_or(SURFACE_STEPS.0),
    )?;
    let kg = grid("kappa", c.kappa_min.unwrap_or(-half), c.kappa_max.unwrap_or(half), c.kappa_steps.unwrap_or(SURFACE_STEPS.1))?;
    let e = expansion_coefficients(&node, &model)?;
    let points: Vec<(f64, f64)> = og.iter().flat_map(|&o| kg.iter().map(move |&k| (o, k))).collect();
    let samples = points
        .par_iter()
        .map(|&(o, k)| {
            let s = Scales::new(sc.delta, k, sc.nu);
            let (lp, lm) = e.eigen_approx(o, s);
            let ev = exact_spectrum_with(&model, o, s)?;
            Ok(([lp, lm], matched_pair(&ev.eigenvalues, [lp, lm])))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(
        "surface",
        &["Omega", "kappa", "branch", "Re_lambda_approx", "Im_lambda_approx", "Re_lambda_exact", "Im_lambda_exact"],
    );
    for ((o, k), (approx, exact)) in points.iter().zip(samples) {
        for (b, name) in ["plus", "minus"].iter().enumerate() {
            t.push(row![*o, *k, *name, approx[b].re, approx[b].im, exact[b].re, exact[b].im]);
        }
    }
    Ok(t)
}

fn ep_atlas(c: &Common) -> Result<Table, Failure> {
    let model = resolve_model(c)?;
    let sc = model.scales();
    if sc.delta == 0.0 && sc.nu == 0.0 {
        return Err(usage("ep-atlas needs a nonzero --delta or --nu"));
    }
    let (picked, _) = selected_nodes(c, &model)?;
    let mut t = Table::new(
        "ep-atlas",
        &[
            "node_id", "Omega0", "omega0", "sig_product", "Omega_EP_plus", "kappa_EP_plus", "Omega_EP_minus", "kappa_EP_minus",
            "exists", "class",
        ],
    );
    for n in picked {
        let head = row![n.id, n.omega0, n.freq0, n.sig_product.as_i32()];
        let tail = match exceptional_points(&n, &model, sc.delta, sc.nu) {
            Ok(ep) => row![
                ep.omega_ep_plus,
                ep.kappa_ep_plus,
                ep.omega_ep_minus,
                ep.kappa_ep_minus,
                ep.exists,
                ep.classification.map_or("DEGENERATE", |k| k.tag()),
            ],
            Err(Error::DegenerateDiscriminant(why)) => {
                log::warn!("node {}: {why}", n.id);
                row![f64::NAN, f64::NAN, f64::NAN, f64::NAN, false, "DEGENERATE"]
            }
            Err(e) => return Err(e.into()),
        };
        t.push(head.into_iter().chain(tail).collect());
    }
    Ok(t)
}

fn string_atlas(c: &Common, d: f64, mu: f64, n_max: i64) -> Result<Table, Failure> {
    let window = speed_window(c, (-1.0, 1.0))?;
    let atlas = butterfly_atlas(d, mu, n_max, window)?;
    let mut t = Table::new(
        "string-atlas",
        &["n", "m", "eps", "delta", "Omega0", "omega0", "Omega_EP", "kappa_EP", "Re_lambda_EP", "Im_lambda_EP_plus", "Im_lambda_EP_minus"],
    );
    for ep in atlas {
        let x = ep.crossing;
        t.push(row![
            x.n,
            x.m,
            x.eps.as_i32(),
            x.delta.as_i32(),
            x.omega0,
            x.freq0,
            ep.omega_ep_plus,
            ep.kappa_ep_plus,
            ep.lambda_ep_plus.re,
            ep.lambda_ep_plus.im,
            ep.lambda_ep_minus.im,
        ]);
    }
    Ok(t)
}

fn shaft(c: &Common, [m, k1, mu1, mu2, beta]: [f64; 5]) -> Result<Table, Failure> {
    let (lo, hi) = speed_window(c, (-3.0, 3.0))?;
    let og = grid("Omega", lo, hi, c.omega_steps.unwrap_or(121))?;
    let kappa = c.kappa.unwrap_or(0.0);
    let kg = match c.kappa_steps {
        Some(steps) => grid("kappa", c.kappa_min.unwrap_or(kappa), c.kappa_max.unwrap_or(kappa), steps)?,
        None => vec![kappa],
    };
    let mut t = Table::new("shaft", &["Omega", "kappa", "track_id", "Re_lambda", "Im_lambda"]);
    for k in kg {
        let model = shaft_model(m, k1, k, mu1, mu2, beta)?;
        for s in sweep(&model, &og, None)? {
            let mut order: Vec<usize> = (0..s.eigenvalues.len()).collect();
            order.sort_by_key(|&i| s.track_ids[i]);
            for i in order {
                t.push(row![s.omega, k, s.track_ids[i], s.eigenvalues[i].re, s.eigenvalues[i].im]);
            }
        }
    }
    Ok(t)
}

fn verify(c: &Common, seed: u64, samples: usize) -> Result<(Table, Outcome), Failure> {
    let model = resolve_model(c)?;
    let sc = model.scales();
    let (picked, _) = selected_nodes(c, &model)?;
    let mut t = Table::new("verify", &["suite", "node_id", "Omega0", "omega0", "measured", "threshold", "status"]);
    if sc.is_zero() {
        for (suite, thr) in [("convergence", SLOPE_THRESHOLD), ("two-path", TWO_PATH_THRESHOLD)] {
            t.push(row![suite, f64::NAN, f64::NAN, f64::NAN, f64::NAN, thr, "SKIPPED"]);
        }
        log::warn!("all perturbation scales are zero; verification suites skipped");
        return Ok((t, Ok(())));
    }
    // Joint scaling: every active perturbation and the speed offset equal h.
    let on = |x: f64| if x == 0.0 { 0.0 } else { 1.0 };
    let dir = Direction::new(on(sc.kappa), on(sc.delta), on(sc.nu), 1.0);
    let mut failed = 0usize;
    for n in &picked {
        let (measured, status) = match convergence_order(n, &model, dir, &STEP_SIZES) {
            Ok(r) if r.fitted_slope >= SLOPE_THRESHOLD => (r.fitted_slope, "PASS"),
            Ok(r) => (r.fitted_slope, "FAIL"),
            Err(e) => {
                log::warn!("convergence at node {}: {e}", n.id);
                (f64::NAN, "FAIL")
            }
        };
        failed += usize::from(status == "FAIL");
        t.push(row![ "convergence", n.id, n.omega0, n.freq0, measured, SLOPE_THRESHOLD, status]);
    }
    for n in &picked {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(n.id as u64));
        let mut worst = 0.0f64;
        let mut broken = false;
        for _ in 0..samples {
            let mut draw = || rng.gen_range(-0.01..0.01);
            let s = Scales::new(dir.delta * draw(), dir.kappa * draw(), dir.nu * draw());
            match two_path_discrepancy(n, &model, n.omega0 + draw(), s) {
                Ok(d) => worst = worst.max(d),
                Err(e) => {
                    log::warn!("two-path at node {}: {e}", n.id);
                    broken = true;
                    break;
                }
            }
        }
        let status = if !broken && worst <= TWO_PATH_THRESHOLD { "PASS" } else { "FAIL" };
        failed += usize::from(status == "FAIL");
        t.push(row!["two-path", n.id, n.omega0, n.freq0, if broken { f64::NAN } else { worst }, TWO_PATH_THRESHOLD, status]);
    }
    let outcome = if failed == 0 { Ok(()) } else { Err(Failure::Numerical(format!("{failed} verification checks failed"))) };
    Ok((t, outcome))
}
