//! Cross-module invariants checked against the exact spectrum.

use crate::ep::{classify_unfolding, exceptional_points};
use crate::mesh::{enumerate_nodes, Node};
use crate::model::{example_6dof, RotorModel, Scales};
use crate::oracle::exact_spectrum_with;
use crate::perturb::expansion_coefficients;
use proptest::prelude::*;

fn model() -> RotorModel<f64> {
    example_6dof()
}

fn nodes() -> Vec<Node<f64>> {
    enumerate_nodes(model().omegas(), (-13.0, 13.0), false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_spectrum_is_closed_under_conjugation(w in -3.0..3.0f64, d in -0.2..0.2f64, k in -0.2..0.2f64, n in -0.2..0.2f64) {
        let m = model();
        let ev = exact_spectrum_with(&m, w, Scales::new(d, k, n)).unwrap().eigenvalues;
        prop_assert_eq!(ev.len(), 4 * m.n());
        for z in &ev {
            let best = ev.iter().map(|y| (y - z.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-8 * (1.0 + z.norm()));
        }
    }

    #[test]
    fn classification_is_scale_invariant(i in 0usize..33, d in -1.0..1.0f64, n in -1.0..1.0f64, t in 0.01..100.0f64) {
        let m = model();
        let nd = &nodes()[i];
        let a = classify_unfolding(nd, &m, d, n).ok();
        let b = classify_unfolding(nd, &m, t * d, t * n).ok();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn c_vanishes_at_exceptional_points(i in 0usize..33, d in -0.1..0.1f64, n in -0.1..0.1f64) {
        let m = model();
        let nd = &nodes()[i];
        if let Ok(ep) = exceptional_points(nd, &m, d, n) {
            if ep.exists {
                let e = expansion_coefficients(nd, &m).unwrap();
                for (w, k) in [(ep.omega_ep_plus, ep.kappa_ep_plus), (ep.omega_ep_minus, ep.kappa_ep_minus)] {
                    let eps2 = d * d + n * n + k * k;
                    let c = e.c_coefficient(w - nd.omega0, Scales::new(d, k, n)).norm();
                    prop_assert!(c <= 1e-10 * eps2.max(1e-300), "c = {c}, eps^2 = {eps2}");
                }
            }
        }
    }

    #[test]
    fn eigenvalue_pair_sum_is_twice_the_base(i in 0usize..33, dw in -0.05..0.05f64, k in -0.05..0.05f64, d in -0.05..0.05f64) {
        let m = model();
        let nd = &nodes()[i];
        let e = expansion_coefficients(nd, &m).unwrap();
        let sc = Scales::new(d, k, 0.0);
        let (p, q) = e.eigen_approx(nd.omega0 + dw, sc);
        let base = e.base(dw, sc);
        prop_assert!((p + q - base * 2.0).norm() < 1e-12);
    }
}
