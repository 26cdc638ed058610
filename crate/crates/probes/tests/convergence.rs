mod common;

use border::{arc_samples, border_family};
use common::{cl2, constant, pb};
use discrete::{assemble, build_space, resolve_enrichment, ExtensionSpec, Side, TipData, RANK_TOL};
use domains::SingularFunction;
use mellin_core::{c64, ConeProblem};
use probes::{a_tau_convergence, f_vs_fwedge, ktilde_estimates, relative_index_ladder, SweepConfig};
use std::f64::consts::PI;

const TAUS: [f64; 5] = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];

fn cone_basis(p: &ConeProblem) -> Vec<SingularFunction> {
    let tip = TipData::new(p).unwrap();
    resolve_enrichment(&ExtensionSpec::maximal(), &tip, Side::Cone).unwrap().functions
}

#[test]
fn blending_changes_nothing_for_constant_coefficients() {
    let space = build_space(20.0, 256, 2).unwrap();
    let report = a_tau_convergence(&cl2(0.0), &space, &TAUS, 16, 3).unwrap();
    assert!(report.ratios.iter().all(|&r| r == 0.0));
    assert!(report.fit.is_none());
}

#[test]
fn blending_converges_linearly_for_the_perturbed_operator() {
    let coarse = a_tau_convergence(&pb(1.0), &build_space(20.0, 256, 2).unwrap(), &TAUS, 64, 7).unwrap();
    let fine = a_tau_convergence(&pb(1.0), &build_space(20.0, 511, 2).unwrap(), &TAUS, 64, 7).unwrap();
    assert!(coarse.fitted_exponent.unwrap() >= 0.9);
    for (a, b) in coarse.ratios.iter().zip(&fine.ratios) {
        assert!((a / b - 1.0).abs() <= 0.1);
    }
    for (r, tau) in coarse.ratios.iter().zip(TAUS) {
        assert!(*r <= tau, "ratio {r} exceeds the blend bound at tau = {tau}");
    }
}

#[test]
fn probes_follow_the_seed() {
    let space = build_space(20.0, 128, 2).unwrap();
    let a = a_tau_convergence(&pb(1.0), &space, &TAUS[..2], 8, 11).unwrap();
    let b = a_tau_convergence(&pb(1.0), &space, &TAUS[..2], 8, 11).unwrap();
    let c = a_tau_convergence(&pb(1.0), &space, &TAUS[..2], 8, 12).unwrap();
    assert_eq!(a.ratios, b.ratios);
    assert_ne!(a.ratios, c.ratios);
}

#[test]
fn index_ladders_climb_by_one() {
    for g in [256, 512] {
        let space = build_space(20.0, g, 2).unwrap();
        for p in [cl2(0.0), pb(1.0)] {
            let ladder = relative_index_ladder(&p, &space, c64(-1.0, 0.0), RANK_TOL).unwrap();
            let idx: Vec<i64> = ladder.rows.iter().map(|r| r.index).collect();
            assert_eq!(idx, vec![-1, 0, 1], "{} at G={g}", p.name());
            assert!(ladder.ladder_holds);
            assert!(ladder.rows.iter().all(|r| !r.ill_separated));
        }
    }
}

#[test]
fn regular_mode_has_a_single_rung() {
    let space = build_space(20.0, 256, 2).unwrap();
    let ladder = relative_index_ladder(&cl2(2.0), &space, c64(-1.0, 0.0), RANK_TOL).unwrap();
    assert_eq!(ladder.quotient_dim, 0);
    assert_eq!(ladder.rows.len(), 1);
    assert_eq!(ladder.rows[0].index, 0);
}

#[test]
fn lifted_constant_is_bounded_in_l2_and_grows_in_graph_norm() {
    let space = build_space(20.0, 256, 2).unwrap();
    let rhos = [1.0, 2.0, 4.0, 8.0, 16.0];
    let k = ktilde_estimates(&cl2(0.0), &[constant()], &space, &rhos).unwrap();
    assert!(k.l2_fit.unwrap().exponent.abs() < 0.05);
    assert!((k.graph_fit.unwrap().exponent - 2.0).abs() < 0.05);
    assert!(k.samples[0].l2_norm > 0.0 && k.samples[0].graph_norm.is_finite());
    let p = pb(1.0);
    let kp = ktilde_estimates(&p, &cone_basis(&p)[..1], &space, &rhos).unwrap();
    assert!((kp.l2_fit.unwrap().exponent - k.l2_fit.unwrap().exponent).abs() < 0.2);
    assert!((kp.graph_fit.unwrap().exponent - k.graph_fit.unwrap().exponent).abs() < 0.2);
}

fn fwedge(p: &ConeProblem, basis: &[SingularFunction]) -> probes::FWedgeReport {
    let space = build_space(20.0, 256, 2).unwrap();
    let zero = c64(0.0, 0.0);
    let arc = arc_samples(PI, PI / 2.0, 33);
    let cone = assemble(p, &space, &ExtensionSpec::minimal(), zero, Side::Cone).unwrap();
    let wedge = assemble(p, &space, &ExtensionSpec::minimal(), zero, Side::Wedge).unwrap();
    let cone_bf = border_family(&cone, &arc, 1e-10).unwrap();
    let wedge_bf = border_family(&wedge, &arc, 1e-10).unwrap();
    let cfg = SweepConfig { theta0: PI, r_min: 1.0, r_max: 1e4, samples: 9, snap_to_spectrum: false };
    f_vs_fwedge(p, basis, &space, &cone_bf, &wedge_bf, &cfg).unwrap()
}

#[test]
fn boundary_reductions_agree_for_constant_coefficients() {
    let report = fwedge(&cl2(0.0), &[constant()]);
    assert!(report.samples.iter().all(|s| s.difference < 1e-8));
}

#[test]
fn boundary_reductions_approach_the_model() {
    let p = pb(1.0);
    let report = fwedge(&p, &cone_basis(&p));
    assert!(report.fitted_exponent.unwrap() < 0.0);
    assert_eq!(report.decreasing_fraction, 1.0);
    let baseline = &report.samples[0];
    assert_eq!(baseline.modulus, 1.0);
    assert!(baseline.difference.is_finite() && baseline.difference > 0.0);
}
