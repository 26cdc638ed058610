mod common;

use border::{arc_samples, border_family, BorderedFamily, ResolventOperator};
use common::{cl2, constant};
use discrete::{assemble, build_space, eigenvalues_near, DiscreteOperator, ExtensionSpec, Side};
use mellin_core::linalg::spearman;
use mellin_core::{c64, ConeProblem, Cx};
use probes::{minimal_growth_sweep, smax_condition_check, SweepConfig};
use std::f64::consts::PI;
use std::sync::OnceLock;

const J01_SQ: f64 = 5.783185962946784;
const J02_SQ: f64 = 30.471262343662087;

struct Setup {
    ext: DiscreteOperator,
    family: BorderedFamily,
}

fn setup(problem: &ConeProblem, theta0: f64, side: Side) -> Setup {
    let space = build_space(20.0, 256, 2).unwrap();
    let zero = c64(0.0, 0.0);
    let minimal = assemble(problem, &space, &ExtensionSpec::minimal(), zero, side).unwrap();
    let ext = assemble(problem, &space, &ExtensionSpec::span(vec![constant()]), zero, side).unwrap();
    let family = border_family(&minimal, &arc_samples(theta0, PI / 2.0, 33), 1e-10).unwrap();
    Setup { ext, family }
}

fn negative() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(&cl2(0.0), PI, Side::Cone))
}

fn positive() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(&cl2(0.0), 0.0, Side::Cone))
}

fn wedge_negative() -> &'static Setup {
    static S: OnceLock<Setup> = OnceLock::new();
    S.get_or_init(|| setup(&cl2(0.0), PI, Side::Wedge))
}

fn ray(theta0: f64, r_max: f64, samples: usize, snap: bool) -> SweepConfig {
    SweepConfig { theta0, r_min: 1.0, r_max, samples, snap_to_spectrum: snap }
}

#[test]
fn friedrichs_resolvent_decays_like_one_over_lambda() {
    let s = negative();
    let report = minimal_growth_sweep(&s.ext, &s.family, &ray(PI, 1e4, 24, false)).unwrap();
    let exp = report.fitted_exponent.unwrap();
    assert!((exp + 1.0).abs() <= 0.1, "exponent {exp}");
    assert!(report.excluded.is_empty());
    assert_eq!(report.threshold_r, Some(1.0));
    assert!(report.samples.windows(2).all(|w| w[0].modulus <= w[1].modulus));
    let lowest =
        eigenvalues_near(&s.ext, c64(0.0, 0.0), 3).unwrap().into_iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    for smp in &report.samples {
        let dist = smp.modulus + lowest;
        let product = smp.inv_norm.unwrap() * dist;
        assert!((0.9..=1.1).contains(&product), "|lambda| = {}: {product}", smp.modulus);
    }
}

#[test]
fn positive_ray_reports_bessel_eigenvalues_as_interior_spectrum() {
    let s = positive();
    let report = minimal_growth_sweep(&s.ext, &s.family, &ray(0.0, 40.0, 40, true)).unwrap();
    assert_eq!(report.excluded.len(), 2);
    for (ex, oracle) in report.excluded.iter().zip([J01_SQ, J02_SQ]) {
        assert!((ex.lambda[0] - oracle).abs() < 0.01 * oracle, "{ex:?}");
    }
    for smp in &report.samples {
        assert_eq!(smp.flagged_by_det, smp.flagged_by_smin, "{smp:?}");
    }
    let det: Vec<f64> = report.samples.iter().map(|x| x.det_f_abs.ln()).collect();
    let smin: Vec<f64> = report.samples.iter().map(|x| x.smin.ln()).collect();
    assert!(spearman(&det, &smin) >= 0.95);
    let last_flag = report.excluded.last().unwrap().lambda[0];
    assert!(report.threshold_r.unwrap() > last_flag);
    assert_eq!(report.invertible().count(), 38);
}

#[test]
fn unsnapped_sweep_keeps_every_sample() {
    let s = positive();
    let report = minimal_growth_sweep(&s.ext, &s.family, &ray(0.0, 40.0, 9, false)).unwrap();
    assert_eq!(report.samples.len(), 9);
    assert!(report.spectrum_on_ray.is_empty());
}

#[test]
fn sweeps_are_deterministic() {
    let s = negative();
    let cfg = ray(PI, 100.0, 6, false);
    let a = minimal_growth_sweep(&s.ext, &s.family, &cfg).unwrap();
    let b = minimal_growth_sweep(&s.ext, &s.family, &cfg).unwrap();
    for (x, y) in a.samples.iter().zip(&b.samples) {
        assert_eq!(x.inv_norm, y.inv_norm);
        assert_eq!(x.smin, y.smin);
        assert_eq!(x.det_f_abs, y.det_f_abs);
    }
}

#[test]
fn doubling_the_operator_halves_the_resolvent() {
    let r = 400.0;
    let base = negative();
    let doubled = setup(&cl2(0.0).scaled(c64(2.0, 0.0)), PI, Side::Cone);
    let n2 = ResolventOperator::new(&doubled.ext, &doubled.family, c64(-r, 0.0)).unwrap().norm();
    let n1 = ResolventOperator::new(&base.ext, &base.family, c64(-r / 2.0, 0.0)).unwrap().norm();
    assert!((n2 / (0.5 * n1) - 1.0).abs() < 1e-6, "{n2} vs {}", 0.5 * n1);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let s = negative();
    let cfg = SweepConfig { theta0: PI, r_min: 10.0, r_max: 1.0, samples: 1, snap_to_spectrum: false };
    match minimal_growth_sweep(&s.ext, &s.family, &cfg).unwrap_err() {
        mellin_core::Error::Validation(list) => assert_eq!(list.len(), 2),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn projected_model_resolvent_decays_like_the_full_one() {
    let s = wedge_negative();
    let cfg = ray(PI, 1e4, 16, false);
    let smax = smax_condition_check(&s.ext, &s.family, &cfg).unwrap();
    let exp = smax.fitted_exponent.unwrap();
    assert!((exp + 1.0).abs() <= 0.15, "exponent {exp}");
    assert!(smax.refused.is_none());
    let full = minimal_growth_sweep(&s.ext, &s.family, &cfg).unwrap();
    assert!((full.fitted_exponent.unwrap() - exp).abs() <= 0.15);
}

#[test]
fn minimal_domain_has_no_projected_resolvent() {
    let s = wedge_negative();
    let minimal = s.family.template().clone();
    let smax = smax_condition_check(&minimal, &s.family, &ray(PI, 1e3, 8, false)).unwrap();
    assert!(smax.identically_zero);
    assert!(smax.samples.iter().all(|x| x.norm == Some(0.0)));
}

#[test]
fn ray_through_the_spectrum_refuses_a_fit() {
    let space = build_space(20.0, 256, 2).unwrap();
    let zero = Cx::new(0.0, 0.0);
    let p = cl2(0.0);
    let minimal = assemble(&p, &space, &ExtensionSpec::minimal(), zero, Side::Wedge).unwrap();
    let family = border_family(&minimal, &arc_samples(0.0, PI / 2.0, 33), 1e-10).unwrap();
    let smax = smax_condition_check(&wedge_negative().ext, &family, &ray(0.0, 40.0, 10, false)).unwrap();
    assert!(smax.refused.is_some());
    assert!(smax.fitted_exponent.is_none());
    assert!(smax.spectrum_on_ray.iter().any(|z| (z[0] - J01_SQ).abs() < 0.01 * J01_SQ));
}
