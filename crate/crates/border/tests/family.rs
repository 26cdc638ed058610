use border::*;
use discrete::{assemble, build_space, eigenvalues_near, graph_frame, ExtensionSpec, Side, RANK_TOL};
use domains::SingularFunction;
use mellin_core::linalg::{singular_values, DualLu};
use mellin_core::{c64, CMat, CVec, ConeProblem, Cx, Error};
use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

fn bessel(l: f64) -> ConeProblem {
    ConeProblem::scalar("bessel", 2, 1, &[(0, vec![c64(l * l, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

fn space() -> discrete::DiscreteSpace {
    build_space(20.0, 256, 2).unwrap()
}

fn constant_solution() -> SingularFunction {
    SingularFunction::scalar(c64(0.0, 0.0), &[c64(1.0, 0.0)])
}

fn log_solution() -> SingularFunction {
    SingularFunction::scalar(c64(0.0, 0.0), &[c64(0.0, 0.0), c64(1.0, 0.0)])
}

/// Minimal wedge family of the radial Laplacian, bordered on a quarter arc around the negative axis.
fn family() -> &'static BorderedFamily {
    static FAMILY: OnceLock<BorderedFamily> = OnceLock::new();
    FAMILY.get_or_init(|| {
        let tmpl = assemble(&bessel(0.0), &space(), &ExtensionSpec::minimal(), c64(-1.0, 0.0), Side::Wedge).unwrap();
        border_family(&tmpl, &arc_samples(PI, FRAC_PI_2, 33), RANK_TOL).unwrap()
    })
}

fn extension(f: SingularFunction) -> discrete::DiscreteOperator {
    assemble(&bessel(0.0), &space(), &ExtensionSpec::span(vec![f]), c64(0.0, 0.0), Side::Cone).unwrap()
}

fn direct_smallest_singular_value(op: &discrete::DiscreteOperator, lambda: Cx) -> f64 {
    // L² geometry: weight rows and grid values by the square roots of the trapezoid weights
    let a = op.with_lambda(lambda).a_form();
    let lu = DualLu::new(&a).unwrap();
    let inv = lu.solve(&CMat::identity(a.nrows(), a.nrows()));
    let mut m = op.embedding() * inv;
    for (i, w) in op.grid_weights().iter().enumerate() {
        m.row_mut(i).scale_mut(w.sqrt());
    }
    for (j, w) in op.row_weights().iter().enumerate() {
        m.column_mut(j).scale_mut(1.0 / w.sqrt());
    }
    1.0 / singular_values(&m)[0]
}

#[test]
fn cokernel_of_minimal_family_is_one_dimensional() {
    let bf = family();
    assert_eq!(bf.deficiency(), 1);
    assert_eq!(bf.kernel_dim(), 0);
    assert_eq!(bf.t().nrows(), 0);
    assert_eq!(bf.samples().len(), 33);
    assert!(bf.conditions().iter().all(|&c| c < COND_MAX), "{:?}", bf.conditions());
    assert!(bf.identity_residuals().iter().all(|&r| r <= 1e-9), "{:?}", bf.identity_residuals());
}

#[test]
fn added_columns_are_orthonormal_in_weighted_rows() {
    let bf = family();
    let w = bf.template().row_weights();
    let k = bf.k();
    let gram: Cx = (0..k.nrows()).map(|i| k[(i, 0)].conj() * k[(i, 0)] * w[i]).sum();
    assert!((gram - c64(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn invertible_family_gets_identity_bordering() {
    let tmpl = assemble(&bessel(2.0), &space(), &ExtensionSpec::minimal(), c64(-1.0, 0.0), Side::Wedge).unwrap();
    let bf = border_family(&tmpl, &arc_samples(PI, FRAC_PI_2, 9), RANK_TOL).unwrap();
    assert_eq!(bf.deficiency(), 0);
    assert_eq!(bf.kernel_dim(), 0);
    assert!(bf.conditions().iter().all(|&c| c < COND_MAX));
}

#[test]
fn eigenvalue_on_the_arc_is_an_index_jump() {
    let probe = extension(constant_solution());
    let ev = eigenvalues_near(&probe, c64(5.0, 0.0), 1).unwrap()[0];
    // rescale so that the lowest Friedrichs eigenvalue sits at λ = 1, the middle of an arc around the positive axis
    let scaled = bessel(0.0).scaled(c64(1.0 / ev.re, 0.0));
    let tmpl = assemble(&scaled, &space(), &ExtensionSpec::span(vec![constant_solution()]), c64(1.0, 0.0), Side::Cone)
        .unwrap();
    match border_family(&tmpl, &arc_samples(0.0, 0.5, 5), RANK_TOL) {
        Err(Error::IndexJump { expected, found, .. }) => assert_ne!(expected, found),
        other => panic!("expected an index jump, got {:?}", other.map(|b| b.deficiency())),
    }
}

#[test]
fn unit_modulus_extension_is_the_identity() {
    let bf = family();
    let lambda = bf.samples()[5];
    let blocks = extend_homogeneous(bf, lambda).unwrap();
    assert_eq!(blocks.steps, 0);
    assert!(blocks.warning.is_none());
    assert_eq!(&blocks.k, bf.k());
    let a = bf.member(lambda).a_form();
    let a = a.columns(0, blocks.a.ncols());
    assert!((&blocks.a - a).norm() <= 1e-14 * a.norm());
}

#[test]
fn one_grid_step_scales_by_the_degree() {
    let bf = family();
    let h = bf.template().space().step();
    let m = bf.order() as f64;
    let lambda = c64(-(m * h).exp(), 0.0);
    let blocks = extend_homogeneous(bf, lambda).unwrap();
    assert_eq!(blocks.steps, 1);
    assert!(blocks.warning.is_none());
    assert!((blocks.rho.powi(bf.degree() as i32) - (m * h).exp()).abs() < 1e-12);
    let i = (1..bf.k().nrows()).max_by(|&a, &b| bf.k()[(a, 0)].norm().total_cmp(&bf.k()[(b, 0)].norm())).unwrap();
    assert!((blocks.k[(i - 1, 0)] - bf.k()[(i, 0)] * (m * h).exp()).norm() < 1e-12);
}

#[test]
fn incompatible_modulus_is_snapped_with_a_warning() {
    let blocks = extend_homogeneous(family(), c64(-2.0, 0.0)).unwrap();
    assert!(blocks.warning.is_some());
}

#[test]
fn homogeneity_relation_holds() {
    let bf = family();
    for (lambda, extra) in [(c64(-3.0, 0.5), 1), (c64(-1.0, -0.2), 7), (c64(-40.0, 3.0), -4)] {
        let r = homogeneity_relation_residual(bf, lambda, extra).unwrap();
        assert!(r <= 1e-10, "relation residual {r} at {lambda}");
    }
}

#[test]
fn minimal_domain_reduces_to_an_empty_matrix() {
    let bf = family();
    let min = assemble(&bessel(0.0), &space(), &ExtensionSpec::minimal(), c64(0.0, 0.0), Side::Cone).unwrap();
    let r = reduce_to_boundary(&min, bf, c64(-1.0, 0.0)).unwrap();
    assert_eq!(r.f.shape(), (1, 0));
}

#[test]
fn friedrichs_reduction_is_regular_at_negative_lambda() {
    let fr = extension(constant_solution());
    let r = reduce_to_boundary(&fr, family(), c64(-1.0, 0.0)).unwrap();
    assert_eq!(r.f.shape(), (1, 1));
    assert!(r.det_abs > 1.0);
    assert!(direct_smallest_singular_value(&fr, c64(-1.0, 0.0)) > 1.0);
}

#[test]
fn eigenvalue_of_one_extension_is_regular_for_the_other() {
    let fr = extension(constant_solution());
    let lg = extension(log_solution());
    let bf = family();
    let ev_fr = eigenvalues_near(&fr, c64(5.0, 0.0), 1).unwrap()[0];
    let ev_lg = eigenvalues_near(&lg, c64(20.0, 0.0), 1).unwrap()[0];
    let own_fr = reduce_to_boundary(&fr, bf, ev_fr).unwrap().det_abs;
    let other_fr = reduce_to_boundary(&lg, bf, ev_fr).unwrap().det_abs;
    let own_lg = reduce_to_boundary(&lg, bf, ev_lg).unwrap().det_abs;
    let other_lg = reduce_to_boundary(&fr, bf, ev_lg).unwrap().det_abs;
    assert!(own_fr < 1e-6 * other_fr, "{own_fr} vs {other_fr}");
    assert!(own_lg < 1e-6 * other_lg, "{own_lg} vs {other_lg}");
    assert!(matches!(resolvent(&fr, bf, ev_fr), Err(Error::InSpectrum(_))));
}

#[test]
fn resolvent_matches_dense_inverse() {
    let fr = extension(constant_solution());
    let lambda = c64(-2.0, 1.0);
    let res = resolvent(&fr, family(), lambda).unwrap();
    let a = fr.with_lambda(lambda).a_form();
    let direct = a.clone().try_inverse().unwrap();
    assert!((&res.matrix - &direct).norm() <= 1e-8 * direct.norm());
    assert!((&a * &res.matrix - CMat::identity(a.nrows(), a.nrows())).norm() <= 1e-8 * (a.norm() * res.matrix.norm()));
}

#[test]
fn projection_and_left_inverse() {
    let fr = extension(constant_solution());
    let lambda = c64(-5.0, -2.0);
    let res = resolvent(&fr, family(), lambda).unwrap();
    let p = &res.projection;
    assert!((p * p - p).norm() <= 1e-8 * p.norm());
    let s = singular_values(p);
    assert!(s[0] > 1e-3 && s[1] < 1e-8 * s[0], "rank of the projection");
    // both properties are measured in graph-orthonormal coordinates of the minimal domain
    let min = assemble(&bessel(0.0), &space(), &ExtensionSpec::minimal(), lambda, Side::Cone).unwrap();
    let frame = graph_frame(&min);
    let core = min.cols();
    let y = CMat::from_columns(
        &(0..core)
            .map(|j| frame.coefficients(&CVec::from_fn(core, |i, _| c64(if i == j { 1.0 } else { 0.0 }, 0.0))))
            .collect::<Vec<_>>(),
    );
    let image = min.a_form() * &y;
    let rw: Vec<f64> = min.row_weights().iter().map(|w| w.sqrt()).collect();
    let mut annihilated = p * &image;
    for (i, w) in rw.iter().enumerate() {
        annihilated.row_mut(i).scale_mut(*w);
    }
    assert!(singular_values(&annihilated)[0] <= 1e-8, "projection on the range");
    let mut defect = min.embedding() * (&res.left_inverse * &image - &y);
    for (i, w) in min.grid_weights().iter().enumerate() {
        defect.row_mut(i).scale_mut(w.sqrt());
    }
    assert!(singular_values(&defect)[0] <= 1e-8, "left inverse on the minimal domain");
}

#[test]
fn resolvent_norm_matches_self_adjoint_oracle() {
    // ‖(A_F - λ)⁻¹‖ = 1/dist(λ, σ(A_F)) for the Friedrichs extension
    let fr = extension(constant_solution());
    let ev = eigenvalues_near(&fr, c64(5.0, 0.0), 1).unwrap()[0].re;
    let lambda = c64(-3.0, 0.0);
    let op = ResolventOperator::new(&fr, family(), lambda).unwrap();
    let expected = 1.0 / (ev + 3.0);
    assert!((op.norm() - expected).abs() <= 1e-3 * expected, "{} vs {expected}", op.norm());
}
