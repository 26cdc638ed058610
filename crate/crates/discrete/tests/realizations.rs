use discrete::{
    a_tau, assemble, build_space, eigenvalues_near, homogeneity_residual, kappa_discrete, ker_coker,
    resolve_enrichment, CoefficientField, DiscreteSpace, ExtensionMode, ExtensionSpec, Side, TipData, RANK_TOL,
};
use domains::{quotient_dimension, SingularFunction};
use mellin_core::{c64, CVec, ConeProblem, Error};
use proptest::prelude::*;

fn cl2(l: f64) -> ConeProblem {
    ConeProblem::scalar("cl2", 2, 1, &[(0, vec![c64(l * l, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

fn pb(b: f64) -> ConeProblem {
    ConeProblem::scalar("pb", 2, 2, &[(0, vec![c64(0.25, 0.0), c64(b, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

fn index(p: &ConeProblem, space: &DiscreteSpace, ext: &ExtensionSpec) -> (usize, usize, i64) {
    let op = assemble(p, space, ext, c64(-1.0, 0.0), Side::Cone).unwrap();
    let kc = ker_coker(&op, RANK_TOL);
    assert!(!kc.ill_separated, "{}: ill-separated rank decision", p.name());
    (kc.dim_ker, kc.dim_coker, kc.index)
}

fn first_k(p: &ConeProblem, k: usize) -> ExtensionSpec {
    let tip = TipData::new(p).unwrap();
    let all = resolve_enrichment(&ExtensionSpec::maximal(), &tip, Side::Cone).unwrap().functions;
    ExtensionSpec::span(all.into_iter().take(k).collect())
}

#[test]
fn symmetric_problems_have_opposite_extreme_indices() {
    let space = build_space(20.0, 256, 2).unwrap();
    for p in [cl2(0.0), pb(1.0)] {
        let d = quotient_dimension(&TipData::new(&p).unwrap().spectrum, 2).unwrap() as i64;
        let (_, _, min) = index(&p, &space, &ExtensionSpec::minimal());
        let (_, _, max) = index(&p, &space, &ExtensionSpec::maximal());
        assert_eq!(min, -d / 2, "{}", p.name());
        assert_eq!(max, -min, "{}", p.name());
        for k in 0..=d as usize {
            assert_eq!(index(&p, &space, &first_k(&p, k)).2, min + k as i64);
        }
    }
}

#[test]
fn kernel_and_cokernel_are_stable_under_refinement() {
    let grids = [(20.0, 256), (20.0, 511), (25.0, 320)];
    for p in [cl2(0.0), pb(1.0), cl2(2.0)] {
        for ext in [ExtensionSpec::minimal(), ExtensionSpec::maximal()] {
            let results: Vec<_> = grids.iter().map(|&(t, g)| index(&p, &build_space(t, g, 2).unwrap(), &ext)).collect();
            assert!(results.windows(2).all(|w| w[0] == w[1]), "{}: {results:?}", p.name());
        }
    }
}

#[test]
fn blending_keeps_the_quotient_dimension() {
    for p in [cl2(0.0), pb(1.0), pb(-3.0)] {
        let d = quotient_dimension(&TipData::new(&p).unwrap().spectrum, 2).unwrap();
        for tau in [1e-3, 0.1, 0.5, 0.9] {
            let blended = a_tau(&p, tau).unwrap();
            let tip = TipData::new(&blended.tip_problem()).unwrap();
            assert_eq!(quotient_dimension(&tip.spectrum, 2).unwrap(), d);
        }
    }
}

#[test]
fn blend_radius_outside_the_unit_interval_is_rejected() {
    for tau in [0.0, 1.0, -0.5, f64::NAN] {
        assert!(matches!(a_tau(&pb(1.0), tau), Err(Error::Validation(_))));
    }
}

#[test]
fn blend_interpolates_between_model_and_full_coefficients() {
    let p = pb(2.0);
    let blended = a_tau(&p, 0.1).unwrap();
    let near = blended.coefficient(0, (1e-3f64).ln());
    let far = blended.coefficient(0, (0.5f64).ln());
    assert!((near[(0, 0)] - c64(0.25, 0.0)).norm() < 1e-14);
    assert!((far[(0, 0)] - c64(0.25 + 2.0 * 0.5, 0.0)).norm() < 1e-14);
}

#[test]
fn friedrichs_eigenvalues_match_bessel_zeros() {
    let space = build_space(20.0, 512, 2).unwrap();
    let constant = SingularFunction::scalar(c64(0.0, 0.0), &[c64(1.0, 0.0)]);
    let cases = [
        (cl2(0.0), ExtensionSpec::span(vec![constant]), 5.783185962946784),
        (cl2(2.0), ExtensionSpec::minimal(), 26.374616427163247),
    ];
    for (p, ext, oracle) in cases {
        let op = assemble(&p, &space, &ext, c64(0.0, 0.0), Side::Cone).unwrap();
        let lowest =
            eigenvalues_near(&op, c64(0.0, 0.0), 3).unwrap().into_iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        assert!((lowest - oracle).abs() <= 0.01 * oracle, "{}: {lowest} vs {oracle}", p.name());
    }
}

#[test]
fn model_operator_is_dilation_homogeneous() {
    let space = build_space(20.0, 256, 2).unwrap();
    let h = space.step();
    for model in [cl2(0.0), pb(1.0).frozen()] {
        for steps in [1.0, 8.0, 64.0] {
            let r = homogeneity_residual(&model as &dyn CoefficientField, &space, c64(-2.0, 1.0), (steps * h).exp())
                .unwrap();
            assert!(r <= 1e-12, "{}: {r}", model.name());
        }
    }
}

#[test]
fn incompatible_dilations_are_refused() {
    let space = build_space(20.0, 256, 2).unwrap();
    match kappa_discrete(&space, 1.5, 1) {
        Err(Error::GridIncompatible { nearest, .. }) => assert!(space.dilation_steps(nearest).is_ok()),
        other => panic!("expected incompatibility, got {other:?}"),
    }
}

#[test]
fn extension_files_reject_unknown_fields() {
    let ok: ExtensionSpec = serde_json::from_str(r#"{"mode": "maximal"}"#).unwrap();
    assert_eq!(ok.mode, ExtensionMode::Maximal);
    assert_eq!(ok.cutoff_radius, 1.0);
    assert!(serde_json::from_str::<ExtensionSpec>(r#"{"mode": "maximal", "radius": 2}"#).is_err());
    assert!(serde_json::from_str::<ExtensionSpec>(r#"{"mode": "largest"}"#).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dilation_is_an_isometry_on_interior_vectors(
        steps in 1isize..30,
        values in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 64),
        offset in 0usize..100,
    ) {
        let space = build_space(20.0, 256, 2).unwrap();
        let rho = (steps as f64 * space.step()).exp();
        let k = kappa_discrete(&space, rho, 1).unwrap();
        let mut v = CVec::zeros(space.len());
        for (i, (re, im)) in values.iter().enumerate() {
            v[40 + offset + i] = c64(*re, *im);
        }
        let before = space.norm(&v, 1);
        let after = space.norm(&(&k * &v), 1);
        prop_assert!((before - after).abs() <= 1e-14 * before.max(1e-300));
        let back = kappa_discrete(&space, 1.0 / rho, 1).unwrap();
        prop_assert_eq!(&back * (&k * &v), v);
    }
}
