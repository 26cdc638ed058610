use domains::{wedge_quotient_basis, SingularFunction, SingularTerm};
use mellin_core::{
    boundary_spectrum, c64, conormal_family, BoundarySpectrum, CVec, ConeProblem, ConormalFamily, Cx, Region,
};
use proptest::prelude::*;
use theta::{
    defining_identity_residual, e_recursion, kappa_on_singular, kappa_tilde, ltheta_decay, theta_forward, theta_inverse,
};

fn cl2(l: f64) -> ConeProblem {
    ConeProblem::scalar("cl2", 2, 1, &[(0, vec![c64(l * l, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

fn pb(b: f64) -> ConeProblem {
    ConeProblem::scalar("pb", 2, 2, &[(0, vec![c64(0.25, 0.0), c64(b, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

/// Third-order-in-x perturbation of the half-integer mode, so that the recursion reaches depth one with two layers active.
fn pb_deep(b: f64, c: f64) -> ConeProblem {
    ConeProblem::scalar(
        "pb-deep",
        2,
        3,
        &[
            (0, vec![c64(0.25, 0.0), c64(b, 0.0), c64(c, 0.0)]),
            (1, vec![c64(0.0, 0.0), c64(0.0, c)]),
            (2, vec![c64(1.0, 0.0)]),
        ],
    )
    .unwrap()
}

fn tip(p: &ConeProblem) -> (ConormalFamily, BoundarySpectrum) {
    let fam = conormal_family(p);
    let spectrum = boundary_spectrum(fam.principal(), Region::everywhere(), 1e-8).unwrap();
    (fam, spectrum)
}

fn scalar_term(sigma: Cx, coeffs: &[f64]) -> SingularTerm {
    SingularTerm { sigma, coeffs: coeffs.iter().map(|&c| CVec::from_element(1, c64(c, 0.0))).collect() }
}

fn close(a: &SingularFunction, b: &SingularFunction, tol: f64) -> bool {
    a.sub(b).coeff_norm() <= tol * a.coeff_norm().max(b.coeff_norm()).max(1.0)
}

#[test]
fn lifted_singular_function_of_the_perturbed_mode() {
    for b in [1.0, -0.5, 3.0] {
        let (fam, spectrum) = tip(&pb(b));
        let psi = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)]);
        let lifted = theta_inverse(&psi, &fam, &spectrum).unwrap();
        let expected =
            SingularFunction::new(1, vec![scalar_term(c64(0.0, 0.5), &[1.0]), scalar_term(c64(0.0, -0.5), &[-b, b])]);
        assert!(lifted.sub(&expected).coeff_norm() <= 1e-10, "b = {b}: {lifted:?}");
    }
}

#[test]
fn defining_identity_holds_for_every_basis_element() {
    for p in [cl2(0.0), cl2(0.5), pb(1.0), pb(-2.0), pb_deep(1.0, 0.7)] {
        let (fam, spectrum) = tip(&p);
        for e in wedge_quotient_basis(&spectrum, p.order()).unwrap().elements {
            let exp = e_recursion(&e.function, &fam, &spectrum).unwrap();
            let r = defining_identity_residual(&exp, &fam);
            assert!(r <= 1e-10, "{}: residual {r}", p.name());
        }
    }
}

#[test]
fn forward_map_undoes_the_lift() {
    for p in [cl2(0.0), pb(1.0), pb_deep(0.3, -1.2)] {
        let (fam, spectrum) = tip(&p);
        for e in wedge_quotient_basis(&spectrum, 2).unwrap().elements {
            let lifted = theta_inverse(&e.function, &fam, &spectrum).unwrap();
            let back = theta_forward(&lifted, &fam, &spectrum).unwrap();
            assert!(close(&back, &e.function, 1e-12), "{}: {back:?}", p.name());
            let again = theta_inverse(&back, &fam, &spectrum).unwrap();
            assert!(close(&again, &lifted, 1e-12));
        }
    }
}

#[test]
fn constant_coefficients_need_no_correction() {
    let (fam, spectrum) = tip(&cl2(0.0));
    for e in wedge_quotient_basis(&spectrum, 2).unwrap().elements {
        assert_eq!(theta_inverse(&e.function, &fam, &spectrum).unwrap(), e.function);
    }
}

#[test]
fn lift_defect_decays_like_one_over_rho() {
    let (fam, spectrum) = tip(&pb(1.0));
    let rhos: Vec<f64> = (0..=16).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
    let mut fitted = 0;
    for e in wedge_quotient_basis(&spectrum, 2).unwrap().elements {
        let lifted = theta_inverse(&e.function, &fam, &spectrum).unwrap();
        let decay = ltheta_decay(&lifted, &rhos, &fam, &spectrum).unwrap();
        match decay.fitted_exponent {
            Some(exp) => {
                assert!(exp <= -0.9, "exponent {exp}");
                assert_eq!(decay.log_power, 1);
                fitted += 1;
            }
            // the fast-decaying solution is its own lift, so the defect is rounding only
            None => assert!(decay.norms.iter().all(|n| *n <= 1e-14 * lifted.coeff_norm())),
        }
    }
    assert_eq!(fitted, 1);
}

fn arb_function() -> impl Strategy<Value = SingularFunction> {
    prop::collection::vec(((-2.0f64..2.0, -2.0f64..2.0), prop::collection::vec(-3.0f64..3.0, 1..=3)), 1..=3).prop_map(
        |raw| {
            let terms = raw
                .into_iter()
                .enumerate()
                .map(|(i, ((re, im), coeffs))| scalar_term(c64(re + 5.0 * i as f64, im), &coeffs))
                .collect();
            SingularFunction::new(1, terms)
        },
    )
}

proptest! {
    #[test]
    fn dilations_form_a_group(sf in arb_function(), r1 in 0.05f64..20.0, r2 in 0.05f64..20.0) {
        let two_steps = kappa_on_singular(&kappa_on_singular(&sf, r1, 2), r2, 2);
        let one_step = kappa_on_singular(&sf, r1 * r2, 2);
        prop_assert!(close(&two_steps, &one_step, 1e-12));
        let back = kappa_on_singular(&one_step, 1.0 / (r1 * r2), 2);
        prop_assert!(close(&back, &sf, 1e-12));
    }

    #[test]
    fn lifted_dilations_form_a_group(b in -3.0f64..3.0, r1 in 0.1f64..10.0, r2 in 0.1f64..10.0) {
        let (fam, spectrum) = tip(&pb(b));
        for e in wedge_quotient_basis(&spectrum, 2).unwrap().elements {
            let u = theta_inverse(&e.function, &fam, &spectrum).unwrap();
            let two = kappa_tilde(&kappa_tilde(&u, r1, &fam, &spectrum).unwrap(), r2, &fam, &spectrum).unwrap();
            let one = kappa_tilde(&u, r1 * r2, &fam, &spectrum).unwrap();
            prop_assert!(close(&two, &one, 1e-10));
        }
    }

    #[test]
    fn identity_holds_for_random_perturbations(b in -4.0f64..4.0, c in -2.0f64..2.0) {
        let p = pb_deep(b, c);
        let (fam, spectrum) = tip(&p);
        for e in wedge_quotient_basis(&spectrum, 2).unwrap().elements {
            let exp = e_recursion(&e.function, &fam, &spectrum).unwrap();
            prop_assert!(defining_identity_residual(&exp, &fam) <= 1e-10);
        }
    }
}
