//! The isomorphism θ between the extension quotients of a cone operator and of
//! its frozen-coefficient model, and the dilation actions on singular functions.
//!
//! `θ⁻¹` on the exponent `σ₀` is `Σ_{ϑ=0}^{N(σ₀)} e_ϑ`, where `e_0` is the
//! identity and `e_ϑ` cancels the Mellin pole that the lower Taylor layers
//! create at `σ₀ - iϑ`. The recursion runs through `ϑ = N(σ₀)` inclusive, the
//! largest integer with `Im σ₀ - N(σ₀) > -m/2`.

use domains::{
    apply_b_operator, mellin_singular_part, same_exponent, singular_from_principal_part, strip_sigma,
    wedge_quotient_basis, CoefficientSpace, SingularFunction, SingularTerm,
};
use mellin_core::jet::binomial;
use mellin_core::laurent::polynomial_series;
use mellin_core::linalg::{linear_fit, svd};
use mellin_core::{laurent_inverse, BoundarySpectrum, CMat, CVec, ConormalFamily, Cx, Error, LaurentSeries, Result};

/// Result of the recursion for one exponent.
#[derive(Clone, Debug)]
pub struct ThetaExpansion {
    pub sigma0: Cx,
    /// `N(σ₀)`.
    pub depth: usize,
    /// `e_0 = ψ, e_1, …, e_{N(σ₀)}`; `e_ϑ` has the single exponent `σ₀ - iϑ` or is zero.
    pub terms: Vec<SingularFunction>,
    /// Set when the recursion needed Taylor layers the problem does not carry (treated as zero).
    pub missing_layers: bool,
}

impl ThetaExpansion {
    pub fn sum(&self) -> SingularFunction {
        self.terms.iter().fold(SingularFunction::zero(self.terms[0].dim()), |acc, t| acc.add(t))
    }
}

/// Largest integer `N` with `Im σ₀ - N > -m/2`.
pub fn recursion_depth(sigma0: Cx, m: usize) -> usize {
    let n = (sigma0.im + m as f64 / 2.0 - 1e-12).ceil() - 1.0;
    n.max(0.0) as usize
}

/// Coefficients below this (relative to the input size) are dropped from results.
const CHOP: f64 = 1e-14;

fn chop(f: &SingularFunction, scale: f64) -> SingularFunction {
    f.chopped(CHOP * scale.max(1.0))
}

fn check_in_strip(sigma0: Cx, spectrum: &BoundarySpectrum, m: usize) -> Result<()> {
    let strip = strip_sigma(spectrum, m);
    if strip.inside.iter().any(|s| same_exponent(*s, sigma0)) {
        Ok(())
    } else {
        Err(Error::ExponentNotInStrip(sigma0))
    }
}

/// The functions `e_{σ₀,ϑ}(ψ)` for a single-exponent `ψ` at a point `σ₀` of the strip.
///
/// Step `ϑ` forms `S(σ) = Σ_{k=1}^{ϑ} Q_k(σ + ik) · s[M(ω e_{ϑ-k})](σ + ik)`,
/// multiplies by the Laurent expansion of `P̂₀(σ)⁻¹` at `σ₀ - iϑ`, and turns the
/// negated principal part back into a singular function.
pub fn e_recursion(
    psi: &SingularFunction,
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<ThetaExpansion> {
    let m = fam.order();
    let sigma0 = psi.single_term()?.sigma;
    let sigma0 = spectrum.point_near(sigma0).map(|p| p.sigma).unwrap_or(sigma0);
    check_in_strip(sigma0, spectrum, m)?;
    let depth = recursion_depth(sigma0, m);
    let scale = psi.coeff_norm();
    let n = fam.dim();
    let mut terms = vec![psi.clone()];
    let mut missing = false;
    for theta in 1..=depth {
        let center = sigma0 - Cx::new(0.0, theta as f64);
        // principal parts shifted to `center`, each multiplied by Q_k(σ + ik)
        let mut parts: Vec<LaurentSeries> = Vec::new();
        for k in 1..=theta {
            if k >= fam.layer_count() {
                missing = true;
                continue;
            }
            let prev = &terms[theta - k];
            if prev.is_zero() {
                continue;
            }
            let pp = mellin_singular_part(prev, sigma0 - Cx::new(0.0, (theta - k) as f64));
            if pp.pole_order == 0 {
                continue;
            }
            let moved = LaurentSeries::new(
                center,
                pp.pole_order,
                n,
                1,
                (0..pp.pole_order).map(|i| pp.coeff(i as isize - pp.pole_order as isize)).collect(),
            );
            parts.push(times_shifted_layer(&moved, k, fam, center));
        }
        if parts.is_empty() {
            terms.push(SingularFunction::zero(n));
            continue;
        }
        let q = parts.iter().map(|p| p.pole_order).max().unwrap();
        let inverse_pole = spectrum.pole_order_at(center);
        let inv = laurent_inverse(fam.principal(), center, q.saturating_sub(1), spectrum)?;
        // the product needs S through order inverse_pole - 1
        let s = parts.iter().map(|p| pad(p, inverse_pole as isize - 1)).reduce(|a, b| a.add(&b)).unwrap();
        let prod = inv.mul(&recentered(&s, inv.center));
        let principal = prod.principal_part().scaled(Cx::new(-1.0, 0.0));
        let e = singular_from_principal_part(&recentered(&principal, center));
        terms.push(chop(&e, scale));
    }
    Ok(ThetaExpansion { sigma0, depth, terms, missing_layers: missing })
}

/// Product of a shifted principal part with the polynomial `Q_k(σ + ik)`, kept exact.
fn times_shifted_layer(pp: &LaurentSeries, k: usize, fam: &ConormalFamily, center: Cx) -> LaurentSeries {
    let poly = polynomial_series(&fam.shifted_layer(k), center);
    // both factors are exact, so padding with zeros keeps every term of the product
    let padded = pad(&poly, pp.pole_order as isize + poly.max_order());
    let principal = pad(pp, poly.max_order() + 1);
    padded.mul(&principal)
}

/// Appends zero coefficients so that the series is known through `order`
/// (only valid for series whose higher terms really vanish).
fn pad(s: &LaurentSeries, order: isize) -> LaurentSeries {
    let (r, c) = s.shape();
    let coeffs = (-(s.pole_order as isize)..=order.max(s.max_order())).map(|j| s.coeff(j)).collect();
    LaurentSeries::new(s.center, s.pole_order, r, c, coeffs)
}

fn recentered(s: &LaurentSeries, center: Cx) -> LaurentSeries {
    let (r, c) = s.shape();
    let coeffs = (-(s.pole_order as isize)..=s.max_order()).map(|j| s.coeff(j)).collect();
    LaurentSeries::new(center, s.pole_order, r, c, coeffs)
}

/// `θ⁻¹ ψ` for `ψ ∈ Ẽ_{∧,max}`: the recursion applied to every exponent of `ψ`.
pub fn theta_inverse(
    psi: &SingularFunction,
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<SingularFunction> {
    let mut out = SingularFunction::zero(psi.dim());
    for t in psi.terms() {
        let part = SingularFunction::new(psi.dim(), vec![t.clone()]);
        out = out.add(&e_recursion(&part, fam, spectrum)?.sum());
    }
    Ok(out)
}

/// Relative residual accepted when expressing a function in the basis `θ⁻¹(wedge basis)`.
const ATTRIBUTION_TOL: f64 = 1e-9;

/// `θ ũ` for `ũ ∈ Ẽ_max`.
///
/// `ũ` is decomposed in the images `θ⁻¹ b_i` of the model basis; the result is
/// `Σ α_i b_i`, which keeps the leading term of each exponent group. Going
/// through the basis keeps the attribution unique also when a descendant
/// exponent `σ₀ - iϑ` is itself a point of the strip.
pub fn theta_forward(
    u: &SingularFunction,
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<SingularFunction> {
    if u.is_zero() {
        return Ok(u.clone());
    }
    let basis = wedge_quotient_basis(spectrum, fam.order())?;
    let images: Vec<SingularFunction> =
        basis.functions().iter().map(|b| theta_inverse(b, fam, spectrum)).collect::<Result<_>>()?;
    let mut all: Vec<&SingularFunction> = images.iter().collect();
    all.push(u);
    let space = CoefficientSpace::spanning(&all, u.dim());
    let a = space.matrix(&images.iter().collect::<Vec<_>>());
    let rhs = space.coordinates(u);
    let alpha = least_squares(&a, &rhs);
    let resid = (&a * &alpha - &rhs).norm();
    if resid > ATTRIBUTION_TOL * rhs.norm() {
        return Err(Error::AmbiguousAttribution(format!(
            "function is not a combination of the lifted quotient basis (relative residual {:.2e})",
            resid / rhs.norm()
        )));
    }
    let mut out = SingularFunction::zero(u.dim());
    for (c, b) in alpha.iter().zip(basis.functions()) {
        out = out.add(&b.scaled(*c));
    }
    Ok(chop(&out, u.coeff_norm()))
}

fn least_squares(a: &CMat, b: &CVec) -> CVec {
    if a.ncols() == 0 {
        return CVec::zeros(0);
    }
    let d = svd(a);
    let top = d.s.first().copied().unwrap_or(0.0);
    let mut x = CVec::zeros(a.ncols());
    let ub = d.u.adjoint() * b;
    for (i, &s) in d.s.iter().enumerate().take(a.ncols().min(a.nrows())) {
        if s > 1e-12 * top {
            x += d.v.column(i) * (ub[i] / s);
        }
    }
    x
}

/// `κ_ρ` on singular functions: `x^{iσ} log^k x ↦ ρ^{m/2} ρ^{iσ} x^{iσ} (log x + log ρ)^k`.
pub fn kappa_on_singular(sf: &SingularFunction, rho: f64, m: usize) -> SingularFunction {
    assert!(rho > 0.0, "dilation factor must be positive");
    let lr = rho.ln();
    let terms = sf
        .terms()
        .iter()
        .map(|t| {
            let factor = (Cx::new(m as f64 / 2.0 * lr, 0.0) + Cx::new(0.0, 1.0) * t.sigma * lr).exp();
            let deg = t.coeffs.len();
            let coeffs = (0..deg)
                .map(|j| {
                    let mut acc = CVec::zeros(sf.dim());
                    for k in j..deg {
                        acc += &t.coeffs[k] * Cx::new(binomial(k, j) * lr.powi((k - j) as i32), 0.0);
                    }
                    acc * factor
                })
                .collect();
            SingularTerm { sigma: t.sigma, coeffs }
        })
        .collect();
    SingularFunction::new(sf.dim(), terms)
}

/// `κ̃_ρ = θ⁻¹ κ_ρ θ`.
pub fn kappa_tilde(
    u: &SingularFunction,
    rho: f64,
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<SingularFunction> {
    let w = theta_forward(u, fam, spectrum)?;
    theta_inverse(&kappa_on_singular(&w, rho, fam.order()), fam, spectrum)
}

/// `L_ρ = κ_ρ⁻¹ κ̃_ρ`.
pub fn l_rho(
    u: &SingularFunction,
    rho: f64,
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<SingularFunction> {
    Ok(kappa_on_singular(&kappa_tilde(u, rho, fam, spectrum)?, 1.0 / rho, fam.order()))
}

/// `e_{σ₀,ϑ}(ρ) ψ = ρ^ϑ κ_ρ⁻¹ e_{σ₀,ϑ}(κ_ρ ψ)`.
pub fn e_rho(
    psi: &SingularFunction,
    order: usize,
    rho: f64,
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<SingularFunction> {
    let m = fam.order();
    let exp = e_recursion(&kappa_on_singular(psi, rho, m), fam, spectrum)?;
    let e = exp.terms.get(order).cloned().unwrap_or_else(|| SingularFunction::zero(psi.dim()));
    Ok(kappa_on_singular(&e, 1.0 / rho, m).scaled(Cx::new(rho.powi(order as i32), 0.0)))
}

/// `θ` applied to a list of representatives, with a check that independence survives.
pub fn domain_transfer(
    basis: &[SingularFunction],
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<Vec<SingularFunction>> {
    let out: Vec<SingularFunction> = basis.iter().map(|u| theta_forward(u, fam, spectrum)).collect::<Result<_>>()?;
    let before = domains::rank(&basis.iter().collect::<Vec<_>>(), fam.dim(), 1e-10);
    let after = domains::rank(&out.iter().collect::<Vec<_>>(), fam.dim(), 1e-10);
    assert_eq!(before, after, "θ must preserve linear independence");
    Ok(out)
}

/// Decay of `(L_ρ - θ) ũ` over a list of dilation factors.
#[derive(Clone, Debug)]
pub struct LthetaDecay {
    pub rhos: Vec<f64>,
    pub norms: Vec<f64>,
    /// Highest power of `log ρ` in the difference.
    pub log_power: usize,
    /// Slope of `log(norm / (1 + log ρ)^μ)` against `log ρ`; `None` when the difference vanishes.
    pub fitted_exponent: Option<f64>,
}

pub fn ltheta_decay(
    u: &SingularFunction,
    rhos: &[f64],
    fam: &ConormalFamily,
    spectrum: &BoundarySpectrum,
) -> Result<LthetaDecay> {
    let theta_u = theta_forward(u, fam, spectrum)?;
    let mut norms = Vec::new();
    for &rho in rhos {
        let d = l_rho(u, rho, fam, spectrum)?.sub(&theta_u);
        norms.push(d.coeff_norm());
    }
    // the log-degree of the correction terms bounds the power of log ρ
    let log_power =
        theta_inverse(&theta_u, fam, spectrum)?.sub(&theta_u).terms().iter().map(|t| t.log_degree()).max().unwrap_or(0);
    let top = norms.iter().cloned().fold(0.0, f64::max);
    let fitted_exponent = if top <= 1e-14 * u.coeff_norm().max(1.0) {
        None
    } else {
        let xs: Vec<f64> = rhos.iter().map(|r| r.ln()).collect();
        let ys: Vec<f64> =
            rhos.iter().zip(&norms).map(|(r, n)| (n / (1.0 + r.ln()).powi(log_power as i32)).ln()).collect();
        Some(linear_fit(&xs, &ys).0)
    };
    Ok(LthetaDecay { rhos: rhos.to_vec(), norms, log_power, fitted_exponent })
}

/// Residual of the defining identity `Σ_{k=0}^{ϑ} (x^k Q_k)(e_{ϑ-k}) = 0` for every `ϑ ≤ N(σ₀)`.
pub fn defining_identity_residual(exp: &ThetaExpansion, fam: &ConormalFamily) -> f64 {
    let mut worst: f64 = 0.0;
    for theta in 0..=exp.depth {
        let mut acc = SingularFunction::zero(fam.dim());
        for k in 0..=theta {
            acc = acc.add(&apply_b_operator(fam, k..k + 1, &exp.terms[theta - k]));
        }
        worst = worst.max(acc.coeff_norm());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use mellin_core::{boundary_spectrum, c64, conormal_family, ConeProblem, Region};

    fn pb(b: f64) -> (ConormalFamily, BoundarySpectrum) {
        let p = ConeProblem::scalar("pb", 2, 2, &[(2, vec![c64(1.0, 0.0)]), (0, vec![c64(0.25, 0.0), c64(b, 0.0)])])
            .unwrap();
        let fam = conormal_family(&p);
        let spectrum = boundary_spectrum(fam.principal(), Region::centered(10.0, 10.0), 1e-8).unwrap();
        (fam, spectrum)
    }

    fn lifted_power(b: f64) -> SingularFunction {
        SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)])
            .add(&SingularFunction::scalar(c64(0.0, -0.5), &[c64(-b, 0.0), c64(b, 0.0)]))
    }

    #[test]
    fn depth_from_strip() {
        assert_eq!(recursion_depth(c64(0.0, 0.5), 2), 1);
        assert_eq!(recursion_depth(c64(0.0, -0.5), 2), 0);
        assert_eq!(recursion_depth(c64(0.0, 0.0), 2), 0);
    }

    #[test]
    fn lifted_power_for_perturbed_problem() {
        let b = 1.3;
        let (fam, spectrum) = pb(b);
        let psi = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)]);
        let exp = e_recursion(&psi, &fam, &spectrum).unwrap();
        assert_eq!(exp.depth, 1);
        assert!(exp.sum().sub(&lifted_power(b)).coeff_norm() < 1e-10);
        assert!(defining_identity_residual(&exp, &fam) < 1e-10);
    }

    #[test]
    fn forward_map_inverts() {
        let (fam, spectrum) = pb(1.0);
        let back = theta_forward(&lifted_power(1.0), &fam, &spectrum).unwrap();
        let psi = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)]);
        assert!(back.sub(&psi).coeff_norm() < 1e-12);
    }

    #[test]
    fn kappa_tilde_example() {
        let (fam, spectrum) = pb(1.0);
        let e = std::f64::consts::E;
        let k = kappa_tilde(&lifted_power(1.0), e, &fam, &spectrum).unwrap();
        assert!(k.sub(&lifted_power(1.0).scaled(c64(e.sqrt(), 0.0))).coeff_norm() < 1e-12);
    }

    #[test]
    fn l_rho_example() {
        let (fam, spectrum) = pb(1.0);
        let rho = 7.0f64;
        let d = l_rho(&lifted_power(1.0), rho, &fam, &spectrum)
            .unwrap()
            .sub(&SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)]));
        let want = SingularFunction::scalar(c64(0.0, -0.5), &[c64((-rho.ln() - 1.0) / rho, 0.0), c64(1.0 / rho, 0.0)]);
        assert!(d.sub(&want).coeff_norm() < 1e-12);
    }
}
