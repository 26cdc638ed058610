//! Singular functions `Σ c_{σ,k} log^k(x) x^{iσ}`, the open strip of the
//! boundary spectrum, bases of the quotient `D_max / D_min` for the model
//! operator, and exact symbolic calculus of b-operators on singular functions.

mod singular;

pub use singular::{rank, same_exponent, CoefficientSpace, SingularFunction, SingularTerm, EXPONENT_TOL};

use mellin_core::jet::factorial;
use mellin_core::spectrum::lexicographic;
use mellin_core::{BoundarySpectrum, CMat, CVec, ConormalFamily, Cx, Error, LaurentSeries, MatPoly, Result};
use std::ops::Range;

/// Spectrum points inside the open strip `-m/2 < Im σ < m/2`, and those on its edges.
#[derive(Clone, Debug, Default)]
pub struct StripReport {
    pub inside: Vec<Cx>,
    /// Points within the tolerance of `Im σ = ±m/2`.
    pub on_lines: Vec<Cx>,
}

impl StripReport {
    /// Warning text when edge points exist.
    pub fn warning(&self) -> Option<String> {
        if self.on_lines.is_empty() {
            None
        } else {
            Some(format!(
                "Dmin-nonsimple: boundary spectrum meets the strip lines at {}",
                self.on_lines.iter().map(|z| format!("{z}")).collect::<Vec<_>>().join(", ")
            ))
        }
    }
}

/// Splits the boundary spectrum against the strip of half-width `m/2`.
pub fn strip_sigma(spectrum: &BoundarySpectrum, m: usize) -> StripReport {
    let half = m as f64 / 2.0;
    let tol = spectrum.tol.max(1e-12);
    let mut out = StripReport::default();
    for p in &spectrum.points {
        let s = p.sigma;
        let scale = 1.0f64.max(s.norm());
        if (s.im.abs() - half).abs() <= tol * scale {
            out.on_lines.push(s);
        } else if s.im.abs() < half {
            out.inside.push(s);
        }
    }
    out
}

/// One basis element of the model quotient, with the exponent it belongs to.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisElement {
    pub sigma0: Cx,
    /// Length of the Jordan chain the element comes from.
    pub chain_length: usize,
    /// Position in that chain (its log-degree).
    pub position: usize,
    pub function: SingularFunction,
}

/// Ordered basis of `Ẽ_{∧,max}`, grouped by exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientBasis {
    pub elements: Vec<BasisElement>,
}

impl QuotientBasis {
    pub fn total_dim(&self) -> usize {
        self.elements.len()
    }

    pub fn functions(&self) -> Vec<&SingularFunction> {
        self.elements.iter().map(|e| &e.function).collect()
    }

    /// Distinct exponents in order of first appearance, with their elements.
    pub fn sigma_groups(&self) -> Vec<(Cx, Vec<&SingularFunction>)> {
        let mut groups: Vec<(Cx, Vec<&SingularFunction>)> = Vec::new();
        for e in &self.elements {
            match groups.iter_mut().find(|(s, _)| same_exponent(*s, e.sigma0)) {
                Some(g) => g.1.push(&e.function),
                None => groups.push((e.sigma0, vec![&e.function])),
            }
        }
        groups
    }
}

/// Rescales so that the top log-coefficient has unit norm and its largest entry is real positive.
fn normalize_top(f: &SingularFunction) -> SingularFunction {
    let Some(term) = f.terms().first() else {
        return f.clone();
    };
    let top = term.coeffs.last().unwrap();
    let mut lead = Cx::new(0.0, 0.0);
    for z in top.iter() {
        if z.norm() > lead.norm() * (1.0 + 1e-9) {
            lead = *z;
        }
    }
    if lead.norm() == 0.0 {
        return f.clone();
    }
    let phase = lead.conj() / lead.norm();
    f.scaled(phase / top.norm())
}

/// Basis of `Ẽ_{∧,max}` built from the Jordan chains in the open strip.
///
/// A chain `x_0, …, x_{ℓ-1}` at `σ₀` yields `u_r = x^{iσ₀} Σ_{j≤r} (i log x)^j / j! · x_{r-j}`
/// for `r < ℓ`; each `u_r` is annihilated by `P̂₀(x D_x)`. Chains are ordered by
/// decreasing length, then by exponent (real part, then imaginary part).
pub fn wedge_quotient_basis(spectrum: &BoundarySpectrum, m: usize) -> Result<QuotientBasis> {
    let strip = strip_sigma(spectrum, m);
    if !strip.on_lines.is_empty() {
        return Err(Error::DminNonSimple(strip.on_lines));
    }
    let mut chains: Vec<(Cx, &Vec<CVec>)> = Vec::new();
    for p in &spectrum.points {
        if strip.inside.iter().any(|s| same_exponent(*s, p.sigma)) {
            for c in &p.jordan_chains {
                chains.push((p.sigma, c));
            }
        }
    }
    chains.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(lexicographic(a.0, b.0)));
    let mut elements = Vec::new();
    for (sigma0, chain) in chains {
        for r in 0..chain.len() {
            let coeffs: Vec<CVec> =
                (0..=r).map(|j| chain[r - j].clone() * (Cx::new(0.0, 1.0).powu(j as u32) / factorial(j))).collect();
            let f = SingularFunction::monomial(sigma0, coeffs);
            elements.push(BasisElement { sigma0, chain_length: chain.len(), position: r, function: normalize_top(&f) });
        }
    }
    Ok(QuotientBasis { elements })
}

/// `dim D_max / D_min`: total algebraic multiplicity in the open strip.
pub fn quotient_dimension(spectrum: &BoundarySpectrum, m: usize) -> Result<usize> {
    let strip = strip_sigma(spectrum, m);
    if !strip.on_lines.is_empty() {
        return Err(Error::DminNonSimple(strip.on_lines));
    }
    Ok(spectrum
        .points
        .iter()
        .filter(|p| strip.inside.iter().any(|s| same_exponent(*s, p.sigma)))
        .map(|p| p.algebraic_multiplicity)
        .sum())
}

/// Factor linking `log^k(x) x^{iσ₁}` to the coefficient of `(σ - σ₁)^{-(k+1)}`
/// in the Mellin transform of its cut-off: `(-1)^k k! i^{k+1}`.
fn dictionary_factor(k: usize) -> Cx {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    Cx::new(0.0, 1.0).powu(k as u32 + 1) * (sign * factorial(k))
}

/// Principal part at `σ₁` of the Mellin transform of `ω · sf` (independent of the cut-off `ω`).
///
/// Returns an `N×1` series carrying orders `-(K+1) … -1`; the zero series when
/// `sf` has no term at `σ₁`.
pub fn mellin_singular_part(sf: &SingularFunction, sigma1: Cx) -> LaurentSeries {
    let n = sf.dim();
    match sf.term_at(sigma1) {
        None => LaurentSeries::zero(sigma1, n, 1, -1),
        Some(term) => {
            let p = term.coeffs.len();
            let coeffs = (0..p)
                .map(|i| {
                    // order -(p - i), i.e. log power k = p - 1 - i
                    let k = p - 1 - i;
                    let v = &term.coeffs[k] * dictionary_factor(k);
                    CMat::from_column_slice(n, 1, v.as_slice())
                })
                .collect();
            LaurentSeries::new(sigma1, p, n, 1, coeffs)
        }
    }
}

/// The single-exponent singular function whose Mellin principal part is `series`.
pub fn singular_from_principal_part(series: &LaurentSeries) -> SingularFunction {
    let (n, cols) = series.shape();
    assert_eq!(cols, 1, "principal part must be vector valued");
    let coeffs: Vec<CVec> = (0..series.pole_order)
        .map(|k| {
            let c = series.coeff(-(k as isize) - 1);
            CVec::from_column_slice(c.as_slice()) / dictionary_factor(k)
        })
        .collect();
    SingularFunction::new(n, vec![SingularTerm { sigma: series.center, coeffs }])
}

/// Applies `Q(x D_x)` to `x^{iσ} Σ_k c_k log^k x`: with `t = log x`,
/// `x D_x` acts as `σ + D_t`, and `D_t t^k = -ik t^{k-1}`.
fn apply_symbol_to_term(q: &MatPoly, sigma: Cx, coeffs: &[CVec]) -> Vec<CVec> {
    let n = coeffs[0].len();
    let deg = coeffs.len();
    let taylor: Vec<CMat> = (0..deg.min(q.degree() + 1)).map(|j| q.taylor_coeff(sigma, j)).collect();
    (0..deg)
        .map(|r| {
            let mut acc = CVec::zeros(n);
            for (j, qj) in taylor.iter().enumerate() {
                if r + j >= deg {
                    break;
                }
                let fall = factorial(r + j) / factorial(r);
                acc += qj * &coeffs[r + j] * (Cx::new(0.0, -1.0).powu(j as u32) * fall);
            }
            acc
        })
        .collect()
}

/// Applies the single Taylor layer `x^j Q_j(x D_x)` to `sf` exactly.
pub fn apply_layer(q: &MatPoly, j: usize, sf: &SingularFunction) -> SingularFunction {
    let shift = Cx::new(0.0, j as f64);
    let terms = sf
        .terms()
        .iter()
        .map(|t| SingularTerm { sigma: t.sigma - shift, coeffs: apply_symbol_to_term(q, t.sigma, &t.coeffs) })
        .collect();
    SingularFunction::new(sf.dim(), terms)
}

/// Exact result of `Σ_{j ∈ layers} x^j Q_j(x D_x)` applied to `sf`.
pub fn apply_b_operator(fam: &ConormalFamily, layers: Range<usize>, sf: &SingularFunction) -> SingularFunction {
    let mut out = SingularFunction::zero(sf.dim());
    for j in layers {
        out = out.add(&apply_layer(&fam.layer(j), j, sf));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mellin_core::{boundary_spectrum, c64, conormal_family, ConeProblem, Region};

    fn cl2(l: f64) -> ConeProblem {
        ConeProblem::scalar("cl2", 2, 1, &[(2, vec![c64(1.0, 0.0)]), (0, vec![c64(l * l, 0.0)])]).unwrap()
    }

    fn spec_of(p: &ConeProblem) -> BoundarySpectrum {
        boundary_spectrum(conormal_family(p).principal(), Region::centered(10.0, 10.0), 1e-8).unwrap()
    }

    #[test]
    fn constant_and_log_for_double_root() {
        let p = cl2(0.0);
        let b = wedge_quotient_basis(&spec_of(&p), 2).unwrap();
        assert_eq!(b.total_dim(), 2);
        let one = SingularFunction::scalar(c64(0.0, 0.0), &[c64(1.0, 0.0)]);
        let log = SingularFunction::scalar(c64(0.0, 0.0), &[c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert!(b.elements[0].function.sub(&one).coeff_norm() < 1e-12);
        assert!(b.elements[1].function.sub(&log).coeff_norm() < 1e-12);
    }

    #[test]
    fn boundary_line_roots_abort() {
        let e = wedge_quotient_basis(&spec_of(&cl2(1.0)), 2).unwrap_err();
        assert!(matches!(e, Error::DminNonSimple(_)));
        assert_eq!(quotient_dimension(&spec_of(&cl2(2.0)), 2).unwrap(), 0);
    }

    #[test]
    fn dictionary_examples() {
        let s0 = c64(0.3, 0.2);
        let l = mellin_singular_part(&SingularFunction::scalar(s0, &[c64(1.0, 0.0)]), s0);
        assert_eq!(l.pole_order, 1);
        assert!((l.coeff(-1)[(0, 0)] - c64(0.0, 1.0)).norm() < 1e-15);
        let l2 = mellin_singular_part(&SingularFunction::scalar(s0, &[c64(0.0, 0.0), c64(1.0, 0.0)]), s0);
        assert_eq!(l2.pole_order, 2);
        assert!((l2.coeff(-2)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(l2.coeff(-1)[(0, 0)].norm() < 1e-15);
        let far = mellin_singular_part(&SingularFunction::scalar(s0, &[c64(1.0, 0.0)]), c64(0.0, 0.0));
        assert_eq!(far.pole_order, 0);
    }

    #[test]
    fn log_calculus_example() {
        // (σ² + 1/4) applied to b log(x) x^{1/2} gives -b x^{1/2}
        let q = MatPoly::scalar(&[c64(0.25, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]);
        let b = 1.7;
        let f = SingularFunction::scalar(c64(0.0, -0.5), &[c64(0.0, 0.0), c64(b, 0.0)]);
        let g = apply_layer(&q, 0, &f);
        let want = SingularFunction::scalar(c64(0.0, -0.5), &[c64(-b, 0.0)]);
        assert!(g.sub(&want).coeff_norm() < 1e-14);
    }

    #[test]
    fn x_dependent_layer_shifts_exponent() {
        let p = ConeProblem::scalar("pb", 2, 2, &[(2, vec![c64(1.0, 0.0)]), (0, vec![c64(0.25, 0.0), c64(1.0, 0.0)])])
            .unwrap();
        let fam = conormal_family(&p);
        let psi = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)]);
        let g = apply_b_operator(&fam, 1..2, &psi);
        // x · x^{-1/2} = x^{1/2}
        assert!(g.sub(&SingularFunction::scalar(c64(0.0, -0.5), &[c64(1.0, 0.0)])).coeff_norm() < 1e-15);
    }
}
