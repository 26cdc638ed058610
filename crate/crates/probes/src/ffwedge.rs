use crate::fit::{power_fit, PowerFit};
use crate::sweep::SweepConfig;
use border::{reduce_to_boundary, BorderedFamily};
use discrete::{assemble, CoefficientField, DiscreteSpace, ExtensionSpec, Side, TipData};
use domains::SingularFunction;
use mellin_core::linalg::singular_values;
use mellin_core::{ConeProblem, Result};
use rayon::prelude::*;
use serde::Serialize;
use theta::kappa_tilde;

#[derive(Clone, Debug, Serialize)]
pub struct FWedgeSample {
    pub lambda: [f64; 2],
    pub modulus: f64,
    /// `‖(F(λ) - F_∧(λ)θ) κ̃_ρ‖`.
    pub difference: f64,
    /// The difference relative to `‖F_∧(λ)θ κ̃_ρ‖`.
    pub relative: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FWedgeReport {
    pub theta0: f64,
    pub samples: Vec<FWedgeSample>,
    /// Share of consecutive sample pairs along which the difference decreased.
    pub decreasing_fraction: f64,
    /// Power-law fit of the difference against `|λ|` over all samples.
    pub fit: Option<PowerFit>,
    pub fitted_exponent: Option<f64>,
}

/// Compares the reduction to the boundary of a cone realization with that of
/// its model along a ray.
///
/// At each `λ` the enrichment `basis` is dilated by `κ̃_ρ`, `ρ = |λ|^{1/m}`,
/// and realized on both sides; `cone_bf` and `wedge_bf` border the minimal
/// parts of `A` and `A_∧` on `space`.
pub fn f_vs_fwedge(
    problem: &ConeProblem,
    basis: &[SingularFunction],
    space: &DiscreteSpace,
    cone_bf: &BorderedFamily,
    wedge_bf: &BorderedFamily,
    cfg: &SweepConfig,
) -> Result<FWedgeReport> {
    cfg.validate()?;
    let tip = TipData::new(&problem.tip_problem())?;
    let m = problem.order() as f64;
    let lambdas = cfg.lambdas();
    let samples = lambdas
        .par_iter()
        .map(|&lambda| {
            let rho = lambda.norm().powf(1.0 / m);
            let dilated =
                basis.iter().map(|e| kappa_tilde(e, rho, &tip.family, &tip.spectrum)).collect::<Result<Vec<_>>>()?;
            let ext = ExtensionSpec::span(dilated);
            let cone = assemble(problem, space, &ext, lambda, Side::Cone)?;
            let wedge = assemble(problem, space, &ext, lambda, Side::Wedge)?;
            let f = reduce_to_boundary(&cone, cone_bf, lambda)?.f;
            let fw = reduce_to_boundary(&wedge, wedge_bf, lambda)?.f;
            let top = |m: &mellin_core::CMat| singular_values(m).first().copied().unwrap_or(0.0);
            let difference = top(&(&f - &fw));
            let base = top(&fw);
            Ok(FWedgeSample {
                lambda: [lambda.re, lambda.im],
                modulus: lambda.norm(),
                difference,
                relative: if base > 0.0 { difference / base } else { difference },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs = samples.len().saturating_sub(1);
    let decreasing = samples.windows(2).filter(|w| w[1].difference < w[0].difference).count();
    let r: Vec<f64> = samples.iter().map(|s| s.modulus).collect();
    let d: Vec<f64> = samples.iter().map(|s| s.difference).collect();
    let fit = power_fit(&r, &d);
    Ok(FWedgeReport {
        theta0: cfg.theta0,
        decreasing_fraction: if pairs == 0 { 1.0 } else { decreasing as f64 / pairs as f64 },
        fitted_exponent: fit.map(|f| f.exponent),
        fit,
        samples,
    })
}
