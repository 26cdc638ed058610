use crate::fit::{top_decade_fit, PowerFit};
use crate::sweep::{eigenvalues_on_ray, SweepConfig};
use border::{resolvent, BorderedFamily};
use discrete::DiscreteOperator;
use domains::CoefficientSpace;
use mellin_core::linalg::singular_values;
use mellin_core::{Cx, Error, Result};
use rayon::prelude::*;
use serde::Serialize;
use theta::kappa_on_singular;

#[derive(Clone, Debug, Serialize)]
pub struct SmaxSample {
    pub lambda: [f64; 2],
    pub modulus: f64,
    /// `‖κ_ρ⁻¹ q (A_∧ - λ)⁻¹‖` with `ρ = |λ|^{1/m}`; absent where `λ` is spectral.
    pub norm: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SmaxReport {
    pub theta0: f64,
    pub samples: Vec<SmaxSample>,
    pub fit: Option<PowerFit>,
    pub fitted_exponent: Option<f64>,
    /// The realization has no enrichment, so the projected resolvent vanishes.
    pub identically_zero: bool,
    /// Why no exponent was fitted, when the ray meets the spectrum.
    pub refused: Option<String>,
    pub spectrum_on_ray: Vec<[f64; 2]>,
}

/// Decay of the enrichment part of the model resolvent along a ray.
///
/// `wedge` is a realization of the model operator and `bf` borders its
/// minimal part. The enrichment coordinates of `(A_∧ - λ)⁻¹ f` are rescaled
/// by `κ_ρ⁻¹` and measured in the coefficient norm of the singular functions.
pub fn smax_condition_check(wedge: &DiscreteOperator, bf: &BorderedFamily, cfg: &SweepConfig) -> Result<SmaxReport> {
    cfg.validate()?;
    let lambdas = cfg.lambdas();
    if wedge.enrichment_dim() == 0 {
        return Ok(SmaxReport {
            theta0: cfg.theta0,
            samples: lambdas
                .iter()
                .map(|l| SmaxSample { lambda: [l.re, l.im], modulus: l.norm(), norm: Some(0.0) })
                .collect(),
            fit: None,
            fitted_exponent: None,
            identically_zero: true,
            refused: None,
            spectrum_on_ray: Vec::new(),
        });
    }
    let mut spectrum: Vec<Cx> = if wedge.rows() == wedge.cols() { eigenvalues_on_ray(wedge, cfg)? } else { Vec::new() };
    let m = wedge.space().order();
    let rw: Vec<f64> = wedge.row_weights().iter().map(|w| w.sqrt()).collect();
    let core = wedge.core_dim();
    let dim_e = wedge.enrichment_dim();
    let norms = lambdas
        .par_iter()
        .map(|&lambda| {
            let res = match resolvent(wedge, bf, lambda) {
                Ok(r) => r,
                Err(Error::InSpectrum(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let rho = lambda.norm().powf(1.0 / m as f64);
            let shrunk: Vec<_> =
                wedge.enrichment_functions().iter().map(|f| kappa_on_singular(f, 1.0 / rho, m)).collect();
            let refs: Vec<_> = shrunk.iter().collect();
            let coords = CoefficientSpace::spanning(&refs, wedge.dim()).matrix(&refs);
            let mut xe = res.matrix.rows(core, dim_e).into_owned();
            for (j, w) in rw.iter().enumerate() {
                xe.column_mut(j).scale_mut(1.0 / w);
            }
            let s = singular_values(&(coords * xe));
            Ok(Some(s.first().copied().unwrap_or(0.0)))
        })
        .collect::<Result<Vec<_>>>()?;
    let samples: Vec<SmaxSample> = lambdas
        .iter()
        .zip(&norms)
        .map(|(l, n)| SmaxSample { lambda: [l.re, l.im], modulus: l.norm(), norm: *n })
        .collect();
    for s in samples.iter().filter(|s| s.norm.is_none()) {
        let z = Cx::new(s.lambda[0], s.lambda[1]);
        if !spectrum.iter().any(|w| (w - z).norm() <= 1e-8 * z.norm().max(1.0)) {
            spectrum.push(z);
        }
    }
    let refused = (!spectrum.is_empty())
        .then(|| format!("the ray meets the spectrum of the realization at {} point(s); no decay fit", spectrum.len()));
    let fit = if refused.is_some() {
        None
    } else {
        let r: Vec<f64> = samples.iter().map(|s| s.modulus).collect();
        let n: Vec<f64> = samples.iter().map(|s| s.norm.unwrap_or(f64::NAN)).collect();
        top_decade_fit(&r, &n)
    };
    Ok(SmaxReport {
        theta0: cfg.theta0,
        samples,
        fitted_exponent: fit.map(|f| f.exponent),
        fit,
        identically_zero: false,
        refused,
        spectrum_on_ray: spectrum.iter().map(|z| [z.re, z.im]).collect(),
    })
}
