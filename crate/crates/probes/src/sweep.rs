use crate::fit::{log_space, median, top_decade_fit, PowerFit};
use border::{reduce_to_boundary, BorderedFamily, ResolventOperator};
use discrete::{eigenvalues_near, DiscreteOperator};
use mellin_core::linalg::{krylov_norm, DualLu};
use mellin_core::{CVec, Cx, Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// A sample is flagged non-invertible when `|det F|` or the smallest singular
/// value drops below this fraction of its median over the sweep.
pub const FLAG_RATIO: f64 = 1e-6;

const NORM_SEED: u64 = 17;
const NORM_ITERS: usize = 300;
const NORM_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Serialize)]
pub struct SweepConfig {
    /// Ray direction, radians.
    pub theta0: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
    /// Replace the samples nearest to eigenvalues found on the ray by those eigenvalues.
    pub snap_to_spectrum: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !self.theta0.is_finite() {
            errs.push(format!("ray angle must be finite, got {}", self.theta0));
        }
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            errs.push(format!("r_min must be positive, got {}", self.r_min));
        }
        if !(self.r_max > self.r_min && self.r_max.is_finite()) {
            errs.push(format!("r_max must exceed r_min, got {} and {}", self.r_max, self.r_min));
        }
        if self.samples < 2 {
            errs.push(format!("a sweep needs at least two samples, got {}", self.samples));
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// The log-spaced spectral parameters `r e^{iθ₀}`.
    pub fn lambdas(&self) -> Vec<Cx> {
        log_space(self.r_min, self.r_max, self.samples).into_iter().map(|r| Cx::from_polar(r, self.theta0)).collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSample {
    pub lambda: [f64; 2],
    pub modulus: f64,
    /// `‖(A_D - λ)⁻¹‖`; absent for non-invertible samples.
    pub inv_norm: Option<f64>,
    /// Smallest singular value of `A_D - λ` from a direct factorization.
    pub smin: f64,
    pub det_f_abs: f64,
    pub cond: f64,
    pub flagged_by_det: bool,
    pub flagged_by_smin: bool,
    /// The sample was moved onto an eigenvalue found on the ray.
    pub on_spectrum: bool,
}

impl SweepSample {
    pub fn flagged(&self) -> bool {
        self.flagged_by_det || self.flagged_by_smin || self.inv_norm.is_none()
    }

    pub fn lambda(&self) -> Cx {
        Cx::new(self.lambda[0], self.lambda[1])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcludedSample {
    pub lambda: [f64; 2],
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct RaySweepReport {
    pub theta0: f64,
    /// All samples, sorted by modulus.
    pub samples: Vec<SweepSample>,
    pub fit: Option<PowerFit>,
    pub fitted_exponent: Option<f64>,
    /// Smallest modulus past which every sample was invertible.
    pub threshold_r: Option<f64>,
    pub excluded: Vec<ExcludedSample>,
    /// Eigenvalues located on the ray when snapping was requested.
    pub spectrum_on_ray: Vec<[f64; 2]>,
    pub warnings: Vec<String>,
}

impl RaySweepReport {
    /// Samples kept for output and fitting.
    pub fn invertible(&self) -> impl Iterator<Item = &SweepSample> {
        self.samples.iter().filter(|s| !s.flagged())
    }
}

/// Sweeps `λ = r e^{iθ₀}` and records the resolvent norm of the realization `ext`
/// together with the invertibility diagnostics of the reduction to the boundary.
///
/// `bf` borders the minimal part of `ext`. Samples judged non-invertible are
/// kept in the report but excluded from the fit of `log ‖(A_D - λ)⁻¹‖` against
/// `log |λ|`, which uses the largest decade of moduli only.
pub fn minimal_growth_sweep(ext: &DiscreteOperator, bf: &BorderedFamily, cfg: &SweepConfig) -> Result<RaySweepReport> {
    cfg.validate()?;
    let mut lambdas = cfg.lambdas();
    let mut on_spectrum = vec![false; lambdas.len()];
    let mut spectrum_on_ray = Vec::new();
    if cfg.snap_to_spectrum && ext.rows() == ext.cols() {
        let found = eigenvalues_on_ray(ext, cfg)?;
        for mu in &found {
            let nearest = (0..lambdas.len())
                .filter(|&i| !on_spectrum[i])
                .min_by(|&a, &b| log_gap(lambdas[a], *mu).total_cmp(&log_gap(lambdas[b], *mu)));
            if let Some(i) = nearest {
                lambdas[i] = *mu;
                on_spectrum[i] = true;
            }
        }
        spectrum_on_ray = found.iter().map(|z| [z.re, z.im]).collect();
    }
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| lambdas[a].norm().total_cmp(&lambdas[b].norm()));
    let lambdas: Vec<Cx> = order.iter().map(|&i| lambdas[i]).collect();
    let on_spectrum: Vec<bool> = order.iter().map(|&i| on_spectrum[i]).collect();

    let diagnostics = lambdas
        .par_iter()
        .map(|&lambda| -> Result<(f64, f64, f64, Option<String>)> {
            let red = reduce_to_boundary(ext, bf, lambda)?;
            let smin = direct_smallest_singular_value(ext, lambda);
            Ok((red.det_abs, red.cond, smin, red.warning))
        })
        .collect::<Result<Vec<_>>>()?;
    let det_median = median(&diagnostics.iter().map(|d| d.0).collect::<Vec<_>>());
    let smin_median = median(&diagnostics.iter().map(|d| d.2).collect::<Vec<_>>());

    let norms = lambdas
        .par_iter()
        .zip(&diagnostics)
        .map(|(&lambda, d)| {
            if d.0 <= FLAG_RATIO * det_median || d.2 <= FLAG_RATIO * smin_median {
                return Ok(None);
            }
            match ResolventOperator::new(ext, bf, lambda) {
                Ok(r) => Ok(Some(r.norm())),
                Err(Error::InSpectrum(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::with_capacity(lambdas.len());
    let mut excluded = Vec::new();
    let mut snapped_moduli = 0;
    for (i, &lambda) in lambdas.iter().enumerate() {
        let (det, cond, smin, warning) = &diagnostics[i];
        if warning.is_some() {
            snapped_moduli += 1;
        }
        let s = SweepSample {
            lambda: [lambda.re, lambda.im],
            modulus: lambda.norm(),
            inv_norm: norms[i],
            smin: *smin,
            det_f_abs: *det,
            cond: *cond,
            flagged_by_det: *det <= FLAG_RATIO * det_median,
            flagged_by_smin: *smin <= FLAG_RATIO * smin_median,
            on_spectrum: on_spectrum[i],
        };
        if s.flagged() {
            excluded.push(ExcludedSample { lambda: s.lambda, reason: exclusion_reason(&s) });
        }
        samples.push(s);
    }
    let (r, n): (Vec<f64>, Vec<f64>) =
        samples.iter().filter(|s| !s.flagged()).map(|s| (s.modulus, s.inv_norm.unwrap_or(f64::NAN))).unzip();
    let fit = top_decade_fit(&r, &n);
    let threshold_r = match samples.iter().rposition(|s| s.flagged()) {
        None => samples.first().map(|s| s.modulus),
        Some(i) => samples.get(i + 1).map(|s| s.modulus),
    };
    let mut warnings = Vec::new();
    if snapped_moduli > 0 {
        warnings.push(format!(
            "{snapped_moduli} of {} samples have a modulus that is not grid compatible; the bordering was dilated by the nearest whole number of grid steps",
            samples.len()
        ));
    }
    if fit.is_none() {
        warnings.push("fewer than two invertible samples in the largest decade; no exponent fitted".to_string());
    }
    Ok(RaySweepReport {
        theta0: cfg.theta0,
        fitted_exponent: fit.map(|f| f.exponent),
        fit,
        threshold_r,
        excluded,
        spectrum_on_ray,
        warnings,
        samples,
    })
}

fn exclusion_reason(s: &SweepSample) -> String {
    let mut why = Vec::new();
    if s.flagged_by_det {
        why.push("|det F| collapsed");
    }
    if s.flagged_by_smin {
        why.push("smallest singular value collapsed");
    }
    if why.is_empty() {
        why.push("reduction to the boundary is singular");
    }
    format!("interior spectrum: {}", why.join(", "))
}

fn log_gap(a: Cx, b: Cx) -> f64 {
    (a.norm().ln() - b.norm().ln()).abs()
}

/// Eigenvalues of a square realization lying on the sampled stretch of the ray.
pub fn eigenvalues_on_ray(ext: &DiscreteOperator, cfg: &SweepConfig) -> Result<Vec<Cx>> {
    let dir = Cx::from_polar(1.0, -cfg.theta0);
    let shifts = log_space(cfg.r_min, cfg.r_max, 8);
    let mut found: Vec<Cx> = Vec::new();
    for r in shifts {
        let shift = Cx::from_polar(r, cfg.theta0) * Cx::new(1.0, 1e-3);
        let ev = match eigenvalues_near(ext, shift, 4) {
            Ok(ev) => ev,
            Err(Error::InSpectrum(z)) => vec![z],
            Err(e) => return Err(e),
        };
        for z in ev {
            let along = z * dir;
            let on_ray =
                along.im.abs() <= 1e-6 * along.norm().max(1.0) && along.re >= cfg.r_min && along.re <= cfg.r_max;
            if on_ray && !found.iter().any(|w| (w - z).norm() <= 1e-8 * z.norm().max(1.0)) {
                found.push(z);
            }
        }
    }
    found.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    Ok(found)
}

/// Smallest `L²` singular value of `A_D - λ` from an LU factorization of its
/// b-form, by Lanczos iteration on the inverse; zero when the factorization is singular.
pub fn direct_smallest_singular_value(ext: &DiscreteOperator, lambda: Cx) -> f64 {
    if ext.rows() != ext.cols() {
        return 0.0;
    }
    let op = ext.with_lambda(lambda);
    let Some(lu) = DualLu::new(&op.matrix()) else {
        return 0.0;
    };
    let scale = op.row_scale();
    let rw: Vec<f64> = op.row_weights().iter().map(|w| w.sqrt()).collect();
    let gw: Vec<f64> = op.grid_weights().iter().map(|w| w.sqrt()).collect();
    let phi = op.embedding();
    let apply = |fhat: &CVec| {
        let rhs = CVec::from_fn(fhat.len(), |i, _| fhat[i] * scale[i] / rw[i]);
        let mut u = phi * lu.solve_vec(&rhs);
        for (z, w) in u.iter_mut().zip(&gw) {
            *z *= *w;
        }
        u
    };
    let apply_adj = |uhat: &CVec| {
        let p = CVec::from_fn(uhat.len(), |i, _| uhat[i] * gw[i]);
        let v = lu.solve_adjoint_vec(&(phi.adjoint() * p));
        CVec::from_fn(v.len(), |i, _| v[i] * scale[i] / rw[i])
    };
    let norm = krylov_norm(apply, apply_adj, op.rows(), NORM_SEED, NORM_ITERS, NORM_TOL);
    if norm > 0.0 && norm.is_finite() {
        1.0 / norm
    } else {
        0.0
    }
}
