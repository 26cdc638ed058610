use domains::{rank, wedge_quotient_basis, SingularFunction};
use mellin_core::jet::factorial;
use mellin_core::{
    boundary_spectrum, conormal_family, BoundarySpectrum, CVec, ConeProblem, ConormalFamily, Cx, Error, Region, Result,
};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtensionMode {
    Minimal,
    Maximal,
    Span,
}

/// A closed extension `D = D_min ⊕ E`, with `E` given by singular functions on the cone side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSpec {
    pub mode: ExtensionMode,
    #[serde(default)]
    pub basis: Vec<SingularFunction>,
    /// Radius in `x` beyond which the cut-off of the enrichment functions vanishes.
    #[serde(default = "default_radius")]
    pub cutoff_radius: f64,
}

fn default_radius() -> f64 {
    1.0
}

impl ExtensionSpec {
    pub fn minimal() -> Self {
        ExtensionSpec { mode: ExtensionMode::Minimal, basis: Vec::new(), cutoff_radius: 1.0 }
    }

    pub fn maximal() -> Self {
        ExtensionSpec { mode: ExtensionMode::Maximal, basis: Vec::new(), cutoff_radius: 1.0 }
    }

    pub fn span(basis: Vec<SingularFunction>) -> Self {
        ExtensionSpec { mode: ExtensionMode::Span, basis, cutoff_radius: 1.0 }
    }

    /// Checks that do not need the operator.
    pub fn check_shape(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(self.cutoff_radius > 0.0 && self.cutoff_radius <= 1.0) {
            errs.push(format!("cutoff_radius must lie in (0, 1], got {}", self.cutoff_radius));
        }
        if self.mode != ExtensionMode::Span && !self.basis.is_empty() {
            errs.push("basis is only allowed with mode \"span\"".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }
}

/// Which operator an assembly discretizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// The operator `A` on the cone.
    Cone,
    /// The model operator `A_∧` with coefficients frozen at the tip.
    Wedge,
}

/// Tip data shared by all assemblies of one problem.
#[derive(Clone, Debug)]
pub struct TipData {
    pub family: ConormalFamily,
    pub spectrum: BoundarySpectrum,
}

impl TipData {
    pub fn new(problem: &ConeProblem) -> Result<Self> {
        let family = conormal_family(problem);
        let spectrum = boundary_spectrum(family.principal(), Region::everywhere(), 1e-8)?;
        Ok(TipData { family, spectrum })
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }
}

/// Grid columns beyond the core: enrichment functions spanning `E` and
/// far-end closure functions for the fast-decaying tip solutions.
#[derive(Clone, Debug, Default)]
pub struct Enrichment {
    pub functions: Vec<SingularFunction>,
    pub closure: Vec<SingularFunction>,
}

const LINE_TOL: f64 = 1e-9;

/// Resolves an extension into the singular functions sampled on the given side.
pub fn resolve_enrichment(ext: &ExtensionSpec, tip: &TipData, side: Side) -> Result<Enrichment> {
    ext.check_shape()?;
    let m = tip.order();
    let functions = match ext.mode {
        ExtensionMode::Minimal => Vec::new(),
        ExtensionMode::Maximal => {
            let basis = wedge_quotient_basis(&tip.spectrum, m)?;
            match side {
                Side::Wedge => basis.functions().into_iter().cloned().collect(),
                Side::Cone => basis
                    .functions()
                    .into_iter()
                    .map(|b| theta::theta_inverse(b, &tip.family, &tip.spectrum))
                    .collect::<Result<_>>()?,
            }
        }
        ExtensionMode::Span => {
            let model = span_on_wedge(&ext.basis, tip)?;
            match side {
                Side::Wedge => model,
                Side::Cone => ext.basis.clone(),
            }
        }
    };
    Ok(Enrichment { functions, closure: closure_functions(&tip.spectrum, m) })
}

/// Validates a span basis and returns its image `θ(basis)` on the model side.
pub fn span_on_wedge(basis: &[SingularFunction], tip: &TipData) -> Result<Vec<SingularFunction>> {
    let half = tip.order() as f64 / 2.0;
    for f in basis {
        if f.dim() != tip.dim() {
            return Err(Error::Validation(vec![format!(
                "basis function has {} components, the problem has {}",
                f.dim(),
                tip.dim()
            )]));
        }
        if let Some(s) = f.exponents().into_iter().find(|s| s.im >= half - LINE_TOL) {
            return Err(Error::OutsideStrip(s));
        }
    }
    let images = basis
        .iter()
        .map(|u| {
            theta::theta_forward(u, &tip.family, &tip.spectrum).map_err(|e| match e {
                Error::AmbiguousAttribution(msg) => Error::NotInMaximalDomain(msg),
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let r = rank(&images.iter().collect::<Vec<_>>(), tip.dim(), 1e-9);
    if r < images.len() {
        return Err(Error::Validation(vec![format!(
            "span basis is not independent modulo the minimal domain (rank {r} of {})",
            images.len()
        )]));
    }
    Ok(images)
}

/// Chain functions `x^{iσ} Σ_j (i log x)^j/j! x_{r-j}` for spectrum points below the strip.
fn closure_functions(spectrum: &BoundarySpectrum, m: usize) -> Vec<SingularFunction> {
    let half = m as f64 / 2.0;
    let mut out = Vec::new();
    for p in &spectrum.points {
        if p.sigma.im > -half + LINE_TOL {
            continue;
        }
        for chain in &p.jordan_chains {
            for r in 0..chain.len() {
                let coeffs: Vec<CVec> =
                    (0..=r).map(|j| chain[r - j].clone() * (Cx::new(0.0, 1.0).powu(j as u32) / factorial(j))).collect();
                out.push(SingularFunction::monomial(p.sigma, coeffs));
            }
        }
    }
    out
}
