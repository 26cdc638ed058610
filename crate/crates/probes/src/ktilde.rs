use crate::fit::{power_fit, PowerFit};
use discrete::{assemble, CoefficientField, DiscreteOperator, DiscreteSpace, ExtensionSpec, Side, TipData};
use domains::SingularFunction;
use mellin_core::linalg::singular_values;
use mellin_core::{CMat, ConeProblem, Cx, Result};
use rayon::prelude::*;
use serde::Serialize;
use theta::kappa_tilde;

#[derive(Clone, Debug, Serialize)]
pub struct KtildeSample {
    pub rho: f64,
    /// `‖K̃(ρ)‖` into `L²`.
    pub l2_norm: f64,
    /// `‖K̃(ρ)‖` into the graph norm of `A`.
    pub graph_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KtildeReport {
    pub samples: Vec<KtildeSample>,
    pub l2_fit: Option<PowerFit>,
    pub graph_fit: Option<PowerFit>,
}

/// Norms of the lift `K̃(ρ) = ω(ρ·) κ̃_ρ` of the enrichment basis, as maps from
/// coefficient space (orthonormal basis coordinates) into `L²` and into the graph norm.
pub fn ktilde_estimates(
    problem: &ConeProblem,
    basis: &[SingularFunction],
    space: &DiscreteSpace,
    rhos: &[f64],
) -> Result<KtildeReport> {
    let tip = TipData::new(&problem.tip_problem())?;
    let samples = rhos
        .par_iter()
        .map(|&rho| {
            let dilated =
                basis.iter().map(|e| kappa_tilde(e, rho, &tip.family, &tip.spectrum)).collect::<Result<Vec<_>>>()?;
            let mut ext = ExtensionSpec::span(dilated);
            ext.cutoff_radius = 1.0 / rho;
            let op = assemble(problem, space, &ext, Cx::new(0.0, 0.0), Side::Cone)?;
            let (values, image) = enrichment_blocks(&op);
            let mut graph = CMat::zeros(values.nrows() + image.nrows(), values.ncols());
            graph.view_mut((0, 0), values.shape()).copy_from(&values);
            graph.view_mut((values.nrows(), 0), image.shape()).copy_from(&image);
            let top = |m: &CMat| singular_values(m).first().copied().unwrap_or(0.0);
            Ok(KtildeSample { rho, l2_norm: top(&values), graph_norm: top(&graph) })
        })
        .collect::<Result<Vec<_>>>()?;
    let r: Vec<f64> = samples.iter().map(|s| s.rho).collect();
    let l2: Vec<f64> = samples.iter().map(|s| s.l2_norm).collect();
    let gr: Vec<f64> = samples.iter().map(|s| s.graph_norm).collect();
    Ok(KtildeReport { l2_fit: power_fit(&r, &l2), graph_fit: power_fit(&r, &gr), samples })
}

/// Weighted grid values and weighted images under `A` of the enrichment columns.
fn enrichment_blocks(op: &DiscreteOperator) -> (CMat, CMat) {
    let cols = op.enrichment_range();
    let gw = op.grid_weights();
    let rw = op.row_weights();
    let mut values = op.embedding().columns(cols.start, cols.len()).into_owned();
    for (i, w) in gw.iter().enumerate() {
        values.row_mut(i).scale_mut(w.sqrt());
    }
    let mut image = op.a_form().columns(cols.start, cols.len()).into_owned();
    for (i, w) in rw.iter().enumerate() {
        image.row_mut(i).scale_mut(w.sqrt());
    }
    (values, image)
}
