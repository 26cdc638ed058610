use crate::fit::{power_fit, PowerFit};
use discrete::{a_tau, assemble, graph_norm, range_norm, DiscreteOperator, DiscreteSpace, ExtensionSpec, Side};
use mellin_core::{CVec, ConeProblem, Cx, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct TauReport {
    pub taus: Vec<f64>,
    /// `max_u ‖(A - A_τ)u‖ / ‖u‖_A` over the probes, per `τ`.
    pub ratios: Vec<f64>,
    pub fit: Option<PowerFit>,
    pub fitted_exponent: Option<f64>,
    pub probe_count: usize,
    pub seed: u64,
}

/// A smooth bump in `t = log x`, with a fixed complex component vector.
#[derive(Clone, Debug)]
struct Bump {
    center: f64,
    width: f64,
    components: Vec<Cx>,
}

impl Bump {
    fn coefficients(&self, op: &DiscreteOperator) -> CVec {
        let dim = op.dim();
        let first = op.first_core_node();
        let mut v = CVec::zeros(op.cols());
        let core_nodes = (op.space().len() - 2 * first) * dim;
        for i in 0..core_nodes / dim {
            let t = op.space().t(first + i);
            let g = (-((t - self.center) / self.width).powi(2)).exp();
            for (c, z) in self.components.iter().enumerate() {
                v[i * dim + c] = z * g;
            }
        }
        v
    }
}

fn bumps(count: usize, seed: u64, depth: f64, dim: usize) -> Vec<Bump> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Bump {
            center: rng.gen_range(-depth + 3.0..-0.5),
            width: rng.gen_range(0.5..1.5),
            components: (0..dim).map(|_| Cx::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        })
        .collect()
}

/// Measures how fast `A_τ` approaches `A` on minimal-domain probes as `τ → 0`.
///
/// Probes are Gaussian bumps in `log x` with seeded random centers, widths and
/// component vectors, so the same probes can be laid on any grid.
pub fn a_tau_convergence(
    problem: &ConeProblem,
    space: &DiscreteSpace,
    taus: &[f64],
    probe_count: usize,
    seed: u64,
) -> Result<TauReport> {
    let zero = Cx::new(0.0, 0.0);
    let minimal = ExtensionSpec::minimal();
    let full = assemble(problem, space, &minimal, zero, Side::Cone)?;
    let probes: Vec<CVec> =
        bumps(probe_count, seed, space.depth(), problem.dim()).iter().map(|b| b.coefficients(&full)).collect();
    let ratios = taus
        .par_iter()
        .map(|&tau| {
            let blended = assemble(&a_tau(problem, tau)?, space, &minimal, zero, Side::Cone)?;
            let worst = probes
                .iter()
                .map(|u| {
                    let diff = full.apply(u) - blended.apply(u);
                    range_norm(&full, &diff) / graph_norm(&full, u)
                })
                .fold(0.0, f64::max);
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    let fit = power_fit(taus, &ratios);
    Ok(TauReport { taus: taus.to_vec(), ratios, fitted_exponent: fit.map(|f| f.exponent), fit, probe_count, seed })
}
