use crate::sector::Sector;
use mellin_core::linalg::eigenvalues;
use mellin_core::{ConeProblem, Cx};
use serde::Serialize;

/// Eigenvalues of the principal radial symbol found inside a sector.
#[derive(Clone, Debug, Serialize)]
pub struct SymbolViolation {
    pub x: f64,
    pub xi: f64,
    pub eigenvalue: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolRayReport {
    pub sector: Sector,
    pub samples: usize,
    /// Every symbol eigenvalue seen, as `[re, im]`.
    pub eigenvalues: Vec<[f64; 2]>,
    pub violations: Vec<SymbolViolation>,
}

impl SymbolRayReport {
    /// The symbol spectrum misses the closed sector.
    pub fn is_clear(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples the eigenvalues of `a_m(x) ξ^m` for `x` in `[0, 1]` and `ξ = ±1`
/// and reports those lying in `sector`.
pub fn csymbol_ray_check(problem: &ConeProblem, sector: &Sector, n_samples: usize) -> SymbolRayReport {
    let m = problem.order();
    let n = n_samples.max(2);
    let mut eigs = Vec::new();
    let mut violations = Vec::new();
    for i in 0..n {
        let x = i as f64 / (n - 1) as f64;
        let lead = problem.coefficient_at(m, Cx::new(x, 0.0));
        for xi in [1.0f64, -1.0] {
            let symbol = &lead * Cx::new(xi.powi(m as i32), 0.0);
            let Some(ev) = eigenvalues(&symbol) else {
                continue;
            };
            for z in ev {
                let pair = [z.re, z.im];
                if sector.contains(z) {
                    violations.push(SymbolViolation { x, xi, eigenvalue: pair });
                }
                eigs.push(pair);
            }
        }
    }
    SymbolRayReport { sector: *sector, samples: n, eigenvalues: eigs, violations }
}
