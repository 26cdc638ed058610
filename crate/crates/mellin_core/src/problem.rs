use crate::jet::binomial;
use crate::linalg::singular_values;
use crate::poly::MatPoly;
use crate::{CMat, Cx, Error, Result};

/// A cone differential operator `A = x^{-m} Σ_{k=0}^{m} a_k(x) (x D_x)^k`
/// with `a_k(x) = Σ_j A_{k,j} x^j` and `N×N` complex matrices `A_{k,j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeProblem {
    name: String,
    order: usize,
    dim: usize,
    taylor_depth: usize,
    /// `coeffs[k][j] = A_{k,j}`, with `k = 0..=order` and `j < taylor_depth`.
    coeffs: Vec<Vec<CMat>>,
    truncated: bool,
}

impl ConeProblem {
    /// Validates and builds a problem. `coeffs` lists `(k, [A_{k,0}, A_{k,1}, …])`;
    /// absent `k` mean zero coefficients. Every problem found is reported.
    pub fn new(
        name: impl Into<String>,
        order: usize,
        dim: usize,
        taylor_depth: usize,
        coeffs: Vec<(usize, Vec<CMat>)>,
    ) -> Result<Self> {
        let mut errs = Vec::new();
        if order == 0 {
            errs.push("order must be positive".to_string());
        }
        if dim == 0 {
            errs.push("cross_dim must be positive".to_string());
        }
        if taylor_depth == 0 {
            errs.push("taylor_depth must be at least 1".to_string());
        }
        let mut table: Vec<Vec<CMat>> =
            (0..=order).map(|_| (0..taylor_depth.max(1)).map(|_| CMat::zeros(dim, dim)).collect()).collect();
        let mut seen = vec![false; order + 1];
        let mut truncated = false;
        for (k, list) in &coeffs {
            if *k > order {
                errs.push(format!("coefficient index k={k} exceeds the order {order}"));
                continue;
            }
            if seen[*k] {
                errs.push(format!("coefficient k={k} given twice"));
                continue;
            }
            seen[*k] = true;
            for (j, a) in list.iter().enumerate() {
                if a.nrows() != dim || a.ncols() != dim {
                    errs.push(format!(
                        "coefficient k={k}, layer {j} has shape {}x{}, expected {dim}x{dim}",
                        a.nrows(),
                        a.ncols()
                    ));
                    continue;
                }
                if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    errs.push(format!("coefficient k={k}, layer {j} has non-finite entries"));
                    continue;
                }
                if j < taylor_depth {
                    table[*k][j] = a.clone();
                } else if a.norm() > 0.0 {
                    truncated = true;
                }
            }
        }
        if order > 0 && !seen.get(order).copied().unwrap_or(false) {
            errs.push("order coefficient absent (no entry with k equal to the order)".to_string());
        } else if order > 0 && dim > 0 && taylor_depth > 0 {
            let lead = &table[order][0];
            if is_singular(lead) {
                errs.push("not c-elliptic at tip: leading coefficient A_{m,0} is singular".to_string());
            }
        }
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        Ok(ConeProblem { name: name.into(), order, dim, taylor_depth, coeffs: table, truncated })
    }

    /// Scalar convenience constructor: `coeffs[k][j]` is the scalar `A_{k,j}`.
    pub fn scalar(
        name: impl Into<String>,
        order: usize,
        taylor_depth: usize,
        coeffs: &[(usize, Vec<Cx>)],
    ) -> Result<Self> {
        let c = coeffs.iter().map(|(k, l)| (*k, l.iter().map(|&z| CMat::from_element(1, 1, z)).collect())).collect();
        ConeProblem::new(name, order, 1, taylor_depth, c)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn taylor_depth(&self) -> usize {
        self.taylor_depth
    }

    /// True when Taylor data beyond `taylor_depth` was discarded at construction.
    pub fn was_truncated(&self) -> bool {
        self.truncated
    }

    /// `A_{k,j}` (zero outside the stored range).
    pub fn coeff(&self, k: usize, j: usize) -> CMat {
        self.coeffs.get(k).and_then(|l| l.get(j)).cloned().unwrap_or_else(|| CMat::zeros(self.dim, self.dim))
    }

    /// `a_k(x)` evaluated at a (possibly complex) point.
    pub fn coefficient_at(&self, k: usize, x: Cx) -> CMat {
        let mut acc = CMat::zeros(self.dim, self.dim);
        let mut p = Cx::new(1.0, 0.0);
        for a in &self.coeffs[k] {
            acc += a * p;
            p *= x;
        }
        acc
    }

    /// True if some layer `j ≥ 1` is nonzero.
    pub fn has_x_dependence(&self) -> bool {
        self.coeffs.iter().any(|l| l.iter().skip(1).any(|a| a.norm() > 0.0))
    }

    /// All coefficients multiplied by `c ≠ 0`.
    pub fn scaled(&self, c: Cx) -> ConeProblem {
        let mut out = self.clone();
        for l in &mut out.coeffs {
            for a in l {
                *a *= c;
            }
        }
        out
    }

    /// The same operator with only Taylor layer 0 kept (coefficients frozen at the tip).
    pub fn frozen(&self) -> ConeProblem {
        let mut out = self.clone();
        out.taylor_depth = 1;
        for l in &mut out.coeffs {
            l.truncate(1);
        }
        out.name = format!("{} (frozen)", self.name);
        out
    }
}

fn is_singular(a: &CMat) -> bool {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) => hi == 0.0 || lo <= 1e-12 * hi,
        _ => true,
    }
}

/// Conormal layers of a problem.
///
/// Layer `j` is the polynomial `Q_j(σ) = Σ_k A_{k,j} σ^k`; it stands for the
/// operator `x^j Q_j(x D_x)` (coefficient on the left). Since
/// `x^j Q(x D_x) = Q(x D_x + ij) x^j`, the Mellin transform of that term is
/// `Q_j(σ + ij) û(σ + ij)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConormalFamily {
    order: usize,
    dim: usize,
    layers: Vec<MatPoly>,
}

impl ConormalFamily {
    pub fn new(order: usize, layers: Vec<MatPoly>) -> Self {
        assert!(!layers.is_empty());
        let dim = layers[0].dim();
        ConormalFamily { order, dim, layers }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Layer `j`, or the zero polynomial beyond the stored depth.
    pub fn layer(&self, j: usize) -> MatPoly {
        self.layers.get(j).cloned().unwrap_or_else(|| MatPoly::zero(self.dim))
    }

    pub fn layers(&self) -> &[MatPoly] {
        &self.layers
    }

    /// The principal conormal symbol (layer 0).
    pub fn principal(&self) -> &MatPoly {
        &self.layers[0]
    }

    /// Symbol of layer `j` as it enters the Mellin picture: `σ ↦ Q_j(σ + ij)`.
    pub fn shifted_layer(&self, j: usize) -> MatPoly {
        self.layer(j).shifted(Cx::new(0.0, j as f64))
    }
}

/// Collects the `x^j`-Taylor layers of a problem into matrix polynomials in σ.
pub fn conormal_family(problem: &ConeProblem) -> ConormalFamily {
    let m = problem.order();
    let layers =
        (0..problem.taylor_depth()).map(|j| MatPoly::new((0..=m).map(|k| problem.coeff(k, j)).collect())).collect();
    ConormalFamily::new(m, layers)
}

/// The problem for `x^{-δ} A x^{δ}`: every `(x D_x)^k` becomes `(x D_x - iδ)^k`.
pub fn conjugate_weight(problem: &ConeProblem, delta: f64) -> ConeProblem {
    let m = problem.order();
    let shift = Cx::new(0.0, -delta);
    let mut out = problem.clone();
    for j in 0..problem.taylor_depth() {
        for new_k in 0..=m {
            let mut acc = CMat::zeros(problem.dim(), problem.dim());
            for k in new_k..=m {
                acc += problem.coeff(k, j) * (shift.powu((k - new_k) as u32) * binomial(k, new_k));
            }
            out.coeffs[new_k][j] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn pb(b: f64) -> ConeProblem {
        ConeProblem::scalar("pb", 2, 2, &[(2, vec![c64(1.0, 0.0)]), (0, vec![c64(0.25, 0.0), c64(b, 0.0)])]).unwrap()
    }

    #[test]
    fn layers_split_by_x_power() {
        let f = conormal_family(&pb(1.0));
        assert_eq!(f.layer_count(), 2);
        assert_eq!(f.layer(0).eval(c64(0.0, 0.0))[(0, 0)], c64(0.25, 0.0));
        assert_eq!(f.layer(1).eval(c64(3.0, 1.0))[(0, 0)], c64(1.0, 0.0));
        assert!(f.layer(5).is_negligible(0.0));
    }

    #[test]
    fn validation_collects_every_problem() {
        let e = ConeProblem::scalar("bad", 2, 0, &[(3, vec![c64(1.0, 0.0)])]).unwrap_err();
        match e {
            Error::Validation(list) => {
                assert!(list.iter().any(|s| s.contains("taylor_depth")));
                assert!(list.iter().any(|s| s.contains("exceeds the order")));
                assert!(list.iter().any(|s| s.contains("order coefficient absent")));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn singular_leading_coefficient_is_rejected() {
        let e = ConeProblem::scalar("deg", 2, 1, &[(2, vec![c64(0.0, 0.0)])]).unwrap_err();
        assert!(format!("{e}").contains("not c-elliptic at tip"));
    }

    #[test]
    fn conjugation_by_zero_is_identity() {
        let p = pb(0.7);
        assert_eq!(conjugate_weight(&p, 0.0), p);
    }

    #[test]
    fn conjugated_layers_are_shifted_symbols() {
        let p = pb(0.7);
        let q = conjugate_weight(&p, 0.8);
        let fp = conormal_family(&p);
        let fq = conormal_family(&q);
        for z in [c64(0.1, 0.2), c64(-1.0, 0.5)] {
            for j in 0..2 {
                let want = fp.layer(j).eval(z - c64(0.0, 0.8));
                assert!((fq.layer(j).eval(z) - want).norm() < 1e-13);
            }
        }
    }
}
