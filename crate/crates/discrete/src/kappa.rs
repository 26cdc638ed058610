use crate::assemble::assemble;
use crate::extension::{ExtensionSpec, Side};
use crate::field::CoefficientField;
use crate::space::DiscreteSpace;
use crate::stencil::StencilTable;
use mellin_core::{CMat, CVec, Cx, Result};

/// `κ_ρ` on grid values: with `ρ = e^{jh}`, `(κ_ρ w)_i = w_{i+j}` (zero past the ends).
///
/// In the conjugated picture `w = x^{m/2} u` the factor `ρ^{m/2}` and the
/// weight cancel, so the dilation is a pure translation.
pub fn kappa_discrete(space: &DiscreteSpace, rho: f64, dim: usize) -> Result<CMat> {
    let j = space.dilation_steps(rho)?;
    let n = space.len() * dim;
    let mut k = CMat::zeros(n, n);
    for i in 0..space.len() {
        let src = i as isize + j;
        if src < 0 || src >= space.len() as isize {
            continue;
        }
        for c in 0..dim {
            k[(i * dim + c, src as usize * dim + c)] = Cx::new(1.0, 0.0);
        }
    }
    Ok(k)
}

/// Applies the translation by `steps` nodes to a vector with `dim` components per node.
pub fn shift_values(v: &CVec, steps: isize, dim: usize) -> CVec {
    let nodes = v.len() / dim;
    let mut out = CVec::zeros(v.len());
    for i in 0..nodes {
        let src = i as isize + steps;
        if src < 0 || src >= nodes as isize {
            continue;
        }
        for c in 0..dim {
            out[i * dim + c] = v[src as usize * dim + c];
        }
    }
    out
}

/// Relative residual of `(A_∧ - ρ^m λ) - ρ^m κ_ρ (A_∧ - λ) κ_ρ⁻¹` on the interior overlap.
///
/// Compared are the A-form entries of the minimal-domain model operator on
/// rows whose stencils are central and untouched by the far-end truncation,
/// both before and after the translation.
pub fn homogeneity_residual(field: &dyn CoefficientField, space: &DiscreteSpace, lambda: Cx, rho: f64) -> Result<f64> {
    let j = space.dilation_steps(rho)?;
    let m = field.order() as i32;
    let scaled = lambda * rho.powi(m);
    let base = assemble(field, space, &ExtensionSpec::minimal(), lambda, Side::Wedge)?.a_form();
    let moved = assemble(field, space, &ExtensionSpec::minimal(), scaled, Side::Wedge)?.a_form();
    let n = field.dim();
    let c = space.clamp();
    let stencils = StencilTable::new(space.len(), space.step(), field.order());
    let reach = stencils.reach();
    let row_nodes = space.len() - c;
    let interior = |i: isize| i >= (c + reach) as isize && i < row_nodes as isize && stencils.is_central(i as usize);
    let core_nodes = (c as isize)..((space.len() - c) as isize);
    let factor = rho.powi(m);
    let mut diff = 0.0f64;
    let mut size = 0.0f64;
    for i in 0..row_nodes as isize {
        if !interior(i) || !interior(i + j) {
            continue;
        }
        for p in core_nodes.clone() {
            if !core_nodes.contains(&(p + j)) || (p - i).abs() > reach as isize {
                continue;
            }
            for r in 0..n {
                for q in 0..n {
                    let lhs = moved[(i as usize * n + r, (p as usize - c) * n + q)];
                    let rhs = base[((i + j) as usize * n + r, ((p + j) as usize - c) * n + q)] * factor;
                    diff += (lhs - rhs).norm_sqr();
                    size += rhs.norm_sqr();
                }
            }
        }
    }
    Ok(if size == 0.0 { 0.0 } else { (diff / size).sqrt() })
}
