//! Bordering of Fredholm families: columns `k`, rows `t` and a corner `q`
//! that turn `a(λ)` into an invertible block matrix, the extension of such a
//! bordering from the unit arc by dilation homogeneity, and the reduction of
//! an extension `A_D - λ` to the finite matrix `F(λ) = T(λ)(A - λ)|_E`.

mod family;
mod matrix;
mod reduce;

pub use family::{
    arc_samples, border_family, bordered_condition, extend_columns_rows, extend_homogeneous,
    homogeneity_relation_residual, BorderedBlocks, BorderedFamily, BorderedSolve, Profile, COND_MAX,
};
pub use matrix::{border_matrix, Bordering};
pub use reduce::{reduce_to_boundary, resolvent, Reduction, Resolvent, ResolventOperator};
