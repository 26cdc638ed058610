//! Log-grid discretization of cone operators.
//!
//! Functions on `(0, 1]` are written in `t = log x ∈ [-T, 0]` and conjugated
//! by `x^{m/2}`, so the reference space becomes `L²(dt)` and the dilation
//! group acts by translation. Domains are represented by nodal unknowns that
//! vanish at both ends plus cut-off singular functions applied exactly, and
//! all rank decisions are made in graph-norm geometry.

mod assemble;
mod cutoff;
mod eigen;
mod extension;
mod field;
mod geometry;
mod kappa;
mod space;
pub mod stencil;

pub use assemble::{assemble, assemble_with, DiscreteOperator};
pub use cutoff::{blend_weight, LogCutoff};
pub use eigen::eigenvalues_near;
pub use extension::{resolve_enrichment, span_on_wedge, Enrichment, ExtensionMode, ExtensionSpec, Side, TipData};
pub use field::{a_tau, CoefficientField, TauProblem};
pub use geometry::{classify, graph_frame, graph_norm, ker_coker, l2_norm, range_norm, GraphFrame, KerCoker, RANK_TOL};
pub use kappa::{homogeneity_residual, kappa_discrete, shift_values};
pub use space::{build_space, DiscreteSpace};
