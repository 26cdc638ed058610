use discrete::{assemble, ker_coker, resolve_enrichment, DiscreteSpace, ExtensionSpec, Side, TipData};
use mellin_core::{ConeProblem, Cx, Result};
use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct LadderRow {
    /// Number of quotient basis functions spanning `E`.
    pub dim_e: usize,
    pub dim_ker: usize,
    pub dim_coker: usize,
    /// `dim ker - dim coker`.
    pub index: i64,
    pub smallest_singular_value: f64,
    pub ill_separated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexLadder {
    pub lambda: [f64; 2],
    pub quotient_dim: usize,
    pub rows: Vec<LadderRow>,
    /// Every row satisfies `index(E) = index(minimal) + dim E`.
    pub ladder_holds: bool,
}

/// Index of `A - λ` on `D_min ⊕ E` for `E` spanned by the first `k`
/// quotient basis functions, `k = 0..=d`.
pub fn relative_index_ladder(
    problem: &ConeProblem,
    space: &DiscreteSpace,
    lambda: Cx,
    tol: f64,
) -> Result<IndexLadder> {
    let tip = TipData::new(problem)?;
    let basis = resolve_enrichment(&ExtensionSpec::maximal(), &tip, Side::Cone)?.functions;
    let mut rows = Vec::with_capacity(basis.len() + 1);
    for k in 0..=basis.len() {
        let ext = if k == 0 { ExtensionSpec::minimal() } else { ExtensionSpec::span(basis[..k].to_vec()) };
        let op = assemble(problem, space, &ext, lambda, Side::Cone)?;
        let kc = ker_coker(&op, tol);
        rows.push(LadderRow {
            dim_e: k,
            dim_ker: kc.dim_ker,
            dim_coker: kc.dim_coker,
            index: kc.dim_ker as i64 - kc.dim_coker as i64,
            smallest_singular_value: kc.smallest(),
            ill_separated: kc.ill_separated,
        });
    }
    let base = rows[0].index;
    let ladder_holds = rows.iter().all(|r| r.index == base + r.dim_e as i64);
    Ok(IndexLadder { lambda: [lambda.re, lambda.im], quotient_dim: basis.len(), rows, ladder_holds })
}
