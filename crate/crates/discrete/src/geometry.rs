//! Graph-norm geometry of a discrete operator.
//!
//! The rows of the A-form span many orders of magnitude near the far end,
//! so singular values of the raw matrices say little about the operator.
//! Instead the domain is given coordinates orthonormal for the discrete graph
//! inner product `⟨u,v⟩ + ⟨Au,Av⟩`, the range is measured in `L²(dt)`, and the
//! operator becomes a matrix with singular values `s/√(1+s²) ≤ 1`, where `s`
//! runs over the `L²` singular values of `A - λ`.

use crate::assemble::DiscreteOperator;
use mellin_core::linalg::{pivoted_qr, singular_values, svd, SortedSvd};
use mellin_core::{CMat, CVec, Cx};

/// Graph-orthonormal representation of `A - λ`.
pub struct GraphFrame {
    /// `W_r^{1/2} (A - λ) Y` for the graph-orthonormal basis `Y`.
    pub operator: CMat,
    /// `Y = P R⁻¹` in factored form.
    r: CMat,
    perm: Vec<usize>,
    row_sqrt_weights: Vec<f64>,
}

/// Builds the frame by a row-sorted, column-pivoted QR of `[W^{1/2} Φ; W_r^{1/2}(A - λ)]`.
pub fn graph_frame(op: &DiscreteOperator) -> GraphFrame {
    let gw: Vec<f64> = op.grid_weights().iter().map(|w| w.sqrt()).collect();
    let rw: Vec<f64> = op.row_weights().iter().map(|w| w.sqrt()).collect();
    let a = op.a_form();
    let top = op.embedding().nrows();
    let mut z = CMat::zeros(top + a.nrows(), op.cols());
    for (i, w) in gw.iter().enumerate().take(top) {
        z.set_row(i, &(op.embedding().row(i) * Cx::new(*w, 0.0)));
    }
    for (i, w) in rw.iter().enumerate().take(a.nrows()) {
        z.set_row(top + i, &(a.row(i) * Cx::new(*w, 0.0)));
    }
    let f = pivoted_qr(&z);
    let operator = f.q.rows(top, a.nrows()).into_owned();
    GraphFrame { operator, r: f.r, perm: f.perm, row_sqrt_weights: rw }
}

impl GraphFrame {
    /// Column coefficients `x = P R⁻¹ y` of graph coordinates `y`.
    pub fn coefficients(&self, y: &CVec) -> CVec {
        let z = self.r.solve_upper_triangular(y).expect("graph frame has full rank");
        let mut x = CVec::zeros(z.len());
        for (j, &p) in self.perm.iter().enumerate() {
            x[p] = z[j];
        }
        x
    }

    /// Row values of the range function represented by weighted coordinates `u`.
    pub fn range_values(&self, u: &CVec) -> CVec {
        CVec::from_iterator(u.len(), u.iter().zip(&self.row_sqrt_weights).map(|(z, w)| z / *w))
    }

    /// Weighted coordinates of range values.
    pub fn range_coordinates(&self, f: &CVec) -> CVec {
        CVec::from_iterator(f.len(), f.iter().zip(&self.row_sqrt_weights).map(|(z, w)| z * *w))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.operator)
    }

    pub fn svd(&self) -> SortedSvd {
        svd(&self.operator)
    }
}

/// Kernel and cokernel dimensions of a discrete operator.
#[derive(Clone, Debug, PartialEq)]
pub struct KerCoker {
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
    /// Graph-geometry singular values, decreasing.
    pub singular_values: Vec<f64>,
    /// Some singular value lies within a factor 10 of the threshold.
    pub ill_separated: bool,
}

impl KerCoker {
    pub fn warning(&self) -> Option<String> {
        self.ill_separated
            .then(|| "ill-separated: a singular value lies within a factor 10 of the rank threshold".to_string())
    }

    /// Smallest singular value over the shorter side.
    pub fn smallest(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

/// Default relative rank threshold.
pub const RANK_TOL: f64 = 1e-7;

/// Counts singular values below `tol·σ_max` in graph geometry.
pub fn ker_coker(op: &DiscreteOperator, tol: f64) -> KerCoker {
    classify(&graph_frame(op).singular_values(), op.rows(), op.cols(), tol)
}

/// Rank decision from precomputed graph singular values of a `rows × cols` operator.
pub fn classify(s: &[f64], rows: usize, cols: usize, tol: f64) -> KerCoker {
    let top = s.first().copied().unwrap_or(0.0);
    let threshold = tol * top;
    let rank = s.iter().filter(|&&x| x > threshold).count();
    let ill_separated = s.iter().any(|&x| x > threshold / 10.0 && x <= threshold * 10.0);
    KerCoker {
        dim_ker: cols - rank,
        dim_coker: rows - rank,
        index: cols as i64 - rows as i64,
        singular_values: s.to_vec(),
        ill_separated,
    }
}

/// `‖v‖ + ‖(A - λ) v‖` on the grid for column coefficients `v`.
pub fn graph_norm(op: &DiscreteOperator, v: &CVec) -> f64 {
    let vals = op.embedding() * v;
    let gw = op.grid_weights();
    let l2 = vals.iter().zip(&gw).map(|(z, w)| z.norm_sqr() * w).sum::<f64>().sqrt();
    let image = op.apply(v);
    let rw = op.row_weights();
    let a2 = image.iter().zip(&rw).map(|(z, w)| z.norm_sqr() * w).sum::<f64>().sqrt();
    l2 + a2
}

/// `L²` norm of the grid function of column coefficients `v`.
pub fn l2_norm(op: &DiscreteOperator, v: &CVec) -> f64 {
    let vals = op.embedding() * v;
    vals.iter().zip(op.grid_weights()).map(|(z, w)| z.norm_sqr() * w).sum::<f64>().sqrt()
}

/// `L²` norm of values on the equation rows.
pub fn range_norm(op: &DiscreteOperator, f: &CVec) -> f64 {
    f.iter().zip(op.row_weights()).map(|(z, w)| z.norm_sqr() * w).sum::<f64>().sqrt()
}
