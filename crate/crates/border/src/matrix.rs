use mellin_core::linalg::{left_null_space, null_space};
use mellin_core::CMat;

/// Bordering `[[a, k], [t, q]]` of a single matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Bordering {
    /// Columns spanning a complement of the range.
    pub k: CMat,
    /// Rows detecting the kernel.
    pub t: CMat,
    pub q: CMat,
}

impl Bordering {
    pub fn bordered(&self, a: &CMat) -> CMat {
        let (r, c) = a.shape();
        let dk = self.k.ncols();
        let dt = self.t.nrows();
        let mut m = CMat::zeros(r + dt, c + dk);
        m.view_mut((0, 0), (r, c)).copy_from(a);
        m.view_mut((0, c), (r, dk)).copy_from(&self.k);
        m.view_mut((r, 0), (dt, c)).copy_from(&self.t);
        m.view_mut((r, c), (dt, dk)).copy_from(&self.q);
        m
    }
}

/// Borders `a` by orthonormal cokernel columns and kernel rows (`q = 0`).
///
/// For an injective `a` only columns are added, for a surjective one only rows.
pub fn border_matrix(a: &CMat, rel_tol: f64) -> Bordering {
    let k = left_null_space(a, rel_tol);
    let ker = null_space(a, rel_tol);
    let t = ker.adjoint();
    let q = CMat::zeros(t.nrows(), k.ncols());
    Bordering { k, t, q }
}
