//! Dense linear-algebra helpers on top of `nalgebra`.

use crate::{CMat, CVec, Cx};
use nalgebra::linalg::{LU, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Singular value decomposition with singular values sorted in decreasing order.
pub struct SortedSvd {
    pub u: CMat,
    pub s: Vec<f64>,
    /// Right singular vectors as columns.
    pub v: CMat,
}

/// Full-width SVD: for wide matrices the matrix is padded with zero rows so that
/// `v` spans the whole domain, which makes null spaces available.
pub fn svd(m: &CMat) -> SortedSvd {
    let (r, c) = m.shape();
    let padded;
    let work = if r < c {
        padded = {
            let mut p = CMat::zeros(c, c);
            p.view_mut((0, 0), (r, c)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let dec = SVD::new(work.clone(), true, true);
    let mut u = dec.u.expect("u requested");
    let v = dec.v_t.expect("v requested").adjoint();
    let s: Vec<f64> = dec.singular_values.iter().copied().collect();
    if r < c {
        u = u.rows(0, r).into_owned();
    }
    SortedSvd { u, s, v }
}

/// Singular values only, in decreasing order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let dec = SVD::new(m.clone(), false, false);
    let mut s: Vec<f64> = dec.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Eigenvalues of a square matrix by the Schur decomposition.
pub fn eigenvalues(m: &CMat) -> Option<Vec<Cx>> {
    if m.nrows() == 0 {
        return Some(Vec::new());
    }
    nalgebra::linalg::Schur::try_new(m.clone(), 1e-15, 10_000).map(|s| {
        let (_, t) = s.unpack();
        (0..t.nrows()).map(|i| t[(i, i)]).collect()
    })
}

/// 2-norm condition number.
pub fn cond2(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&a), Some(&b)) if b > 0.0 => a / b,
        _ => f64::INFINITY,
    }
}

/// Orthonormal basis of the right null space: singular values below
/// `rel_tol * σ_max` (and all directions beyond the row count) count as null.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let c = m.ncols();
    if c == 0 {
        return CMat::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return CMat::identity(c, c);
    }
    let d = svd(m);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let rank = d.s.iter().take(m.nrows().min(c)).filter(|&&x| x > rel_tol * smax).count();
    d.v.columns(rank, c - rank).into_owned()
}

/// Orthonormal basis of the left null space (cokernel directions).
pub fn left_null_space(m: &CMat, rel_tol: f64) -> CMat {
    null_space(&m.adjoint(), rel_tol)
}

/// Orthonormalize the columns of `m` (modified Gram–Schmidt, two passes).
/// Columns that become negligible are dropped.
pub fn orthonormalize(m: &CMat, drop_tol: f64) -> CMat {
    let mut out: Vec<CVec> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = m.column(j).into_owned();
        let n0 = v.norm();
        for _ in 0..2 {
            for q in &out {
                let p = q.dotc(&v);
                v -= q * p;
            }
        }
        let n = v.norm();
        if n > drop_tol * n0.max(f64::MIN_POSITIVE) && n > 0.0 {
            out.push(v / Cx::new(n, 0.0));
        }
    }
    if out.is_empty() {
        return CMat::zeros(m.nrows(), 0);
    }
    CMat::from_columns(&out)
}

/// Least-squares line fit `y ≈ slope·x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    (slope, my - slope * mx)
}

/// Fractional ranks with ties averaged.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && x[idx[j + 1]] == x[idx[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            r[k] = avg;
        }
        i = j + 1;
    }
    r
}

/// Spearman rank correlation coefficient.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let rx = ranks(x);
    let ry = ranks(y);
    let n = x.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        num += (a - mx) * (b - my);
        dx += (a - mx) * (a - mx);
        dy += (b - my) * (b - my);
    }
    num / (dx * dy).sqrt()
}

/// LU factorization of a square matrix supporting solves with the matrix and its adjoint.
pub struct DualLu {
    fwd: LU<Cx, nalgebra::Dyn, nalgebra::Dyn>,
    lower: CMat,
    upper: CMat,
}

impl DualLu {
    pub fn new(m: &CMat) -> Option<Self> {
        let fwd = LU::new(m.clone());
        if !fwd.is_invertible() {
            return None;
        }
        let lower = fwd.l();
        let upper = fwd.u();
        Some(DualLu { fwd, lower, upper })
    }

    pub fn solve(&self, b: &CMat) -> CMat {
        self.fwd.solve(b).expect("invertible")
    }

    pub fn solve_vec(&self, b: &CVec) -> CVec {
        self.fwd.solve(b).expect("invertible")
    }

    /// Solves `M* y = b` through the factors of `P M = L U`.
    pub fn solve_adjoint_vec(&self, b: &CVec) -> CVec {
        let z = self.upper.ad_solve_upper_triangular(b).expect("invertible");
        let mut w = self.lower.ad_solve_lower_triangular(&z).expect("unit diagonal");
        self.fwd.p().inv_permute_rows(&mut w);
        w
    }
}

/// Largest singular value of a linear map given through its action and the
/// action of its adjoint.
///
/// Runs the Lanczos iteration on `T* T` from a seeded random start, with full
/// reorthogonalization. The iteration stops once the Ritz residual of the top
/// eigenvalue falls below `rel_tol` times the eigenvalue, after `max_iter`
/// steps, or when the Krylov space becomes invariant. Each step costs one
/// application of `T` and one of `T*`, as a power step would, but the top
/// eigenvalue converges at the accelerated Chebyshev rate, which matters when
/// the leading singular values are close together.
pub fn krylov_norm<F, G>(apply: F, apply_adj: G, n: usize, seed: u64, max_iter: usize, rel_tol: f64) -> f64
where
    F: Fn(&CVec) -> CVec,
    G: Fn(&CVec) -> CVec,
{
    if n == 0 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = CVec::from_fn(n, |_, _| Cx::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
    q /= Cx::new(q.norm(), 0.0);
    let mut basis: Vec<CVec> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut top = 0.0;
    for _ in 0..max_iter.min(n).max(1) {
        let mut w = apply_adj(&apply(&q));
        let a = q.dotc(&w).re;
        basis.push(q.clone());
        alpha.push(a);
        // two passes of Gram-Schmidt keep the basis orthonormal to rounding
        for _ in 0..2 {
            for v in &basis {
                let c = v.dotc(&w);
                w.axpy(-c, v, Cx::new(1.0, 0.0));
            }
        }
        let b = w.norm();
        let k = alpha.len();
        let tri = nalgebra::DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = nalgebra::SymmetricEigen::new(tri);
        let (imax, &theta) = eig.eigenvalues.iter().enumerate().max_by(|x, y| x.1.total_cmp(y.1)).expect("nonempty");
        top = theta.max(0.0);
        let residual = b * eig.eigenvectors[(k - 1, imax)].abs();
        if top == 0.0 || residual <= rel_tol * top || b <= f64::EPSILON * top.max(f64::MIN_POSITIVE) {
            break;
        }
        beta.push(b);
        q = w / Cx::new(b, 0.0);
    }
    top.sqrt()
}

/// Thin QR factorization `A[:, perm] = Q R` of a tall matrix by Householder
/// reflections with column pivoting, applied after sorting the rows by
/// decreasing norm. The sorting keeps the factorization accurate for matrices
/// whose rows differ by many orders of magnitude.
pub struct PivotedQr {
    /// `m×n` with orthonormal columns, rows in the original order.
    pub q: CMat,
    /// `n×n` upper triangular.
    pub r: CMat,
    /// Column permutation: column `j` of `Q R` is column `perm[j]` of `A`.
    pub perm: Vec<usize>,
}

pub fn pivoted_qr(a: &CMat) -> PivotedQr {
    let (m, n) = a.shape();
    assert!(m >= n, "pivoted_qr expects a tall matrix");
    let mut order: Vec<usize> = (0..m).collect();
    let row_norms: Vec<f64> = (0..m).map(|i| a.row(i).norm()).collect();
    order.sort_by(|&x, &y| row_norms[y].partial_cmp(&row_norms[x]).unwrap());
    let mut b = CMat::from_fn(m, n, |i, j| a[(order[i], j)]);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<CVec> = Vec::with_capacity(n);
    let one = Cx::new(1.0, 0.0);
    for k in 0..n {
        // pivot on the largest remaining column
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..n {
            let nj = b.view((k, j), (m - k, 1)).norm_squared();
            if nj > best_norm {
                best_norm = nj;
                best = j;
            }
        }
        if best != k {
            b.swap_columns(k, best);
            perm.swap(k, best);
        }
        let x = b.view((k, k), (m - k, 1)).column(0).into_owned();
        let nx = x.norm();
        let mut v = x;
        if nx == 0.0 {
            reflectors.push(CVec::zeros(m - k));
            continue;
        }
        let phase = if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { one };
        let alpha = -phase * nx;
        v[0] -= alpha;
        let nv = v.norm();
        if nv == 0.0 {
            reflectors.push(CVec::zeros(m - k));
            continue;
        }
        v /= Cx::new(nv, 0.0);
        {
            let mut sub = b.view_mut((k, k), (m - k, n - k));
            let w = sub.ad_mul(&v);
            sub.gerc(Cx::new(-2.0, 0.0), &v, &w, one);
        }
        reflectors.push(v);
    }
    let r = CMat::from_fn(n, n, |i, j| if j >= i { b[(i, j)] } else { Cx::new(0.0, 0.0) });
    let mut q = CMat::zeros(m, n);
    for i in 0..n {
        q[(i, i)] = one;
    }
    for k in (0..n).rev() {
        let v = &reflectors[k];
        if v.norm() == 0.0 {
            continue;
        }
        let mut sub = q.view_mut((k, k), (m - k, n - k));
        let w = sub.ad_mul(v);
        sub.gerc(Cx::new(-2.0, 0.0), v, &w, one);
    }
    let mut q_orig = CMat::zeros(m, n);
    for (i, &o) in order.iter().enumerate() {
        q_orig.set_row(o, &q.row(i));
    }
    PivotedQr { q: q_orig, r, perm }
}

/// Evaluate a scalar polynomial (coefficients in increasing degree) by Horner.
pub fn horner(coeffs: &[Cx], z: Cx) -> Cx {
    coeffs.iter().rev().fold(Cx::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Taylor coefficients of a scalar polynomial at a new center.
pub fn shift_poly(coeffs: &[Cx], center: Cx) -> Vec<Cx> {
    let n = coeffs.len();
    let mut out = coeffs.to_vec();
    // repeated synthetic division
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let t = out[j + 1] * center;
            out[j] += t;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    #[test]
    fn eigenvalues_of_triangular_matrix() {
        let m = CMat::from_row_slice(2, 2, &[c64(2.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, -1.0)]);
        let mut e = eigenvalues(&m).unwrap();
        e.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((e[0] - c64(0.0, -1.0)).norm() < 1e-14);
        assert!((e[1] - c64(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(1, 3, &[c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)]);
        let n = null_space(&m, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&m * &n).norm() < 1e-12);
    }

    #[test]
    fn spearman_of_monotone_sequences() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [10.0, 20.0, 25.0, 100.0];
        assert!((spearman(&x, &y) - 1.0).abs() < 1e-15);
        let z = [4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &z) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn poly_shift_matches_expansion() {
        // (z+1)^2 = z^2 + 2z + 1 expanded at center 1: (w+2)^2 = w^2 + 4w + 4
        let p = [c64(1.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)];
        let q = shift_poly(&p, c64(1.0, 0.0));
        assert_eq!(q, vec![c64(4.0, 0.0), c64(4.0, 0.0), c64(1.0, 0.0)]);
    }

    #[test]
    fn adjoint_solve() {
        let m = CMat::from_fn(5, 5, |i, j| c64((i * 3 + j * j) as f64 % 7.0 - 2.0, (i + 2 * j) as f64 % 3.0));
        let lu = DualLu::new(&m).unwrap();
        let b = CVec::from_fn(5, |i, _| c64(i as f64, 1.0));
        let y = lu.solve_adjoint_vec(&b);
        assert!((m.adjoint() * y - b).norm() < 1e-10);
    }

    #[test]
    fn pivoted_qr_reconstructs_graded_matrix() {
        let a =
            CMat::from_fn(6, 3, |i, j| c64((i + 2 * j) as f64 + 0.5, (i * j) as f64 - 1.0) * 1e6f64.powi(i as i32 % 3));
        let f = pivoted_qr(&a);
        let ap = CMat::from_fn(6, 3, |i, j| a[(i, f.perm[j])]);
        assert!((&f.q * &f.r - &ap).norm() <= 1e-13 * a.norm());
        assert!((f.q.adjoint() * &f.q - CMat::identity(3, 3)).norm() < 1e-13);
    }

    #[test]
    fn krylov_norm_of_diagonal() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![c64(3.0, 0.0), c64(1.0, 0.0), c64(0.5, 0.0)]));
        let n = krylov_norm(|x| &d * x, |x| d.adjoint() * x, 3, 1, 500, 1e-14);
        assert!((n - 3.0).abs() < 1e-12);
    }

    #[test]
    fn krylov_norm_separates_clustered_singular_values() {
        // leading ratio 0.999: hopeless for plain power iteration within 200 steps
        let n = 400;
        let d = CVec::from_fn(n, |i, _| c64(1.0 / (1.0 + 1e-3 * i as f64), 0.0));
        let m = CMat::from_diagonal(&d);
        let q = svd(&CMat::from_fn(n, n, |i, j| c64(((i * 7 + j * 3) % 11) as f64 - 5.0, ((i + 2 * j) % 5) as f64))).u;
        let t = &q * &m * q.adjoint();
        let est = krylov_norm(|x| &t * x, |x| t.adjoint() * x, n, 5, 200, 1e-10);
        assert!((est - 1.0).abs() < 1e-8, "{est}");
    }
}
