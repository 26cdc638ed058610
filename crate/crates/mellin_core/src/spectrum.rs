use crate::jet::binomial;
use crate::linalg::{horner, null_space, shift_poly, svd};
use crate::poly::MatPoly;
use crate::{CMat, CVec, Cx, Error, Result};
use nalgebra::linalg::Schur;
use serde::Serialize;

/// Axis-aligned rectangle `re_min ≤ Re σ ≤ re_max`, `im_min ≤ Im σ ≤ im_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Region {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Region {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Self {
        Region { re_min, re_max, im_min, im_max }
    }

    /// `|Re σ| ≤ half_re`, `|Im σ| ≤ half_im`.
    pub fn centered(half_re: f64, half_im: f64) -> Self {
        Region::new(-half_re, half_re, -half_im, half_im)
    }

    /// The whole plane.
    pub fn everywhere() -> Self {
        Region::new(f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn contains(&self, z: Cx) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im >= self.im_min && z.im <= self.im_max
    }

    /// Distance from `z` to the boundary of the rectangle.
    pub fn boundary_distance(&self, z: Cx) -> f64 {
        let dx = if z.re < self.re_min {
            self.re_min - z.re
        } else if z.re > self.re_max {
            z.re - self.re_max
        } else {
            (z.re - self.re_min).min(self.re_max - z.re)
        };
        let dy = if z.im < self.im_min {
            self.im_min - z.im
        } else if z.im > self.im_max {
            z.im - self.im_max
        } else {
            (z.im - self.im_min).min(self.im_max - z.im)
        };
        if self.contains(z) {
            dx.min(dy)
        } else {
            let ox = if z.re < self.re_min || z.re > self.re_max { dx } else { 0.0 };
            let oy = if z.im < self.im_min || z.im > self.im_max { dy } else { 0.0 };
            (ox * ox + oy * oy).sqrt()
        }
    }
}

/// A root of `det P̂₀` with its Jordan structure.
#[derive(Clone, Debug)]
pub struct SpectralPoint {
    pub sigma: Cx,
    pub algebraic_multiplicity: usize,
    /// Chain lengths in decreasing order.
    pub partial_multiplicities: Vec<usize>,
    /// One entry per chain: `[x_0, …, x_{ℓ-1}]` with `Σ_{j≤r} P_j x_{r-j} = 0`,
    /// where `P_j = P^{(j)}(σ₀)/j!`.
    pub jordan_chains: Vec<Vec<CVec>>,
    /// Root lies within the tolerance of the region boundary.
    pub boundary_ambiguous: bool,
    /// Nearby roots that could not be merged into one multiple root.
    pub cluster_candidates: Vec<Cx>,
}

/// Roots of `det P̂₀` in a region, together with every root found (inside or not).
#[derive(Clone, Debug)]
pub struct BoundarySpectrum {
    pub points: Vec<SpectralPoint>,
    pub region: Region,
    pub tol: f64,
    /// All distinct roots of the determinant, also those outside the region.
    pub all_roots: Vec<Cx>,
}

impl BoundarySpectrum {
    /// Spectral point within the clustering tolerance of `sigma`.
    pub fn point_near(&self, sigma: Cx) -> Option<&SpectralPoint> {
        let scale = 1.0f64.max(sigma.norm());
        self.points
            .iter()
            .filter(|p| (p.sigma - sigma).norm() <= 1e3 * self.tol.max(1e-12) * scale)
            .min_by(|a, b| (a.sigma - sigma).norm().partial_cmp(&(b.sigma - sigma).norm()).unwrap())
    }

    /// Pole order of `P̂₀⁻¹` at `sigma` (the longest Jordan chain there, 0 off the spectrum).
    pub fn pole_order_at(&self, sigma: Cx) -> usize {
        self.point_near(sigma).map(|p| p.partial_multiplicities.first().copied().unwrap_or(0)).unwrap_or(0)
    }

    /// Distance from `sigma` to the nearest root that is not `sigma` itself.
    pub fn distance_to_other_roots(&self, sigma: Cx) -> f64 {
        let excl = 1e3 * self.tol.max(1e-12) * 1.0f64.max(sigma.norm());
        self.all_roots.iter().map(|r| (r - sigma).norm()).filter(|&d| d > excl).fold(f64::INFINITY, f64::min)
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|p| p.algebraic_multiplicity).sum()
    }
}

/// Coefficients (increasing degree) of `det P(σ)`, by interpolation on a circle.
pub fn determinant_poly(p: &MatPoly) -> Vec<Cx> {
    let n = p.dim();
    let deg = n * p.degree();
    let npts = deg + 1;
    let radius = 1.0f64.max(root_bound(p));
    let mut vals = Vec::with_capacity(npts);
    for l in 0..npts {
        let z = Cx::from_polar(radius, 2.0 * std::f64::consts::PI * l as f64 / npts as f64);
        vals.push(p.eval(z).determinant());
    }
    (0..npts)
        .map(|k| {
            let mut s = Cx::new(0.0, 0.0);
            for (l, v) in vals.iter().enumerate() {
                s += v * Cx::from_polar(1.0, -2.0 * std::f64::consts::PI * (k * l) as f64 / npts as f64);
            }
            s / (npts as f64) / radius.powi(k as i32)
        })
        .collect()
}

/// Crude modulus bound for the roots (block Cauchy bound).
fn root_bound(p: &MatPoly) -> f64 {
    let lead = p.leading();
    let inv = match lead.clone().try_inverse() {
        Some(i) => i,
        None => return 1.0,
    };
    let mut b: f64 = 0.0;
    for k in 0..p.degree() {
        b = b.max((&inv * p.coeff(k)).norm());
    }
    1.0 + b
}

/// Block companion matrix of the monic polynomial `A_m⁻¹ P(σ)`.
fn companion(p: &MatPoly) -> Result<CMat> {
    let n = p.dim();
    let m = p.degree();
    let inv = p.leading().clone().try_inverse().ok_or(Error::NotCElliptic)?;
    let size = n * m;
    let mut c = CMat::zeros(size, size);
    for b in 0..m.saturating_sub(1) {
        for i in 0..n {
            c[(b * n + i, (b + 1) * n + i)] = Cx::new(1.0, 0.0);
        }
    }
    for k in 0..m {
        let blk = -(&inv * p.coeff(k));
        c.view_mut(((m - 1) * n, k * n), (n, n)).copy_from(&blk);
    }
    Ok(c)
}

fn eigenvalues(c: &CMat) -> Result<Vec<Cx>> {
    if c.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(c.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration for the companion matrix did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

/// Newton iteration on a scalar polynomial.
fn newton(coeffs: &[Cx], start: Cx) -> Cx {
    if coeffs.len() < 2 {
        return start;
    }
    let d: Vec<Cx> = (1..coeffs.len()).map(|k| coeffs[k] * (k as f64)).collect();
    let mut z = start;
    let f0 = horner(coeffs, z).norm();
    let mut best = (z, f0);
    for _ in 0..50 {
        let f = horner(coeffs, z);
        let fp = horner(&d, z);
        if fp.norm() == 0.0 {
            break;
        }
        let step = f / fp;
        z -= step;
        let fz = horner(coeffs, z).norm();
        if fz < best.1 {
            best = (z, fz);
        }
        if step.norm() <= 1e-16 * 1.0f64.max(z.norm()) {
            break;
        }
    }
    // accept the polished value only if it stays close to the start
    if (best.0 - start).norm() <= 1e-3 * 1.0f64.max(start.norm()) {
        best.0
    } else {
        start
    }
}

fn derivative_poly(coeffs: &[Cx], order: usize) -> Vec<Cx> {
    let mut out = coeffs.to_vec();
    for _ in 0..order {
        if out.len() <= 1 {
            return vec![Cx::new(0.0, 0.0)];
        }
        out = (1..out.len()).map(|k| out[k] * (k as f64)).collect();
    }
    out
}

/// Checks that `det` has a zero of order exactly `k` at `z` up to the clustering radius `delta`.
fn multiplicity_consistent(det: &[Cx], z: Cx, k: usize, delta: f64) -> bool {
    let t = shift_poly(det, z);
    let dk = t.get(k).copied().unwrap_or_default().norm();
    if dk == 0.0 {
        return false;
    }
    let s = 1.0f64.max(z.norm());
    (0..k).all(|j| {
        let floor: f64 = det
            .iter()
            .enumerate()
            .skip(j)
            .map(|(i, c)| c.norm() * binomial(i, j) * s.powi((i - j) as i32))
            .sum::<f64>()
            * 1e-14;
        t[j].norm() <= 10.0 * binomial(k, j) * delta.powi((k - j) as i32) * dk + floor
    })
}

fn cluster(values: &[Cx], rel: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut c = i;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = 1.0f64.max(values[i].norm()).max(values[j].norm());
            if (values[i] - values[j]).norm() <= rel * s {
                let a = find(&mut parent, i);
                let b = find(&mut parent, j);
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_to_group = std::collections::HashMap::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        let g = *root_to_group.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

/// Resolves groups of companion eigenvalues into distinct roots with multiplicities.
fn resolve_roots(eigs: &[Cx], det: &[Cx], tol: f64) -> Vec<(Cx, usize, Vec<Cx>)> {
    let mut out = Vec::new();
    for group in cluster(eigs, 1e-5) {
        let vals: Vec<Cx> = group.iter().map(|&i| eigs[i]).collect();
        resolve_group(&vals, det, tol, 0, &mut out);
    }
    out
}

fn resolve_group(vals: &[Cx], det: &[Cx], tol: f64, level: usize, out: &mut Vec<(Cx, usize, Vec<Cx>)>) {
    let k = vals.len();
    let mean = vals.iter().sum::<Cx>() / (k as f64);
    if k == 1 {
        out.push((newton(det, mean), 1, Vec::new()));
        return;
    }
    let polished = newton(&derivative_poly(det, k - 1), mean);
    let delta = tol * 1.0f64.max(polished.norm());
    if multiplicity_consistent(det, polished, k, delta) {
        out.push((polished, k, Vec::new()));
        return;
    }
    if level == 0 {
        let sub = cluster(vals, 10.0 * tol);
        if sub.len() > 1 || sub[0].len() < k {
            for g in sub {
                let v: Vec<Cx> = g.iter().map(|&i| vals[i]).collect();
                resolve_group(&v, det, tol, 1, out);
            }
            return;
        }
    }
    // could not merge: report each candidate separately
    for (i, &v) in vals.iter().enumerate() {
        let others: Vec<Cx> = vals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &w)| w).collect();
        out.push((newton(det, v), 1, others));
    }
}

/// Block Toeplitz matrix `T_k` with blocks `P_{i-j}` below the diagonal.
fn toeplitz(taylor: &[CMat], k: usize) -> CMat {
    let n = taylor[0].nrows();
    let mut t = CMat::zeros(n * k, n * k);
    for i in 0..k {
        for j in 0..=i {
            if let Some(b) = taylor.get(i - j) {
                t.view_mut((i * n, j * n), (n, n)).copy_from(b);
            }
        }
    }
    t
}

fn normalize_phase(v: &CVec) -> Cx {
    let mut best = Cx::new(0.0, 0.0);
    for z in v.iter() {
        if z.norm() > best.norm() * (1.0 + 1e-9) {
            best = *z;
        }
    }
    let nv = v.norm();
    if best.norm() == 0.0 || nv == 0.0 {
        return Cx::new(1.0, 0.0);
    }
    (best.conj() / best.norm()) / nv
}

/// Jordan chains at a root of known algebraic multiplicity.
fn jordan_structure(p: &MatPoly, sigma: Cx, alg: usize) -> (Vec<usize>, Vec<Vec<CVec>>) {
    let n = p.dim();
    let taylor: Vec<CMat> = (0..=alg.max(1)).map(|j| p.taylor_coeff(sigma, j)).collect();
    let scale = taylor.iter().map(|t| t.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let rel = 1e-8;
    // kernel dimensions of T_1, T_2, …
    let mut kernels: Vec<CMat> = vec![CMat::zeros(0, 0)];
    let mut dims = vec![0usize];
    for k in 1..=alg {
        let t = toeplitz(&taylor, k);
        let d = svd(&t);
        let rank = d.s.iter().filter(|&&x| x > rel * scale).count();
        let ker = d.v.columns(rank, n * k - rank).into_owned();
        dims.push(ker.ncols());
        kernels.push(ker);
        let total: usize = dims.windows(2).map(|w| w[1] - w[0]).sum();
        let _ = total;
        if dims[k] >= alg || (k >= 2 && dims[k] == dims[k - 1]) {
            break;
        }
    }
    let kmax = dims.len() - 1;
    // number of chains with length ≥ L
    let at_least: Vec<usize> =
        (0..=kmax + 1).map(|l| if l == 0 || l > kmax { 0 } else { dims[l] - dims[l - 1] }).collect();
    let mut partial = Vec::new();
    let mut chains = Vec::new();
    let mut heads = CMat::zeros(n, 0);
    for len in (1..=kmax).rev() {
        let exact = at_least[len].saturating_sub(at_least[len + 1]);
        if exact == 0 {
            continue;
        }
        let ker = &kernels[len];
        let h = ker.rows(0, n).into_owned();
        let hp = if heads.ncols() > 0 { &h - &heads * (heads.adjoint() * &h) } else { h.clone() };
        let dh = svd(&hp);
        let hsvd = svd(&h);
        let hrank = hsvd.s.iter().filter(|&&x| x > 1e-10).count();
        let row_proj = hsvd.v.columns(0, hrank) * hsvd.v.columns(0, hrank).adjoint();
        for c in 0..exact.min(dh.v.ncols()) {
            let v = dh.v.column(c).into_owned();
            let coef = &row_proj * v;
            let chain_vec = ker * coef;
            let x0 = chain_vec.rows(0, n).into_owned();
            let f = normalize_phase(&x0);
            let chain: Vec<CVec> = (0..len).map(|r| chain_vec.rows(r * n, n).into_owned() * f).collect();
            let mut new_heads = CMat::zeros(n, heads.ncols() + 1);
            new_heads.view_mut((0, 0), (n, heads.ncols())).copy_from(&heads);
            new_heads.set_column(heads.ncols(), &chain[0]);
            heads = crate::linalg::orthonormalize(&new_heads, 1e-10);
            partial.push(len);
            chains.push(chain);
        }
    }
    (partial, chains)
}

/// Orders by real part, then imaginary part; real parts within the
/// clustering tolerance count as equal.
pub fn lexicographic(a: Cx, b: Cx) -> std::cmp::Ordering {
    let scale = 1.0f64.max(a.norm()).max(b.norm());
    if (a.re - b.re).abs() > 1e-9 * scale {
        a.re.partial_cmp(&b.re).unwrap()
    } else {
        a.im.partial_cmp(&b.im).unwrap()
    }
}

/// Roots of `det P̂₀` in `region` with multiplicities and Jordan chains.
///
/// Roots come from the eigenvalues of the block companion matrix, grouped and
/// polished on the determinant polynomial; chains come from the kernels of the
/// block Toeplitz matrices built from the Taylor coefficients at each root.
pub fn boundary_spectrum(p0: &MatPoly, region: Region, tol: f64) -> Result<BoundarySpectrum> {
    let c = companion(p0)?;
    let eigs = eigenvalues(&c)?;
    let det = determinant_poly(p0);
    let roots = resolve_roots(&eigs, &det, tol);
    let mut points = Vec::new();
    let mut all_roots = Vec::new();
    for (sigma, alg, candidates) in roots {
        all_roots.push(sigma);
        let ambiguous = region.boundary_distance(sigma) <= tol * 1.0f64.max(sigma.norm());
        if !region.contains(sigma) && !ambiguous {
            continue;
        }
        let (partial, chains) = jordan_structure(p0, sigma, alg);
        points.push(SpectralPoint {
            sigma,
            algebraic_multiplicity: alg,
            partial_multiplicities: partial,
            jordan_chains: chains,
            boundary_ambiguous: ambiguous,
            cluster_candidates: candidates,
        });
    }
    points.sort_by(|a, b| lexicographic(a.sigma, b.sigma));
    Ok(BoundarySpectrum { points, region, tol, all_roots })
}

/// Right null space of `P̂₀(σ)`, for diagnostics.
pub fn eigenvectors_at(p0: &MatPoly, sigma: Cx, rel_tol: f64) -> CMat {
    null_space(&p0.eval(sigma), rel_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn quad(c0: f64) -> MatPoly {
        MatPoly::scalar(&[c64(c0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)])
    }

    #[test]
    fn quarter_roots() {
        let s = boundary_spectrum(&quad(0.25), Region::centered(5.0, 5.0), 1e-8).unwrap();
        assert_eq!(s.points.len(), 2);
        assert!((s.points[0].sigma - c64(0.0, -0.5)).norm() < 1e-12);
        assert!((s.points[1].sigma - c64(0.0, 0.5)).norm() < 1e-12);
        assert!(s.points.iter().all(|p| p.algebraic_multiplicity == 1));
    }

    #[test]
    fn double_root_has_one_chain_of_length_two() {
        let s = boundary_spectrum(&quad(0.0), Region::centered(5.0, 5.0), 1e-8).unwrap();
        assert_eq!(s.points.len(), 1);
        let p = &s.points[0];
        assert!(p.sigma.norm() < 1e-12);
        assert_eq!(p.algebraic_multiplicity, 2);
        assert_eq!(p.partial_multiplicities, vec![2]);
    }

    #[test]
    fn close_distinct_roots_are_not_merged() {
        // σ² − ε² with ε above the clustering tolerance
        let e = 1e-6;
        let s = boundary_spectrum(&quad(-e * e), Region::everywhere(), 1e-8).unwrap();
        assert_eq!(s.points.len(), 2);
    }

    #[test]
    fn boundary_points_are_flagged() {
        let s = boundary_spectrum(&quad(1.0), Region::centered(5.0, 1.0), 1e-8).unwrap();
        assert!(s.points.iter().all(|p| p.boundary_ambiguous));
    }

    #[test]
    fn semisimple_double_eigenvalue_of_system() {
        // σ² I has two chains of length two at 0
        let p = MatPoly::new(vec![CMat::zeros(2, 2), CMat::zeros(2, 2), CMat::identity(2, 2)]);
        let s = boundary_spectrum(&p, Region::everywhere(), 1e-8).unwrap();
        assert_eq!(s.points.len(), 1);
        assert_eq!(s.points[0].algebraic_multiplicity, 4);
        assert_eq!(s.points[0].partial_multiplicities, vec![2, 2]);
    }
}
