use crate::poly::MatPoly;
use crate::spectrum::BoundarySpectrum;
use crate::{CMat, Cx, Error, Result};

/// Truncated Laurent expansion `Σ_{j=-p}^{K} Q_j (σ - c)^j` with matrix coefficients.
///
/// Vector-valued series use `N×1` coefficients. `max_order` may be negative
/// when only (part of) the principal part is known.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentSeries {
    pub center: Cx,
    pub pole_order: usize,
    rows: usize,
    cols: usize,
    /// `coeffs[i]` is the coefficient of order `i - pole_order`.
    coeffs: Vec<CMat>,
    /// Verification residual, when the series came from a numerical inversion.
    pub residual: Option<f64>,
}

impl LaurentSeries {
    /// Builds a series from coefficients of orders `-pole_order, -pole_order+1, …`.
    pub fn new(center: Cx, pole_order: usize, rows: usize, cols: usize, coeffs: Vec<CMat>) -> Self {
        assert!(coeffs.iter().all(|c| c.nrows() == rows && c.ncols() == cols));
        LaurentSeries { center, pole_order, rows, cols, coeffs, residual: None }
    }

    /// The zero series, known exactly through `max_order`.
    pub fn zero(center: Cx, rows: usize, cols: usize, max_order: isize) -> Self {
        let n = (max_order + 1).max(0) as usize;
        LaurentSeries::new(center, 0, rows, cols, vec![CMat::zeros(rows, cols); n])
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    /// Highest order carried.
    pub fn max_order(&self) -> isize {
        self.coeffs.len() as isize - 1 - self.pole_order as isize
    }

    /// Coefficient of `(σ - c)^j`; zero for orders below the pole and beyond the truncation.
    pub fn coeff(&self, j: isize) -> CMat {
        let idx = j + self.pole_order as isize;
        if idx < 0 {
            return CMat::zeros(self.rows, self.cols);
        }
        self.coeffs.get(idx as usize).cloned().unwrap_or_else(|| CMat::zeros(self.rows, self.cols))
    }

    /// Negative-order coefficients only.
    pub fn principal_part(&self) -> LaurentSeries {
        let keep = self.pole_order.min(self.coeffs.len());
        LaurentSeries::new(self.center, self.pole_order, self.rows, self.cols, self.coeffs[..keep].to_vec())
    }

    /// True when all principal coefficients are at most `tol` in norm.
    pub fn principal_is_negligible(&self, tol: f64) -> bool {
        (1..=self.pole_order as isize).all(|j| self.coeff(-j).norm() <= tol)
    }

    /// Drops leading principal coefficients that are exactly zero, or below `tol`.
    pub fn trimmed(&self, tol: f64) -> LaurentSeries {
        let mut p = self.pole_order;
        let mut start = 0;
        while p > 0 && start < self.coeffs.len() && self.coeffs[start].norm() <= tol {
            p -= 1;
            start += 1;
        }
        let mut out = LaurentSeries::new(self.center, p, self.rows, self.cols, self.coeffs[start..].to_vec());
        out.residual = self.residual;
        out
    }

    pub fn scaled(&self, s: Cx) -> LaurentSeries {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out
    }

    /// Product of two series at the same center, truncated to the orders both factors determine.
    pub fn mul(&self, other: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.cols, other.rows, "shape mismatch in Laurent product");
        assert!((self.center - other.center).norm() <= 1e-12 * 1.0f64.max(self.center.norm()));
        let p = self.pole_order + other.pole_order;
        let top = (self.max_order() - other.pole_order as isize).min(other.max_order() - self.pole_order as isize);
        let mut coeffs = Vec::new();
        let mut j = -(p as isize);
        while j <= top {
            let mut acc = CMat::zeros(self.rows, other.cols);
            for a in -(self.pole_order as isize)..=self.max_order() {
                let b = j - a;
                if b < -(other.pole_order as isize) || b > other.max_order() {
                    continue;
                }
                acc += self.coeff(a) * other.coeff(b);
            }
            coeffs.push(acc);
            j += 1;
        }
        LaurentSeries::new(self.center, p, self.rows, other.cols, coeffs)
    }

    /// Adds two series at the same center; the result is known through the lower truncation.
    pub fn add(&self, other: &LaurentSeries) -> LaurentSeries {
        assert_eq!(self.shape(), other.shape());
        let p = self.pole_order.max(other.pole_order);
        let top = self.max_order().min(other.max_order());
        let coeffs = (-(p as isize)..=top).map(|j| self.coeff(j) + other.coeff(j)).collect();
        LaurentSeries::new(self.center, p, self.rows, self.cols, coeffs)
    }
}

/// Taylor expansion of a matrix polynomial at `center` as an exact Laurent series.
pub fn polynomial_series(p: &MatPoly, center: Cx) -> LaurentSeries {
    let coeffs = (0..=p.degree()).map(|j| p.taylor_coeff(center, j)).collect();
    LaurentSeries::new(center, 0, p.dim(), p.dim(), coeffs)
}

/// Number of trapezoid nodes on the contour.
const CONTOUR_NODES: usize = 256;

/// Relative residual bound for the identity `P̂₀ · Q = I` through the retained orders.
pub const LAURENT_TOL: f64 = 1e-8;

/// Laurent coefficients of `P̂₀(σ)⁻¹` at `center` through order `max_order`.
///
/// The pole order is the longest Jordan chain at `center` (zero off the
/// spectrum). Coefficients are contour integrals over a circle whose radius is
/// half the distance to the nearest other root, capped at one; the trapezoid
/// rule with 256 nodes converges geometrically there. The result is checked
/// against `Σ_{a+b=j} P_a Q_b = δ_{j0} I`.
pub fn laurent_inverse(
    p0: &MatPoly,
    center: Cx,
    max_order: usize,
    spectrum: &BoundarySpectrum,
) -> Result<LaurentSeries> {
    let pole = spectrum.pole_order_at(center);
    // expand at the root itself when the request is within clustering distance of it
    let center = spectrum.point_near(center).map(|p| p.sigma).unwrap_or(center);
    let radius = (0.5 * spectrum.distance_to_other_roots(center)).min(1.0);
    let n = p0.dim();
    let orders: Vec<isize> = (-(pole as isize)..=max_order as isize).collect();
    let mut coeffs = vec![CMat::zeros(n, n); orders.len()];
    for l in 0..CONTOUR_NODES {
        let phase = Cx::from_polar(1.0, 2.0 * std::f64::consts::PI * l as f64 / CONTOUR_NODES as f64);
        let z = phase * radius;
        let inv = p0
            .eval(center + z)
            .try_inverse()
            .ok_or_else(|| Error::Numerical(format!("conormal symbol singular on the contour around {center}")))?;
        for (c, &j) in coeffs.iter_mut().zip(&orders) {
            *c += &inv * z.powi(-(j as i32));
        }
    }
    for c in &mut coeffs {
        *c /= Cx::new(CONTOUR_NODES as f64, 0.0);
    }
    let mut series = LaurentSeries::new(center, pole, n, n, coeffs);
    let residual = inverse_residual(p0, &series);
    series.residual = Some(residual);
    if residual > LAURENT_TOL {
        return Err(Error::LaurentVerificationFailed { center, residual, tol: LAURENT_TOL });
    }
    Ok(series)
}

/// Largest relative deviation of `P̂₀ · Q` from the identity over the orders `Q` determines.
pub fn inverse_residual(p0: &MatPoly, q: &LaurentSeries) -> f64 {
    let n = p0.dim();
    let taylor: Vec<CMat> = (0..=p0.degree()).map(|a| p0.taylor_coeff(q.center, a)).collect();
    let mut worst: f64 = 0.0;
    for j in -(q.pole_order as isize)..=q.max_order() {
        let mut acc = CMat::zeros(n, n);
        let mut scale = 0.0;
        for (a, pa) in taylor.iter().enumerate() {
            let b = j - a as isize;
            if b < -(q.pole_order as isize) {
                break;
            }
            let qb = q.coeff(b);
            scale += pa.norm() * qb.norm();
            acc += pa * qb;
        }
        if j == 0 {
            acc -= CMat::identity(n, n);
        }
        worst = worst.max(acc.norm() / scale.max(1.0));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use crate::spectrum::{boundary_spectrum, Region};

    fn series_for(coeffs: &[Cx], center: Cx, k: usize) -> LaurentSeries {
        let p = MatPoly::scalar(coeffs);
        let s = boundary_spectrum(&p, Region::everywhere(), 1e-8).unwrap();
        laurent_inverse(&p, center, k, &s).unwrap()
    }

    #[test]
    fn simple_pole_of_shifted_square() {
        let q = series_for(&[c64(0.25, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)], c64(0.0, -0.5), 1);
        assert_eq!(q.pole_order, 1);
        assert!((q.coeff(-1)[(0, 0)] - c64(0.0, 1.0)).norm() < 1e-12);
        assert!((q.coeff(0)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn regular_point() {
        let q = series_for(&[c64(0.25, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)], c64(0.0, 0.0), 1);
        assert_eq!(q.pole_order, 0);
        assert!((q.coeff(0)[(0, 0)] - c64(4.0, 0.0)).norm() < 1e-12);
        assert!(q.coeff(1)[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn double_pole() {
        let q = series_for(&[c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)], c64(0.0, 0.0), 0);
        assert_eq!(q.pole_order, 2);
        assert!((q.coeff(-2)[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(q.coeff(-1)[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn product_of_series() {
        // (1/ε + 1)(1/ε) = 1/ε² + 1/ε
        let a = LaurentSeries::new(c64(0.0, 0.0), 1, 1, 1, vec![CMat::identity(1, 1), CMat::identity(1, 1)]);
        let b = LaurentSeries::new(c64(0.0, 0.0), 1, 1, 1, vec![CMat::identity(1, 1), CMat::zeros(1, 1)]);
        let c = a.mul(&b);
        assert_eq!(c.pole_order, 2);
        assert_eq!(c.max_order(), -1);
        assert_eq!(c.coeff(-2)[(0, 0)], c64(1.0, 0.0));
        assert_eq!(c.coeff(-1)[(0, 0)], c64(1.0, 0.0));
    }
}
