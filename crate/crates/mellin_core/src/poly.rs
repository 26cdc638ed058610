use crate::jet::binomial;
use crate::{CMat, Cx};

/// Matrix polynomial `P(σ) = Σ_k A_k σ^k` with square complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPoly {
    coeffs: Vec<CMat>,
}

impl MatPoly {
    /// Builds a polynomial from its coefficients in increasing degree.
    /// All coefficients must share one square shape.
    pub fn new(coeffs: Vec<CMat>) -> Self {
        assert!(!coeffs.is_empty(), "a matrix polynomial needs at least one coefficient");
        let n = coeffs[0].nrows();
        assert!(coeffs.iter().all(|c| c.nrows() == n && c.ncols() == n));
        MatPoly { coeffs }
    }

    pub fn zero(dim: usize) -> Self {
        MatPoly { coeffs: vec![CMat::zeros(dim, dim)] }
    }

    /// Scalar polynomial from coefficients in increasing degree.
    pub fn scalar(coeffs: &[Cx]) -> Self {
        MatPoly::new(coeffs.iter().map(|&c| CMat::from_element(1, 1, c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].nrows()
    }

    /// Formal degree (number of stored coefficients minus one).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> CMat {
        self.coeffs.get(k).cloned().unwrap_or_else(|| CMat::zeros(self.dim(), self.dim()))
    }

    pub fn leading(&self) -> &CMat {
        self.coeffs.last().unwrap()
    }

    /// Horner evaluation.
    pub fn eval(&self, sigma: Cx) -> CMat {
        let mut acc = self.coeffs.last().unwrap().clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * sigma + c;
        }
        acc
    }

    /// Normalized derivative `P^{(j)}(σ0) / j!`.
    pub fn taylor_coeff(&self, sigma0: Cx, j: usize) -> CMat {
        let mut acc = CMat::zeros(self.dim(), self.dim());
        for (k, c) in self.coeffs.iter().enumerate().skip(j) {
            acc += c * (sigma0.powu((k - j) as u32) * binomial(k, j));
        }
        acc
    }

    /// The polynomial `σ ↦ P(σ + s)`.
    pub fn shifted(&self, s: Cx) -> MatPoly {
        MatPoly::new((0..=self.degree()).map(|j| self.taylor_coeff(s, j)).collect())
    }

    pub fn scaled(&self, c: Cx) -> MatPoly {
        MatPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// True when every coefficient is below `tol` in Frobenius norm.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }

    /// Largest coefficient norm, used as a scale.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Evaluates a matrix polynomial at `σ`.
pub fn eval_symbol(p: &MatPoly, sigma: Cx) -> CMat {
    p.eval(sigma)
}
