use mellin_core::{CMat, CVec, Cx, Error, Result};
use serde::{Deserialize, Serialize};

/// Exponents closer than this (relative to their size) are treated as equal.
pub const EXPONENT_TOL: f64 = 1e-9;

pub fn same_exponent(a: Cx, b: Cx) -> bool {
    (a - b).norm() <= EXPONENT_TOL * 1.0f64.max(a.norm()).max(b.norm())
}

/// One exponent group `Σ_k c_k log^k(x) · x^{iσ}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularTerm {
    pub sigma: Cx,
    /// `coeffs[k]` multiplies `log^k x`.
    pub coeffs: Vec<CVec>,
}

impl SingularTerm {
    pub fn log_degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

/// A finite sum `Σ_σ Σ_k c_{σ,k} log^k(x) x^{iσ}` with vector coefficients.
///
/// Terms are kept with pairwise distinct exponents and a nonzero top coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularFunction {
    dim: usize,
    terms: Vec<SingularTerm>,
}

impl SingularFunction {
    pub fn zero(dim: usize) -> Self {
        SingularFunction { dim, terms: Vec::new() }
    }

    /// Builds a function from raw terms, merging equal exponents and dropping zero tails.
    pub fn new(dim: usize, terms: Vec<SingularTerm>) -> Self {
        let mut f = SingularFunction::zero(dim);
        for t in terms {
            assert!(t.coeffs.iter().all(|c| c.len() == dim), "coefficient length differs from the dimension");
            f.add_term(t.sigma, &t.coeffs);
        }
        f
    }

    /// Single term `Σ_k coeffs[k] log^k(x) x^{iσ}`.
    pub fn monomial(sigma: Cx, coeffs: Vec<CVec>) -> Self {
        let dim = coeffs.first().map(|c| c.len()).unwrap_or(1);
        SingularFunction::new(dim, vec![SingularTerm { sigma, coeffs }])
    }

    /// Scalar single term from scalar coefficients.
    pub fn scalar(sigma: Cx, coeffs: &[Cx]) -> Self {
        SingularFunction::monomial(sigma, coeffs.iter().map(|&c| CVec::from_element(1, c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[SingularTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn exponents(&self) -> Vec<Cx> {
        self.terms.iter().map(|t| t.sigma).collect()
    }

    /// The term at exponent `sigma`, if present.
    pub fn term_at(&self, sigma: Cx) -> Option<&SingularTerm> {
        self.terms.iter().find(|t| same_exponent(t.sigma, sigma))
    }

    /// Coefficient of `log^k(x) x^{iσ}` (zero when absent).
    pub fn coeff(&self, sigma: Cx, k: usize) -> CVec {
        self.term_at(sigma).and_then(|t| t.coeffs.get(k).cloned()).unwrap_or_else(|| CVec::zeros(self.dim))
    }

    fn add_term(&mut self, sigma: Cx, coeffs: &[CVec]) {
        let pos = self.terms.iter().position(|t| same_exponent(t.sigma, sigma));
        let idx = match pos {
            Some(i) => i,
            None => {
                self.terms.push(SingularTerm { sigma, coeffs: Vec::new() });
                self.terms.len() - 1
            }
        };
        let t = &mut self.terms[idx];
        if t.coeffs.len() < coeffs.len() {
            t.coeffs.resize(coeffs.len(), CVec::zeros(self.dim));
        }
        for (k, c) in coeffs.iter().enumerate() {
            t.coeffs[k] += c;
        }
        while t.coeffs.last().is_some_and(|c| c.iter().all(|z| *z == Cx::new(0.0, 0.0))) {
            t.coeffs.pop();
        }
        if t.coeffs.is_empty() {
            self.terms.remove(idx);
        }
    }

    pub fn add(&self, other: &SingularFunction) -> SingularFunction {
        let mut out = self.clone();
        for t in &other.terms {
            out.add_term(t.sigma, &t.coeffs);
        }
        out
    }

    pub fn sub(&self, other: &SingularFunction) -> SingularFunction {
        self.add(&other.scaled(Cx::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, s: Cx) -> SingularFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| SingularTerm { sigma: t.sigma, coeffs: t.coeffs.iter().map(|c| c * s).collect() })
            .collect();
        SingularFunction::new(self.dim, terms)
    }

    /// Drops coefficients of norm at most `tol` (and then empty terms).
    pub fn chopped(&self, tol: f64) -> SingularFunction {
        let terms = self
            .terms
            .iter()
            .map(|t| SingularTerm {
                sigma: t.sigma,
                coeffs: t
                    .coeffs
                    .iter()
                    .map(|c| if c.norm() <= tol { CVec::zeros(self.dim) } else { c.clone() })
                    .collect(),
            })
            .collect();
        SingularFunction::new(self.dim, terms)
    }

    /// Euclidean norm of the whole coefficient list.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.iter().flat_map(|t| t.coeffs.iter()).map(|c| c.norm_squared()).sum::<f64>().sqrt()
    }

    /// Value at `x > 0`.
    pub fn eval(&self, x: f64) -> CVec {
        let t = x.ln();
        let mut out = CVec::zeros(self.dim);
        for term in &self.terms {
            let base = (Cx::new(0.0, 1.0) * term.sigma * t).exp();
            let mut p = Cx::new(1.0, 0.0);
            for c in &term.coeffs {
                out += c * (base * p);
                p *= t;
            }
        }
        out
    }

    /// Requires a single exponent and returns its term.
    pub fn single_term(&self) -> Result<&SingularTerm> {
        match self.terms.len() {
            1 => Ok(&self.terms[0]),
            n => Err(Error::MultiExponent(n)),
        }
    }
}

/// Coordinates of a set of singular functions over their common `(exponent, log-power)` slots.
pub struct CoefficientSpace {
    slots: Vec<(Cx, usize)>,
    dim: usize,
}

impl CoefficientSpace {
    /// Slots spanned by all given functions.
    pub fn spanning(funcs: &[&SingularFunction], dim: usize) -> Self {
        let mut slots: Vec<(Cx, usize)> = Vec::new();
        for f in funcs {
            for t in f.terms() {
                for k in 0..t.coeffs.len() {
                    if !slots.iter().any(|(s, j)| *j == k && same_exponent(*s, t.sigma)) {
                        slots.push((t.sigma, k));
                    }
                }
            }
        }
        CoefficientSpace { slots, dim }
    }

    pub fn len(&self) -> usize {
        self.slots.len() * self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Coordinate vector of `f`; coefficients outside the slots are ignored.
    pub fn coordinates(&self, f: &SingularFunction) -> CVec {
        let mut v = CVec::zeros(self.len());
        for (i, (s, k)) in self.slots.iter().enumerate() {
            v.rows_mut(i * self.dim, self.dim).copy_from(&f.coeff(*s, *k));
        }
        v
    }

    /// Matrix whose columns are the coordinates of `funcs`.
    pub fn matrix(&self, funcs: &[&SingularFunction]) -> CMat {
        let mut m = CMat::zeros(self.len(), funcs.len());
        for (j, f) in funcs.iter().enumerate() {
            m.set_column(j, &self.coordinates(f));
        }
        m
    }
}

/// Numerical rank of a list of singular functions.
pub fn rank(funcs: &[&SingularFunction], dim: usize, rel_tol: f64) -> usize {
    if funcs.is_empty() {
        return 0;
    }
    let space = CoefficientSpace::spanning(funcs, dim);
    if space.is_empty() {
        return 0;
    }
    let s = mellin_core::linalg::singular_values(&space.matrix(funcs));
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel_tol * top).count()
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    sigma: [f64; 2],
    coeffs: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct WireFunction {
    terms: Vec<WireTerm>,
}

impl Serialize for SingularFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        WireFunction {
            terms: self
                .terms
                .iter()
                .map(|t| WireTerm {
                    sigma: [t.sigma.re, t.sigma.im],
                    coeffs: t.coeffs.iter().map(|c| c.iter().map(|z| [z.re, z.im]).collect()).collect(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SingularFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = WireFunction::deserialize(d)?;
        let dim = w.terms.iter().flat_map(|t| t.coeffs.iter()).map(|c| c.len()).next().unwrap_or(1);
        let mut terms = Vec::new();
        for t in w.terms {
            let mut coeffs = Vec::new();
            for c in t.coeffs {
                if c.len() != dim {
                    return Err(D::Error::custom(format!(
                        "coefficient vector of length {} where {dim} was expected",
                        c.len()
                    )));
                }
                coeffs.push(CVec::from_iterator(dim, c.iter().map(|p| Cx::new(p[0], p[1]))));
            }
            terms.push(SingularTerm { sigma: Cx::new(t.sigma[0], t.sigma[1]), coeffs });
        }
        Ok(SingularFunction::new(dim, terms))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mellin_core::c64;

    #[test]
    fn merging_and_cancellation() {
        let a = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0), c64(2.0, 0.0)]);
        let b = SingularFunction::scalar(c64(0.0, 0.5), &[c64(0.0, 0.0), c64(-2.0, 0.0)]);
        let s = a.add(&b);
        assert_eq!(s.terms().len(), 1);
        assert_eq!(s.terms()[0].log_degree(), 0);
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn evaluation_of_power() {
        // x^{i(i/2)} = x^{-1/2}
        let f = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)]);
        assert!((f.eval(4.0)[0] - c64(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn json_roundtrip() {
        let f = SingularFunction::scalar(c64(0.3, -0.5), &[c64(1.0, 2.0), c64(0.0, -1.0)]);
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.contains("\"sigma\""));
        let g: SingularFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }
}
