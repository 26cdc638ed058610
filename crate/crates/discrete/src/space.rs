use mellin_core::{CVec, Cx, Error, Result};

/// Uniform grid `t_i = -T + i h`, `i = 0..G`, on `t = log x ∈ [-T, 0]`.
///
/// Functions live in the conjugated picture `w = x^{m/2} u`, where the
/// reference space `x^{-m/2} L²_b` becomes plain `L²(dt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteSpace {
    depth: f64,
    points: usize,
    order: usize,
    step: f64,
}

/// Grid over `[-depth, 0]` with `points` nodes for an operator of order `order`.
pub fn build_space(depth: f64, points: usize, order: usize) -> Result<DiscreteSpace> {
    let mut errs = Vec::new();
    if !(depth > 0.0 && depth.is_finite()) {
        errs.push(format!("truncation depth must be positive, got {depth}"));
    }
    if points < 16 {
        errs.push(format!("grid needs at least 16 points, got {points}"));
    }
    if order == 0 {
        errs.push("operator order must be positive".to_string());
    }
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    Ok(DiscreteSpace { depth, points, order, step: depth / (points - 1) as f64 })
}

impl DiscreteSpace {
    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points == 0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Number of grid points fixed to zero at each end: `ceil(m/2)`.
    pub fn clamp(&self) -> usize {
        self.order.div_ceil(2)
    }

    pub fn t(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            0.0
        } else {
            -self.depth + i as f64 * self.step
        }
    }

    /// Node position for any (possibly negative or out-of-range) index.
    pub fn t_signed(&self, i: isize) -> f64 {
        -self.depth + i as f64 * self.step
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.t(i)).collect()
    }

    /// Trapezoid weights; they sum to `T`.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.points).map(|i| if i == 0 || i + 1 == self.points { 0.5 * self.step } else { self.step }).collect()
    }

    /// Weighted inner product `Σ w_i conj(u_i) v_i` of grid vectors with `dim` components per node.
    pub fn inner(&self, u: &CVec, v: &CVec, dim: usize) -> Cx {
        let w = self.weights();
        let mut acc = Cx::new(0.0, 0.0);
        for (i, wi) in w.iter().enumerate() {
            for c in 0..dim {
                acc += u[i * dim + c].conj() * v[i * dim + c] * wi;
            }
        }
        acc
    }

    pub fn norm(&self, v: &CVec, dim: usize) -> f64 {
        self.inner(v, v, dim).re.max(0.0).sqrt()
    }

    /// Index `j` with `e^{j h} = ρ`, if `log ρ` is an integer multiple of `h`.
    pub fn dilation_steps(&self, rho: f64) -> Result<isize> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Validation(vec![format!("dilation factor must be positive, got {rho}")]));
        }
        let x = rho.ln() / self.step;
        let j = x.round();
        if (x - j).abs() > 1e-9 * 1.0f64.max(x.abs()) {
            return Err(Error::GridIncompatible { rho, nearest: (j * self.step).exp() });
        }
        Ok(j as isize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_weights() {
        let s = build_space(20.0, 512, 2).unwrap();
        assert!((s.step() - 20.0 / 511.0).abs() < 1e-15);
        assert!((s.weights().iter().sum::<f64>() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_of_exponential() {
        let s = build_space(20.0, 512, 2).unwrap();
        let v = CVec::from_iterator(512, s.grid().into_iter().map(|t| Cx::new((t / 2.0).exp(), 0.0)));
        let ip = s.inner(&v, &v, 1).re;
        assert!((ip - (1.0 - (-20.0f64).exp())).abs() < 1e-3);
    }

    #[test]
    fn rejects_small_grids() {
        assert!(build_space(1.0, 8, 2).is_err());
        assert!(build_space(-1.0, 64, 2).is_err());
    }
}
