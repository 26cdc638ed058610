//! Truncated Taylor arithmetic in one real variable.
//!
//! A [`Jet`] of order `n` stores `f(t0), f'(t0), f''(t0)/2!, …, f^{(n)}(t0)/n!`.
//! It is used to apply differential operators exactly to cut-off singular
//! functions at grid points.

use crate::Cx;
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Vec<Cx>,
}

impl Jet {
    /// Constant jet.
    pub fn constant(value: Cx, order: usize) -> Self {
        let mut c = vec![Cx::new(0.0, 0.0); order + 1];
        c[0] = value;
        Jet { c }
    }

    /// Jet of the identity function `t` at `t0`.
    pub fn variable(t0: f64, order: usize) -> Self {
        let mut j = Jet::constant(Cx::new(t0, 0.0), order);
        if order >= 1 {
            j.c[1] = Cx::new(1.0, 0.0);
        }
        j
    }

    pub fn zero(order: usize) -> Self {
        Jet::constant(Cx::new(0.0, 0.0), order)
    }

    pub fn from_coeffs(c: Vec<Cx>) -> Self {
        assert!(!c.is_empty());
        Jet { c }
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn value(&self) -> Cx {
        self.c[0]
    }

    /// Normalized Taylor coefficient `f^{(k)}(t0)/k!`.
    pub fn coeff(&self, k: usize) -> Cx {
        self.c.get(k).copied().unwrap_or_default()
    }

    /// Derivative `f^{(k)}(t0)`.
    pub fn derivative(&self, k: usize) -> Cx {
        self.coeff(k) * factorial(k)
    }

    pub fn coeffs(&self) -> &[Cx] {
        &self.c
    }

    pub fn scale(&self, s: Cx) -> Jet {
        Jet { c: self.c.iter().map(|&a| a * s).collect() }
    }

    /// `exp` of a jet via the recurrence `k b_k = Σ_{j=1}^{k} j a_j b_{k-j}`.
    pub fn exp(&self) -> Jet {
        let n = self.order();
        let mut b = vec![Cx::new(0.0, 0.0); n + 1];
        b[0] = self.c[0].exp();
        for k in 1..=n {
            let mut s = Cx::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * b[k - j] * (j as f64);
            }
            b[k] = s / (k as f64);
        }
        Jet { c: b }
    }

    /// Reciprocal of a jet with nonzero value.
    pub fn recip(&self) -> Jet {
        let n = self.order();
        let mut b = vec![Cx::new(0.0, 0.0); n + 1];
        let a0 = self.c[0];
        b[0] = a0.inv();
        for k in 1..=n {
            let mut s = Cx::new(0.0, 0.0);
            for j in 1..=k {
                s += self.c[j] * b[k - j];
            }
            b[k] = -s / a0;
        }
        Jet { c: b }
    }

    /// Integer power.
    pub fn powi(&self, p: usize) -> Jet {
        let mut acc = Jet::constant(Cx::new(1.0, 0.0), self.order());
        for _ in 0..p {
            acc = &acc * self;
        }
        acc
    }

    /// Antiderivative with prescribed value at `t0` (order is preserved, top term dropped).
    pub fn integrate(&self, value: Cx) -> Jet {
        let n = self.order();
        let mut b = Vec::with_capacity(n + 1);
        b.push(value);
        b.extend((1..=n).map(|k| self.c[k - 1] / (k as f64)));
        Jet { c: b }
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        Jet { c: self.c.iter().zip(&o.c).map(|(a, b)| a - b).collect() }
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        let n = self.order().min(o.order());
        let mut c = vec![Cx::new(0.0, 0.0); n + 1];
        for (i, ci) in c.iter_mut().enumerate() {
            for j in 0..=i {
                *ci += self.c[j] * o.c[i - j];
            }
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(Cx::new(-1.0, 0.0))
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut r = 1.0;
    for i in 0..k {
        r = r * (n - i) as f64 / (i + 1) as f64;
    }
    r
}
