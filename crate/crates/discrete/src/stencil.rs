//! Finite-difference weights on the uniform log grid.

/// Fornberg's recursion: weights for derivatives `0..=max_deriv` at `z` from nodes `x`.
/// `out[k][j]` multiplies `f(x[j])` in the approximation of `f^{(k)}(z)`.
pub fn fornberg(z: f64, x: &[f64], max_deriv: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_deriv + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_deriv);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// A stencil: node indices `start..start+weights.len()` (may be negative) and weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub start: isize,
    pub weights: Vec<f64>,
}

/// Fourth-order stencils for `∂_t^k`, `k ≤ order`, on a grid of `len` nodes with spacing `h`.
///
/// Interior rows use central stencils, which may reach past the far end
/// (index < 0); rows near the last node use one-sided stencils ending there.
#[derive(Clone, Debug)]
pub struct StencilTable {
    len: usize,
    /// `table[k]` holds the stencil of `∂^k` for every node.
    table: Vec<Vec<Stencil>>,
}

impl StencilTable {
    pub fn new(len: usize, h: f64, order: usize) -> Self {
        let mut table = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let half = k.div_ceil(2) + 1;
            let central: Vec<f64> = (-(half as isize)..=half as isize).map(|j| j as f64).collect();
            let cw: Vec<f64> = fornberg(0.0, &central, k)[k].iter().map(|w| w / h.powi(k as i32)).collect();
            let one_sided_len = k + 4;
            let mut rows = Vec::with_capacity(len);
            for i in 0..len {
                if k == 0 {
                    rows.push(Stencil { start: i as isize, weights: vec![1.0] });
                } else if i + half < len {
                    rows.push(Stencil { start: i as isize - half as isize, weights: cw.clone() });
                } else {
                    let start = len - one_sided_len;
                    let nodes: Vec<f64> = (start..len).map(|j| j as f64 - i as f64).collect();
                    let w = fornberg(0.0, &nodes, k)[k].iter().map(|w| w / h.powi(k as i32)).collect();
                    rows.push(Stencil { start: start as isize, weights: w });
                }
            }
            table.push(rows);
        }
        StencilTable { len, table }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, deriv: usize, node: usize) -> &Stencil {
        &self.table[deriv][node]
    }

    /// True when node `i` uses central stencils for every derivative.
    pub fn is_central(&self, node: usize) -> bool {
        let order = self.table.len() - 1;
        node + order.div_ceil(2) + 1 < self.len
    }

    /// Largest reach of a central stencil.
    pub fn reach(&self) -> usize {
        let order = self.table.len() - 1;
        order.div_ceil(2) + 1
    }
}
