use crate::cutoff::LogCutoff;
use crate::extension::{resolve_enrichment, Enrichment, ExtensionSpec, Side, TipData};
use crate::field::CoefficientField;
use crate::space::DiscreteSpace;
use crate::stencil::StencilTable;
use domains::SingularFunction;
use mellin_core::jet::{binomial, Jet};
use mellin_core::{CMat, CVec, Cx, Error, Result};

/// `x^{m/2} x^m (A - λ) x^{-m/2}` discretized on a log grid, acting on
/// coefficient vectors of a domain basis.
///
/// Rows are grid nodes `0..G-c` (with `c = ceil(m/2)` and `N` components per
/// node); the Dirichlet condition at `t = 0` removes the last nodes. Columns
/// are, in order: nodal core unknowns on nodes `c..G-c`, far-end closure
/// functions (cut-off tip solutions that decay faster than `x^{m/2}`), and the
/// enrichment functions spanning `E`. The stored matrices are in "b-form"
/// (multiplied by `x^m`), which keeps the entries bounded; the operator
/// itself is the "A-form", obtained by dividing row `i` by `e^{m t_i}`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    space: DiscreteSpace,
    dim: usize,
    side: Side,
    lambda: Cx,
    stiffness: CMat,
    mass: CMat,
    embedding: CMat,
    row_scale: Vec<f64>,
    grid_core: usize,
    closure_dim: usize,
    enrichment: Vec<SingularFunction>,
    problem_name: String,
}

impl DiscreteOperator {
    pub fn space(&self) -> &DiscreteSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn lambda(&self) -> Cx {
        self.lambda
    }

    pub fn problem_name(&self) -> &str {
        &self.problem_name
    }

    pub fn rows(&self) -> usize {
        self.stiffness.nrows()
    }

    pub fn cols(&self) -> usize {
        self.stiffness.ncols()
    }

    /// Columns representing the minimal domain: grid core plus closure functions.
    pub fn core_dim(&self) -> usize {
        self.grid_core + self.closure_dim
    }

    pub fn enrichment_dim(&self) -> usize {
        self.enrichment.len()
    }

    pub fn enrichment_functions(&self) -> &[SingularFunction] {
        &self.enrichment
    }

    /// First grid node carrying a core unknown.
    pub fn first_core_node(&self) -> usize {
        self.space.clamp()
    }

    /// Number of nodes carrying equations.
    pub fn row_nodes(&self) -> usize {
        self.rows() / self.dim
    }

    /// The same operator with the spectral parameter replaced.
    pub fn with_lambda(&self, lambda: Cx) -> DiscreteOperator {
        let mut out = self.clone();
        out.lambda = lambda;
        out
    }

    /// b-form matrix `x^m (A - λ)` in the column basis.
    pub fn matrix(&self) -> CMat {
        &self.stiffness - &self.mass * self.lambda
    }

    /// b-form of `A` alone.
    pub fn stiffness(&self) -> &CMat {
        &self.stiffness
    }

    /// b-form of the identity: `x^m` times the grid values on the equation nodes.
    pub fn mass(&self) -> &CMat {
        &self.mass
    }

    /// Grid values (all `G·N` entries) of every column.
    pub fn embedding(&self) -> &CMat {
        &self.embedding
    }

    /// `e^{m t_i}` for every row.
    pub fn row_scale(&self) -> &[f64] {
        &self.row_scale
    }

    /// The operator `A - λ` itself: rows divided by `x^m`.
    pub fn a_form(&self) -> CMat {
        let mut a = self.matrix();
        for (i, s) in self.row_scale.iter().enumerate() {
            a.row_mut(i).scale_mut(1.0 / s);
        }
        a
    }

    /// Values of `(A - λ) v` on the equation nodes.
    pub fn apply(&self, v: &CVec) -> CVec {
        let mut y = self.matrix() * v;
        for (i, s) in self.row_scale.iter().enumerate() {
            y[i] /= *s;
        }
        y
    }

    /// Trapezoid weights of the equation rows.
    pub fn row_weights(&self) -> Vec<f64> {
        let w = self.space.weights();
        (0..self.rows()).map(|r| w[r / self.dim]).collect()
    }

    /// Trapezoid weights of all grid values.
    pub fn grid_weights(&self) -> Vec<f64> {
        let w = self.space.weights();
        (0..self.space.len() * self.dim).map(|r| w[r / self.dim]).collect()
    }

    /// Columns of the enrichment functions.
    pub fn enrichment_range(&self) -> std::ops::Range<usize> {
        self.core_dim()..self.cols()
    }
}

/// Assembles `A - λ` (side `Cone`) or `A_∧ - λ` (side `Wedge`) on the extension `ext`.
pub fn assemble(
    field: &dyn CoefficientField,
    space: &DiscreteSpace,
    ext: &ExtensionSpec,
    lambda: Cx,
    side: Side,
) -> Result<DiscreteOperator> {
    let tip = TipData::new(&field.tip_problem())?;
    assemble_with(field, &tip, space, ext, lambda, side)
}

/// As [`assemble`], reusing precomputed tip data.
pub fn assemble_with(
    field: &dyn CoefficientField,
    tip: &TipData,
    space: &DiscreteSpace,
    ext: &ExtensionSpec,
    lambda: Cx,
    side: Side,
) -> Result<DiscreteOperator> {
    let m = field.order();
    if m != space.order() {
        return Err(Error::Validation(vec![format!("grid built for order {}, operator has order {m}", space.order())]));
    }
    let enrichment = resolve_enrichment(ext, tip, side)?;
    let frozen;
    let coeffs: &dyn CoefficientField = match side {
        Side::Cone => field,
        Side::Wedge => {
            frozen = field.frozen();
            &frozen
        }
    };
    build(coeffs, space, &enrichment, LogCutoff::for_radius(ext.cutoff_radius), lambda, side, &tip_name(field))
}

fn tip_name(field: &dyn CoefficientField) -> String {
    field.tip_problem().name().to_string()
}

/// `b_j(t)` with `Σ_k a_k (-i)^k (∂_t - m/2)^k = Σ_j b_j ∂_t^j`.
fn expanded_coefficients(field: &dyn CoefficientField, t: f64) -> Vec<CMat> {
    let m = field.order();
    let n = field.dim();
    let shift = -(m as f64) / 2.0;
    let a: Vec<CMat> = (0..=m).map(|k| field.coefficient(k, t) * Cx::new(0.0, -1.0).powu(k as u32)).collect();
    (0..=m)
        .map(|j| {
            let mut b = CMat::zeros(n, n);
            for (k, ak) in a.iter().enumerate().skip(j) {
                b += ak * Cx::new(binomial(k, j) * shift.powi((k - j) as i32), 0.0);
            }
            b
        })
        .collect()
}

/// Per-component jets of a singular function in the variable `t = log x`.
fn singular_jets(sf: &SingularFunction, t: f64, order: usize) -> Vec<Jet> {
    let n = sf.dim();
    let var = Jet::variable(t, order);
    let mut out = vec![Jet::zero(order); n];
    for term in sf.terms() {
        let e = var.scale(Cx::new(0.0, 1.0) * term.sigma).exp();
        let mut pow = Jet::constant(Cx::new(1.0, 0.0), order);
        for c in &term.coeffs {
            let piece = &e * &pow;
            for (comp, o) in out.iter_mut().enumerate() {
                *o = &*o + &piece.scale(c[comp]);
            }
            pow = &pow * &var;
        }
    }
    out
}

/// Grid values `e^{mt/2} χ(t) f(t)` and exact b-form image `e^{mt/2} Σ a_k (-i)^k ∂^k(χ f)` at `t`.
fn column_data(field: &dyn CoefficientField, sf: &SingularFunction, cutoff: &LogCutoff, t: f64) -> (CVec, CVec) {
    let m = field.order();
    let n = field.dim();
    let chi = cutoff.jet(t, m);
    let weight = (0.5 * m as f64 * t).exp();
    let jets: Vec<Jet> = singular_jets(sf, t, m).iter().map(|j| j * &chi).collect();
    let value = CVec::from_iterator(n, jets.iter().map(|j| j.value() * weight));
    let mut image = CVec::zeros(n);
    for k in 0..=m {
        let dk = CVec::from_iterator(n, jets.iter().map(|j| j.derivative(k)));
        image += field.coefficient(k, t) * dk * (Cx::new(0.0, -1.0).powu(k as u32) * weight);
    }
    (value, image)
}

fn build(
    field: &dyn CoefficientField,
    space: &DiscreteSpace,
    enrichment: &Enrichment,
    cutoff: LogCutoff,
    lambda: Cx,
    side: Side,
    name: &str,
) -> Result<DiscreteOperator> {
    let m = field.order();
    let n = field.dim();
    let g = space.len();
    let c = space.clamp();
    let row_nodes = g - c;
    let core_nodes = c..g - c;
    let grid_core = core_nodes.len() * n;
    let closure_dim = enrichment.closure.len();
    let cols = grid_core + closure_dim + enrichment.functions.len();
    let rows = row_nodes * n;
    let stencils = StencilTable::new(g, space.step(), m);
    let mut stiffness = CMat::zeros(rows, cols);
    let mut embedding = CMat::zeros(g * n, cols);
    for node in core_nodes.clone() {
        for comp in 0..n {
            embedding[(node * n + comp, (node - c) * n + comp)] = Cx::new(1.0, 0.0);
        }
    }
    for i in 0..row_nodes {
        let b = expanded_coefficients(field, space.t(i));
        for (k, bk) in b.iter().enumerate() {
            let st = stencils.get(k, i);
            for (off, w) in st.weights.iter().enumerate() {
                let p = st.start + off as isize;
                if p < core_nodes.start as isize || p >= core_nodes.end as isize {
                    continue;
                }
                let col0 = (p as usize - c) * n;
                for r in 0..n {
                    for q in 0..n {
                        stiffness[(i * n + r, col0 + q)] += bk[(r, q)] * *w;
                    }
                }
            }
        }
    }
    let far = LogCutoff::far_end(space.depth());
    let extra = enrichment.closure.iter().map(|f| (f, far)).chain(enrichment.functions.iter().map(|f| (f, cutoff)));
    for (j, (sf, cut)) in extra.enumerate() {
        let col = grid_core + j;
        for node in 0..g {
            let (value, image) = column_data(field, sf, &cut, space.t(node));
            for comp in 0..n {
                embedding[(node * n + comp, col)] = value[comp];
                if node < row_nodes {
                    stiffness[(node * n + comp, col)] = image[comp];
                }
            }
        }
    }
    let row_scale: Vec<f64> = (0..rows).map(|r| (m as f64 * space.t(r / n)).exp()).collect();
    let mut mass = embedding.rows(0, rows).into_owned();
    for (r, s) in row_scale.iter().enumerate() {
        mass.row_mut(r).scale_mut(*s);
    }
    if stiffness.iter().chain(embedding.iter()).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite entries in the assembled operator".to_string()));
    }
    Ok(DiscreteOperator {
        space: space.clone(),
        dim: n,
        side,
        lambda,
        stiffness,
        mass,
        embedding,
        row_scale,
        grid_core,
        closure_dim,
        enrichment: enrichment.functions.clone(),
        problem_name: name.to_string(),
    })
}
