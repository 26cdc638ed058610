use crate::family::{extend_columns_rows, BorderedFamily, BorderedSolve};
use discrete::{l2_norm, DiscreteOperator};
use mellin_core::linalg::{krylov_norm, singular_values};
use mellin_core::{CMat, CVec, Cx, Error, Result};

/// Smallest singular value of the normalized `F(λ)` below which `λ` is declared spectral.
const SPECTRUM_TOL: f64 = 1e-10;

/// The finite matrix `F(λ) = T(λ)(A - λ)|_E` deciding invertibility of `A_D - λ`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub lambda: Cx,
    /// `d″ × dim E`, in the column basis of the extension.
    pub f: CMat,
    /// `F` with the rows of `T` scaled to unit `L²` norm and the enrichment functions to unit `L²` norm.
    ///
    /// Poles of `T(λ)` (where the bordered minimal operator degenerates) cancel
    /// in this normalization, so its zeros are exactly the spectrum.
    pub f_normalized: CMat,
    /// Product of the singular values of the normalized matrix (`|det|` when square, 1 when empty).
    pub det_abs: f64,
    /// 2-norm condition number of the normalized matrix.
    pub cond: f64,
    pub warning: Option<String>,
}

impl Reduction {
    pub fn is_square(&self) -> bool {
        self.f.nrows() == self.f.ncols()
    }

    /// Smallest singular value of the normalized matrix (1 when empty).
    pub fn smallest_singular_value(&self) -> f64 {
        if self.f.nrows() == 0 && self.f.ncols() == 0 {
            return 1.0;
        }
        let s = singular_values(&self.f_normalized);
        if self.f.nrows() != self.f.ncols() {
            return 0.0;
        }
        s.last().copied().unwrap_or(0.0)
    }
}

/// Bordered minimal part of an extension at `λ`, together with the pieces shared by
/// the reduction and the resolvent.
struct Setup {
    op: DiscreteOperator,
    solve: BorderedSolve,
    core: usize,
    dim_e: usize,
    deficiency: usize,
    k: CMat,
    /// `M⁻¹ [x^m (A-λ)|_E; 0]`: the top block is `B(A-λ)|_E`, the bottom block `F`.
    z_e: CMat,
    warning: Option<String>,
}

fn setup(ext: &DiscreteOperator, bf: &BorderedFamily, lambda: Cx) -> Result<Setup> {
    let op = ext.with_lambda(lambda);
    let core = op.core_dim();
    let tmpl = bf.template();
    if core != tmpl.cols() || op.rows() != tmpl.rows() || op.dim() != tmpl.dim() {
        return Err(Error::Validation(vec![format!(
            "extension has {} minimal columns and {} rows but the bordered family has {} and {}",
            core,
            op.rows(),
            tmpl.cols(),
            tmpl.rows()
        )]));
    }
    let (k, t, warning) = extend_columns_rows(bf, lambda)?;
    let solve = BorderedSolve::on_columns(&op, core, &k, &t)?;
    let dim_e = op.enrichment_dim();
    let mut rhs = CMat::zeros(op.rows() + t.nrows(), dim_e);
    let full = op.matrix();
    rhs.view_mut((0, 0), (op.rows(), dim_e)).copy_from(&full.columns(core, dim_e));
    let z_e = solve.solve_bform(&rhs);
    Ok(Setup { core, dim_e, deficiency: k.ncols(), k, solve, z_e, op, warning })
}

impl Setup {
    fn f(&self) -> CMat {
        self.z_e.rows(self.core, self.deficiency).into_owned()
    }

    fn reduction(&self) -> Reduction {
        let f = self.f();
        let mut fhat = f.clone();
        for i in 0..self.deficiency {
            let n = self.solve.added_coordinate_norm(i);
            fhat.row_mut(i).scale_mut(1.0 / n);
        }
        for l in 0..self.dim_e {
            let mut unit = CVec::zeros(self.op.cols());
            unit[self.core + l] = Cx::new(1.0, 0.0);
            let n = l2_norm(&self.op, &unit);
            fhat.column_mut(l).scale_mut(1.0 / n);
        }
        let s = singular_values(&fhat);
        let (det_abs, cond) = if s.is_empty() {
            (if f.nrows() == f.ncols() { 1.0 } else { 0.0 }, 1.0)
        } else {
            let det = if f.nrows() == f.ncols() { s.iter().product() } else { 0.0 };
            (det, s[0] / s[s.len() - 1])
        };
        Reduction { lambda: self.op.lambda(), f, f_normalized: fhat, det_abs, cond, warning: self.warning.clone() }
    }
}

/// Reduces the extension `ext` (evaluated at `λ`) to `F(λ)` using the
/// bordering `bf` of its minimal part.
///
/// `T(λ)` is the bottom block row of the inverse of the bordered minimal
/// operator. `A_D - λ` is invertible exactly when `F(λ)` is.
pub fn reduce_to_boundary(ext: &DiscreteOperator, bf: &BorderedFamily, lambda: Cx) -> Result<Reduction> {
    Ok(setup(ext, bf, lambda)?.reduction())
}

/// `(A_D - λ)⁻¹` assembled from the bordered inverse, and the projection `Π(λ) = K(λ)T(λ)`.
#[derive(Clone, Debug)]
pub struct Resolvent {
    /// Maps row values of `f` to column coefficients of `(A_D - λ)⁻¹ f`.
    pub matrix: CMat,
    /// `B(λ)`: the minimal-domain block row of the bordered inverse, a left inverse of `A - λ` there.
    pub left_inverse: CMat,
    /// Rank-`d″` projection onto the span of the added columns along the range of `A - λ` on the minimal domain.
    pub projection: CMat,
    pub reduction: Reduction,
}

/// Builds `(A_D - λ)⁻¹ = B + (1 - B(A - λ)) F⁻¹ T`.
pub fn resolvent(ext: &DiscreteOperator, bf: &BorderedFamily, lambda: Cx) -> Result<Resolvent> {
    let s = setup(ext, bf, lambda)?;
    let reduction = s.reduction();
    let finv = invert_reduction(&s, &reduction)?;
    let rows = s.op.rows();
    let mut rhs = CMat::zeros(rows + s.solve.extra_rows, rows);
    let scale = s.op.row_scale();
    for i in 0..rows {
        rhs[(i, i)] = Cx::new(scale[i], 0.0);
    }
    let z = s.solve.solve_bform(&rhs);
    let b = z.rows(0, s.core).into_owned();
    let t = z.rows(s.core, s.deficiency).into_owned();
    let x_e = &finv * &t;
    let bc = s.z_e.rows(0, s.core);
    let x_min = &b - bc * &x_e;
    let mut matrix = CMat::zeros(s.op.cols(), rows);
    matrix.view_mut((0, 0), (s.core, rows)).copy_from(&x_min);
    matrix.view_mut((s.core, 0), (s.dim_e, rows)).copy_from(&x_e);
    let projection = &s.k * t;
    Ok(Resolvent { matrix, left_inverse: b, projection, reduction })
}

fn invert_reduction(s: &Setup, reduction: &Reduction) -> Result<CMat> {
    if !reduction.is_square() {
        return Err(Error::Validation(vec![format!(
            "extension adds {} functions but the minimal family has cokernel dimension {}: A_D - lambda is not of index zero",
            s.dim_e, s.deficiency
        )]));
    }
    if reduction.smallest_singular_value() <= SPECTRUM_TOL {
        return Err(Error::InSpectrum(s.op.lambda()));
    }
    reduction.f.clone().try_inverse().ok_or_else(|| Error::InSpectrum(s.op.lambda()))
}

/// `(A_D - λ)⁻¹` as an operator on `L²`, applied through the bordered factorization.
pub struct ResolventOperator {
    setup: Setup,
    finv: CMat,
    embedding: CMat,
    grid_sqrt_weights: Vec<f64>,
    row_sqrt_weights: Vec<f64>,
    pub reduction: Reduction,
}

impl ResolventOperator {
    pub fn new(ext: &DiscreteOperator, bf: &BorderedFamily, lambda: Cx) -> Result<Self> {
        let setup = setup(ext, bf, lambda)?;
        let reduction = setup.reduction();
        let finv = invert_reduction(&setup, &reduction)?;
        Ok(ResolventOperator {
            embedding: setup.op.embedding().clone(),
            grid_sqrt_weights: setup.op.grid_weights().iter().map(|w| w.sqrt()).collect(),
            row_sqrt_weights: setup.op.row_weights().iter().map(|w| w.sqrt()).collect(),
            finv,
            setup,
            reduction,
        })
    }

    pub fn rows(&self) -> usize {
        self.setup.op.rows()
    }

    /// Column coefficients of `(A_D - λ)⁻¹ f` for row values `f`.
    pub fn solve(&self, f: &CVec) -> CVec {
        let s = &self.setup;
        let g = CVec::zeros(s.solve.extra_rows);
        let (y, c) = s.solve.solve(f, &g);
        let x_e = &self.finv * c;
        let x_min = y - s.z_e.rows(0, s.core) * &x_e;
        let mut x = CVec::zeros(s.op.cols());
        x.rows_mut(0, s.core).copy_from(&x_min);
        x.rows_mut(s.core, s.dim_e).copy_from(&x_e);
        x
    }

    /// Weighted grid values of the solution for weighted data.
    pub fn apply(&self, fhat: &CVec) -> CVec {
        let f = CVec::from_fn(fhat.len(), |i, _| fhat[i] / self.row_sqrt_weights[i]);
        let mut u = &self.embedding * self.solve(&f);
        for (z, w) in u.iter_mut().zip(&self.grid_sqrt_weights) {
            *z *= *w;
        }
        u
    }

    /// Adjoint of [`ResolventOperator::apply`].
    pub fn apply_adjoint(&self, uhat: &CVec) -> CVec {
        let s = &self.setup;
        let p = CVec::from_fn(uhat.len(), |i, _| uhat[i] * self.grid_sqrt_weights[i]);
        let x = self.embedding.adjoint() * p;
        let x_min = x.rows(0, s.core).into_owned();
        let x_e = x.rows(s.core, s.dim_e).into_owned();
        let bc = s.z_e.rows(0, s.core);
        let y_bottom = self.finv.adjoint() * (x_e - bc.adjoint() * &x_min);
        let mut rhs = CVec::zeros(s.core + s.deficiency);
        rhs.rows_mut(0, s.core).copy_from(&x_min);
        rhs.rows_mut(s.core, s.deficiency).copy_from(&y_bottom);
        let v = s.solve.solve_adjoint(&rhs);
        let scale = s.op.row_scale();
        CVec::from_fn(self.rows(), |i, _| v[i] * scale[i] / self.row_sqrt_weights[i])
    }

    /// `‖(A_D - λ)⁻¹‖` on `L²`, by Lanczos iteration on `R* R`.
    pub fn norm(&self) -> f64 {
        krylov_norm(|v| self.apply(v), |v| self.apply_adjoint(v), self.rows(), 29, 300, 1e-7)
    }
}
