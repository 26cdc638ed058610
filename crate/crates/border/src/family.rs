use discrete::{graph_frame, DiscreteOperator};
use mellin_core::linalg::{krylov_norm, left_null_space, null_space, orthonormalize, singular_values, DualLu};
use mellin_core::{CMat, CVec, Cx, Error, Result};

/// Largest admissible condition number of a bordered matrix.
pub const COND_MAX: f64 = 1e8;

/// Largest admissible backward error of a bordered solve.
const IDENTITY_TOL: f64 = 1e-9;

/// Rounds of seed refinement before giving up on a profile choice.
const MAX_SEEDS: usize = 6;

const PROFILE_WIDTHS: [f64; 3] = [0.5, 1.0, 2.0];
const PROFILE_SPACING: f64 = 0.25;

/// `n` equispaced points on the unit circle, centred at angle `center` and spanning `aperture`.
pub fn arc_samples(center: f64, aperture: f64, n: usize) -> Vec<Cx> {
    match n {
        0 => Vec::new(),
        1 => vec![Cx::from_polar(1.0, center)],
        _ => (0..n)
            .map(|i| Cx::from_polar(1.0, center - 0.5 * aperture + aperture * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// Gaussian bump `exp(-((t - center)/width)²)` in one component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    pub center: f64,
    pub width: f64,
    pub component: usize,
}

impl Profile {
    /// Values on the equation rows of `op`.
    pub fn values(&self, op: &DiscreteOperator) -> CVec {
        let n = op.dim();
        let space = op.space();
        CVec::from_fn(op.rows(), |r, _| {
            if r % n != self.component {
                return Cx::new(0.0, 0.0);
            }
            let z = (space.t(r / n) - self.center) / self.width;
            Cx::new((-z * z).exp(), 0.0)
        })
    }
}

/// A discrete family `λ ↦ a(λ)` on the unit arc, made invertible by bordering.
///
/// The family is `template` with its spectral parameter replaced. The
/// columns `k` are row values, orthonormal in the weighted row inner
/// product; the rows `t` act on column coefficients. The corner `q` is zero.
#[derive(Clone, Debug)]
pub struct BorderedFamily {
    samples: Vec<Cx>,
    deficiency: usize,
    kernel_dim: usize,
    profiles: Vec<Profile>,
    k: CMat,
    t: CMat,
    conditions: Vec<f64>,
    identity_residuals: Vec<f64>,
    seeds: Vec<usize>,
    template: DiscreteOperator,
}

impl BorderedFamily {
    pub fn samples(&self) -> &[Cx] {
        &self.samples
    }

    /// Number of added columns (the cokernel dimension `d″`).
    pub fn deficiency(&self) -> usize {
        self.deficiency
    }

    /// Number of added rows.
    pub fn kernel_dim(&self) -> usize {
        self.kernel_dim
    }

    pub fn profiles(&self) -> &[Profile] {
        &self.profiles
    }

    /// Added columns at `|λ| = 1`, as row values.
    pub fn k(&self) -> &CMat {
        &self.k
    }

    /// Added rows at `|λ| = 1`.
    pub fn t(&self) -> &CMat {
        &self.t
    }

    pub fn q(&self) -> CMat {
        CMat::zeros(self.kernel_dim, self.deficiency)
    }

    /// Condition estimate of the bordered matrix at every sample.
    pub fn conditions(&self) -> &[f64] {
        &self.conditions
    }

    /// Componentwise backward error of a probe solve at every sample.
    pub fn identity_residuals(&self) -> &[f64] {
        &self.identity_residuals
    }

    /// Indices of the samples whose cokernels determined the columns.
    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    /// Dilation order `m`.
    pub fn order(&self) -> usize {
        self.template.space().order()
    }

    /// Homogeneity degree `μ` of the blocks; equal to the order.
    pub fn degree(&self) -> usize {
        self.order()
    }

    pub fn template(&self) -> &DiscreteOperator {
        &self.template
    }

    /// The family member at `λ`.
    pub fn member(&self, lambda: Cx) -> DiscreteOperator {
        self.template.with_lambda(lambda)
    }
}

/// Dense bordered b-form `[[x^m(a - λ), x^m k], [t, 0]]` on the first `cols` columns of `op`.
pub(crate) fn bordered_bform(op: &DiscreteOperator, cols: usize, k: &CMat, t: &CMat) -> CMat {
    let full = op.matrix();
    let b = full.columns(0, cols);
    let (r, c) = b.shape();
    let dk = k.ncols();
    let dt = t.nrows();
    let mut m = CMat::zeros(r + dt, c + dk);
    m.view_mut((0, 0), (r, c)).copy_from(&b);
    let scale = op.row_scale();
    for j in 0..dk {
        for i in 0..r {
            m[(i, c + j)] = k[(i, j)] * scale[i];
        }
    }
    m.view_mut((r, 0), (dt, c)).copy_from(t);
    m
}

/// Solver for a bordered system together with the weights that make it an operator on `L²`.
pub struct BorderedSolve {
    pub(crate) lu: DualLu,
    matrix: CMat,
    pub(crate) row_scale: Vec<f64>,
    pub(crate) row_sqrt_weights: Vec<f64>,
    pub(crate) grid_sqrt_weights: Vec<f64>,
    pub(crate) embedding: CMat,
    pub(crate) k: CMat,
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) extra_rows: usize,
    pub(crate) extra_cols: usize,
}

impl BorderedSolve {
    pub fn new(op: &DiscreteOperator, k: &CMat, t: &CMat) -> Result<Self> {
        Self::on_columns(op, op.cols(), k, t)
    }

    /// Borders the restriction of `op` to its first `cols` columns.
    pub fn on_columns(op: &DiscreteOperator, cols: usize, k: &CMat, t: &CMat) -> Result<Self> {
        let m = bordered_bform(op, cols, k, t);
        if m.nrows() != m.ncols() {
            return Err(Error::Validation(vec![format!(
                "bordered matrix is {}x{}: added rows and columns do not balance the index",
                m.nrows(),
                m.ncols()
            )]));
        }
        let lu = DualLu::new(&m).ok_or_else(|| Error::IllConditioned {
            cond: f64::INFINITY,
            context: format!("bordered matrix singular at lambda = {}", op.lambda()),
        })?;
        Ok(BorderedSolve {
            lu,
            matrix: m,
            row_scale: op.row_scale().to_vec(),
            row_sqrt_weights: op.row_weights().iter().map(|w| w.sqrt()).collect(),
            grid_sqrt_weights: op.grid_weights().iter().map(|w| w.sqrt()).collect(),
            embedding: op.embedding().columns(0, cols).into_owned(),
            k: k.clone(),
            rows: op.rows(),
            cols,
            extra_rows: t.nrows(),
            extra_cols: k.ncols(),
        })
    }

    /// Solves `(a - λ) x + k c = f`, `t x = g` for A-form data.
    pub fn solve(&self, f: &CVec, g: &CVec) -> (CVec, CVec) {
        let mut rhs = CVec::zeros(self.rows + self.extra_rows);
        for i in 0..self.rows {
            rhs[i] = f[i] * self.row_scale[i];
        }
        rhs.rows_mut(self.rows, self.extra_rows).copy_from(g);
        let z = self.refined(&rhs);
        (z.rows(0, self.cols).into_owned(), z.rows(self.cols, self.extra_cols).into_owned())
    }

    /// Solves with several right-hand sides given in b-form (rows already multiplied by `x^m`).
    pub fn solve_bform(&self, rhs: &CMat) -> CMat {
        let x = self.lu.solve(rhs);
        let r = rhs - &self.matrix * &x;
        x + self.lu.solve(&r)
    }

    /// `M⁻¹ z` with one step of iterative refinement.
    ///
    /// The rows of the b-form span many orders of magnitude; the extra step
    /// restores a small componentwise backward error.
    fn refined(&self, z: &CVec) -> CVec {
        let x = self.lu.solve_vec(z);
        let r = z - &self.matrix * &x;
        x + self.lu.solve_vec(&r)
    }

    /// Solves `M* y = b` for the bordered b-form `M`.
    pub(crate) fn solve_adjoint(&self, b: &CVec) -> CVec {
        let y = self.lu.solve_adjoint_vec(b);
        let r = b - self.matrix.ad_mul(&y);
        y + self.lu.solve_adjoint_vec(&r)
    }

    /// `L²` operator norm of the functional given by the added solution coordinate `i`.
    pub fn added_coordinate_norm(&self, i: usize) -> f64 {
        let mut e = CVec::zeros(self.cols + self.extra_cols);
        e[self.cols + i] = Cx::new(1.0, 0.0);
        let y = self.solve_adjoint(&e);
        (0..self.rows).map(|r| (y[r] * self.row_scale[r] / self.row_sqrt_weights[r]).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Componentwise backward error `max_i |z - Mx|_i / (|M||x| + |z|)_i` of
    /// `x = M⁻¹z` for a seeded probe `z`.
    fn identity_residual(&self) -> f64 {
        let m = &self.matrix;
        let n = m.nrows();
        let z = CVec::from_fn(n, |i, _| {
            Cx::new(((i * 7919 + 13) % 101) as f64 / 101.0 - 0.5, ((i * 104729 + 7) % 97) as f64 / 97.0 - 0.5)
        });
        let x = self.refined(&z);
        let r = m * &x - &z;
        (0..n)
            .map(|i| {
                let scale: f64 =
                    m.row(i).iter().zip(x.iter()).map(|(a, b)| a.norm() * b.norm()).sum::<f64>() + z[i].norm();
                r[i].norm() / scale
            })
            .fold(0.0, f64::max)
    }

    /// Upper bound `√2·‖S‖` for the condition number of the bordered operator in
    /// graph-norm geometry, where `S` maps weighted data `(f̂, g)` to the
    /// graph coordinates of the solution and the added coordinates.
    pub fn condition(&self) -> f64 {
        let (r, dt, dk) = (self.rows, self.extra_rows, self.extra_cols);
        let apply = |v: &CVec| -> CVec {
            let f = CVec::from_fn(r, |i, _| v[i] / self.row_sqrt_weights[i]);
            let g = v.rows(r, dt).into_owned();
            let (x, c) = self.solve(&f, &g);
            let u = &self.embedding * &x;
            let kc = &self.k * &c;
            let n = u.len();
            let mut out = CVec::zeros(n + r + dk);
            for i in 0..n {
                out[i] = u[i] * self.grid_sqrt_weights[i];
            }
            for i in 0..r {
                out[n + i] = v[i] - kc[i] * self.row_sqrt_weights[i];
            }
            out.rows_mut(n + r, dk).copy_from(&c);
            out
        };
        let apply_adj = |w: &CVec| -> CVec {
            let n = self.embedding.nrows();
            let p = CVec::from_fn(n, |i, _| w[i] * self.grid_sqrt_weights[i]);
            let q = w.rows(n, r).into_owned();
            let rr = w.rows(n + r, dk).into_owned();
            let top = self.embedding.adjoint() * p;
            let qw = CVec::from_fn(r, |i, _| q[i] * self.row_sqrt_weights[i]);
            let bottom = rr - self.k.adjoint() * qw;
            let mut rhs = CVec::zeros(self.cols + dk);
            rhs.rows_mut(0, self.cols).copy_from(&top);
            rhs.rows_mut(self.cols, dk).copy_from(&bottom);
            let y = self.solve_adjoint(&rhs);
            let mut out = CVec::zeros(r + dt);
            for i in 0..r {
                out[i] = y[i] * self.row_scale[i] / self.row_sqrt_weights[i] + q[i];
            }
            out.rows_mut(r, dt).copy_from(&y.rows(r, dt));
            out
        };
        std::f64::consts::SQRT_2 * krylov_norm(apply, apply_adj, r + dt, 17, 200, 1e-6)
    }
}

/// Condition estimate of the bordered operator at one family member.
pub fn bordered_condition(op: &DiscreteOperator, k: &CMat, t: &CMat) -> Result<f64> {
    Ok(BorderedSolve::new(op, k, t)?.condition())
}

struct SeedData {
    /// Cokernel directions in weighted row coordinates.
    coker: CMat,
    /// Graph-orthonormal kernel directions as column coefficients.
    kernel: Vec<CVec>,
    /// Largest graph singular value.
    top: f64,
}

fn seed_data(op: &DiscreteOperator, tol: f64) -> SeedData {
    let frame = graph_frame(op);
    let top = frame.singular_values().first().copied().unwrap_or(0.0);
    let coker = left_null_space(&frame.operator, tol);
    let kernel = null_space(&frame.operator, tol);
    let kernel = (0..kernel.ncols()).map(|j| frame.coefficients(&kernel.column(j).into_owned())).collect();
    SeedData { coker, kernel, top }
}

fn candidates(op: &DiscreteOperator) -> Vec<Profile> {
    let depth = op.space().depth();
    let mut out = Vec::new();
    let mut center = -0.5;
    while center >= -0.5 * depth {
        for &width in &PROFILE_WIDTHS {
            for component in 0..op.dim() {
                out.push(Profile { center, width, component });
            }
        }
        center -= PROFILE_SPACING;
    }
    out
}

/// Greedy choice of `d` profiles whose weighted values are best transversal to
/// the cokernels of all seeds.
fn select_profiles(op: &DiscreteOperator, seeds: &[SeedData], d: usize) -> Vec<Profile> {
    let sqrt_w: Vec<f64> = op.row_weights().iter().map(|w| w.sqrt()).collect();
    let pool: Vec<(Profile, CVec)> = candidates(op)
        .into_iter()
        .map(|p| {
            let mut v = p.values(op);
            for (z, w) in v.iter_mut().zip(&sqrt_w) {
                *z *= *w;
            }
            let n = v.norm();
            (p, v / Cx::new(n, 0.0))
        })
        .collect();
    let projections: Vec<Vec<CVec>> =
        seeds.iter().map(|s| pool.iter().map(|(_, v)| s.coker.adjoint() * v).collect()).collect();
    let mut chosen: Vec<usize> = Vec::new();
    for _ in 0..d {
        let mut best = (f64::NEG_INFINITY, 0);
        for cand in 0..pool.len() {
            if chosen.contains(&cand) {
                continue;
            }
            let score = seeds
                .iter()
                .enumerate()
                .map(|(si, _)| {
                    let cols: Vec<CVec> =
                        chosen.iter().chain(std::iter::once(&cand)).map(|&c| projections[si][c].clone()).collect();
                    singular_values(&CMat::from_columns(&cols)).last().copied().unwrap_or(0.0)
                })
                .fold(f64::INFINITY, f64::min);
            if score > best.0 {
                best = (score, cand);
            }
        }
        chosen.push(best.1);
    }
    chosen.into_iter().map(|c| pool[c].0).collect()
}

/// Row values of the chosen profiles, orthonormalized in the weighted row inner product.
fn profile_columns(op: &DiscreteOperator, profiles: &[Profile]) -> CMat {
    if profiles.is_empty() {
        return CMat::zeros(op.rows(), 0);
    }
    let sqrt_w: Vec<f64> = op.row_weights().iter().map(|w| w.sqrt()).collect();
    let cols: Vec<CVec> = profiles
        .iter()
        .map(|p| {
            let mut v = p.values(op);
            for (z, w) in v.iter_mut().zip(&sqrt_w) {
                *z *= *w;
            }
            v
        })
        .collect();
    let mut k = orthonormalize(&CMat::from_columns(&cols), 1e-12);
    for (i, w) in sqrt_w.iter().enumerate() {
        k.row_mut(i).scale_mut(1.0 / w);
    }
    k
}

/// Rows pairing a function with the kernel functions in `L²`.
fn kernel_rows(op: &DiscreteOperator, kernel: &[CVec]) -> CMat {
    let gw = op.grid_weights();
    let mut t = CMat::zeros(kernel.len(), op.cols());
    for (i, x) in kernel.iter().enumerate() {
        let mut u = op.embedding() * x;
        for (z, w) in u.iter_mut().zip(&gw) {
            *z *= *w;
        }
        let functional = op.embedding().adjoint() * u;
        t.set_row(i, &functional.adjoint());
    }
    t
}

/// Kernel dimension of a family member read off from the corner block of the bordered
/// inverse, which is equivalent to the member itself.
fn corner_kernel_dim(solve: &BorderedSolve, rows: usize, threshold: f64) -> usize {
    let (dt, dk) = (solve.extra_rows, solve.extra_cols);
    if dt == 0 {
        return 0;
    }
    let mut corner = CMat::zeros(dk, dt);
    for i in 0..dt {
        let mut g = CVec::zeros(dt);
        g[i] = Cx::new(1.0, 0.0);
        let (_, c) = solve.solve(&CVec::zeros(rows), &g);
        corner.set_column(i, &c);
    }
    let rank = singular_values(&corner).iter().filter(|&&s| s > threshold).count();
    dt - rank
}

/// Borders the family `λ ↦ template(λ)` over `samples`.
///
/// Deficiencies are read off in graph geometry at a seed sample (the middle
/// one). Injective families are bordered by columns only, surjective ones by
/// rows only. Whenever a sample turns out badly conditioned it becomes an
/// additional seed and the profiles are reselected; a sample whose
/// deficiency differs from the seed's is reported as an index jump.
pub fn border_family(template: &DiscreteOperator, samples: &[Cx], tol: f64) -> Result<BorderedFamily> {
    if samples.is_empty() {
        return Err(Error::Validation(vec!["at least one arc sample is required".into()]));
    }
    let mid = samples.len() / 2;
    let first = seed_data(&template.with_lambda(samples[mid]), tol);
    let deficiency = first.coker.ncols();
    let kernel_dim = first.kernel.len();
    let t = kernel_rows(&template.with_lambda(samples[mid]), &first.kernel);
    let threshold = tol * first.top;
    let mut seeds = vec![mid];
    let mut data = vec![first];
    loop {
        let profiles = select_profiles(template, &data, deficiency);
        let k = profile_columns(template, &profiles);
        let mut conditions = Vec::with_capacity(samples.len());
        let mut identity_residuals = Vec::with_capacity(samples.len());
        let mut failed = None;
        for (idx, &lambda) in samples.iter().enumerate() {
            let member = template.with_lambda(lambda);
            let (cond, resid) = match BorderedSolve::new(&member, &k, &t) {
                Ok(s) => {
                    let found = corner_kernel_dim(&s, member.rows(), threshold);
                    if found != kernel_dim {
                        return Err(Error::IndexJump { sample: idx, expected: kernel_dim, found });
                    }
                    (s.condition(), s.identity_residual())
                }
                Err(_) => (f64::INFINITY, f64::INFINITY),
            };
            conditions.push(cond);
            identity_residuals.push(resid);
            if failed.is_none() && !(cond < COND_MAX && resid <= IDENTITY_TOL) {
                failed = Some((idx, cond));
            }
        }
        let Some((idx, cond)) = failed else {
            return Ok(BorderedFamily {
                samples: samples.to_vec(),
                deficiency,
                kernel_dim,
                profiles,
                k,
                t,
                conditions,
                identity_residuals,
                seeds,
                template: template.clone(),
            });
        };
        let here = seed_data(&template.with_lambda(samples[idx]), tol);
        if here.coker.ncols() != deficiency || here.kernel.len() != kernel_dim {
            let (expected, found) = if here.coker.ncols() != deficiency {
                (deficiency, here.coker.ncols())
            } else {
                (kernel_dim, here.kernel.len())
            };
            return Err(Error::IndexJump { sample: idx, expected, found });
        }
        if seeds.len() >= MAX_SEEDS || kernel_dim > 0 {
            return Err(Error::IllConditioned {
                cond,
                context: format!("bordered matrix at arc sample {idx} (lambda = {})", samples[idx]),
            });
        }
        seeds.push(idx);
        data.push(here);
    }
}

/// Bordered blocks at a point of the sector, obtained by homogeneous extension.
#[derive(Clone, Debug)]
pub struct BorderedBlocks {
    pub lambda: Cx,
    /// Grid-compatible dilation factor `ρ` actually used.
    pub rho: f64,
    /// Dilation in grid steps.
    pub steps: isize,
    /// Grid-core block of `a(λ)` in A-form.
    pub a: CMat,
    pub k: CMat,
    pub t: CMat,
    pub q: CMat,
    pub warning: Option<String>,
}

/// Translates a node-major block: entry `(i, p)` becomes entry `(i + steps, p + steps)` of `m`.
fn translate(m: &CMat, steps: isize, dim: usize, shift_rows: bool, shift_cols: bool) -> CMat {
    let (r, c) = m.shape();
    let s = steps * dim as isize;
    let mut out = CMat::zeros(r, c);
    for i in 0..r {
        let si = if shift_rows { i as isize + s } else { i as isize };
        if si < 0 || si >= r as isize {
            continue;
        }
        for p in 0..c {
            let sp = if shift_cols { p as isize + s } else { p as isize };
            if sp < 0 || sp >= c as isize {
                continue;
            }
            out[(i, p)] = m[(si as usize, sp as usize)];
        }
    }
    out
}

fn grid_core_cols(op: &DiscreteOperator) -> usize {
    (op.space().len() - 2 * op.first_core_node()) * op.dim()
}

/// Blocks at `λ` from the unit-arc blocks at `λ/|λ|`.
///
/// With `ρ = |λ|^{1/m}` snapped to a whole number of grid steps, the blocks
/// are `ρ^μ diag(κ_ρ, 1) [[a, k], [t, q]] diag(κ_ρ⁻¹, 1)`, where `κ_ρ`
/// translates grid values by `log ρ`. Columns that are not nodal unknowns
/// carry no dilation action and are left out of `a`.
pub fn extend_homogeneous(bf: &BorderedFamily, lambda: Cx) -> Result<BorderedBlocks> {
    let (steps, rho, warning) = snap(bf, lambda)?;
    let unit = lambda / lambda.norm();
    let member = bf.member(unit);
    let core = grid_core_cols(&member);
    let a1 = member.a_form().columns(0, core).into_owned();
    Ok(blocks_from(bf, &a1, lambda, steps, rho, warning))
}

/// Column and row blocks only; cheaper than [`extend_homogeneous`].
pub fn extend_columns_rows(bf: &BorderedFamily, lambda: Cx) -> Result<(CMat, CMat, Option<String>)> {
    let (steps, rho, warning) = snap(bf, lambda)?;
    let scale = rho.powi(bf.degree() as i32);
    let dim = bf.template.dim();
    let k = translate(&bf.k, steps, dim, true, false) * Cx::new(scale, 0.0);
    let t = translate_rows(bf, steps) * Cx::new(scale, 0.0);
    Ok((k, t, warning))
}

fn translate_rows(bf: &BorderedFamily, steps: isize) -> CMat {
    let core = grid_core_cols(&bf.template);
    let mut t = bf.t.clone();
    if t.nrows() > 0 {
        let shifted = translate(&bf.t.columns(0, core).into_owned(), steps, bf.template.dim(), false, true);
        t.view_mut((0, 0), (t.nrows(), core)).copy_from(&shifted);
    }
    t
}

fn blocks_from(
    bf: &BorderedFamily,
    a1: &CMat,
    lambda: Cx,
    steps: isize,
    rho: f64,
    warning: Option<String>,
) -> BorderedBlocks {
    let scale = Cx::new(rho.powi(bf.degree() as i32), 0.0);
    let dim = bf.template.dim();
    BorderedBlocks {
        lambda,
        rho,
        steps,
        a: translate(a1, steps, dim, true, true) * scale,
        k: translate(&bf.k, steps, dim, true, false) * scale,
        t: translate_rows(bf, steps) * scale,
        q: bf.q() * scale,
        warning,
    }
}

/// Grid steps, snapped dilation factor and a warning when `|λ|^{1/m}` had to be snapped.
fn snap(bf: &BorderedFamily, lambda: Cx) -> Result<(isize, f64, Option<String>)> {
    let r = lambda.norm();
    if r == 0.0 || !r.is_finite() {
        return Err(Error::Validation(vec![format!("lambda = {lambda} must be nonzero and finite")]));
    }
    let m = bf.order() as f64;
    let h = bf.template.space().step();
    let exact = r.ln() / m / h;
    let steps = exact.round() as isize;
    let snapped = (m * steps as f64 * h).exp();
    let warning = ((exact - steps as f64).abs() > 1e-9 * exact.abs().max(1.0))
        .then(|| format!("|lambda| = {r} is not grid compatible; snapped to {snapped}"));
    Ok((steps, (steps as f64 * h).exp(), warning))
}

/// Relative deviation from `blocks(ρ^m λ) = ρ^μ diag(κ_ρ,1) blocks(λ) diag(κ_ρ⁻¹,1)`
/// for `ρ = e^{extra·h}`, over the entries where both sides are defined.
pub fn homogeneity_relation_residual(bf: &BorderedFamily, lambda: Cx, extra: isize) -> Result<f64> {
    let m = bf.order() as f64;
    let h = bf.template.space().step();
    let base = extend_homogeneous(bf, lambda)?;
    let moved = extend_homogeneous(bf, lambda * (m * extra as f64 * h).exp())?;
    let rho_mu = Cx::new((extra as f64 * h * bf.degree() as f64).exp(), 0.0);
    let dim = bf.template.dim();
    let s = extra * dim as isize;
    // rows or columns whose translate leaves the grid are undefined on one side
    let inside = |i: usize, len: usize| {
        let a = i as isize + s;
        let b = a + base.steps * dim as isize;
        a >= 0 && a < len as isize && b >= 0 && b < len as isize
    };
    let mut num = 0.0;
    let mut den = 0.0;
    let conj = |blk: &CMat, rows: bool, cols: bool| translate(blk, extra, dim, rows, cols) * rho_mu;
    let pairs = [
        (moved.a.clone(), conj(&base.a, true, true), true, true),
        (moved.k.clone(), conj(&base.k, true, false), true, false),
    ];
    for (lhs, rhs, rows, cols) in pairs.iter() {
        for i in 0..lhs.nrows() {
            if *rows && !inside(i, lhs.nrows()) {
                continue;
            }
            for p in 0..lhs.ncols() {
                if *cols && !inside(p, lhs.ncols()) {
                    continue;
                }
                num += (lhs[(i, p)] - rhs[(i, p)]).norm_sqr();
                den += lhs[(i, p)].norm_sqr();
            }
        }
    }
    let core = grid_core_cols(&bf.template);
    for i in 0..moved.t.nrows() {
        for p in 0..core {
            if !inside(p, core) {
                continue;
            }
            let rhs = translate_rows_single(&base.t, i, p, s, core) * rho_mu;
            num += (moved.t[(i, p)] - rhs).norm_sqr();
            den += moved.t[(i, p)].norm_sqr();
        }
    }
    Ok(if den == 0.0 { 0.0 } else { (num / den).sqrt() })
}

fn translate_rows_single(t: &CMat, i: usize, p: usize, s: isize, core: usize) -> Cx {
    let q = p as isize + s;
    if q < 0 || q >= core as isize {
        Cx::new(0.0, 0.0)
    } else {
        t[(i, q as usize)]
    }
}
