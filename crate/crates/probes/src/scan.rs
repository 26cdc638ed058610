use crate::sector::{angular_distance, Sector};
use discrete::{assemble, eigenvalues_near, ker_coker, DiscreteSpace, ExtensionSpec, Side};
use mellin_core::{ConeProblem, Cx, Error, Result};
use rayon::prelude::*;
use serde::Serialize;

/// Polar grid over a sector: rays times radial bands.
#[derive(Clone, Debug, Serialize)]
pub struct ScanGrid {
    pub sector: Sector,
    pub rays: usize,
    /// Increasing band edges in `|λ|`; consecutive pairs bound the cells.
    pub radii: Vec<f64>,
    /// Relative rank threshold for the injectivity and surjectivity decisions.
    pub tol: f64,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.rays == 0 {
            errs.push("a scan needs at least one ray".to_string());
        }
        if self.radii.len() < 2 {
            errs.push("a scan needs at least two band edges".to_string());
        }
        if self.radii.iter().any(|r| !(*r > 0.0 && r.is_finite())) {
            errs.push("band edges must be positive and finite".to_string());
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            errs.push("band edges must increase".to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    fn half_width(&self) -> f64 {
        if self.rays > 1 {
            self.sector.aperture / (2.0 * (self.rays - 1) as f64)
        } else {
            self.sector.aperture / 2.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellClass {
    #[serde(rename = "injective-and-surjective")]
    Good,
    #[serde(rename = "deficient")]
    Deficient,
    #[serde(rename = "ill-conditioned")]
    IllConditioned,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanCell {
    pub ray: usize,
    pub angle: f64,
    pub r_lo: f64,
    pub r_hi: f64,
    /// Smallest graph singular value of the minimal wedge operator at the cell center.
    pub minimal_smin: f64,
    /// Smallest graph singular value of the maximal wedge operator at the cell center.
    pub maximal_smin: f64,
    pub injective: bool,
    pub surjective: bool,
    /// Eigenvalues of the wedge realization lying in the cell, as `[re, im]`.
    pub eigenvalues: Vec<[f64; 2]>,
    pub class: CellClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct SectorScan {
    pub grid: ScanGrid,
    pub cells: Vec<ScanCell>,
    /// Per ray: every cell on it received the same class.
    pub ray_consistent: Vec<bool>,
}

impl SectorScan {
    pub fn all_good(&self) -> bool {
        self.cells.iter().all(|c| c.class == CellClass::Good)
    }

    pub fn is_ray_consistent(&self) -> bool {
        self.ray_consistent.iter().all(|&b| b)
    }

    /// Cells not classified good.
    pub fn flagged(&self) -> impl Iterator<Item = &ScanCell> {
        self.cells.iter().filter(|c| c.class != CellClass::Good)
    }
}

/// Classifies the cells of a polar grid for the model operator.
///
/// A cell is deficient when the minimal wedge operator fails to be injective,
/// the maximal one fails to be surjective, or the wedge realization given by
/// `wedge_data` has an eigenvalue inside the cell. It is ill-conditioned when a
/// rank decision is ill-separated.
pub fn bg_spectrum_scan(
    problem: &ConeProblem,
    wedge_data: &ExtensionSpec,
    space: &DiscreteSpace,
    grid: &ScanGrid,
) -> Result<SectorScan> {
    grid.validate()?;
    let zero = Cx::new(0.0, 0.0);
    let minimal = assemble(problem, space, &ExtensionSpec::minimal(), zero, Side::Wedge)?;
    let maximal = assemble(problem, space, &ExtensionSpec::maximal(), zero, Side::Wedge)?;
    let realization = assemble(problem, space, wedge_data, zero, Side::Wedge)?;
    let square = realization.rows() == realization.cols();
    let half = grid.half_width();
    let angles = grid.sector.rays(grid.rays);
    let bands = grid.radii.len() - 1;
    let jobs: Vec<(usize, usize)> = (0..angles.len()).flat_map(|j| (0..bands).map(move |b| (j, b))).collect();
    let cells = jobs
        .par_iter()
        .map(|&(j, b)| {
            let (r_lo, r_hi) = (grid.radii[b], grid.radii[b + 1]);
            let center = Cx::from_polar((r_lo * r_hi).sqrt(), angles[j]);
            let kmin = ker_coker(&minimal.with_lambda(center), grid.tol);
            let kmax = ker_coker(&maximal.with_lambda(center), grid.tol);
            let in_cell = |z: &Cx| {
                let r = z.norm();
                r >= r_lo && r <= r_hi && angular_distance(z.arg(), angles[j]) <= half
            };
            let eigenvalues = if square {
                match eigenvalues_near(&realization, center, 4) {
                    Ok(ev) => ev.into_iter().filter(in_cell).map(|z| [z.re, z.im]).collect(),
                    Err(Error::InSpectrum(z)) => vec![[z.re, z.im]],
                    Err(e) => return Err(e),
                }
            } else {
                Vec::new()
            };
            let injective = kmin.dim_ker == 0;
            let surjective = kmax.dim_coker == 0;
            let class = if !injective || !surjective || !eigenvalues.is_empty() {
                CellClass::Deficient
            } else if kmin.ill_separated || kmax.ill_separated {
                CellClass::IllConditioned
            } else {
                CellClass::Good
            };
            Ok(ScanCell {
                ray: j,
                angle: angles[j],
                r_lo,
                r_hi,
                minimal_smin: kmin.smallest(),
                maximal_smin: kmax.smallest(),
                injective,
                surjective,
                eigenvalues,
                class,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ray_consistent = (0..angles.len())
        .map(|j| {
            let mut classes = cells.iter().filter(|c| c.ray == j).map(|c| c.class);
            let first = classes.next();
            classes.all(|c| Some(c) == first)
        })
        .collect();
    Ok(SectorScan { grid: grid.clone(), cells, ray_consistent })
}
