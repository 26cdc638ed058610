//! Numerical experiments on rays and sectors of the spectral plane.
//!
//! Each probe takes assembled operators or a problem plus a grid, runs its
//! samples in parallel and returns a serializable report with the raw
//! samples and any fitted power law. Sample order and random probes depend
//! only on the inputs and the seed.

mod csym;
mod ffwedge;
pub mod fit;
mod ktilde;
mod ladder;
mod scan;
mod sector;
mod smax;
mod sweep;
mod tau;

pub use csym::{csymbol_ray_check, SymbolRayReport, SymbolViolation};
pub use ffwedge::{f_vs_fwedge, FWedgeReport, FWedgeSample};
pub use fit::PowerFit;
pub use ktilde::{ktilde_estimates, KtildeReport, KtildeSample};
pub use ladder::{relative_index_ladder, IndexLadder, LadderRow};
pub use scan::{bg_spectrum_scan, CellClass, ScanCell, ScanGrid, SectorScan};
pub use sector::{angular_distance, normalize_angle, Sector};
pub use smax::{smax_condition_check, SmaxReport, SmaxSample};
pub use sweep::{
    direct_smallest_singular_value, eigenvalues_on_ray, minimal_growth_sweep, ExcludedSample, RaySweepReport,
    SweepConfig, SweepSample, FLAG_RATIO,
};
pub use tau::{a_tau_convergence, TauReport};
