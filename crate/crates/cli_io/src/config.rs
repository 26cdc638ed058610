use mellin_core::{Error, Result};
use serde::Serialize;
use std::path::PathBuf;

/// Default depth `T` of the log grid.
pub const DEFAULT_DEPTH: f64 = 20.0;
/// Default number of grid points `G`.
pub const DEFAULT_POINTS: usize = 512;
/// Minimum number of samples along a ray.
pub const MIN_SAMPLES: usize = 8;

/// Validated parameters of one invocation, echoed into every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub problem: PathBuf,
    pub extension: Option<PathBuf>,
    pub ray: Option<RayConfig>,
    pub grid: GridConfig,
    pub tol: f64,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GridConfig {
    pub depth: f64,
    pub points: usize,
}

/// Ray or sector parameters; angles in degrees, normalized to `[0, 360)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RayConfig {
    pub theta0_deg: f64,
    pub aperture_deg: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub samples: usize,
}

pub fn normalize_degrees(a: f64) -> f64 {
    let r = a.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

impl RayConfig {
    pub fn new(theta0_deg: f64, aperture_deg: f64, r_min: f64, r_max: f64, samples: usize) -> Result<Self> {
        let mut errs = Vec::new();
        if !theta0_deg.is_finite() {
            errs.push(format!("ray angle must be finite, got {theta0_deg}"));
        }
        if !(aperture_deg > 0.0 && aperture_deg < 360.0) {
            errs.push(format!("aperture must lie in (0, 360) degrees, got {aperture_deg}"));
        }
        if !(r_min > 0.0 && r_min.is_finite()) {
            errs.push(format!("--rmin must be positive, got {r_min}"));
        }
        if !(r_min < r_max && r_max.is_finite()) {
            errs.push(format!("--rmin must be smaller than --rmax, got {r_min} and {r_max}"));
        }
        if samples < MIN_SAMPLES {
            errs.push(format!("--samples must be at least {MIN_SAMPLES}, got {samples}"));
        }
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        Ok(RayConfig { theta0_deg: normalize_degrees(theta0_deg), aperture_deg, r_min, r_max, samples })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0_deg.to_radians()
    }

    pub fn aperture(&self) -> f64 {
        self.aperture_deg.to_radians()
    }
}

impl GridConfig {
    pub fn new(depth: f64, points: usize) -> Result<Self> {
        let mut errs = Vec::new();
        if !(depth > 0.0 && depth.is_finite()) {
            errs.push(format!("grid depth -T must be positive, got {depth}"));
        }
        if points < 16 {
            errs.push(format!("grid size -G must be at least 16, got {points}"));
        }
        if errs.is_empty() {
            Ok(GridConfig { depth, points })
        } else {
            Err(Error::Validation(errs))
        }
    }
}
