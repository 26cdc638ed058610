use mellin_core::{Cx, Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Closed sector `{λ ≠ 0 : |arg λ - center| ≤ aperture/2}` of the spectral plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Sector {
    /// Direction of the bisecting ray, radians.
    pub center: f64,
    /// Full opening angle, radians.
    pub aperture: f64,
}

const ANGLE_SLACK: f64 = 1e-12;

impl Sector {
    pub fn new(center: f64, aperture: f64) -> Result<Self> {
        let mut errs = Vec::new();
        if !center.is_finite() {
            errs.push(format!("sector center must be finite, got {center}"));
        }
        if !(aperture > 0.0 && aperture < 2.0 * PI) {
            errs.push(format!("sector aperture must lie in (0, 2π), got {aperture}"));
        }
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        Ok(Sector { center: normalize_angle(center), aperture })
    }

    pub fn contains(&self, z: Cx) -> bool {
        z != Cx::new(0.0, 0.0) && angular_distance(z.arg(), self.center) <= self.aperture / 2.0 + ANGLE_SLACK
    }

    /// `n` equally spaced ray directions covering the sector, edges included.
    pub fn rays(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.center],
            _ => (0..n)
                .map(|i| normalize_angle(self.center - self.aperture / 2.0 + self.aperture * i as f64 / (n - 1) as f64))
                .collect(),
        }
    }
}

/// Angle in `[0, 2π)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Distance between two directions on the circle, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    d.min(2.0 * PI - d)
}
