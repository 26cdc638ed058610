use mellin_core::linalg::linear_fit;
use serde::Serialize;

/// Least-squares slope of `log y` against `log x`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerFit {
    pub exponent: f64,
    /// `log` of the prefactor.
    pub log_constant: f64,
    pub points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

/// Power-law fit through the positive, finite pairs; `None` with fewer than two.
pub fn power_fit(x: &[f64], y: &[f64]) -> Option<PowerFit> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .unzip();
    if lx.len() < 2 || lx.iter().all(|v| *v == lx[0]) {
        return None;
    }
    let (slope, intercept) = linear_fit(&lx, &ly);
    Some(PowerFit {
        exponent: slope,
        log_constant: intercept,
        points: lx.len(),
        x_min: lx.iter().cloned().fold(f64::INFINITY, f64::min).exp(),
        x_max: lx.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp(),
    })
}

/// Power-law fit restricted to `x ≥ max(x)/10`.
pub fn top_decade_fit(x: &[f64], y: &[f64]) -> Option<PowerFit> {
    let top = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        x.iter().zip(y).filter(|(a, _)| **a >= top / 10.0).map(|(a, b)| (*a, *b)).unzip();
    power_fit(&xs, &ys)
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp()).collect(),
    }
}

pub(crate) fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.iter().cloned().filter(|x| x.is_finite()).collect();
    if s.is_empty() {
        return f64::NAN;
    }
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
