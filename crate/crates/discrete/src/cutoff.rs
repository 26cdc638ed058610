use mellin_core::jet::Jet;
use mellin_core::Cx;

/// Smooth step `χ(t) = ½ erfc((t - center)/width)` in `t = log x`:
/// equal to one far to the left, zero far to the right.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogCutoff {
    pub center: f64,
    pub width: f64,
}

/// Arguments of erfc beyond this are zero in double precision.
const TAIL: f64 = 6.0;

impl LogCutoff {
    /// Cut-off equal to one near the tip and vanishing (to rounding) from `x = radius` on.
    pub fn for_radius(radius: f64) -> Self {
        let width = 0.5;
        LogCutoff { center: radius.ln() - TAIL * width, width }
    }

    /// Cut-off supported in the first few units of the far end `t = -depth`.
    pub fn far_end(depth: f64) -> Self {
        let width = 0.5;
        LogCutoff { center: -depth + TAIL * width, width }
    }

    pub fn value(&self, t: f64) -> f64 {
        0.5 * libm::erfc((t - self.center) / self.width)
    }

    /// Taylor jet of the cut-off at `t` through `order`.
    pub fn jet(&self, t: f64, order: usize) -> Jet {
        let z = Jet::variable(t - self.center, order).scale(Cx::new(1.0 / self.width, 0.0));
        let gauss = (&z * &z).scale(Cx::new(-1.0, 0.0)).exp();
        let slope = gauss.scale(Cx::new(-1.0 / (self.width * std::f64::consts::PI.sqrt()), 0.0));
        slope.integrate(Cx::new(self.value(t), 0.0))
    }
}

/// Smooth bump in `x`: one on `x ≤ τ/2`, zero on `x ≥ τ`, built from `e^{-1/s}`.
pub fn blend_weight(x: f64, tau: f64) -> f64 {
    let y = (x - 0.5 * tau) / (0.5 * tau);
    if y <= 0.0 {
        return 1.0;
    }
    if y >= 1.0 {
        return 0.0;
    }
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = f(1.0 - y);
    a / (a + f(y))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_limits() {
        let c = LogCutoff::for_radius(1.0);
        assert!(c.value(0.0) < 1e-16);
        assert!((c.value(-10.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let c = LogCutoff::for_radius(0.8);
        let t = c.center + 0.3;
        let j = c.jet(t, 3);
        let h = 1e-4;
        let d1 = (c.value(t + h) - c.value(t - h)) / (2.0 * h);
        let d2 = (c.value(t + h) - 2.0 * c.value(t) + c.value(t - h)) / (h * h);
        assert!((j.derivative(1).re - d1).abs() < 1e-7);
        assert!((j.derivative(2).re - d2).abs() < 1e-5);
    }

    #[test]
    fn blend_shape() {
        assert_eq!(blend_weight(0.04, 0.1), 1.0);
        assert_eq!(blend_weight(0.1, 0.1), 0.0);
        let v = blend_weight(0.075, 0.1);
        assert!((v - 0.5).abs() < 1e-12);
    }
}
