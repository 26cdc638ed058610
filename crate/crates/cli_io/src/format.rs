use domains::SingularFunction;
use mellin_core::{CVec, Cx};

const ZERO: f64 = 1e-12;

/// Shortest decimal with at most ten digits after the point; tiny values print as 0.
pub fn fmt_real(v: f64) -> String {
    if v.abs() < ZERO {
        return "0".to_string();
    }
    let s = format!("{v:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// `a+bi` with both parts always shown.
pub fn fmt_cx(z: Cx) -> String {
    let im = if z.im.abs() < ZERO { 0.0 } else { z.im };
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{}{sign}{}i", fmt_real(z.re), fmt_real(im.abs()))
}

/// A real number when the imaginary part vanishes, `(a+bi)` otherwise.
fn fmt_scalar(z: Cx) -> String {
    if z.im.abs() < ZERO * z.norm().max(1.0) {
        fmt_real(z.re)
    } else {
        format!("({})", fmt_cx(z))
    }
}

/// `x^p` for the power `p = iσ` carried by the exponent `σ`.
pub fn fmt_power(sigma: Cx) -> String {
    // x^{iσ} = x^{-Im σ + i Re σ}
    let p = Cx::new(0.0, 1.0) * sigma;
    if p.im.abs() < ZERO {
        format!("x^{}", fmt_real(p.re))
    } else {
        format!("x^({})", fmt_cx(p))
    }
}

/// Coefficient vector as `[a, b, …]`.
pub fn fmt_vector(c: &CVec) -> String {
    format!("[{}]", c.iter().map(|z| fmt_scalar(*z)).collect::<Vec<_>>().join(", "))
}

/// One row per nonzero `log^k x · x^{iσ}` coefficient: exponent, power, log-degree `k`, coefficient vector.
pub fn term_table(f: &SingularFunction) -> Vec<[String; 4]> {
    let mut rows = Vec::new();
    for t in f.terms() {
        for (k, c) in t.coeffs.iter().enumerate() {
            if c.iter().all(|z| z.norm() < ZERO) {
                continue;
            }
            rows.push([fmt_cx(t.sigma), fmt_power(t.sigma), k.to_string(), fmt_vector(c)]);
        }
    }
    rows
}

/// Human-readable `Σ (c₀ + c₁ log x + …) x^p`.
pub fn fmt_singular(f: &SingularFunction) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let scalar = f.dim() == 1;
    let mut parts = Vec::new();
    for t in f.terms() {
        let mut pieces = Vec::new();
        for (k, c) in t.coeffs.iter().enumerate() {
            if c.iter().all(|z| z.norm() < ZERO) {
                continue;
            }
            let coeff = if scalar { fmt_scalar(c[0]) } else { fmt_vector(c) };
            let log = match k {
                0 => String::new(),
                1 => "log x".to_string(),
                _ => format!("log^{k} x"),
            };
            pieces.push(match (k, coeff.as_str()) {
                (0, _) => coeff,
                (_, "1") => log,
                (_, "-1") => format!("-{log}"),
                _ => format!("{coeff} {log}"),
            });
        }
        let power = fmt_power(t.sigma);
        let has_log = t.coeffs.iter().skip(1).any(|c| c.iter().any(|z| z.norm() >= ZERO));
        let body = match pieces.as_slice() {
            [] => continue,
            [one] if !has_log && one == "1" => power,
            [one] if !has_log => format!("{one} {power}"),
            _ => format!("({}) {power}", join_signed(&pieces)),
        };
        parts.push(body);
    }
    join_signed(&parts)
}

fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mellin_core::c64;

    #[test]
    fn numbers() {
        assert_eq!(fmt_real(0.5), "0.5");
        assert_eq!(fmt_real(-2.0), "-2");
        assert_eq!(fmt_real(1e-15), "0");
        assert_eq!(fmt_cx(c64(0.0, -0.5)), "0-0.5i");
        assert_eq!(fmt_cx(c64(0.0, 0.0)), "0+0i");
    }

    #[test]
    fn perturbed_expansion() {
        let f = SingularFunction::scalar(c64(0.0, 0.5), &[c64(1.0, 0.0)])
            .add(&SingularFunction::scalar(c64(0.0, -0.5), &[c64(-1.0, 0.0), c64(1.0, 0.0)]));
        assert_eq!(fmt_singular(&f), "x^-0.5 + (-1 + log x) x^0.5");
    }

    #[test]
    fn constant_and_log() {
        let f = SingularFunction::scalar(c64(0.0, 0.0), &[c64(0.0, 0.0), c64(2.0, 0.0)]);
        assert_eq!(fmt_singular(&f), "(2 log x) x^0");
        let g = SingularFunction::scalar(c64(0.0, 0.0), &[c64(1.0, 0.0)]);
        assert_eq!(fmt_singular(&g), "x^0");
    }
}
