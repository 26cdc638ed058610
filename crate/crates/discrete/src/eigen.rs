use crate::assemble::DiscreteOperator;
use mellin_core::{CMat, CVec, Cx, Error, Result};
use nalgebra::{Schur, LU};

/// Eigenvalues of a square discrete realization closest to `shift`.
///
/// Shift-and-invert Arnoldi on `(K - s M)⁻¹ M` for the b-form pencil `(K, M)`;
/// Ritz values `μ` map back to `λ = s + 1/μ`.
pub fn eigenvalues_near(op: &DiscreteOperator, shift: Cx, count: usize) -> Result<Vec<Cx>> {
    let n = op.cols();
    if op.rows() != n {
        return Err(Error::Validation(vec![format!("eigenvalues need a square realization, got {}x{}", op.rows(), n)]));
    }
    let lu = LU::new(op.with_lambda(shift).matrix());
    if !lu.is_invertible() {
        return Err(Error::InSpectrum(shift));
    }
    let mass = op.mass();
    let steps = (2 * count + 20).min(n);
    let mut basis: Vec<CVec> = Vec::with_capacity(steps + 1);
    let mut hess = CMat::zeros(steps + 1, steps);
    let mut v = CVec::from_fn(n, |i, _| Cx::new(1.0 + (i % 7) as f64 * 0.1, 0.3 * ((i % 5) as f64 - 2.0)));
    v /= Cx::new(v.norm(), 0.0);
    basis.push(v);
    let mut k_used = steps;
    for k in 0..steps {
        let mut w = lu.solve(&(mass * &basis[k])).ok_or_else(|| Error::Numerical("shifted solve failed".into()))?;
        for _ in 0..2 {
            for (i, b) in basis.iter().enumerate() {
                let h = b.dotc(&w);
                hess[(i, k)] += h;
                w -= b * h;
            }
        }
        let nw = w.norm();
        hess[(k + 1, k)] = Cx::new(nw, 0.0);
        if nw < 1e-13 {
            k_used = k + 1;
            break;
        }
        basis.push(w / Cx::new(nw, 0.0));
    }
    let h = hess.view((0, 0), (k_used, k_used)).into_owned();
    let mu = Schur::new(h)
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Hessenberg eigenvalues did not converge".into()))?;
    let mut out: Vec<Cx> = mu.iter().filter(|z| z.norm() > 1e-14).map(|z| shift + Cx::new(1.0, 0.0) / z).collect();
    out.sort_by(|a, b| (a - shift).norm().partial_cmp(&(b - shift).norm()).unwrap());
    out.truncate(count);
    Ok(out)
}
