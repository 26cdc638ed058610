use crate::cutoff::blend_weight;
use mellin_core::{CMat, ConeProblem, Cx, Error, Result};

/// Radial coefficients `a_k(x)` of a cone operator, sampled at `x = e^t`.
pub trait CoefficientField {
    fn order(&self) -> usize;
    fn dim(&self) -> usize;
    /// `a_k(e^t)`.
    fn coefficient(&self, k: usize, t: f64) -> CMat;
    /// The problem whose Taylor expansion at `x = 0` governs the singular functions.
    fn tip_problem(&self) -> ConeProblem;
    /// The same field with coefficients frozen at the tip.
    fn frozen(&self) -> ConeProblem {
        self.tip_problem().frozen()
    }
}

impl CoefficientField for ConeProblem {
    fn order(&self) -> usize {
        ConeProblem::order(self)
    }

    fn dim(&self) -> usize {
        ConeProblem::dim(self)
    }

    fn coefficient(&self, k: usize, t: f64) -> CMat {
        self.coefficient_at(k, Cx::new(t.exp(), 0.0))
    }

    fn tip_problem(&self) -> ConeProblem {
        self.clone()
    }
}

/// `A_τ = ω_τ A_∧ + (1 - ω_τ) A`: frozen coefficients near the tip, the full ones from `x = τ` on.
#[derive(Clone, Debug)]
pub struct TauProblem {
    problem: ConeProblem,
    tau: f64,
}

/// Blends the problem with its frozen-coefficient model below `x = τ`.
pub fn a_tau(problem: &ConeProblem, tau: f64) -> Result<TauProblem> {
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::Validation(vec![format!(
            "blend radius must lie in (0, 1), the range where the coefficients are given; got {tau}"
        )]));
    }
    Ok(TauProblem { problem: problem.clone(), tau })
}

impl TauProblem {
    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn problem(&self) -> &ConeProblem {
        &self.problem
    }
}

impl CoefficientField for TauProblem {
    fn order(&self) -> usize {
        self.problem.order()
    }

    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn coefficient(&self, k: usize, t: f64) -> CMat {
        let x = t.exp();
        let w = blend_weight(x, self.tau);
        let full = self.problem.coefficient_at(k, Cx::new(x, 0.0));
        if w == 0.0 {
            return full;
        }
        let model = self.problem.coeff(k, 0);
        &full + (model - &full) * Cx::new(w, 0.0)
    }

    /// Near the tip `A_τ` coincides with the model operator.
    fn tip_problem(&self) -> ConeProblem {
        self.problem.frozen()
    }
}
