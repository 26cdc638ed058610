#![allow(dead_code)]

use domains::SingularFunction;
use mellin_core::{c64, ConeProblem};

pub fn cl2(l: f64) -> ConeProblem {
    ConeProblem::scalar("cl2", 2, 1, &[(0, vec![c64(l * l, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

pub fn pb(b: f64) -> ConeProblem {
    ConeProblem::scalar("pb", 2, 2, &[(0, vec![c64(0.25, 0.0), c64(b, 0.0)]), (2, vec![c64(1.0, 0.0)])]).unwrap()
}

/// The constant function, spanning the Friedrichs extension of the 2D cone Laplacian.
pub fn constant() -> SingularFunction {
    SingularFunction::scalar(c64(0.0, 0.0), &[c64(1.0, 0.0)])
}
