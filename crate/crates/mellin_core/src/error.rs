use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the symbolic and numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("leading coefficient A_{{m,0}} is singular: operator is not c-elliptic at the tip")]
    NotCElliptic,

    #[error("Laurent verification failed at {center}: residual {residual:.3e} exceeds {tol:.1e}")]
    LaurentVerificationFailed { center: Complex64, residual: f64, tol: f64 },

    #[error("minimal domain not of simple form: boundary spectrum meets the strip lines at {0:?}")]
    DminNonSimple(Vec<Complex64>),

    #[error("singular function must carry a single exponent, found {0}")]
    MultiExponent(usize),

    #[error("exponent {0} is not a point of the strip spectrum")]
    ExponentNotInStrip(Complex64),

    #[error("ambiguous attribution: {0}")]
    AmbiguousAttribution(String),

    #[error("function is not a representative of the maximal domain: {0}")]
    NotInMaximalDomain(String),

    #[error("enrichment function has exponent {0} outside the open strip")]
    OutsideStrip(Complex64),

    #[error("dilation factor {rho} is not grid compatible; nearest compatible value is {nearest}")]
    GridIncompatible { rho: f64, nearest: f64 },

    #[error("index jump on arc: deficiency {found} at sample {sample}, expected {expected}")]
    IndexJump { sample: usize, expected: usize, found: usize },

    #[error("ill-conditioned system (condition number {cond:.3e}): {context}")]
    IllConditioned { cond: f64, context: String },

    #[error("lambda = {0} lies in the spectrum of the realization")]
    InSpectrum(Complex64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Validation(_)
                | Error::NotCElliptic
                | Error::DminNonSimple(_)
                | Error::MultiExponent(_)
                | Error::ExponentNotInStrip(_)
                | Error::AmbiguousAttribution(_)
                | Error::NotInMaximalDomain(_)
                | Error::OutsideStrip(_)
                | Error::GridIncompatible { .. }
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
