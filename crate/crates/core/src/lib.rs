//! Numerical laboratory for obstacle-type free boundary problems on uniform grids.
//!
//! The crate is organized around a small set of building blocks:
//!
//! * [`field`] — grid-sampled scalar fields with cubic interpolation, sphere/ball
//!   quadrature, negativity-set measures and the maximal-inscribed-radius functional.
//! * [`fixtures`] — closed-form calibration solutions (cusp family, homogeneous
//!   harmonics, perturbed polynomials, the radial classical-obstacle solution).
//! * [`solver`] — finite-difference solvers for the unconstrained ("no-sign"),
//!   classical and gradient-constrained ("superconductivity") obstacle variants.
//! * [`functionals`] — the Almgren frequency, Weiss energy and Monneau boundary-mass
//!   monitors, with monotonicity verdicts and a frequency estimator.
//! * [`blowup`] — rescalings, quadratic blowup fitting, singular-point
//!   classification and harmonic-blowup extraction.
//! * [`recursion`] — the decay recursion for second-derivative envelopes, with
//!   derived constants and brute-force bound verification.
//! * [`experiment`] — config-driven experiment runner behind the `oblab` binary.

pub mod blowup;
pub mod experiment;
pub mod field;
pub mod fixtures;
pub mod functionals;
pub mod poly;
pub mod recursion;
pub mod solver;

/// A point of the ambient space. Only the first `n` coordinates are used for an
/// `n`-dimensional field; trailing entries are zero.
pub type Point = [f64; 3];

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("sample at vertex ({x:?}) is not finite: {value}")]
    NonFiniteSample { x: Point, value: f64 },
    #[error("point {x:?} lies outside the evaluable region (half-width {halfwidth})")]
    OutOfDomain { x: Point, halfwidth: f64 },
    #[error("radius {r} below minimum {min} for this grid")]
    RadiusTooSmall { r: f64, min: f64 },
    #[error("degenerate denominator in frequency quotient: {0}")]
    DegenerateDenominator(f64),
    #[error("classification failed: {0}")]
    Classification(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("missing inputs: {}", .0.join(", "))]
    MissingInputs(Vec<String>),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

pub(crate) fn dot(a: &Point, b: &Point, n: usize) -> f64 {
    a[..n].iter().zip(&b[..n]).map(|(x, y)| x * y).sum()
}

pub(crate) fn dist(a: &Point, b: &Point, n: usize) -> f64 {
    a[..n]
        .iter()
        .zip(&b[..n])
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Pairwise (cascade) summation: deterministic and accurate independent of length.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}
