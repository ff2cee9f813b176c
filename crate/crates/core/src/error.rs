use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("jet centers differ: {0} vs {1}")]
    CenterMismatch(Complex64, Complex64),

    #[error("jet has a vanishing constant term at {0}")]
    VanishingConstant(Complex64),

    #[error("requested derivative order {requested} exceeds jet order {available}")]
    OrderExceeded { requested: usize, available: usize },

    #[error("no branch of the power with exponent {beta} has constant term {reference}")]
    BranchMismatch {
        beta: Complex64,
        reference: Complex64,
    },

    #[error("invalid Bell polynomial index: {0}")]
    BellIndex(String),

    #[error("invalid map parameter: {0}")]
    InvalidMap(String),

    #[error("point {0} lies outside the unit disc")]
    OutsideDisc(Complex64),

    #[error("point {0} lies outside the image domain")]
    OutsideImage(Complex64),

    #[error("point {0} lies outside the domain of the function")]
    OutsideDomain(Complex64),

    #[error("invalid differential equation: {0}")]
    InvalidOde(String),

    #[error("map image is not contained in the equation domain: {0}")]
    DomainMismatch(String),

    #[error("singular matrix (pivot {0:e})")]
    Singular(f64),

    #[error("branch inconsistency along path near {0}")]
    BranchJump(Complex64),

    #[error("step size underflow at {at}; last reachable distance from start {reached}")]
    StepUnderflow { at: Complex64, reached: f64 },

    #[error("point {0} is not covered by the continuation")]
    NotCovered(Complex64),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("zero counting failed at radius {radius}: {reason}")]
    ZeroCounting { radius: f64, reason: String },

    #[error("quadrature did not converge: last two values {0} and {1}")]
    Quadrature(f64, f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
