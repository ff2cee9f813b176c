//! Zero counting, Nevanlinna functionals and coefficient-growth integrals.

pub mod contour;
pub mod counting;
pub mod directions;
pub mod fit;
pub mod nevanlinna;
pub mod quadrature;
pub mod report;

pub use contour::{count_zeros, count_zeros_detailed, ZeroCount};
pub use counting::{
    integrated_counting, locate_zero_moduli, CountRecord, CountingFunction, ZeroModuli,
};
pub use directions::exp_sum_directions;
pub use fit::growth_exponent_fit;
pub use nevanlinna::{jensen_mean, proximity_m, proximity_m_reciprocal};
pub use quadrature::{
    coefficient_integral, coefficient_integrals, image_side_integral, CoefficientContext,
};
pub use report::{
    theorem2_report, theorem2_report_with_sums, FittedExponents, OscillationReport, RadialGrid,
    ReportRow,
};
