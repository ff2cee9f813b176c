//! Conformal transformation of complex linear differential equations and
//! oscillation diagnostics for their solutions.

pub mod basis;
pub mod bell;
pub mod conformal;
pub mod domain;
pub mod error;
pub mod function;
pub mod jet;
pub mod kim;
pub mod linalg;
pub mod ode;
pub mod oscillation;
pub mod presets;
pub mod solve;
pub mod transform;

pub use conformal::ConformalMapSpec;
pub use domain::Domain;
pub use error::{Error, Result};
pub use function::{AnalyticFunction, Expr, Func};
pub use jet::ComplexJet;
pub use ode::{LinearODE, OdeSpec};
