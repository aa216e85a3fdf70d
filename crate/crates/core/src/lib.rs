//! Exact counting of Diophantine approximations in the field of formal
//! Laurent series over a finite field.
//!
//! For a matrix `A` of fractional Laurent series, [`approx::count_solutions`]
//! counts the nonzero polynomial vectors `q` of height at most `k^Q` with
//! `‖qA − p‖∞ < ψ(‖q‖∞)` for some polynomial vector `p`. The [`counting`]
//! module evaluates the main term `Φ(Q)` and the divisor sums `τ`, `T`;
//! [`measure`] computes Haar measures of the approximable sets exactly by
//! cylinder enumeration; [`experiment`] samples `A` and compares `N(Q, A)`
//! against `Φ(Q)`.

pub mod algebra;
pub mod approx;
pub mod counting;
mod engine;
pub mod error;
pub mod experiment;
pub mod laurent;
pub mod measure;
pub mod rational;

pub use algebra::{FieldElem, FieldSpec, Poly, PolyVec};
pub use approx::{CountOptions, Psi};
pub use counting::{CountVariant, Dims};
pub use error::{Error, Result};
pub use laurent::{Frac, FracMatrix, FracVec, Valuation};
pub use measure::MeasureValue;
pub use rational::ExactRational;
