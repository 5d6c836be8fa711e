//! Complex conjugate periodic transform (CCPT).
//!
//! Builds the real conjugate-pair-sum bases of every divisor subspace of a
//! length, assembles them into a nested periodic matrix, and uses it to
//! transform signals, profile divisor-period and frequency content, and
//! estimate periods. DFT and Ramanujan-sum baselines are included for
//! comparison, along with range scans and a penalized minimum-norm
//! dictionary for periods that do not divide the length.

pub mod baselines;
pub mod ccps;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod numtheory;
pub mod profile;
pub mod signalgen;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use profile::{estimate_period, PeriodStrengthProfile, ThresholdPolicy};
pub use transform::{build_t, CoefficientVector, ColumnLabel, NestedPeriodicMatrix};
