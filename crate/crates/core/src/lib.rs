//! Integer complexity, exact defects, stability certificates and low-defect
//! polynomials.
//!
//! The [`complexity`] module computes `‖n‖`, the least number of ones needed
//! to write `n` with `+`, `·` and parentheses. Everything else is built on it:
//! [`defect`] compares values `C − 3·log₃ n` exactly, [`stability`] scans
//! `‖3^k n‖` for stabilization, [`ldpoly`] and [`represent`] implement
//! low-defect polynomials and their 3-representations, and [`structure`]
//! explores the defect set at finite truncations.

pub mod complexity;
pub mod defect;
pub mod error;
pub mod ldpoly;
pub mod represent;
pub mod stability;
pub mod structure;

pub use complexity::{ComplexityOracle, ComplexityTable, Expression};
pub use defect::{DefectBound, ExactDefect};
pub use error::{Error, Result};
pub use stability::{Certificate, Policy, StabilityOracle, StabilityVerdict, VerdictKind};
