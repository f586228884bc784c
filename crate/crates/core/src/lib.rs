//! Symbolic verification engine for generalized derivations, Lie algebroids
//! and Poisson-Nijenhuis structures over polynomial coefficients.

#![allow(clippy::needless_range_loop)]

pub mod algebroid;
pub mod error;
pub mod forms;
pub mod gder;
pub mod lifts;
pub mod lnb;
pub mod pn;
pub mod poly;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
pub use forms::{DiffForm, Multivector, VVForm, VectorField};
pub use poly::{parse_poly, Chart, Limits, Poly, Rational};
