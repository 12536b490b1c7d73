//! Exact height and degree-growth computations for first-order rational
//! difference equations over ℚ, Borel-type exceptional-set machinery, and
//! numerical Nevanlinna functionals for explicit meromorphic models.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod grid;
pub mod growth;
pub mod heights;
pub mod nevanlinna;
pub mod orbit;
pub mod polyrat;
pub mod stats;

pub use error::{Error, Result};
pub use heights::{log_height, reduce, ExactRational, HeightValue};
pub use orbit::{DiscreteEquation, MalmquistReport, Orbit, Termination};
pub use polyrat::{poly_gcd, substitute, DegreeSequence, Polynomial, RationalFunction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
