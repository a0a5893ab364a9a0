//! Exact ultrametric normed spaces over discretely or trivially valued
//! fields, quotient metrics on projective space, and adelic lattice
//! invariants built from them.

pub mod adelic;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod metric;
pub mod sections;
pub mod ultranorm;
pub mod valued_field;

pub use error::{Error, Result};
pub use valued_field::{FieldElement, Magnitude, ValuedField};
