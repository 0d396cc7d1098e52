//! Exact homotopy transfer of algebraic structures along contractions.

pub mod ainf;
pub mod bar;
pub mod basis;
pub mod coalgebra;
pub mod complex;
pub mod corpus;
pub mod dense;
pub mod error;
pub mod lin;
pub mod linfty;
pub mod map;
pub mod perturb;
pub mod scalar;
pub mod transfer;
pub mod words;

pub use basis::GradedBasis;
pub use error::{Error, Result};
pub use lin::Lin;
pub use map::GradedMap;
pub use scalar::{Field, Scalar};
