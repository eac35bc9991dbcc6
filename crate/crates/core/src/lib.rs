pub mod error;
pub mod experiments;
pub mod linalg;
pub mod matrix;
pub mod orbit;
pub mod sampling;
pub mod transform;

pub use error::{Error, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
