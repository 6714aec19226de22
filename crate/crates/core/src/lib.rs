pub mod combinatorics;
pub mod composition;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mvk;
pub mod polys;
pub mod scalar;
pub mod series;
pub mod sim;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};
