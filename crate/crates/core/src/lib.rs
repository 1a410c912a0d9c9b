//! Exact computations with constructible sheaves on finite stratified spaces.

pub mod cli;
pub mod complex;
pub mod diagram;
pub mod error;
pub mod field;
pub mod format;
pub mod functors;
pub mod geometry;
pub mod kernels;
pub mod matrix;
pub mod microlocal;
pub mod poset;
pub mod random;
pub mod resolution;
pub mod sheaf;
pub mod verify;
pub mod wrap1d;

pub use complex::{ChainMap, Complex, Graded};
pub use error::{Error, Result};
pub use field::{Field, Scalar};
pub use matrix::Matrix;
pub use sheaf::{Sheaf, SheafMap};
