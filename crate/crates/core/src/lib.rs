//! Free spectrahedra, monic linear pencils, and convexotonic maps.
//!
//! The crate provides:
//! - free (noncommutative) words and matrix-coefficient series,
//! - evaluation of series and pencils at matrix tuples,
//! - convexotonic tuples, their rational maps, and a catalog of the
//!   low-dimensional cases,
//! - bianalytic-pair certificates and their verification,
//! - genericity diagnostics for pencil coefficient tuples.

pub mod error;
pub mod linalg;
pub mod word;

pub mod rng;
pub mod series;
pub mod tuple;

pub mod convexotonic;
pub mod pencil;

pub mod catalog;
pub mod certify;
pub mod gallery;
pub mod generic;
pub mod json;

pub use error::Error;
pub use linalg::CMatrix;
pub use series::FreeSeries;
pub use tuple::MatrixTuple;
pub use word::Word;
