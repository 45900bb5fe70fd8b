//! Characteristic polynomials of elements of finite classical groups:
//! finite-field arithmetic, polynomial algebra, counts of (self-conjugate)
//! irreducibles, group enumeration and sampling, exact characteristic
//! polynomial distributions, explicit bounds, generating-function series,
//! derangement-type probabilities and invariable generation estimates.

pub mod arith;
pub mod bounds;
pub mod charpoly_dist;
pub mod counting;
pub mod derange;
pub mod error;
pub mod factor;
pub mod field;
pub mod groups;
pub mod invariable;
pub mod matrix;
pub mod poly;
pub(crate) mod polyraw;
pub mod series;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldElem};
pub use matrix::Matrix;
pub use poly::PolyFq;
