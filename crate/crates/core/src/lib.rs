#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod linalg;
pub mod manifold;
pub mod packing;
pub mod quadrature;
pub mod roots;
pub mod volumes;

pub use error::{Error, Result};
