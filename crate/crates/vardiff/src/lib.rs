//! Direct estimation of differences between VAR transition matrices.

pub mod error;
pub mod linalg;
pub mod var_core;

pub use error::{Result, VardiffError};
pub use linalg::{DMat, DVec};
