//! Finite-field monads, Chern-class calculus and cohomology checks for the
//! Frobenius-modified rank-`n` bundles `E_0[n,q,k]` on `P^n x P^n`.

pub mod bundles;
pub mod chow;
pub mod cohomology;
pub mod error;
pub mod field;
pub mod linalg;
pub mod model;
pub mod poly;

pub use error::{Error, Result};
