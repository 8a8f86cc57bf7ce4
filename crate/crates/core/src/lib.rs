//! Exact engine for counting maximal lattices through descent polynomials.

pub mod ash;
pub mod descent;
pub mod error;
pub mod exactpoly;
pub mod globalzeta;
pub mod latoracle;
pub mod ledger;
pub mod localzeta;
pub mod totalash;
pub mod verify;

pub use error::{Error, Result};
