//! Conversion of factorized unitary coupled cluster products into coupled
//! cluster form, built on an algebra of generalized fermionic operator strings.

pub mod elimination;
pub mod error;
pub mod fockoracle;
pub mod identities;
pub mod opalg;
pub mod reorder;
pub mod symcoef;

pub use error::{Error, Result};
