//! Zeta values of real quadratic fields and period polynomials of cusp forms
//! built from binary quadratic forms of fixed discriminant.

pub mod acceptance;
pub mod error;
pub mod exact;
pub mod numeric;
pub mod periods;
pub mod qforms;
pub mod theorems;
pub mod zetafun;

pub use error::{Error, Result};
