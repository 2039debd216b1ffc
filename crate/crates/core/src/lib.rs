//! Free-solution representation formulas, lower-bound certificates and a
//! blow-up iteration for `u_tt - Δu = F(u)` with slowly decaying radial data.

pub mod blowup;
pub mod bounds;
pub mod certificate;
pub mod error;
pub mod fdm;
pub mod freewave;
pub mod kernel;
pub mod profile;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
