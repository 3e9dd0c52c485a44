//! Equivariant K-theoretic degree-0 Donaldson-Thomas series of `[C^3/mu_r]`,
//! computed by torus localization over colored plane partitions and by closed
//! plethystic formulas, with exact arithmetic throughout.

pub mod acceptance;
pub mod error;
pub mod laurent;
pub mod partitions;
pub mod pleth;
pub mod points;
pub mod qseries;
pub mod transfer;
pub mod vertex;

pub use error::{Error, Result};
