//! Degrees-of-freedom analysis and scheme construction for the clustered
//! MIMO multi-way relay channel.

pub mod alignment;
pub mod bounds;
pub mod dof_catalog;
pub mod error;
pub mod linalg;
pub mod model;
pub mod scheme;

pub use error::{Error, Result};
