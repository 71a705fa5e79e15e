pub mod error;
pub mod flow;
pub mod matrix;
pub mod poles;
pub mod polyhedra;
pub mod registry;
pub mod weights;
pub mod wire;
pub mod zeta;

pub use error::{Error, Result};
