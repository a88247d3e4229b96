pub mod bounds;
pub mod cli;
pub mod error;
pub mod gates;
pub mod lattice;
pub mod params;
pub mod qram;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
