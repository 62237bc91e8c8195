pub mod anisotropy;
pub mod config;
pub mod error;
pub mod experiments;
pub mod extremal;
pub mod io;
pub mod lattice;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
