pub mod aero;
pub mod agents;
pub mod env;
pub mod error;
pub mod harness;
pub mod orbital;
pub mod qcircuit;

pub use error::{Error, Result};
