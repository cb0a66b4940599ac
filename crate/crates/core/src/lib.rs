pub mod cli;
pub mod error;
pub mod ffgauss;
pub mod gscon;
pub mod linalg;
pub mod pauli;
pub mod pinning;
pub mod spectral;
pub mod zeno;

pub use error::{PinqError, Result};
