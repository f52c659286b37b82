pub mod cli;
pub mod dd;
pub mod error;
pub mod numfmt;
pub mod par;
pub mod pattern;
pub mod quadrature;
pub mod radon;
pub mod reconstruct;
pub mod specfun;
pub mod states;
pub mod symplectic;
pub mod verify;

pub use error::{Error, Result};
