pub mod checksim;
pub mod error;
pub mod numerics;
pub mod protocol;
pub mod rng;
pub mod security;

pub use error::{Error, Result};
