pub mod adversary;
pub mod biased;
pub mod bounds;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod gf2;
pub mod listcode;
pub mod pauli;
pub mod protocol;
pub mod stabilizer;
pub mod stats;

pub use error::{Error, Result};
