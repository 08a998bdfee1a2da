pub mod chase;
pub mod cq;
pub mod error;
pub mod greenred;
pub mod parse;
pub mod reductions;
pub mod spider;
pub mod swarm;

pub use error::{Error, Result};
