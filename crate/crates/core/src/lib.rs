pub mod characteristics;
pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod fem;
pub mod mesh;
mod par;
pub mod scenarios;
pub mod scheme;
pub mod solver;

pub use error::{Error, Result};
