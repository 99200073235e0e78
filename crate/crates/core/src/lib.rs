pub mod canonical;
pub mod equation;
pub mod error;
pub mod expr;
pub mod frame;
pub mod gen;
pub mod invariants;
pub mod io;
pub mod reduction;
pub mod selftest;
pub mod transform;

pub use error::{Error, Result};
