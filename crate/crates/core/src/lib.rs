#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod cycles;
pub mod document;
pub mod error;
pub mod falgebra;
pub mod linalg;
pub mod milnor;
pub mod mpoly;
pub mod parse;
pub mod reduction;
pub mod scalars;
pub mod tseries;
pub mod witness;
pub mod witt;

pub use error::{Error, Result};
