pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod extension;
pub mod gallery;
pub mod goodrect;
pub mod lattice;
pub mod numeric;
pub mod propagation;
pub mod remez;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
