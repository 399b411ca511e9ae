//! Mixed virtual elements of arbitrary order for Darcy flow on polygonal
//! meshes with curved edges.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod poly;
pub mod solver;
pub mod verification;
pub mod vem;

pub use error::{Error, Result};
