//! High-order discontinuous Galerkin on curvilinear cubed-sphere meshes with moving frames.

pub mod cli;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod frames;
pub mod mesh;
pub mod operators;
pub mod sem;
pub mod solvers;
pub mod vec3;

pub use error::{Error, Result};
pub use vec3::Vec3;
