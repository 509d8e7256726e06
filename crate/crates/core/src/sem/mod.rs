pub mod field;
pub mod filter;
pub mod geometry;
pub mod gll;
pub mod ops;

pub use field::{FrameVectorField, ScalarField};
pub use geometry::{compute_geometry, ElementGeometry};
pub use gll::ReferenceElement;
