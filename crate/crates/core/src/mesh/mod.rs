pub mod cubed;
pub mod io;
pub mod metrics;
pub mod nodes;

pub use cubed::{generate_cubed_sphere, LinearSphereMesh};
pub use metrics::{geometric_approximation_error, mesh_error, per_element_gae_map};
pub use nodes::{insert_high_order_nodes, ElementMapping, HighOrderMesh, NodeStrategy};
