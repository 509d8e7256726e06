use crate::mesh::nodes::HighOrderMesh;
use crate::sem::gll::{gll_nodes_weights, lagrange_matrix};

/// RMS radial deviation of the mesh vertices.
pub fn mesh_error(mesh: &HighOrderMesh) -> f64 {
    let v = &mesh.linear.vertices;
    (v.iter().map(|x| (1.0 - x.norm()).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Default GAE sampling order: (p_geom + 3)^2 points per element.
pub fn default_sampling_order(p_geom: usize) -> usize {
    p_geom + 2
}

fn element_sums(mesh: &HighOrderMesh, sampling_order: usize) -> (Vec<f64>, usize) {
    let (pts, _) = gll_nodes_weights(sampling_order.max(1));
    let lag = lagrange_matrix(&mesh.geom_nodes, &pts);
    let np = pts.len();
    let sums = mesh
        .mappings
        .iter()
        .map(|m| m.sample_with(&lag, np).iter().map(|x| (1.0 - x.norm()).powi(2)).sum())
        .collect();
    (sums, np * np)
}

/// RMS radial deviation of every element map sampled on a (sampling_order+1)^2 GLL grid.
pub fn geometric_approximation_error(mesh: &HighOrderMesh, sampling_order: usize) -> f64 {
    let (sums, per) = element_sums(mesh, sampling_order);
    (sums.iter().sum::<f64>() / (sums.len() * per) as f64).sqrt()
}

/// Per-element RMS radial deviation at the default sampling order.
pub fn per_element_gae_map(mesh: &HighOrderMesh) -> Vec<f64> {
    per_element_gae(mesh, default_sampling_order(mesh.p_geom))
}

pub fn per_element_gae(mesh: &HighOrderMesh, sampling_order: usize) -> Vec<f64> {
    let (sums, per) = element_sums(mesh, sampling_order);
    sums.iter().map(|s| (s / per as f64).sqrt()).collect()
}
