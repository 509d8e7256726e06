use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::cubed::LinearSphereMesh;
use crate::mesh::nodes::{ElementMapping, HighOrderMesh, NodeStrategy};
use crate::sem::gll::gll_nodes_weights;
use crate::vec3::Vec3;

const TOL: f64 = 1e-12;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshFile {
    pub n_per_face: usize,
    pub p_geom: usize,
    pub strategy: String,
    pub vertices: Vec<Vec3>,
    pub elements: Vec<[usize; 4]>,
    pub control_nodes: Vec<Vec<Vec3>>,
}

impl From<&HighOrderMesh> for MeshFile {
    fn from(m: &HighOrderMesh) -> Self {
        MeshFile {
            n_per_face: m.linear.n_per_face,
            p_geom: m.p_geom,
            strategy: m.strategy.to_string(),
            vertices: m.linear.vertices.clone(),
            elements: m.linear.elements.clone(),
            control_nodes: m.mappings.iter().map(|mp| mp.control_nodes.clone()).collect(),
        }
    }
}

impl TryFrom<MeshFile> for HighOrderMesh {
    type Error = Error;

    fn try_from(f: MeshFile) -> Result<Self> {
        let strategy: NodeStrategy = f.strategy.parse()?;
        if f.p_geom == 0 {
            return Err(Error::InvalidMesh("p_geom must be at least 1".into()));
        }
        for (i, v) in f.vertices.iter().enumerate() {
            if !v.is_finite() || (v.norm() - 1.0).abs() > TOL {
                return Err(Error::InvalidMesh(format!("vertex {i} is not on the unit sphere")));
            }
        }
        let linear = LinearSphereMesh::from_parts(f.n_per_face, f.vertices, f.elements, None)?;
        if f.control_nodes.len() != linear.num_elements() {
            return Err(Error::InvalidMesh(format!(
                "{} control-node blocks for {} elements",
                f.control_nodes.len(),
                linear.num_elements()
            )));
        }
        let n = f.p_geom + 1;
        let (geom_nodes, _) = gll_nodes_weights(f.p_geom);
        let mut mappings = Vec::with_capacity(f.control_nodes.len());
        for (e, cn) in f.control_nodes.into_iter().enumerate() {
            if cn.len() != n * n {
                return Err(Error::InvalidMesh(format!("element {e} has {} control nodes, expected {}", cn.len(), n * n)));
            }
            if cn.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMesh(format!("element {e} has non-finite control nodes")));
            }
            let el = linear.elements[e];
            for (k, idx) in [0, n - 1, n * n - 1, n * (n - 1)].into_iter().enumerate() {
                if cn[idx].max_abs_diff(linear.vertices[el[k]]) > TOL {
                    return Err(Error::InvalidMesh(format!("element {e} corner {k} does not match its vertex")));
                }
            }
            if strategy == NodeStrategy::GeodesicOptimized && cn.iter().any(|x| (x.norm() - 1.0).abs() > TOL) {
                return Err(Error::InvalidMesh(format!("element {e} has optimized control nodes off the sphere")));
            }
            mappings.push(ElementMapping { p_geom: f.p_geom, control_nodes: cn });
        }
        let mesh = HighOrderMesh { linear, strategy, p_geom: f.p_geom, mappings, geom_nodes };
        let mismatch = mesh.watertight_mismatch(&mesh.geom_nodes.clone());
        if mismatch > TOL {
            return Err(Error::InvalidMesh(format!("shared edges differ by {mismatch:e}")));
        }
        Ok(mesh)
    }
}

pub fn write_mesh(mesh: &HighOrderMesh, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    serde_json::to_writer(std::io::BufWriter::new(file), &MeshFile::from(mesh))?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<HighOrderMesh> {
    let text = std::fs::read_to_string(path)?;
    let f: MeshFile = serde_json::from_str(&text)?;
    f.try_into()
}
