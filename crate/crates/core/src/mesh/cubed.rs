use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::vec3::{arc_length, Vec3};

/// Cube face frames (center, u-axis, v-axis) with u × v = center.
pub const FACES: [[Vec3; 3]; 6] = [
    [Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
    [Vec3::new(0.0, 1.0, 0.0), Vec3::new(-1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
    [Vec3::new(-1.0, 0.0, 0.0), Vec3::new(0.0, -1.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
    [Vec3::new(0.0, -1.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)],
    [Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)],
    [Vec3::new(0.0, 0.0, -1.0), Vec3::new(0.0, 1.0, 0.0), Vec3::new(1.0, 0.0, 0.0)],
];

/// Index of the cube face whose center axis dominates `x`.
pub fn face_of(x: Vec3) -> usize {
    FACES
        .iter()
        .enumerate()
        .max_by(|a, b| a.1[0].dot(x).total_cmp(&b.1[0].dot(x)))
        .map(|(i, _)| i)
        .unwrap()
}

/// Gnomonic coordinates of `x` on cube face `f`.
pub fn gnomonic(f: usize, x: Vec3) -> [f64; 2] {
    let [c, eu, ev] = FACES[f];
    let w = x.dot(c);
    [x.dot(eu) / w, x.dot(ev) / w]
}

/// Unit-sphere point with gnomonic coordinates `g` on face `f`.
pub fn from_gnomonic(f: usize, g: [f64; 2]) -> Vec3 {
    let [c, eu, ev] = FACES[f];
    (c + eu * g[0] + ev * g[1]).normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeLink {
    pub element: usize,
    pub local_edge: usize,
    pub neighbor: usize,
    pub neighbor_edge: usize,
}

#[derive(Debug, Clone)]
pub struct LinearSphereMesh {
    pub n_per_face: usize,
    pub vertices: Vec<Vec3>,
    /// Corner indices, counter-clockwise seen from outside.
    pub elements: Vec<[usize; 4]>,
    /// One record per element side; every geometric edge appears twice.
    pub edges: Vec<EdgeLink>,
    pub h: f64,
    /// Owning cube face per element.
    pub face: Vec<usize>,
}

/// Local edge k runs from corner k to corner (k+1) % 4.
pub fn edge_corners(el: &[usize; 4], k: usize) -> (usize, usize) {
    (el[k], el[(k + 1) % 4])
}

pub fn generate_cubed_sphere(n: usize) -> Result<LinearSphereMesh> {
    if n == 0 {
        return Err(Error::InvalidInput("n_per_face must be at least 1".into()));
    }
    let ang: Vec<f64> = (0..=n)
        .map(|k| -FRAC_PI_4 + k as f64 * 2.0 * FRAC_PI_4 / n as f64)
        .collect();
    let mut key_index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut vertices = Vec::with_capacity(6 * n * n + 2);
    let mut grid = vec![vec![0usize; (n + 1) * (n + 1)]; 6];
    for (f, [c, eu, ev]) in FACES.iter().enumerate() {
        for b in 0..=n {
            for a in 0..=n {
                let (ca, cb) = ([c.x, c.y, c.z], ([eu.x, eu.y, eu.z], [ev.x, ev.y, ev.z]));
                let mut key = [0usize; 3];
                for d in 0..3 {
                    key[d] = if ca[d] != 0.0 {
                        if ca[d] > 0.0 { n } else { 0 }
                    } else if cb.0[d] != 0.0 {
                        if cb.0[d] > 0.0 { a } else { n - a }
                    } else if cb.1[d] > 0.0 {
                        b
                    } else {
                        n - b
                    };
                }
                let idx = *key_index.entry(key).or_insert_with(|| {
                    // Build from the integer key so shared vertices are bit-identical.
                    let t = |k: usize| ang[k].tan();
                    let v = Vec3::new(t(key[0]), t(key[1]), t(key[2]));
                    let m = v.x.abs().max(v.y.abs()).max(v.z.abs());
                    vertices.push((v / m).normalized());
                    vertices.len() - 1
                });
                grid[f][b * (n + 1) + a] = idx;
            }
        }
    }
    let mut elements = Vec::with_capacity(6 * n * n);
    let mut face = Vec::with_capacity(6 * n * n);
    for (f, g) in grid.iter().enumerate() {
        for b in 0..n {
            for a in 0..n {
                let at = |i: usize, j: usize| g[j * (n + 1) + i];
                elements.push([at(a, b), at(a + 1, b), at(a + 1, b + 1), at(a, b + 1)]);
                face.push(f);
            }
        }
    }
    LinearSphereMesh::from_parts(n, vertices, elements, Some(face))
}

impl LinearSphereMesh {
    /// Build adjacency and metrics from raw vertices and quads, validating invariants.
    pub fn from_parts(
        n_per_face: usize,
        vertices: Vec<Vec3>,
        elements: Vec<[usize; 4]>,
        face: Option<Vec<usize>>,
    ) -> Result<Self> {
        let nv = vertices.len();
        for el in &elements {
            if el.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("element {el:?} references missing vertex")));
            }
        }
        let mut side: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        let mut edges = Vec::with_capacity(4 * elements.len());
        let mut h: f64 = 0.0;
        for (e, el) in elements.iter().enumerate() {
            for k in 0..4 {
                let (a, b) = edge_corners(el, k);
                let key = (a.min(b), a.max(b));
                match side.remove(&key) {
                    Some((e2, k2)) => {
                        if edge_corners(&elements[e2], k2) != (b, a) {
                            return Err(Error::InvalidMesh(format!(
                                "edge {key:?} traversed in the same direction by elements {e2} and {e}"
                            )));
                        }
                        edges.push(EdgeLink { element: e2, local_edge: k2, neighbor: e, neighbor_edge: k });
                        edges.push(EdgeLink { element: e, local_edge: k, neighbor: e2, neighbor_edge: k2 });
                        h = h.max(arc_length(vertices[a].normalized(), vertices[b].normalized()));
                    }
                    None => {
                        if side.insert(key, (e, k)).is_some() {
                            unreachable!()
                        }
                    }
                }
            }
        }
        if let Some((key, _)) = side.iter().next() {
            return Err(Error::InvalidMesh(format!("edge {key:?} has only one adjacent element")));
        }
        let ne = elements.len();
        let ned = edges.len() / 2;
        if nv as i64 - ned as i64 + ne as i64 != 2 {
            return Err(Error::InvalidMesh(format!("Euler characteristic V-E+F = {} != 2", nv as i64 - ned as i64 + ne as i64)));
        }
        if ne != 6 * n_per_face * n_per_face {
            return Err(Error::InvalidMesh(format!("{ne} elements, expected 6n^2 = {}", 6 * n_per_face * n_per_face)));
        }
        for (e, el) in elements.iter().enumerate() {
            let [v0, v1, v2, v3] = el.map(|i| vertices[i]);
            let nrm = (v2 - v0).cross(v3 - v1);
            let cen = (v0 + v1 + v2 + v3) * 0.25;
            if nrm.dot(cen) <= 0.0 {
                return Err(Error::InvalidMesh(format!("element {e} is not outward oriented")));
            }
        }
        edges.sort_by_key(|l| (l.element, l.local_edge));
        let face = face.unwrap_or_else(|| {
            elements
                .iter()
                .map(|el| face_of(el.iter().fold(Vec3::ZERO, |s, &i| s + vertices[i])))
                .collect()
        });
        Ok(LinearSphereMesh { n_per_face, vertices, elements, edges, h, face })
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    /// Neighbour (element, local edge) across local edge `k` of element `e`.
    pub fn neighbor(&self, e: usize, k: usize) -> (usize, usize) {
        let l = &self.edges[4 * e + k];
        debug_assert!(l.element == e && l.local_edge == k);
        (l.neighbor, l.neighbor_edge)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_euler() {
        for n in 1..=5 {
            let m = generate_cubed_sphere(n).unwrap();
            assert_eq!(m.elements.len(), 6 * n * n);
            assert_eq!(m.vertices.len(), 6 * n * n + 2);
            assert_eq!(m.edges.len(), 2 * 12 * n * n);
            for v in &m.vertices {
                assert!((v.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn n1_gives_cube_corners() {
        let m = generate_cubed_sphere(1).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for v in &m.vertices {
            for c in [v.x, v.y, v.z] {
                assert!((c.abs() - s).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn h_for_n4_is_equiangular_spacing() {
        let m = generate_cubed_sphere(4).unwrap();
        assert!((m.h - std::f64::consts::PI / 8.0).abs() < 1e-12, "{}", m.h);
    }

    #[test]
    fn neighbours_are_symmetric() {
        let m = generate_cubed_sphere(3).unwrap();
        for e in 0..m.num_elements() {
            for k in 0..4 {
                let (e2, k2) = m.neighbor(e, k);
                assert_eq!(m.neighbor(e2, k2), (e, k));
                let (a, b) = edge_corners(&m.elements[e], k);
                assert_eq!(edge_corners(&m.elements[e2], k2), (b, a));
            }
        }
    }

    #[test]
    fn rejects_flipped_element() {
        let m = generate_cubed_sphere(2).unwrap();
        let mut els = m.elements.clone();
        els[3].reverse();
        assert!(LinearSphereMesh::from_parts(2, m.vertices.clone(), els, None).is_err());
    }

    #[test]
    fn gnomonic_round_trip() {
        let x = Vec3::new(0.3, -0.2, 0.9).normalized();
        let f = face_of(x);
        assert_eq!(f, 4);
        let y = from_gnomonic(f, gnomonic(f, x));
        assert!(x.max_abs_diff(y) < 1e-15);
    }
}
