use crate::error::{Error, Result};
use crate::mesh::nodes::{edge_grid_index, HighOrderMesh};
use crate::sem::gll::{lagrange_deriv_matrix, lagrange_matrix, ReferenceElement};
use crate::vec3::Vec3;

/// Tolerance for matching collocated edge points between neighbours.
pub const TRACE_TOL: f64 = 1e-10;

/// Metric terms of every element at the solution GLL nodes, plus edge data.
///
/// Node storage is element-major: node (i, j) of element e sits at e*np + j*(p+1) + i.
/// Edge points are indexed f = (4e + k)(p+1) + m, m running from corner k to corner k+1.
#[derive(Debug, Clone)]
pub struct ElementGeometry {
    pub re: ReferenceElement,
    pub ne: usize,
    pub x: Vec<Vec3>,
    pub a1: Vec<Vec3>,
    pub a2: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    /// J a^1 = a2 × n
    pub ja1: Vec<Vec3>,
    /// J a^2 = n × a1
    pub ja2: Vec<Vec3>,
    pub jac: Vec<f64>,
    /// Diagonal mass w_i w_j J and its inverse.
    pub mass: Vec<f64>,
    pub inv_mass: Vec<f64>,
    pub face_node: Vec<usize>,
    pub face_ext: Vec<usize>,
    pub face_partner: Vec<usize>,
    pub face_normal: Vec<Vec3>,
    pub face_ds: Vec<f64>,
    /// 1D quadrature weight of each edge point.
    pub face_w: Vec<f64>,
    /// Edge owner flag (true on exactly one side of each edge).
    pub face_owner: Vec<bool>,
}

fn tensor_apply(mx: &[f64], my: &[f64], n_in: usize, n_out: usize, src: &[Vec3]) -> Vec<Vec3> {
    let mut tmp = vec![Vec3::ZERO; n_out * n_in];
    for j in 0..n_in {
        for r in 0..n_out {
            let mut s = Vec3::ZERO;
            for i in 0..n_in {
                s += src[j * n_in + i] * mx[r * n_in + i];
            }
            tmp[j * n_out + r] = s;
        }
    }
    let mut out = vec![Vec3::ZERO; n_out * n_out];
    for q in 0..n_out {
        for r in 0..n_out {
            let mut s = Vec3::ZERO;
            for j in 0..n_in {
                s += tmp[j * n_out + r] * my[q * n_in + j];
            }
            out[q * n_out + r] = s;
        }
    }
    out
}

impl ElementGeometry {
    #[inline]
    pub fn np(&self) -> usize {
        self.re.n2()
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.re.n1()
    }

    pub fn num_nodes(&self) -> usize {
        self.ne * self.np()
    }

    pub fn num_face_points(&self) -> usize {
        self.ne * 4 * self.n1()
    }

    /// Build geometry from per-element node positions and tangents (already at solution nodes).
    pub fn from_parts(
        re: ReferenceElement,
        x: Vec<Vec3>,
        a1: Vec<Vec3>,
        a2: Vec<Vec3>,
        neighbors: Option<&dyn Fn(usize, usize) -> (usize, usize)>,
    ) -> Result<Self> {
        let n1 = re.n1();
        let np = re.n2();
        let p = re.p;
        let ne = x.len() / np;
        let mut normal = Vec::with_capacity(x.len());
        let mut jac = Vec::with_capacity(x.len());
        let mut ja1 = Vec::with_capacity(x.len());
        let mut ja2 = Vec::with_capacity(x.len());
        let mut mass = Vec::with_capacity(x.len());
        for idx in 0..x.len() {
            let c = a1[idx].cross(a2[idx]);
            let j = c.norm();
            if !(j > 0.0) {
                return Err(Error::DegenerateElement { element: idx / np, jacobian: j });
            }
            let n = c / j;
            normal.push(n);
            jac.push(j);
            ja1.push(a2[idx].cross(n));
            ja2.push(n.cross(a1[idx]));
            let (i, jj) = (idx % n1, (idx % np) / n1);
            mass.push(re.weights[i] * re.weights[jj] * j);
        }
        let inv_mass = mass.iter().map(|m| 1.0 / m).collect();
        let nf = ne * 4 * n1;
        let mut face_node = Vec::with_capacity(nf);
        let mut face_normal = Vec::with_capacity(nf);
        let mut face_ds = Vec::with_capacity(nf);
        let mut face_w = Vec::with_capacity(nf);
        for e in 0..ne {
            for k in 0..4 {
                for m in 0..n1 {
                    let (i, j) = edge_grid_index(p, k, m);
                    let idx = e * np + j * n1 + i;
                    let sn = match k {
                        0 => -ja2[idx],
                        1 => ja1[idx],
                        2 => ja2[idx],
                        _ => -ja1[idx],
                    };
                    let ds = sn.norm();
                    face_node.push(idx);
                    face_normal.push(sn / ds);
                    face_ds.push(ds);
                    face_w.push(re.weights[m]);
                }
            }
        }
        let mut face_ext = vec![0; nf];
        let mut face_partner = vec![0; nf];
        let mut face_owner = vec![true; nf];
        match neighbors {
            Some(nb) => {
                for e in 0..ne {
                    for k in 0..4 {
                        let (e2, k2) = nb(e, k);
                        for m in 0..n1 {
                            let f = (4 * e + k) * n1 + m;
                            let f2 = (4 * e2 + k2) * n1 + (p - m);
                            face_partner[f] = f2;
                            face_ext[f] = face_node[f2];
                            face_owner[f] = (e, k) < (e2, k2);
                            let mismatch = x[face_node[f]].max_abs_diff(x[face_node[f2]]);
                            if mismatch > TRACE_TOL {
                                return Err(Error::NonConformingEdge { element: e, edge: k, mismatch });
                            }
                        }
                    }
                }
            }
            None => {
                // isolated patch: each edge is its own exterior
                for f in 0..nf {
                    face_partner[f] = f;
                    face_ext[f] = face_node[f];
                }
            }
        }
        Ok(ElementGeometry {
            re,
            ne,
            x,
            a1,
            a2,
            normal,
            ja1,
            ja2,
            jac,
            mass,
            inv_mass,
            face_node,
            face_ext,
            face_partner,
            face_normal,
            face_ds,
            face_w,
            face_owner,
        })
    }

    /// Edge points of element e as a range into the face arrays.
    pub fn element_faces(&self, e: usize) -> std::ops::Range<usize> {
        let n = 4 * self.n1();
        e * n..(e + 1) * n
    }
}

pub fn compute_geometry(mesh: &HighOrderMesh, re: &ReferenceElement) -> Result<ElementGeometry> {
    let lag = lagrange_matrix(&mesh.geom_nodes, &re.nodes);
    let dlag = lagrange_deriv_matrix(&mesh.geom_nodes, &re.nodes);
    let n_in = mesh.p_geom + 1;
    let n_out = re.n1();
    let mut x = Vec::with_capacity(mesh.num_elements() * n_out * n_out);
    let mut a1 = Vec::with_capacity(x.capacity());
    let mut a2 = Vec::with_capacity(x.capacity());
    for m in &mesh.mappings {
        x.extend(tensor_apply(&lag, &lag, n_in, n_out, &m.control_nodes));
        a1.extend(tensor_apply(&dlag, &lag, n_in, n_out, &m.control_nodes));
        a2.extend(tensor_apply(&lag, &dlag, n_in, n_out, &m.control_nodes));
    }
    let lin = &mesh.linear;
    ElementGeometry::from_parts(re.clone(), x, a1, a2, Some(&|e, k| lin.neighbor(e, k)))
}

/// Affine map of the reference square onto the planar rectangle [x0,x1]×[y0,y1] in the z=0 plane.
pub fn planar_patch(re: &ReferenceElement, x0: f64, x1: f64, y0: f64, y1: f64) -> ElementGeometry {
    let n1 = re.n1();
    let mut x = Vec::new();
    for j in 0..n1 {
        for i in 0..n1 {
            let (s, t) = ((1.0 + re.nodes[i]) * 0.5, (1.0 + re.nodes[j]) * 0.5);
            x.push(Vec3::new(x0 + s * (x1 - x0), y0 + t * (y1 - y0), 0.0));
        }
    }
    let a1 = vec![Vec3::new((x1 - x0) * 0.5, 0.0, 0.0); n1 * n1];
    let a2 = vec![Vec3::new(0.0, (y1 - y0) * 0.5, 0.0); n1 * n1];
    ElementGeometry::from_parts(re.clone(), x, a1, a2, None).expect("planar patch is regular")
}
