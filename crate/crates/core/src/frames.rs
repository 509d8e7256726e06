use crate::error::{Error, Result};
use crate::sem::geometry::ElementGeometry;
use crate::sem::ops::{contravariant, grad_physical, strong_divergence};
use crate::vec3::Vec3;

pub const POLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrameAlignment {
    Spherical,
    Local,
}

impl std::str::FromStr for FrameAlignment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spherical" => Ok(FrameAlignment::Spherical),
            "local" => Ok(FrameAlignment::Local),
            _ => Err(Error::InvalidInput(format!("unknown alignment '{s}' (spherical, local)"))),
        }
    }
}

impl std::fmt::Display for FrameAlignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FrameAlignment::Spherical => "spherical",
            FrameAlignment::Local => "local",
        })
    }
}

/// Orthonormal triad at every node; e3 is the normal of the mapped surface.
#[derive(Debug, Clone)]
pub struct MovingFrameField {
    pub alignment: FrameAlignment,
    pub e1: Vec<Vec3>,
    pub e2: Vec<Vec3>,
    pub e3: Vec<Vec3>,
}

fn local_frame(a1: Vec3, n: Vec3) -> (Vec3, Vec3) {
    let e1 = a1.reject(n).normalized();
    (e1, n.cross(e1))
}

/// East direction projected on the tangent plane with normal `n`.
fn spherical_frame(x: Vec3, n: Vec3) -> (Vec3, Vec3) {
    let east = Vec3::new(-x.y, x.x, 0.0);
    let e1 = east.reject(n).normalized();
    (e1, n.cross(e1))
}

pub fn build_frames(geo: &ElementGeometry, alignment: FrameAlignment) -> Result<MovingFrameField> {
    build_frames_excluding(geo, alignment, &vec![false; geo.ne])
}

/// Like `build_frames`, but elements flagged in `fallback` receive local frames,
/// so spherical frames can be built on meshes with nodes at the poles.
pub fn build_frames_excluding(
    geo: &ElementGeometry,
    alignment: FrameAlignment,
    fallback: &[bool],
) -> Result<MovingFrameField> {
    let nn = geo.num_nodes();
    let np = geo.np();
    let mut e1 = Vec::with_capacity(nn);
    let mut e2 = Vec::with_capacity(nn);
    for idx in 0..nn {
        let n = geo.normal[idx];
        let e = idx / np;
        let (a, b) = match alignment {
            FrameAlignment::Spherical if !fallback[e] => {
                let x = geo.x[idx];
                let z = x.z / x.norm();
                if z.abs() > 1.0 - POLE_TOL {
                    return Err(Error::PoleProximity { element: e, z });
                }
                spherical_frame(x, n)
            }
            _ => local_frame(geo.a1[idx], n),
        };
        e1.push(a);
        e2.push(b);
    }
    Ok(MovingFrameField { alignment, e1, e2, e3: geo.normal.clone() })
}

impl MovingFrameField {
    pub fn max_orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.e1.len() {
            let v = [self.e1[i], self.e2[i], self.e3[i]];
            for a in 0..3 {
                for b in 0..3 {
                    let d = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((v[a].dot(v[b]) - d).abs());
                }
            }
        }
        worst
    }

    /// Cartesian vector from frame components.
    #[inline]
    pub fn to_cartesian(&self, idx: usize, v1: f64, v2: f64) -> Vec3 {
        self.e1[idx] * v1 + self.e2[idx] * v2
    }

    pub fn frame(&self, i: usize) -> &[Vec3] {
        match i {
            1 => &self.e1,
            2 => &self.e2,
            3 => &self.e3,
            _ => panic!("frame index {i}"),
        }
    }
}

/// Derivative data of the frames at every node.
#[derive(Debug, Clone)]
pub struct ConnectionField {
    /// ∇·e1, ∇·e2 in conservative collocation form.
    pub div_e1: Vec<f64>,
    pub div_e2: Vec<f64>,
    /// (∇×e1)·e3, (∇×e2)·e3
    pub curl3_e1: Vec<f64>,
    pub curl3_e2: Vec<f64>,
    /// (∇×e3)·e1, (∇×e3)·e2
    pub curl_e3_1: Vec<f64>,
    pub curl_e3_2: Vec<f64>,
    /// Γ²₁₁ = e2·∇_{e1}e1
    pub gamma_211: Vec<f64>,
    /// Γ²₂₁ = e2·∇_{e2}e1
    pub gamma_221: Vec<f64>,
    /// Γ²₁₂ = e2·∇_{e1}e2
    pub gamma_212: Vec<f64>,
}

/// Surface gradients of the three Cartesian components of a vector field.
fn component_gradients(geo: &ElementGeometry, v: &[Vec3]) -> [Vec<Vec3>; 3] {
    let cx: Vec<f64> = v.iter().map(|a| a.x).collect();
    let cy: Vec<f64> = v.iter().map(|a| a.y).collect();
    let cz: Vec<f64> = v.iter().map(|a| a.z).collect();
    [grad_physical(geo, &cx), grad_physical(geo, &cy), grad_physical(geo, &cz)]
}

/// ∇_d w from component gradients.
#[inline]
fn directional(g: &[Vec<Vec3>; 3], idx: usize, d: Vec3) -> Vec3 {
    Vec3::new(g[0][idx].dot(d), g[1][idx].dot(d), g[2][idx].dot(d))
}

#[inline]
fn curl(g: &[Vec<Vec3>; 3], idx: usize) -> Vec3 {
    Vec3::new(
        g[2][idx].y - g[1][idx].z,
        g[0][idx].z - g[2][idx].x,
        g[1][idx].x - g[0][idx].y,
    )
}

/// Conservative divergence of a per-node Cartesian vector field.
pub fn divergence_conservative(geo: &ElementGeometry, v: &[Vec3]) -> Vec<f64> {
    let nn = v.len();
    let (mut g1, mut g2, mut out) = (vec![0.0; nn], vec![0.0; nn], vec![0.0; nn]);
    contravariant(geo, v, &mut g1, &mut g2);
    strong_divergence(geo, &g1, &g2, &mut out);
    out
}

pub fn build_connections(frames: &MovingFrameField, geo: &ElementGeometry) -> ConnectionField {
    let nn = geo.num_nodes();
    let div_e1 = divergence_conservative(geo, &frames.e1);
    let div_e2 = divergence_conservative(geo, &frames.e2);
    let g1 = component_gradients(geo, &frames.e1);
    let g2 = component_gradients(geo, &frames.e2);
    let g3 = component_gradients(geo, &frames.e3);
    let mut c = ConnectionField {
        div_e1,
        div_e2,
        curl3_e1: Vec::with_capacity(nn),
        curl3_e2: Vec::with_capacity(nn),
        curl_e3_1: Vec::with_capacity(nn),
        curl_e3_2: Vec::with_capacity(nn),
        gamma_211: Vec::with_capacity(nn),
        gamma_221: Vec::with_capacity(nn),
        gamma_212: Vec::with_capacity(nn),
    };
    for idx in 0..nn {
        let (e1, e2, e3) = (frames.e1[idx], frames.e2[idx], frames.e3[idx]);
        c.curl3_e1.push(curl(&g1, idx).dot(e3));
        c.curl3_e2.push(curl(&g2, idx).dot(e3));
        let ce3 = curl(&g3, idx);
        c.curl_e3_1.push(ce3.dot(e1));
        c.curl_e3_2.push(ce3.dot(e2));
        c.gamma_211.push(e2.dot(directional(&g1, idx, e1)));
        c.gamma_221.push(e2.dot(directional(&g1, idx, e2)));
        c.gamma_212.push(e2.dot(directional(&g2, idx, e1)));
    }
    c
}
