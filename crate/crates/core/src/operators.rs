//! Moving-frame divergence, curl and gradient in direct (connection) and weak (DG) form,
//! plus the Rossby-Haurwitz analytic fields used to test them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{build_connections, build_frames_excluding, ConnectionField, FrameAlignment, MovingFrameField};
use crate::mesh::{generate_cubed_sphere, insert_high_order_nodes, NodeStrategy};
use crate::sem::field::{FrameVectorField, ScalarField};
use crate::sem::geometry::{compute_geometry, ElementGeometry};
use crate::sem::gll::ReferenceElement;
use crate::sem::ops::{contravariant, grad_physical, weak_divergence};
use crate::vec3::Vec3;

pub const POLE_CAP_COLATITUDE: f64 = 0.15;
/// Gradient errors skip elements with a vertex this many mesh widths from a pole.
pub const GRADIENT_CAP_WIDTHS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RossbyHaurwitzParams {
    pub omega: f64,
    pub k: f64,
    pub wave_number: u32,
}

impl Default for RossbyHaurwitzParams {
    fn default() -> Self {
        RossbyHaurwitzParams { omega: 7.848e-6, k: 7.848e-6, wave_number: 4 }
    }
}

/// Colatitude and longitude of the radial projection of `x`.
pub fn colat_lon(x: Vec3) -> (f64, f64) {
    let u = x.normalized();
    (u.z.clamp(-1.0, 1.0).acos(), u.y.atan2(u.x))
}

/// Unit east and north vectors at `x` (radially projected).
pub fn east_north(x: Vec3) -> (Vec3, Vec3) {
    let u = x.normalized();
    let east = Vec3::new(-u.y, u.x, 0.0).normalized();
    (east, u.cross(east))
}

/// (v_φ, v_θ) of the wave, θ colatitude; v_θ is the northward component.
pub fn rh_velocity(x: Vec3, prm: &RossbyHaurwitzParams) -> (f64, f64) {
    let (th, ph) = colat_lon(x);
    let (s, c) = th.sin_cos();
    let r = prm.wave_number as f64;
    let w = prm.wave_number as i32;
    let vphi = prm.omega * s + prm.k * s.powi(w - 1) * (r * c * c - s * s) * (r * ph).cos();
    let vth = -r * prm.k * s.powi(w - 1) * c * (r * ph).sin();
    (vphi, vth)
}

/// Cartesian velocity, built from s·east = ẑ×u and s·north so it stays finite at the poles.
pub fn rh_velocity_cartesian(x: Vec3, prm: &RossbyHaurwitzParams) -> Vec3 {
    let u = x.normalized();
    let (th, ph) = colat_lon(x);
    let (s, c) = th.sin_cos();
    let r = prm.wave_number as f64;
    let es = Vec3::new(-u.y, u.x, 0.0);
    let ns = u.cross(es);
    let sr = s.powi(prm.wave_number as i32 - 2);
    let vphi_s = prm.omega + prm.k * sr * (r * c * c - s * s) * (r * ph).cos();
    let vth_s = -r * prm.k * sr * c * (r * ph).sin();
    es * vphi_s + ns * vth_s
}

/// Closed-form curl as printed for the wave: -2ω cosθ + (R²+3R+2)K sin^Rθ cosθ cos Rφ (30K sin⁴θ at R = 4).
/// This is the negative of the outward radial vorticity of `rh_velocity`.
pub fn rh_curl_printed(theta: f64, phi: f64, prm: &RossbyHaurwitzParams) -> f64 {
    let (s, c) = theta.sin_cos();
    let r = prm.wave_number as f64;
    -2.0 * prm.omega * c + prm.k * (r * r + 3.0 * r + 2.0) * s.powi(prm.wave_number as i32) * c * (r * phi).cos()
}

/// Outward radial vorticity (∇×v)·r̂ of `rh_velocity`.
pub fn rh_vorticity(x: Vec3, prm: &RossbyHaurwitzParams) -> f64 {
    let (th, ph) = colat_lon(x);
    -rh_curl_printed(th, ph, prm)
}

/// Scalar used for the gradient tests (same profile as v_φ).
pub fn rh_scalar(x: Vec3, prm: &RossbyHaurwitzParams) -> f64 {
    rh_velocity(x, prm).0
}

/// Cartesian surface gradient of `rh_scalar` from its closed-form partials.
/// The ω sinθ term is a cone at the poles, so the gradient is undefined there (zero is returned).
pub fn rh_scalar_gradient(x: Vec3, prm: &RossbyHaurwitzParams) -> Vec3 {
    let (th, ph) = colat_lon(x);
    let (s, c) = th.sin_cos();
    let r = prm.wave_number as f64;
    let w = prm.wave_number as i32;
    let g = r * c * c - s * s;
    // ∂f/∂θ and (1/sinθ)∂f/∂φ
    let f_th = prm.omega * c
        + prm.k * ((r - 1.0) * s.powi(w - 2) * c * g - 2.0 * (r + 1.0) * s.powi(w) * c) * (r * ph).cos();
    let f_ph_over_s = -r * prm.k * s.powi(w - 2) * g * (r * ph).sin();
    if s == 0.0 {
        return Vec3::new(0.0, 0.0, 0.0);
    }
    let (east, north) = east_north(x);
    // θ̂ points south
    east * f_ph_over_s - north * f_th
}

fn cartesian(frames: &MovingFrameField, v: &FrameVectorField) -> Vec<Vec3> {
    (0..frames.e1.len())
        .map(|i| frames.to_cartesian(i, v.v1.values[i], v.v2.values[i]))
        .collect()
}

/// Central normal flux ½(F⁻·ν⁻ − F⁺·ν⁺) of a per-node Cartesian field.
pub fn central_flux(geo: &ElementGeometry, f: &[Vec3]) -> Vec<f64> {
    (0..geo.num_face_points())
        .map(|k| {
            let k2 = geo.face_partner[k];
            0.5 * (f[geo.face_node[k]].dot(geo.face_normal[k]) - f[geo.face_node[k2]].dot(geo.face_normal[k2]))
        })
        .collect()
}

fn weak_div_of(geo: &ElementGeometry, f: &[Vec3], flux: &[f64]) -> Vec<f64> {
    let nn = f.len();
    let (mut g1, mut g2, mut out) = (vec![0.0; nn], vec![0.0; nn], vec![0.0; nn]);
    contravariant(geo, f, &mut g1, &mut g2);
    weak_divergence(geo, &g1, &g2, flux, &mut out);
    out
}

/// ∇·v = ∇v₁·e¹ − Γ²₁₁v₂ + ∇v₂·e² + Γ²₂₁v₁
pub fn divergence_direct(
    v: &FrameVectorField,
    frames: &MovingFrameField,
    conn: &ConnectionField,
    geo: &ElementGeometry,
) -> ScalarField {
    let g1 = grad_physical(geo, &v.v1.values);
    let g2 = grad_physical(geo, &v.v2.values);
    let values = (0..geo.num_nodes())
        .map(|i| {
            g1[i].dot(frames.e1[i]) - conn.gamma_211[i] * v.v2.values[i]
                + g2[i].dot(frames.e2[i])
                + conn.gamma_221[i] * v.v1.values[i]
        })
        .collect();
    ScalarField { values }
}

/// Weak divergence with central interface flux.
pub fn divergence_weak(v: &FrameVectorField, frames: &MovingFrameField, geo: &ElementGeometry) -> ScalarField {
    let f = cartesian(frames, v);
    let flux = central_flux(geo, &f);
    ScalarField { values: weak_div_of(geo, &f, &flux) }
}

/// (∇×v)·e³ = ∇v₂·e¹ − ∇v₁·e² + v₁(∇×e¹)·e³ + v₂(∇×e²)·e³
pub fn curl_direct(
    v: &FrameVectorField,
    frames: &MovingFrameField,
    conn: &ConnectionField,
    geo: &ElementGeometry,
) -> ScalarField {
    let g1 = grad_physical(geo, &v.v1.values);
    let g2 = grad_physical(geo, &v.v2.values);
    let values = (0..geo.num_nodes())
        .map(|i| {
            g2[i].dot(frames.e1[i]) - g1[i].dot(frames.e2[i])
                + v.v1.values[i] * conn.curl3_e1[i]
                + v.v2.values[i] * conn.curl3_e2[i]
        })
        .collect();
    ScalarField { values }
}

/// Weak radial curl: ∇·(v×e³) in weak form with central flux, plus v·(∇×e³).
pub fn curl_weak(
    v: &FrameVectorField,
    frames: &MovingFrameField,
    conn: &ConnectionField,
    geo: &ElementGeometry,
) -> ScalarField {
    let f: Vec<Vec3> = cartesian(frames, v)
        .into_iter()
        .zip(&frames.e3)
        .map(|(a, &n)| a.cross(n))
        .collect();
    let flux = central_flux(geo, &f);
    let mut values = weak_div_of(geo, &f, &flux);
    for i in 0..values.len() {
        values[i] += v.v1.values[i] * conn.curl_e3_1[i] + v.v2.values[i] * conn.curl_e3_2[i];
    }
    ScalarField { values }
}

/// Frame components (∇f·e¹, ∇f·e²) of the surface gradient.
pub fn gradient_direct(f: &ScalarField, frames: &MovingFrameField, geo: &ElementGeometry) -> FrameVectorField {
    let g = grad_physical(geo, &f.values);
    FrameVectorField {
        v1: ScalarField { values: g.iter().zip(&frames.e1).map(|(a, e)| a.dot(*e)).collect() },
        v2: ScalarField { values: g.iter().zip(&frames.e2).map(|(a, e)| a.dot(*e)).collect() },
    }
}

/// Weak gradient: component i is ∇·(f eⁱ) in weak form with upwind f̃, minus f ∇·eⁱ.
pub fn gradient_weak(
    f: &ScalarField,
    frames: &MovingFrameField,
    conn: &ConnectionField,
    geo: &ElementGeometry,
) -> FrameVectorField {
    let u = &f.values;
    let comp = |e: &[Vec3], dive: &[f64]| {
        let fe: Vec<Vec3> = e.iter().zip(u).map(|(a, s)| *a * *s).collect();
        let flux: Vec<f64> = (0..geo.num_face_points())
            .map(|k| {
                let en = e[geo.face_node[k]].dot(geo.face_normal[k]);
                let ut = if en >= 0.0 { u[geo.face_node[k]] } else { u[geo.face_ext[k]] };
                ut * en
            })
            .collect();
        let mut out = weak_div_of(geo, &fe, &flux);
        for i in 0..out.len() {
            out[i] -= u[i] * dive[i];
        }
        ScalarField { values: out }
    };
    FrameVectorField { v1: comp(&frames.e1, &conn.div_e1), v2: comp(&frames.e2, &conn.div_e2) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorId {
    DivDirect,
    DivWeak,
    CurlDirect,
    CurlWeak,
    GradDirect,
    GradWeak,
}

impl OperatorId {
    pub const ALL: [OperatorId; 6] = [
        OperatorId::DivDirect,
        OperatorId::DivWeak,
        OperatorId::CurlDirect,
        OperatorId::CurlWeak,
        OperatorId::GradDirect,
        OperatorId::GradWeak,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorId::DivDirect => "div-direct",
            OperatorId::DivWeak => "div-weak",
            OperatorId::CurlDirect => "curl-direct",
            OperatorId::CurlWeak => "curl-weak",
            OperatorId::GradDirect => "grad-direct",
            OperatorId::GradWeak => "grad-weak",
        }
    }
}

impl std::str::FromStr for OperatorId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        OperatorId::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown operator '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorRow {
    pub p: usize,
    pub dof: usize,
    pub l2: f64,
    pub linf: f64,
}

/// Element mask: true where any vertex lies within `cap` colatitude of a pole.
pub fn pole_cap_mask(geo_vertices: &[Vec3], elements: &[[usize; 4]], cap: f64) -> Vec<bool> {
    elements
        .iter()
        .map(|el| {
            el.iter().any(|&v| {
                let (th, _) = colat_lon(geo_vertices[v]);
                th < cap || th > std::f64::consts::PI - cap
            })
        })
        .collect()
}

/// Errors normalised by the RMS magnitude of the input field over the included elements.
pub fn normalized_errors(geo: &ElementGeometry, err: &[f64], input_mag: &[f64], include: &[bool]) -> (f64, f64) {
    let np = geo.np();
    let (mut se, mut si, mut area, mut emax) = (0.0, 0.0, 0.0, 0.0f64);
    for idx in 0..err.len() {
        if !include[idx / np] {
            continue;
        }
        let m = geo.mass[idx];
        se += m * err[idx] * err[idx];
        si += m * input_mag[idx] * input_mag[idx];
        area += m;
        emax = emax.max(err[idx].abs());
    }
    let scale = (si / area).sqrt();
    ((se / area).sqrt() / scale, emax / scale)
}

/// Single-order evaluation of an operator on the wave field; returns (l2, linf).
pub fn evaluate_operator(
    op: OperatorId,
    geo: &ElementGeometry,
    frames: &MovingFrameField,
    conn: &ConnectionField,
    include: &[bool],
    prm: &RossbyHaurwitzParams,
) -> (f64, f64) {
    let nn = geo.num_nodes();
    let xs = &geo.x;
    match op {
        OperatorId::DivDirect | OperatorId::DivWeak | OperatorId::CurlDirect | OperatorId::CurlWeak => {
            let vel: Vec<Vec3> = xs.iter().map(|&x| rh_velocity_cartesian(x, prm)).collect();
            let v = FrameVectorField {
                v1: ScalarField { values: (0..nn).map(|i| vel[i].dot(frames.e1[i])).collect() },
                v2: ScalarField { values: (0..nn).map(|i| vel[i].dot(frames.e2[i])).collect() },
            };
            let (out, exact): (ScalarField, Vec<f64>) = match op {
                OperatorId::DivDirect => (divergence_direct(&v, frames, conn, geo), vec![0.0; nn]),
                OperatorId::DivWeak => (divergence_weak(&v, frames, geo), vec![0.0; nn]),
                OperatorId::CurlDirect => {
                    (curl_direct(&v, frames, conn, geo), xs.iter().map(|&x| rh_vorticity(x, prm)).collect())
                }
                _ => (curl_weak(&v, frames, conn, geo), xs.iter().map(|&x| rh_vorticity(x, prm)).collect()),
            };
            let err: Vec<f64> = out.values.iter().zip(&exact).map(|(a, b)| a - b).collect();
            let mag: Vec<f64> = vel.iter().map(|v| v.norm()).collect();
            normalized_errors(geo, &err, &mag, include)
        }
        OperatorId::GradDirect | OperatorId::GradWeak => {
            let f = ScalarField { values: xs.iter().map(|&x| rh_scalar(x, prm)).collect() };
            let g = if op == OperatorId::GradDirect {
                gradient_direct(&f, frames, geo)
            } else {
                gradient_weak(&f, frames, conn, geo)
            };
            let err: Vec<f64> = (0..nn)
                .map(|i| {
                    let ex = rh_scalar_gradient(xs[i], prm);
                    let d1 = g.v1.values[i] - ex.dot(frames.e1[i]);
                    let d2 = g.v2.values[i] - ex.dot(frames.e2[i]);
                    (d1 * d1 + d2 * d2).sqrt()
                })
                .collect();
            let mag: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
            normalized_errors(geo, &err, &mag, include)
        }
    }
}

/// Convergence table of one operator over solution orders `ps` (geometry order = p).
pub fn run_operator_study(
    op: OperatorId,
    strategy: NodeStrategy,
    alignment: FrameAlignment,
    ps: &[usize],
    n_per_face: usize,
) -> Result<Vec<OperatorRow>> {
    let lin = generate_cubed_sphere(n_per_face)?;
    let prm = RossbyHaurwitzParams::default();
    let cap = pole_cap_mask(&lin.vertices, &lin.elements, POLE_CAP_COLATITUDE);
    let mask = match alignment {
        FrameAlignment::Spherical => cap.clone(),
        FrameAlignment::Local => vec![false; lin.num_elements()],
    };
    if mask.iter().all(|&m| m) {
        return Err(Error::PoleProximity { element: 0, z: 1.0 });
    }
    // the scalar is a cone at the poles; its error is measured beyond two element widths of them
    let grad = matches!(op, OperatorId::GradDirect | OperatorId::GradWeak);
    let grad_cap = pole_cap_mask(&lin.vertices, &lin.elements, GRADIENT_CAP_WIDTHS * lin.h);
    let include: Vec<bool> = (0..cap.len()).map(|e| !(mask[e] || grad && grad_cap[e])).collect();
    let mut rows = Vec::with_capacity(ps.len());
    for &p in ps {
        let re = ReferenceElement::new(p)?;
        let mesh = insert_high_order_nodes(&lin, p, strategy)?;
        let geo = compute_geometry(&mesh, &re)?;
        let frames = build_frames_excluding(&geo, alignment, &mask)?;
        let conn = build_connections(&frames, &geo);
        let (l2, linf) = evaluate_operator(op, &geo, &frames, &conn, &include, &prm);
        rows.push(OperatorRow { p, dof: geo.num_nodes(), l2, linf });
    }
    Ok(rows)
}

/// Least-squares slope of log10(err) against p, in decades per order (positive = decaying).
pub fn decay_rate(rows: &[OperatorRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.p as f64, r.l2.log10())).collect();
    -crate::diagnostics::fit_slope(&pts)
}
