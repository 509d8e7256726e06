//! Collocation kernels shared by every operator and solver.

use crate::sem::geometry::ElementGeometry;
use crate::vec3::Vec3;

/// Contravariant flux components G1 = (J a^1)·F, G2 = (J a^2)·F.
pub fn contravariant(geo: &ElementGeometry, f: &[Vec3], g1: &mut [f64], g2: &mut [f64]) {
    for idx in 0..f.len() {
        g1[idx] = geo.ja1[idx].dot(f[idx]);
        g2[idx] = geo.ja2[idx].dot(f[idx]);
    }
}

fn stiffness_t(geo: &ElementGeometry) -> Vec<f64> {
    let re = &geo.re;
    let n = re.n1();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for a in 0..n {
            q[i * n + a] = re.weights[a] * re.d(a, i);
        }
    }
    q
}

/// Weak divergence M^{-1}[ -∫∇φ·F + ∮ φ Fn ] with F given by contravariant
/// components (g1, g2) and the normal flux `flux` per edge point.
pub fn weak_divergence(geo: &ElementGeometry, g1: &[f64], g2: &[f64], flux: &[f64], out: &mut [f64]) {
    let n = geo.n1();
    let np = geo.np();
    let w = &geo.re.weights;
    let q = stiffness_t(geo);
    for e in 0..geo.ne {
        let base = e * np;
        let (g1e, g2e) = (&g1[base..base + np], &g2[base..base + np]);
        let oute = &mut out[base..base + np];
        for j in 0..n {
            for i in 0..n {
                let qi = &q[i * n..(i + 1) * n];
                let qj = &q[j * n..(j + 1) * n];
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                for a in 0..n {
                    s1 += qi[a] * g1e[j * n + a];
                    s2 += qj[a] * g2e[a * n + i];
                }
                oute[j * n + i] = -(w[j] * s1 + w[i] * s2);
            }
        }
        for f in geo.element_faces(e) {
            out[geo.face_node[f]] += geo.face_w[f] * geo.face_ds[f] * flux[f];
        }
        for idx in base..base + np {
            out[idx] *= geo.inv_mass[idx];
        }
    }
}

/// Accumulate ∫_edge flux φ ds into `out` (no mass inversion).
pub fn lift_edge_flux(geo: &ElementGeometry, flux: &[f64], out: &mut [f64]) {
    for f in 0..geo.num_face_points() {
        out[geo.face_node[f]] += geo.face_w[f] * geo.face_ds[f] * flux[f];
    }
}

/// Reference derivatives (∂ξ u, ∂η u) of a nodal field.
pub fn ref_derivatives(geo: &ElementGeometry, u: &[f64], du: &mut [f64], dv: &mut [f64]) {
    let n = geo.n1();
    let np = geo.np();
    let d = &geo.re.diff;
    for e in 0..geo.ne {
        let b = e * np;
        for j in 0..n {
            for i in 0..n {
                let di = &d[i * n..(i + 1) * n];
                let dj = &d[j * n..(j + 1) * n];
                let mut s1 = 0.0;
                let mut s2 = 0.0;
                for a in 0..n {
                    s1 += di[a] * u[b + j * n + a];
                    s2 += dj[a] * u[b + a * n + i];
                }
                du[b + j * n + i] = s1;
                dv[b + j * n + i] = s2;
            }
        }
    }
}

/// Strong conservative divergence (1/J)(∂ξ g1 + ∂η g2).
pub fn strong_divergence(geo: &ElementGeometry, g1: &[f64], g2: &[f64], out: &mut [f64]) {
    let nn = g1.len();
    let mut d1 = vec![0.0; nn];
    let mut d2 = vec![0.0; nn];
    let mut scratch = vec![0.0; nn];
    ref_derivatives(geo, g1, &mut d1, &mut scratch);
    ref_derivatives(geo, g2, &mut scratch, &mut d2);
    for idx in 0..nn {
        out[idx] = (d1[idx] + d2[idx]) / geo.jac[idx];
    }
}

/// Surface gradient a^1 ∂ξu + a^2 ∂ηu.
pub fn grad_physical(geo: &ElementGeometry, u: &[f64]) -> Vec<Vec3> {
    let nn = u.len();
    let mut du = vec![0.0; nn];
    let mut dv = vec![0.0; nn];
    ref_derivatives(geo, u, &mut du, &mut dv);
    (0..nn)
        .map(|i| (geo.ja1[i] * du[i] + geo.ja2[i] * dv[i]) / geo.jac[i])
        .collect()
}

pub fn integrate(geo: &ElementGeometry, u: &[f64]) -> f64 {
    u.iter().zip(&geo.mass).map(|(a, m)| a * m).sum()
}

/// Interior and exterior values at every edge point.
pub fn traces(geo: &ElementGeometry, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let inner = geo.face_node.iter().map(|&i| u[i]).collect();
    let outer = geo.face_ext.iter().map(|&i| u[i]).collect();
    (inner, outer)
}
