//! Linear reaction-diffusion pair solved with a local DG (mixed q = ∇u) discretisation.

use serde::{Deserialize, Serialize};

use super::{march, weak_div_into, Discretization, DEFAULT_CADENCE};
use crate::diagnostics::{DiagnosticsSeries, Record};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReactionDiffusionParams {
    pub mu: f64,
    pub nu: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// Harmonic degree and order of the initial condition.
    pub n: u32,
    pub m: i32,
    /// Initial amplitudes of u and v.
    pub u_amp: f64,
    pub v_amp: f64,
    pub dt: f64,
    pub t_final: f64,
    /// Interior penalty on the jump of u in the q flux.
    pub ldg_alpha: f64,
    /// Upwinding switch; 0.5 takes u from the edge owner and q from the other side.
    pub ldg_beta: f64,
    pub cadence: usize,
}

impl Default for ReactionDiffusionParams {
    fn default() -> Self {
        ReactionDiffusionParams {
            mu: 1e-3,
            nu: 2e-3,
            a: -6.0,
            b: 4.0,
            c: 5.0,
            d: -4.0,
            n: 2,
            m: 1,
            u_amp: 1.0,
            v_amp: 1.0,
            dt: 1e-4,
            t_final: 1.0,
            ldg_alpha: 200.0,
            ldg_beta: 0.5,
            cadence: DEFAULT_CADENCE,
        }
    }
}

impl ReactionDiffusionParams {
    pub fn validate(&self) -> Result<()> {
        if self.a + self.d > 0.0 {
            return Err(Error::InvalidInput("reaction matrix must have non-positive trace".into()));
        }
        if self.mu < 0.0 || self.nu < 0.0 || self.m.unsigned_abs() > self.n {
            return Err(Error::InvalidInput("need μ, ν ≥ 0 and |m| ≤ n".into()));
        }
        Ok(())
    }

    /// Amplitude matrix M_n acting on the (u, v) coefficients of a degree-n harmonic.
    pub fn harmonic_matrix(&self) -> [[f64; 2]; 2] {
        let l = (self.n * (self.n + 1)) as f64;
        [[-self.mu * l + self.a, self.b], [self.c, -self.nu * l + self.d]]
    }
}

/// Real spherical harmonic P_n^|m|(z)·{cos, sin}(|m|φ), evaluated from Cartesian coordinates
/// so it is well defined at the poles.
pub fn real_harmonic(n: u32, m: i32, x: Vec3) -> f64 {
    let u = x.normalized();
    let am = m.unsigned_abs();
    // Q_l^m = P_l^m / sin^m θ, by the usual upward recurrence in l
    let mut q_mm = 1.0;
    for k in 1..=am {
        q_mm *= (2 * k - 1) as f64;
    }
    let q = if n == am {
        q_mm
    } else {
        let mut prev = q_mm;
        let mut cur = u.z * (2 * am + 1) as f64 * q_mm;
        for l in am + 2..=n {
            let next = ((2 * l - 1) as f64 * u.z * cur - (l + am - 1) as f64 * prev) / (l - am) as f64;
            prev = cur;
            cur = next;
        }
        cur
    };
    // sin^m θ · e^{imφ} = (x + iy)^m
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..am {
        let r = re * u.x - im * u.y;
        im = re * u.y + im * u.x;
        re = r;
    }
    q * if m >= 0 { re } else { im }
}

/// Coefficient pair evolved in the e^{γt}(cosh δt, sinh δt) form, with δ² < 0
/// continued to cos/sin.
pub fn rd_amplitudes(t: f64, prm: &ReactionDiffusionParams) -> (f64, f64) {
    let mm = prm.harmonic_matrix();
    let gamma = 0.5 * (mm[0][0] + mm[1][1]);
    let det = mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0];
    let d2 = gamma * gamma - det;
    let (ch, sh_over_delta) = if d2 > 0.0 {
        let dl = d2.sqrt();
        ((dl * t).cosh(), (dl * t).sinh() / dl)
    } else if d2 < 0.0 {
        let w = (-d2).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    } else {
        (1.0, t)
    };
    let g = (gamma * t).exp();
    let (u0, v0) = (prm.u_amp, prm.v_amp);
    let bu = (mm[0][0] - gamma) * u0 + mm[0][1] * v0;
    let bv = mm[1][0] * u0 + (mm[1][1] - gamma) * v0;
    (g * (u0 * ch + bu * sh_over_delta), g * (v0 * ch + bv * sh_over_delta))
}

/// Exact (u, v) at colatitude θ, longitude φ and time t.
pub fn rd_exact_solution(theta: f64, phi: f64, t: f64, prm: &ReactionDiffusionParams) -> (f64, f64) {
    let x = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    let y = real_harmonic(prm.n, prm.m, x);
    let (a, b) = rd_amplitudes(t, prm);
    (a * y, b * y)
}

/// Laplace-Beltrami operator in LDG form on one scalar.
pub struct LdgLaplacian<'a> {
    disc: &'a Discretization,
    alpha: f64,
    beta: f64,
    q1: Vec<f64>,
    q2: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
    flux: Vec<f64>,
}

impl<'a> LdgLaplacian<'a> {
    pub fn new(disc: &'a Discretization, alpha: f64, beta: f64) -> Self {
        let n = disc.dof();
        let nf = disc.geo.num_face_points();
        LdgLaplacian {
            disc,
            alpha,
            beta,
            q1: vec![0.0; n],
            q2: vec![0.0; n],
            g1: vec![0.0; n],
            g2: vec![0.0; n],
            flux: vec![0.0; nf],
        }
    }

    /// out = ∇²u
    pub fn apply(&mut self, u: &[f64], out: &mut [f64]) {
        let geo = &self.disc.geo;
        let fr = &self.disc.frames;
        let conn = &self.disc.conn;
        let nf = geo.num_face_points();
        let side = |f: usize| if geo.face_owner[f] { 1.0 } else { -1.0 };
        // q_m = ∇u·e^m
        for (m, e, dive) in [(1, &fr.e1, &conn.div_e1), (2, &fr.e2, &conn.div_e2)] {
            for f in 0..nf {
                let (um, up) = (u[geo.face_node[f]], u[geo.face_ext[f]]);
                let ut = 0.5 * (um + up) + self.beta * side(f) * (um - up);
                self.flux[f] = ut * e[geo.face_node[f]].dot(geo.face_normal[f]);
            }
            let q = if m == 1 { &mut self.q1 } else { &mut self.q2 };
            weak_div_into(geo, |i| e[i] * u[i], &self.flux, &mut self.g1, &mut self.g2, q);
            for i in 0..q.len() {
                q[i] -= u[i] * dive[i];
            }
        }
        let (q1, q2) = (&self.q1, &self.q2);
        let qv = |i: usize| fr.to_cartesian(i, q1[i], q2[i]);
        for f in 0..nf {
            let (im, ip) = (geo.face_node[f], geo.face_ext[f]);
            let qm = qv(im).dot(geo.face_normal[f]);
            let qp = qv(ip).dot(geo.face_normal[geo.face_partner[f]]);
            self.flux[f] = 0.5 * (qm - qp) - self.alpha * (u[im] - u[ip]) - self.beta * side(f) * (qm + qp);
        }
        weak_div_into(geo, qv, &self.flux, &mut self.g1, &mut self.g2, out);
    }
}

pub fn reaction_diffusion_solve(disc: &Discretization, prm: &ReactionDiffusionParams) -> Result<DiagnosticsSeries> {
    prm.validate()?;
    let n = disc.dof();
    let ys: Vec<f64> = disc.unit_points().iter().map(|&x| real_harmonic(prm.n, prm.m, x)).collect();
    let mut state: Vec<f64> = ys.iter().map(|y| prm.u_amp * y).chain(ys.iter().map(|y| prm.v_amp * y)).collect();
    let mut lap = LdgLaplacian::new(disc, prm.ldg_alpha, prm.ldg_beta);
    let mut lu = vec![0.0; n];
    let meta = disc.metadata("reaction-diffusion", prm.dt, prm.t_final, "dimensionless");
    march(
        &mut state,
        prm.dt,
        prm.t_final,
        prm.cadence,
        meta,
        |_, y, dy| {
            let (u, v) = y.split_at(n);
            let (du, dv) = dy.split_at_mut(n);
            lap.apply(u, &mut lu);
            for i in 0..n {
                du[i] = prm.mu * lu[i] + prm.a * u[i] + prm.b * v[i];
            }
            lap.apply(v, &mut lu);
            for i in 0..n {
                dv[i] = prm.nu * lu[i] + prm.c * u[i] + prm.d * v[i];
            }
            Ok(())
        },
        |t, y| {
            let (a, b) = rd_amplitudes(t, prm);
            let ue: Vec<f64> = ys.iter().map(|s| a * s).collect();
            let ve: Vec<f64> = ys.iter().map(|s| b * s).collect();
            let (l2, linf) = disc.relative_errors(&[(&y[..n], &ue), (&y[n..], &ve)]);
            Ok(Record { time: t, l2: Some(l2), linf: Some(linf), ..Default::default() })
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::FrameAlignment;
    use crate::mesh::NodeStrategy;

    /// exp(A t) by scaling and squaring of a Taylor series.
    fn expm(a: [[f64; 2]; 2], t: f64) -> [[f64; 2]; 2] {
        let mul = |x: [[f64; 2]; 2], y: [[f64; 2]; 2]| {
            let mut r = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
                }
            }
            r
        };
        let s = 10;
        let h = t / (1u64 << s) as f64;
        let b = [[a[0][0] * h, a[0][1] * h], [a[1][0] * h, a[1][1] * h]];
        let mut r = [[1.0, 0.0], [0.0, 1.0]];
        let mut term = r;
        for k in 1..20 {
            term = mul(term, b);
            term.iter_mut().flatten().for_each(|v| *v /= k as f64);
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..s {
            r = mul(r, r);
        }
        r
    }

    fn oracle(t: f64, prm: &ReactionDiffusionParams) -> (f64, f64) {
        let e = expm(prm.harmonic_matrix(), t);
        (e[0][0] * prm.u_amp + e[0][1] * prm.v_amp, e[1][0] * prm.u_amp + e[1][1] * prm.v_amp)
    }

    #[test]
    fn amplitudes_match_matrix_exponential() {
        let prm = ReactionDiffusionParams::default();
        for t in [0.0, 0.3, 1.0] {
            let (a, b) = rd_amplitudes(t, &prm);
            let (x, y) = oracle(t, &prm);
            assert!((a - x).abs() < 1e-12 && (b - y).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn oscillatory_branch_matches_matrix_exponential() {
        let prm = ReactionDiffusionParams { b: -4.0, ..Default::default() };
        let mm = prm.harmonic_matrix();
        let g = 0.5 * (mm[0][0] + mm[1][1]);
        assert!(g * g < mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0]);
        let (a, b) = rd_amplitudes(0.8, &prm);
        let (x, y) = oracle(0.8, &prm);
        assert!((a - x).abs() < 1e-12 && (b - y).abs() < 1e-12);
    }

    #[test]
    fn initial_amplitudes_and_decoupled_decay() {
        let prm = ReactionDiffusionParams { u_amp: 0.7, v_amp: -0.2, ..Default::default() };
        assert_eq!(rd_amplitudes(0.0, &prm), (0.7, -0.2));
        let prm = ReactionDiffusionParams { b: 0.0, c: 0.0, ..Default::default() };
        let (a, _) = rd_amplitudes(0.5, &prm);
        assert!((a - ((-prm.mu * 6.0 + prm.a) * 0.5).exp()).abs() < 1e-14);
    }

    #[test]
    fn harmonic_is_proportional_to_xz() {
        for x in [Vec3::new(0.3, 0.4, 0.5), Vec3::new(-1.0, 2.0, 0.1)] {
            let u = x.normalized();
            assert!((real_harmonic(2, 1, x) - 3.0 * u.x * u.z).abs() < 1e-14);
            assert!((real_harmonic(2, -2, x) - 3.0 * 2.0 * u.x * u.y).abs() < 1e-14);
            assert!((real_harmonic(3, 0, x) - 0.5 * (5.0 * u.z.powi(3) - 3.0 * u.z)).abs() < 1e-14);
        }
    }

    #[test]
    fn ldg_laplacian_of_harmonic() {
        let disc = Discretization::new(2, 8, NodeStrategy::GeodesicOptimized, FrameAlignment::Local).unwrap();
        let y: Vec<f64> = disc.unit_points().iter().map(|&x| real_harmonic(2, 1, x)).collect();
        let mut lap = LdgLaplacian::new(&disc, 200.0, 0.5);
        let mut out = vec![0.0; y.len()];
        lap.apply(&y, &mut out);
        let ex: Vec<f64> = y.iter().map(|v| -6.0 * v).collect();
        let (l2, _) = disc.relative_errors(&[(&out, &ex)]);
        assert!(l2 < 1e-4, "{l2}");
        let ones = vec![1.0; y.len()];
        lap.apply(&ones, &mut out);
        assert!(out.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn uniform_mode_follows_reaction_ode() {
        let prm = ReactionDiffusionParams { n: 0, m: 0, t_final: 0.05, cadence: 500, ..Default::default() };
        let disc = Discretization::new(1, 3, NodeStrategy::GeodesicOptimized, FrameAlignment::Local).unwrap();
        let s = reaction_diffusion_solve(&disc, &prm).unwrap();
        assert!(s.last().unwrap().l2.unwrap() < 1e-9);
    }

    #[test]
    fn pure_diffusion_conserves_integral() {
        let prm = ReactionDiffusionParams { a: 0.0, b: 0.0, c: 0.0, d: 0.0, mu: 1e-3, nu: 1e-3, ..Default::default() };
        let disc = Discretization::new(2, 4, NodeStrategy::GeodesicOptimized, FrameAlignment::Local).unwrap();
        let u: Vec<f64> = disc.unit_points().iter().map(|x| 1.0 + x.x * x.x * x.y + x.z).collect();
        let mut lap = LdgLaplacian::new(&disc, prm.ldg_alpha, prm.ldg_beta);
        let mut out = vec![0.0; u.len()];
        lap.apply(&u, &mut out);
        // d/dt ∫u = μ ∫∇²u
        assert!(disc.integrate(&out).abs() < 1e-10, "{}", disc.integrate(&out));
    }
}
