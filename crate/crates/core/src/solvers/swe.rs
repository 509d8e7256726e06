//! Shallow water equations in moving-frame momentum components with a Lax-Friedrichs flux,
//! and the Williamson test cases in day/earth-radius units.

use super::{march, weak_div_into, Discretization, DEFAULT_CADENCE};
use crate::diagnostics::{DiagnosticsSeries, Record};
use crate::error::{Error, Result};
use crate::operators::{rh_velocity_cartesian, RossbyHaurwitzParams};
use crate::sem::ops::{grad_physical, ref_derivatives};
use crate::vec3::Vec3;

pub const EARTH_RADIUS: f64 = 6.37122e6;
pub const GRAVITY: f64 = 9.80616;
pub const EARTH_OMEGA: f64 = 7.292e-5;
pub const DAY: f64 = 86400.0;

/// g in earth radii per day².
pub fn g_tilde() -> f64 {
    GRAVITY * DAY * DAY / EARTH_RADIUS
}

/// Ω in radians per day.
pub fn omega_tilde() -> f64 {
    EARTH_OMEGA * DAY
}

/// Depth in earth radii from a geopotential in m²/s².
pub fn depth_from_geopotential(q: f64) -> f64 {
    q / (GRAVITY * EARTH_RADIUS)
}

/// Speed in earth radii per day from m/s.
pub fn speed_from_si(v: f64) -> f64 {
    v * DAY / EARTH_RADIUS
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WilliamsonCase {
    SteadyZonal { alpha: f64 },
    UnsteadyZonal { alpha: f64 },
    RossbyHaurwitz { disturbed: bool },
    IsolatedMountain,
    UnstableJet,
}

impl WilliamsonCase {
    pub fn name(&self) -> &'static str {
        match self {
            WilliamsonCase::SteadyZonal { .. } => "steady-zonal",
            WilliamsonCase::UnsteadyZonal { .. } => "unsteady-zonal",
            WilliamsonCase::RossbyHaurwitz { disturbed: false } => "rossby-haurwitz",
            WilliamsonCase::RossbyHaurwitz { disturbed: true } => "rossby-haurwitz-disturbed",
            WilliamsonCase::IsolatedMountain => "isolated-mountain",
            WilliamsonCase::UnstableJet => "unstable-jet",
        }
    }

    pub fn default_dt(&self) -> f64 {
        match self {
            WilliamsonCase::SteadyZonal { .. } | WilliamsonCase::UnsteadyZonal { .. } => 5e-4,
            _ => 1e-4,
        }
    }

    pub fn has_exact_solution(&self) -> bool {
        matches!(self, WilliamsonCase::SteadyZonal { .. } | WilliamsonCase::UnsteadyZonal { .. })
    }
}

impl std::str::FromStr for WilliamsonCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        use std::f64::consts::FRAC_PI_4;
        Ok(match s {
            "steady-zonal" => WilliamsonCase::SteadyZonal { alpha: FRAC_PI_4 },
            "unsteady-zonal" => WilliamsonCase::UnsteadyZonal { alpha: FRAC_PI_4 },
            "rossby-haurwitz" => WilliamsonCase::RossbyHaurwitz { disturbed: false },
            "rossby-haurwitz-disturbed" => WilliamsonCase::RossbyHaurwitz { disturbed: true },
            "isolated-mountain" => WilliamsonCase::IsolatedMountain,
            "unstable-jet" => WilliamsonCase::UnstableJet,
            _ => return Err(Error::InvalidInput(format!("unknown SWE case '{s}'"))),
        })
    }
}

/// Latitude and longitude of the radial projection of `x`.
pub fn lat_lon(x: Vec3) -> (f64, f64) {
    let u = x.normalized();
    (u.z.clamp(-1.0, 1.0).asin(), u.y.atan2(u.x))
}

/// Pointwise data of a case at time t: total depth, still-water depth, Coriolis, velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CasePoint {
    pub h: f64,
    pub h0: f64,
    pub f: f64,
    pub u: Vec3,
}

/// Zonal flows: solid-body rotation u0 a×x about a tilted axis.
fn zonal_axis(alpha: f64, rot: f64) -> Vec3 {
    Vec3::new(-alpha.sin() * rot.cos(), alpha.sin() * rot.sin(), alpha.cos())
}

pub fn steady_zonal(x: Vec3, alpha: f64) -> CasePoint {
    let x = x.normalized();
    let (g, om) = (g_tilde(), omega_tilde());
    let u0 = 2.0 * std::f64::consts::PI / 12.0;
    let a = zonal_axis(alpha, 0.0);
    let s = a.dot(x);
    let h0 = depth_from_geopotential(2.94e4);
    CasePoint { h: h0 - (om * u0 + 0.5 * u0 * u0) * s * s / g, h0, f: 2.0 * om * s, u: a.cross(x) * u0 }
}

pub fn unsteady_zonal(x: Vec3, alpha: f64, t: f64) -> CasePoint {
    let x = x.normalized();
    let (g, om) = (g_tilde(), omega_tilde());
    let u0 = 2.0 * std::f64::consts::PI / 12.0;
    let a = zonal_axis(alpha, om * t);
    let oz = om * x.z;
    let h0 = depth_from_geopotential(133681.0 - 10.0) - oz * oz / (2.0 * g);
    let eta = (-(u0 * a.dot(x) + oz).powi(2) + oz * oz) / (2.0 * g);
    CasePoint { h: h0 + eta, h0, f: 2.0 * oz, u: a.cross(x) * u0 }
}

pub fn rossby_haurwitz(x: Vec3, disturbed: bool) -> CasePoint {
    let x = x.normalized();
    let (g, om) = (g_tilde(), omega_tilde());
    let prm = RossbyHaurwitzParams { omega: 7.848e-6 * DAY, k: 7.848e-6 * DAY, wave_number: 4 };
    let (w, k, r) = (prm.omega, prm.k, prm.wave_number as f64);
    let ri = prm.wave_number as i32;
    let (lat, lon) = lat_lon(x);
    let c = lat.cos();
    let ca = 2.0 * r * r - r - 2.0;
    let cb = r * r + 2.0 * r + 2.0;
    let a = 0.5 * w * (2.0 * om + w) * c * c
        + 0.25 * k * k * c.powi(2 * ri - 2) * ((r + 1.0) * c.powi(4) + ca * c * c - 2.0 * r * r);
    let b = 2.0 * (om + w) * k / ((r + 1.0) * (r + 2.0)) * c.powi(ri) * (cb - (r + 1.0).powi(2) * c * c);
    let cc = 0.25 * k * k * c.powi(2 * ri) * ((r + 1.0) * c * c - (r + 2.0));
    let mut eta = (a + b * (r * lon).cos() + cc * (2.0 * r * lon).cos()) / g;
    if disturbed {
        let (p0, t0) = (40f64.to_radians(), 50f64.to_radians());
        let x0 = Vec3::new(p0.cos() * t0.cos(), p0.sin() * t0.cos(), t0.sin());
        eta *= 1.0 + x.dot(x0) / 40.0;
    }
    let h0 = 8000.0 / EARTH_RADIUS;
    CasePoint { h: h0 + eta, h0, f: 2.0 * om * x.z, u: rh_velocity_cartesian(x, &prm) }
}

pub fn isolated_mountain(x: Vec3) -> CasePoint {
    use std::f64::consts::PI;
    let x = x.normalized();
    let (g, om) = (g_tilde(), omega_tilde());
    let u0 = speed_from_si(20.0);
    let (lat, lon) = lat_lon(x);
    let rr = PI / 9.0;
    let (lon_c, lat_c) = (1.5 * PI, PI / 6.0);
    let dl = (lon - lon_c + PI).rem_euclid(2.0 * PI) - PI;
    let r = (rr * rr).min(dl * dl + (lat - lat_c).powi(2)).sqrt();
    let h0 = 5960.0 / EARTH_RADIUS - 2000.0 / EARTH_RADIUS * (1.0 - r / rr);
    let eta = -(om * u0 + 0.5 * u0 * u0) * x.z * x.z / g;
    CasePoint { h: h0 + eta, h0, f: 2.0 * om * x.z, u: Vec3::new(0.0, 0.0, 1.0).cross(x) * u0 }
}

/// Balanced mid-latitude jet with a localized height bump.
pub struct JetProfile {
    lat: Vec<f64>,
    height: Vec<f64>,
}

const JET_LAT0: f64 = std::f64::consts::PI / 7.0;
const JET_LAT1: f64 = std::f64::consts::FRAC_PI_2 - JET_LAT0;

fn jet_speed(lat: f64) -> f64 {
    if lat <= JET_LAT0 || lat >= JET_LAT1 {
        return 0.0;
    }
    let en = (-4.0 / (JET_LAT1 - JET_LAT0).powi(2)).exp();
    speed_from_si(80.0) / en * (1.0 / ((lat - JET_LAT0) * (lat - JET_LAT1))).exp()
}

impl JetProfile {
    pub fn new() -> Self {
        let (g, om) = (g_tilde(), omega_tilde());
        let n = 4000;
        let dlat = std::f64::consts::PI / n as f64;
        let lat: Vec<f64> = (0..=n).map(|i| -std::f64::consts::FRAC_PI_2 + i as f64 * dlat).collect();
        let integrand = |l: f64| {
            let u = jet_speed(l);
            u * (2.0 * om * l.sin() + l.tan() * u)
        };
        // g H(lat) = g H_ref − ∫ u (f + u tan) dlat, by Simpson on each cell
        let mut height = vec![0.0; n + 1];
        for i in 0..n {
            let (a, b) = (lat[i], lat[i + 1]);
            let inc = (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
            height[i + 1] = height[i] - inc / g;
        }
        // shift so the area mean depth is 10 km
        let mean: f64 = (0..n)
            .map(|i| 0.5 * (height[i] * lat[i].cos() + height[i + 1] * lat[i + 1].cos()) * dlat)
            .sum::<f64>()
            / 2.0;
        let target = 10000.0 / EARTH_RADIUS;
        height.iter_mut().for_each(|h| *h += target - mean);
        JetProfile { lat, height }
    }

    pub fn point(&self, x: Vec3) -> CasePoint {
        let x = x.normalized();
        let (lat, lon) = lat_lon(x);
        let t = (lat - self.lat[0]) / (self.lat[1] - self.lat[0]);
        let i = (t.floor() as usize).min(self.lat.len() - 2);
        let w = t - i as f64;
        let mut h = (1.0 - w) * self.height[i] + w * self.height[i + 1];
        let (alpha, beta, lat2) = (1.0 / 3.0, 1.0 / 15.0, std::f64::consts::FRAC_PI_4);
        h += 120.0 / EARTH_RADIUS * lat.cos() * (-(lon / alpha).powi(2)).exp() * (-((lat2 - lat) / beta).powi(2)).exp();
        let u = Vec3::new(0.0, 0.0, 1.0).cross(x);
        let speed = if lat.cos() > 0.0 { jet_speed(lat) / lat.cos() } else { 0.0 };
        CasePoint { h, h0: 10000.0 / EARTH_RADIUS, f: 2.0 * omega_tilde() * x.z, u: u * speed }
    }
}

impl Default for JetProfile {
    fn default() -> Self {
        Self::new()
    }
}

/// Evaluate a case at the radially projected points `xs` and time `t`.
pub fn case_points(case: &WilliamsonCase, xs: &[Vec3], t: f64) -> Vec<CasePoint> {
    match *case {
        WilliamsonCase::SteadyZonal { alpha } => xs.iter().map(|&x| steady_zonal(x, alpha)).collect(),
        WilliamsonCase::UnsteadyZonal { alpha } => xs.iter().map(|&x| unsteady_zonal(x, alpha, t)).collect(),
        WilliamsonCase::RossbyHaurwitz { disturbed } => xs.iter().map(|&x| rossby_haurwitz(x, disturbed)).collect(),
        WilliamsonCase::IsolatedMountain => xs.iter().map(|&x| isolated_mountain(x)).collect(),
        WilliamsonCase::UnstableJet => {
            let jet = JetProfile::new();
            xs.iter().map(|&x| jet.point(x)).collect()
        }
    }
}

/// Total depth and frame-component momenta, each one ScalarField-sized block.
#[derive(Debug, Clone, PartialEq)]
pub struct SWEState {
    pub h: Vec<f64>,
    pub hu1: Vec<f64>,
    pub hu2: Vec<f64>,
}

impl SWEState {
    pub fn to_vec(&self) -> Vec<f64> {
        self.h.iter().chain(&self.hu1).chain(&self.hu2).copied().collect()
    }

    pub fn from_slice(y: &[f64]) -> Self {
        let n = y.len() / 3;
        SWEState { h: y[..n].to_vec(), hu1: y[n..2 * n].to_vec(), hu2: y[2 * n..].to_vec() }
    }
}

/// Static fields of a run: still-water depth, its gradient, Coriolis parameter and g̃.
#[derive(Debug, Clone)]
pub struct SweFields {
    pub h0: Vec<f64>,
    pub grad_h0: Vec<Vec3>,
    pub f: Vec<f64>,
    pub g: f64,
}

pub fn williamson_initial_state(case: &WilliamsonCase, disc: &Discretization) -> (SWEState, SweFields) {
    let pts = case_points(case, &disc.unit_points(), 0.0);
    let h: Vec<f64> = pts.iter().map(|p| p.h).collect();
    let vel: Vec<Vec3> = pts.iter().map(|p| p.u).collect();
    let (u1, u2) = disc.components(&vel);
    let h0: Vec<f64> = pts.iter().map(|p| p.h0).collect();
    let grad_h0 = grad_physical(&disc.geo, &h0);
    let state = SWEState {
        hu1: h.iter().zip(&u1).map(|(a, b)| a * b).collect(),
        hu2: h.iter().zip(&u2).map(|(a, b)| a * b).collect(),
        h,
    };
    (state, SweFields { h0, grad_h0, f: pts.iter().map(|p| p.f).collect(), g: g_tilde() })
}

pub struct SweOperator<'a> {
    disc: &'a Discretization,
    fields: SweFields,
    u: Vec<Vec3>,
    g1: Vec<f64>,
    g2: Vec<f64>,
    flux_h: Vec<f64>,
    flux_m: Vec<Vec3>,
    flux: Vec<f64>,
    own: Vec<f64>,
    divu: Vec<f64>,
    sd: Vec<f64>,
    du: Vec<f64>,
    dv: Vec<f64>,
    grad_eta: Vec<Vec3>,
}

impl<'a> SweOperator<'a> {
    pub fn new(disc: &'a Discretization, fields: SweFields) -> Self {
        let n = disc.dof();
        let nf = disc.geo.num_face_points();
        SweOperator {
            disc,
            fields,
            u: vec![Vec3::ZERO; n],
            g1: vec![0.0; n],
            g2: vec![0.0; n],
            flux_h: vec![0.0; nf],
            flux_m: vec![Vec3::ZERO; nf],
            flux: vec![0.0; nf],
            own: vec![0.0; nf],
            divu: vec![0.0; n],
            sd: vec![0.0; n],
            du: vec![0.0; n],
            dv: vec![0.0; n],
            grad_eta: vec![Vec3::ZERO; n],
        }
    }

    pub fn fields(&self) -> &SweFields {
        &self.fields
    }

    /// Tendency of y = [H, Hu¹, Hu²]; fails with PositivityLoss if H ≤ 0 anywhere.
    pub fn rhs(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let disc = self.disc;
        let n = disc.dof();
        let geo = &disc.geo;
        let fr = &disc.frames;
        let conn = &disc.conn;
        let g = self.fields.g;
        let (h, rest) = y.split_at(n);
        let (m1, m2) = rest.split_at(n);
        if h.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::PositivityLoss { time: t });
        }
        for i in 0..n {
            self.u[i] = fr.to_cartesian(i, m1[i] / h[i], m2[i] / h[i]);
        }
        let u = &self.u;
        for f in 0..geo.num_face_points() {
            let (im, ip) = (geo.face_node[f], geo.face_ext[f]);
            let nu = geo.face_normal[f];
            let (hm, hp) = (h[im], h[ip]);
            let (um, up) = (u[im], u[ip]);
            let (mm, mp) = (um * hm, up * hp);
            let (unm, unp) = (um.dot(nu), up.dot(nu));
            let lam = (unm.abs() + (g * hm).sqrt()).max(unp.abs() + (g * hp).sqrt());
            self.flux_h[f] = 0.5 * (mm + mp).dot(nu) + 0.5 * lam * (hm - hp);
            self.flux_m[f] = (mm * unm + mp * unp) * 0.5 + nu * (0.25 * g * (hm * hm + hp * hp)) + (mm - mp) * (0.5 * lam);
        }
        let (dh, rest) = dy.split_at_mut(n);
        let (dm1, dm2) = rest.split_at_mut(n);
        weak_div_into(geo, |i| u[i] * h[i], &self.flux_h, &mut self.g1, &mut self.g2, dh);
        dh.iter_mut().for_each(|v| *v = -*v);
        // pressure in product-rule form −g̃H e^i·∇(H − H0), which pairs exactly with the
        // mass equation in the discrete energy
        for i in 0..n {
            self.sd[i] = h[i] - self.fields.h0[i];
        }
        ref_derivatives(geo, &self.sd, &mut self.du, &mut self.dv);
        for i in 0..n {
            self.grad_eta[i] = (geo.ja1[i] * self.du[i] + geo.ja2[i] * self.dv[i]) / geo.jac[i];
        }
        // volume-only divergence of u, for the split advective form below
        for f in 0..self.own.len() {
            self.own[f] = u[geo.face_node[f]].dot(geo.face_normal[f]);
        }
        weak_div_into(geo, |i| u[i], &self.own, &mut self.g1, &mut self.g2, &mut self.divu);
        for (k, dm, e) in [(0, &mut *dm1, &fr.e1), (1, &mut *dm2, &fr.e2)] {
            for f in 0..self.flux.len() {
                let i = geo.face_node[f];
                self.flux[f] = self.flux_m[f].dot(e[i]) - 0.5 * g * h[i] * h[i] * e[i].dot(geo.face_normal[f]);
            }
            let mk = if k == 0 { m1 } else { m2 };
            weak_div_into(geo, |i| u[i] * mk[i], &self.flux, &mut self.g1, &mut self.g2, dm);
            // average of the conservative and advective forms of ∇·(u M_k); removes the
            // aliasing that otherwise destabilizes long runs at moderate order
            for f in 0..self.own.len() {
                let i = geo.face_node[f];
                self.own[f] = mk[i] * u[i].dot(geo.face_normal[f]);
            }
            weak_div_into(geo, |i| u[i] * mk[i], &self.own, &mut self.g1, &mut self.g2, &mut self.sd);
            ref_derivatives(geo, mk, &mut self.du, &mut self.dv);
            for i in 0..n {
                let grad_m = (geo.ja1[i] * self.du[i] + geo.ja2[i] * self.dv[i]) / geo.jac[i];
                dm[i] += 0.5 * (u[i].dot(grad_m) + mk[i] * self.divu[i] - self.sd[i]);
            }
            for i in 0..n {
                let (u1, u2) = (m1[i] / h[i], m2[i] / h[i]);
                // M·(u·∇)e^i from the frame divergences
                let turn = -u1 * conn.div_e2[i] + u2 * conn.div_e1[i];
                let (conn_term, coriolis) = if k == 0 {
                    (h[i] * u2 * turn, self.fields.f[i] * m2[i])
                } else {
                    (-h[i] * u1 * turn, -self.fields.f[i] * m1[i])
                };
                dm[i] = -dm[i] - g * h[i] * self.grad_eta[i].dot(e[i]) + conn_term + coriolis;
            }
        }
        Ok(())
    }
}

pub fn swe_mass(disc: &Discretization, y: &[f64]) -> f64 {
    disc.integrate(&y[..disc.dof()])
}

/// ∫ ½H|u|² + ½g̃(H² − H0²)
pub fn swe_energy(disc: &Discretization, fields: &SweFields, y: &[f64]) -> f64 {
    let n = disc.dof();
    let m = &disc.geo.mass;
    (0..n)
        .map(|i| {
            let h = y[i];
            let ke = 0.5 * (y[n + i].powi(2) + y[2 * n + i].powi(2)) / h;
            m[i] * (ke + 0.5 * fields.g * (h * h - fields.h0[i] * fields.h0[i]))
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweRun {
    pub case: WilliamsonCase,
    pub dt: f64,
    /// Days.
    pub t_final: f64,
    pub cadence: usize,
}

impl SweRun {
    pub fn new(case: WilliamsonCase, t_final: f64) -> Self {
        SweRun { case, dt: case.default_dt(), t_final, cadence: DEFAULT_CADENCE }
    }
}

pub fn swe_run_case(disc: &Discretization, run: &SweRun) -> Result<DiagnosticsSeries> {
    let (state, fields) = williamson_initial_state(&run.case, disc);
    let mut y = state.to_vec();
    let n = disc.dof();
    let mass0 = swe_mass(disc, &y);
    let energy0 = swe_energy(disc, &fields, &y);
    let xs = disc.unit_points();
    let case = run.case;
    let exact = case.has_exact_solution();
    let mut op = SweOperator::new(disc, fields.clone());
    let meta = disc.metadata(case.name(), run.dt, run.t_final, "days");
    march(&mut y, run.dt, run.t_final, run.cadence, meta, |t, s, d| op.rhs(t, s, d), |t, s| {
        let mut r = Record {
            time: t,
            mass_rel_err: Some(((swe_mass(disc, s) - mass0) / mass0).abs()),
            energy_rel_err: Some(((swe_energy(disc, &fields, s) - energy0) / energy0).abs()),
            ..Default::default()
        };
        if exact {
            let he: Vec<f64> = case_points(&case, &xs, t).iter().map(|p| p.h).collect();
            let (l2, linf) = disc.relative_errors(&[(&s[..n], &he)]);
            r.l2 = Some(l2);
            r.linf = Some(linf);
        }
        Ok(r)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::FrameAlignment;
    use crate::mesh::NodeStrategy;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn at_lat_lon(lat: f64, lon: f64) -> Vec3 {
        Vec3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin())
    }

    fn east_north(lat: f64, lon: f64) -> (Vec3, Vec3) {
        (Vec3::new(-lon.sin(), lon.cos(), 0.0), Vec3::new(-lat.sin() * lon.cos(), -lat.sin() * lon.sin(), lat.cos()))
    }

    #[test]
    fn normalisation_constants() {
        assert!((g_tilde() - 11489.5).abs() < 0.1);
        assert!((omega_tilde() - 6.300288).abs() < 1e-9);
        assert!((depth_from_geopotential(GRAVITY * EARTH_RADIUS) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn steady_zonal_matches_printed_components() {
        let (alpha, u0) = (0.3, 2.0 * PI / 12.0);
        for (lat, lon) in [(0.2, 1.0), (-0.7, 2.5), (1.1, -0.4)] {
            let p = steady_zonal(at_lat_lon(lat, lon), alpha);
            let (e, nth) = east_north(lat, lon);
            let uphi = u0 * (lat.cos() * alpha.cos() + lat.sin() * lon.cos() * alpha.sin());
            let uth = -u0 * lon.sin() * alpha.sin();
            assert!((p.u.dot(e) - uphi).abs() < 1e-14);
            assert!((p.u.dot(nth) - uth).abs() < 1e-14);
            let s = -lon.cos() * lat.cos() * alpha.sin() + lat.sin() * alpha.cos();
            assert!((p.f - 2.0 * omega_tilde() * s).abs() < 1e-12);
        }
        // α = 0 has no meridional component
        let p = steady_zonal(at_lat_lon(0.4, 0.9), 0.0);
        assert!(p.u.dot(east_north(0.4, 0.9).1).abs() < 1e-15);
    }

    #[test]
    fn unsteady_zonal_matches_printed_components() {
        let (alpha, u0, om) = (FRAC_PI_4, 2.0 * PI / 12.0, omega_tilde());
        let t = 0.13;
        let (lat, lon) = (0.5, 2.0);
        let p = unsteady_zonal(at_lat_lon(lat, lon), alpha, t);
        let tr = lon.cos() * (om * t).cos() - lon.sin() * (om * t).sin();
        let (e, nth) = east_north(lat, lon);
        assert!((p.u.dot(e) - u0 * (tr * alpha.sin() * lat.sin() + alpha.cos() * lat.cos())).abs() < 1e-13);
        let uth = -u0 * (lon.sin() * (om * t).cos() + lon.cos() * (om * t).sin()) * alpha.sin();
        assert!((p.u.dot(nth) - uth).abs() < 1e-13);
        let g = g_tilde();
        let eta = (-(u0 * (-tr * alpha.sin() * lat.cos() + alpha.cos() * lat.sin()) + om * lat.sin()).powi(2)
            + (om * lat.sin()).powi(2))
            / (2.0 * g);
        assert!((p.h - p.h0 - eta).abs() < 1e-16);
    }

    #[test]
    fn rossby_haurwitz_equator_coefficients() {
        // B and C carry cos^R(lat) and vanish at the poles; the depth there is h0 + A/g
        let p = rossby_haurwitz(Vec3::new(0.0, 0.0, 1.0), false);
        assert!((p.h - 8000.0 / EARTH_RADIUS).abs() < 1e-15);
        let q = rossby_haurwitz(at_lat_lon(0.3, 0.0), false);
        let r = rossby_haurwitz(at_lat_lon(0.3, PI / 4.0), false);
        assert!(q.h != r.h);
        assert!(rossby_haurwitz(at_lat_lon(0.3, 0.1), false).u.is_finite());
    }

    #[test]
    fn mountain_peak_depth() {
        let p = isolated_mountain(at_lat_lon(PI / 6.0, 1.5 * PI));
        assert!((p.h0 - (5960.0 - 2000.0) / EARTH_RADIUS).abs() < 1e-15);
        let far = isolated_mountain(at_lat_lon(-0.5, 0.3));
        assert!((far.h0 - 5960.0 / EARTH_RADIUS).abs() < 1e-15);
    }

    #[test]
    fn jet_mean_depth_and_balance() {
        let jet = JetProfile::new();
        assert!(jet.point(at_lat_lon(-FRAC_PI_2 + 1e-9, 0.0)).u.norm() == 0.0);
        let peak = jet.point(at_lat_lon(PI / 4.0, PI));
        assert!((peak.u.norm() - speed_from_si(80.0)).abs() < 1e-3 * speed_from_si(80.0));
        // depth drops across the jet towards the pole
        assert!(jet.point(at_lat_lon(1.3, PI)).h < jet.point(at_lat_lon(0.2, PI)).h);
    }

    #[test]
    fn lake_at_rest_is_well_balanced() {
        for strategy in [NodeStrategy::GeodesicOptimized, NodeStrategy::naive()] {
            let disc = Discretization::new(2, 5, strategy, FrameAlignment::Local).unwrap();
            let n = disc.dof();
            let h0 = depth_from_geopotential(2.94e4);
            let fields = SweFields { h0: vec![h0; n], grad_h0: vec![Vec3::ZERO; n], f: vec![1.0; n], g: g_tilde() };
            let mut op = SweOperator::new(&disc, fields);
            let y: Vec<f64> = (0..3 * n).map(|i| if i < n { h0 } else { 0.0 }).collect();
            let mut d = vec![0.0; 3 * n];
            op.rhs(0.0, &y, &mut d).unwrap();
            assert!(d.iter().all(|v| v.abs() <= 1e-10), "{}", d.iter().fold(0.0f64, |a, v| a.max(v.abs())));
        }
    }

    #[test]
    fn positivity_loss_reported() {
        let disc = Discretization::new(1, 2, NodeStrategy::GeodesicOptimized, FrameAlignment::Local).unwrap();
        let (mut st, fields) = williamson_initial_state(&WilliamsonCase::SteadyZonal { alpha: 0.0 }, &disc);
        st.h[3] = -1.0;
        let mut op = SweOperator::new(&disc, fields);
        let mut d = vec![0.0; 3 * disc.dof()];
        assert!(matches!(op.rhs(2.5, &st.to_vec(), &mut d), Err(Error::PositivityLoss { time }) if time == 2.5));
    }

    #[test]
    fn zero_step_run_has_zero_errors() {
        let disc = Discretization::new(2, 3, NodeStrategy::GeodesicOptimized, FrameAlignment::Local).unwrap();
        let run = SweRun { t_final: 0.0, ..SweRun::new(WilliamsonCase::SteadyZonal { alpha: FRAC_PI_4 }, 0.0) };
        let s = swe_run_case(&disc, &run).unwrap();
        assert_eq!(s.records.len(), 1);
        let r = s.records[0];
        assert_eq!((r.mass_rel_err, r.energy_rel_err, r.l2), (Some(0.0), Some(0.0), Some(0.0)));
    }

    #[test]
    fn steady_residual_decays_with_order() {
        let res = |p: usize| {
            let disc = Discretization::new(2, p, NodeStrategy::GeodesicOptimized, FrameAlignment::Local).unwrap();
            let (st, fields) = williamson_initial_state(&WilliamsonCase::SteadyZonal { alpha: FRAC_PI_4 }, &disc);
            let mut op = SweOperator::new(&disc, fields);
            let y = st.to_vec();
            let mut d = vec![0.0; y.len()];
            op.rhs(0.0, &y, &mut d).unwrap();
            let sq: Vec<f64> = d[..disc.dof()].iter().map(|v| v * v).collect();
            disc.integrate(&sq).sqrt()
        };
        let (a, b) = (res(3), res(6));
        assert!(b < a / 50.0, "{a} {b}");
    }
}

