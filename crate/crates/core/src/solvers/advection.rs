//! Scalar conservation law ∂u/∂t + ∇·(u v) = 0 with upwind flux, driven by solid-body rotation.

use serde::{Deserialize, Serialize};

use super::{march, Discretization, DEFAULT_CADENCE};
use crate::diagnostics::{DiagnosticsSeries, Record};
use crate::error::{Error, Result};
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdvectionCase {
    /// Bell centre as (longitude, colatitude).
    pub bell_center: (f64, f64),
    pub bell_radius: f64,
    /// Tilt of the rotation axis from the north pole.
    pub alpha: f64,
    pub angular_frequency: f64,
    pub dt: f64,
    pub t_final: f64,
    pub cadence: usize,
}

impl Default for AdvectionCase {
    fn default() -> Self {
        use std::f64::consts::PI;
        AdvectionCase {
            bell_center: (PI / 4.0, 3.0 * PI / 4.0),
            bell_radius: 7.0 * PI / 64.0,
            alpha: PI / 4.0,
            angular_frequency: PI,
            dt: 1e-4,
            t_final: 2.0,
            cadence: DEFAULT_CADENCE,
        }
    }
}

pub fn unit_from_lon_colat(phi: f64, theta: f64) -> Vec3 {
    Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos())
}

impl AdvectionCase {
    pub fn validate(&self) -> Result<()> {
        if !(self.bell_radius > 0.0 && self.bell_radius < std::f64::consts::PI) {
            return Err(Error::InvalidInput(format!("bell radius {} outside (0, π)", self.bell_radius)));
        }
        Ok(())
    }

    pub fn axis(&self) -> Vec3 {
        Vec3::new(-self.alpha.sin(), 0.0, self.alpha.cos())
    }

    pub fn velocity(&self, x: Vec3) -> Vec3 {
        self.axis().cross(x.normalized()) * self.angular_frequency
    }

    pub fn bell(&self, x: Vec3) -> f64 {
        let c = unit_from_lon_colat(self.bell_center.0, self.bell_center.1);
        let d = crate::vec3::arc_length(c, x.normalized());
        if d < self.bell_radius {
            0.5 * (1.0 + (std::f64::consts::PI * d / self.bell_radius).cos())
        } else {
            0.0
        }
    }
}

/// Precomputed transport coefficients: J a^i · v per node and v·ν per edge point.
pub struct AdvectionOperator<'a> {
    disc: &'a Discretization,
    c1: Vec<f64>,
    c2: Vec<f64>,
    vn: Vec<f64>,
}

impl<'a> AdvectionOperator<'a> {
    /// `velocity` is reduced to its moving-frame components, v = v¹e¹ + v²e².
    pub fn new(disc: &'a Discretization, velocity: &[Vec3]) -> Self {
        let geo = &disc.geo;
        let (v1, v2) = disc.components(velocity);
        let v: Vec<Vec3> = (0..geo.num_nodes()).map(|i| disc.frames.to_cartesian(i, v1[i], v2[i])).collect();
        AdvectionOperator {
            disc,
            c1: (0..v.len()).map(|i| geo.ja1[i].dot(v[i])).collect(),
            c2: (0..v.len()).map(|i| geo.ja2[i].dot(v[i])).collect(),
            vn: (0..geo.num_face_points()).map(|f| v[geo.face_node[f]].dot(geo.face_normal[f])).collect(),
        }
    }

    pub fn rhs(&self, u: &[f64], du: &mut [f64], scratch: &mut AdvectionScratch) {
        let geo = &self.disc.geo;
        for f in 0..self.vn.len() {
            let vn = self.vn[f];
            let up = if vn >= 0.0 { u[geo.face_node[f]] } else { u[geo.face_ext[f]] };
            scratch.flux[f] = vn * up;
        }
        for i in 0..u.len() {
            scratch.g1[i] = self.c1[i] * u[i];
            scratch.g2[i] = self.c2[i] * u[i];
        }
        crate::sem::ops::weak_divergence(geo, &scratch.g1, &scratch.g2, &scratch.flux, du);
        du.iter_mut().for_each(|v| *v = -*v);
    }
}

pub struct AdvectionScratch {
    g1: Vec<f64>,
    g2: Vec<f64>,
    flux: Vec<f64>,
}

impl AdvectionScratch {
    pub fn new(disc: &Discretization) -> Self {
        let n = disc.dof();
        AdvectionScratch { g1: vec![0.0; n], g2: vec![0.0; n], flux: vec![0.0; disc.geo.num_face_points()] }
    }
}

/// Transport the bell one revolution; records L2/L∞ against the initial bell and relative mass error.
pub fn advect_solve(disc: &Discretization, case: &AdvectionCase) -> Result<DiagnosticsSeries> {
    case.validate()?;
    let xs = disc.unit_points();
    let vel: Vec<Vec3> = xs.iter().map(|&x| case.velocity(x)).collect();
    advect_with_velocity(disc, case, &vel)
}

pub fn advect_with_velocity(disc: &Discretization, case: &AdvectionCase, vel: &[Vec3]) -> Result<DiagnosticsSeries> {
    let xs = disc.unit_points();
    let u0: Vec<f64> = xs.iter().map(|&x| case.bell(x)).collect();
    let mass0 = disc.integrate(&u0);
    let op = AdvectionOperator::new(disc, vel);
    let mut scratch = AdvectionScratch::new(disc);
    let mut u = u0.clone();
    let meta = disc.metadata("advection", case.dt, case.t_final, "revolution periods / 2");
    march(
        &mut u,
        case.dt,
        case.t_final,
        case.cadence,
        meta,
        |_, y, d| {
            op.rhs(y, d, &mut scratch);
            Ok(())
        },
        |t, y| {
            let (l2, linf) = disc.mean_errors(y, &u0);
            let mass = ((disc.integrate(y) - mass0) / mass0).abs();
            Ok(Record { time: t, l2: Some(l2), linf: Some(linf), mass_rel_err: Some(mass), energy_rel_err: None })
        },
    )
}
