//! Transverse-magnetic Maxwell system on the sphere: tangential H = H¹e¹ + H²e², radial E = E³e³.

use serde::{Deserialize, Serialize};

use super::{march, weak_div_into, Discretization, DEFAULT_CADENCE};
use crate::diagnostics::{DiagnosticsSeries, Record};
use crate::error::{Error, Result};
use crate::sem::ops::grad_physical;
use crate::solvers::advection::unit_from_lon_colat;
use crate::vec3::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaxwellParams {
    /// Pulse centre as (longitude, colatitude).
    pub center: (f64, f64),
    /// E³ = exp(−(d / radius)²) in great-circle distance d.
    pub radius: f64,
    pub amplitude: f64,
    /// Upwind weight in (0, 1].
    pub alpha: f64,
    pub eps3: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
    pub dt: f64,
    pub t_final: f64,
    pub cadence: usize,
}

impl Default for MaxwellParams {
    fn default() -> Self {
        use std::f64::consts::FRAC_PI_4;
        MaxwellParams {
            center: (FRAC_PI_4, FRAC_PI_4),
            radius: 0.2,
            amplitude: 1.0,
            alpha: 1.0,
            eps3: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            sigma1: 0.0,
            sigma2: 0.0,
            sigma3: 0.0,
            dt: 1e-3,
            t_final: 24.0,
            cadence: DEFAULT_CADENCE,
        }
    }
}

impl MaxwellParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidInput(format!("flux parameter {} outside (0, 1]", self.alpha)));
        }
        if !(self.eps3 > 0.0 && self.mu1 > 0.0 && self.mu2 > 0.0) {
            return Err(Error::InvalidInput("material constants must be positive".into()));
        }
        if self.eps3 != 1.0 || self.mu1 != 1.0 || self.mu2 != 1.0 {
            // the flux below assumes unit impedance
            return Err(Error::InvalidInput("only unit ε³, μ¹, μ² are supported".into()));
        }
        Ok(())
    }

    /// Impedances Z_i = sqrt(μ^{3−i} / ε³) and admittances Y_i = 1 / Z_i.
    pub fn impedances(&self) -> ([f64; 2], [f64; 2]) {
        let z = [(self.mu2 / self.eps3).sqrt(), (self.mu1 / self.eps3).sqrt()];
        (z, [1.0 / z[0], 1.0 / z[1]])
    }

    pub fn pulse(&self, x: Vec3) -> f64 {
        let c = unit_from_lon_colat(self.center.0, self.center.1);
        let d = crate::vec3::arc_length(c, x.normalized());
        self.amplitude * (-(d / self.radius).powi(2)).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellTMState {
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub e3: Vec<f64>,
}

pub struct MaxwellOperator<'a> {
    disc: &'a Discretization,
    prm: MaxwellParams,
    g1: Vec<f64>,
    g2: Vec<f64>,
    flux: Vec<f64>,
}

impl<'a> MaxwellOperator<'a> {
    pub fn new(disc: &'a Discretization, prm: MaxwellParams) -> Self {
        let n = disc.dof();
        MaxwellOperator {
            disc,
            prm,
            g1: vec![0.0; n],
            g2: vec![0.0; n],
            flux: vec![0.0; disc.geo.num_face_points()],
        }
    }

    /// y = [H¹, H², E³]
    pub fn rhs(&mut self, y: &[f64], dy: &mut [f64]) {
        let n = self.disc.dof();
        let geo = &self.disc.geo;
        let fr = &self.disc.frames;
        let conn = &self.disc.conn;
        let alpha = self.prm.alpha;
        let (h1, rest) = y.split_at(n);
        let (h2, e) = rest.split_at(n);
        let (dh1, rest) = dy.split_at_mut(n);
        let (dh2, de) = rest.split_at_mut(n);
        let hv = |i: usize| fr.to_cartesian(i, h1[i], h2[i]);
        // τ = ν × e³ on each side
        let tau = |f: usize| geo.face_normal[f].cross(fr.e3[geo.face_node[f]]);
        let nf = geo.num_face_points();

        // ∂t E = ∇·(H × e³) + H·(∇ × e³)
        for f in 0..nf {
            let (im, ip) = (geo.face_node[f], geo.face_ext[f]);
            let hm = hv(im).dot(tau(f));
            let hp = -hv(ip).dot(tau(f));
            self.flux[f] = 0.5 * (hm - hp) + 0.5 * alpha * (e[im] - e[ip]);
        }
        weak_div_into(geo, |i| fr.e3[i].cross(hv(i)), &self.flux, &mut self.g1, &mut self.g2, de);
        for i in 0..n {
            de[i] = -de[i] + h1[i] * conn.curl_e3_1[i] + h2[i] * conn.curl_e3_2[i] - self.prm.sigma3 * e[i];
        }

        // ∂t H^i = −e^{3i}·∇E − E e^i·(∇ × e³), split so the volume terms cancel the E equation
        // exactly in the discrete energy
        let grad_e = grad_physical(geo, e);
        for (k, dh, curl, sigma) in
            [(0, &mut *dh1, &conn.curl_e3_1, self.prm.sigma1), (1, &mut *dh2, &conn.curl_e3_2, self.prm.sigma2)]
        {
            // e^{31} = e², e^{32} = −e¹
            let e3i = |i: usize| if k == 0 { fr.e2[i] } else { -fr.e1[i] };
            let hk = if k == 0 { h1 } else { h2 };
            for i in 0..n {
                dh[i] = 0.0;
            }
            for f in 0..nf {
                let (im, ip) = (geo.face_node[f], geo.face_ext[f]);
                let hm = hv(im).dot(tau(f));
                let hp = -hv(ip).dot(tau(f));
                let estar = 0.5 * (e[im] + e[ip]) + 0.5 * alpha * (hm + hp);
                dh[im] -= geo.face_w[f] * geo.face_ds[f] * (estar - e[im]) * e3i(im).dot(geo.face_normal[f]);
            }
            for i in 0..n {
                dh[i] = dh[i] * geo.inv_mass[i] - grad_e[i].dot(e3i(i)) - e[i] * curl[i] - sigma * hk[i];
            }
        }
    }

    pub fn energy(&self, y: &[f64]) -> f64 {
        tm_energy(self.disc, &self.prm, y)
    }
}

/// Pulse run; `energy_rel_err` is the relative loss (E(0) − E(t)) / E(0), which is
/// non-negative when the scheme dissipates.
pub fn maxwell_tm_solve(disc: &Discretization, prm: &MaxwellParams) -> Result<DiagnosticsSeries> {
    prm.validate()?;
    let n = disc.dof();
    let mut y = vec![0.0; 3 * n];
    for (i, x) in disc.unit_points().iter().enumerate() {
        y[2 * n + i] = prm.pulse(*x);
    }
    maxwell_run(disc, prm, y).map(|(s, _)| s)
}

/// Run from an explicit initial state; also returns the final state.
pub fn maxwell_run(disc: &Discretization, prm: &MaxwellParams, mut y: Vec<f64>) -> Result<(DiagnosticsSeries, MaxwellTMState)> {
    let mut op = MaxwellOperator::new(disc, *prm);
    let e0 = op.energy(&y);
    let meta = disc.metadata("maxwell-tm", prm.dt, prm.t_final, "radius / wave speed");
    let series = march(
        &mut y,
        prm.dt,
        prm.t_final,
        prm.cadence,
        meta,
        |_, s, d| {
            op.rhs(s, d);
            Ok(())
        },
        |t, s| {
            let loss = if e0 > 0.0 { ((e0 - tm_energy(disc, prm, s)) / e0).abs() } else { 0.0 };
            let mut r = Record { time: t, energy_rel_err: Some(loss), ..Default::default() };
            r.linf = Some(s.iter().fold(0.0f64, |a, v| a.max(v.abs())));
            Ok(r)
        },
    )?;
    let n = disc.dof();
    Ok((series, MaxwellTMState { h1: y[..n].to_vec(), h2: y[n..2 * n].to_vec(), e3: y[2 * n..].to_vec() }))
}

/// ½∫(ε|E|² + μ|H|²)
pub fn tm_energy(disc: &Discretization, prm: &MaxwellParams, y: &[f64]) -> f64 {
    let n = disc.dof();
    let m = &disc.geo.mass;
    (0..n)
        .map(|i| 0.5 * m[i] * (prm.eps3 * y[2 * n + i].powi(2) + prm.mu1 * y[i].powi(2) + prm.mu2 * y[n + i].powi(2)))
        .sum()
}
