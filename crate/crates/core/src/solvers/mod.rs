//! Time-dependent moving-frame DG solvers and their shared plumbing.

pub mod advection;
pub mod diffusion;
pub mod maxwell;
pub mod swe;

use crate::diagnostics::{DiagnosticsSeries, Metadata, Record};
use crate::error::{Error, Result};
use crate::frames::{build_connections, build_frames_excluding, ConnectionField, FrameAlignment, MovingFrameField};
use crate::mesh::{generate_cubed_sphere, insert_high_order_nodes, NodeStrategy};
use crate::operators::{pole_cap_mask, POLE_CAP_COLATITUDE};
use crate::sem::geometry::{compute_geometry, ElementGeometry};
use crate::sem::gll::ReferenceElement;
use crate::vec3::Vec3;

/// Default number of steps between diagnostics records.
pub const DEFAULT_CADENCE: usize = 100;

/// Mesh, metric terms, frames and connections at one (n, p, strategy, alignment).
#[derive(Debug, Clone)]
pub struct Discretization {
    pub n_per_face: usize,
    pub p: usize,
    pub strategy: NodeStrategy,
    pub alignment: FrameAlignment,
    pub h: f64,
    pub geo: ElementGeometry,
    pub frames: MovingFrameField,
    pub conn: ConnectionField,
}

impl Discretization {
    /// Geometry order equals solution order. Spherical frames fall back to local ones
    /// on pole-cap elements.
    pub fn new(n_per_face: usize, p: usize, strategy: NodeStrategy, alignment: FrameAlignment) -> Result<Self> {
        let re = ReferenceElement::new(p)?;
        let lin = generate_cubed_sphere(n_per_face)?;
        let mesh = insert_high_order_nodes(&lin, p, strategy)?;
        let geo = compute_geometry(&mesh, &re)?;
        let mask = match alignment {
            FrameAlignment::Spherical => pole_cap_mask(&lin.vertices, &lin.elements, POLE_CAP_COLATITUDE),
            FrameAlignment::Local => vec![false; lin.num_elements()],
        };
        let frames = build_frames_excluding(&geo, alignment, &mask)?;
        let conn = build_connections(&frames, &geo);
        Ok(Discretization { n_per_face, p, strategy, alignment, h: lin.h, geo, frames, conn })
    }

    pub fn dof(&self) -> usize {
        self.geo.num_nodes()
    }

    /// Radial projections of the mapped nodes.
    pub fn unit_points(&self) -> Vec<Vec3> {
        self.geo.x.iter().map(|x| x.normalized()).collect()
    }

    /// Frame components of per-node Cartesian vectors.
    pub fn components(&self, v: &[Vec3]) -> (Vec<f64>, Vec<f64>) {
        (
            v.iter().zip(&self.frames.e1).map(|(a, e)| a.dot(*e)).collect(),
            v.iter().zip(&self.frames.e2).map(|(a, e)| a.dot(*e)).collect(),
        )
    }

    pub fn metadata(&self, case: &str, dt: f64, t_final: f64, time_unit: &str) -> Metadata {
        Metadata {
            case: case.to_string(),
            strategy: self.strategy.to_string(),
            alignment: self.alignment.to_string(),
            p: self.p,
            n_per_face: self.n_per_face,
            h: self.h,
            dt,
            t_final,
            dof: self.dof(),
            wall_time_s: 0.0,
            time_unit: time_unit.to_string(),
        }
    }

    pub fn integrate(&self, u: &[f64]) -> f64 {
        crate::sem::ops::integrate(&self.geo, u)
    }

    /// Relative L2 and L∞ errors of a set of fields against their references.
    pub fn relative_errors(&self, fields: &[(&[f64], &[f64])]) -> (f64, f64) {
        let (mut se, mut sr, mut emax, mut rmax) = (0.0, 0.0, 0.0f64, 0.0f64);
        for (u, r) in fields {
            for i in 0..u.len() {
                let d = u[i] - r[i];
                se += self.geo.mass[i] * d * d;
                sr += self.geo.mass[i] * r[i] * r[i];
                emax = emax.max(d.abs());
                rmax = rmax.max(r[i].abs());
            }
        }
        ((se / sr).sqrt(), emax / rmax)
    }

    /// Area-mean L2 error sqrt(∫e² / ∫1) and max |e|, for data whose peak is already of unit size.
    pub fn mean_errors(&self, u: &[f64], r: &[f64]) -> (f64, f64) {
        let (mut se, mut area, mut emax) = (0.0, 0.0, 0.0f64);
        for i in 0..u.len() {
            let d = u[i] - r[i];
            se += self.geo.mass[i] * d * d;
            area += self.geo.mass[i];
            emax = emax.max(d.abs());
        }
        ((se / area).sqrt(), emax)
    }
}

/// Classical fourth-order Runge-Kutta with preallocated stages.
#[derive(Debug, Clone)]
pub struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(n: usize) -> Self {
        Rk4 { k: [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]], tmp: vec![0.0; n] }
    }

    /// Advance `y` from `t` to `t + dt`; fails with NonFiniteState on NaN/Inf output.
    pub fn step<F>(&mut self, y: &mut [f64], t: f64, dt: f64, mut rhs: F) -> Result<()>
    where
        F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    {
        let n = y.len();
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        rhs(t, y, k1)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * dt * k1[i];
        }
        rhs(t + 0.5 * dt, tmp, k2)?;
        for i in 0..n {
            tmp[i] = y[i] + 0.5 * dt * k2[i];
        }
        rhs(t + 0.5 * dt, tmp, k3)?;
        for i in 0..n {
            tmp[i] = y[i] + dt * k3[i];
        }
        rhs(t + dt, tmp, k4)?;
        let mut finite = true;
        for i in 0..n {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            finite &= y[i].is_finite();
        }
        if finite {
            Ok(())
        } else {
            Err(Error::NonFiniteState { time: t + dt })
        }
    }
}

/// One RK4 step of y' = f(t, y) on a plain vector; convenience for tests and small systems.
pub fn rk4_step<F>(y: &mut [f64], t: f64, dt: f64, rhs: F) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    Rk4::new(y.len()).step(y, t, dt, rhs)
}

/// Fixed-step march to `t_final`, recording at t = 0, every `cadence` steps and at the end.
pub(crate) fn march<F, R>(
    y: &mut [f64],
    dt: f64,
    t_final: f64,
    cadence: usize,
    meta: Metadata,
    mut rhs: F,
    mut record: R,
) -> Result<DiagnosticsSeries>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
    R: FnMut(f64, &[f64]) -> Result<Record>,
{
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidInput(format!("dt = {dt}, t_final = {t_final}")));
    }
    let start = std::time::Instant::now();
    let steps = (t_final / dt).round() as usize;
    let cadence = cadence.max(1);
    let mut series = DiagnosticsSeries::new(meta);
    series.push(record(0.0, y)?)?;
    let mut rk = Rk4::new(y.len());
    for s in 0..steps {
        let t = s as f64 * dt;
        rk.step(y, t, dt, &mut rhs)?;
        if (s + 1) % cadence == 0 || s + 1 == steps {
            series.push(record((s + 1) as f64 * dt, y)?)?;
        }
    }
    series.metadata.wall_time_s = start.elapsed().as_secs_f64();
    Ok(series)
}

/// Weak divergence of the per-node Cartesian field `f(idx)` with normal flux `flux`,
/// reusing the two contravariant buffers.
pub(crate) fn weak_div_into(
    geo: &ElementGeometry,
    f: impl Fn(usize) -> Vec3,
    flux: &[f64],
    g1: &mut [f64],
    g2: &mut [f64],
    out: &mut [f64],
) {
    for idx in 0..g1.len() {
        let v = f(idx);
        g1[idx] = geo.ja1[idx].dot(v);
        g2[idx] = geo.ja2[idx].dot(v);
    }
    crate::sem::ops::weak_divergence(geo, g1, g2, flux, out);
}
