use crate::error::{Error, Result};
use crate::mesh::cubed::{edge_corners, from_gnomonic, gnomonic, LinearSphereMesh};
use crate::sem::gll::{gll_nodes_weights, lagrange_matrix};
use crate::vec3::{slerp, Vec3};

pub const DEFAULT_FIXED_ORDER: usize = 2;
pub const SPRING_TOL: f64 = 1e-12;
pub const SPRING_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStrategy {
    /// Geometry frozen at a low order, higher-order nodes resampled from it.
    NaiveProjection { p_geom_fixed: usize },
    /// Geodesic GLL edge nodes, transfinite + spring interior, projected onto the sphere.
    GeodesicOptimized,
}

impl NodeStrategy {
    pub fn naive() -> Self {
        NodeStrategy::NaiveProjection { p_geom_fixed: DEFAULT_FIXED_ORDER }
    }

    pub fn name(&self) -> &'static str {
        match self {
            NodeStrategy::NaiveProjection { .. } => "naive",
            NodeStrategy::GeodesicOptimized => "optimized",
        }
    }
}

impl std::str::FromStr for NodeStrategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(NodeStrategy::naive()),
            "optimized" => Ok(NodeStrategy::GeodesicOptimized),
            _ => match s.strip_prefix("naive:").map(str::parse::<usize>) {
                Some(Ok(q)) if q >= 1 => Ok(NodeStrategy::NaiveProjection { p_geom_fixed: q }),
                _ => Err(Error::InvalidInput(format!("unknown strategy '{s}' (naive, naive:<order>, optimized)"))),
            },
        }
    }
}

impl std::fmt::Display for NodeStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeStrategy::NaiveProjection { p_geom_fixed } if *p_geom_fixed != DEFAULT_FIXED_ORDER => {
                write!(f, "naive:{p_geom_fixed}")
            }
            s => f.write_str(s.name()),
        }
    }
}

/// Tensor-product polynomial map from [-1,1]^2 to R^3.
#[derive(Debug, Clone)]
pub struct ElementMapping {
    pub p_geom: usize,
    /// Row-major: node (i, j) at j * (p_geom+1) + i, i along xi.
    pub control_nodes: Vec<Vec3>,
}

impl ElementMapping {
    /// Evaluate on the tensor grid `pts` x `pts` given the 1D Lagrange matrix from the control nodes.
    pub fn sample_with(&self, lag: &[f64], npts: usize) -> Vec<Vec3> {
        let n = self.p_geom + 1;
        // contract along xi first
        let mut tmp = vec![Vec3::ZERO; npts * n];
        for j in 0..n {
            for r in 0..npts {
                let mut s = Vec3::ZERO;
                for i in 0..n {
                    let l = lag[r * n + i];
                    if l != 0.0 {
                        s += self.control_nodes[j * n + i] * l;
                    }
                }
                tmp[j * npts + r] = s;
            }
        }
        let mut out = vec![Vec3::ZERO; npts * npts];
        for q in 0..npts {
            for r in 0..npts {
                let mut s = Vec3::ZERO;
                for j in 0..n {
                    let l = lag[q * n + j];
                    if l != 0.0 {
                        s += tmp[j * npts + r] * l;
                    }
                }
                out[q * npts + r] = s;
            }
        }
        out
    }

    pub fn sample(&self, geom_nodes: &[f64], pts: &[f64]) -> Vec<Vec3> {
        self.sample_with(&lagrange_matrix(geom_nodes, pts), pts.len())
    }

    pub fn evaluate(&self, geom_nodes: &[f64], xi: f64, eta: f64) -> Vec3 {
        let n = self.p_geom + 1;
        let lx = lagrange_matrix(geom_nodes, &[xi]);
        let ly = lagrange_matrix(geom_nodes, &[eta]);
        let mut s = Vec3::ZERO;
        for j in 0..n {
            for i in 0..n {
                s += self.control_nodes[j * n + i] * (lx[i] * ly[j]);
            }
        }
        s
    }
}

#[derive(Debug, Clone)]
pub struct HighOrderMesh {
    pub linear: LinearSphereMesh,
    pub strategy: NodeStrategy,
    pub p_geom: usize,
    pub mappings: Vec<ElementMapping>,
    /// GLL nodes of order p_geom (the control-node parameters).
    pub geom_nodes: Vec<f64>,
}

/// Grid index of point m (0..=p) along local edge k, walking from corner k to corner k+1.
pub fn edge_grid_index(p: usize, k: usize, m: usize) -> (usize, usize) {
    match k {
        0 => (m, 0),
        1 => (p, m),
        2 => (p - m, p),
        3 => (0, p - m),
        _ => unreachable!(),
    }
}

fn bilinear(c: &[Vec3; 4], xi: f64, eta: f64) -> Vec3 {
    let (a, b) = ((1.0 - xi) * 0.5, (1.0 + xi) * 0.5);
    let (c0, d0) = ((1.0 - eta) * 0.5, (1.0 + eta) * 0.5);
    c[0] * (a * c0) + c[1] * (b * c0) + c[2] * (b * d0) + c[3] * (a * d0)
}

fn projected_bilinear_nodes(c: &[Vec3; 4], nodes: &[f64]) -> Vec<Vec3> {
    let n = nodes.len();
    let mut out = Vec::with_capacity(n * n);
    for &eta in nodes {
        for &xi in nodes {
            out.push(bilinear(c, xi, eta).normalized());
        }
    }
    out
}

/// Lengths of row springs ((i,j)-(i+1,j)) and column springs ((i,j)-(i,j+1)).
pub fn spring_lengths(grid: &[[f64; 2]], n: usize) -> (Vec<f64>, Vec<f64>) {
    let len = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    let mut row = Vec::with_capacity(n * (n - 1));
    let mut col = Vec::with_capacity(n * (n - 1));
    for j in 0..n {
        for i in 0..n - 1 {
            row.push(len(grid[j * n + i], grid[j * n + i + 1]));
        }
    }
    for j in 0..n - 1 {
        for i in 0..n {
            col.push(len(grid[j * n + i], grid[(j + 1) * n + i]));
        }
    }
    (row, col)
}

/// Gradient descent on sum (|x_a - x_b| - L_ab)^2 over the 4-neighbour tensor grid.
/// Boundary nodes stay fixed. Returns (iterations, final max displacement).
pub fn relax_springs(
    grid: &mut [[f64; 2]],
    n: usize,
    rest_row: &[f64],
    rest_col: &[f64],
    tol: f64,
    max_iter: usize,
) -> std::result::Result<(usize, f64), f64> {
    if n <= 2 {
        return Ok((0, 0.0));
    }
    let mut force = vec![[0.0f64; 2]; n * n];
    let add = |force: &mut [[f64; 2]], grid: &[[f64; 2]], a: usize, b: usize, rest: f64| {
        let d = [grid[b][0] - grid[a][0], grid[b][1] - grid[a][1]];
        let l = (d[0] * d[0] + d[1] * d[1]).sqrt();
        let s = (l - rest) / l;
        force[a][0] += s * d[0];
        force[a][1] += s * d[1];
        force[b][0] -= s * d[0];
        force[b][1] -= s * d[1];
    };
    let mut last = f64::INFINITY;
    for it in 1..=max_iter {
        force.iter_mut().for_each(|f| *f = [0.0; 2]);
        for j in 0..n {
            for i in 0..n - 1 {
                add(&mut force, grid, j * n + i, j * n + i + 1, rest_row[j * (n - 1) + i]);
            }
        }
        for j in 0..n - 1 {
            for i in 0..n {
                add(&mut force, grid, j * n + i, (j + 1) * n + i, rest_col[j * n + i]);
            }
        }
        let mut step: f64 = 0.0;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let f = force[j * n + i];
                // each free node sees four unit springs
                let dx = [0.25 * f[0], 0.25 * f[1]];
                grid[j * n + i][0] += dx[0];
                grid[j * n + i][1] += dx[1];
                step = step.max(dx[0].abs().max(dx[1].abs()));
            }
        }
        last = step;
        if step < tol {
            return Ok((it, step));
        }
    }
    Err(last)
}

fn geodesic_optimized_nodes(mesh: &LinearSphereMesh, e: usize, nodes: &[f64]) -> Result<Vec<Vec3>> {
    let p = nodes.len() - 1;
    let n = p + 1;
    let el = &mesh.elements[e];
    let f = mesh.face[e];
    let mut out = vec![Vec3::ZERO; n * n];
    let mut fixed = vec![false; n * n];
    for k in 0..4 {
        let (a, b) = edge_corners(el, k);
        let (lo, hi) = (a.min(b), a.max(b));
        for m in 0..=p {
            let mm = if a == lo { m } else { p - m };
            // canonical evaluation from the lower vertex index keeps shared edges bit-identical
            let t = (1.0 + nodes[mm]) * 0.5;
            let x = if mm == 0 {
                mesh.vertices[lo]
            } else if mm == p {
                mesh.vertices[hi]
            } else {
                slerp(mesh.vertices[lo], mesh.vertices[hi], t)
            };
            let (i, j) = edge_grid_index(p, k, m);
            out[j * n + i] = x;
            fixed[j * n + i] = true;
        }
    }
    if p < 2 {
        return Ok(out);
    }
    let g: Vec<[f64; 2]> = out.iter().map(|&x| gnomonic(f, x)).collect();
    let s: Vec<f64> = nodes.iter().map(|&x| (1.0 + x) * 0.5).collect();
    let mut grid = g.clone();
    for j in 1..p {
        for i in 1..p {
            let (si, tj) = (s[i], s[j]);
            let mut v = [0.0; 2];
            for d in 0..2 {
                let bottom = g[i][d];
                let top = g[p * n + i][d];
                let left = g[j * n][d];
                let right = g[j * n + p][d];
                let corners = (1.0 - si) * (1.0 - tj) * g[0][d]
                    + si * (1.0 - tj) * g[p][d]
                    + si * tj * g[p * n + p][d]
                    + (1.0 - si) * tj * g[p * n][d];
                v[d] = (1.0 - tj) * bottom + tj * top + (1.0 - si) * left + si * right - corners;
            }
            grid[j * n + i] = v;
        }
    }
    // Rest lengths follow the GLL-parametrised transfinite grid; see README for why
    // chord-based rest lengths were not used.
    let (rest_row, rest_col) = spring_lengths(&grid, n);
    relax_springs(&mut grid, n, &rest_row, &rest_col, SPRING_TOL, SPRING_MAX_ITER).map_err(|residual| {
        Error::SpringNonConvergence { element: e, residual, iterations: SPRING_MAX_ITER }
    })?;
    for idx in 0..n * n {
        if !fixed[idx] {
            out[idx] = from_gnomonic(f, grid[idx]);
        }
    }
    Ok(out)
}

fn naive_nodes(corners: &[Vec3; 4], q: usize, nodes: &[f64]) -> Vec<Vec3> {
    let p = nodes.len() - 1;
    if p <= q {
        return projected_bilinear_nodes(corners, nodes);
    }
    let (qn, _) = gll_nodes_weights(q);
    let frozen = ElementMapping { p_geom: q, control_nodes: projected_bilinear_nodes(corners, &qn) };
    frozen.sample(&qn, nodes)
}

pub fn insert_high_order_nodes(mesh: &LinearSphereMesh, p_geom: usize, strategy: NodeStrategy) -> Result<HighOrderMesh> {
    if p_geom == 0 || p_geom > crate::sem::gll::MAX_ORDER {
        return Err(Error::OrderOutOfRange(p_geom));
    }
    if let NodeStrategy::NaiveProjection { p_geom_fixed: 0 } = strategy {
        return Err(Error::InvalidInput("p_geom_fixed must be at least 1".into()));
    }
    let (geom_nodes, _) = gll_nodes_weights(p_geom);
    let mut mappings = Vec::with_capacity(mesh.num_elements());
    for (e, el) in mesh.elements.iter().enumerate() {
        let corners = el.map(|i| mesh.vertices[i]);
        let control_nodes = if p_geom == 1 {
            corners_row_major(&corners)
        } else {
            match strategy {
                NodeStrategy::NaiveProjection { p_geom_fixed } => naive_nodes(&corners, p_geom_fixed, &geom_nodes),
                NodeStrategy::GeodesicOptimized => geodesic_optimized_nodes(mesh, e, &geom_nodes)?,
            }
        };
        mappings.push(ElementMapping { p_geom, control_nodes });
    }
    Ok(HighOrderMesh { linear: mesh.clone(), strategy, p_geom, mappings, geom_nodes })
}

fn corners_row_major(c: &[Vec3; 4]) -> Vec<Vec3> {
    vec![c[0], c[1], c[3], c[2]]
}

impl HighOrderMesh {
    pub fn num_elements(&self) -> usize {
        self.mappings.len()
    }

    /// Largest mismatch between the two element maps along any shared edge, sampled at `pts`.
    pub fn watertight_mismatch(&self, pts: &[f64]) -> f64 {
        let lag = lagrange_matrix(&self.geom_nodes, pts);
        let np = pts.len();
        let samples: Vec<Vec<Vec3>> = self.mappings.iter().map(|m| m.sample_with(&lag, np)).collect();
        let mut worst: f64 = 0.0;
        let symmetric = pts.iter().zip(pts.iter().rev()).all(|(a, b)| (a + b).abs() < 1e-15);
        assert!(symmetric, "edge comparison needs a symmetric point set");
        for link in &self.linear.edges {
            for m in 0..np {
                let (i, j) = edge_grid_index(np - 1, link.local_edge, m);
                let (i2, j2) = edge_grid_index(np - 1, link.neighbor_edge, np - 1 - m);
                let a = samples[link.element][j * np + i];
                let b = samples[link.neighbor][j2 * np + i2];
                worst = worst.max(a.max_abs_diff(b));
            }
        }
        worst
    }
}
