use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 16;

/// Legendre polynomial P_n and its derivative at x.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-14 {
        // P_n'(±1) = (±1)^(n+1) n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (p0 - x * p1) / (1.0 - x * x)
    };
    (p1, dp)
}

/// Gauss-Lobatto-Legendre nodes and weights for polynomial order `p` (p+1 points).
pub fn gll_nodes_weights(p: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(p >= 1);
    let n = p + 1;
    let mut x = vec![0.0; n];
    let pf = p as f64;
    x[0] = -1.0;
    x[p] = 1.0;
    // Newton on the interior roots of P_p', computed for the lower half and mirrored.
    for i in 1..=(p / 2) {
        let mut xi = -(std::f64::consts::PI * i as f64 / pf).cos();
        for _ in 0..100 {
            let (lp, dlp) = legendre(p, xi);
            // q = (1-x^2) P_p', q' = -p(p+1) P_p
            let q = (1.0 - xi * xi) * dlp;
            let dq = -pf * (pf + 1.0) * lp;
            let dx = q / dq;
            xi -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        x[i] = xi;
        x[p - i] = -xi;
    }
    if p % 2 == 0 {
        x[p / 2] = 0.0;
    }
    let w = x
        .iter()
        .map(|&xi| {
            let (lp, _) = legendre(p, xi);
            2.0 / (pf * (pf + 1.0) * lp * lp)
        })
        .collect();
    (x, w)
}

fn bary_weights(nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            let prod: f64 = (0..nodes.len())
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product();
            1.0 / prod
        })
        .collect()
}

/// Lagrange basis of `nodes` evaluated at `points`: row-major, one row per point.
pub fn lagrange_matrix(nodes: &[f64], points: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let bw = bary_weights(nodes);
    let mut out = vec![0.0; points.len() * n];
    for (r, &x) in points.iter().enumerate() {
        let row = &mut out[r * n..(r + 1) * n];
        if let Some(j) = nodes.iter().position(|&xj| xj == x) {
            row[j] = 1.0;
            continue;
        }
        let mut s = 0.0;
        for j in 0..n {
            row[j] = bw[j] / (x - nodes[j]);
            s += row[j];
        }
        for v in row.iter_mut() {
            *v /= s;
        }
    }
    out
}

/// Derivatives of the Lagrange basis of `nodes` at `points`, row-major per point.
pub fn lagrange_deriv_matrix(nodes: &[f64], points: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let mut out = vec![0.0; points.len() * n];
    for (r, &x) in points.iter().enumerate() {
        for j in 0..n {
            // d/dx prod_{k!=j} (x-x_k)/(x_j-x_k)
            let mut sum = 0.0;
            for m in 0..n {
                if m == j {
                    continue;
                }
                let mut prod = 1.0 / (nodes[j] - nodes[m]);
                for k in 0..n {
                    if k != j && k != m {
                        prod *= (x - nodes[k]) / (nodes[j] - nodes[k]);
                    }
                }
                sum += prod;
            }
            out[r * n + j] = sum;
        }
    }
    out
}

/// One-dimensional GLL collocation data for a solution order.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub p: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// diff[i * (p+1) + j] = l_j'(x_i)
    pub diff: Vec<f64>,
}

impl ReferenceElement {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 || p > MAX_ORDER {
            return Err(Error::OrderOutOfRange(p));
        }
        let (nodes, weights) = gll_nodes_weights(p);
        let n = p + 1;
        let mut diff = vec![0.0; n * n];
        let lp: Vec<f64> = nodes.iter().map(|&x| legendre(p, x).0).collect();
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                if i != j {
                    let d = lp[i] / lp[j] / (nodes[i] - nodes[j]);
                    diff[i * n + j] = d;
                    row_sum += d;
                }
            }
            // negative-sum trick keeps D applied to constants exactly zero
            diff[i * n + i] = -row_sum;
        }
        Ok(ReferenceElement {
            p,
            nodes,
            weights,
            diff,
        })
    }

    #[inline]
    pub fn n1(&self) -> usize {
        self.p + 1
    }

    #[inline]
    pub fn n2(&self) -> usize {
        (self.p + 1) * (self.p + 1)
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.diff[i * (self.p + 1) + j]
    }
}
