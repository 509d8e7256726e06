//! Exponential modal filter on the tensor Legendre basis.

use crate::sem::gll::{legendre, ReferenceElement};

#[derive(Debug, Clone)]
pub struct ModalFilter {
    n: usize,
    /// Row-major 1D nodal filter matrix.
    f: Vec<f64>,
}

impl ModalFilter {
    /// σ_k = exp(−α ((k − k_c) / (p − k_c))^s) for modes k > k_c, 1 otherwise.
    pub fn new(re: &ReferenceElement, alpha: f64, order: u32, cutoff: usize) -> Self {
        let p = re.p;
        let n = p + 1;
        let sigma: Vec<f64> = (0..n)
            .map(|k| {
                if k <= cutoff || cutoff >= p {
                    1.0
                } else {
                    let eta = (k - cutoff) as f64 / (p - cutoff) as f64;
                    (-alpha * eta.powi(order as i32)).exp()
                }
            })
            .collect();
        let leg: Vec<Vec<f64>> = (0..n).map(|k| re.nodes.iter().map(|&x| legendre(k, x).0).collect()).collect();
        // discrete GLL norms make the modal transform an exact inverse of the nodal one
        let gamma: Vec<f64> = leg.iter().map(|pk| pk.iter().zip(&re.weights).map(|(v, w)| v * v * w).sum()).collect();
        let mut f = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                f[i * n + j] = (0..n).map(|k| leg[k][i] * sigma[k] * re.weights[j] * leg[k][j] / gamma[k]).sum();
            }
        }
        ModalFilter { n, f }
    }

    /// Filter every element block of `u` in place.
    pub fn apply(&self, u: &mut [f64], scratch: &mut Vec<f64>) {
        let n = self.n;
        let np = n * n;
        scratch.resize(np, 0.0);
        for block in u.chunks_exact_mut(np) {
            for j in 0..n {
                for i in 0..n {
                    scratch[j * n + i] = (0..n).map(|a| self.f[i * n + a] * block[j * n + a]).sum();
                }
            }
            for j in 0..n {
                for i in 0..n {
                    block[j * n + i] = (0..n).map(|b| self.f[j * n + b] * scratch[b * n + i]).sum();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_low_degree_polynomials() {
        let re = ReferenceElement::new(6).unwrap();
        let filt = ModalFilter::new(&re, 36.0, 8, 2);
        let n = re.n1();
        let mut u: Vec<f64> = (0..n * n).map(|k| {
            let (x, y) = (re.nodes[k % n], re.nodes[k / n]);
            1.0 + x * y - 0.5 * y * y
        }).collect();
        let orig = u.clone();
        filt.apply(&mut u, &mut Vec::new());
        for (a, b) in u.iter().zip(&orig) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn damps_top_mode() {
        let re = ReferenceElement::new(5).unwrap();
        let filt = ModalFilter::new(&re, 2.0f64.ln(), 8, 0);
        let n = re.n1();
        let mut u: Vec<f64> = (0..n * n).map(|k| legendre(5, re.nodes[k % n]).0).collect();
        let orig = u.clone();
        filt.apply(&mut u, &mut Vec::new());
        for (a, b) in u.iter().zip(&orig) {
            assert!((a - 0.5 * b).abs() < 1e-13);
        }
    }
}
