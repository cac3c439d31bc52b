//! Chebyshev–Gauss–Lobatto collocation in the normal direction: node sets,
//! differentiation matrices and Clenshaw–Curtis quadrature weights, cached
//! per node count.

use crate::linalg::LuFactors;
use ndarray::{Array1, Array2};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Reference collocation data on [-1, 1] for `m` CGL nodes (ascending order,
/// endpoints included).
pub struct ChebRef {
    pub nodes: Array1<f64>,
    /// Spectral differentiation matrix on the reference nodes.
    pub diff: Array2<f64>,
    /// Clenshaw–Curtis quadrature weights on the reference nodes.
    pub weights: Array1<f64>,
}

fn build_ref(m: usize) -> ChebRef {
    assert!(m >= 2);
    let n = m - 1;
    // ascending CGL nodes: x_j = -cos(pi j / n)
    let mut nodes = Array1::<f64>::zeros(m);
    for j in 0..m {
        nodes[j] = -(PI * j as f64 / n as f64).cos();
    }
    // pin endpoints and the midpoint exactly
    nodes[0] = -1.0;
    nodes[n] = 1.0;
    if m % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    // barycentric weights for CGL: w_j = (-1)^j * delta_j, delta = 1/2 at ends
    let mut bw = Array1::<f64>::zeros(m);
    for j in 0..m {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let delta = if j == 0 || j == n { 0.5 } else { 1.0 };
        bw[j] = sign * delta;
    }
    let mut diff = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        let mut row_sum = 0.0;
        for j in 0..m {
            if i != j {
                let d = (bw[j] / bw[i]) / (nodes[i] - nodes[j]);
                diff[[i, j]] = d;
                row_sum += d;
            }
        }
        // negative-sum trick keeps constants exactly in the kernel
        diff[[i, i]] = -row_sum;
    }

    // Clenshaw–Curtis weights: integrate the Chebyshev interpolant exactly.
    // Solve V^T w = mu with V_{jk} = T_k(x_j), mu_k = int_{-1}^{1} T_k.
    let mut vt = Array2::<f64>::zeros((m, m));
    for j in 0..m {
        // T_k(x) via the recurrence
        let x = nodes[j];
        let mut t_prev = 1.0;
        let mut t_cur = x;
        vt[[0, j]] = 1.0;
        if m > 1 {
            vt[[1, j]] = x;
        }
        for k in 2..m {
            let t_next = 2.0 * x * t_cur - t_prev;
            vt[[k, j]] = t_next;
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    let mut mu = vec![0.0; m];
    for (k, v) in mu.iter_mut().enumerate() {
        if k % 2 == 0 {
            *v = 2.0 / (1.0 - (k as f64) * (k as f64));
        }
    }
    let lu = LuFactors::factor(vt).expect("Chebyshev Vandermonde is nonsingular");
    lu.solve(&mut mu);
    let weights = Array1::from(mu);

    ChebRef {
        nodes,
        diff,
        weights,
    }
}

fn cache() -> &'static Mutex<HashMap<usize, Arc<ChebRef>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ChebRef>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Reference CGL data for `m` nodes, shared through a process-wide cache.
pub fn cheb_ref(m: usize) -> Arc<ChebRef> {
    let mut map = cache().lock().expect("cheb cache poisoned");
    map.entry(m).or_insert_with(|| Arc::new(build_ref(m))).clone()
}

/// Nodes of `m`-point CGL mapped affinely to [a, b], ascending.
pub fn nodes_on(m: usize, a: f64, b: f64) -> Array1<f64> {
    let r = cheb_ref(m);
    r.nodes.mapv(|x| a + (b - a) * (x + 1.0) / 2.0)
}

/// Differentiation matrix on [a, b] (reference matrix scaled by 2/(b-a)).
pub fn diff_on(m: usize, a: f64, b: f64) -> Array2<f64> {
    let r = cheb_ref(m);
    r.diff.mapv(|d| d * 2.0 / (b - a))
}

/// Clenshaw–Curtis weights on [a, b].
pub fn weights_on(m: usize, a: f64, b: f64) -> Array1<f64> {
    let r = cheb_ref(m);
    r.weights.mapv(|w| w * (b - a) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_include_endpoints_and_midpoint() {
        let x = nodes_on(9, 0.0, 1.0);
        assert_eq!(x[0], 0.0);
        assert_eq!(x[8], 1.0);
        assert!(x.windows(2).into_iter().all(|w| w[1] > w[0]));
    }

    #[test]
    fn differentiates_polynomials_exactly() {
        let m = 9;
        let x = nodes_on(m, -1.0, 0.0);
        let d = diff_on(m, -1.0, 0.0);
        let f = x.mapv(|v| v * v * v - 2.0 * v);
        let want = x.mapv(|v| 3.0 * v * v - 2.0);
        let got = d.dot(&f);
        for j in 0..m {
            assert!((got[j] - want[j]).abs() < 1e-11, "node {j}");
        }
    }

    #[test]
    fn differentiates_exponential_spectrally() {
        let m = 33;
        let x = nodes_on(m, 0.0, 1.0);
        let d = diff_on(m, 0.0, 1.0);
        let f = x.mapv(f64::exp);
        let got = d.dot(&f);
        let err = got
            .iter()
            .zip(f.iter())
            .map(|(g, w)| (g - w).abs())
            .fold(0.0f64, f64::max);
        assert!(err < 1e-11, "max error {err}");
    }

    #[test]
    fn quadrature_integrates_polynomials_and_trig() {
        let m = 17;
        let w = weights_on(m, -1.0, 1.0);
        let x = nodes_on(m, -1.0, 1.0);
        // int_{-1}^{1} x^6 = 2/7
        let p: f64 = w.iter().zip(x.iter()).map(|(w, x)| w * x.powi(6)).sum();
        assert!((p - 2.0 / 7.0).abs() < 1e-13);
        // int_{-1}^{1} cos(x) = 2 sin(1)
        let c: f64 = w.iter().zip(x.iter()).map(|(w, x)| w * x.cos()).sum();
        assert!((c - 2.0 * 1.0f64.sin()).abs() < 1e-13);
    }

    #[test]
    fn diff_kills_constants() {
        let d = diff_on(21, 0.0, 1.0);
        let ones = Array1::from_elem(21, 1.0);
        let got = d.dot(&ones);
        for v in got.iter() {
            assert!(v.abs() < 1e-12);
        }
    }
}
