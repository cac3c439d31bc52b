//! Cached 2D FFTs between the tangential physical grid (P x P, P a power of
//! two >= 3K+1 so pairwise products are alias-free in the retained band)
//! and the truncated mode set |k_i| <= K.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plan_cache() -> &'static Mutex<HashMap<usize, Arc<Plans>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plans(p: usize) -> Arc<Plans> {
    let mut map = plan_cache().lock().expect("fft cache poisoned");
    map.entry(p)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(p),
                inverse: planner.plan_fft_inverse(p),
            })
        })
        .clone()
}

/// Smallest power of two >= 3K+1: the product grid size for max wavenumber K.
pub fn phys_size(k_max: usize) -> usize {
    let need = 3 * k_max + 1;
    let mut p = 4;
    while p < need {
        p *= 2;
    }
    p
}

fn fft2(buf: &mut Array2<Complex64>, plan: &Arc<dyn Fft<f64>>) {
    let p = buf.nrows();
    // rows are contiguous in standard layout
    for mut row in buf.rows_mut() {
        plan.process(row.as_slice_mut().expect("contiguous row"));
    }
    let mut col = vec![Complex64::default(); p];
    for j in 0..p {
        for i in 0..p {
            col[i] = buf[[i, j]];
        }
        plan.process(&mut col);
        for i in 0..p {
            buf[[i, j]] = col[i];
        }
    }
}

/// Physical plane (P x P complex samples at x = j/P) -> mode array
/// (2K+1 x 2K+1), coefficients of e^{2 pi i k . x}.
pub fn plane_forward(values: &Array2<Complex64>, k_max: usize) -> Array2<Complex64> {
    let p = values.nrows();
    debug_assert_eq!(p, phys_size(k_max));
    let mut buf = values.clone();
    let plans = plans(p);
    fft2(&mut buf, &plans.forward);
    let scale = 1.0 / (p * p) as f64;
    let n = 2 * k_max + 1;
    let mut coeffs = Array2::<Complex64>::zeros((n, n));
    for i1 in 0..n {
        let k1 = i1 as isize - k_max as isize;
        let b1 = k1.rem_euclid(p as isize) as usize;
        for i2 in 0..n {
            let k2 = i2 as isize - k_max as isize;
            let b2 = k2.rem_euclid(p as isize) as usize;
            coeffs[[i1, i2]] = buf[[b1, b2]] * scale;
        }
    }
    coeffs
}

/// Mode array -> physical plane samples at x = j/P.
pub fn plane_inverse(coeffs: &Array2<Complex64>, k_max: usize) -> Array2<Complex64> {
    let p = phys_size(k_max);
    let n = 2 * k_max + 1;
    debug_assert_eq!(coeffs.nrows(), n);
    let mut buf = Array2::<Complex64>::zeros((p, p));
    for i1 in 0..n {
        let k1 = i1 as isize - k_max as isize;
        let b1 = k1.rem_euclid(p as isize) as usize;
        for i2 in 0..n {
            let k2 = i2 as isize - k_max as isize;
            let b2 = k2.rem_euclid(p as isize) as usize;
            buf[[b1, b2]] = coeffs[[i1, i2]];
        }
    }
    let plans = plans(p);
    fft2(&mut buf, &plans.inverse);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn phys_size_covers_dealiasing() {
        assert_eq!(phys_size(1), 4);
        assert_eq!(phys_size(8), 32);
        assert_eq!(phys_size(16), 64);
    }

    #[test]
    fn plane_round_trip_recovers_cosine() {
        let k_max = 4;
        let p = phys_size(k_max);
        let mut vals = Array2::<Complex64>::zeros((p, p));
        for j1 in 0..p {
            for j2 in 0..p {
                let x1 = j1 as f64 / p as f64;
                vals[[j1, j2]] = Complex64::new((2.0 * PI * x1).cos(), 0.0);
            }
        }
        let c = plane_forward(&vals, k_max);
        // c_{(1,0)} = c_{(-1,0)} = 1/2
        assert!((c[[k_max + 1, k_max]].re - 0.5).abs() < 1e-13);
        assert!((c[[k_max - 1, k_max]].re - 0.5).abs() < 1e-13);
        let back = plane_inverse(&c, k_max);
        for j1 in 0..p {
            for j2 in 0..p {
                assert!((back[[j1, j2]] - vals[[j1, j2]]).norm() < 1e-12);
            }
        }
    }
}
