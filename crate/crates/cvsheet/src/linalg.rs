//! Dense LU factorization with partial pivoting, sized for the per-mode
//! two-point boundary value solves (matrices of order ~2M).

use ndarray::Array2;
use num_complex::Complex64;

/// LU factors of a square real matrix, PA = LU packed in place.
pub struct LuFactors {
    lu: Array2<f64>,
    piv: Vec<usize>,
    n: usize,
}

impl LuFactors {
    /// Factor `a` (consumed). Returns `None` if the matrix is numerically singular.
    pub fn factor(mut a: Array2<f64>) -> Option<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "LU needs a square matrix");
        let mut piv = vec![0usize; n];
        for col in 0..n {
            // pivot search
            let mut p = col;
            let mut pmax = a[[col, col]].abs();
            for row in col + 1..n {
                let v = a[[row, col]].abs();
                if v > pmax {
                    pmax = v;
                    p = row;
                }
            }
            if pmax < 1e-300 {
                return None;
            }
            piv[col] = p;
            if p != col {
                for j in 0..n {
                    let tmp = a[[col, j]];
                    a[[col, j]] = a[[p, j]];
                    a[[p, j]] = tmp;
                }
            }
            let inv = 1.0 / a[[col, col]];
            for row in col + 1..n {
                let factor = a[[row, col]] * inv;
                a[[row, col]] = factor;
                if factor != 0.0 {
                    for j in col + 1..n {
                        a[[row, j]] -= factor * a[[col, j]];
                    }
                }
            }
        }
        Some(Self { lu: a, piv, n })
    }

    /// Solve A x = b in place for a real right-hand side.
    pub fn solve(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        // apply the full row permutation first; the packed L rows carry
        // multipliers consistent with the final row order only
        for col in 0..self.n {
            let p = self.piv[col];
            if p != col {
                b.swap(col, p);
            }
        }
        for col in 0..self.n {
            let bc = b[col];
            if bc != 0.0 {
                for row in col + 1..self.n {
                    b[row] -= self.lu[[row, col]] * bc;
                }
            }
        }
        for col in (0..self.n).rev() {
            b[col] /= self.lu[[col, col]];
            let bc = b[col];
            if bc != 0.0 {
                for row in 0..col {
                    b[row] -= self.lu[[row, col]] * bc;
                }
            }
        }
    }

    /// Solve A x = b for a complex right-hand side (real operator applied to
    /// real and imaginary parts separately).
    pub fn solve_complex(&self, b: &mut [Complex64]) {
        let mut re = vec![0.0; self.n];
        let mut im = vec![0.0; self.n];
        for (i, z) in b.iter().enumerate() {
            re[i] = z.re;
            im[i] = z.im;
        }
        self.solve(&mut re);
        self.solve(&mut im);
        for i in 0..self.n {
            b[i] = Complex64::new(re[i], im[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr2;

    #[test]
    fn solves_small_system() {
        let a = arr2(&[[2.0, 1.0, -1.0], [-3.0, -1.0, 2.0], [-2.0, 1.0, 2.0]]);
        let lu = LuFactors::factor(a.clone()).unwrap();
        let mut b = [8.0, -11.0, -3.0];
        lu.solve(&mut b);
        // exact solution (2, 3, -1)
        assert!((b[0] - 2.0).abs() < 1e-12);
        assert!((b[1] - 3.0).abs() < 1e-12);
        assert!((b[2] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_on_random_system() {
        // deterministic pseudo-random fill
        let n = 40;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed as f64 / u64::MAX as f64) - 0.5
        };
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = next();
            }
            a[[i, i]] += 4.0; // keep it well conditioned
        }
        let mut b: Vec<f64> = (0..n).map(|_| next()).collect();
        let rhs = b.clone();
        let lu = LuFactors::factor(a.clone()).unwrap();
        lu.solve(&mut b);
        for i in 0..n {
            let mut r = -rhs[i];
            for j in 0..n {
                r += a[[i, j]] * b[j];
            }
            assert!(r.abs() < 1e-10, "row {i} residual {r}");
        }
    }

    #[test]
    fn rejects_singular() {
        let a = arr2(&[[1.0, 2.0], [2.0, 4.0]]);
        assert!(LuFactors::factor(a).is_none());
    }
}
