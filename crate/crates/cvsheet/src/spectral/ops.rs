//! Spectral calculus: tangential transforms and derivatives, collocation
//! differentiation in x3, dealiased products, traces and Sobolev norms.

use super::{cheb, fft, Boundary, Grid, Layer, LayerField, TangentialSpectrum};
use crate::error::{Error, Result};
use ndarray::{s, Array1, Array2, Array3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Physical samples (P x P x nodes, x' = j/P) -> spectral field.
pub fn forward_tangential(values: &Array3<f64>, grid: Grid) -> Result<LayerField> {
    let p = grid.phys();
    let nodes = grid.nodes();
    if values.shape() != [p, p, nodes] {
        return Err(Error::Shape {
            module: "spectral_core",
            operation: "forward_tangential",
            expected: format!("[{p}, {p}, {nodes}]"),
            got: format!("{:?}", values.shape()),
        });
    }
    if !values.iter().all(|v| v.is_finite()) {
        return Err(Error::Parameter {
            module: "spectral_core",
            operation: "forward_tangential",
            reason: "input samples contain NaN/Inf".into(),
        });
    }
    let mut out = LayerField::zeros(grid);
    let mut plane = Array2::<Complex64>::zeros((p, p));
    for j in 0..nodes {
        for j1 in 0..p {
            for j2 in 0..p {
                plane[[j1, j2]] = Complex64::new(values[[j1, j2, j]], 0.0);
            }
        }
        let coeffs = fft::plane_forward(&plane, grid.k_max);
        out.data.slice_mut(s![.., .., j]).assign(&coeffs);
    }
    out.hermitize();
    Ok(out)
}

/// Spectral field -> physical samples on the P x P x' grid at each node.
pub fn inverse_tangential(u: &LayerField) -> Array3<f64> {
    let p = u.grid.phys();
    let nodes = u.grid.nodes();
    let mut out = Array3::<f64>::zeros((p, p, nodes));
    for j in 0..nodes {
        let coeffs = u.data.slice(s![.., .., j]).to_owned();
        let plane = fft::plane_inverse(&coeffs, u.grid.k_max);
        for j1 in 0..p {
            for j2 in 0..p {
                out[[j1, j2, j]] = plane[[j1, j2]].re;
            }
        }
    }
    out
}

/// d/dx_axis (axis in {1, 2}): multiplication by 2 pi i k_axis.
pub fn tangential_derivative(u: &LayerField, axis: usize) -> LayerField {
    assert!(axis == 1 || axis == 2, "tangential axis must be 1 or 2");
    let mut out = u.clone();
    let n = u.grid.modes();
    for i1 in 0..n {
        let k1 = u.grid.mode_of(i1);
        for i2 in 0..n {
            let k2 = u.grid.mode_of(i2);
            let k = if axis == 1 { k1 } else { k2 };
            let factor = Complex64::new(0.0, 2.0 * PI * k as f64);
            for j in 0..u.grid.nodes() {
                out.data[[i1, i2, j]] = u.data[[i1, i2, j]] * factor;
            }
        }
    }
    out
}

/// Collocation differentiation in x3 per tangential mode. On the whole slab
/// the derivative is taken piecewise per layer; the shared node x3 = 0 gets
/// the average of the two one-sided values.
pub fn normal_derivative(u: &LayerField) -> LayerField {
    let mut out = LayerField::zeros(u.grid);
    out.real = u.real;
    let m = u.grid.m;
    let n = u.grid.modes();
    match u.grid.layer {
        Layer::Whole => {
            let d = cheb::diff_on(m, 0.0, 1.0); // width-1 layers share one matrix
            let mut prof = vec![Complex64::default(); 2 * m - 1];
            let mut lo = vec![Complex64::default(); m];
            let mut hi = vec![Complex64::default(); m];
            for i1 in 0..n {
                for i2 in 0..n {
                    for j in 0..2 * m - 1 {
                        prof[j] = u.data[[i1, i2, j]];
                    }
                    apply_real_matrix(&d, &prof[0..m], &mut lo);
                    apply_real_matrix(&d, &prof[m - 1..2 * m - 1], &mut hi);
                    for j in 0..m - 1 {
                        out.data[[i1, i2, j]] = lo[j];
                    }
                    out.data[[i1, i2, m - 1]] = 0.5 * (lo[m - 1] + hi[0]);
                    for j in 1..m {
                        out.data[[i1, i2, m - 1 + j]] = hi[j];
                    }
                }
            }
        }
        l => {
            let (a, b) = l.interval();
            let d = cheb::diff_on(m, a, b);
            let mut prof = vec![Complex64::default(); m];
            let mut res = vec![Complex64::default(); m];
            for i1 in 0..n {
                for i2 in 0..n {
                    for j in 0..m {
                        prof[j] = u.data[[i1, i2, j]];
                    }
                    apply_real_matrix(&d, &prof, &mut res);
                    for j in 0..m {
                        out.data[[i1, i2, j]] = res[j];
                    }
                }
            }
        }
    }
    out
}

/// Apply a differentiation matrix row-centered: y_i = sum_j d_ij (x_j - x_i).
/// Valid because differentiation rows sum to zero; annihilates constants
/// exactly and keeps repeated differentiation from amplifying the row-sum
/// cancellation noise.
pub(crate) fn apply_real_matrix(d: &Array2<f64>, x: &[Complex64], y: &mut [Complex64]) {
    let m = d.nrows();
    debug_assert_eq!(x.len(), m);
    debug_assert_eq!(y.len(), m);
    for i in 0..m {
        let xi = x[i];
        let mut acc = Complex64::default();
        for j in 0..m {
            acc += d[[i, j]] * (x[j] - xi);
        }
        y[i] = acc;
    }
}

/// Dealiased physical-space product. The retained band |k_i| <= K is exact
/// (alias-free) for pairwise products since P >= 3K+1.
pub fn pointwise_product(u: &LayerField, v: &LayerField) -> Result<LayerField> {
    if u.grid != v.grid {
        return Err(Error::Shape {
            module: "spectral_core",
            operation: "pointwise_product",
            expected: format!("{:?}", u.grid),
            got: format!("{:?}", v.grid),
        });
    }
    let pu = inverse_tangential(u);
    let pv = inverse_tangential(v);
    let prod = &pu * &pv;
    let mut out = forward_tangential(&prod, u.grid)?;
    out.real = u.real && v.real;
    Ok(out)
}

/// Pointwise quotient u/v in physical space (v must be bounded away from 0).
pub fn pointwise_divide(u: &LayerField, v: &LayerField) -> Result<LayerField> {
    if u.grid != v.grid {
        return Err(Error::Shape {
            module: "spectral_core",
            operation: "pointwise_divide",
            expected: format!("{:?}", u.grid),
            got: format!("{:?}", v.grid),
        });
    }
    let pu = inverse_tangential(u);
    let pv = inverse_tangential(v);
    let quot = &pu / &pv;
    forward_tangential(&quot, u.grid)
}

/// Evaluate the collocation representation at a boundary node.
pub fn trace(u: &LayerField, b: Boundary) -> Result<TangentialSpectrum> {
    let node = u.grid.boundary_node(b)?;
    let mut out = TangentialSpectrum::zeros(u.grid.k_max);
    out.coeffs.assign(&u.data.slice(s![.., .., node]));
    Ok(out)
}

/// Weight W_s(n) = sum_{a1+a2 <= s} (2 pi n1)^{2 a1} (2 pi n2)^{2 a2}:
/// the squared-derivative-sum H^s(T^2) weight of mode n.
pub fn deriv_sum_weight(s: usize, k1: i64, k2: i64) -> f64 {
    let b1 = (2.0 * PI * k1 as f64).powi(2);
    let b2 = (2.0 * PI * k2 as f64).powi(2);
    let mut total = 0.0;
    let mut p1 = 1.0;
    for a1 in 0..=s {
        let mut p2 = 1.0;
        for _a2 in 0..=(s - a1) {
            total += p1 * p2;
            p2 *= b2;
        }
        p1 *= b1;
    }
    total
}

/// Per-mode squared L^2_{x3} norms of d3^q u for q = 0..=q_max, plus the
/// per-q global squared sums (used for the amplification guard).
pub fn profile_l2_sq_tables(u: &LayerField, q_max: usize) -> (Vec<Array2<f64>>, Vec<f64>) {
    let n = u.grid.modes();
    let m = u.grid.m;
    let mut tables = vec![Array2::<f64>::zeros((n, n)); q_max + 1];
    let mut global = vec![0.0; q_max + 1];
    match u.grid.layer {
        Layer::Whole => {
            let d = cheb::diff_on(m, 0.0, 1.0);
            let w = cheb::weights_on(m, 0.0, 1.0); // width-1 layers share weights
            let mut lo = vec![Complex64::default(); m];
            let mut hi = vec![Complex64::default(); m];
            let mut tmp = vec![Complex64::default(); m];
            for i1 in 0..n {
                for i2 in 0..n {
                    for j in 0..m {
                        lo[j] = u.data[[i1, i2, j]];
                        hi[j] = u.data[[i1, i2, m - 1 + j]];
                    }
                    for q in 0..=q_max {
                        if q > 0 {
                            apply_real_matrix(&d, &lo, &mut tmp);
                            lo.copy_from_slice(&tmp);
                            apply_real_matrix(&d, &hi, &mut tmp);
                            hi.copy_from_slice(&tmp);
                        }
                        let mut acc = 0.0;
                        for j in 0..m {
                            acc += w[j] * (lo[j].norm_sqr() + hi[j].norm_sqr());
                        }
                        tables[q][[i1, i2]] = acc;
                        global[q] += acc;
                    }
                }
            }
        }
        l => {
            let (a, b) = l.interval();
            let d = cheb::diff_on(m, a, b);
            let w = cheb::weights_on(m, a, b);
            let mut prof = vec![Complex64::default(); m];
            let mut tmp = vec![Complex64::default(); m];
            for i1 in 0..n {
                for i2 in 0..n {
                    for j in 0..m {
                        prof[j] = u.data[[i1, i2, j]];
                    }
                    for q in 0..=q_max {
                        if q > 0 {
                            apply_real_matrix(&d, &prof, &mut tmp);
                            prof.copy_from_slice(&tmp);
                        }
                        let mut acc = 0.0;
                        for j in 0..m {
                            acc += w[j] * prof[j].norm_sqr();
                        }
                        tables[q][[i1, i2]] = acc;
                        global[q] += acc;
                    }
                }
            }
        }
    }
    (tables, global)
}

/// H^r norm of a layer field per the mixed decomposition
/// sum_{q<=r} ||d3^q u||^2_{L^2(H^{r-q})} with derivative-sum torus weights.
pub fn sobolev_norm_layer(u: &LayerField, r: usize) -> f64 {
    let (tables, _) = profile_l2_sq_tables(u, r);
    let n = u.grid.modes();
    let mut total = 0.0;
    for q in 0..=r {
        let s = r - q;
        for i1 in 0..n {
            let k1 = u.grid.mode_of(i1);
            for i2 in 0..n {
                let k2 = u.grid.mode_of(i2);
                total += deriv_sum_weight(s, k1, k2) * tables[q][[i1, i2]];
            }
        }
    }
    total.sqrt()
}

/// H^s(T^2) norm: the exact truncated sum of (1 + |n|^2)^s |c_n|^2.
pub fn sobolev_norm_torus(f: &TangentialSpectrum, s: f64) -> f64 {
    let n = f.modes();
    let mut total = 0.0;
    for i1 in 0..n {
        let k1 = i1 as i64 - f.k_max as i64;
        for i2 in 0..n {
            let k2 = i2 as i64 - f.k_max as i64;
            let w = (1.0 + (k1 * k1 + k2 * k2) as f64).powf(s);
            total += w * f.coeffs[[i1, i2]].norm_sqr();
        }
    }
    total.sqrt()
}

/// Max |u| over the physical sample grid.
pub fn max_abs_physical(u: &LayerField) -> f64 {
    inverse_tangential(u)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

// ---- 2D (interface) counterparts ----

pub fn spectrum_to_phys(f: &TangentialSpectrum) -> Array2<f64> {
    let plane = fft::plane_inverse(&f.coeffs, f.k_max);
    plane.mapv(|z| z.re)
}

pub fn spectrum_from_phys(values: &Array2<f64>, k_max: usize) -> TangentialSpectrum {
    let p = fft::phys_size(k_max);
    assert_eq!(values.shape(), [p, p]);
    let plane = values.mapv(|v| Complex64::new(v, 0.0));
    let mut out = TangentialSpectrum {
        k_max,
        coeffs: fft::plane_forward(&plane, k_max),
    };
    out.hermitize();
    out
}

pub fn spectrum_product(f: &TangentialSpectrum, g: &TangentialSpectrum) -> TangentialSpectrum {
    assert_eq!(f.k_max, g.k_max);
    let pf = spectrum_to_phys(f);
    let pg = spectrum_to_phys(g);
    spectrum_from_phys(&(&pf * &pg), f.k_max)
}

pub fn spectrum_derivative(f: &TangentialSpectrum, axis: usize) -> TangentialSpectrum {
    assert!(axis == 1 || axis == 2);
    let n = f.modes();
    let mut out = TangentialSpectrum::zeros(f.k_max);
    for i1 in 0..n {
        let k1 = i1 as i64 - f.k_max as i64;
        for i2 in 0..n {
            let k2 = i2 as i64 - f.k_max as i64;
            let k = if axis == 1 { k1 } else { k2 };
            out.coeffs[[i1, i2]] =
                f.coeffs[[i1, i2]] * Complex64::new(0.0, 2.0 * PI * k as f64);
        }
    }
    out
}

/// Max |f| over the physical interface grid.
pub fn spectrum_max_abs_physical(f: &TangentialSpectrum) -> f64 {
    spectrum_to_phys(f)
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Interface integral (the zero mode; T^2 has unit area).
pub fn spectrum_integral(f: &TangentialSpectrum) -> f64 {
    f.coeffs[[f.k_max, f.k_max]].re
}

/// Divergence d1 u1 + d2 u2 + d3 u3 of a vector field.
pub fn divergence(u: &super::VectorLayerField) -> LayerField {
    let mut div = tangential_derivative(&u[0], 1);
    div.axpy(1.0, &tangential_derivative(&u[1], 2));
    div.axpy(1.0, &normal_derivative(&u[2]));
    div
}

/// Uniform tangential sample points x = j/P matching the physical grid.
pub fn phys_coords(p: usize) -> Array1<f64> {
    Array1::from_iter((0..p).map(|j| j as f64 / p as f64))
}
