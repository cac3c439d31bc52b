//! Discrete function spaces on the slab T^2 x (-1,1): truncated tangential
//! Fourier modes times Chebyshev collocation in the normal direction.

pub mod cheb;
pub mod fft;
pub mod ops;

use crate::error::{Error, Result};
use ndarray::{s, Array1, Array2, Array3};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Which part of the slab a field lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    /// Omega^- = T^2 x (-1, 0)
    Minus,
    /// Omega^+ = T^2 x (0, 1)
    Plus,
    /// Omega = T^2 x (-1, 1)
    Whole,
}

impl Layer {
    pub fn interval(self) -> (f64, f64) {
        match self {
            Layer::Minus => (-1.0, 0.0),
            Layer::Plus => (0.0, 1.0),
            Layer::Whole => (-1.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Layer::Minus => "minus",
            Layer::Plus => "plus",
            Layer::Whole => "whole",
        }
    }
}

/// Boundary pieces of the slab.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Interface x3 = 0.
    Gamma,
    /// Top wall x3 = +1.
    GammaPlus,
    /// Bottom wall x3 = -1.
    GammaMinus,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::Gamma => "Gamma",
            Boundary::GammaPlus => "Gamma_+",
            Boundary::GammaMinus => "Gamma_-",
        }
    }
}

/// Discretization parameters: modes k in Z^2 with |k_i| <= k_max, `m`
/// collocation nodes per layer (whole layer carries 2m-1, the union of the
/// two per-layer node sets with x3 = 0 shared).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Grid {
    pub k_max: usize,
    pub m: usize,
    pub layer: Layer,
}

impl Grid {
    pub fn new(k_max: usize, m: usize, layer: Layer) -> Result<Self> {
        if k_max < 1 {
            return Err(Error::Parameter {
                module: "spectral_core",
                operation: "Grid::new",
                reason: format!("k_max must be >= 1, got {k_max}"),
            });
        }
        if m < 5 || m % 2 == 0 {
            return Err(Error::Parameter {
                module: "spectral_core",
                operation: "Grid::new",
                reason: format!("m must be odd and >= 5, got {m}"),
            });
        }
        Ok(Self { k_max, m, layer })
    }

    /// Number of retained modes per tangential axis.
    pub fn modes(&self) -> usize {
        2 * self.k_max + 1
    }

    /// Number of collocation nodes in x3 for this layer.
    pub fn nodes(&self) -> usize {
        match self.layer {
            Layer::Whole => 2 * self.m - 1,
            _ => self.m,
        }
    }

    /// Tangential physical grid size used for dealiased products.
    pub fn phys(&self) -> usize {
        fft::phys_size(self.k_max)
    }

    pub fn with_layer(&self, layer: Layer) -> Grid {
        Grid { layer, ..*self }
    }

    /// x3 node coordinates, ascending, endpoints included exactly.
    pub fn x3(&self) -> Array1<f64> {
        match self.layer {
            Layer::Whole => {
                let lo = cheb::nodes_on(self.m, -1.0, 0.0);
                let hi = cheb::nodes_on(self.m, 0.0, 1.0);
                let mut x = Array1::<f64>::zeros(2 * self.m - 1);
                for j in 0..self.m {
                    x[j] = lo[j];
                }
                for j in 1..self.m {
                    x[self.m - 1 + j] = hi[j];
                }
                x
            }
            l => {
                let (a, b) = l.interval();
                cheb::nodes_on(self.m, a, b)
            }
        }
    }

    /// Quadrature weights matching `x3()` (whole: both layers' Clenshaw-Curtis
    /// rules, the shared node receiving the sum of its two endpoint weights).
    pub fn quad_weights(&self) -> Array1<f64> {
        match self.layer {
            Layer::Whole => {
                let wl = cheb::weights_on(self.m, -1.0, 0.0);
                let wh = cheb::weights_on(self.m, 0.0, 1.0);
                let mut w = Array1::<f64>::zeros(2 * self.m - 1);
                for j in 0..self.m {
                    w[j] += wl[j];
                }
                for j in 0..self.m {
                    w[self.m - 1 + j] += wh[j];
                }
                w
            }
            l => {
                let (a, b) = l.interval();
                cheb::weights_on(self.m, a, b)
            }
        }
    }

    /// Signed mode for an array index along one tangential axis.
    pub fn mode_of(&self, i: usize) -> i64 {
        i as i64 - self.k_max as i64
    }

    /// Array index of a signed mode.
    pub fn index_of(&self, k: i64) -> usize {
        (k + self.k_max as i64) as usize
    }

    /// Node index of a boundary on this layer, or a domain error.
    pub fn boundary_node(&self, b: Boundary) -> Result<usize> {
        let err = || Error::Domain {
            module: "spectral_core",
            operation: "trace",
            boundary: b.name(),
            layer: self.layer.name(),
        };
        match (self.layer, b) {
            (Layer::Minus, Boundary::Gamma) => Ok(self.m - 1),
            (Layer::Minus, Boundary::GammaMinus) => Ok(0),
            (Layer::Plus, Boundary::Gamma) => Ok(0),
            (Layer::Plus, Boundary::GammaPlus) => Ok(self.m - 1),
            (Layer::Whole, Boundary::Gamma) => Ok(self.m - 1),
            (Layer::Whole, Boundary::GammaMinus) => Ok(0),
            (Layer::Whole, Boundary::GammaPlus) => Ok(2 * self.m - 2),
            _ => Err(err()),
        }
    }
}

/// A function on Gamma ~ T^2 stored as truncated Fourier coefficients.
#[derive(Debug, Clone)]
pub struct TangentialSpectrum {
    pub k_max: usize,
    /// coeffs[[i1, i2]] is the coefficient of e^{2 pi i k.x} with
    /// k = (i1 - k_max, i2 - k_max).
    pub coeffs: Array2<Complex64>,
}

impl TangentialSpectrum {
    pub fn zeros(k_max: usize) -> Self {
        let n = 2 * k_max + 1;
        Self {
            k_max,
            coeffs: Array2::zeros((n, n)),
        }
    }

    pub fn constant(k_max: usize, c: f64) -> Self {
        let mut s = Self::zeros(k_max);
        s.coeffs[[k_max, k_max]] = Complex64::new(c, 0.0);
        s
    }

    /// A single real cosine mode: amp * cos(2 pi k . x).
    pub fn cosine(k_max: usize, k: [i64; 2], amp: f64) -> Self {
        let mut s = Self::zeros(k_max);
        let i1 = (k[0] + k_max as i64) as usize;
        let i2 = (k[1] + k_max as i64) as usize;
        let j1 = (-k[0] + k_max as i64) as usize;
        let j2 = (-k[1] + k_max as i64) as usize;
        s.coeffs[[i1, i2]] += Complex64::new(amp / 2.0, 0.0);
        s.coeffs[[j1, j2]] += Complex64::new(amp / 2.0, 0.0);
        s
    }

    pub fn modes(&self) -> usize {
        2 * self.k_max + 1
    }

    /// Enforce c_{-k} = conj(c_k) by averaging paired entries.
    pub fn hermitize(&mut self) {
        let n = self.modes();
        for i1 in 0..n {
            for i2 in 0..n {
                let j1 = n - 1 - i1;
                let j2 = n - 1 - i2;
                if (i1, i2) < (j1, j2) {
                    let a = self.coeffs[[i1, i2]];
                    let b = self.coeffs[[j1, j2]];
                    let avg = 0.5 * (a + b.conj());
                    self.coeffs[[i1, i2]] = avg;
                    self.coeffs[[j1, j2]] = avg.conj();
                } else if (i1, i2) == (j1, j2) {
                    self.coeffs[[i1, i2]] = Complex64::new(self.coeffs[[i1, i2]].re, 0.0);
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            k_max: self.k_max,
            coeffs: self.coeffs.mapv(|z| z * c),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.k_max, other.k_max);
        Self {
            k_max: self.k_max,
            coeffs: &self.coeffs + &other.coeffs,
        }
    }

    pub fn minus_of(&self, other: &Self) -> Self {
        assert_eq!(self.k_max, other.k_max);
        Self {
            k_max: self.k_max,
            coeffs: &self.coeffs - &other.coeffs,
        }
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.k_max, other.k_max);
        self.coeffs.zip_mut_with(&other.coeffs, |a, b| *a += c * b);
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Scalar field on one layer: Fourier in x', collocation values in x3.
#[derive(Debug, Clone)]
pub struct LayerField {
    pub grid: Grid,
    /// data[[i1, i2, j]]: mode (i1 - K, i2 - K), node j (ascending x3).
    pub data: Array3<Complex64>,
    /// Whether the represented function is real-valued (Hermitian symmetry
    /// is enforced after nonlinear operations when set).
    pub real: bool,
}

impl LayerField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.modes();
        Self {
            grid,
            data: Array3::zeros((n, n, grid.nodes())),
            real: true,
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        let mut f = Self::zeros(grid);
        let k = grid.k_max;
        for j in 0..grid.nodes() {
            f.data[[k, k, j]] = Complex64::new(c, 0.0);
        }
        f
    }

    /// Build a field from a per-mode profile function of (k1, k2, x3).
    pub fn from_profile<F>(grid: Grid, spectrum: &TangentialSpectrum, profile: F) -> Self
    where
        F: Fn(i64, i64, f64) -> f64,
    {
        assert_eq!(spectrum.k_max, grid.k_max);
        let x3 = grid.x3();
        let mut f = Self::zeros(grid);
        let n = grid.modes();
        for i1 in 0..n {
            let k1 = grid.mode_of(i1);
            for i2 in 0..n {
                let k2 = grid.mode_of(i2);
                let c = spectrum.coeffs[[i1, i2]];
                if c == Complex64::default() {
                    continue;
                }
                for (j, &x) in x3.iter().enumerate() {
                    f.data[[i1, i2, j]] = c * profile(k1, k2, x);
                }
            }
        }
        f
    }

    pub fn hermitize(&mut self) {
        if !self.real {
            return;
        }
        let n = self.grid.modes();
        let nodes = self.grid.nodes();
        for i1 in 0..n {
            for i2 in 0..n {
                let j1 = n - 1 - i1;
                let j2 = n - 1 - i2;
                if (i1, i2) < (j1, j2) {
                    for j in 0..nodes {
                        let a = self.data[[i1, i2, j]];
                        let b = self.data[[j1, j2, j]];
                        let avg = 0.5 * (a + b.conj());
                        self.data[[i1, i2, j]] = avg;
                        self.data[[j1, j2, j]] = avg.conj();
                    }
                } else if (i1, i2) == (j1, j2) {
                    for j in 0..nodes {
                        self.data[[i1, i2, j]] = Complex64::new(self.data[[i1, i2, j]].re, 0.0);
                    }
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            data: self.data.mapv(|z| z * c),
            real: self.real,
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            data: &self.data + &other.data,
            real: self.real && other.real,
        }
    }

    pub fn minus_of(&self, other: &Self) -> Self {
        assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            data: &self.data - &other.data,
            real: self.real && other.real,
        }
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.grid, other.grid);
        self.data.zip_mut_with(&other.data, |a, b| *a += c * b);
    }

    /// Restrict a whole-slab field to one layer by node subsetting.
    pub fn restrict(&self, layer: Layer) -> Self {
        assert_eq!(self.grid.layer, Layer::Whole, "restrict expects a whole-slab field");
        let m = self.grid.m;
        let range = match layer {
            Layer::Minus => 0..m,
            Layer::Plus => m - 1..2 * m - 1,
            Layer::Whole => return self.clone(),
        };
        Self {
            grid: self.grid.with_layer(layer),
            data: self.data.slice(s![.., .., range]).to_owned(),
            real: self.real,
        }
    }

    /// The constant-in-x' part as a profile over nodes (mode (0,0)).
    pub fn mean_mode(&self) -> Array1<Complex64> {
        let k = self.grid.k_max;
        self.data.slice(s![k, k, ..]).to_owned()
    }

    /// Volume integral by quadrature (zero mode times layer measure).
    pub fn integral(&self) -> f64 {
        let w = self.grid.quad_weights();
        let k = self.grid.k_max;
        let mut acc = 0.0;
        for j in 0..self.grid.nodes() {
            acc += w[j] * self.data[[k, k, j]].re;
        }
        acc
    }
}

/// Three scalar components sharing one grid.
#[derive(Debug, Clone)]
pub struct VectorLayerField {
    pub components: [LayerField; 3],
}

impl VectorLayerField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            components: [
                LayerField::zeros(grid),
                LayerField::zeros(grid),
                LayerField::zeros(grid),
            ],
        }
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(LayerField::max_abs).fold(0.0, f64::max)
    }

    pub fn axpy(&mut self, c: f64, other: &Self) {
        for (a, b) in self.components.iter_mut().zip(other.components.iter()) {
            a.axpy(c, b);
        }
    }

    pub fn minus_of(&self, other: &Self) -> Self {
        Self {
            components: [
                self.components[0].minus_of(&other.components[0]),
                self.components[1].minus_of(&other.components[1]),
                self.components[2].minus_of(&other.components[2]),
            ],
        }
    }
}

impl std::ops::Index<usize> for VectorLayerField {
    type Output = LayerField;
    fn index(&self, i: usize) -> &LayerField {
        &self.components[i]
    }
}

impl std::ops::IndexMut<usize> for VectorLayerField {
    fn index_mut(&mut self, i: usize) -> &mut LayerField {
        &mut self.components[i]
    }
}

/// 2 pi |k| for an integer mode.
pub fn kappa(k1: i64, k2: i64) -> f64 {
    2.0 * PI * ((k1 * k1 + k2 * k2) as f64).sqrt()
}
