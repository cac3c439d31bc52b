//! Front lifting psi, the diffeomorphism data (J, A, a, N) and the comatrix
//! change of unknowns u = a v, b = a B.

use crate::error::{Error, Result};
use crate::spectral::ops::{
    self, inverse_tangential, pointwise_divide, pointwise_product, tangential_derivative,
};
use crate::spectral::{Grid, Layer, LayerField, TangentialSpectrum, VectorLayerField};
use ndarray::Array3;

/// Interface position and velocity in dimensionless slab coordinates.
#[derive(Debug, Clone)]
pub struct Front {
    pub f: TangentialSpectrum,
    pub fdot: TangentialSpectrum,
}

impl Front {
    pub fn flat(k_max: usize) -> Self {
        Self {
            f: TangentialSpectrum::zeros(k_max),
            fdot: TangentialSpectrum::zeros(k_max),
        }
    }

    /// The front must stay strictly between the walls.
    pub fn validate(&self) -> Result<()> {
        let max = ops::spectrum_max_abs_physical(&self.f);
        if max >= 1.0 {
            return Err(Error::Parameter {
                module: "geometry",
                operation: "Front::validate",
                reason: format!("front reaches the walls: max |f| = {max:.6}"),
            });
        }
        Ok(())
    }
}

/// sin(y)/y with the Taylor guard below |y| = 1e-4.
pub fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        1.0 - y2 / 6.0 + y2 * y2 / 120.0
    } else {
        y.sin() / y
    }
}

fn dsinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        -y / 3.0 + y * y2 / 30.0
    } else {
        y.cos() / y - y.sin() / (y * y)
    }
}

fn d2sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let y2 = y * y;
        -1.0 / 3.0 + y2 / 10.0 - y2 * y2 / 168.0
    } else {
        let (s, c) = y.sin_cos();
        -s / y - 2.0 * c / (y * y) + 2.0 * s / (y * y * y)
    }
}

/// Per-mode lifting profile (1 - x3^2) sinc(kappa x3) and its first two
/// normal derivatives.
fn lift_profile(kappa: f64, x: f64) -> (f64, f64, f64) {
    let y = kappa * x;
    let s = sinc(y);
    let s1 = dsinc(y);
    let s2 = d2sinc(y);
    let om = 1.0 - x * x;
    let p0 = om * s;
    let p1 = -2.0 * x * s + om * kappa * s1;
    let p2 = -2.0 * s - 4.0 * x * kappa * s1 + om * kappa * kappa * s2;
    (p0, p1, p2)
}

/// Lift a front onto the given grid: per mode k,
/// psi_k(x3) = (1 - x3^2) sinc(2 pi |k| x3) c_k, so that psi|_Gamma = g,
/// psi = 0 on the walls and d3 psi = 0 on Gamma.
pub fn lift_front(g: &TangentialSpectrum, grid: Grid) -> LayerField {
    assert_eq!(g.k_max, grid.k_max);
    LayerField::from_profile(grid, g, |k1, k2, x| {
        lift_profile(crate::spectral::kappa(k1, k2), x).0
    })
}

fn lift_d3(g: &TangentialSpectrum, grid: Grid) -> LayerField {
    LayerField::from_profile(grid, g, |k1, k2, x| {
        lift_profile(crate::spectral::kappa(k1, k2), x).1
    })
}

fn lift_d33(g: &TangentialSpectrum, grid: Grid) -> LayerField {
    LayerField::from_profile(grid, g, |k1, k2, x| {
        lift_profile(crate::spectral::kappa(k1, k2), x).2
    })
}

/// Physical-space copies of the geometry coefficients used in right-hand
/// side assembly.
pub struct GeomPhys {
    pub dpsi: [Array3<f64>; 3],
    pub psidot: Array3<f64>,
    pub j: Array3<f64>,
    pub jinv: Array3<f64>,
    /// dJ = (d1 d3 psi, d2 d3 psi, d3 d3 psi)
    pub dj: [Array3<f64>; 3],
    /// tangential Hessian of psi: (d11, d12, d22)
    pub d2psi: [Array3<f64>; 3],
    /// e33 = (1 + |grad' psi|^2)/J - 1, the normal-normal flux perturbation
    pub e33: Array3<f64>,
}

/// Geometry coefficients on one layer (or the whole slab).
pub struct LayerGeometry {
    pub grid: Grid,
    pub psi: LayerField,
    pub dpsi: [LayerField; 3],
    pub psidot: LayerField,
    pub j: LayerField,
    pub jinv: LayerField,
    pub e33: LayerField,
    pub phys: Option<GeomPhys>,
}

impl LayerGeometry {
    fn build(front: &Front, grid: Grid, with_phys: bool) -> Result<Self> {
        let psi = lift_front(&front.f, grid);
        let d3 = lift_d3(&front.f, grid);
        let d33 = lift_d33(&front.f, grid);
        let psidot = lift_front(&front.fdot, grid);
        let d1 = tangential_derivative(&psi, 1);
        let d2 = tangential_derivative(&psi, 2);
        let mut j = d3.clone();
        let k = grid.k_max;
        for n in 0..grid.nodes() {
            j.data[[k, k, n]] += 1.0;
        }
        let one = LayerField::constant(grid, 1.0);
        let jinv = pointwise_divide(&one, &j)?;
        // e33 = (1 + |grad' psi|^2 - J)/J = (|grad' psi|^2 - d3 psi)/J
        let mut num = pointwise_product(&d1, &d1)?;
        num.axpy(1.0, &pointwise_product(&d2, &d2)?);
        num.axpy(-1.0, &d3);
        let e33 = pointwise_divide(&num, &j)?;

        let phys = if with_phys {
            let dj1 = tangential_derivative(&d3, 1);
            let dj2 = tangential_derivative(&d3, 2);
            let d11 = tangential_derivative(&d1, 1);
            let d12 = tangential_derivative(&d1, 2);
            let d22 = tangential_derivative(&d2, 2);
            Some(GeomPhys {
                dpsi: [
                    inverse_tangential(&d1),
                    inverse_tangential(&d2),
                    inverse_tangential(&d3),
                ],
                psidot: inverse_tangential(&psidot),
                j: inverse_tangential(&j),
                jinv: inverse_tangential(&jinv),
                dj: [
                    inverse_tangential(&dj1),
                    inverse_tangential(&dj2),
                    inverse_tangential(&d33),
                ],
                d2psi: [
                    inverse_tangential(&d11),
                    inverse_tangential(&d12),
                    inverse_tangential(&d22),
                ],
                e33: inverse_tangential(&e33),
            })
        } else {
            None
        };

        Ok(Self {
            grid,
            psi,
            dpsi: [d1, d2, d3],
            psidot,
            j,
            jinv,
            e33,
            phys,
        })
    }

    pub fn phys(&self) -> &GeomPhys {
        self.phys.as_ref().expect("layer geometry built without physical caches")
    }

    /// Entry (i, j) of the comatrix a = J A of (1.9).
    pub fn a_entry(&self, i: usize, j: usize) -> LayerField {
        match (i, j) {
            (0, 0) | (1, 1) => self.j.clone(),
            (2, 0) => self.dpsi[0].scaled(-1.0),
            (2, 1) => self.dpsi[1].scaled(-1.0),
            (2, 2) => LayerField::constant(self.grid, 1.0),
            _ => LayerField::zeros(self.grid),
        }
    }

    /// Entry (i, j) of A = I3 - Atilde, the inverse Jacobian matrix.
    pub fn a_inv_entry(&self, i: usize, j: usize) -> Result<LayerField> {
        let tilde = self.atilde_entry(i, j)?;
        let mut out = tilde.scaled(-1.0);
        if i == j {
            let k = self.grid.k_max;
            for n in 0..self.grid.nodes() {
                out.data[[k, k, n]] += 1.0;
            }
        }
        Ok(out)
    }

    /// Entry (i, j) of Atilde (only the third row is nonzero).
    pub fn atilde_entry(&self, i: usize, j: usize) -> Result<LayerField> {
        if i == 2 {
            pointwise_product(&self.dpsi[j], &self.jinv)
        } else {
            Ok(LayerField::zeros(self.grid))
        }
    }

    /// Component i of N = (-d1 psi, -d2 psi, 1), defined on the whole layer.
    pub fn n_entry(&self, i: usize) -> LayerField {
        match i {
            0 => self.dpsi[0].scaled(-1.0),
            1 => self.dpsi[1].scaled(-1.0),
            2 => LayerField::constant(self.grid, 1.0),
            _ => panic!("vector index out of range"),
        }
    }

    /// Max-norm divergence of column j of a (Piola defect).
    pub fn piola_defect(&self, col: usize) -> f64 {
        let mut div = tangential_derivative(&self.a_entry(0, col), 1);
        div.axpy(1.0, &tangential_derivative(&self.a_entry(1, col), 2));
        div.axpy(1.0, &ops::normal_derivative(&self.a_entry(2, col)));
        ops::max_abs_physical(&div)
    }
}

/// All geometry data derived from a front: whole-slab fields plus per-layer
/// restrictions with physical caches. Immutable after construction.
pub struct GeometryBundle {
    pub front: Front,
    pub whole: LayerGeometry,
    pub minus: LayerGeometry,
    pub plus: LayerGeometry,
    pub j_min: f64,
    pub j_max: f64,
}

impl GeometryBundle {
    pub fn layer(&self, layer: Layer) -> &LayerGeometry {
        match layer {
            Layer::Minus => &self.minus,
            Layer::Plus => &self.plus,
            Layer::Whole => &self.whole,
        }
    }
}

/// Build the geometry for a front, enforcing the smallness regime
/// J in [1/2, 3/2] pointwise on the physical grid.
pub fn build_geometry(front: &Front, grid: Grid) -> Result<GeometryBundle> {
    front.validate()?;
    let whole_grid = grid.with_layer(Layer::Whole);
    let whole = LayerGeometry::build(front, whole_grid, false)?;
    let minus = LayerGeometry::build(front, whole_grid.with_layer(Layer::Minus), true)?;
    let plus = LayerGeometry::build(front, whole_grid.with_layer(Layer::Plus), true)?;

    let mut j_min = f64::INFINITY;
    let mut j_max = f64::NEG_INFINITY;
    for lg in [&minus, &plus] {
        for v in lg.phys().j.iter() {
            j_min = j_min.min(*v);
            j_max = j_max.max(*v);
        }
    }
    if j_min < 0.5 || j_max > 1.5 {
        return Err(Error::FrontTooLarge { j_min, j_max });
    }
    if !(whole.psi.is_finite() && minus.jinv.is_finite() && plus.jinv.is_finite()) {
        return Err(Error::Parameter {
            module: "geometry",
            operation: "build_geometry",
            reason: "non-finite geometry fields".into(),
        });
    }
    Ok(GeometryBundle {
        front: front.clone(),
        whole,
        minus,
        plus,
        j_min,
        j_max,
    })
}

/// Comatrix change of unknowns: u = a v, b = a B, so that
/// u = (J v1, J v2, v . N).
pub fn to_comatrix_unknowns(
    v: &VectorLayerField,
    b_field: &VectorLayerField,
    geom: &LayerGeometry,
) -> Result<(VectorLayerField, VectorLayerField)> {
    let map = |w: &VectorLayerField| -> Result<VectorLayerField> {
        let u1 = pointwise_product(&geom.j, &w[0])?;
        let u2 = pointwise_product(&geom.j, &w[1])?;
        let mut u3 = w[2].clone();
        u3.axpy(-1.0, &pointwise_product(&geom.dpsi[0], &w[0])?);
        u3.axpy(-1.0, &pointwise_product(&geom.dpsi[1], &w[1])?);
        Ok(VectorLayerField {
            components: [u1, u2, u3],
        })
    };
    Ok((map(v)?, map(b_field)?))
}

/// Closed-form inverse of the comatrix map:
/// v1 = u1/J, v2 = u2/J, v3 = u3 + d1 psi v1 + d2 psi v2.
pub fn from_comatrix_unknowns(
    u: &VectorLayerField,
    b: &VectorLayerField,
    geom: &LayerGeometry,
) -> Result<(VectorLayerField, VectorLayerField)> {
    let map = |w: &VectorLayerField| -> Result<VectorLayerField> {
        let v1 = pointwise_product(&w[0], &geom.jinv)?;
        let v2 = pointwise_product(&w[1], &geom.jinv)?;
        let mut v3 = w[2].clone();
        v3.axpy(1.0, &pointwise_product(&geom.dpsi[0], &v1)?);
        v3.axpy(1.0, &pointwise_product(&geom.dpsi[1], &v2)?);
        Ok(VectorLayerField {
            components: [v1, v2, v3],
        })
    };
    Ok((map(u)?, map(b)?))
}

/// The transported velocities of (1.12) in comatrix variables:
/// vtilde = (u - dt(psi) e3)/J and Btilde = b/J.
pub fn transported_velocities(
    u: &VectorLayerField,
    b: &VectorLayerField,
    geom: &LayerGeometry,
) -> Result<(VectorLayerField, VectorLayerField)> {
    let vt1 = pointwise_product(&u[0], &geom.jinv)?;
    let vt2 = pointwise_product(&u[1], &geom.jinv)?;
    let shifted = u[2].minus_of(&geom.psidot);
    let vt3 = pointwise_product(&shifted, &geom.jinv)?;
    let bt = VectorLayerField {
        components: [
            pointwise_product(&b[0], &geom.jinv)?,
            pointwise_product(&b[1], &geom.jinv)?,
            pointwise_product(&b[2], &geom.jinv)?,
        ],
    };
    Ok((
        VectorLayerField {
            components: [vt1, vt2, vt3],
        },
        bt,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ops::{max_abs_physical, normal_derivative, trace};
    use crate::spectral::Boundary;
    use std::f64::consts::PI;

    fn whole_grid(k: usize, m: usize) -> Grid {
        Grid::new(k, m, Layer::Whole).unwrap()
    }

    /// Random front with analytic-style exponentially decaying shells.
    fn decaying_front(k_max: usize, amp: f64, decay: f64, seed: u64) -> TangentialSpectrum {
        let mut s = TangentialSpectrum::zeros(k_max);
        let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            2.0 * (state as f64 / u64::MAX as f64) - 1.0
        };
        let km = k_max as i64;
        for k1 in -km..=km {
            for k2 in -km..=km {
                if k1 == 0 && k2 == 0 {
                    continue;
                }
                let kn = ((k1 * k1 + k2 * k2) as f64).sqrt();
                let mag = amp * (-decay * kn).exp();
                let i1 = (k1 + km) as usize;
                let i2 = (k2 + km) as usize;
                s.coeffs[[i1, i2]] =
                    num_complex::Complex64::new(mag * next(), mag * next());
            }
        }
        s.hermitize();
        s
    }

    #[test]
    fn lift_of_constant_is_parabola() {
        let g = whole_grid(3, 9);
        let c = TangentialSpectrum::constant(3, 2.0);
        let psi = lift_front(&c, g);
        let x3 = g.x3();
        for (j, &x) in x3.iter().enumerate() {
            let got = psi.data[[3, 3, j]];
            assert!((got.re - 2.0 * (1.0 - x * x)).abs() < 1e-14);
        }
    }

    #[test]
    fn lift_of_single_cosine_matches_closed_form() {
        let g = whole_grid(4, 17);
        let f = TangentialSpectrum::cosine(4, [1, 0], 1.0);
        let psi = lift_front(&f, g);
        let x3 = g.x3();
        let phys = inverse_tangential(&psi);
        let p = g.phys();
        for j1 in 0..p {
            let x1 = j1 as f64 / p as f64;
            for (j, &z) in x3.iter().enumerate() {
                let want = (1.0 - z * z) * sinc(2.0 * PI * z) * (2.0 * PI * x1).cos();
                assert!(
                    (phys[[j1, 0, j]] - want).abs() < 1e-12,
                    "at x1={x1}, z={z}"
                );
            }
        }
    }

    #[test]
    fn lift_trace_identities() {
        let g = whole_grid(8, 33);
        let f = decaying_front(8, 0.02, 1.2, 7);
        let psi = lift_front(&f, g);
        let at_gamma = trace(&psi, Boundary::Gamma).unwrap();
        assert!(at_gamma.minus_of(&f).max_abs() < 1e-13);
        assert!(trace(&psi, Boundary::GammaPlus).unwrap().max_abs() < 1e-13);
        assert!(trace(&psi, Boundary::GammaMinus).unwrap().max_abs() < 1e-13);
        // collocation normal derivative vanishes on Gamma
        let d3 = normal_derivative(&psi);
        let d3_gamma = trace(&d3, Boundary::Gamma).unwrap();
        assert!(
            ops::spectrum_max_abs_physical(&d3_gamma) < 1e-10,
            "d3 psi on Gamma = {}",
            ops::spectrum_max_abs_physical(&d3_gamma)
        );
    }

    #[test]
    fn lift_is_linear() {
        let g = whole_grid(4, 9);
        let f1 = decaying_front(4, 0.1, 0.8, 1);
        let f2 = decaying_front(4, 0.1, 0.8, 2);
        let mut comb = f1.scaled(0.7);
        comb.axpy(-1.3, &f2);
        let lhs = lift_front(&comb, g);
        let mut rhs = lift_front(&f1, g).scaled(0.7);
        rhs.axpy(-1.3, &lift_front(&f2, g));
        assert!(lhs.minus_of(&rhs).max_abs() < 1e-14);
    }

    #[test]
    fn flat_front_gives_identity_geometry() {
        let g = whole_grid(4, 9);
        let bundle = build_geometry(&Front::flat(4), g).unwrap();
        assert!(bundle.whole.psi.max_abs() < 1e-15);
        assert!((bundle.j_min - 1.0).abs() < 1e-13);
        assert!((bundle.j_max - 1.0).abs() < 1e-13);
        let lg = &bundle.plus;
        assert!(lg.a_entry(0, 0).minus_of(&LayerField::constant(lg.grid, 1.0)).max_abs() < 1e-13);
        assert!(lg.a_entry(2, 0).max_abs() < 1e-15);
        assert!(lg.n_entry(0).max_abs() < 1e-15);
    }

    #[test]
    fn piola_defect_small_and_det_is_j_squared() {
        let g = whole_grid(6, 17);
        let mut front = Front::flat(6);
        front.f = TangentialSpectrum::cosine(6, [1, 0], 0.01);
        let bundle = build_geometry(&front, g).unwrap();
        for lg in [&bundle.minus, &bundle.plus] {
            for col in 0..3 {
                let defect = lg.piola_defect(col);
                assert!(defect < 1e-8, "column {col} defect {defect}");
            }
            // det(a) = J^2 from the displayed structure of (1.9)
            let a00 = lg.a_entry(0, 0);
            let a11 = lg.a_entry(1, 1);
            let det = pointwise_product(&a00, &a11).unwrap(); // a22 = 1, off-diagonals vanish in the first two rows
            let j2 = pointwise_product(&lg.j, &lg.j).unwrap();
            assert!(max_abs_physical(&det.minus_of(&j2)) < 1e-10);
        }
    }

    #[test]
    fn large_front_is_rejected() {
        let g = whole_grid(4, 17);
        let mut front = Front::flat(4);
        // amplitude sweep: find the admissibility threshold
        let mut rejected = false;
        for amp in [0.05, 0.1, 0.2, 0.4, 0.8] {
            front.f = TangentialSpectrum::cosine(4, [1, 0], amp);
            match build_geometry(&front, g) {
                Ok(b) => assert!(b.j_min >= 0.5 && b.j_max <= 1.5),
                Err(Error::FrontTooLarge { j_min, j_max }) => {
                    assert!(j_min < 0.5 || j_max > 1.5);
                    rejected = true;
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        assert!(rejected, "no amplitude in the sweep tripped the J gate");
    }

    #[test]
    fn comatrix_round_trip_and_residual() {
        let g = whole_grid(6, 17);
        let mut front = Front::flat(6);
        front.f = TangentialSpectrum::cosine(6, [1, 0], 0.01);
        front.fdot = TangentialSpectrum::cosine(6, [1, 1], 0.005);
        let bundle = build_geometry(&front, g).unwrap();
        let lg = &bundle.plus;

        // band-limited random-ish v, B (band <= K/3 keeps truncation losses
        // below the 1e-12 contract)
        let mk = |seed: u64| -> VectorLayerField {
            let mut v = VectorLayerField::zeros(lg.grid);
            for (c, comp) in v.components.iter_mut().enumerate() {
                let s = decaying_front(2, 0.5, 0.3, seed + c as u64);
                let mut emb = TangentialSpectrum::zeros(6);
                for k1 in -2i64..=2 {
                    for k2 in -2i64..=2 {
                        emb.coeffs[[(k1 + 6) as usize, (k2 + 6) as usize]] =
                            s.coeffs[[(k1 + 2) as usize, (k2 + 2) as usize]];
                    }
                }
                *comp = LayerField::from_profile(lg.grid, &emb, |_, _, x| 1.0 + 0.5 * x);
            }
            v
        };
        let v = mk(11);
        let b = mk(23);
        let (u, bb) = to_comatrix_unknowns(&v, &b, lg).unwrap();
        let (v2, b2) = from_comatrix_unknowns(&u, &bb, lg).unwrap();
        for c in 0..3 {
            assert!(
                v2[c].minus_of(&v[c]).max_abs() < 1e-12,
                "component {c} round trip"
            );
            assert!(b2[c].minus_of(&b[c]).max_abs() < 1e-12);
        }
        // residual oracle: a . from(u) - u
        let (uu, _) = to_comatrix_unknowns(&v2, &b2, lg).unwrap();
        for c in 0..3 {
            assert!(max_abs_physical(&uu[c].minus_of(&u[c])) < 1e-12);
        }
    }

    #[test]
    fn comatrix_flat_front_is_identity_and_e3_maps_to_e3() {
        let g = whole_grid(4, 9);
        let bundle = build_geometry(&Front::flat(4), g).unwrap();
        let lg = &bundle.minus;
        let mut v = VectorLayerField::zeros(lg.grid);
        v[2] = LayerField::constant(lg.grid, 1.0);
        let (u, _) = to_comatrix_unknowns(&v, &v, lg).unwrap();
        assert!(u[0].max_abs() < 1e-14);
        assert!(u[1].max_abs() < 1e-14);
        assert!(u[2].minus_of(&LayerField::constant(lg.grid, 1.0)).max_abs() < 1e-14);
    }

    #[test]
    fn unit_vertical_maps_to_unit_vertical_any_front() {
        // v = (0,0,1): u = a v = (0, 0, 1) since the third column of a is (0,0,1)
        let g = whole_grid(6, 17);
        let mut front = Front::flat(6);
        front.f = decaying_front(6, 0.02, 1.0, 5);
        let bundle = build_geometry(&front, g).unwrap();
        let lg = &bundle.plus;
        let mut v = VectorLayerField::zeros(lg.grid);
        v[2] = LayerField::constant(lg.grid, 1.0);
        let (u, _) = to_comatrix_unknowns(&v, &v, lg).unwrap();
        assert!(u[0].max_abs() < 1e-13);
        assert!(u[1].max_abs() < 1e-13);
        assert!(u[2].minus_of(&LayerField::constant(lg.grid, 1.0)).max_abs() < 1e-13);
    }

    #[test]
    fn transported_velocities_identities() {
        let g = whole_grid(5, 17);
        let mut front = Front::flat(5);
        // small amplitude keeps the K-band tail of 1/J below the 1e-12 contract
        front.f = TangentialSpectrum::cosine(5, [1, 0], 0.001);
        front.fdot = TangentialSpectrum::cosine(5, [1, 0], 0.4);
        let bundle = build_geometry(&front, g).unwrap();
        let lg = &bundle.minus;

        // u = 0 => vtilde = (0, 0, -psidot/J)
        let zero = VectorLayerField::zeros(lg.grid);
        let (vt, bt) = transported_velocities(&zero, &zero, lg).unwrap();
        assert!(vt[0].max_abs() < 1e-14);
        let want = pointwise_product(&lg.psidot.scaled(-1.0), &lg.jinv).unwrap();
        assert!(vt[2].minus_of(&want).max_abs() < 1e-13);
        assert!(bt[2].max_abs() < 1e-14);

        // J vtilde + psidot e3 = u for band-limited u
        let mut u = VectorLayerField::zeros(lg.grid);
        let spec = TangentialSpectrum::cosine(5, [1, 1], 0.7);
        u[0] = LayerField::from_profile(lg.grid, &spec, |_, _, x| 1.0 - x);
        u[2] = LayerField::from_profile(lg.grid, &spec, |_, _, x| x * x);
        let (vt, _) = transported_velocities(&u, &zero, lg).unwrap();
        for c in 0..3 {
            let mut lhs = pointwise_product(&lg.j, &vt[c]).unwrap();
            if c == 2 {
                lhs.axpy(1.0, &lg.psidot);
            }
            assert!(
                max_abs_physical(&lhs.minus_of(&u[c])) < 1e-12,
                "component {c}"
            );
        }
    }

    #[test]
    fn contravariant_divergence_identity() {
        // J (A^T grad) . w = div(a w) for smooth w
        let g = whole_grid(5, 17);
        let mut front = Front::flat(5);
        front.f = TangentialSpectrum::cosine(5, [1, 0], 0.02);
        let bundle = build_geometry(&front, g).unwrap();
        let lg = &bundle.plus;
        let spec = TangentialSpectrum::cosine(5, [1, 1], 0.3);
        let w = VectorLayerField {
            components: [
                LayerField::from_profile(lg.grid, &spec, |_, _, x| 1.0 + x),
                LayerField::from_profile(lg.grid, &spec, |_, _, x| x * x),
                LayerField::from_profile(lg.grid, &spec, |_, _, x| 0.5 - x),
            ],
        };
        // div(a w)
        let (aw, _) = to_comatrix_unknowns(&w, &w, lg).unwrap();
        let div_aw = ops::divergence(&aw);
        // J (A^T grad) . w = J * sum_i (A^T grad w)_ii ... = J * A_ji d_j w_i
        let mut lhs = LayerField::zeros(lg.grid);
        for i in 0..3 {
            for jj in 0..3 {
                let a_ji = lg.a_inv_entry(jj, i).unwrap();
                let dw = match jj {
                    0 => tangential_derivative(&w[i], 1),
                    1 => tangential_derivative(&w[i], 2),
                    _ => normal_derivative(&w[i]),
                };
                lhs.axpy(1.0, &pointwise_product(&a_ji, &dw).unwrap());
            }
        }
        let lhs = pointwise_product(&lg.j, &lhs).unwrap();
        let err = max_abs_physical(&lhs.minus_of(&div_aw));
        assert!(err < 1e-8, "identity defect {err}");
    }
}
