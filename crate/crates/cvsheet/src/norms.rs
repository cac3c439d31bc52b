//! Computable analytic-scale norms: the truncated sums
//! ||u||^k_{rho,r} = sum_n rho^n/n! max_{|alpha|=n, alpha3<=k} ||d^alpha u||_{H^r},
//! ||u||_{rho,r,sigma} = sum_k sigma^k ||u||^k_{rho,r}, the front norm on T^2,
//! analyticity-radius estimation, and empirical verification of the scale's
//! structural inequalities.

use crate::error::{Error, Result};
use crate::geometry::lift_front;
use crate::spectral::ops::{
    deriv_sum_weight, pointwise_product, profile_l2_sq_tables, sobolev_norm_torus, trace,
};
use crate::spectral::{Boundary, Grid, Layer, LayerField, TangentialSpectrum};
use ndarray::Array2;
use std::f64::consts::PI;

/// Certified per-order amplification limit for repeated collocation
/// differentiation; beyond this the tables are considered unstable.
pub const AMPLIFICATION_LIMIT: f64 = 1e3;

/// Parameters of the analytic scale: radius, Sobolev index, normal weight and
/// truncation caps.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticNormParams {
    pub rho: f64,
    pub rho0: f64,
    pub r: usize,
    pub sigma: f64,
    pub k_cap: usize,
    pub n_cap: usize,
}

impl Default for AnalyticNormParams {
    fn default() -> Self {
        Self {
            rho: 0.25,
            rho0: 0.5,
            r: 3,
            sigma: 0.25,
            k_cap: 6,
            n_cap: 12,
        }
    }
}

impl AnalyticNormParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Error::Parameter {
            module: "analytic_norms",
            operation: "AnalyticNormParams::validate",
            reason,
        };
        if !(self.rho > 0.0 && self.rho <= self.rho0 && self.rho0 <= 1.0) {
            return Err(bad(format!(
                "need 0 < rho <= rho0 <= 1, got rho = {}, rho0 = {}",
                self.rho, self.rho0
            )));
        }
        if !(self.sigma > 0.0 && self.sigma <= 0.5) {
            return Err(bad(format!("need sigma in (0, 1/2], got {}", self.sigma)));
        }
        if self.n_cap < self.k_cap {
            return Err(bad(format!(
                "need n_cap >= k_cap, got n_cap = {}, k_cap = {}",
                self.n_cap, self.k_cap
            )));
        }
        Ok(())
    }
}

/// A truncated norm value with its per-order terms and a tail estimate.
#[derive(Debug, Clone)]
pub struct NormReport {
    pub value: f64,
    pub truncation_tail_bound: f64,
    pub per_n_terms: Vec<f64>,
}

/// Per-mode squared L^2 profiles of d3^q u with the amplification guard
/// applied; the basis for every layer norm here.
pub struct DerivTables {
    grid: Grid,
    tables: Vec<Array2<f64>>,
}

impl DerivTables {
    pub fn build(u: &LayerField, q_max: usize) -> Result<Self> {
        let (tables, global) = profile_l2_sq_tables(u, q_max);
        for q in 1..=q_max {
            if global[q - 1] > 1e-280 {
                let amp = (global[q] / global[q - 1]).sqrt();
                if amp > AMPLIFICATION_LIMIT {
                    return Err(Error::OrderTooHigh {
                        order: q,
                        amplification: amp,
                        limit: AMPLIFICATION_LIMIT,
                    });
                }
            }
        }
        Ok(Self {
            grid: u.grid,
            tables,
        })
    }

    pub fn q_max(&self) -> usize {
        self.tables.len() - 1
    }

    /// ||d^alpha u||^2_{H^r} from the tables.
    pub fn h_norm_sq(&self, r: usize, a1: usize, a2: usize, a3: usize) -> f64 {
        debug_assert!(r + a3 <= self.q_max());
        let n = self.grid.modes();
        let mut total = 0.0;
        for q in 0..=r {
            let s = r - q;
            let table = &self.tables[q + a3];
            for i1 in 0..n {
                let k1 = self.grid.mode_of(i1);
                let p1 = (2.0 * PI * k1 as f64).powi(2 * a1 as i32);
                for i2 in 0..n {
                    let k2 = self.grid.mode_of(i2);
                    let p2 = (2.0 * PI * k2 as f64).powi(2 * a2 as i32);
                    total += deriv_sum_weight(s, k1, k2) * p1 * p2 * table[[i1, i2]];
                }
            }
        }
        total
    }
}

fn tail_from_terms(per_n: &[f64]) -> f64 {
    let n = per_n.len();
    if n < 2 {
        return per_n.last().copied().unwrap_or(0.0);
    }
    let last = per_n[n - 1];
    let prev = per_n[n - 2];
    if prev > 0.0 {
        let ratio = (last / prev).min(0.9);
        last * ratio / (1.0 - ratio)
    } else {
        last
    }
}

/// ||u||^k_{rho,r} with explicit caps, reusing prebuilt derivative tables.
pub fn norm_bk_from_tables(
    tables: &DerivTables,
    rho: f64,
    r: usize,
    k: usize,
    k_cap: usize,
    n_cap: usize,
) -> NormReport {
    let k_eff = k.min(k_cap);
    let mut per_n = Vec::with_capacity(n_cap + 1);
    let mut factorial = 1.0;
    let mut rho_pow = 1.0;
    for n in 0..=n_cap {
        if n > 0 {
            factorial *= n as f64;
            rho_pow *= rho;
        }
        let mut best = 0.0f64;
        for a3 in 0..=k_eff.min(n) {
            for a1 in 0..=(n - a3) {
                let a2 = n - a3 - a1;
                best = best.max(tables.h_norm_sq(r, a1, a2, a3));
            }
        }
        per_n.push(rho_pow / factorial * best.sqrt());
    }
    let value = per_n.iter().sum();
    NormReport {
        value,
        truncation_tail_bound: tail_from_terms(&per_n),
        per_n_terms: per_n,
    }
}

/// The B^k_{rho,r} norm of Definition 1.4 (truncated at n_cap).
pub fn norm_bk(u: &LayerField, p: &AnalyticNormParams, k: usize) -> Result<NormReport> {
    p.validate()?;
    let k_eff = k.min(p.k_cap);
    let tables = DerivTables::build(u, p.r + k_eff.min(p.n_cap))?;
    Ok(norm_bk_from_tables(&tables, p.rho, p.r, k, p.k_cap, p.n_cap))
}

/// The B_{rho,r,sigma} norm of Definition 1.8: sum_k sigma^k ||u||^k,
/// truncated at k_cap, with the geometric tail bound
/// sigma^{k_cap+1}/(1-sigma) times the last-term plateau.
pub fn norm_brs(u: &LayerField, p: &AnalyticNormParams) -> Result<NormReport> {
    p.validate()?;
    let tables = DerivTables::build(u, p.r + p.k_cap.min(p.n_cap))?;
    Ok(norm_brs_from_tables(&tables, p))
}

pub fn norm_brs_from_tables(tables: &DerivTables, p: &AnalyticNormParams) -> NormReport {
    let mut per_k = Vec::with_capacity(p.k_cap + 1);
    let mut sig_pow = 1.0;
    let mut last_bk = 0.0;
    for k in 0..=p.k_cap {
        if k > 0 {
            sig_pow *= p.sigma;
        }
        let bk = norm_bk_from_tables(tables, p.rho, p.r, k, p.k_cap, p.n_cap);
        last_bk = bk.value;
        per_k.push(sig_pow * bk.value);
    }
    let value = per_k.iter().sum();
    let tail = p.sigma.powi(p.k_cap as i32 + 1) / (1.0 - p.sigma) * last_bk;
    NormReport {
        value,
        truncation_tail_bound: tail,
        per_n_terms: per_k,
    }
}

/// The front norm of Definition 1.11:
/// sum_n rho^n/n! max_{|alpha'|=n} ||d^{alpha'} f||_{H^s(T^2)}.
pub fn norm_front(f: &TangentialSpectrum, rho: f64, s: f64, n_cap: usize) -> NormReport {
    let n_modes = f.modes();
    let km = f.k_max as i64;
    // per-mode (1+|k|^2)^s |c|^2
    let mut base = Array2::<f64>::zeros((n_modes, n_modes));
    for i1 in 0..n_modes {
        let k1 = i1 as i64 - km;
        for i2 in 0..n_modes {
            let k2 = i2 as i64 - km;
            base[[i1, i2]] =
                (1.0 + (k1 * k1 + k2 * k2) as f64).powf(s) * f.coeffs[[i1, i2]].norm_sqr();
        }
    }
    let mut per_n = Vec::with_capacity(n_cap + 1);
    let mut factorial = 1.0;
    let mut rho_pow = 1.0;
    for n in 0..=n_cap {
        if n > 0 {
            factorial *= n as f64;
            rho_pow *= rho;
        }
        let mut best = 0.0f64;
        for a1 in 0..=n {
            let a2 = n - a1;
            let mut acc = 0.0;
            for i1 in 0..n_modes {
                let k1 = i1 as i64 - km;
                let p1 = (2.0 * PI * k1 as f64).powi(2 * a1 as i32);
                for i2 in 0..n_modes {
                    let k2 = i2 as i64 - km;
                    let p2 = (2.0 * PI * k2 as f64).powi(2 * a2 as i32);
                    acc += p1 * p2 * base[[i1, i2]];
                }
            }
            best = best.max(acc);
        }
        per_n.push(rho_pow / factorial * best.sqrt());
    }
    let value = per_n.iter().sum();
    NormReport {
        value,
        truncation_tail_bound: tail_from_terms(&per_n),
        per_n_terms: per_n,
    }
}

/// Outcome of a radius fit: either a fitted decay radius (convention
/// c_k ~ e^{-2 pi rho |k|}) or "at least the grid cutoff" for spectra that
/// decay faster than any measurable exponential (finite trig polynomials).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusEstimate {
    Estimate(f64),
    AtLeastCutoff(f64),
}

impl RadiusEstimate {
    pub fn value(&self) -> f64 {
        match self {
            RadiusEstimate::Estimate(v) | RadiusEstimate::AtLeastCutoff(v) => *v,
        }
    }
}

fn radius_from_shells(shell_max: &[f64], k_max: usize) -> Result<RadiusEstimate> {
    let nonzero = shell_max.iter().filter(|&&v| v > 0.0).count();
    if nonzero == 0 {
        return Err(Error::UndefinedRadius);
    }
    if nonzero < 4 {
        return Err(Error::TooFewShells {
            needed: 4,
            found: nonzero,
        });
    }
    let global_max = shell_max.iter().cloned().fold(0.0f64, f64::max);
    let cutoff = k_max as f64 / (2.0 * PI);
    let lo = (k_max as f64 / 4.0).ceil() as usize;
    let hi = (3.0 * k_max as f64 / 4.0).floor() as usize;
    let lo = lo.max(1);
    let floor = 1e-13 * global_max;
    // outer half of the fit window below the round-off floor => the decay is
    // faster than measurable on this grid
    let outer_start = (lo + hi) / 2;
    let outer_alive = (outer_start..=hi).any(|m| shell_max[m - 1] > floor);
    if !outer_alive {
        return Ok(RadiusEstimate::AtLeastCutoff(cutoff));
    }
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .filter(|&m| shell_max[m - 1] > floor)
        .map(|m| (m as f64, shell_max[m - 1].ln()))
        .collect();
    if pts.len() < 2 {
        return Ok(RadiusEstimate::AtLeastCutoff(cutoff));
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let rho = (-slope / (2.0 * PI)).max(0.0);
    if rho >= cutoff {
        Ok(RadiusEstimate::AtLeastCutoff(cutoff))
    } else {
        Ok(RadiusEstimate::Estimate(rho))
    }
}

/// Shell maxima over |k|_inf shells m = 1..K of a front spectrum.
fn spectrum_shells(f: &TangentialSpectrum) -> Vec<f64> {
    let km = f.k_max as i64;
    let mut shells = vec![0.0f64; f.k_max];
    for i1 in 0..f.modes() {
        let k1 = i1 as i64 - km;
        for i2 in 0..f.modes() {
            let k2 = i2 as i64 - km;
            let m = k1.abs().max(k2.abs());
            if m >= 1 {
                shells[(m - 1) as usize] = shells[(m - 1) as usize].max(f.coeffs[[i1, i2]].norm());
            }
        }
    }
    shells
}

/// Least-squares analyticity-radius estimate from the decay of spectral
/// shell maxima (mid-band fit over shells [K/4, 3K/4]).
pub fn estimate_radius_front(f: &TangentialSpectrum) -> Result<RadiusEstimate> {
    radius_from_shells(&spectrum_shells(f), f.k_max)
}

/// As `estimate_radius_front`, for a layer field (shell maxima also over
/// collocation nodes).
pub fn estimate_radius_field(u: &LayerField) -> Result<RadiusEstimate> {
    let km = u.grid.k_max as i64;
    let mut shells = vec![0.0f64; u.grid.k_max];
    for i1 in 0..u.grid.modes() {
        let k1 = i1 as i64 - km;
        for i2 in 0..u.grid.modes() {
            let k2 = i2 as i64 - km;
            let m = k1.abs().max(k2.abs());
            if m >= 1 {
                for j in 0..u.grid.nodes() {
                    shells[(m - 1) as usize] =
                        shells[(m - 1) as usize].max(u.data[[i1, i2, j]].norm());
                }
            }
        }
    }
    radius_from_shells(&shells, u.grid.k_max)
}

/// One inequality's empirical outcome over a corpus.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    /// max over the corpus of LHS / RHS (RHS includes the paper's explicit
    /// constant when it has one, so <= 1 means the inequality held).
    pub max_ratio: f64,
    /// for inequalities without an explicit constant: the fitted constant
    /// max LHS/RHS-without-constant.
    pub fitted_constant: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct InequalityReport {
    pub checks: Vec<CheckResult>,
}

impl InequalityReport {
    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn ratio_acc(acc: &mut (f64, usize), lhs: f64, rhs: f64) {
    if rhs > 1e-300 {
        acc.0 = acc.0.max(lhs / rhs);
        acc.1 += 1;
    }
}

/// Empirically verify the structural inequalities of the analytic scale on a
/// corpus of layer fields (on Omega^+) and fronts. Explicit-constant checks
/// ((1.32)-(1.35)) report LHS/RHS with the paper's constant; algebra, trace,
/// lifting and Neumann-series checks report fitted constants.
pub fn inequality_suite(
    fields: &[LayerField],
    fronts: &[TangentialSpectrum],
    p: &AnalyticNormParams,
) -> Result<InequalityReport> {
    use crate::spectral::ops::{normal_derivative, tangential_derivative};
    p.validate()?;
    let rho = p.rho;
    let rho_p = 0.5 * rho; // the smaller radius rho' < rho
    let inv_gap = 1.0 / (rho - rho_p);

    let mut c132 = (0.0, 0usize);
    let mut c133 = (0.0, 0usize);
    let mut c134 = (0.0, 0usize);
    let mut c135 = (0.0, 0usize);
    let mut c_alg_bk = (0.0, 0usize);
    let mut c_alg_brs = (0.0, 0usize);
    let mut c_trace = (0.0, 0usize);
    let mut c_lift = (0.0, 0usize);
    let mut c_neumann = (0.0, 0usize);

    for u in fields {
        let tables = DerivTables::build(u, p.r + p.k_cap.min(p.n_cap) + 1)?;
        let k = p.k_cap;
        let rhs_bk = norm_bk_from_tables(&tables, rho, p.r, k, p.k_cap, p.n_cap).value;
        let rhs_brs = norm_brs_from_tables(&tables, p).value;

        for axis in 1..=2usize {
            let du = tangential_derivative(u, axis);
            let dt = DerivTables::build(&du, p.r + p.k_cap.min(p.n_cap))?;
            // (1.32): LHS truncated one order lower so the termwise proof
            // carries over to the truncations
            let lhs =
                norm_bk_from_tables(&dt, rho_p, p.r, k, p.k_cap, p.n_cap.saturating_sub(1)).value;
            ratio_acc(&mut c132, lhs, inv_gap * rhs_bk);
            // (1.34): same order, H-index drops, constant exactly 1
            let lhs34 = norm_bk_from_tables(&dt, rho, p.r - 1, k, p.k_cap, p.n_cap).value;
            ratio_acc(&mut c134, lhs34, rhs_bk);
            // (1.35) tangential part
            let lhs35 = {
                let mut q = *p;
                q.rho = rho_p;
                q.n_cap = p.n_cap - 1;
                norm_brs(&du, &q)?.value
            };
            ratio_acc(&mut c135, lhs35, inv_gap / p.sigma * rhs_brs);
        }
        {
            let d3u = normal_derivative(u);
            let d3t = DerivTables::build(&d3u, p.r + p.k_cap.min(p.n_cap))?;
            // (1.33): k drops by one
            let lhs = norm_bk_from_tables(
                &d3t,
                rho_p,
                p.r,
                k.saturating_sub(1),
                p.k_cap.saturating_sub(1),
                p.n_cap.saturating_sub(1),
            )
            .value;
            ratio_acc(&mut c133, lhs, inv_gap * rhs_bk);
            // (1.34) for the normal direction
            let lhs34 = norm_bk_from_tables(&d3t, rho, p.r - 1, k, p.k_cap, p.n_cap).value;
            ratio_acc(&mut c134, lhs34, rhs_bk);
            // (1.35) normal part
            let lhs35 = {
                let mut q = *p;
                q.rho = rho_p;
                q.n_cap = p.n_cap - 1;
                q.k_cap = p.k_cap - 1;
                norm_brs(&d3u, &q)?.value
            };
            ratio_acc(&mut c135, lhs35, inv_gap / p.sigma * rhs_brs);
        }
        // trace estimate (1.39) on Gamma (fields live on Omega^+)
        if u.grid.layer == Layer::Plus {
            let tr = trace(u, Boundary::Gamma)?;
            let lhs = norm_front(&tr, rho, p.r as f64 - 0.5, p.n_cap).value;
            ratio_acc(&mut c_trace, lhs, rhs_brs);
        }
    }

    // algebra properties on consecutive pairs
    for pair in fields.windows(2) {
        let (u, v) = (&pair[0], &pair[1]);
        let uv = pointwise_product(u, v)?;
        let tu = DerivTables::build(u, p.r + p.k_cap.min(p.n_cap))?;
        let tv = DerivTables::build(v, p.r + p.k_cap.min(p.n_cap))?;
        let tuv = DerivTables::build(&uv, p.r + p.k_cap.min(p.n_cap))?;
        let k = p.k_cap;
        let nu = norm_bk_from_tables(&tu, rho, p.r, k, p.k_cap, p.n_cap).value;
        let nv = norm_bk_from_tables(&tv, rho, p.r, k, p.k_cap, p.n_cap).value;
        let nuv = norm_bk_from_tables(&tuv, rho, p.r, k, p.k_cap, p.n_cap).value;
        ratio_acc(&mut c_alg_bk, nuv, nu * nv);
        let bu = norm_brs_from_tables(&tu, p).value;
        let bv = norm_brs_from_tables(&tv, p).value;
        let buv = norm_brs_from_tables(&tuv, p).value;
        ratio_acc(&mut c_alg_brs, buv, bu * bv);
    }

    // lifting continuity (3.1): psi on the whole slab from each front
    let whole = Grid::new(
        fields
            .first()
            .map(|f| f.grid.k_max)
            .unwrap_or_else(|| fronts.first().map(|f| f.k_max).unwrap_or(4)),
        fields.first().map(|f| f.grid.m).unwrap_or(17),
        Layer::Whole,
    )?;
    for f in fronts {
        let psi = lift_front(f, whole);
        let lhs = norm_brs(&psi, p)?.value;
        let rhs = norm_front(f, rho, p.r as f64 - 0.5, p.n_cap).value;
        ratio_acc(&mut c_lift, lhs, rhs);
    }

    // Neumann series (3.15): ||1/(1+g)|| <= ||1|| + 1/C_r for ||g|| <= 1/(2 C_r)
    let c_r = c_alg_brs.0.max(1e-6);
    let one_whole = LayerField::constant(whole, 1.0);
    let norm_one = norm_brs(&one_whole, p)?.value;
    for f in fronts {
        // reuse lifted fronts as the g corpus, rescaled into the series regime
        let g0 = lift_front(f, whole);
        let n0 = norm_brs(&g0, p)?.value;
        if n0 <= 0.0 {
            continue;
        }
        let g = g0.scaled(1.0 / (2.0 * c_r * n0));
        let one = LayerField::constant(whole, 1.0);
        let mut denom = g.clone();
        let kk = whole.k_max;
        for j in 0..whole.nodes() {
            denom.data[[kk, kk, j]] += 1.0;
        }
        let inv = crate::spectral::ops::pointwise_divide(&one, &denom)?;
        let lhs = norm_brs(&inv, p)?.value;
        ratio_acc(&mut c_neumann, lhs, norm_one + 1.0 / c_r);
    }

    let take = |name: &'static str, acc: (f64, usize)| CheckResult {
        name,
        max_ratio: acc.0,
        fitted_constant: acc.0,
        samples: acc.1,
    };
    Ok(InequalityReport {
        checks: vec![
            take("1.32_tangential", c132),
            take("1.33_normal", c133),
            take("1.34_unit_constant", c134),
            take("1.35_brs", c135),
            take("1.30_algebra_bk", c_alg_bk),
            take("1.36_algebra_brs", c_alg_brs),
            take("1.39_trace", c_trace),
            take("3.1_lifting", c_lift),
            take("3.15_neumann", c_neumann),
        ],
    })
}
