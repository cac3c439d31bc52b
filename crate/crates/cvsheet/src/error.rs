//! Error types shared across the crate.

use thiserror::Error;

/// Unified error type for spectral, geometry, pressure and evolution layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Array dimensions do not match the grid they claim to live on.
    #[error("{module}::{operation}: shape mismatch, expected {expected}, got {got}")]
    Shape {
        module: &'static str,
        operation: &'static str,
        expected: String,
        got: String,
    },

    /// A boundary was requested that does not belong to the field's layer.
    #[error("{module}::{operation}: boundary {boundary} is not on layer {layer}")]
    Domain {
        module: &'static str,
        operation: &'static str,
        boundary: &'static str,
        layer: &'static str,
    },

    /// The front pushes the Jacobian J = 1 + d3(psi) out of [1/2, 3/2].
    #[error("geometry::build_geometry: front too large, J range [{j_min:.6}, {j_max:.6}] leaves [0.5, 1.5]")]
    FrontTooLarge { j_min: f64, j_max: f64 },

    /// Normal differentiation past the certified stability cap.
    #[error("analytic_norms::norm_bk: derivative order {order} exceeds stability cap (amplification {amplification:.3e} > {limit:.1e} per order)")]
    OrderTooHigh {
        order: usize,
        amplification: f64,
        limit: f64,
    },

    /// Pressure sources violate the solvability condition beyond tolerance.
    #[error("pressure::solve_pressure: incompatible sources, |defect| = {defect:.6e} > comp_tol = {tol:.1e}")]
    IncompatibleSources { defect: f64, tol: f64 },

    /// The flat-Laplacian fixed point failed to contract (smallness regime left).
    #[error("pressure::solve_pressure: no convergence in {max_iter} sweeps (last update {last_update:.6e}); front too large for the perturbation solver")]
    FrontTooLargeForSolver { max_iter: usize, last_update: f64 },

    /// A state fed to the evolution map has constraint defects above tolerance.
    #[error("evolution::{operation}: constraint `{name}` defect {value:.6e} > tol {tol:.1e} at t = {time:.6}")]
    ConstraintViolated {
        operation: &'static str,
        name: String,
        value: f64,
        tol: f64,
        time: f64,
    },

    /// A Picard iterate left the window where the pressure problem is solvable.
    #[error("evolution::picard_iterate: analytic window exceeded at iterate {iteration}, t = {time:.6}: {source}")]
    AnalyticWindowExceeded {
        iteration: usize,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    /// Radius estimation on an identically-zero spectrum.
    #[error("analytic_norms::estimate_radius: all coefficients vanish, radius undefined")]
    UndefinedRadius,

    /// Not enough resolved spectral shells for a radius fit.
    #[error("analytic_norms::estimate_radius: need at least {needed} nonzero shells, found {found}")]
    TooFewShells { needed: usize, found: usize },

    /// Invalid parameter outside config validation (e.g. negative dt at call sites).
    #[error("{module}::{operation}: invalid parameter: {reason}")]
    Parameter {
        module: &'static str,
        operation: &'static str,
        reason: String,
    },

    /// Config parse/validation failure (exit code 2).
    #[error("config: {0}")]
    Config(String),

    /// Snapshot I/O, format or checksum failure.
    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code buckets: 2 = validation, 3 = solver abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter { .. } => 2,
            Error::Io(_) | Error::Snapshot(_) => 2,
            _ => 3,
        }
    }
}
