//! Pseudo-spectral simulator and verification suite for incompressible
//! current-vortex sheets on the fixed slab T^2 x (-1, 1): front lifting,
//! comatrix unknowns, the coupled elliptic pressure problem with interface
//! jumps, the evolution map with constraint monitoring, a Cauchy-Kowalevskaya
//! Picard iteration, and computable analytic-scale norms.

pub mod error;
pub mod geometry;
pub mod linalg;
pub mod norms;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
