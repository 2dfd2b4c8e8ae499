//! Brute-force integration backends used as independent ground truth:
//! adaptive Gauss-Kronrod on intervals, tensor Gauss rules adapted to a weight
//! on R^n, the trapezoid rule on the torus, importance-sampled Monte Carlo and
//! truncated residue multi-sums.

mod gauss;
mod monte_carlo;
mod quadrature;
mod residue;
mod torus;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use gauss::{gauss_hermite, gauss_legendre, GaussRule};
pub use monte_carlo::{monte_carlo, GaussianSampler, MC_CHUNK};
pub use quadrature::{integrate, integrate_with_breakpoints, QuadTolerance};
pub use residue::residue_multisum;
pub use torus::{quad_torus_nd, MAX_TORUS_DIM};

pub use gauss::{quad_real_nd, MAX_TENSOR_DIM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    GaussKronrod,
    GaussTensor,
    TorusTrapezoid,
    MonteCarlo,
    ResidueSum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationResult {
    pub value: Complex64,
    /// Error bound for deterministic rules, 3-sigma half-width for Monte Carlo.
    pub error_estimate: f64,
    pub evaluations: u64,
    pub method: Method,
}

impl IntegrationResult {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}
