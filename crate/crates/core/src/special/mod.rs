//! Complex special functions: log-gamma and Barnes G ratios, Hermite
//! polynomials, q-shifted factorials, the theta function and its inverse
//! Laurent coefficients, ordinary and basic hypergeometric series, and the
//! [`PrefactorSeries`] representation `z^mu * sum_m c_m (s z)^m` shared by the
//! Mellin-Barnes building blocks.

mod gamma;
mod hermite;
mod hypergeom;
mod qseries;
mod series;

pub use gamma::{
    barnes_g_ratio, gamma, ln_barnes_g_integer, ln_sklyanin_factor, log_gamma, log_gamma_real,
    recip_gamma, sklyanin_factor,
};
pub use hermite::{hermite_basis, hermite_monic};
pub use hypergeom::{basic_hypergeom, hypergeom_pfq};
pub use qseries::{
    ln_q_pochhammer_inf, q_pochhammer, q_pochhammer_inf, theta, theta_inverse_coeffs, theta_inverse_coeffs_printed,
    theta_product, QLength,
};
pub use series::PrefactorSeries;

/// A value together with an estimate of the neglected tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    pub error: f64,
}

/// Default relative stopping tolerance for series.
pub const SERIES_TOL: f64 = 1e-17;
