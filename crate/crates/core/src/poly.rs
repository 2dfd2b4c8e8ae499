//! Dense real polynomials with ascending coefficients.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        Polynomial(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    /// Degree ignoring trailing zeros; zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_monic_of_degree(&self, k: usize) -> bool {
        self.degree() == k && self.0.get(k) == Some(&1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

/// Monic polynomial bases `p_0, ..., p_{n-1}`.
pub fn monomial_basis(n: usize) -> Vec<Polynomial> {
    (0..n).map(Polynomial::monomial).collect()
}
