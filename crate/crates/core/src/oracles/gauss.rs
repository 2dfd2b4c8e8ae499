use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{IntegrationResult, Method};
use crate::error::{Error, Result};
use crate::weights::RealWeight;

pub const MAX_TENSOR_DIM: usize = 4;

/// A 1-D Gauss rule `sum_i w_i f(x_i)` for some positive measure.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Three-term recurrence `x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}` of the
/// orthonormal polynomials, plus the total mass.
struct Jacobi {
    alpha: Vec<f64>,
    /// `beta[k] = b_k^2`; `beta[0]` is unused.
    beta: Vec<f64>,
    mass: f64,
}

impl Jacobi {
    /// Orthonormal values `p_0..p_{n}` at `x` and the derivative of `p_n`.
    fn eval(&self, x: f64, n: usize) -> (Vec<f64>, f64) {
        let mut p = vec![0.0; n + 1];
        let mut dp = vec![0.0; n + 1];
        p[0] = 1.0 / self.mass.sqrt();
        for k in 0..n {
            let bk1 = self.beta[k + 1].sqrt();
            let prev = if k > 0 { self.beta[k].sqrt() * p[k - 1] } else { 0.0 };
            let dprev = if k > 0 { self.beta[k].sqrt() * dp[k - 1] } else { 0.0 };
            p[k + 1] = ((x - self.alpha[k]) * p[k] - prev) / bk1;
            dp[k + 1] = (p[k] + (x - self.alpha[k]) * dp[k] - dprev) / bk1;
        }
        (p, dp[n])
    }

    /// Golub-Welsch eigenvalues, Newton-polished, with Christoffel weights.
    fn rule(&self, n: usize) -> GaussRule {
        let mut t = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            t[(k, k)] = self.alpha[k];
            if k + 1 < n {
                let b = self.beta[k + 1].sqrt();
                t[(k, k + 1)] = b;
                t[(k + 1, k)] = b;
            }
        }
        let mut nodes: Vec<f64> = SymmetricEigen::new(t).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let weights = nodes
            .iter_mut()
            .map(|x| {
                for _ in 0..3 {
                    let (p, dpn) = self.eval(*x, n);
                    if dpn != 0.0 {
                        *x -= p[n] / dpn;
                    }
                }
                let (p, _) = self.eval(*x, n);
                1.0 / p[..n].iter().map(|v| v * v).sum::<f64>()
            })
            .collect();
        GaussRule { nodes, weights }
    }
}

/// Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    let beta = (0..=n).map(|k| if k == 0 { 0.0 } else { let k = k as f64; k * k / (4.0 * k * k - 1.0) }).collect();
    Jacobi { alpha: vec![0.0; n + 1], beta, mass: 2.0 }.rule(n)
}

/// Gauss rule for the standard normal density `e^{-x^2/2}/sqrt(2 pi)`.
pub fn gauss_hermite(n: usize) -> GaussRule {
    let beta = (0..=n).map(|k| k as f64).collect();
    Jacobi { alpha: vec![0.0; n + 1], beta, mass: 1.0 }.rule(n)
}

impl GaussRule {
    /// Gauss rule for an arbitrary measure given by a fine discretization
    /// (discretized Stieltjes procedure with full reorthogonalization).
    pub fn from_discrete_measure(points: &[f64], masses: &[f64], n: usize) -> Result<GaussRule> {
        let mass: f64 = masses.iter().sum();
        if !(mass > 0.0) || points.len() < 2 * n {
            return Err(Error::Domain("discrete measure too small for the requested rule".into()));
        }
        let dot = |u: &[f64], v: &[f64]| -> f64 {
            u.iter().zip(v).zip(masses).map(|((a, b), w)| a * b * w).sum()
        };
        let mut basis: Vec<Vec<f64>> = vec![vec![1.0 / mass.sqrt(); points.len()]];
        let mut alpha = Vec::with_capacity(n + 1);
        let mut beta = vec![0.0];
        for k in 0..n {
            let pk = &basis[k];
            let xp: Vec<f64> = pk.iter().zip(points).map(|(p, x)| p * x).collect();
            let a = dot(&xp, pk);
            alpha.push(a);
            let mut r = xp;
            for prev in &basis {
                let c = dot(&r, prev);
                r.iter_mut().zip(prev).for_each(|(ri, pi)| *ri -= c * pi);
            }
            let b2 = dot(&r, &r);
            if !(b2 > 0.0) {
                return Err(Error::Domain("measure has too few support points".into()));
            }
            beta.push(b2);
            let b = b2.sqrt();
            basis.push(r.into_iter().map(|v| v / b).collect());
        }
        alpha.push(0.0);
        Ok(Jacobi { alpha, beta, mass }.rule(n))
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

fn tensor_sum(f: &(dyn Fn(&[f64]) -> f64 + Sync), n: usize, rule: &GaussRule) -> f64 {
    let k = rule.nodes.len();
    let slices: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|i0| {
            let mut idx = vec![0usize; n];
            idx[0] = i0;
            let mut x = vec![0.0; n];
            let mut sum = 0.0;
            let inner = k.pow(n as u32 - 1);
            for flat in 0..inner {
                let mut rem = flat;
                for d in 1..n {
                    idx[d] = rem % k;
                    rem /= k;
                }
                let mut w = 1.0;
                for d in 0..n {
                    x[d] = rule.nodes[idx[d]];
                    w *= rule.weights[idx[d]];
                }
                sum += w * f(&x);
            }
            sum
        })
        .collect();
    slices.iter().sum()
}

/// Tensor Gauss rule adapted to `weight` for `int f(x) prod_i w(x_i) dx` over R^n,
/// with the error estimated by comparing `order` against `2 * order` nodes.
pub fn quad_real_nd(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    n: usize,
    weight: &RealWeight,
    order: usize,
) -> Result<IntegrationResult> {
    if n > MAX_TENSOR_DIM {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_TENSOR_DIM });
    }
    if n == 0 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let coarse = weight.gauss_rule(order)?;
    let fine = weight.gauss_rule(2 * order)?;
    let low = tensor_sum(f, n, &coarse);
    let high = tensor_sum(f, n, &fine);
    let evaluations = (order.pow(n as u32) + (2 * order).pow(n as u32)) as u64;
    Ok(IntegrationResult {
        value: Complex64::new(high, 0.0),
        error_estimate: (high - low).abs(),
        evaluations,
        method: Method::GaussTensor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_exactness() {
        let rule = gauss_hermite(10);
        // E[x^{2k}] = (2k-1)!!, exact up to degree 19.
        let mut dfact = 1.0;
        for k in 0..10 {
            if k > 0 {
                dfact *= (2 * k - 1) as f64;
            }
            let got = rule.integrate(|x| x.powi(2 * k as i32));
            assert!((got - dfact).abs() < 1e-12 * dfact, "k={k}");
        }
        assert!(rule.integrate(|x| x.powi(7)).abs() < 1e-12);
    }

    #[test]
    fn legendre_exactness() {
        let rule = gauss_legendre(12);
        for deg in 0..24 {
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((rule.integrate(|x| x.powi(deg)) - exact).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn stieltjes_reproduces_legendre() {
        let fine = gauss_legendre(200);
        let rule = GaussRule::from_discrete_measure(&fine.nodes, &fine.weights, 8).unwrap();
        let reference = gauss_legendre(8);
        for (a, b) in rule.nodes.iter().zip(&reference.nodes) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in rule.weights.iter().zip(&reference.weights) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
