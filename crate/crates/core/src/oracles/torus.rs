use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{IntegrationResult, Method};
use crate::error::{Error, Result};

pub const MAX_TORUS_DIM: usize = 3;
const MAX_DOUBLINGS: usize = 3;

fn trapezoid(f: &(dyn Fn(&[Complex64]) -> Complex64 + Sync), n: usize, points: usize) -> Complex64 {
    let circle: Vec<Complex64> = (0..points)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / points as f64))
        .collect();
    let inner = points.pow(n as u32 - 1);
    let slices: Vec<Complex64> = (0..points)
        .into_par_iter()
        .map(|k0| {
            let mut z = vec![circle[k0]; n];
            let mut sum = Complex64::new(0.0, 0.0);
            for flat in 0..inner {
                let mut rem = flat;
                for zd in z.iter_mut().skip(1) {
                    *zd = circle[rem % points];
                    rem /= points;
                }
                sum += f(&z);
            }
            sum
        })
        .collect();
    slices.iter().sum::<Complex64>() / (points.pow(n as u32) as f64)
}

/// Normalized Haar integral over the n-torus, `prod_i dz_i / (2 pi i z_i)`,
/// by the tensor trapezoid rule. The point count is doubled until two
/// successive values agree to `tol` (relative to `max(1, |value|)`).
pub fn quad_torus_nd(
    f: &(dyn Fn(&[Complex64]) -> Complex64 + Sync),
    n: usize,
    points: usize,
    tol: f64,
) -> Result<IntegrationResult> {
    if n == 0 {
        return Ok(IntegrationResult {
            value: f(&[]),
            error_estimate: 0.0,
            evaluations: 1,
            method: Method::TorusTrapezoid,
        });
    }
    if n > MAX_TORUS_DIM {
        return Err(Error::DimensionTooLarge { dim: n, max: MAX_TORUS_DIM });
    }
    let mut count = points.max(1);
    let mut prev = trapezoid(f, n, count);
    let mut evaluations = count.pow(n as u32) as u64;
    for _ in 0..MAX_DOUBLINGS {
        count *= 2;
        let cur = trapezoid(f, n, count);
        evaluations += count.pow(n as u32) as u64;
        let diff = (cur - prev).norm();
        if diff <= tol * cur.norm().max(1.0) {
            return Ok(IntegrationResult {
                value: cur,
                error_estimate: diff,
                evaluations,
                method: Method::TorusTrapezoid,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "torus trapezoid rule did not settle after {MAX_DOUBLINGS} doublings ({count} points per circle)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laurent_monomials() {
        for k in -6i32..=6 {
            let r = quad_torus_nd(&|z: &[Complex64]| z[0].powi(k), 1, 8, 1e-14).unwrap();
            let exact = if k == 0 { 1.0 } else { 0.0 };
            assert!((r.value - exact).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn constant_term_two_dims() {
        let f = |z: &[Complex64]| (2.0 - z[0] - 1.0 / z[0]) * (2.0 - z[1] - 1.0 / z[1]);
        let r = quad_torus_nd(&f, 2, 8, 1e-14).unwrap();
        assert!((r.value - 4.0).norm() < 1e-13);
    }
}
