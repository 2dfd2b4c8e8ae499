use num_complex::Complex64;
use rayon::prelude::*;

use super::{IntegrationResult, Method};
use crate::error::{Error, Result};

/// Sum of `term(m)` over the box `[0, max_order]^n`.
///
/// Shell sums `S_k` (all `m` with `max_i m_i = k`) are tracked; the error
/// estimate is `|S_M| + |S_{M-1}|`. If the outer shells have not decayed below
/// `tol * |sum|` and are not shrinking, the sum is reported as divergent.
pub fn residue_multisum(
    term: &(dyn Fn(&[usize]) -> Complex64 + Sync),
    n: usize,
    max_order: usize,
    tol: f64,
) -> Result<IntegrationResult> {
    if n == 0 {
        return Ok(IntegrationResult {
            value: term(&[]),
            error_estimate: 0.0,
            evaluations: 1,
            method: Method::ResidueSum,
        });
    }
    let side = max_order + 1;
    let inner = side.pow(n as u32 - 1);
    let per_first: Vec<Vec<Complex64>> = (0..side)
        .into_par_iter()
        .map(|m0| {
            let mut shells = vec![Complex64::new(0.0, 0.0); side];
            let mut m = vec![m0; n];
            for flat in 0..inner {
                let mut rem = flat;
                for md in m.iter_mut().skip(1) {
                    *md = rem % side;
                    rem /= side;
                }
                let shell = *m.iter().max().unwrap();
                shells[shell] += term(&m);
            }
            shells
        })
        .collect();
    let mut shells = vec![Complex64::new(0.0, 0.0); side];
    for row in &per_first {
        for (s, v) in shells.iter_mut().zip(row) {
            *s += v;
        }
    }
    let total: Complex64 = shells.iter().sum();
    let last = shells[max_order].norm();
    let before = if max_order > 0 { shells[max_order - 1].norm() } else { 0.0 };
    let error_estimate = last + before;
    let mid = shells[max_order / 2].norm();
    if max_order >= 2 && error_estimate > tol * total.norm() && last >= mid {
        return Err(Error::Divergence(format!(
            "residue shells are not decaying (|S_{max_order}| = {last:e})"
        )));
    }
    Ok(IntegrationResult {
        value: total,
        error_estimate,
        evaluations: side.pow(n as u32) as u64,
        method: Method::ResidueSum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_series() {
        let z = 0.3f64;
        let a = 0.37;
        let term = |m: &[usize]| {
            let k = m[0] as i32;
            let fact: f64 = (1..=m[0]).map(|j| j as f64).product();
            Complex64::new(z.powf(-a + k as f64) * (-1f64).powi(k) / fact, 0.0)
        };
        let r = residue_multisum(&term, 1, 40, 1e-15).unwrap();
        assert!((r.real() - z.powf(-a) * (-z).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_term() {
        let r = residue_multisum(&|_: &[usize]| Complex64::new(0.0, 0.0), 3, 5, 1e-12).unwrap();
        assert_eq!(r.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn growing_terms_are_rejected() {
        let r = residue_multisum(&|m: &[usize]| Complex64::new(2f64.powi(m[0] as i32), 0.0), 1, 20, 1e-12);
        assert!(matches!(r, Err(Error::Divergence(_))));
    }
}
