//! Determinants and inverses of small dense matrices.
//!
//! Rows are divided by their largest entry before LU with partial pivoting; the
//! scales are re-accumulated in log space.

use astro_float::{BigFloat, RoundingMode};
use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `det = unit * exp(ln_abs)`, with `|unit| = 1` (or `unit = 0` for singular input).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogDet<T> {
    pub unit: T,
    pub ln_abs: f64,
}

impl LogDet<f64> {
    pub fn value(&self) -> f64 {
        self.unit * self.ln_abs.exp()
    }
}

impl LogDet<Complex64> {
    pub fn value(&self) -> Complex64 {
        self.unit * self.ln_abs.exp()
    }
}

pub fn log_det<T>(m: &DMatrix<T>) -> Result<LogDet<T>>
where
    T: ComplexField<RealField = f64> + Copy,
{
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), got: m.ncols() });
    }
    if m.nrows() == 0 {
        return Ok(LogDet { unit: T::one(), ln_abs: 0.0 });
    }
    let mut scaled = m.clone();
    let mut ln_scale = 0.0;
    for mut row in scaled.row_iter_mut() {
        let big = row.iter().map(|v| v.modulus()).fold(0.0, f64::max);
        if big == 0.0 {
            return Ok(LogDet { unit: T::zero(), ln_abs: f64::NEG_INFINITY });
        }
        row.iter_mut().for_each(|v| *v = v.unscale(big));
        ln_scale += big.ln();
    }
    let det = scaled.lu().determinant();
    let abs = det.modulus();
    if abs == 0.0 {
        return Ok(LogDet { unit: T::zero(), ln_abs: f64::NEG_INFINITY });
    }
    Ok(LogDet { unit: det.unscale(abs), ln_abs: abs.ln() + ln_scale })
}

pub fn det_real(m: &DMatrix<f64>) -> Result<f64> {
    Ok(log_det(m)?.value())
}

pub fn det_complex(m: &DMatrix<Complex64>) -> Result<Complex64> {
    Ok(log_det(m)?.value())
}

/// Working precision, in bits, of [`det_big`].
pub const BIG_PRECISION: usize = 256;
pub const BIG_ROUNDING: RoundingMode = RoundingMode::ToEven;

/// Determinant of a square matrix of arbitrary-precision entries by Gaussian
/// elimination with partial pivoting, rounded to `f64` at the end.
pub fn det_big(mut m: Vec<Vec<BigFloat>>) -> Result<f64> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: m.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n) });
    }
    let (p, rm) = (BIG_PRECISION, BIG_ROUNDING);
    let mut det = BigFloat::from_f64(1.0, p);
    for k in 0..n {
        let pivot = (k..n).max_by(|&a, &b| m[a][k].abs().partial_cmp(&m[b][k].abs()).unwrap_or(std::cmp::Ordering::Equal));
        let pivot = pivot.unwrap_or(k);
        if m[pivot][k].is_zero() {
            return Ok(0.0);
        }
        if pivot != k {
            m.swap(pivot, k);
            det = det.neg();
        }
        det = det.mul(&m[k][k], p, rm);
        for i in k + 1..n {
            let f = m[i][k].div(&m[k][k], p, rm);
            for j in k + 1..n {
                let t = f.mul(&m[k][j], p, rm);
                m[i][j] = m[i][j].sub(&t, p, rm);
            }
        }
    }
    Ok(big_to_f64(&det))
}

/// Nearest `f64`; astro-float has no direct conversion.
pub fn big_to_f64(x: &BigFloat) -> f64 {
    x.to_string().parse().unwrap_or(f64::NAN)
}

/// Inverse together with the 1-norm condition estimate `|M|_1 |M^{-1}|_1`.
pub fn inverse_with_condition(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, f64)> {
    let inv = m.clone().try_inverse().ok_or(Error::SingularPairing(f64::INFINITY))?;
    let norm1 = |a: &DMatrix<f64>| {
        a.column_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    };
    let cond = norm1(m) * norm1(&inv);
    Ok((inv, cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_scaled_rows() {
        let m = DMatrix::from_row_slice(3, 3, &[1e200, 2e200, 0.0, 1.0, 3.0, 1.0, 0.0, 1e-200, 2e-200]);
        let ld = log_det(&m).unwrap();
        // det = 1e200 * 1e-200 * det([[1,2,0],[1,3,1],[0,1,2]]) = 1 * (1*(6-1) - 2*(2-0)) = 1
        assert!((ld.value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_and_singular() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let m = DMatrix::from_row_slice(2, 2, &[one, i, i, one]);
        assert!((det_complex(&m).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(det_real(&s).unwrap(), 0.0);
        assert_eq!(det_real(&DMatrix::<f64>::zeros(0, 0)).unwrap(), 1.0);
    }

    #[test]
    fn big_determinant() {
        let b = |x: f64| BigFloat::from_f64(x, BIG_PRECISION);
        let m = vec![vec![b(0.0), b(2.0), b(1.0)], vec![b(1.0), b(3.0), b(1.0)], vec![b(0.0), b(1.0), b(2.0)]];
        assert_eq!(det_big(m).unwrap(), -3.0);
        assert_eq!(det_big(vec![]).unwrap(), 1.0);
    }
}
