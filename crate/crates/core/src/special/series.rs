use num_complex::Complex64;

use crate::error::{Error, Result};

/// `f(z) = z^mu * sum_m c_m (s z)^m`, with `z^mu` on the principal branch of
/// `log z` and the argument scale `s` kept separate from the coefficients.
///
/// Evaluation through [`PrefactorSeries::eval_log`] takes `log z` explicitly, so
/// shifted arguments such as `z q^k` can use `log z + k log q` consistently
/// across all entries of a determinant.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefactorSeries {
    pub offset: Complex64,
    pub coeffs: Vec<Complex64>,
    pub base_scale: Complex64,
    /// Estimated magnitude of the neglected tail at the build radius.
    pub truncation_error: f64,
}

const MAX_COEFFS: usize = 50_000;
/// Polynomial weight applied to the stopping test so that a few applications of
/// `d_z` stay accurate.
const DERIVATIVE_MARGIN: i32 = 8;

impl PrefactorSeries {
    /// Builds coefficients from `c_0 = first` and `c_{m+1} = c_m * ratio(m)`,
    /// keeping terms until `|c_m| (|s| radius)^m` is negligible.
    pub fn from_ratio(
        offset: Complex64,
        base_scale: Complex64,
        first: Complex64,
        mut ratio: impl FnMut(usize) -> Complex64,
        radius: f64,
        tol: f64,
    ) -> Result<Self> {
        let r = base_scale.norm() * radius;
        let mut coeffs = vec![first];
        let mut c = first;
        let mut peak = first.norm();
        let mut small = 0;
        let mut growing = 0;
        let mut tail = 0.0;
        let mut rm = 1.0;
        for m in 0..MAX_COEFFS {
            let next = c * ratio(m);
            rm *= r;
            let mag = next.norm() * rm;
            let weighted = mag * ((m + 2) as f64).powi(DERIVATIVE_MARGIN);
            if !mag.is_finite() {
                return Err(Error::NonConvergence("series coefficient overflow".into()));
            }
            if mag > c.norm() * rm / r.max(f64::MIN_POSITIVE) && c.norm() > 0.0 {
                growing += 1;
                if growing >= 50 {
                    return Err(Error::NonConvergence(format!(
                        "series diverges at radius {radius}"
                    )));
                }
            } else {
                growing = 0;
            }
            peak = peak.max(mag);
            coeffs.push(next);
            c = next;
            if weighted <= tol * peak {
                small += 1;
                tail += mag;
                if small >= 3 {
                    return Ok(PrefactorSeries {
                        offset,
                        coeffs,
                        base_scale,
                        truncation_error: tail,
                    });
                }
            } else {
                small = 0;
                tail = 0.0;
            }
        }
        Err(Error::NonConvergence("series needs too many coefficients".into()))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_log(z.ln())
    }

    /// Evaluates at the point whose logarithm is `ln_z`.
    pub fn eval_log(&self, ln_z: Complex64) -> Complex64 {
        let w = self.base_scale * ln_z.exp();
        let sum = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w + c);
        (self.offset * ln_z).exp() * sum
    }

    /// Term-wise `d_z = z d/dz`: `c_m -> (mu + m) c_m`.
    pub fn dz(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| c * (self.offset + m as f64))
            .collect();
        PrefactorSeries { coeffs, ..self.clone() }
    }

    pub fn dz_pow(&self, k: usize) -> Self {
        (0..k).fold(self.clone(), |s, _| s.dz())
    }

    /// `(d_z + shift) f`.
    pub fn dz_plus(&self, shift: Complex64) -> Self {
        let mut out = self.dz();
        for (o, &c) in out.coeffs.iter_mut().zip(&self.coeffs) {
            *o += c * shift;
        }
        out
    }

    /// Multiplication by `z`.
    pub fn times_z(&self) -> Self {
        let inv = self.base_scale.inv();
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex64::new(0.0, 0.0));
        coeffs.extend(self.coeffs.iter().map(|&c| c * inv));
        PrefactorSeries { coeffs, ..self.clone() }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        PrefactorSeries {
            coeffs: self.coeffs.iter().map(|&c| c * factor).collect(),
            truncation_error: self.truncation_error * factor.norm(),
            ..self.clone()
        }
    }

    /// Sum of two series sharing offset and argument scale.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if (self.offset - other.offset).norm() > 1e-14 * (1.0 + self.offset.norm())
            || self.base_scale != other.base_scale
        {
            return Err(Error::Domain("adding series with different offsets or scales".into()));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        let coeffs = (0..len)
            .map(|m| {
                self.coeffs.get(m).copied().unwrap_or(zero) + other.coeffs.get(m).copied().unwrap_or(zero)
            })
            .collect();
        Ok(PrefactorSeries {
            coeffs,
            truncation_error: self.truncation_error + other.truncation_error,
            ..self.clone()
        })
    }

    /// Magnitude of the largest term at radius `r`, used for residual scales.
    pub fn term_scale(&self, r: f64) -> f64 {
        let w = self.base_scale.norm() * r;
        let mut p = 1.0;
        let mut best: f64 = 0.0;
        for c in &self.coeffs {
            best = best.max(c.norm() * p);
            p *= w;
        }
        best * r.powf(self.offset.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_series(offset: Complex64) -> PrefactorSeries {
        PrefactorSeries::from_ratio(
            offset,
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            |m| Complex64::new(1.0 / (m as f64 + 1.0), 0.0),
            1.0,
            1e-17,
        )
        .unwrap()
    }

    #[test]
    fn evaluates_exponential() {
        let s = exp_series(Complex64::new(-0.3, 0.1));
        let z = Complex64::new(0.4, 0.2);
        let expect = (z.ln() * Complex64::new(-0.3, 0.1)).exp() * (-z).exp();
        assert!((s.eval(z) - expect).norm() < 1e-14);
    }

    #[test]
    fn times_z_and_dz() {
        let s = exp_series(Complex64::new(0.25, 0.0));
        let z = Complex64::new(0.3, 0.0);
        assert!((s.times_z().eval(z) - s.eval(z) * z).norm() < 1e-15);
        // d_z (z^mu e^{-z}) = (mu - z) z^mu e^{-z}
        let expect = s.eval(z) * (Complex64::new(0.25, 0.0) - z);
        assert!((s.dz().eval(z) - expect).norm() < 1e-14);
        assert!((s.dz_plus(Complex64::new(-0.25, 0.0)).eval(z) + z * s.eval(z)).norm() < 1e-14);
    }
}
