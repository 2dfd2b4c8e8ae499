use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT_THRESHOLD: f64 = 15.0;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

fn pole_at(z: Complex64) -> Option<i64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round() {
        Some(z.re as i64)
    } else {
        None
    }
}

/// Principal-branch `log Gamma(z)`.
///
/// Shifts up with the recurrence until `Re z >= 15`, then applies Stirling's
/// series with eight Bernoulli terms.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if let Some(k) = pole_at(z) {
        return Err(Error::Pole(k));
    }
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < SHIFT_THRESHOLD {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift)
}

pub fn log_gamma_real(x: f64) -> Result<f64> {
    Ok(log_gamma(Complex64::new(x, 0.0))?.re)
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// `1/Gamma(z)`, entire: returns exactly zero at the poles of Gamma.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    match log_gamma(z) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// `(x / 4 pi)(e^{x/2} - e^{-x/2})`, zero at the origin. This is
/// `pi |Gamma(i x / 2 pi)|^{-2}`, since `|Gamma(i y)|^2 = pi / (y sinh(pi y))`.
pub fn sklyanin_factor(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() > 700.0 {
        return ln_sklyanin_factor(x).exp();
    }
    x / (2.0 * PI) * (0.5 * x).sinh()
}

/// Natural log of [`sklyanin_factor`]; `-inf` at the origin.
pub fn ln_sklyanin_factor(x: f64) -> f64 {
    if x == 0.0 {
        return f64::NEG_INFINITY;
    }
    let y = 0.5 * x.abs();
    let ln_sinh = if y > 20.0 {
        y + (-(-2.0 * y).exp()).ln_1p() - std::f64::consts::LN_2
    } else {
        y.sinh().ln()
    };
    x.abs().ln() - (2.0 * PI).ln() + ln_sinh
}

/// `log(G(z + m) / G(z)) = sum_{k < m} log Gamma(z + k)` for the Barnes G-function.
pub fn barnes_g_ratio(z: f64, m: usize) -> Result<f64> {
    (0..m).map(|k| log_gamma_real(z + k as f64)).sum()
}

/// `log G(n + 1) = sum_{k < n} log k!`.
pub fn ln_barnes_g_integer(n: usize) -> f64 {
    barnes_g_ratio(1.0, n).expect("positive arguments have no poles")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn small_values() {
        assert!(log_gamma(c(1.0)).unwrap().norm() < 1e-15);
        assert!((log_gamma(c(0.5)).unwrap().re - PI.sqrt().ln()).abs() < 1e-14);
        assert!((log_gamma(c(4.0)).unwrap().re - 6f64.ln()).abs() < 1e-14);
        assert_eq!(log_gamma(c(-3.0)), Err(Error::Pole(-3)));
        assert_eq!(log_gamma(c(0.0)), Err(Error::Pole(0)));
    }

    #[test]
    fn negative_real_sign() {
        // Gamma(-0.5) = -2 sqrt(pi)
        let g = gamma(c(-0.5)).unwrap();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13 && g.im.abs() < 1e-13);
    }

    #[test]
    fn large_factorials() {
        let mut ln_fact = 0.0;
        for n in 1..40 {
            ln_fact += (n as f64).ln();
            let lg = log_gamma(c(n as f64 + 1.0)).unwrap().re;
            assert!((lg - ln_fact).abs() <= 1e-13 * ln_fact.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn sklyanin_factor_values() {
        assert_eq!(sklyanin_factor(0.0), 0.0);
        assert_eq!(sklyanin_factor(2.5), sklyanin_factor(-2.5));
        let expected = (0.5f64.exp() - (-0.5f64).exp()) / (4.0 * PI);
        assert!((sklyanin_factor(1.0) - expected).abs() < 1e-16);
        assert!((ln_sklyanin_factor(800.0) - (800.0f64 / (2.0 * PI)).ln() - 400.0 + 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn barnes_ratios() {
        assert!((barnes_g_ratio(1.0, 4).unwrap() - 12f64.ln()).abs() < 1e-14);
        assert_eq!(barnes_g_ratio(2.7, 0).unwrap(), 0.0);
        assert!((barnes_g_ratio(1.5, 1).unwrap() - (PI.sqrt() / 2.0).ln()).abs() < 1e-14);
    }
}
