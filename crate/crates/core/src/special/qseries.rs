use num_complex::Complex64;

use super::{Truncated, SERIES_TOL};
use crate::error::{Error, Result};

const MAX_FACTORS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QLength {
    Finite(usize),
    Infinite,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(z; q)_m = prod_{n < m} (1 - z q^n)`, with `m` finite or infinite.
pub fn q_pochhammer(z: Complex64, q: Complex64, len: QLength) -> Result<Complex64> {
    match len {
        QLength::Finite(m) => {
            let mut acc = one();
            let mut zq = z;
            for _ in 0..m {
                acc *= one() - zq;
                zq *= q;
            }
            Ok(acc)
        }
        QLength::Infinite => Ok(q_pochhammer_inf(z, q)?.value),
    }
}

/// `(z; q)_inf` truncated once `|z q^n|` drops below machine epsilon; the
/// reported error bounds the neglected factors.
pub fn q_pochhammer_inf(z: Complex64, q: Complex64) -> Result<Truncated<Complex64>> {
    let qa = q.norm();
    if qa >= 1.0 {
        return Err(Error::Domain(format!("infinite q-product needs |q| < 1, got {qa}")));
    }
    let mut acc = one();
    let mut zq = z;
    for _ in 0..MAX_FACTORS {
        let t = zq.norm();
        if t < f64::EPSILON * 0.5 {
            let tail = t / (1.0 - qa);
            return Ok(Truncated { value: acc, error: acc.norm() * tail * 1.01 });
        }
        acc *= one() - zq;
        zq *= q;
    }
    Err(Error::NonConvergence("q-Pochhammer product".into()))
}

/// `log (z; q)_inf` as a sum of principal logs of the factors; exponentiate to
/// recover the product without intermediate overflow.
pub fn ln_q_pochhammer_inf(z: Complex64, q: Complex64) -> Result<Complex64> {
    let qa = q.norm();
    if qa >= 1.0 {
        return Err(Error::Domain(format!("infinite q-product needs |q| < 1, got {qa}")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut zq = z;
    for _ in 0..MAX_FACTORS {
        if zq.norm() < f64::EPSILON * 0.5 {
            return Ok(acc);
        }
        acc += (one() - zq).ln();
        zq *= q;
    }
    Err(Error::NonConvergence("q-Pochhammer log-product".into()))
}

/// `theta(z; q) = (z; q)_inf (q/z; q)_inf` from the product form.
pub fn theta_product(z: Complex64, q: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("theta(0; q)".into()));
    }
    Ok(q_pochhammer_inf(z, q)?.value * q_pochhammer_inf(q / z, q)?.value)
}

/// `theta(z; q)` from the Laurent series `(1/(q;q)_inf) sum_n (-1)^n q^{C(n,2)} z^n`,
/// truncated symmetrically once three consecutive orders are negligible.
pub fn theta(z: Complex64, q: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::Domain("theta(0; q)".into()));
    }
    if q.norm() >= 1.0 {
        return Err(Error::Domain("theta needs |q| < 1".into()));
    }
    let zinv = z.inv();
    let mut sum = one();
    let mut pos = one();
    let mut neg = one();
    let mut qk = one();
    let mut small = 0;
    for k in 0..100_000usize {
        // pos = t_{k+1} = t_k * (-q^k z), neg = t_{-(k+1)} = t_{-k} * (-q^{k+1} / z)
        let pos_ratio = -qk * z;
        qk *= q;
        let neg_ratio = -qk * zinv;
        pos *= pos_ratio;
        neg *= neg_ratio;
        sum += pos + neg;
        let decreasing = pos_ratio.norm() < 1.0 && neg_ratio.norm() < 1.0;
        let scale = sum.norm().max(f64::MIN_POSITIVE);
        if decreasing && pos.norm() < SERIES_TOL * scale && neg.norm() < SERIES_TOL * scale {
            small += 1;
            if small >= 3 {
                return Ok(sum / q_pochhammer_inf(q, q)?.value);
            }
        } else {
            small = 0;
        }
        if k > 10_000 && !decreasing {
            break;
        }
    }
    Err(Error::NonConvergence("theta Laurent series".into()))
}

fn sum_until_small(mut term: impl FnMut(usize) -> Complex64) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut small = 0;
    let mut prev = f64::INFINITY;
    for n in 0..100_000usize {
        let t = term(n);
        sum += t;
        let tn = t.norm();
        if tn <= SERIES_TOL * sum.norm() && tn <= prev {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
        prev = tn;
    }
    Err(Error::NonConvergence("theta inverse coefficient".into()))
}

/// Laurent coefficients `c_m`, `lo <= m <= hi`, of `1/theta(z; q)` on the
/// annulus `|q| < |z| < 1`, from the partial fractions
/// `1/theta(z) = (q;q)^-2 sum_n (-1)^n q^{n(n+1)/2} / (1 - z q^n)`.
pub fn theta_inverse_coeffs(q: Complex64, lo: i64, hi: i64) -> Result<Vec<Complex64>> {
    theta_inverse_coeffs_with(q, lo, hi, |nf, k| nf * (nf + 1.0) / 2.0 + (nf + 1.0) * k)
}

/// Variant whose negative-index coefficients use the exponent
/// `C(n,2) + (|m|-1)(n+1)`, as it appears in the literature statement of the
/// expansion. It does not invert theta; kept for the audit checks.
pub fn theta_inverse_coeffs_printed(q: Complex64, lo: i64, hi: i64) -> Result<Vec<Complex64>> {
    theta_inverse_coeffs_with(q, lo, hi, |nf, k| nf * (nf - 1.0) / 2.0 + (k - 1.0) * (nf + 1.0))
}

/// `negative_exponent(n, |m|)` gives the power of q in the `n`-th term of `c_{-|m|}`.
fn theta_inverse_coeffs_with(
    q: Complex64,
    lo: i64,
    hi: i64,
    negative_exponent: impl Fn(f64, f64) -> f64,
) -> Result<Vec<Complex64>> {
    if q.norm() >= 1.0 {
        return Err(Error::Domain("theta inverse needs |q| < 1".into()));
    }
    let qq = q_pochhammer_inf(q, q)?.value;
    let norm = (qq * qq).inv();
    let ln_q = q.ln();
    let qpow = |e: f64| (ln_q * e).exp();
    (lo..=hi)
        .map(|m| {
            let mf = m as f64;
            let s = sum_until_small(|n| {
                let nf = n as f64;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let e = if m >= 0 { nf * (nf + 1.0) / 2.0 + mf * nf } else { negative_exponent(nf, -mf) };
                qpow(e) * sign
            })?;
            Ok(s * norm)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pochhammer_basic() {
        let q = c(0.3, 0.0);
        assert_eq!(q_pochhammer(c(0.7, 0.2), q, QLength::Finite(0)).unwrap(), one());
        assert_eq!(q_pochhammer(one(), q, QLength::Infinite).unwrap(), c(0.0, 0.0));
        assert!(q_pochhammer(one(), c(1.0, 0.0), QLength::Infinite).is_err());
        let mut euler = 1.0;
        for n in 1..=200 {
            euler *= 1.0 - 0.3f64.powi(n);
        }
        let v = q_pochhammer(q, q, QLength::Infinite).unwrap();
        assert!((v.re - euler).abs() < 1e-12 * euler);
        let lv = ln_q_pochhammer_inf(q, q).unwrap().exp();
        assert!((lv - v).norm() < 1e-14);
    }

    #[test]
    fn theta_zero_at_q() {
        let q = c(0.4, 0.1);
        assert!(theta(q, q).unwrap().norm() < 1e-14);
        assert!(theta_product(q, q).unwrap().norm() < 1e-14);
        assert!(theta(c(0.0, 0.0), q).is_err());
    }

    #[test]
    fn theta_inverse_at_small_q() {
        let c0 = theta_inverse_coeffs(c(1e-12, 0.0), -3, 3).unwrap();
        for (i, v) in c0.iter().enumerate() {
            let m = i as i64 - 3;
            let expect = if m >= 0 { 1.0 } else { 0.0 };
            assert!((v.re - expect).abs() < 1e-10, "m={m} {v}");
        }
    }

    #[test]
    fn theta_inverse_inverts_on_annulus() {
        let q = c(0.2, 0.0);
        let z = c(0.6, 0.0);
        let cs = theta_inverse_coeffs(q, -60, 60).unwrap();
        let s: Complex64 = cs.iter().enumerate().map(|(i, v)| v * z.powi(i as i32 - 60)).sum();
        assert!((s * theta(z, q).unwrap() - one()).norm() < 1e-10);
        let printed = theta_inverse_coeffs_printed(q, -60, 60).unwrap();
        let s: Complex64 = printed.iter().enumerate().map(|(i, v)| v * z.powi(i as i32 - 60)).sum();
        assert!((s * theta(z, q).unwrap() - one()).norm() > 0.1);
    }
}
