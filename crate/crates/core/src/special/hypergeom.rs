use num_complex::Complex64;

use super::Truncated;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 200_000;
const GROWTH_LIMIT: usize = 50;

/// Sums `t_0 + t_1 + ...` with `t_{m+1} = t_m * ratio(m)`, stopping once the last
/// three terms are each below `tol * |partial sum|`.
pub(crate) fn sum_by_ratio(
    first: Complex64,
    mut ratio: impl FnMut(usize) -> Complex64,
    tol: f64,
    label: &str,
) -> Result<Truncated<Complex64>> {
    let mut term = first;
    let mut sum = first;
    let mut small = usize::from(first.norm() <= 0.0);
    let mut growing = 0;
    let mut recent = [first.norm(), 0.0, 0.0];
    for m in 0..MAX_TERMS {
        let next = term * ratio(m);
        let (tn, prev) = (next.norm(), term.norm());
        term = next;
        sum += term;
        recent = [tn, recent[0], recent[1]];
        if tn <= tol * sum.norm() {
            small += 1;
            if small >= 3 {
                return Ok(Truncated { value: sum, error: recent.iter().sum() });
            }
        } else {
            small = 0;
        }
        if tn > prev && prev > 0.0 {
            growing += 1;
            if growing >= GROWTH_LIMIT {
                return Err(Error::NonConvergence(format!("{label}: terms grow")));
            }
        } else {
            growing = 0;
        }
        if !tn.is_finite() {
            return Err(Error::NonConvergence(format!("{label}: non-finite term")));
        }
    }
    Err(Error::NonConvergence(format!("{label}: no convergence in {MAX_TERMS} terms")))
}

fn is_nonpositive_integer(b: Complex64) -> bool {
    b.im == 0.0 && b.re <= 0.0 && b.re == b.re.round()
}

/// Generalized hypergeometric series `pFq(a; b; z) = sum_m prod (a)_m / prod (b)_m z^m / m!`.
pub fn hypergeom_pfq(
    a: &[Complex64],
    b: &[Complex64],
    z: Complex64,
    tol: f64,
) -> Result<Truncated<Complex64>> {
    if let Some(bad) = b.iter().find(|&&b| is_nonpositive_integer(b)) {
        return Err(Error::Domain(format!("lower parameter {bad} is a nonpositive integer")));
    }
    if a.len() == b.len() + 1 && z.norm() >= 1.0 {
        return Err(Error::Domain(format!("pFq with p = q + 1 needs |z| < 1, got {}", z.norm())));
    }
    let ratio = |m: usize| {
        let mf = m as f64;
        let num: Complex64 = a.iter().map(|&x| x + mf).product();
        let den: Complex64 = b.iter().map(|&x| x + mf).product();
        num / den / (mf + 1.0) * z
    };
    sum_by_ratio(Complex64::new(1.0, 0.0), ratio, tol, "pFq")
}

/// Basic hypergeometric series in the standard normalization
/// `sum_m ((-1)^m q^{C(m,2)})^{1+s-r} prod (a;q)_m / (prod (b;q)_m (q;q)_m) z^m`.
///
/// Zero entries in the parameter lists contribute `(0;q)_m = 1` but still count
/// toward `r` and `s`.
pub fn basic_hypergeom(
    a: &[Complex64],
    b: &[Complex64],
    q: Complex64,
    z: Complex64,
    tol: f64,
) -> Result<Truncated<Complex64>> {
    if q.norm() >= 1.0 {
        return Err(Error::Domain("basic hypergeometric series needs |q| < 1".into()));
    }
    let exponent = 1 + b.len() as i64 - a.len() as i64;
    let one = Complex64::new(1.0, 0.0);
    let mut qm = one;
    let mut failure = None;
    let ratio = |m: usize| {
        let num: Complex64 = a.iter().map(|&x| one - x * qm).product();
        let den: Complex64 = b.iter().map(|&x| one - x * qm).product::<Complex64>() * (one - qm * q);
        if den.norm() == 0.0 {
            failure.get_or_insert(m);
            return Complex64::new(0.0, 0.0);
        }
        let shift = (-qm).powi(exponent as i32);
        qm *= q;
        num / den * shift * z
    };
    let out = sum_by_ratio(one, ratio, tol, "basic hypergeometric")?;
    if let Some(m) = failure {
        return Err(Error::Domain(format!("denominator vanishes at order {}", m + 1)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{q_pochhammer_inf, SERIES_TOL};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn elementary_cases() {
        let e = hypergeom_pfq(&[], &[], c(0.3), SERIES_TOL).unwrap();
        assert!((e.value.re - 0.3f64.exp()).abs() < 1e-13);
        let binom = hypergeom_pfq(&[c(0.7)], &[], c(0.4), SERIES_TOL).unwrap();
        assert!((binom.value.re - 0.6f64.powf(-0.7)).abs() < 1e-13);
        let euler = basic_hypergeom(&[], &[], c(0.3), c(0.5), SERIES_TOL).unwrap();
        let expect = q_pochhammer_inf(c(0.5), c(0.3)).unwrap().value;
        assert!((euler.value - expect).norm() < 1e-13);
    }

    #[test]
    fn terminating_and_divergent() {
        // 2F1(-2, 1; 1; z) = (1 - z)^2
        let t = hypergeom_pfq(&[c(-2.0), c(1.0)], &[c(1.0)], c(0.5), SERIES_TOL).unwrap();
        assert!((t.value.re - 0.25).abs() < 1e-15);
        assert!(hypergeom_pfq(&[c(1.0)], &[], c(1.5), SERIES_TOL).is_err());
        assert!(hypergeom_pfq(&[c(1.0), c(1.0)], &[], c(0.1), SERIES_TOL).is_err());
        assert!(hypergeom_pfq(&[], &[c(-1.0)], c(0.1), SERIES_TOL).is_err());
    }
}
