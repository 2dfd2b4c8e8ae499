//! Classical Mellin-Barnes integrals: `psi`, `psi_pm` and the Wronskian
//! formulas `Psi_{G,I}`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_generic, MBParams, C};
use crate::error::{Error, Result};
use crate::linalg::det_complex;
use crate::oracles::{residue_multisum, IntegrationResult};
use crate::roots::{build_root_system, root_value, Family};
use crate::special::{gamma, log_gamma, PrefactorSeries, SERIES_TOL};

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Which normalization of a closed-form Wronskian to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MbForm {
    /// The determinant exactly as stated, with `sin pi (a_i - a_j)` ordering
    /// and, for B, the gamma ratio inside every row.
    Displayed,
    /// The normalization reproduced by residue summation of the integral.
    Derived,
}

/// `1 / (Gamma(y) Gamma(-y)) = -y sin(pi y) / pi`.
fn recip_gamma_pair(y: C) -> C {
    -y * (y * std::f64::consts::PI).sin() / std::f64::consts::PI
}

/// `prod Gamma(-a) / prod Gamma(-b)`, the zero-weight factor of type B.
pub fn zero_weight_factor(p: &MBParams) -> Result<C> {
    let mut v = c(1.0);
    for &a in &p.a {
        v *= gamma(-a)?;
    }
    for &b in &p.b {
        v /= gamma(-b)?;
    }
    Ok(v)
}

fn radius(p: &MBParams) -> f64 {
    p.z.norm().max(0.05)
}

/// `psi_alpha(z)`: residue series of the single-contour integral
/// `int prod Gamma(x - a) / prod Gamma(x - b) z^{-x} dx / 2 pi i` around the
/// poles `a_alpha - m`.
pub fn psi(p: &MBParams, alpha: usize) -> Result<PrefactorSeries> {
    check_generic(&p.a, &p.b, false)?;
    let a0 = *p.a.get(alpha).ok_or_else(|| Error::Domain(format!("alpha = {alpha} out of range")))?;
    let mut first = c(1.0);
    for (beta, &ab) in p.a.iter().enumerate() {
        if beta != alpha {
            first *= gamma(a0 - ab)?;
        }
    }
    for &b in &p.b {
        first /= gamma(a0 - b)?;
    }
    let base = c(sign(p.a.len() + p.b.len()));
    let ratio = |m: usize| {
        let mf = m as f64;
        let num: C = p.b.iter().map(|&b| b - a0 + 1.0 + mf).product();
        let den: C = p
            .a
            .iter()
            .enumerate()
            .filter(|&(beta, _)| beta != alpha)
            .map(|(_, &ab)| ab - a0 + 1.0 + mf)
            .product();
        num / (den * (mf + 1.0))
    };
    PrefactorSeries::from_ratio(-a0, base, first, ratio, radius(p), SERIES_TOL)
}

/// `psi^pm_alpha(z)`: as [`psi`] with the integrand doubled to
/// `Gamma(+-x - a) / Gamma(+-x - b)`.
pub fn psi_pm(p: &MBParams, alpha: usize) -> Result<PrefactorSeries> {
    check_generic(&p.a, &p.b, true)?;
    let a0 = *p.a.get(alpha).ok_or_else(|| Error::Domain(format!("alpha = {alpha} out of range")))?;
    let mut first = c(1.0);
    for (beta, &ab) in p.a.iter().enumerate() {
        if beta != alpha {
            first *= gamma(a0 - ab)?;
        }
        first *= gamma(-a0 - ab)?;
    }
    for &b in &p.b {
        first /= gamma(a0 - b)? * gamma(-a0 - b)?;
    }
    let base = c(sign(p.a.len() + p.b.len()));
    let ratio = |m: usize| {
        let mf = m as f64;
        let mut num: C = p.b.iter().map(|&b| b - a0 + 1.0 + mf).product();
        num *= p.a.iter().map(|&ab| -a0 - ab + mf).product::<C>();
        let mut den: C = p
            .a
            .iter()
            .enumerate()
            .filter(|&(beta, _)| beta != alpha)
            .map(|(_, &ab)| ab - a0 + 1.0 + mf)
            .product();
        den *= p.b.iter().map(|&b| -a0 - b + mf).product::<C>();
        num / (den * (mf + 1.0))
    };
    PrefactorSeries::from_ratio(-a0, base, first, ratio, radius(p), SERIES_TOL)
}

/// `log` of the single-variable integrand residue at `x = a_alpha - m`,
/// without the `z^{-x}` factor.
fn ln_residue(p: &MBParams, alpha: usize, m: usize, doubled: bool) -> Result<C> {
    let x = p.a[alpha] - m as f64;
    // Res Gamma(x - a_alpha) = (-1)^m / m!
    let mut l = ln_sign(m) - log_gamma(c(m as f64 + 1.0))?;
    for (beta, &ab) in p.a.iter().enumerate() {
        if beta != alpha {
            l += log_gamma(x - ab)?;
        }
        if doubled {
            l += log_gamma(-x - ab)?;
        }
    }
    for &b in &p.b {
        l -= log_gamma(x - b)?;
        if doubled {
            l -= log_gamma(-x - b)?;
        }
    }
    Ok(l)
}

/// `log (-1)^k` as `0` or `i pi`.
pub(crate) fn ln_sign(k: usize) -> C {
    C::new(0.0, if k % 2 == 0 { 0.0 } else { std::f64::consts::PI })
}

fn single_residue(p: &MBParams, alpha: usize, doubled: bool, max_order: usize) -> Result<IntegrationResult> {
    check_generic(&p.a, &p.b, doubled)?;
    if alpha >= p.a.len() {
        return Err(Error::Domain(format!("alpha = {alpha} out of range")));
    }
    let lz = p.z.ln();
    let terms = (0..=max_order)
        .map(|m| Ok((ln_residue(p, alpha, m, doubled)? - (p.a[alpha] - m as f64) * lz).exp()))
        .collect::<Result<Vec<C>>>()?;
    residue_multisum(&|m: &[usize]| terms[m[0]], 1, max_order, SERIES_TOL)
}

/// Direct residue sum of the integral defining [`psi`].
pub fn psi_residue(p: &MBParams, alpha: usize, max_order: usize) -> Result<IntegrationResult> {
    single_residue(p, alpha, false, max_order)
}

/// Direct residue sum of the integral defining [`psi_pm`].
pub fn psi_pm_residue(p: &MBParams, alpha: usize, max_order: usize) -> Result<IntegrationResult> {
    single_residue(p, alpha, true, max_order)
}

/// Applies `prod (d_z + a) - (-1)^{r+s} z prod (d_z + b + 1)` to `psi_alpha`
/// and returns `(|residual|, scale)` at `z`, where `scale` is the larger of the
/// two halves of the operator.
pub fn ode_residual(p: &MBParams, alpha: usize) -> Result<(f64, f64)> {
    let y = psi(p, alpha)?;
    let left = p.a.iter().fold(y.clone(), |acc, &a| acc.dz_plus(a));
    let right = p
        .b
        .iter()
        .fold(y, |acc, &b| acc.dz_plus(b + 1.0))
        .times_z()
        .scaled(c(-sign(p.a.len() + p.b.len())));
    let lv = left.eval(p.z);
    let rv = right.eval(p.z);
    let total = left.try_add(&right)?.eval(p.z);
    Ok((total.norm(), lv.norm().max(rv.norm())))
}

fn check_rank(family: Family, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidRank { family, rank: n });
    }
    Ok(())
}

/// `psi_{A_{n-1},alpha}`: `psi_alpha` with the series argument `(-1)^{n-1} z`
/// and the power `z^{-a_alpha}` kept on the principal branch of `log z`.
pub fn psi_a(p: &MBParams, alpha: usize) -> Result<PrefactorSeries> {
    let mut s = psi(p, alpha)?;
    s.base_scale *= sign(p.rank().max(1) - 1);
    Ok(s)
}

/// `Psi_{A_{n-1},I}(z)` as a Wronskian of the `psi_{A,I(i)}`.
pub fn mb_wronskian_a(p: &MBParams, form: MbForm) -> Result<C> {
    let n = p.rank();
    check_rank(Family::A, n)?;
    let series = p.index.iter().map(|&i| psi_a(p, i)).collect::<Result<Vec<_>>>()?;
    let m = DMatrix::from_fn(n, n, |i, j| series[i].dz_pow(j).eval(p.z));
    let mut pre = c(1.0);
    let sel = p.selected();
    for i in 0..n {
        for j in i + 1..n {
            let d = match form {
                MbForm::Displayed => sel[i] - sel[j],
                MbForm::Derived => sel[j] - sel[i],
            };
            pre *= (d * std::f64::consts::PI).sin() / std::f64::consts::PI;
        }
    }
    Ok(pre * det_complex(&m)?)
}

/// `n`-fold residue sum of the type A integral over the contours `C_I`.
pub fn mb_residue_a(p: &MBParams, max_order: usize, tol: f64) -> Result<IntegrationResult> {
    let n = p.rank();
    check_rank(Family::A, n)?;
    check_generic(&p.a, &p.b, false)?;
    let tables = single_tables(p, max_order, false)?;
    let sel = p.selected();
    let term = move |m: &[usize]| {
        let x: Vec<C> = (0..n).map(|i| sel[i] - m[i] as f64).collect();
        let mut v = c(1.0);
        for i in 0..n {
            for j in i + 1..n {
                v *= recip_gamma_pair(x[i] - x[j]);
            }
            v *= tables[i][m[i]];
        }
        v
    };
    residue_multisum(&term, n, max_order, tol)
}

/// Per-variable residue factors including `z^{-x_i}`.
fn single_tables(p: &MBParams, max_order: usize, doubled: bool) -> Result<Vec<Vec<C>>> {
    let lz = p.z.ln();
    p.index
        .iter()
        .map(|&alpha| {
            (0..=max_order)
                .map(|m| Ok((ln_residue(p, alpha, m, doubled)? - (p.a[alpha] - m as f64) * lz).exp()))
                .collect()
        })
        .collect()
}

fn bcd_family(family: Family) -> Result<()> {
    if family == Family::A {
        return Err(Error::Domain("type A has its own Wronskian formula".into()));
    }
    Ok(())
}

/// `psi_{G,alpha}` in the displayed normalization: for B, the gamma ratio
/// times `psi^pm` with series argument `-z`; for C and D, `psi^pm` itself.
pub fn psi_g(family: Family, p: &MBParams, alpha: usize) -> Result<PrefactorSeries> {
    bcd_family(family)?;
    let s = psi_pm(p, alpha)?;
    Ok(match family {
        Family::B => {
            let mut s = s.scaled(zero_weight_factor(p)?);
            s.base_scale = -s.base_scale;
            s
        }
        _ => s,
    })
}

/// `Psi_{G,I}(z)` for `G = B, C, D` as a Wronskian in `d_z^2`.
pub fn mb_wronskian_bcd(family: Family, p: &MBParams, form: MbForm) -> Result<C> {
    bcd_family(family)?;
    let n = p.rank();
    check_rank(family, n)?;
    let mut series = p.index.iter().map(|&i| psi_g(family, p, i)).collect::<Result<Vec<_>>>()?;
    let mut extra = c(1.0);
    if form == MbForm::Derived {
        extra = c(sign(n * (n - 1) / 2));
        if family == Family::B {
            let g = zero_weight_factor(p)?;
            series = series.iter().map(|s| s.scaled(g.inv())).collect();
            extra *= g;
        }
    }
    let (first, factor) = match family {
        Family::B => (1, c(1.0)),
        Family::C => (1, c(2f64.powi(n as i32))),
        _ => (0, c(2.0)),
    };
    let m = DMatrix::from_fn(n, n, |i, j| series[i].dz_pow(first + 2 * j).eval(p.z));
    let roots = build_root_system(family, n)?;
    let sel = p.selected();
    let mut pre = c(1.0);
    for r in &roots.positive_roots {
        let v: C = root_value(r, &sel)?;
        pre *= (v * std::f64::consts::PI).sin() / std::f64::consts::PI;
    }
    Ok(extra * factor * pre * det_complex(&m)?)
}

/// `n`-fold residue sum of the `B, C, D` integral, including the factor
/// `2^n n! / |W_G|` and the zero weight of type B.
pub fn mb_residue_bcd(family: Family, p: &MBParams, max_order: usize, tol: f64) -> Result<IntegrationResult> {
    bcd_family(family)?;
    let n = p.rank();
    check_rank(family, n)?;
    check_generic(&p.a, &p.b, true)?;
    let roots = build_root_system(family, n)?;
    let mut pre = c((1u64 << n) as f64 * (1..=n).product::<usize>() as f64 / roots.weyl_order as f64);
    if family == Family::B {
        pre *= zero_weight_factor(p)?;
    }
    let tables = single_tables(p, max_order, true)?;
    let sel = p.selected();
    let term = move |m: &[usize]| {
        let x: Vec<C> = (0..n).map(|i| sel[i] - m[i] as f64).collect();
        let mut v = pre;
        for r in &roots.positive_roots {
            v *= recip_gamma_pair(root_value(r, &x).unwrap_or(c(0.0)));
        }
        for i in 0..n {
            v *= tables[i][m[i]];
        }
        v
    };
    residue_multisum(&term, n, max_order, tol)
}

/// `Displayed / Derived` for the Wronskian formulas: `(-1)^{n(n-1)/2}`, times
/// the gamma ratio to the power `n - 1` for type B.
pub fn displayed_ratio(family: Family, p: &MBParams) -> Result<C> {
    let n = p.rank();
    let s = c(sign(n * n.saturating_sub(1) / 2));
    if family == Family::B && n > 1 {
        return Ok(s * zero_weight_factor(p)?.powi(n as i32 - 1));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: &[C], b: &[C], index: &[usize], z: f64) -> MBParams {
        MBParams::new(a.to_vec(), b.to_vec(), index.to_vec(), c(z)).unwrap()
    }

    #[test]
    fn r1_is_exponential() {
        let a = C::new(0.3, 0.1);
        let p = params(&[a], &[], &[0], 0.4);
        let expect = (-a * p.z.ln()).exp() * (-p.z).exp();
        assert!((psi(&p, 0).unwrap().eval(p.z) - expect).norm() < 1e-14);
    }

    #[test]
    fn degenerate_parameters_are_refused() {
        let p = params(&[c(0.3), c(1.3000001)], &[], &[0], 0.3);
        assert!(matches!(psi(&p, 0), Err(Error::DegenerateParameters(_))));
    }
}
