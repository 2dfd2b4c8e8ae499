//! q-SW integrals `Z^(q)_G = (1/|W|) int_{T^n} prod_{R} (z^alpha; q)_inf prod dmu(z_i)`:
//! elliptic Vandermonde products, the elliptic determinant evaluations, direct
//! torus quadrature and the Toeplitz-Hankel determinants.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::det_complex;
use crate::oracles::{quad_torus_nd, IntegrationResult};
use crate::roots::{root_monomial, Family, RootSystem};
use crate::special::{q_pochhammer_inf, theta, theta_inverse_coeffs};
use crate::weights::{fourier_eval, FourierWeight};

type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Default norm parameter for family A.
pub const DEFAULT_T: f64 = 0.4;

/// Terms below this magnitude (times the leading term) are dropped from the
/// Toeplitz-Hankel sums.
const SERIES_CUTOFF: f64 = 1e-20;

#[derive(Clone, Debug)]
pub struct QSWProblem {
    pub roots: RootSystem,
    pub q: C,
    pub weight: FourierWeight,
    /// Norm parameter of the elliptic determinant, used by family A only.
    pub t: C,
}

impl QSWProblem {
    pub fn new(roots: RootSystem, q: C, weight: FourierWeight, t: C) -> Result<Self> {
        if !(q.norm() < 1.0) {
            return Err(Error::Domain(format!("|q| = {} must be below 1", q.norm())));
        }
        if roots.family != Family::A && !weight.symmetric() {
            return Err(Error::SymmetryViolation);
        }
        Ok(QSWProblem { roots, q, weight, t })
    }

    pub fn family(&self) -> Family {
        self.roots.family
    }

    pub fn rank(&self) -> usize {
        self.roots.rank
    }
}

fn qpow(q: C, e: i64) -> C {
    if e == 0 {
        return c(1.0);
    }
    if q == c(0.0) {
        return if e > 0 { c(0.0) } else { C::new(f64::INFINITY, 0.0) };
    }
    q.powi(e as i32)
}

fn binom2(m: i64) -> i64 {
    m * (m - 1) / 2
}

fn check_nonzero(x: &[C]) -> Result<()> {
    if x.iter().any(|v| *v == c(0.0)) {
        return Err(Error::Domain("elliptic Vandermonde needs nonzero arguments".into()));
    }
    Ok(())
}

fn pair_product(x: &[C], q: C) -> Result<C> {
    let mut p = c(1.0);
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            p *= theta(x[i] / x[j], q)? * theta(x[i] * x[j], q)? / x[i];
        }
    }
    Ok(p)
}

/// The theta-function analogue `W_G(x)` of the Vandermonde product.
pub fn elliptic_vandermonde(family: Family, x: &[C], q: C) -> Result<C> {
    check_nonzero(x)?;
    let n = x.len();
    match family {
        Family::A => {
            let mut p = c(1.0);
            for i in 0..n {
                for j in i + 1..n {
                    p *= x[j] * theta(x[i] / x[j], q)?;
                }
            }
            Ok(p)
        }
        Family::B => {
            let mut p = pair_product(x, q)?;
            for &xi in x {
                p *= theta(xi, q)?;
            }
            Ok(p)
        }
        Family::C => {
            let mut p = pair_product(x, q)?;
            for &xi in x {
                p *= theta(xi * xi, q)? / xi;
            }
            Ok(p)
        }
        Family::D => pair_product(x, q),
    }
}

/// Left-hand side of the elliptic determinant evaluation for the family.
/// The theta functions have modulus `q^n` (A), `q^{2n-1}` (B), `q^{2n+2}` (C),
/// `q^{2n-2}` (D); the last is degenerate for `D_1`.
pub fn rs_determinant(family: Family, x: &[C], q: C, t: C) -> Result<C> {
    check_nonzero(x)?;
    let n = x.len() as i64;
    if family == Family::D && n < 2 {
        return Err(Error::DegenerateParameters("D_1 elliptic determinant has modulus q^0".into()));
    }
    let mut m = DMatrix::<C>::zeros(x.len(), x.len());
    for (i, &xi) in x.iter().enumerate() {
        for jj in 0..n {
            let j = jj + 1;
            m[(i, jj as usize)] = match family {
                Family::A => {
                    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
                    xi.powi((j - 1) as i32) * theta(qpow(q, j - 1) * t * xi.powi(n as i32) * sign, qpow(q, n))?
                }
                Family::B => {
                    let p = qpow(q, 2 * n - 1);
                    let e = (2 * n - 1) as i32;
                    xi.powi((j - n) as i32) * theta(qpow(q, j - 1) * xi.powi(e), p)?
                        - xi.powi((n + 1 - j) as i32) * theta(qpow(q, j - 1) * xi.powi(-e), p)?
                }
                Family::C => {
                    let p = qpow(q, 2 * n + 2);
                    let e = (2 * n + 2) as i32;
                    xi.powi((j - n - 1) as i32) * theta(-qpow(q, j) * xi.powi(e), p)?
                        - xi.powi((n + 1 - j) as i32) * theta(-qpow(q, j) * xi.powi(-e), p)?
                }
                Family::D => {
                    let p = qpow(q, 2 * n - 2);
                    let e = (2 * n - 2) as i32;
                    xi.powi((j - n) as i32) * theta(-qpow(q, j - 1) * xi.powi(e), p)?
                        + xi.powi((n - j) as i32) * theta(-qpow(q, j - 1) * xi.powi(-e), p)?
                }
            };
        }
    }
    det_complex(&m)
}

/// Right-hand side: the q-Pochhammer constant times `W_G(x)` (and `theta(t x_1..x_n)` for A).
pub fn rs_evaluation(family: Family, x: &[C], q: C, t: C) -> Result<C> {
    let n = x.len() as i64;
    let qq = q_pochhammer_inf(q, q)?.value;
    let modulus = |k: i64| -> Result<C> {
        let p = qpow(q, k);
        Ok(q_pochhammer_inf(p, p)?.value)
    };
    let w = elliptic_vandermonde(family, x, q)?;
    let ni = n as i32;
    Ok(match family {
        Family::A => {
            let prod: C = x.iter().product();
            (qq / modulus(n)?).powi(ni) * theta(t * prod, q)? * w
        }
        Family::B => c(2.0) * (qq / modulus(2 * n - 1)?).powi(ni) * w,
        Family::C => (qq / modulus(2 * n + 2)?).powi(ni) * w,
        Family::D => {
            if n < 2 {
                return Err(Error::DegenerateParameters("D_1 elliptic determinant has modulus q^0".into()));
            }
            c(4.0) * (qq / modulus(2 * n - 2)?).powi(ni) * w
        }
    })
}

/// Random torus points drawn from disjoint arcs, one per coordinate: arcs of the
/// full circle for A, of the upper half circle for B, C, D. This keeps
/// `x_i x_j^{+-1}` and `x_i^2` away from 1, where `W_G` vanishes and the
/// determinant identities lose all relative accuracy to cancellation.
pub fn separated_torus_points<R: Rng + ?Sized>(family: Family, n: usize, rng: &mut R) -> Vec<C> {
    let span = if family == Family::A { std::f64::consts::TAU } else { std::f64::consts::PI };
    (0..n)
        .map(|i| C::from_polar(1.0, span * (i as f64 + rng.gen_range(0.15..0.85)) / n as f64))
        .collect()
}

/// `prod_{alpha in R} (z^alpha; q)_inf`.
pub fn root_pochhammer_product(roots: &RootSystem, z: &[C], q: C) -> Result<C> {
    let mut p = c(1.0);
    for r in &roots.positive_roots {
        let za = root_monomial(r, z)?;
        p *= q_pochhammer_inf(za, q)?.value * q_pochhammer_inf(za.inv(), q)?.value;
    }
    Ok(p)
}

/// `prod_{alpha in R+} (1 - z^{-alpha}) theta(z^alpha; q)`.
pub fn root_theta_product(roots: &RootSystem, z: &[C], q: C) -> Result<C> {
    let mut p = c(1.0);
    for r in &roots.positive_roots {
        let za = root_monomial(r, z)?;
        p *= (c(1.0) - za.inv()) * theta(za, q)?;
    }
    Ok(p)
}

/// `W_G(z)` times the multiplicative determinant (with the `prod z_i^{-1/2}` of B
/// and the `1/2` of D), which factorizes [`root_theta_product`].
pub fn root_theta_factorized(family: Family, z: &[C], q: C) -> Result<C> {
    let n = z.len();
    let nf = n as f64;
    let w = elliptic_vandermonde(family, z, q)?;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let j = (j + 1) as f64;
        let zi = z[i];
        match family {
            Family::A => zi.powf(1.0 - j),
            Family::B => zi.powf(nf + 0.5 - j) - zi.powf(-nf - 0.5 + j),
            Family::C => zi.powf(nf + 1.0 - j) - zi.powf(-nf - 1.0 + j),
            Family::D => zi.powf(nf - j) + zi.powf(-nf + j),
        }
    });
    let d = det_complex(&m)?;
    Ok(match family {
        Family::B => {
            let s: C = z.iter().map(|zi| zi.powf(-0.5)).product();
            s * w * d
        }
        Family::D => w * d * 0.5,
        _ => w * d,
    })
}

/// Torus integrand `(1/|W|) prod_R (z^alpha; q)_inf prod w(z_i)`.
fn integrand(problem: &QSWProblem, z: &[C]) -> C {
    let weight: C = z.iter().map(|&zi| fourier_eval(&problem.weight, zi).unwrap_or(C::new(f64::NAN, 0.0))).product();
    let roots = root_pochhammer_product(&problem.roots, z, problem.q).unwrap_or(C::new(f64::NAN, 0.0));
    roots * weight / problem.roots.weyl_order as f64
}

/// `Z^(q)_G` by the tensor trapezoid rule on the torus.
pub fn qsw_direct(problem: &QSWProblem, points: usize, tol: f64) -> Result<IntegrationResult> {
    let f = |z: &[C]| integrand(problem, z);
    quad_torus_nd(&f, problem.rank(), points, tol)
}

/// The `q = 0` Cartan torus integral `(1/|W|) int prod_R (1 - z^alpha) prod dmu`.
pub fn cartan_torus_integral(roots: &RootSystem, weight: &FourierWeight, points: usize, tol: f64) -> Result<IntegrationResult> {
    let f = |z: &[C]| {
        let mut p = c(1.0);
        for r in &roots.positive_roots {
            let za = root_monomial(r, z).unwrap_or(C::new(f64::NAN, 0.0));
            p *= (c(1.0) - za) * (c(1.0) - za.inv());
        }
        let w: C = z.iter().map(|&zi| fourier_eval(weight, zi).unwrap_or(C::new(f64::NAN, 0.0))).product();
        p * w / roots.weyl_order as f64
    };
    quad_torus_nd(&f, roots.rank, points, tol)
}

/// Which reading of the Toeplitz-Hankel formulas to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QswLayout {
    /// Entries obtained by expanding the elliptic determinants and taking
    /// constant terms. For A the theta-inverse sum multiplies the whole
    /// determinant; for B the q-exponent and index period are `2n - 1`, the
    /// modulus of the B elliptic determinant.
    Derived,
    /// As printed in the literature statement: for A the theta-inverse sum sits
    /// inside every entry; for B the period is `2n + 1`. C and D agree with
    /// [`QswLayout::Derived`].
    Printed,
}

/// Range of `m` beyond which `|q|^{c C(m,2) + s m} |t|^m` is negligible for all
/// shifts `|s| <= smax`.
fn m_range(q: C, period: i64, smax: i64, t_abs: f64) -> Result<i64> {
    let lq = q.norm().ln();
    if !lq.is_finite() || lq >= 0.0 {
        return Ok(1);
    }
    let lt = if t_abs > 0.0 { t_abs.ln() } else { 0.0 };
    for m in 1..10_000i64 {
        let worst = [m, -m]
            .iter()
            .map(|&mm| lq * (period * binom2(mm)) as f64 + (lq.abs() * (smax * mm.abs()) as f64) + lt * mm as f64)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < SERIES_CUTOFF.ln() && m > 2 {
            return Ok(m);
        }
    }
    Err(Error::NonConvergence("Toeplitz-Hankel series over m".into()))
}

fn th_entry_bcd(problem: &QSWProblem, layout: QswLayout, row: i64, col: i64) -> Result<C> {
    let n = problem.rank() as i64;
    let q = problem.q;
    let w = |k: i64| problem.weight.coefficient(k);
    let (period, hankel, sign, shift) = match (problem.family(), layout) {
        (Family::B, QswLayout::Derived) => (2 * n - 1, 2 * n + 1, true, col - 1),
        (Family::B, QswLayout::Printed) => (2 * n + 1, 2 * n + 1, true, col - 1),
        (Family::C, _) => (2 * n + 2, 2 * n + 2, false, col),
        (Family::D, _) => (2 * n - 2, 2 * n, false, col - 1),
        (Family::A, _) => unreachable!("family A has its own entries"),
    };
    if period == 0 {
        return Err(Error::DegenerateParameters("D_1 has no Toeplitz-Hankel form".into()));
    }
    let mmax = m_range(q, period, n + 1, 1.0)?;
    let mut s = c(0.0);
    for m in -mmax..=mmax {
        let coef = qpow(q, shift * m + period * binom2(m)) * if sign && m % 2 != 0 { -1.0 } else { 1.0 };
        if coef.norm() == 0.0 {
            continue;
        }
        let toeplitz = w(row - col - period * m);
        let hankel_term = w(hankel - row - col - period * m);
        s += coef
            * match problem.family() {
                Family::D => toeplitz + hankel_term,
                _ => toeplitz - hankel_term,
            };
    }
    Ok(s)
}

/// A-type entry `sum_m (-1)^{nm} q^{(j-1)m + n C(m,2)} t^m w_{l-j-k-nm}` for a fixed `k`.
fn th_entry_a(problem: &QSWProblem, row: i64, col: i64, k: i64, mmax: i64) -> C {
    let n = problem.rank() as i64;
    let (q, t) = (problem.q, problem.t);
    let mut s = c(0.0);
    for m in -mmax..=mmax {
        let sign = if (n * m) % 2 != 0 { -1.0 } else { 1.0 };
        let coef = qpow(q, (col - 1) * m + n * binom2(m)) * t.powi(m as i32) * sign;
        if coef.norm() == 0.0 {
            continue;
        }
        s += coef * problem.weight.coefficient(row - col - k - n * m);
    }
    s
}

/// Range `[lo, hi]` of theta-inverse indices with `|c_k t^k|` above the cutoff.
fn k_range(q: C, t: C) -> Result<(i64, i64)> {
    let (qa, ta) = (q.norm(), t.norm());
    if !(qa < ta && ta < 1.0) {
        return Err(Error::Domain(format!(
            "theta inverse expansion needs |q| < |t| < 1, got |q| = {qa}, |t| = {ta}"
        )));
    }
    let hi = (SERIES_CUTOFF.ln() / ta.ln()).ceil() as i64 + 2;
    let lo = if qa == 0.0 { 0 } else { -((SERIES_CUTOFF.ln() / (qa / ta).ln()).ceil() as i64 + 2) };
    Ok((lo, hi))
}

/// `Z^(q)_G` from the Toeplitz-Hankel determinant in the chosen layout.
pub fn qsw_determinant(problem: &QSWProblem, layout: QswLayout) -> Result<C> {
    let n = problem.rank();
    let q = problem.q;
    let ni = n as i64;
    let qq = q_pochhammer_inf(q, q)?.value;
    match problem.family() {
        Family::A => {
            let (lo, hi) = k_range(q, problem.t)?;
            let cs = theta_inverse_coeffs(q, lo, hi)?;
            let mmax = m_range(q, ni, ni + 1, problem.t.norm())?;
            let entry = |i: usize, j: usize, k: i64| th_entry_a(problem, i as i64 + 1, j as i64 + 1, k, mmax);
            let det = match layout {
                QswLayout::Derived => {
                    let mut total = c(0.0);
                    for (idx, ck) in cs.iter().enumerate() {
                        let k = lo + idx as i64;
                        let m = DMatrix::from_fn(n, n, |i, j| entry(i, j, k));
                        total += ck * problem.t.powi(k as i32) * det_complex(&m)?;
                    }
                    total
                }
                QswLayout::Printed => {
                    let m = DMatrix::from_fn(n, n, |i, j| {
                        cs.iter()
                            .enumerate()
                            .map(|(idx, ck)| {
                                let k = lo + idx as i64;
                                ck * problem.t.powi(k as i32) * entry(i, j, k)
                            })
                            .sum::<C>()
                    });
                    det_complex(&m)?
                }
            };
            Ok(det / qq.powi(n as i32))
        }
        family => {
            let mut m = DMatrix::<C>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = th_entry_bcd(problem, layout, i as i64 + 1, j as i64 + 1)?;
                }
            }
            let pre = match family {
                Family::B => 0.5,
                Family::C => 1.0,
                _ => 0.25,
            };
            Ok(det_complex(&m)? * pre / qq.powi(n as i32))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::build_root_system;

    #[test]
    fn a1_vandermonde() {
        let q = c(0.3);
        let x = [C::from_polar(1.0, 0.4), C::from_polar(1.0, -1.1)];
        let w = elliptic_vandermonde(Family::A, &x, q).unwrap();
        let expect = x[1] * theta(x[0] / x[1], q).unwrap();
        assert!((w - expect).norm() < 1e-15);
        assert!(elliptic_vandermonde(Family::A, &[x[0], x[0]], q).unwrap().norm() < 1e-14);
    }

    #[test]
    fn b1_constant_weight() {
        let q = c(0.3);
        let p = QSWProblem::new(build_root_system(Family::B, 1).unwrap(), q, FourierWeight::constant(1.0), c(DEFAULT_T)).unwrap();
        let direct = qsw_direct(&p, 16, 1e-14).unwrap().value;
        let expect = 1.0 / q_pochhammer_inf(q, q).unwrap().value;
        assert!((direct - expect).norm() < 1e-12);
        let det = qsw_determinant(&p, QswLayout::Derived).unwrap();
        assert!((det - expect).norm() < 1e-12);
    }
}
