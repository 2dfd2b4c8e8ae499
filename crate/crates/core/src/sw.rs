//! The SW integral `Z_G = (1/|W|) int prod_{R+} (alpha(x) / 4 pi) sh(alpha(x)) prod w(x_i) dx`
//! by direct integration, by the moment determinant, and by the biorthogonal
//! determinant, together with the Gaussian closed forms.

use std::f64::consts::PI;

use astro_float::{BigFloat, Consts};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det_big, det_real, BIG_PRECISION, BIG_ROUNDING};
use crate::oracles::{monte_carlo, quad_real_nd, GaussianSampler, IntegrationResult};
use crate::poly::Polynomial;
use crate::roots::{root_value, Family, RootSystem};
use crate::special::{barnes_g_ratio, ln_barnes_g_integer, ln_sklyanin_factor, log_gamma, sklyanin_factor};
use crate::weights::{derived_measure, RealWeight};

#[derive(Clone, Debug)]
pub struct SWProblem {
    pub roots: RootSystem,
    pub weight: RealWeight,
}

impl SWProblem {
    pub fn new(roots: RootSystem, weight: RealWeight) -> Result<Self> {
        if roots.family != Family::A && !weight.symmetric {
            return Err(Error::SymmetryViolation);
        }
        Ok(SWProblem { roots, weight })
    }

    pub fn family(&self) -> Family {
        self.roots.family
    }

    pub fn rank(&self) -> usize {
        self.roots.rank
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: x.len() });
        }
        Ok(())
    }

    /// `prod_{R+} sklyanin_factor(alpha(x))`, without the weight or `1/|W|`.
    pub fn root_factor(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let mut p = 1.0;
        for r in &self.roots.positive_roots {
            p *= sklyanin_factor(root_value(r, x)?);
        }
        Ok(p)
    }

    /// Log of `|prod_{R+} sklyanin_factor(alpha(x))|`.
    pub fn ln_root_factor(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let mut s = 0.0;
        for r in &self.roots.positive_roots {
            s += ln_sklyanin_factor(root_value(r, x)?);
        }
        Ok(s)
    }

    /// The Sklyanin density times the weight, `(1/|W|) prod_{R+} ... prod_i w(x_i)`.
    pub fn sklyanin_density(&self, x: &[f64]) -> Result<f64> {
        let w: f64 = x.iter().map(|&xi| self.weight.density(xi)).product();
        Ok(self.root_factor(x)? * w / self.roots.weyl_order as f64)
    }
}

/// `prod_{R+} alpha(x)` in the normalization of the additive Vandermonde formulas
/// (the short roots `e_i` of C enter as `2 x_i`).
pub fn additive_product(family: Family, x: &[f64]) -> Result<f64> {
    let rs = crate::roots::build_root_system(family, x.len())?;
    let mut p = 1.0;
    for r in &rs.positive_roots {
        p *= root_value(r, x)?;
    }
    Ok(p)
}

/// The determinant side of the additive Vandermonde formulas, eliminated in
/// [`BIG_PRECISION`] bits: the determinant cancels far below the size of its
/// entries when points nearly coincide.
pub fn additive_determinant(family: Family, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let (p, rm) = (BIG_PRECISION, BIG_ROUNDING);
    let m = (0..n)
        .map(|i| {
            let xi = BigFloat::from_f64(x[i], p);
            (1..=n)
                .map(|j| {
                    let power = match family {
                        Family::A => n - j,
                        Family::B | Family::C => 2 * n - 2 * j + 1,
                        Family::D => 2 * n - 2 * j,
                    };
                    xi.powi(power, p, rm)
                })
                .collect()
        })
        .collect();
    let scale = if family == Family::C { 2f64.powi(n as i32) } else { 1.0 };
    Ok(scale * det_big(m)?)
}

fn sh(z: f64) -> f64 {
    2.0 * (0.5 * z).sinh()
}

/// `prod_{R+} sh(alpha(x))` with `sh z = 2 sinh(z/2)`.
pub fn multiplicative_product(family: Family, x: &[f64]) -> Result<f64> {
    let rs = crate::roots::build_root_system(family, x.len())?;
    let mut p = 1.0;
    for r in &rs.positive_roots {
        p *= sh(root_value(r, x)?);
    }
    Ok(p)
}

/// The determinant side of the multiplicative Vandermonde formulas, in
/// [`BIG_PRECISION`] bits like [`additive_determinant`].
pub fn multiplicative_determinant(family: Family, x: &[f64]) -> Result<f64> {
    let n = x.len();
    let (p, rm) = (BIG_PRECISION, BIG_ROUNDING);
    let mut consts = Consts::new().map_err(|e| Error::Config(format!("arbitrary precision constants: {e:?}")))?;
    let two = BigFloat::from_f64(2.0, p);
    let half_n = n as f64 / 2.0;
    let mut m = Vec::with_capacity(n);
    for &xi in x {
        let xi = BigFloat::from_f64(xi, p);
        let mut row = Vec::with_capacity(n);
        for j in 1..=n {
            let j = j as f64;
            // Half-integer rates are exact in binary.
            let rate = match family {
                Family::A => half_n + 0.5 - j,
                Family::B => 2.0 * half_n + 0.5 - j,
                Family::C => 2.0 * half_n + 1.0 - j,
                Family::D => 2.0 * half_n - j,
            };
            let y = xi.mul(&BigFloat::from_f64(rate, p), p, rm);
            row.push(match family {
                Family::A => y.exp(p, rm, &mut consts),
                Family::B | Family::C => two.mul(&y.sinh(p, rm, &mut consts), p, rm),
                Family::D => two.mul(&y.cosh(p, rm, &mut consts), p, rm),
            });
        }
        m.push(row);
    }
    let scale = if family == Family::D { 0.5 } else { 1.0 };
    Ok(scale * det_big(m)?)
}

/// `prod_{R+} |Gamma(i alpha(x) / 2 pi)|^{-2}` evaluated through the complex log-gamma.
pub fn gamma_root_product(roots: &RootSystem, x: &[f64]) -> Result<f64> {
    let mut ln = 0.0;
    for r in &roots.positive_roots {
        let a = root_value(r, x)?;
        if a == 0.0 {
            return Ok(0.0);
        }
        ln -= 2.0 * log_gamma(Complex64::new(0.0, a / (2.0 * PI)))?.re;
    }
    Ok(ln.exp())
}

/// `(4 pi)^{-N} prod_{R+} alpha(x) sh(alpha(x))`.
pub fn sinh_root_product(roots: &RootSystem, x: &[f64]) -> Result<f64> {
    let mut p = 1.0;
    for r in &roots.positive_roots {
        let a = root_value(r, x)?;
        p *= a * sh(a) / (4.0 * PI);
    }
    Ok(p)
}

fn moment_entry(problem: &SWProblem, row: usize, col: usize) -> Result<f64> {
    let n = problem.rank();
    let w = &problem.weight;
    let (i, j) = (row, col as f64);
    Ok(match problem.family() {
        Family::A => w.moment(i, j - 0.5 * (n as f64 - 1.0))?,
        Family::B => 0.5 * (w.moment(2 * i + 1, j + 0.5)? - w.moment(2 * i + 1, -j - 0.5)?),
        Family::C => 0.5 * (w.moment(2 * i + 1, j + 1.0)? - w.moment(2 * i + 1, -j - 1.0)?),
        Family::D => 0.5 * (w.moment(2 * i, j)? + w.moment(2 * i, -j)?),
    })
}

/// `log` of the constant in front of the moment determinant.
fn ln_moment_prefactor(family: Family, n: usize) -> f64 {
    let nf = n as f64;
    let ln4pi = (4.0 * PI).ln();
    match family {
        Family::A => -0.5 * nf * (nf - 1.0) * ln4pi,
        Family::B => -nf * nf * ln4pi,
        Family::C => nf * std::f64::consts::LN_2 - nf * nf * ln4pi,
        Family::D => -nf * (nf - 1.0) * ln4pi,
    }
}

/// The moment matrix whose determinant (times the family prefactor) is `Z_G`.
/// Row `i` carries the polynomial degree and column `j` the exponential rate.
pub fn moment_matrix(problem: &SWProblem) -> Result<DMatrix<f64>> {
    let n = problem.rank();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = moment_entry(problem, i, j)?;
        }
    }
    Ok(m)
}

/// `Z_G` from the moment determinant.
pub fn sw_moment_determinant(problem: &SWProblem) -> Result<f64> {
    let n = problem.rank();
    let d = det_real(&moment_matrix(problem)?)?;
    Ok(ln_moment_prefactor(problem.family(), n).exp() * d)
}

/// The same determinant with the exponential rate tied to the row index, so
/// every column is identical. Singular for `n >= 2` outside family A.
pub fn sw_moment_determinant_row_indexed(problem: &SWProblem) -> Result<f64> {
    let n = problem.rank();
    if problem.family() == Family::A {
        return sw_moment_determinant(problem);
    }
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let v = moment_entry(problem, i, i)?;
        for j in 0..n {
            m[(i, j)] = v;
        }
    }
    Ok(ln_moment_prefactor(problem.family(), n).exp() * det_real(&m)?)
}

/// Constant in front of the biorthogonal determinant.
pub fn biorthogonal_prefactor(family: Family, n: usize) -> f64 {
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    let ln4pi = (4.0 * PI).ln();
    let ln = match family {
        Family::A => -0.5 * nf * (nf - 1.0) * ln4pi,
        Family::B | Family::C => 0.5 * nf * (nf - 1.0) * ln2 - nf * nf * ln4pi,
        Family::D => 0.5 * (nf - 1.0) * (nf - 2.0) * ln2 - nf * (nf - 1.0) * ln4pi,
    };
    ln.exp()
}

/// The power of 2 printed in the literature form of the biorthogonal formula for
/// every family but A: `2^{(n-1)(n-2)/2}`.
pub fn biorthogonal_prefactor_printed(family: Family, n: usize) -> f64 {
    let nf = n as f64;
    let ln4pi = (4.0 * PI).ln();
    let ln2 = std::f64::consts::LN_2;
    let two = 0.5 * (nf - 1.0) * (nf - 2.0) * ln2;
    match family {
        Family::A => biorthogonal_prefactor(family, n),
        Family::B | Family::C => (two - nf * nf * ln4pi).exp(),
        Family::D => (two - nf * (nf - 1.0) * ln4pi).exp(),
    }
}

fn check_bases(n: usize, p: &[Polynomial], q: &[Polynomial]) -> Result<()> {
    for (k, poly) in p.iter().chain(q).enumerate() {
        if !poly.is_monic_of_degree(k % n) {
            return Err(Error::NonMonicBasis { index: k % n });
        }
    }
    if p.len() != n || q.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.len().min(q.len()) });
    }
    Ok(())
}

/// `cosh(x)^b = 2^{-b} sum_l C(b, l) e^{(b - 2l) x}`.
fn cosh_power_rates(b: usize) -> Vec<(f64, f64)> {
    let mut c = 1.0;
    (0..=b)
        .map(|l| {
            if l > 0 {
                c *= (b - l + 1) as f64 / l as f64;
            }
            (c * 0.5f64.powi(b as i32), (b as f64) - 2.0 * l as f64)
        })
        .collect()
}

/// Pairing `<x^a, y^b>_G` for monomials: `int x^a e^{b x} dmu_A` for A and
/// `int x^{2a} cosh(x)^b dmu_G` otherwise, expanded into moments of `w`.
pub fn monomial_pairing(weight: &RealWeight, family: Family, n: usize, a: usize, b: usize) -> Result<f64> {
    let tilt = -0.5 * (n as f64 - 1.0);
    match family {
        Family::A => weight.moment(a, b as f64 + tilt),
        _ => {
            let mut sum = 0.0;
            for (c, rate) in cosh_power_rates(b) {
                // x^{2a} e^{rate x} against the derived measure.
                sum += c * match family {
                    // x sinh(x/2)
                    Family::B => 0.5 * (weight.moment(2 * a + 1, rate + 0.5)? - weight.moment(2 * a + 1, rate - 0.5)?),
                    // 2 x sinh(x)
                    Family::C => weight.moment(2 * a + 1, rate + 1.0)? - weight.moment(2 * a + 1, rate - 1.0)?,
                    _ => weight.moment(2 * a, rate)?,
                };
            }
            Ok(sum)
        }
    }
}

/// Pairing matrix `<p_i, q_j>_G` for polynomial bases.
pub fn pairing_matrix(weight: &RealWeight, family: Family, n: usize, p: &[Polynomial], q: &[Polynomial]) -> Result<DMatrix<f64>> {
    let size = p.len().max(q.len());
    let mut mono = DMatrix::zeros(size, size);
    for a in 0..size {
        for b in 0..size {
            mono[(a, b)] = monomial_pairing(weight, family, n, a, b)?;
        }
    }
    let mut out = DMatrix::zeros(p.len(), q.len());
    for (i, pi) in p.iter().enumerate() {
        for (j, qj) in q.iter().enumerate() {
            let mut s = 0.0;
            for (a, ca) in pi.coeffs().iter().enumerate() {
                for (b, cb) in qj.coeffs().iter().enumerate() {
                    if *ca != 0.0 && *cb != 0.0 {
                        s += ca * cb * mono[(a, b)];
                    }
                }
            }
            out[(i, j)] = s;
        }
    }
    Ok(out)
}

/// Same pairing by direct adaptive quadrature against the derived measure.
pub fn pairing_by_quadrature(weight: &RealWeight, family: Family, n: usize, p: &Polynomial, q: &Polynomial) -> Result<f64> {
    let mu = derived_measure(weight, family, n)?;
    let deg = p.degree() + q.degree();
    match family {
        Family::A => mu.integrate(|x| p.eval(x) * q.eval(x.exp()), p.degree(), q.degree() as f64),
        _ => mu.integrate(|x| p.eval(x * x) * q.eval(x.cosh()), 2 * deg, q.degree() as f64),
    }
}

/// `Z_G` from the biorthogonal determinant `det <p_i, q_j>_G`.
pub fn sw_biorthogonal_determinant(problem: &SWProblem, p: &[Polynomial], q: &[Polynomial]) -> Result<f64> {
    let n = problem.rank();
    check_bases(n, p, q)?;
    let m = pairing_matrix(&problem.weight, problem.family(), n, p, q)?;
    Ok(biorthogonal_prefactor(problem.family(), n) * det_real(&m)?)
}

/// Closed form of `Z_G` for the standard normal weight, as printed for each family.
pub fn sw_gaussian_closed_form(family: Family, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidRank { family, rank: n });
    }
    let nf = n as f64;
    let (ln2, lnpi) = (std::f64::consts::LN_2, PI.ln());
    let g_n1 = ln_barnes_g_integer(n);
    let ln = match family {
        Family::A => nf * (nf * nf - 1.0) / 24.0 - nf * (nf - 1.0) * ln2 - 0.5 * nf * (nf - 1.0) * lnpi + g_n1,
        Family::B => {
            nf * (4.0 * nf * nf - 1.0) / 24.0 - nf * (nf + 1.0) * ln2 - 0.5 * (nf + 1.0) * (2.0 * nf - 1.0) * lnpi
                + g_n1
                + barnes_g_ratio(1.5, n)?
        }
        Family::C => {
            nf * (nf + 1.0) * (2.0 * nf + 1.0) / 12.0 - nf * (nf - 1.0) * ln2 - 0.5 * nf * (2.0 * nf + 1.0) * lnpi
                + g_n1
                + barnes_g_ratio(1.5, n)?
        }
        Family::D => {
            nf * (nf - 1.0) * (2.0 * nf - 1.0) / 12.0 - (nf * nf - 1.0) * ln2 - 0.5 * (nf - 1.0) * (2.0 * nf + 1.0) * lnpi
                + g_n1
                + barnes_g_ratio(1.5, n - 1)?
        }
    };
    Ok(ln.exp())
}

/// Closed form together with the ratio to the moment determinant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianAudit {
    pub closed_form: f64,
    pub determinant: f64,
    pub ratio: f64,
}

pub fn gaussian_audit(family: Family, n: usize) -> Result<GaussianAudit> {
    let rs = crate::roots::build_root_system(family, n)?;
    let det = sw_moment_determinant(&SWProblem::new(rs, RealWeight::gaussian())?)?;
    let closed = sw_gaussian_closed_form(family, n)?;
    Ok(GaussianAudit { closed_form: closed, determinant: det, ratio: closed / det })
}

/// `det_{0<=i,j<n} (j + a)^{2i}`.
pub fn shifted_vandermonde_det(n: usize, a: f64) -> Result<f64> {
    det_real(&DMatrix::from_fn(n, n, |i, j| (j as f64 + a).powi(2 * i as i32)))
}

/// `prod_{i<j} ((j + a)^2 - (i + a)^2)`.
pub fn shifted_vandermonde_product(n: usize, a: f64) -> f64 {
    let mut p = 1.0;
    for i in 0..n {
        for j in i + 1..n {
            p *= (j as f64 + a).powi(2) - (i as f64 + a).powi(2);
        }
    }
    p
}

/// Barnes G form of the shifted Vandermonde determinant, for real `a > 0`.
pub fn shifted_vandermonde_barnes(n: usize, a: f64) -> Result<f64> {
    if n == 0 {
        return Ok(1.0);
    }
    let nf = n as f64;
    let m = n - 1;
    let ln = (nf - 1.0) * (nf + 2.0 * a - 1.0) * std::f64::consts::LN_2 - 0.5 * (nf - 1.0) * PI.ln()
        + ln_barnes_g_integer(n)
        + barnes_g_ratio(1.0 + a, m)?
        + barnes_g_ratio(1.5 + a, m)?
        - barnes_g_ratio(1.0 + 2.0 * a, m)?;
    Ok(ln.exp())
}

/// Backend for [`sw_direct`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "oracle", rename_all = "kebab-case")]
pub enum DirectOracle {
    /// Tensor Gauss rule adapted to the weight; error from `order` vs `2 order`.
    Quadrature { order: usize },
    /// Importance sampling on the fundamental Weyl chamber.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Is `x` in the fundamental chamber (ordered, and nonnegative for B/C)?
fn in_chamber(family: Family, x: &[f64]) -> bool {
    let n = x.len();
    if x.windows(2).take(n.saturating_sub(2)).any(|p| p[0] <= p[1]) {
        return false;
    }
    match family {
        Family::A => n < 2 || x[n - 2] > x[n - 1],
        Family::B | Family::C => (n < 2 || x[n - 2] > x[n - 1]) && x[n - 1] > 0.0,
        Family::D => n < 2 || x[n - 2] > x[n - 1].abs(),
    }
}

/// Crude maximizer of `ln(root factor) + sum ln w` inside the chamber.
fn chamber_mode(problem: &SWProblem) -> Vec<f64> {
    let ln_f = |x: &[f64]| -> f64 {
        if !in_chamber(problem.family(), x) {
            return f64::NEG_INFINITY;
        }
        let lw: f64 = x.iter().map(|&v| problem.weight.density(v).ln()).sum();
        problem.ln_root_factor(x).unwrap_or(f64::NEG_INFINITY) + lw
    };
    let mut x: Vec<f64> = problem.roots.weyl_vector();
    if problem.family() == Family::D && x.len() > 0 {
        let last = x.len() - 1;
        x[last] += 0.25;
    }
    let mut best = ln_f(&x);
    let mut step = 0.5;
    while step > 1e-4 {
        let mut improved = false;
        for d in 0..x.len() {
            for s in [step, -step] {
                x[d] += s;
                let v = ln_f(&x);
                if v > best {
                    best = v;
                    improved = true;
                } else {
                    x[d] -= s;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    x
}

/// `Z_G` by integrating the Sklyanin density directly over R^n.
pub fn sw_direct(problem: &SWProblem, oracle: DirectOracle) -> Result<IntegrationResult> {
    let n = problem.rank();
    let weyl = problem.roots.weyl_order as f64;
    match oracle {
        DirectOracle::Quadrature { order } => {
            let f = |x: &[f64]| problem.root_factor(x).unwrap_or(f64::NAN) / weyl;
            quad_real_nd(&f, n, &problem.weight, order)
        }
        DirectOracle::MonteCarlo { samples, seed } => {
            let family = problem.family();
            let f = |x: &[f64]| {
                if !in_chamber(family, x) {
                    return 0.0;
                }
                problem.sklyanin_density(x).unwrap_or(f64::NAN) * weyl
            };
            let spread = problem.weight.moment(2, 0.0)?.sqrt().max(1.0);
            let sampler = GaussianSampler { center: chamber_mode(problem), scale: 1.2 * spread };
            monte_carlo(&f, &sampler, samples, seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::build_root_system;

    fn gaussian(f: Family, n: usize) -> SWProblem {
        SWProblem::new(build_root_system(f, n).unwrap(), RealWeight::gaussian()).unwrap()
    }

    #[test]
    fn small_determinants() {
        assert!((sw_moment_determinant(&gaussian(Family::A, 1)).unwrap() - 1.0).abs() < 1e-15);
        let a1 = sw_moment_determinant(&gaussian(Family::A, 2)).unwrap();
        assert!((a1 - 0.25f64.exp() / (4.0 * PI)).abs() < 1e-15);
        let b1 = sw_moment_determinant(&gaussian(Family::B, 1)).unwrap();
        assert!((b1 - 0.125f64.exp() / (8.0 * PI)).abs() < 1e-15);
        assert!((sw_moment_determinant(&gaussian(Family::D, 1)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        let p = gaussian(Family::A, 2);
        assert_eq!(p.sklyanin_density(&[0.3, 0.3]).unwrap(), 0.0);
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        let expect = 0.5 * (1.0 / (4.0 * PI)) * (0.5f64.exp() - (-0.5f64).exp()) * phi(1.0) * phi(0.0);
        assert!((p.sklyanin_density(&[1.0, 0.0]).unwrap() - expect).abs() < 1e-16);
    }

    #[test]
    fn chamber_membership() {
        assert!(in_chamber(Family::D, &[2.0, 1.0, -0.5]));
        assert!(!in_chamber(Family::B, &[2.0, 1.0, -0.5]));
        assert!(in_chamber(Family::A, &[2.0, 1.0, -0.5]));
        assert!(!in_chamber(Family::A, &[1.0, 2.0]));
    }

    #[test]
    fn shifted_vandermonde_forms() {
        for &a in &[0.5, 1.3] {
            for n in 1..6 {
                let p = shifted_vandermonde_product(n, a);
                assert!((shifted_vandermonde_det(n, a).unwrap() - p).abs() < 1e-9 * p.abs());
                assert!((shifted_vandermonde_barnes(n, a).unwrap() - p).abs() < 1e-9 * p.abs());
            }
        }
    }
}
