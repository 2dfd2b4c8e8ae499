//! The SW ensemble as a biorthogonal determinantal point process.
//!
//! With `phi(x) = x` (A) or `x^2` (B, C, D) and `psi(y) = e^y` (A) or
//! `cosh y` (B, C, D), the pairing matrix is `M_ij = <p_i, q_j>_G` and the
//! kernel is `K(x, y) = sum_{i,j} p_i(phi(x)) (M^{-1})_{ji} q_j(psi(y))`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::linalg::{det_real, inverse_with_condition};
use crate::oracles::gauss_legendre;
use crate::poly::{monomial_basis, Polynomial};
use crate::roots::Family;
use crate::sw::{pairing_matrix, sw_moment_determinant, SWProblem};
use crate::weights::{derived_measure, RealWeight};

/// Pairing matrices with a larger 1-norm condition number are refused.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Clone, Debug)]
pub struct KernelModel {
    pub problem: SWProblem,
    /// The reference measure `dmu_G`.
    pub measure: RealWeight,
    pub p_basis: Vec<Polynomial>,
    pub q_basis: Vec<Polynomial>,
    pub pairing: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub condition: f64,
}

/// Monic bases made biorthogonal for `<., .>_G` by LU of the monomial pairing
/// matrix, `M = L D U`: `p = L^{-1} x^i`, `q = y^j U^{-1}`.
pub fn biorthogonal_bases(weight: &RealWeight, family: Family, n: usize) -> Result<(Vec<Polynomial>, Vec<Polynomial>)> {
    let mono = monomial_basis(n);
    let m = pairing_matrix(weight, family, n, &mono, &mono)?;
    let mut l = DMatrix::<f64>::identity(n, n);
    let mut u = m.clone();
    // Doolittle without pivoting; the pairing's leading minors are positive
    // multiples of SW integrals of lower rank.
    for k in 0..n {
        let piv = u[(k, k)];
        if piv == 0.0 {
            return Err(Error::SingularPairing(f64::INFINITY));
        }
        for i in k + 1..n {
            let f = u[(i, k)] / piv;
            l[(i, k)] = f;
            for j in k..n {
                u[(i, j)] -= f * u[(k, j)];
            }
        }
    }
    let linv = l.try_inverse().ok_or(Error::SingularPairing(f64::INFINITY))?;
    let mut unit_u = u.clone();
    for k in 0..n {
        let d = u[(k, k)];
        for j in 0..n {
            unit_u[(k, j)] = u[(k, j)] / d;
        }
    }
    let uinv = unit_u.try_inverse().ok_or(Error::SingularPairing(f64::INFINITY))?;
    let p = (0..n)
        .map(|i| {
            let mut c: Vec<f64> = (0..=i).map(|a| linv[(i, a)]).collect();
            c[i] = 1.0;
            Polynomial(c)
        })
        .collect();
    let q = (0..n)
        .map(|j| {
            let mut c: Vec<f64> = (0..=j).map(|b| uinv[(b, j)]).collect();
            c[j] = 1.0;
            Polynomial(c)
        })
        .collect();
    Ok((p, q))
}

/// Kernel with monomial bases up to rank 4 and biorthogonalized bases above.
pub fn build_default_kernel(problem: &SWProblem) -> Result<KernelModel> {
    let n = problem.rank();
    if n <= 4 {
        let b = monomial_basis(n);
        build_kernel(problem, b.clone(), b)
    } else {
        let (p, q) = biorthogonal_bases(&problem.weight, problem.family(), n)?;
        build_kernel(problem, p, q)
    }
}

pub fn build_kernel(problem: &SWProblem, p_basis: Vec<Polynomial>, q_basis: Vec<Polynomial>) -> Result<KernelModel> {
    let n = problem.rank();
    for (k, poly) in p_basis.iter().chain(&q_basis).enumerate() {
        if !poly.is_monic_of_degree(k % n) {
            return Err(Error::NonMonicBasis { index: k % n });
        }
    }
    let measure = derived_measure(&problem.weight, problem.family(), n)?;
    let pairing = pairing_matrix(&problem.weight, problem.family(), n, &p_basis, &q_basis)?;
    let (inverse, condition) = inverse_with_condition(&pairing)?;
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularPairing(condition));
    }
    Ok(KernelModel { problem: problem.clone(), measure, p_basis, q_basis, pairing, inverse, condition })
}

/// Result of a k-point correlation: `beyond_rank` marks `k > n`, where the
/// correlation vanishes identically.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub value: f64,
    pub beyond_rank: bool,
}

impl KernelModel {
    pub fn rank(&self) -> usize {
        self.problem.rank()
    }

    fn left(&self, x: f64) -> f64 {
        if self.problem.family() == Family::A { x } else { x * x }
    }

    fn right(&self, y: f64) -> f64 {
        if self.problem.family() == Family::A { y.exp() } else { y.cosh() }
    }

    fn p_values(&self, x: f64) -> Vec<f64> {
        let t = self.left(x);
        self.p_basis.iter().map(|p| p.eval(t)).collect()
    }

    fn q_values(&self, y: f64) -> Vec<f64> {
        let t = self.right(y);
        self.q_basis.iter().map(|q| q.eval(t)).collect()
    }

    /// `K(x, y) = sum p_i(phi(x)) (M^{-1})_{ji} q_j(psi(y))`.
    pub fn kernel(&self, x: f64, y: f64) -> f64 {
        let (p, q) = (self.p_values(x), self.q_values(y));
        let n = self.rank();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += p[i] * self.inverse[(j, i)] * q[j];
            }
        }
        s
    }

    /// The bilinear form with the inverse read as `(M^{-1})_{ij}`; it agrees
    /// with [`KernelModel::kernel`] only when the pairing matrix is symmetric.
    pub fn kernel_untransposed(&self, x: f64, y: f64) -> f64 {
        let (p, q) = (self.p_values(x), self.q_values(y));
        let n = self.rank();
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += p[i] * self.inverse[(i, j)] * q[j];
            }
        }
        s
    }

    /// `det_{i,j<=k} K(x_i, x_j)`.
    pub fn correlation(&self, points: &[f64]) -> Result<Correlation> {
        let k = points.len();
        if k > self.rank() {
            return Ok(Correlation { value: 0.0, beyond_rank: true });
        }
        let m = DMatrix::from_fn(k, k, |i, j| self.kernel(points[i], points[j]));
        Ok(Correlation { value: det_real(&m)?, beyond_rank: false })
    }

    /// Joint density of the ensemble with respect to `prod dmu_G(x_i)`, from
    /// the Sklyanin density and the moment determinant.
    pub fn joint_density(&self, x: &[f64]) -> Result<f64> {
        let z = sw_moment_determinant(&self.problem)?;
        let base: f64 = x.iter().map(|&xi| self.measure.density(xi)).product();
        Ok(self.problem.sklyanin_density(x)? / (z * base))
    }

    /// `int g(x) dmu_G(x)` for `g` growing at most like `|x|^power e^{rate |x|}`.
    pub fn integrate(&self, g: impl Fn(f64) -> f64, power: usize, rate: f64) -> Result<f64> {
        self.measure.integrate(g, power, rate)
    }

    /// Growth of `K(x, y)` in either argument, as `(power, rate)`.
    pub fn growth(&self) -> (usize, f64) {
        let n = self.rank();
        match self.problem.family() {
            Family::A => (n, n as f64),
            _ => (2 * n, n as f64),
        }
    }

    /// `int K(x, x) dmu_G(x)`, which equals the number of points.
    pub fn trace(&self) -> Result<f64> {
        let (p, r) = self.growth();
        self.integrate(|x| self.kernel(x, x), 2 * p, 2.0 * r)
    }

    /// `int K(x, y) K(y, z) dmu_G(y)`, which reproduces `K(x, z)`.
    pub fn reproduce(&self, x: f64, z: f64) -> Result<f64> {
        let (p, r) = self.growth();
        self.integrate(|y| self.kernel(x, y) * self.kernel(y, z), 2 * p, 2.0 * r)
    }

    /// Log of the unnormalized Lebesgue density of the ensemble.
    pub fn ln_target(&self, x: &[f64]) -> f64 {
        let lw: f64 = x.iter().map(|&v| self.problem.weight.density(v).ln()).sum();
        self.problem.ln_root_factor(x).unwrap_or(f64::NEG_INFINITY) + lw
    }

    /// Lebesgue density of one point picked uniformly from a configuration:
    /// `rho_1(x) mu_G(x) / n`.
    pub fn one_point_density(&self, x: f64) -> f64 {
        self.kernel(x, x) * self.measure.density(x) / self.rank() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub chains: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Configurations kept per chain after burn-in.
    pub samples_per_chain: usize,
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { chains: 1000, burn_in: 1000, thin: 25, samples_per_chain: 100, initial_step: 0.8, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    /// Configurations in chain order, each symmetrized by a random Weyl group element.
    pub configurations: Vec<Vec<f64>>,
    /// Post-adaptation acceptance rate per chain.
    pub acceptance: Vec<f64>,
    pub step_sizes: Vec<f64>,
    pub warnings: Vec<String>,
}

const ADAPT_WINDOW: usize = 50;

/// Random-walk Metropolis-Hastings on the joint density of the ensemble.
/// The step size is tuned during burn-in towards 30-40% acceptance, then frozen.
pub fn sample(model: &KernelModel, config: &SamplerConfig) -> Result<SampleSet> {
    let n = model.rank();
    if config.chains == 0 || config.thin == 0 {
        return Err(Error::Config("chains and thinning must be positive".into()));
    }
    let weyl = model.problem.roots.weyl_group_elements();
    let start: Vec<f64> = {
        let rho = model.problem.roots.weyl_vector();
        rho.iter().enumerate().map(|(i, r)| r + 0.1 * (n - i) as f64 + 0.05).collect()
    };
    let chains: Vec<(Vec<Vec<f64>>, f64, f64)> = (0..config.chains)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(c as u64);
            let mut x: Vec<f64> = start.iter().map(|s| s + 0.1 * rng.sample::<f64, _>(StandardNormal)).collect();
            let mut lp = model.ln_target(&x);
            let mut step = config.initial_step;
            let mut prop = vec![0.0; n];
            let mut mh = |x: &mut Vec<f64>, lp: &mut f64, step: f64, rng: &mut ChaCha8Rng| -> bool {
                for (p, xi) in prop.iter_mut().zip(x.iter()) {
                    *p = xi + step * rng.sample::<f64, _>(StandardNormal);
                }
                let lq = model.ln_target(&prop);
                let u: f64 = rng.gen();
                if lq.is_finite() && (u.ln() < lq - *lp) {
                    x.copy_from_slice(&prop);
                    *lp = lq;
                    true
                } else {
                    false
                }
            };
            let mut window = 0usize;
            for t in 0..config.burn_in {
                window += mh(&mut x, &mut lp, step, &mut rng) as usize;
                if (t + 1) % ADAPT_WINDOW == 0 {
                    let rate = window as f64 / ADAPT_WINDOW as f64;
                    if rate > 0.40 {
                        step *= 1.2;
                    } else if rate < 0.30 {
                        step /= 1.2;
                    }
                    window = 0;
                }
            }
            let mut kept = Vec::with_capacity(config.samples_per_chain);
            let mut accepted = 0usize;
            for _ in 0..config.samples_per_chain {
                for _ in 0..config.thin {
                    accepted += mh(&mut x, &mut lp, step, &mut rng) as usize;
                }
                let (perm, signs) = &weyl[rng.gen_range(0..weyl.len())];
                kept.push((0..n).map(|i| signs[i] * x[perm[i]]).collect());
            }
            let total = (config.samples_per_chain * config.thin).max(1);
            (kept, accepted as f64 / total as f64, step)
        })
        .collect();
    let mut out = SampleSet { configurations: Vec::new(), acceptance: Vec::new(), step_sizes: Vec::new(), warnings: Vec::new() };
    for (c, (kept, acc, step)) in chains.into_iter().enumerate() {
        if !(0.05..=0.95).contains(&acc) {
            out.warnings.push(format!("chain {c}: acceptance rate {acc:.3} outside [0.05, 0.95]"));
        }
        out.configurations.extend(kept);
        out.acceptance.push(acc);
        out.step_sizes.push(step);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub critical: f64,
    pub level: f64,
    pub pass: bool,
    pub edges: Vec<f64>,
    pub observed: Vec<u64>,
    pub expected: Vec<f64>,
}

/// Pearson chi-square test of `points` against the one-point density, with
/// `bins` bins of nearly equal expected mass computed by quadrature.
pub fn chi_square_one_point(model: &KernelModel, points: &[f64], bins: usize, level: f64) -> Result<ChiSquareTest> {
    if bins < 2 || points.is_empty() {
        return Err(Error::Config("need at least two bins and one sample".into()));
    }
    let (p, r) = model.growth();
    let half = model
        .measure
        .envelope_cutoff(2 * p, 2.0 * r, 40.0)
        .ok_or_else(|| Error::Divergence("reference measure is not integrable".into()))?;
    let cells = 4000;
    let h = 2.0 * half / cells as f64;
    let gl = gauss_legendre(8);
    let mass: Vec<f64> = (0..cells)
        .map(|k| {
            let c = -half + (k as f64 + 0.5) * h;
            gl.nodes.iter().zip(&gl.weights).map(|(t, w)| 0.5 * h * w * model.one_point_density(c + 0.5 * h * t)).sum()
        })
        .collect();
    let total: f64 = mass.iter().sum();
    let mut edges = vec![f64::NEG_INFINITY];
    let mut probs = Vec::with_capacity(bins);
    let mut acc = 0.0;
    for (k, m) in mass.iter().enumerate() {
        acc += m / total;
        if acc >= 1.0 / bins as f64 && probs.len() + 1 < bins {
            edges.push(-half + (k + 1) as f64 * h);
            probs.push(acc);
            acc = 0.0;
        }
    }
    probs.push(acc);
    edges.push(f64::INFINITY);
    let count = points.len() as f64;
    let mut observed = vec![0u64; probs.len()];
    for &x in points {
        let b = edges.partition_point(|&e| e <= x).saturating_sub(1).min(probs.len() - 1);
        observed[b] += 1;
    }
    let expected: Vec<f64> = probs.iter().map(|p| p * count).collect();
    let statistic: f64 = observed.iter().zip(&expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum();
    let dof = probs.len() - 1;
    let critical = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Domain(e.to_string()))?
        .inverse_cdf(1.0 - level);
    Ok(ChiSquareTest { statistic, dof, critical, level, pass: statistic <= critical, edges, observed, expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::build_root_system;

    fn model(f: Family, n: usize) -> KernelModel {
        let p = SWProblem::new(build_root_system(f, n).unwrap(), RealWeight::gaussian()).unwrap();
        build_default_kernel(&p).unwrap()
    }

    #[test]
    fn rank_one_kernel_is_constant() {
        let m = model(Family::A, 1);
        assert!((m.kernel(0.3, -1.2) - 1.0 / m.pairing[(0, 0)]).abs() < 1e-15);
    }

    #[test]
    fn repeated_points_vanish() {
        let m = model(Family::C, 2);
        assert!(m.correlation(&[0.7, 0.7]).unwrap().value.abs() < 1e-12);
        assert!(m.correlation(&[0.1, 0.2, 0.3]).unwrap().beyond_rank);
    }

    #[test]
    fn biorthogonal_bases_diagonalize() {
        let w = RealWeight::gaussian();
        let (p, q) = biorthogonal_bases(&w, Family::B, 3).unwrap();
        let m = pairing_matrix(&w, Family::B, 3, &p, &q).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(m[(i, j)].abs() < 1e-10 * m[(i, i)].abs().max(m[(j, j)].abs()));
                }
            }
        }
    }
}
