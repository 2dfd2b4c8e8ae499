use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use num_complex::Complex64;

use super::{IntegrationResult, Method};
use crate::error::{Error, Result};

/// Samples per RNG stream. Chunk `c` always draws from stream `c` of the
/// master seed, so the estimate does not depend on the thread count.
pub const MC_CHUNK: usize = 1 << 16;

/// Isotropic normal proposal `N(center, scale^2 I)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSampler {
    pub center: Vec<f64>,
    pub scale: f64,
}

impl GaussianSampler {
    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn ln_pdf(&self, x: &[f64]) -> f64 {
        let n = self.dim() as f64;
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        -0.5 * r2 / (self.scale * self.scale)
            - n * (self.scale.ln() + 0.5 * (std::f64::consts::TAU).ln())
    }

    pub fn pdf(&self, x: &[f64]) -> f64 {
        self.ln_pdf(x).exp()
    }

    fn draw(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.center) {
            let z: f64 = StandardNormal.sample(rng);
            *o = c + self.scale * z;
        }
    }
}

fn pairwise(v: &[(f64, f64)]) -> (f64, f64) {
    match v.len() {
        0 => (0.0, 0.0),
        1 => v[0],
        len => {
            let (a, b) = v.split_at(len / 2);
            let (x, y) = (pairwise(a), pairwise(b));
            (x.0 + y.0, x.1 + y.1)
        }
    }
}

/// Importance-sampling estimate of `int f(x) dx` over R^n with proposals from
/// `sampler`. The error estimate is the 3-sigma half-width.
pub fn monte_carlo(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    sampler: &GaussianSampler,
    samples: usize,
    seed: u64,
) -> Result<IntegrationResult> {
    if samples == 0 {
        return Err(Error::Domain("Monte Carlo needs at least one sample".into()));
    }
    let n = sampler.dim();
    let chunks = samples.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = MC_CHUNK.min(samples - c * MC_CHUNK);
            let mut x = vec![0.0; n];
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..len {
                sampler.draw(&mut rng, &mut x);
                let v = f(&x) / sampler.pdf(&x);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = pairwise(&partial);
    let count = samples as f64;
    let mean = s / count;
    let var = (s2 / count - mean * mean).max(0.0) * count / (count - 1.0).max(1.0);
    if !mean.is_finite() || !var.is_finite() {
        return Err(Error::HeavyTail);
    }
    Ok(IntegrationResult {
        value: Complex64::new(mean, 0.0),
        error_estimate: 3.0 * (var / count).sqrt(),
        evaluations: samples as u64,
        method: Method::MonteCarlo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_the_proposal_density() {
        let sampler = GaussianSampler { center: vec![0.3, -0.2], scale: 1.5 };
        let r = monte_carlo(&|x| sampler.pdf(x), &sampler, 1000, 1).unwrap();
        assert!((r.real() - 1.0).abs() < 1e-12);
        assert!(r.error_estimate < 1e-6);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let sampler = GaussianSampler { center: vec![0.0], scale: 1.2 };
        let f = |x: &[f64]| (-x[0] * x[0]).exp();
        let a = monte_carlo(&f, &sampler, 200_000, 9).unwrap();
        let b = monte_carlo(&f, &sampler, 200_000, 9).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert!((a.real() - std::f64::consts::PI.sqrt()).abs() < a.error_estimate);
    }
}
