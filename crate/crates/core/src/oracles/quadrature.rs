use num_complex::Complex64;

use super::{IntegrationResult, Method};
use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Relative to `int |f|`, no segment error below this is meaningful.
const ROUNDOFF: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadTolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for QuadTolerance {
    fn default() -> Self {
        QuadTolerance { abs: 1e-15, rel: 1e-12, max_intervals: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Kronrod estimate of `int |f|`, which sets the round-off floor.
    magnitude: f64,
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    let mut mag = WGK[7] * fc.abs();
    for i in 0..7 {
        let x = h * XGK[i];
        let (fl, fr) = (f(c - x), f(c + x));
        let s = fl + fr;
        k += WGK[i] * s;
        mag += WGK[i] * (fl.abs() + fr.abs());
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    Segment { a, b, value: k * h, error: ((k - g) * h).abs(), magnitude: (mag * h).abs() }
}

/// Adaptive Gauss-Kronrod 7/15 on `[a, b]`, bisecting the worst segment.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: QuadTolerance) -> Result<IntegrationResult> {
    integrate_with_breakpoints(f, &[a, b], tol)
}

/// As [`integrate`], with the initial segments given by sorted `points`.
pub fn integrate_with_breakpoints(
    f: impl Fn(f64) -> f64,
    points: &[f64],
    tol: QuadTolerance,
) -> Result<IntegrationResult> {
    if points.len() < 2 {
        return Err(Error::Domain("need at least two breakpoints".into()));
    }
    let mut segs: Vec<Segment> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();
    let mut evals = 15 * segs.len() as u64;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let magnitude: f64 = segs.iter().map(|s| s.magnitude).sum();
        if err <= tol.abs.max(tol.rel * total.abs()).max(ROUNDOFF * magnitude) {
            return Ok(IntegrationResult {
                value: Complex64::new(total, 0.0),
                error_estimate: err,
                evaluations: evals,
                method: Method::GaussKronrod,
            });
        }
        if segs.len() >= tol.max_intervals {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature: error {err:e} after {} segments",
                segs.len()
            )));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if !(mid > s.a && mid < s.b) {
            // Segment can no longer be split; accept its error.
            segs.push(Segment { error: 0.0, ..s });
            continue;
        }
        segs.push(kronrod(&f, s.a, mid));
        segs.push(kronrod(&f, mid, s.b));
        evals += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_exactness() {
        // K15 integrates degree 22 exactly, the embedded G7 degree 13.
        for deg in 0..=22 {
            let r = kronrod(&|x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((r.value - exact).abs() < 1e-15, "deg {deg}");
            if deg <= 13 {
                assert!(r.error < 1e-15, "gauss deg {deg}");
            }
        }
    }

    #[test]
    fn adaptive_gaussian() {
        let r = integrate(|x| (-x * x / 2.0).exp(), -12.0, 12.0, QuadTolerance::default()).unwrap();
        assert!((r.real() - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);
        let kink = integrate_with_breakpoints(|x: f64| x.abs(), &[-1.0, 0.0, 2.0], QuadTolerance::default())
            .unwrap();
        assert!((kink.real() - 2.5).abs() < 1e-14);
    }
}
