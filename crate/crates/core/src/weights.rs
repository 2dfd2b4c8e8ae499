//! Weight measures on the real line (with generalized moments
//! `M_{i,j} = int x^i e^{j x} w(x) dx`) and on the unit circle (by Fourier
//! coefficients).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracles::{gauss_hermite, gauss_legendre, integrate_with_breakpoints, GaussRule, QuadTolerance};
use crate::roots::Family;

/// Bound `w(x) <= exp(ln_const + linear |x| - quadratic x^2)` on `[-support, support]`,
/// and `w = 0` outside when `support` is finite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub ln_const: f64,
    pub linear: f64,
    pub quadratic: f64,
    pub support: f64,
}

impl Envelope {
    /// Half-width beyond which `|x|^i e^{|j x|}` times the envelope is below
    /// `e^{-margin}`. `None` when that never happens.
    fn cutoff(&self, i: usize, j: f64, margin: f64) -> Option<f64> {
        if self.support.is_finite() {
            return Some(self.support);
        }
        if self.quadratic <= 0.0 {
            return None;
        }
        let mut l = 1.0f64;
        while self.ln_const + (self.linear + j.abs()) * l + i as f64 * l.ln() - self.quadratic * l * l > -margin {
            l *= 1.25;
        }
        Some(l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    Gaussian,
    Quartic,
    Table,
    Derived,
}

/// A weight `w(x)` on the real line. Cheap to clone.
#[derive(Clone)]
pub struct RealWeight {
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub kind: WeightKind,
    pub symmetric: bool,
    pub envelope: Envelope,
    /// Knots of a piecewise definition, used as quadrature breakpoints.
    pub knots: Vec<f64>,
    label: String,
}

impl fmt::Debug for RealWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealWeight")
            .field("label", &self.label)
            .field("kind", &self.kind)
            .field("symmetric", &self.symmetric)
            .finish()
    }
}

fn silent_tol() -> QuadTolerance {
    QuadTolerance { abs: 1e-300, rel: 1e-13, max_intervals: 4000 }
}

impl RealWeight {
    /// Standard normal density `e^{-x^2/2}/sqrt(2 pi)`.
    pub fn gaussian() -> Self {
        let c = -0.5 * std::f64::consts::TAU.ln();
        RealWeight {
            density: Arc::new(move |x| (c - 0.5 * x * x).exp()),
            kind: WeightKind::Gaussian,
            symmetric: true,
            envelope: Envelope { ln_const: c, linear: 0.0, quadratic: 0.5, support: f64::INFINITY },
            knots: Vec::new(),
            label: "gaussian".into(),
        }
    }

    /// `e^{-x^4/4}` normalized to unit mass by quadrature.
    pub fn quartic() -> Self {
        let raw = |x: f64| (-0.25 * x.powi(4)).exp();
        let mass = integrate_with_breakpoints(raw, &[-12.0, -3.0, 0.0, 3.0, 12.0], silent_tol())
            .expect("quartic normalization")
            .real();
        let ln_mass = mass.ln();
        RealWeight {
            density: Arc::new(move |x| (-0.25 * x.powi(4) - ln_mass).exp()),
            kind: WeightKind::Quartic,
            symmetric: true,
            // x^4/4 >= x^2 - 1.
            envelope: Envelope { ln_const: 1.0 - ln_mass, linear: 0.0, quadratic: 1.0, support: f64::INFINITY },
            knots: Vec::new(),
            label: "quartic".into(),
        }
    }

    /// Piecewise-linear weight through `(x_k, w_k)`, zero outside the table.
    pub fn table(xs: Vec<f64>, ws: Vec<f64>) -> Result<Self> {
        if xs.len() != ws.len() {
            return Err(Error::DimensionMismatch { expected: xs.len(), got: ws.len() });
        }
        if xs.len() < 2 || xs.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::Config("table abscissae must be strictly increasing, at least two".into()));
        }
        if ws.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::Config("table weights must be finite and nonnegative".into()));
        }
        let support = xs[0].abs().max(xs[xs.len() - 1].abs());
        let symmetric = xs.len() == ws.len()
            && xs.iter().zip(xs.iter().rev()).all(|(a, b)| (a + b).abs() <= 1e-12 * support)
            && ws.iter().zip(ws.iter().rev()).all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
        let peak = ws.iter().cloned().fold(0.0, f64::max);
        let (tx, tw) = (xs.clone(), ws);
        let density = move |x: f64| {
            if x < tx[0] || x > tx[tx.len() - 1] {
                return 0.0;
            }
            let k = tx.partition_point(|&t| t <= x).clamp(1, tx.len() - 1);
            let (x0, x1) = (tx[k - 1], tx[k]);
            let s = (x - x0) / (x1 - x0);
            tw[k - 1] * (1.0 - s) + tw[k] * s
        };
        Ok(RealWeight {
            density: Arc::new(density),
            kind: WeightKind::Table,
            symmetric,
            envelope: Envelope { ln_const: peak.max(f64::MIN_POSITIVE).ln(), linear: 0.0, quadratic: 0.0, support },
            knots: xs,
            label: "table".into(),
        })
    }

    /// Half-width beyond which `|x|^power e^{rate |x|} w(x)` is below `e^{-margin}`.
    pub fn envelope_cutoff(&self, power: usize, rate: f64, margin: f64) -> Option<f64> {
        self.envelope.cutoff(power, rate, margin)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    fn breakpoints(&self, half_width: f64) -> Vec<f64> {
        let mut pts: Vec<f64> = self.knots.iter().copied().filter(|x| x.abs() < half_width).collect();
        let pieces = 32;
        for k in 0..=pieces {
            pts.push(-half_width + 2.0 * half_width * k as f64 / pieces as f64);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// `int g(x) w(x) dx` by adaptive quadrature over the envelope window.
    pub fn integrate(&self, g: impl Fn(f64) -> f64, growth_power: usize, growth_rate: f64) -> Result<f64> {
        let l = self
            .envelope
            .cutoff(growth_power, growth_rate, 745.0)
            .ok_or_else(|| Error::Divergence("weight envelope does not dominate the integrand".into()))?;
        let w = &self.density;
        let r = integrate_with_breakpoints(|x| g(x) * w(x), &self.breakpoints(l), silent_tol())?;
        Ok(r.real())
    }

    /// Generalized moment `M_{i,j} = int x^i e^{j x} w(x) dx`.
    pub fn moment(&self, i: usize, j: f64) -> Result<f64> {
        if self.kind == WeightKind::Gaussian {
            return Ok(gaussian_moment(i, j));
        }
        self.quadrature_moment(i, j)
    }

    /// The moment by adaptive quadrature regardless of any closed form.
    pub fn quadrature_moment(&self, i: usize, j: f64) -> Result<f64> {
        self.integrate(|x| x.powi(i as i32) * (j * x).exp(), i, j)
    }

    /// Gauss rule with `order` nodes for the measure `w(x) dx`.
    pub fn gauss_rule(&self, order: usize) -> Result<GaussRule> {
        if self.kind == WeightKind::Gaussian {
            return Ok(gauss_hermite(order));
        }
        let l = self
            .envelope
            .cutoff(2 * order, 0.0, 90.0)
            .ok_or_else(|| Error::Divergence("weight envelope is not integrable".into()))?;
        let panel = gauss_legendre(48);
        let bps = self.breakpoints(l);
        let mut pts = Vec::new();
        let mut masses = Vec::new();
        for seg in bps.windows(2) {
            let (c, h) = (0.5 * (seg[0] + seg[1]), 0.5 * (seg[1] - seg[0]));
            for (x, w) in panel.nodes.iter().zip(&panel.weights) {
                let t = c + h * x;
                let d = self.density(t);
                if d > 0.0 {
                    pts.push(t);
                    masses.push(h * w * d);
                }
            }
        }
        GaussRule::from_discrete_measure(&pts, &masses, order)
    }

    /// Multiply by an explicit positive factor with the given envelope growth.
    fn derived(&self, factor: impl Fn(f64) -> f64 + Send + Sync + 'static, linear: f64, symmetric: bool, label: String) -> Self {
        let base = self.density.clone();
        RealWeight {
            density: Arc::new(move |x| factor(x) * base(x)),
            kind: WeightKind::Derived,
            symmetric,
            envelope: Envelope { linear: self.envelope.linear + linear, ..self.envelope },
            knots: self.knots.clone(),
            label,
        }
    }
}

/// `int x^i e^{j x} dN(0,1) = e^{j^2/2} E[(Y + j)^i]`.
pub fn gaussian_moment(i: usize, j: f64) -> f64 {
    // E[Y^k] for even k is (k-1)!!.
    let mut sum = 0.0;
    let mut binom = 1.0;
    let mut even_moment = 1.0;
    for k in 0..=i {
        if k > 0 {
            binom *= (i - k + 1) as f64 / k as f64;
        }
        if k % 2 == 0 {
            if k > 0 {
                even_moment *= (k - 1) as f64;
            }
            sum += binom * j.powi((i - k) as i32) * even_moment;
        }
    }
    (0.5 * j * j).exp() * sum
}

/// Average of the `i`-th monic Hermite polynomial against `e^{j x} dN(0,1)`:
/// `e^{j^2/2} j^i`.
pub fn hermite_moment(i: usize, j: f64) -> f64 {
    (0.5 * j * j).exp() * j.powi(i as i32)
}

/// The measures entering the biorthogonal form of the SW determinant:
/// A: `e^{-(n-1)x/2} w`, B: `x sinh(x/2) w`, C: `2 x sinh(x) w`, D: `w`.
pub fn derived_measure(weight: &RealWeight, family: Family, n: usize) -> Result<RealWeight> {
    if family != Family::A && !weight.symmetric {
        return Err(Error::SymmetryViolation);
    }
    let label = format!("{}-measure[{}]", family, weight.label());
    Ok(match family {
        Family::A => {
            let tilt = -0.5 * (n as f64 - 1.0);
            weight.derived(move |x| (tilt * x).exp(), tilt.abs(), n == 1 && weight.symmetric, label)
        }
        Family::B => weight.derived(|x| x * (0.5 * x).sinh(), 1.0, true, label),
        Family::C => weight.derived(|x| 2.0 * x * x.sinh(), 2.0, true, label),
        Family::D => RealWeight { label, ..weight.clone() },
    })
}

/// A weight on the unit circle given by its Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub enum FourierWeight {
    Finite { coeffs: BTreeMap<i64, Complex64> },
    /// `w_k = amplitude * ratio^{|k|}`, `0 <= ratio < 1`.
    Geometric { amplitude: f64, ratio: f64 },
}

impl FourierWeight {
    pub fn constant(c: f64) -> Self {
        FourierWeight::Finite { coeffs: BTreeMap::from([(0, Complex64::new(c, 0.0))]) }
    }

    pub fn finite(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, c)| *c != Complex64::new(0.0, 0.0)).collect();
        FourierWeight::Finite { coeffs }
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        match self {
            FourierWeight::Finite { coeffs } => coeffs.get(&k).copied().unwrap_or_default(),
            FourierWeight::Geometric { amplitude, ratio } => {
                Complex64::new(amplitude * ratio.powi(k.unsigned_abs() as i32), 0.0)
            }
        }
    }

    pub fn symmetric(&self) -> bool {
        match self {
            FourierWeight::Finite { coeffs } => coeffs.iter().all(|(k, c)| {
                let d = self.coefficient(-k) - c;
                d.norm() <= 1e-14 * c.norm()
            }),
            FourierWeight::Geometric { .. } => true,
        }
    }

    /// `|k|` beyond which every coefficient is below `tol` in magnitude.
    pub fn bandwidth(&self, tol: f64) -> i64 {
        match self {
            FourierWeight::Finite { coeffs } => coeffs.keys().map(|k| k.abs()).max().unwrap_or(0),
            FourierWeight::Geometric { amplitude, ratio } => {
                if *ratio == 0.0 || *amplitude == 0.0 {
                    0
                } else {
                    ((tol / amplitude.abs()).ln() / ratio.ln()).ceil().max(0.0) as i64
                }
            }
        }
    }

    /// `|z|` range on which the Fourier series converges.
    pub fn annulus(&self) -> (f64, f64) {
        match self {
            FourierWeight::Finite { .. } => (0.0, f64::INFINITY),
            FourierWeight::Geometric { ratio, .. } => (*ratio, if *ratio == 0.0 { f64::INFINITY } else { 1.0 / ratio }),
        }
    }
}

/// `sum_k w_k z^k`, truncated once the remaining terms are below `1e-17` relative.
pub fn fourier_eval(weight: &FourierWeight, z: Complex64) -> Result<Complex64> {
    let (lo, hi) = weight.annulus();
    let r = z.norm();
    if !(r > lo && r < hi) {
        return Err(Error::Domain(format!("|z| = {r} outside the convergence annulus ({lo}, {hi})")));
    }
    match weight {
        FourierWeight::Finite { coeffs } => Ok(coeffs.iter().map(|(k, c)| c * z.powi(*k as i32)).sum()),
        FourierWeight::Geometric { amplitude, ratio } => {
            let mut sum = Complex64::new(*amplitude, 0.0);
            let (mut up, mut down) = (Complex64::new(*amplitude, 0.0), Complex64::new(*amplitude, 0.0));
            let zi = 1.0 / z;
            for _ in 1..100_000 {
                up *= ratio * z;
                down *= ratio * zi;
                sum += up + down;
                if up.norm() + down.norm() <= 1e-17 * sum.norm() {
                    return Ok(sum);
                }
            }
            Err(Error::NonConvergence("Fourier series of the weight".into()))
        }
    }
}

/// Serializable weight description used by configuration files and the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Gaussian {},
    Quartic {},
    Table { x: Vec<f64>, w: Vec<f64> },
    /// Fourier coefficients keyed by the integer index, values `[re, im]`.
    Fourier { coeffs: BTreeMap<String, [f64; 2]> },
    Geometric {
        ratio: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl WeightSpec {
    pub fn real_weight(&self) -> Result<RealWeight> {
        match self {
            WeightSpec::Gaussian {} => Ok(RealWeight::gaussian()),
            WeightSpec::Quartic {} => Ok(RealWeight::quartic()),
            WeightSpec::Table { x, w } => RealWeight::table(x.clone(), w.clone()),
            _ => Err(Error::Config("expected a weight on the real line".into())),
        }
    }

    pub fn fourier_weight(&self) -> Result<FourierWeight> {
        match self {
            WeightSpec::Fourier { coeffs } => {
                let mut out = BTreeMap::new();
                for (k, [re, im]) in coeffs {
                    let k: i64 = k
                        .trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("Fourier index {k:?} is not an integer")))?;
                    out.insert(k, Complex64::new(*re, *im));
                }
                Ok(FourierWeight::finite(out))
            }
            WeightSpec::Geometric { ratio, amplitude } => {
                if !(0.0..1.0).contains(ratio) {
                    return Err(Error::Config(format!("geometric ratio {ratio} must lie in [0, 1)")));
                }
                Ok(FourierWeight::Geometric { amplitude: *amplitude, ratio: *ratio })
            }
            _ => Err(Error::Config("expected a weight on the circle".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments_closed_form() {
        let g = RealWeight::gaussian();
        assert_eq!(g.moment(0, 0.0).unwrap(), 1.0);
        assert!((g.moment(0, 1.5).unwrap() - (1.125f64).exp()).abs() < 1e-14);
        assert!((g.moment(1, 0.5).unwrap() - (0.125f64).exp() / 2.0).abs() < 1e-15);
        assert_eq!(g.moment(3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_quadrature_matches_closed_form() {
        let g = RealWeight::gaussian();
        for i in 0..6 {
            for &j in &[-1.5, 0.5, 2.0] {
                let exact = g.moment(i, j).unwrap();
                let quad = g.quadrature_moment(i, j).unwrap();
                assert!((exact - quad).abs() < 1e-11 * exact.abs().max(1.0), "i={i} j={j}");
            }
        }
    }

    #[test]
    fn quartic_is_normalized_and_symmetric() {
        let w = RealWeight::quartic();
        assert!((w.moment(0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let (a, b) = (w.moment(3, 0.7).unwrap(), w.moment(3, -0.7).unwrap());
        assert!((a + b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn table_weight_moments() {
        // Hat function on [-1, 1]: mass 1, second moment 1/6.
        let w = RealWeight::table(vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert!(w.symmetric);
        assert!((w.moment(0, 0.0).unwrap() - 1.0).abs() < 1e-13);
        assert!((w.moment(2, 0.0).unwrap() - 1.0 / 6.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_rule_for_quartic() {
        let w = RealWeight::quartic();
        let rule = w.gauss_rule(10).unwrap();
        let m4 = w.moment(4, 0.0).unwrap();
        assert!((rule.integrate(|x| x.powi(4)) - m4).abs() < 1e-12);
    }

    #[test]
    fn derived_measures() {
        let g = RealWeight::gaussian();
        let b = derived_measure(&g, Family::B, 2).unwrap();
        assert_eq!(b.density(0.0), 0.0);
        let c = derived_measure(&g, Family::C, 2).unwrap();
        assert_eq!(c.density(0.8), c.density(-0.8));
        let d = derived_measure(&g, Family::D, 2).unwrap();
        assert_eq!(d.density(0.4), g.density(0.4));
        let skew = RealWeight::table(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(derived_measure(&skew, Family::C, 1).unwrap_err(), Error::SymmetryViolation);
    }

    #[test]
    fn fourier_evaluation() {
        let cos = FourierWeight::finite([(1, Complex64::new(0.5, 0.0)), (-1, Complex64::new(0.5, 0.0))]);
        let z = Complex64::from_polar(1.0, 0.7);
        assert!((fourier_eval(&cos, z).unwrap() - 0.7f64.cos()).norm() < 1e-15);
        let geo = FourierWeight::Geometric { amplitude: 1.0, ratio: 0.5 };
        assert!((fourier_eval(&geo, Complex64::new(1.0, 0.0)).unwrap() - 3.0).norm() < 1e-14);
        assert!(fourier_eval(&geo, Complex64::new(3.0, 0.0)).is_err());
    }

    #[test]
    fn spec_parsing() {
        let s: WeightSpec = serde_json::from_str(r#"{"kind":"fourier","coeffs":{"0":[1,0],"1":[0.5,0],"-1":[0.5,0]}}"#).unwrap();
        let w = s.fourier_weight().unwrap();
        assert!(w.symmetric());
        assert_eq!(w.coefficient(-1), Complex64::new(0.5, 0.0));
        assert!(serde_json::from_str::<WeightSpec>(r#"{"kind":"bogus"}"#).is_err());
    }
}
