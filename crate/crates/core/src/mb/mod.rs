//! Mellin-Barnes SW integrals and their q-deformation: the single-contour
//! building blocks as [`PrefactorSeries`](crate::special::PrefactorSeries),
//! Wronskian and q-Casoratian closed forms, and residue-sum oracles of the
//! defining contour integrals.
//!
//! Index sets `I` are 0-based positions into the `a` list.

pub mod classical;
pub mod qdeformed;

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

/// Minimum distance of relevant parameter combinations from the integer lattice.
pub const GENERICITY_MARGIN: f64 = 1e-3;

/// Default box size of the residue oracles (per variable).
pub const DEFAULT_RESIDUE_BOX: usize = 40;

/// Parameters of a Mellin-Barnes SW integral.
#[derive(Clone, Debug, PartialEq)]
pub struct MBParams {
    pub a: Vec<C>,
    pub b: Vec<C>,
    /// Injective map `I`: variable `i` takes the contour around the poles of `a[index[i]]`.
    pub index: Vec<usize>,
    pub z: C,
}

impl MBParams {
    pub fn new(a: Vec<C>, b: Vec<C>, index: Vec<usize>, z: C) -> Result<Self> {
        let p = MBParams { a, b, index, z };
        p.validate()?;
        Ok(p)
    }

    pub fn rank(&self) -> usize {
        self.index.len()
    }

    pub fn selected(&self) -> Vec<C> {
        self.index.iter().map(|&i| self.a[i]).collect()
    }

    fn validate(&self) -> Result<()> {
        let (r, s) = (self.a.len(), self.b.len());
        if s > r {
            return Err(Error::Domain(format!("need s <= r, got r = {r}, s = {s}")));
        }
        if self.index.len() > r {
            return Err(Error::Domain(format!("rank {} exceeds r = {r}", self.index.len())));
        }
        for (k, &i) in self.index.iter().enumerate() {
            if i >= r {
                return Err(Error::Domain(format!("index {i} out of range for r = {r}")));
            }
            if self.index[..k].contains(&i) {
                return Err(Error::Domain(format!("index map is not injective: {i} repeats")));
            }
        }
        if !(self.z.norm() < 1.0) {
            return Err(Error::Domain(format!("|z| = {} must be below 1", self.z.norm())));
        }
        Ok(())
    }
}

/// Distance of `x` from the nearest integer.
pub(crate) fn lattice_distance(x: C) -> f64 {
    x.im.abs().max((x.re - x.re.round()).abs())
}

pub(crate) fn require_off_lattice(x: C, what: &str) -> Result<()> {
    if lattice_distance(x) < GENERICITY_MARGIN {
        return Err(Error::DegenerateParameters(format!("{what} = {x} is within {GENERICITY_MARGIN} of an integer")));
    }
    Ok(())
}

/// Genericity for the contours of type A (`symmetric = false`) or of the
/// `+-x` integrands of B, C, D (`symmetric = true`), in additive variables.
pub(crate) fn check_generic(a: &[C], b: &[C], symmetric: bool) -> Result<()> {
    for (i, &ai) in a.iter().enumerate() {
        for &aj in &a[i + 1..] {
            require_off_lattice(ai - aj, "a_i - a_j")?;
        }
        for &bj in b {
            require_off_lattice(ai - bj, "a_i - b_j")?;
        }
        if symmetric {
            for &aj in &a[i..] {
                require_off_lattice(ai + aj, "a_i + a_j")?;
            }
            for &bj in b {
                require_off_lattice(ai + bj, "a_i + b_j")?;
            }
        }
    }
    Ok(())
}

/// Elementary symmetric polynomials `e_0..e_k` of the entries.
pub(crate) fn elementary_symmetric(xs: &[C]) -> Vec<C> {
    let mut e = vec![C::new(1.0, 0.0)];
    for &x in xs {
        e.push(C::new(0.0, 0.0));
        for k in (1..e.len()).rev() {
            let prev = e[k - 1];
            e[k] += prev * x;
        }
    }
    e
}
