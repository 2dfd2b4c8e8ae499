//! Classical root systems of types A, B, C and D.
//!
//! Roots are dense integer vectors in the basis `e_1, ..., e_n`. For family A the
//! rank parameter is the number of variables, so `build_root_system(A, n)` is
//! `A_{n-1}`.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::A, Family::B, Family::C, Family::D];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::A => "A",
            Family::B => "B",
            Family::C => "C",
            Family::D => "D",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "A" | "a" => Ok(Family::A),
            "B" | "b" => Ok(Family::B),
            "C" | "c" => Ok(Family::C),
            "D" | "d" => Ok(Family::D),
            other => Err(Error::Config(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub positive_roots: Vec<Vec<i32>>,
    pub weyl_order: u64,
    /// Twice the Weyl vector, so that every entry is an integer.
    pub weyl_vector_doubled: Vec<i64>,
    pub dim_g: u64,
    pub dual_coxeter: u64,
}

fn unit(n: usize, i: usize, c: i32) -> Vec<i32> {
    let mut v = vec![0; n];
    v[i] = c;
    v
}

fn pair(n: usize, i: usize, j: usize, sign: i32) -> Vec<i32> {
    let mut v = vec![0; n];
    v[i] = 1;
    v[j] = sign;
    v
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn build_root_system(family: Family, n: usize) -> Result<RootSystem> {
    if n == 0 {
        return Err(Error::InvalidRank { family, rank: n });
    }
    let mut roots = Vec::new();
    match family {
        Family::A => {
            for i in 0..n {
                for j in i + 1..n {
                    roots.push(pair(n, i, j, -1));
                }
            }
        }
        Family::B | Family::C | Family::D => {
            for i in 0..n {
                for j in i + 1..n {
                    roots.push(pair(n, i, j, -1));
                    roots.push(pair(n, i, j, 1));
                }
            }
            match family {
                Family::B => (0..n).for_each(|i| roots.push(unit(n, i, 1))),
                Family::C => (0..n).for_each(|i| roots.push(unit(n, i, 2))),
                _ => {}
            }
        }
    }
    let nn = n as u64;
    let (weyl_order, dim_g, dual_coxeter) = match family {
        Family::A => (factorial(n), nn * nn - 1, nn),
        Family::B => ((1u64 << n) * factorial(n), nn * (2 * nn + 1), 2 * nn - 1),
        Family::C => ((1u64 << n) * factorial(n), nn * (2 * nn + 1), nn + 1),
        Family::D => ((1u64 << (n - 1)) * factorial(n), nn * (2 * nn - 1), (2 * nn).saturating_sub(2)),
    };
    let weyl_vector_doubled = (0..n)
        .map(|i| roots.iter().map(|r| r[i] as i64).sum())
        .collect();
    Ok(RootSystem {
        family,
        rank: n,
        positive_roots: roots,
        weyl_order,
        weyl_vector_doubled,
        dim_g,
        dual_coxeter,
    })
}

impl RootSystem {
    pub fn weyl_vector(&self) -> Vec<f64> {
        self.weyl_vector_doubled.iter().map(|&v| v as f64 / 2.0).collect()
    }

    /// `12 <rho, rho>` as an exact integer, in the invariant form of the family
    /// normalized so that the long roots `e_i +- e_j` (A, B, D) or `2 e_i` (C)
    /// have squared length 2: the Euclidean form of the `e_i` coordinates for
    /// A, B, D and half of it for C.
    pub fn twelve_rho_squared(&self) -> i64 {
        let e = self.twelve_rho_squared_euclidean();
        match self.family {
            Family::C => e / 2,
            _ => e,
        }
    }

    /// `12 rho . rho` in the Euclidean form of the `e_i` coordinates.
    pub fn twelve_rho_squared_euclidean(&self) -> i64 {
        3 * self.weyl_vector_doubled.iter().map(|v| v * v).sum::<i64>()
    }

    /// Number of roots, positive and negative.
    pub fn root_count(&self) -> usize {
        2 * self.positive_roots.len()
    }

    /// Rank of the Lie algebra (one less than the number of variables for A).
    pub fn lie_rank(&self) -> usize {
        match self.family {
            Family::A => self.rank - 1,
            _ => self.rank,
        }
    }

    /// The full Weyl group action on coordinate vectors: permutations, combined
    /// with sign flips for B and C, and even sign flips for D.
    pub fn weyl_group_elements(&self) -> Vec<(Vec<usize>, Vec<f64>)> {
        let n = self.rank;
        let perms = permutations(n);
        let signs: Vec<Vec<f64>> = match self.family {
            Family::A => vec![vec![1.0; n]],
            _ => (0..1u32 << n)
                .filter(|mask| self.family != Family::D || mask.count_ones() % 2 == 0)
                .map(|mask| (0..n).map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 }).collect())
                .collect(),
        };
        let mut out = Vec::with_capacity(perms.len() * signs.len());
        for p in &perms {
            for s in &signs {
                out.push((p.clone(), s.clone()));
            }
        }
        out
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

pub trait RootScalar: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl RootScalar for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl RootScalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
}

/// The linear form `alpha(x) = sum_i c_i x_i`.
pub fn root_value<T: RootScalar>(root: &[i32], x: &[T]) -> Result<T> {
    if root.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: root.len(), got: x.len() });
    }
    Ok(root
        .iter()
        .zip(x)
        .filter(|(c, _)| **c != 0)
        .fold(T::zero(), |acc, (&c, &xi)| acc + xi * c as f64))
}

/// Multiplicative counterpart `x^alpha = prod_i x_i^{c_i}` for integer coefficients.
pub fn root_monomial(root: &[i32], x: &[Complex64]) -> Result<Complex64> {
    if root.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: root.len(), got: x.len() });
    }
    Ok(root
        .iter()
        .zip(x)
        .fold(Complex64::new(1.0, 0.0), |acc, (&c, &xi)| acc * xi.powi(c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let a2 = build_root_system(Family::A, 2).unwrap();
        assert_eq!(a2.positive_roots, vec![vec![1, -1]]);
        assert_eq!(a2.weyl_order, 2);
        assert_eq!(a2.weyl_vector(), vec![0.5, -0.5]);

        let d1 = build_root_system(Family::D, 1).unwrap();
        assert!(d1.positive_roots.is_empty());
        assert_eq!(d1.weyl_order, 1);
        assert_eq!(d1.weyl_vector(), vec![0.0]);

        let b2 = build_root_system(Family::B, 2).unwrap();
        assert_eq!(b2.positive_roots.len(), 4);
        assert_eq!(b2.weyl_order, 8);
        assert_eq!(b2.weyl_vector(), vec![1.5, 0.5]);
    }

    #[test]
    fn rank_zero_rejected() {
        for f in Family::ALL {
            assert_eq!(build_root_system(f, 0), Err(Error::InvalidRank { family: f, rank: 0 }));
        }
    }

    #[test]
    fn root_values() {
        assert_eq!(root_value(&[1, -1], &[3.0, 1.0]).unwrap(), 2.0);
        assert_eq!(root_value(&[2], &[0.5]).unwrap(), 1.0);
        assert_eq!(root_value(&[1, 1], &[1.0, -1.0]).unwrap(), 0.0);
        assert!(root_value(&[1, 1], &[1.0]).is_err());
    }

    #[test]
    fn weyl_group_orders() {
        for f in Family::ALL {
            for n in 1..=4 {
                let rs = build_root_system(f, n).unwrap();
                assert_eq!(rs.weyl_group_elements().len() as u64, rs.weyl_order, "{f}{n}");
            }
        }
    }
}
