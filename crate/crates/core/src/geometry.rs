//! Exact L1 geometry shared by every engine: norms, cross-polytope volume,
//! membership and the canonical form of a pair of L1-balls.

use std::ops::Index;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{factorial, int, pow, Rational};

/// A point of `Q^n`, `n >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vector(Vec<Rational>);

impl Vector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInstance("vector must have dimension >= 1".into()));
        }
        Ok(Self(coords))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![Rational::zero(); n])
    }

    /// Unit vector `e_i` scaled by `scale`.
    pub fn axis(n: usize, i: usize, scale: Rational) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = scale;
        v
    }

    pub fn from_i64(coords: &[i64]) -> Result<Self> {
        Self::new(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn checked_sub(&self, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    pub fn scaled(&self, factor: &Rational) -> Vector {
        Vector(self.0.iter().map(|x| x * factor).collect())
    }
}

impl Index<usize> for Vector {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// The L1-ball `{x : |x - center|_1 <= radius}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossPolytope {
    center: Vector,
    radius: Rational,
}

impl CrossPolytope {
    pub fn new(center: Vector, radius: Rational) -> Result<Self> {
        if radius.is_negative() {
            return Err(Error::InvalidInstance("radius must be nonnegative".into()));
        }
        Ok(Self { center, radius })
    }

    /// `C(0, radius)` in dimension `n`.
    pub fn centered(n: usize, radius: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInstance("dimension must be >= 1".into()));
        }
        Self::new(Vector::zeros(n), radius)
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> &Rational {
        &self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn volume(&self) -> Rational {
        cross_polytope_volume(self.dim(), &self.radius)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn l1_norm(v: &Vector) -> Rational {
    v.0.iter().map(|x| x.abs()).sum()
}

/// `2^n r^n / n!`.
pub fn cross_polytope_volume(n: usize, r: &Rational) -> Rational {
    let two_r = r * int(2);
    pow(&two_r, n) / Rational::from_integer(factorial(n))
}

pub fn contains(ball: &CrossPolytope, x: &Vector) -> Result<bool> {
    let diff = x.checked_sub(&ball.center)?;
    Ok(l1_norm(&diff) <= ball.radius)
}

/// Canonical form of a pair of balls.
///
/// `Vol(a ∩ b) = scale * Vol(C(0,1) ∩ C(center, radius))` where the offsets
/// are taken componentwise in absolute value, since L1-balls are symmetric
/// under coordinate reflections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedPair {
    pub center: Vector,
    pub radius: Rational,
    pub scale: Rational,
}

pub fn normalize_pair(first: &CrossPolytope, second: &CrossPolytope) -> Result<NormalizedPair> {
    check_dim(first.dim(), second.dim())?;
    if first.radius.is_zero() || second.radius.is_zero() {
        return Err(Error::InvalidInstance("normalize_pair needs positive radii".into()));
    }
    let r1 = &first.radius;
    let center = first
        .center
        .0
        .iter()
        .zip(&second.center.0)
        .map(|(a, b)| (a - b).abs() / r1)
        .collect();
    Ok(NormalizedPair {
        center: Vector(center),
        radius: &second.radius / r1,
        scale: pow(r1, first.dim()),
    })
}
