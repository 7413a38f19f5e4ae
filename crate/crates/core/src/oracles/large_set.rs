//! Counting sign vectors with `<σ, a> > 0` and the volume identity that
//! recovers this count from cross-polytope intersections.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::geometry::{CrossPolytope, Vector};
use crate::rational::{factorial, int, ratio, round_half_away, Rational};

use super::exact_intersection_volume;

/// Largest dimension for exhaustive sign enumeration.
pub const MAX_ENUMERATION_DIM: usize = 24;

/// Largest dimension for the volume identity check.
pub const MAX_REDUCTION_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(entries: Vec<i8>) -> Result<Self> {
        if entries.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInstance("sign entries must be -1 or +1".into()));
        }
        Ok(Self(entries))
    }

    /// Sign vector whose entry `j` is `-1` iff bit `j` of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self((0..n).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn entries(&self) -> &[i8] {
        &self.0
    }

    pub fn dot(&self, a: &[u64]) -> i128 {
        self.0.iter().zip(a).map(|(&s, &x)| i128::from(s) * i128::from(x)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LargeSetCount {
    /// `|{σ : <σ, a> > 0}|`.
    pub positive: u64,
    /// `2^n - 2 * positive`, the number of `σ` with `<σ, a> = 0`.
    pub partitions: u64,
}

fn validate(a: &[u64], max_dim: usize) -> Result<()> {
    if a.is_empty() || a.contains(&0) {
        return Err(Error::InvalidInstance("a must be a nonempty vector of positive integers".into()));
    }
    if a.len() > max_dim {
        return Err(Error::Unsupported(format!("dimension {} exceeds {max_dim}", a.len())));
    }
    let sum = a.iter().map(|&x| u128::from(x)).sum::<u128>();
    if sum % 2 == 1 {
        return Err(Error::Precondition("|a|_1 must be even".into()));
    }
    Ok(())
}

/// Exhaustive count over all `2^n` sign vectors.
pub fn count_large_sets(a: &[u64]) -> Result<LargeSetCount> {
    validate(a, MAX_ENUMERATION_DIM)?;
    let n = a.len();
    let positive = (0..1u64 << n).filter(|&m| SignVector::from_mask(n, m).dot(a) > 0).count() as u64;
    Ok(LargeSetCount { positive, partitions: (1u64 << n) - 2 * positive })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCheck {
    /// Nearest integer to `(n-1)! W / epsilon`.
    pub lhs: BigInt,
    pub rhs: u64,
    pub pass: bool,
    pub delta: Rational,
    pub epsilon: Rational,
    /// `W = Vol(C(delta a, 1) ∩ C(0, 1 + epsilon) \ C(0, 1))`.
    pub shell_volume: Rational,
}

/// Recovers `count_large_sets(a)` from exact cross-polytope volumes with
/// `delta = 0.09 / (n 2^n |a|_1)` and `epsilon = delta / 2`.
pub fn hardness_reduction_check(a: &[u64]) -> Result<ReductionCheck> {
    validate(a, MAX_REDUCTION_DIM)?;
    let n = a.len();
    let norm: u64 = a.iter().sum();
    let delta = ratio(9, 100) / int((n as i64) * (1i64 << n) * norm as i64);
    let epsilon = &delta / int(2);

    let shifted = CrossPolytope::new(
        Vector::new(a.iter().map(|&x| &delta * int(x as i64)).collect())?,
        int(1),
    )?;
    let outer = CrossPolytope::centered(n, int(1) + &epsilon)?;
    let inner = CrossPolytope::centered(n, int(1))?;
    let with_shell = exact_intersection_volume(&[shifted.clone(), outer.clone()])?;
    let without_shell = exact_intersection_volume(&[shifted, outer, inner])?;
    let shell_volume = with_shell - without_shell;

    let scaled = Rational::from_integer(factorial(n - 1)) * &shell_volume / &epsilon;
    let lhs = round_half_away(&scaled);
    let rhs = count_large_sets(a)?.positive;
    let pass = lhs.to_u64() == Some(rhs);
    Ok(ReductionCheck { lhs, rhs, pass, delta, epsilon, shell_volume })
}
