//! Exact low-dimensional ground truth: H- and V-polytope volumes, the
//! restricted volume functions the staircase tables approximate, Monte Carlo
//! estimation, and the sign-vector counting identity.

mod hpoly;
mod hull;
mod large_set;
mod monte_carlo;

pub use hpoly::{box_halfspaces, cross_polytope_halfspaces, enumerate_vertices, h_polytope_volume, HalfSpace};
pub use large_set::{count_large_sets, hardness_reduction_check, LargeSetCount, ReductionCheck, SignVector};
pub use monte_carlo::{mc_volume, MCEstimate};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geometry::CrossPolytope;
use crate::rational::Rational;

/// Highest dimension the exact oracles accept.
pub const MAX_ORACLE_DIM: usize = 4;

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidInstance("dimension must be >= 1".into()));
    }
    if n > MAX_ORACLE_DIM {
        return Err(Error::Unsupported(format!(
            "exact oracles are limited to dimension {MAX_ORACLE_DIM}, got {n}"
        )));
    }
    Ok(())
}

/// Exact `Vol(∩ balls)`; zero when the intersection is empty.
pub fn exact_intersection_volume(balls: &[CrossPolytope]) -> Result<Rational> {
    let first = balls.first().ok_or_else(|| Error::InvalidInstance("need at least one ball".into()))?;
    let n = first.dim();
    check_dim(n)?;
    if let Some(b) = balls.iter().find(|b| b.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let halfspaces: Vec<HalfSpace> = balls
        .iter()
        .flat_map(|b| cross_polytope_halfspaces(b.center().coords(), b.radius()))
        .collect();
    Ok(h_polytope_volume(&halfspaces, n))
}

/// Exact `Vol(conv(points))`; zero for a degenerate hull.
pub fn exact_hull_volume(points: &[Vec<Rational>]) -> Result<Rational> {
    let first = points.first().ok_or_else(|| Error::InvalidInstance("need at least one point".into()))?;
    let n = first.len();
    check_dim(n)?;
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.len() });
    }
    Ok(hull::hull_volume(points))
}

/// `Vol{x ∈ [-1,1]^i : |x - centers[t]|_1 <= levels[t] for all t}` with
/// `i` the common length of the centers.
///
/// This is the function the staircase tables approximate at stage `i`,
/// with the centers truncated to their first `i` coordinates. In dimension
/// zero it is the indicator of all levels being nonnegative; a negative
/// level gives zero in every dimension.
pub fn restricted_volume(centers: &[Vec<Rational>], levels: &[Rational]) -> Result<Rational> {
    if centers.is_empty() || centers.len() != levels.len() {
        return Err(Error::InvalidInstance("need one level per center".into()));
    }
    let i = centers[0].len();
    if let Some(p) = centers.iter().find(|p| p.len() != i) {
        return Err(Error::DimensionMismatch { expected: i, found: p.len() });
    }
    if levels.iter().any(Signed::is_negative) {
        return Ok(Rational::zero());
    }
    if i == 0 {
        return Ok(Rational::one());
    }
    check_dim(i)?;
    if levels.iter().any(Zero::is_zero) {
        return Ok(Rational::zero());
    }
    let mut halfspaces = box_halfspaces(i);
    for (p, level) in centers.iter().zip(levels) {
        halfspaces.extend(cross_polytope_halfspaces(p, level));
    }
    Ok(h_polytope_volume(&halfspaces, i))
}

/// Two-ball specialization: `Vol{x ∈ [-1,1]^i : |x|_1 <= u, |x - c|_1 <= v}`.
pub fn restricted_two_ball_volume(c_prefix: &[Rational], u: &Rational, v: &Rational) -> Result<Rational> {
    restricted_volume(&[vec![Rational::zero(); c_prefix.len()], c_prefix.to_vec()], &[u.clone(), v.clone()])
}
