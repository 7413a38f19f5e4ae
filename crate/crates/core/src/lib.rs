//! Deterministic volume computations for L1-ball (cross-polytope) intersections,
//! the knapsack dual polytope `conv{±e_1, ..., ±e_n, a}`, and V-polytopes with
//! few vertices, together with exact low-dimensional oracles.

pub mod error;
pub mod geometry;
pub mod k_ball;
pub mod knapsack;
pub mod linalg;
pub mod oracles;
pub mod rational;
pub mod result;
pub mod two_ball;
pub mod vpolytope;

pub use error::{Error, Result};
pub use geometry::{contains, cross_polytope_volume, l1_norm, normalize_pair, CrossPolytope, Vector};
pub use rational::Rational;
pub use result::ApproxResult;
