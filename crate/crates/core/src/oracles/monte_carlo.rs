//! Rejection-sampling volume estimate over the box `[-1, 1]^n`.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::CrossPolytope;
use crate::rational::to_f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub estimate: f64,
    /// Half-width of the normal-approximation 95% confidence interval.
    pub half_width: f64,
    pub samples: u64,
    pub seed: u64,
}

impl MCEstimate {
    pub fn covers(&self, value: f64) -> bool {
        (value - self.estimate).abs() <= self.half_width
    }
}

/// Estimates `Vol(∩ balls)` from `samples` uniform points of `[-1,1]^n`.
///
/// The first ball must be `C(0, 1)`, so the sampling box is its bounding
/// box. The result is a pure function of `seed`.
pub fn mc_volume(balls: &[CrossPolytope], samples: u64, seed: u64) -> Result<MCEstimate> {
    if samples == 0 {
        return Err(Error::InvalidInstance("samples must be positive".into()));
    }
    let first = balls.first().ok_or_else(|| Error::InvalidInstance("need at least one ball".into()))?;
    if !first.radius().is_one() || first.center().coords().iter().any(|x| !x.is_zero()) {
        return Err(Error::Precondition("first ball must be C(0, 1)".into()));
    }
    let n = first.dim();
    if let Some(b) = balls.iter().find(|b| b.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let shapes: Vec<(Vec<f64>, f64)> = balls
        .iter()
        .map(|b| (b.center().coords().iter().map(to_f64).collect(), to_f64(b.radius())))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coord = Uniform::new_inclusive(-1.0f64, 1.0);
    let mut x = vec![0.0; n];
    let mut hits = 0u64;
    for _ in 0..samples {
        x.iter_mut().for_each(|v| *v = coord.sample(&mut rng));
        let inside = shapes
            .iter()
            .all(|(c, r)| x.iter().zip(c).map(|(a, b)| (a - b).abs()).sum::<f64>() <= *r);
        hits += u64::from(inside);
    }
    let boxed = 2f64.powi(n as i32);
    let p = hits as f64 / samples as f64;
    Ok(MCEstimate {
        estimate: boxed * p,
        half_width: boxed * 1.96 * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    })
}
