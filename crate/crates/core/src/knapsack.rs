//! Approximation of `Vol(P_a)`, `P_a = conv{±e_1, ..., ±e_n, a}`.
//!
//! The cross-polytopes `Q_k = C((1 - beta^k) a, beta^k)` shrink towards `a`
//! inside `P_a`; their union has volume
//! `(2^n/n! - Vol(Q_0 ∩ Q_1)) / (1 - beta^n)`, which is within a factor
//! `1 - epsilon/2` of `Vol(P_a)` for `beta = 1 - epsilon / (2 n |a|_1)`.
//! The single intersection volume is delegated to the two-ball engine.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::cross_polytope_volume;
use crate::rational::{int, ratio, to_f64, Rational};
use crate::result::ApproxResult;
use crate::two_ball::{approx_two_ball_volume_with, EngineOptions, TwoBallInstance};

/// Positive integer vector `a`, kept sorted non-increasingly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KnapsackDualInstance {
    a: Vec<u64>,
}

impl KnapsackDualInstance {
    pub fn new(mut a: Vec<u64>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidInstance("a must have dimension >= 1".into()));
        }
        if a.contains(&0) {
            return Err(Error::InvalidInstance("entries of a must be positive integers".into()));
        }
        if a.iter().try_fold(0u64, |acc, &x| acc.checked_add(x)).is_none() {
            return Err(Error::InvalidInstance("|a|_1 overflows".into()));
        }
        a.sort_unstable_by(|x, y| y.cmp(x));
        Ok(Self { a })
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn l1(&self) -> u64 {
        self.a.iter().sum()
    }

    /// Vertex list `{±e_i} ∪ {a}` of `P_a`.
    pub fn vertices(&self) -> Vec<Vec<Rational>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            for s in [1, -1] {
                let mut v = vec![Rational::zero(); n];
                v[i] = int(s);
                out.push(v);
            }
        }
        out.push(self.a.iter().map(|&x| Rational::from_integer(x.into())).collect());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackRunParams {
    /// Effective epsilon after clamping to `1/2`.
    pub epsilon: Rational,
    pub beta: Rational,
    pub inner_delta: Rational,
}

pub fn build_params(inst: &KnapsackDualInstance, epsilon: &Rational) -> Result<KnapsackRunParams> {
    if *epsilon <= Rational::zero() {
        return Err(Error::InvalidInstance("epsilon must be positive".into()));
    }
    let half = ratio(1, 2);
    let epsilon = if *epsilon > half { half } else { epsilon.clone() };
    let n = int(inst.dim() as i64);
    let norm = Rational::from_integer(inst.l1().into());
    let beta = Rational::one() - &epsilon / (int(2) * &n * norm);
    let inner_delta = &epsilon * &epsilon / (int(4) * n);
    Ok(KnapsackRunParams { epsilon, beta, inner_delta })
}

/// `Q_1 = C((1 - beta) a, beta)` as a two-ball instance; `|c|_1 = epsilon/(2n)`.
pub fn q1_instance(inst: &KnapsackDualInstance, params: &KnapsackRunParams) -> Result<TwoBallInstance> {
    let shift = Rational::one() - &params.beta;
    let c = inst
        .a
        .iter()
        .map(|&x| &shift * Rational::from_integer(x.into()))
        .collect();
    TwoBallInstance::new(c, params.beta.clone())
}

/// `1 - beta^n` for `beta = 1 - x`, evaluated without cancellation.
fn one_minus_power(x: &Rational, n: usize) -> f64 {
    -((n as f64) * (-to_f64(x)).ln_1p()).exp_m1()
}

/// Returns `V` with `(1 - epsilon) Vol(P_a) <= V <= (1 + epsilon) Vol(P_a)`.
pub fn approx_knapsack_dual_volume(inst: &KnapsackDualInstance, epsilon: &Rational) -> Result<ApproxResult> {
    approx_knapsack_dual_volume_with(inst, epsilon, &EngineOptions::default())
}

pub fn approx_knapsack_dual_volume_with(
    inst: &KnapsackDualInstance,
    epsilon: &Rational,
    opts: &EngineOptions,
) -> Result<ApproxResult> {
    let params = build_params(inst, epsilon)?;
    let q1 = q1_instance(inst, &params)?;
    let inner = approx_two_ball_volume_with(&q1, &params.inner_delta, opts)?;

    let n = inst.dim();
    let ball = to_f64(&cross_polytope_volume(n, &Rational::one()));
    let x = Rational::one() - &params.beta;
    let eps = to_f64(&params.epsilon);
    let value = (1.0 + eps) / one_minus_power(&x, n) * (ball - inner.value);
    if !(value > 0.0) {
        return Err(Error::Inconsistent(format!(
            "non-positive knapsack estimate {value} (inner volume {})",
            inner.value
        )));
    }
    Ok(ApproxResult {
        value,
        delta: params.epsilon.clone(),
        m_used: inner.m_used,
        lower_bound_exact: false,
        beta: Some(params.beta),
        epsilon: Some(params.epsilon),
        inner_delta: Some(params.inner_delta),
    })
}

/// `(2^n/n! - I) / (1 - beta^n)`: the volume of `∪ Q_k` given `I = Vol(Q_0 ∩ Q_1)`.
pub fn union_volume_from_intersection(n: usize, beta: &Rational, intersection: f64) -> f64 {
    let ball = to_f64(&cross_polytope_volume(n, &Rational::one()));
    let x = Rational::one() - beta;
    (ball - intersection) / one_minus_power(&x, n)
}
