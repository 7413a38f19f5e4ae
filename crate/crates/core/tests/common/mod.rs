//! Instance generators shared by the integration tests.
#![allow(dead_code)]

use polyvol::rational::{int, ratio};
use polyvol::two_ball::TwoBallInstance;
use polyvol::Rational;
use rand::seq::SliceRandom;
use rand::Rng;

/// `r = p/q` with `q <= 12`, and `c >= 0` with `|c|_1 <= r` on a grid of
/// step `r / (8n)`.
pub fn random_two_ball(rng: &mut impl Rng, n: usize) -> TwoBallInstance {
    let q = rng.gen_range(1..=12i64);
    let p = rng.gen_range(1..=q);
    let r = ratio(p, q);
    let mut budget = 8 * n as i64;
    let mut c = Vec::with_capacity(n);
    for _ in 0..n {
        let steps = rng.gen_range(0..=budget);
        budget -= steps;
        c.push(&r * ratio(steps, 8 * n as i64));
    }
    c.shuffle(rng);
    TwoBallInstance::new(c, r).expect("generated instance satisfies the preconditions")
}

/// Random rational in `[lo, hi]` with denominator `den`.
pub fn random_rational(rng: &mut impl Rng, lo: i64, hi: i64, den: i64) -> Rational {
    ratio(rng.gen_range(lo * den..=hi * den), den)
}

/// Integer point with coordinates in `[-range, range]`.
pub fn random_point(rng: &mut impl Rng, n: usize, range: i64) -> Vec<Rational> {
    (0..n).map(|_| int(rng.gen_range(-range..=range))).collect()
}

/// True when no `n + 1` of the points lie on a common hyperplane.
pub fn in_general_position(points: &[Vec<Rational>]) -> bool {
    let n = points[0].len();
    let m = points.len();
    let mut idx: Vec<usize> = (0..=n).collect();
    if m < n + 1 {
        return true;
    }
    loop {
        let base = &points[idx[0]];
        let rows: Vec<Vec<Rational>> = idx[1..]
            .iter()
            .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
            .collect();
        if polyvol::linalg::determinant(&rows) == int(0) {
            return false;
        }
        let Some(i) = (0..=n).rev().find(|&i| idx[i] != i + m - n - 1) else {
            return true;
        };
        idx[i] += 1;
        for j in i + 1..=n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `conv{±r e_i}` as a vertex list.
pub fn cross_vertices(n: usize, r: &Rational) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    for i in 0..n {
        for s in [1, -1] {
            let mut v = vec![int(0); n];
            v[i] = r * int(s);
            out.push(v);
        }
    }
    out
}

/// All vectors in `{1, ..., max}^n`.
pub fn all_vectors(n: usize, max: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (1..=max).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}
