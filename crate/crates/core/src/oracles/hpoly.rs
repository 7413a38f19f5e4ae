//! Exact volume of a bounded H-polytope by vertex enumeration.

use std::collections::HashSet;

use num_traits::Zero;

use crate::linalg::solve;
use crate::rational::{int, Rational};

use super::hull::hull_volume;

/// Half-space `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HalfSpace {
    pub normal: Vec<Rational>,
    pub offset: Rational,
}

impl HalfSpace {
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.normal.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>() <= self.offset
    }
}

/// The `2^n` inequalities `σ · (x - center) <= radius`.
pub fn cross_polytope_halfspaces(center: &[Rational], radius: &Rational) -> Vec<HalfSpace> {
    let n = center.len();
    (0..1usize << n)
        .map(|mask| {
            let normal: Vec<Rational> =
                (0..n).map(|j| if mask >> j & 1 == 1 { int(-1) } else { int(1) }).collect();
            let shift: Rational = normal.iter().zip(center).map(|(s, c)| s * c).sum();
            HalfSpace { normal, offset: radius + shift }
        })
        .collect()
}

/// The `2n` inequalities of the box `[-1, 1]^n`.
pub fn box_halfspaces(n: usize) -> Vec<HalfSpace> {
    (0..n)
        .flat_map(|j| {
            [1, -1].into_iter().map(move |s| {
                let mut normal = vec![Rational::zero(); n];
                normal[j] = int(s);
                HalfSpace { normal, offset: int(1) }
            })
        })
        .collect()
}

/// Drops duplicate normals, keeping the tightest offset.
fn tighten(halfspaces: &[HalfSpace]) -> Vec<HalfSpace> {
    let mut best: Vec<HalfSpace> = Vec::new();
    for h in halfspaces {
        match best.iter_mut().find(|b| b.normal == h.normal) {
            Some(b) if h.offset < b.offset => b.offset = h.offset.clone(),
            Some(_) => {}
            None => best.push(h.clone()),
        }
    }
    best
}

/// Vertices of `{x : h.normal · x <= h.offset for all h}`.
pub fn enumerate_vertices(halfspaces: &[HalfSpace], n: usize) -> Vec<Vec<Rational>> {
    let hs = tighten(halfspaces);
    let mut found = HashSet::new();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    if hs.len() < n {
        return out;
    }
    loop {
        let rows: Vec<Vec<Rational>> = idx.iter().map(|&i| hs[i].normal.clone()).collect();
        let rhs: Vec<Rational> = idx.iter().map(|&i| hs[i].offset.clone()).collect();
        if let Some(x) = solve(&rows, &rhs) {
            if hs.iter().all(|h| h.contains(&x)) && found.insert(x.clone()) {
                out.push(x);
            }
        }
        let Some(i) = (0..n).rev().find(|&i| idx[i] != i + hs.len() - n) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Exact volume of a bounded H-polytope in dimension `n`; zero when empty
/// or lower-dimensional.
pub fn h_polytope_volume(halfspaces: &[HalfSpace], n: usize) -> Rational {
    hull_volume(&enumerate_vertices(halfspaces, n))
}
