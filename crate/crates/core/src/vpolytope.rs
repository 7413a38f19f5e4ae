//! Exact volume of `P = conv(V)` for `|V| = n + k` points in `Q^n`.
//!
//! With the origin interior to `P`, every facet hyperplane can be written
//! `{x : a·x = 1}` with a unique normal `a`. An `n`-subset `U` of `V` spans a
//! facet iff the system `a·u = 1 (u ∈ U)` has a unique solution with
//! `a·v <= 1` for all `v ∈ V`; the facet contributes the simplex
//! `conv(0, U)` of volume `|det M_U| / n!`. The loop visits `C(n+k, n)`
//! subsets, which is polynomial for constant `k`.

use std::collections::HashSet;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{determinant, rank, solve};
use crate::rational::{factorial, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VPolytopeInstance {
    /// Vertices translated so that their centroid is the origin.
    vertices: Vec<Vec<Rational>>,
    translation: Vec<Rational>,
}

impl VPolytopeInstance {
    /// Re-centers the points at their centroid. The centroid of a
    /// full-dimensional point set is interior to its hull, so interiority
    /// reduces to an exact rank check.
    pub fn new(points: Vec<Vec<Rational>>) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        if n == 0 {
            return Err(Error::InvalidInstance("need at least one point of dimension >= 1".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if points.len() < n + 1 {
            return Err(Error::InvalidInstance(format!(
                "{} points cannot span a full-dimensional polytope in dimension {n}",
                points.len()
            )));
        }
        let count = int(points.len() as i64);
        let centroid: Vec<Rational> = (0..n)
            .map(|j| points.iter().map(|p| &p[j]).sum::<Rational>() / &count)
            .collect();
        let vertices: Vec<Vec<Rational>> = points
            .iter()
            .map(|p| p.iter().zip(&centroid).map(|(x, c)| x - c).collect())
            .collect();
        if rank(&vertices) < n {
            return Err(Error::OriginNotInterior);
        }
        Ok(Self { vertices, translation: centroid })
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    /// Excess `k = |V| - n`.
    pub fn excess(&self) -> usize {
        self.vertices.len() - self.dim()
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    /// Centroid that was subtracted on ingestion.
    pub fn translation(&self) -> &[Rational] {
        &self.translation
    }
}

/// Facet test for the `n` points `u` against all points `all`.
///
/// Returns the normal `a` with `a·u = 1` when every point satisfies
/// `a·v <= 1`; `None` when `M_U` is singular or the points straddle the
/// hyperplane. All points on the far side (`a·v >= 1`) cannot happen with the
/// origin interior and is reported as [`Error::Inconsistent`].
pub fn facet_test(u: &[Vec<Rational>], all: &[Vec<Rational>]) -> Result<Option<Vec<Rational>>> {
    let n = u.len();
    if n == 0 || u.iter().chain(all).any(|p| p.len() != n) {
        return Err(Error::InvalidInstance("facet test needs n points of dimension n".into()));
    }
    let ones = vec![Rational::one(); n];
    let Some(a) = solve(u, &ones) else {
        return Ok(None);
    };
    let one = Rational::one();
    let (mut below, mut above) = (true, true);
    for v in all {
        let dot: Rational = a.iter().zip(v).map(|(x, y)| x * y).sum();
        below &= dot <= one;
        above &= dot >= one;
    }
    match (below, above) {
        (true, _) => Ok(Some(a)),
        (false, true) => Err(Error::Inconsistent(
            "all vertices lie on the far side of a candidate facet".into(),
        )),
        (false, false) => Ok(None),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VolumeReport {
    pub volume: Rational,
    /// Number of `n`-subsets that passed the facet test.
    pub facets: usize,
    pub subsets_examined: usize,
}

pub fn exact_volume(inst: &VPolytopeInstance) -> Result<Rational> {
    exact_volume_report(inst, false).map(|r| r.volume)
}

/// Sums `|det M_U| / n!` over facet subsets; rejects inputs where two
/// subsets span the same facet hyperplane.
pub fn exact_volume_report(inst: &VPolytopeInstance, parallel: bool) -> Result<VolumeReport> {
    let n = inst.dim();
    let subsets = combinations(inst.vertices.len(), n);
    let examine = |idx: &Vec<usize>| -> Result<Option<(Vec<Rational>, Rational)>> {
        let u: Vec<Vec<Rational>> = idx.iter().map(|&i| inst.vertices[i].clone()).collect();
        Ok(facet_test(&u, &inst.vertices)?.map(|a| (a, determinant(&u).abs())))
    };
    let found: Vec<Option<(Vec<Rational>, Rational)>> = if parallel {
        subsets.par_iter().map(examine).collect::<Result<_>>()?
    } else {
        subsets.iter().map(examine).collect::<Result<_>>()?
    };

    let mut normals = HashSet::new();
    let mut total = Rational::zero();
    let mut facets = 0;
    for (a, det) in found.into_iter().flatten() {
        if !normals.insert(a) {
            return Err(Error::DegenerateInput(
                "more than n vertices share a facet hyperplane".into(),
            ));
        }
        total += det;
        facets += 1;
    }
    Ok(VolumeReport {
        volume: total / Rational::from_integer(factorial(n)),
        facets,
        subsets_examined: subsets.len(),
    })
}

/// [`exact_volume_report`] on a dedicated pool of `threads` workers; the
/// result is exact and does not depend on `threads`.
pub fn exact_volume_report_with_threads(inst: &VPolytopeInstance, threads: usize) -> Result<VolumeReport> {
    if threads <= 1 {
        return exact_volume_report(inst, false);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?
        .install(|| exact_volume_report(inst, true))
}

/// All `r`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..r).rev().find(|&i| idx[i] != i + n - r) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
