//! Exact volume of the convex hull of a point set in `Q^n`.
//!
//! Builds a placing triangulation of the boundary: start from a full
//! simplex, then insert points one by one, replacing the facets a point
//! sees strictly by the cone from the point over the horizon. The volume is
//! the sum of the cones from a fixed interior point over all boundary
//! simplices.

use std::collections::{HashMap, HashSet};

use num_traits::{Signed, Zero};

use crate::linalg::{determinant, rank};
use crate::rational::{factorial, int, Rational};

struct Facet {
    vertices: Vec<usize>,
    normal: Vec<Rational>,
    offset: Rational,
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Hyperplane through `n` affinely independent points, oriented so that
/// `interior` lies strictly on the negative side.
fn oriented_facet(points: &[Vec<Rational>], vertices: Vec<usize>, interior: &[Rational]) -> Facet {
    let n = interior.len();
    let base = &points[vertices[0]];
    let rows: Vec<Vec<Rational>> = vertices[1..].iter().map(|&i| sub(&points[i], base)).collect();
    // Generalized cross product: cofactors of the (n-1) x n difference matrix.
    let mut normal: Vec<Rational> = (0..n)
        .map(|j| {
            let minor: Vec<Vec<Rational>> = rows
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let d = if minor.is_empty() { int(1) } else { determinant(&minor) };
            if j % 2 == 0 { d } else { -d }
        })
        .collect();
    let mut offset = dot(&normal, base);
    if dot(&normal, interior) > offset {
        normal.iter_mut().for_each(|x| *x = -x.clone());
        offset = -offset;
    }
    Facet { vertices, normal, offset }
}

/// Indices of `n + 1` affinely independent points, if any exist.
fn initial_simplex(points: &[Vec<Rational>], n: usize) -> Option<Vec<usize>> {
    let mut chosen = vec![0];
    let mut diffs: Vec<Vec<Rational>> = Vec::new();
    for (i, p) in points.iter().enumerate().skip(1) {
        diffs.push(sub(p, &points[0]));
        if rank(&diffs) == diffs.len() {
            chosen.push(i);
            if chosen.len() == n + 1 {
                return Some(chosen);
            }
        } else {
            diffs.pop();
        }
    }
    None
}

/// Exact `Vol(conv(points))`; zero for lower-dimensional or empty input.
pub(crate) fn hull_volume(points: &[Vec<Rational>]) -> Rational {
    let Some(n) = points.first().map(Vec::len) else {
        return Rational::zero();
    };
    let mut seen = HashSet::new();
    let points: Vec<Vec<Rational>> = points.iter().filter(|p| seen.insert((*p).clone())).cloned().collect();
    if n == 1 {
        let lo = points.iter().map(|p| &p[0]).min().expect("nonempty");
        let hi = points.iter().map(|p| &p[0]).max().expect("nonempty");
        return hi - lo;
    }
    let Some(simplex) = initial_simplex(&points, n) else {
        return Rational::zero();
    };
    let count = int((n + 1) as i64);
    let interior: Vec<Rational> = (0..n)
        .map(|j| simplex.iter().map(|&i| &points[i][j]).sum::<Rational>() / &count)
        .collect();

    let mut facets: Vec<Facet> = (0..=n)
        .map(|skip| {
            let verts = simplex.iter().enumerate().filter(|&(t, _)| t != skip).map(|(_, &i)| i).collect();
            oriented_facet(&points, verts, &interior)
        })
        .collect();

    let in_simplex: HashSet<usize> = simplex.iter().copied().collect();
    for p in (0..points.len()).filter(|i| !in_simplex.contains(i)) {
        let (visible, kept): (Vec<Facet>, Vec<Facet>) =
            facets.into_iter().partition(|f| dot(&f.normal, &points[p]) > f.offset);
        facets = kept;
        if visible.is_empty() {
            continue;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in &visible {
            for skip in 0..n {
                let mut ridge: Vec<usize> =
                    f.vertices.iter().enumerate().filter(|&(t, _)| t != skip).map(|(_, &i)| i).collect();
                ridge.sort_unstable();
                *ridges.entry(ridge).or_default() += 1;
            }
        }
        for (ridge, hits) in ridges {
            if hits == 1 {
                let mut verts = ridge;
                verts.push(p);
                facets.push(oriented_facet(&points, verts, &interior));
            }
        }
    }

    let total: Rational = facets
        .iter()
        .map(|f| {
            let rows: Vec<Vec<Rational>> = f.vertices.iter().map(|&i| sub(&points[i], &interior)).collect();
            determinant(&rows).abs()
        })
        .sum();
    total / Rational::from_integer(factorial(n))
}
