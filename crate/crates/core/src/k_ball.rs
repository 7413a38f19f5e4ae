//! Staircase approximation of `Vol(∩_i C(p_i, r_i))` for a constant number
//! `k` of cross-polytopes.
//!
//! The two-ball recursion generalizes to a `k`-dimensional table indexed by
//! `(l_1 r_1, ..., l_k r_k) / M`; each coordinate `x_j` contributes
//! `q_j(s) = (|s - p_{1,j}|, ..., |s - p_{k,j}|)` to the budget vector.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{l1_norm, CrossPolytope, Vector};
use crate::rational::{ceil_int, common_denominator, int, ratio, scaled_i64, Rational};
use crate::result::ApproxResult;

pub const MAX_BALLS: usize = 4;

/// Dense tables above this many cells are refused.
pub const MAX_TABLE_CELLS: usize = 1 << 26;

/// `k <= 4` balls anchored so that the first center is the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KBallInstance {
    /// `centers[i][j]` is coordinate `j` of center `i`.
    centers: Vec<Vec<Rational>>,
    radii: Vec<Rational>,
}

impl KBallInstance {
    /// Translates all centers by `-p_1` and checks that every center lies
    /// strictly inside every ball (`|p_i - p_j|_1 < r_j`).
    pub fn new(centers: Vec<Vec<Rational>>, radii: Vec<Rational>) -> Result<Self> {
        let k = centers.len();
        if k == 0 || k > MAX_BALLS {
            return Err(Error::InvalidInstance(format!("ball count must be in 1..={MAX_BALLS}, got {k}")));
        }
        if radii.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: radii.len() });
        }
        let n = centers[0].len();
        if n == 0 {
            return Err(Error::InvalidInstance("dimension must be >= 1".into()));
        }
        if let Some(p) = centers.iter().find(|p| p.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.len() });
        }
        if radii.iter().any(|r| !r.is_positive() || *r > int(1)) {
            return Err(Error::InvalidInstance("radii must satisfy 0 < r_i <= 1".into()));
        }
        let anchor = centers[0].clone();
        let centers: Vec<Vec<Rational>> = centers
            .into_iter()
            .map(|p| p.iter().zip(&anchor).map(|(x, a)| x - a).collect())
            .collect();
        for (i, p) in centers.iter().enumerate() {
            for (j, (q, r)) in centers.iter().zip(&radii).enumerate() {
                if i == j {
                    continue;
                }
                let d: Rational = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
                if d >= *r {
                    return Err(Error::Precondition(format!(
                        "center {i} is not strictly inside ball {j}"
                    )));
                }
            }
        }
        Ok(Self { centers, radii })
    }

    pub fn from_balls(balls: &[CrossPolytope]) -> Result<Self> {
        Self::new(
            balls.iter().map(|b| b.center().coords().to_vec()).collect(),
            balls.iter().map(|b| b.radius().clone()).collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.radii.len()
    }

    pub fn dim(&self) -> usize {
        self.centers[0].len()
    }

    pub fn centers(&self) -> &[Vec<Rational>] {
        &self.centers
    }

    pub fn radii(&self) -> &[Rational] {
        &self.radii
    }

    pub fn balls(&self) -> Vec<CrossPolytope> {
        self.centers
            .iter()
            .zip(&self.radii)
            .map(|(p, r)| CrossPolytope::new(Vector::new(p.clone()).expect("n >= 1"), r.clone()).expect("r > 0"))
            .collect()
    }

    /// `|p_i|_1` for each center after anchoring.
    pub fn center_norms(&self) -> Vec<Rational> {
        self.centers
            .iter()
            .map(|p| l1_norm(&Vector::new(p.clone()).expect("n >= 1")))
            .collect()
    }
}

/// Staircase values `G_j(Π, (l_1 r_1, ..., l_k r_k)/M)`, row-major in `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct KStaircaseTable {
    m: usize,
    k: usize,
    stage: usize,
    values: Vec<f64>,
}

impl KStaircaseTable {
    pub fn stage_zero(m: usize, k: usize) -> Result<Self> {
        if m == 0 || k == 0 || k > MAX_BALLS {
            return Err(Error::InvalidInstance("need M >= 1 and 1 <= k <= 4".into()));
        }
        Ok(Self { m, k, stage: 0, values: vec![1.0; checked_cells(m, k)?] })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.values[self.flat(index)]
    }

    fn flat(&self, index: &[usize]) -> usize {
        index.iter().fold(0, |acc, &l| acc * (self.m + 1) + l)
    }

    /// Multi-index of flat cell `idx`.
    pub fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for slot in out.iter_mut().rev() {
            *slot = idx % (self.m + 1);
            idx /= self.m + 1;
        }
        out
    }

    pub fn is_monotone(&self) -> bool {
        let w = self.m + 1;
        (0..self.values.len()).all(|idx| {
            let v = self.values[idx];
            let l = self.unflatten(idx);
            v >= 0.0
                && (0..self.k).all(|axis| {
                    l[axis] + 1 == w || self.values[idx + w.pow((self.k - 1 - axis) as u32)] >= v
                })
        })
    }
}

fn checked_cells(m: usize, k: usize) -> Result<usize> {
    (0..k)
        .try_fold(1usize, |acc, _| acc.checked_mul(m + 1))
        .filter(|&c| c <= MAX_TABLE_CELLS)
        .ok_or_else(|| Error::Unsupported(format!("table of (M+1)^k cells for M = {m}, k = {k} is too large")))
}

#[derive(Debug, Clone, PartialEq)]
struct KPiece {
    drops: Vec<usize>,
    offset: usize,
    weight: f64,
}

/// Exact lattice of coordinate `j` in units of `1/(D M)`.
#[derive(Debug, Clone)]
struct CoordLattice {
    m: i64,
    unit: i64,
    centers: Vec<i64>,
    rds: Vec<i64>,
}

impl CoordLattice {
    fn new(inst: &KBallInstance, j: usize, m: usize) -> Result<Self> {
        let coords: Vec<&Rational> = inst.centers.iter().map(|p| &p[j]).collect();
        let d_big = common_denominator(coords.iter().copied().chain(inst.radii.iter()));
        let m_i = i64::try_from(m).map_err(|_| Error::Unsupported("M too large".into()))?;
        let d = d_big
            .to_i64()
            .ok_or_else(|| Error::Unsupported("denominators too large".into()))?;
        // Centers lie within distance 1 of the origin, so doubled positions stay below 8 D M.
        let unit = d
            .checked_mul(m_i)
            .filter(|u| u.checked_mul(8).is_some())
            .ok_or_else(|| Error::Unsupported("denominators too large for the grid lattice".into()))?;
        let dm = d_big.clone() * BigInt::from(m_i);
        let centers = coords.iter().map(|p| scaled_i64(p, &dm)).collect::<Result<_>>()?;
        let rds = inst.radii.iter().map(|r| scaled_i64(r, &d_big)).collect::<Result<_>>()?;
        Ok(Self { m: m_i, unit, centers, rds })
    }

    fn pieces(&self, m: usize) -> Vec<KPiece> {
        let mut points = vec![-self.unit, self.unit];
        for (&p, &rd) in self.centers.iter().zip(&self.rds) {
            for t in -self.m..=self.m {
                let x = p + t * rd;
                if x.abs() <= self.unit {
                    points.push(x);
                }
            }
        }
        points.sort_unstable();
        points.dedup();

        let mut lengths: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for w in points.windows(2) {
            let twice_mid = w[0] + w[1];
            let drops: Option<Vec<usize>> = self
                .centers
                .iter()
                .zip(&self.rds)
                .map(|(&p, &rd)| {
                    let d = (twice_mid - 2 * p).abs() / (2 * rd);
                    (d < self.m).then_some(d as usize)
                })
                .collect();
            if let Some(drops) = drops {
                *lengths.entry(drops).or_insert(0) += w[1] - w[0];
            }
        }
        let unit = self.unit as f64;
        lengths
            .into_iter()
            .map(|(drops, len)| KPiece {
                offset: drops.iter().fold(0, |acc, &d| acc * (m + 1) + d),
                drops,
                weight: len as f64 / unit,
            })
            .collect()
    }

    /// `G_1` at grid index `l`: length of `∩_i {s : |s - p_i| < l_i r_i / M} ∩ [-1,1]`.
    fn first_stage(&self, l: &[usize]) -> f64 {
        let mut lo = -self.unit;
        let mut hi = self.unit;
        for ((&p, &rd), &li) in self.centers.iter().zip(&self.rds).zip(l) {
            if li == 0 {
                return 0.0;
            }
            let reach = li as i64 * rd;
            lo = lo.max(p - reach);
            hi = hi.min(p + reach);
        }
        if hi <= lo {
            0.0
        } else {
            (hi - lo) as f64 / self.unit as f64
        }
    }
}

enum KSource<'a> {
    FirstStage(&'a CoordLattice),
    Table(&'a KStaircaseTable),
}

impl KSource<'_> {
    fn get(&self, index: &[usize], flat: usize) -> f64 {
        match self {
            KSource::FirstStage(lattice) => lattice.first_stage(index),
            KSource::Table(t) => t.values[flat],
        }
    }
}

fn eval_cell(pieces: &[KPiece], src: &KSource<'_>, index: &[usize], flat: usize) -> f64 {
    let mut acc = 0.0;
    let mut shifted = vec![0; index.len()];
    for p in pieces {
        if p.drops.iter().zip(index).all(|(d, l)| d < l) {
            for ((s, l), d) in shifted.iter_mut().zip(index).zip(&p.drops) {
                *s = l - d;
            }
            acc += p.weight * src.get(&shifted, flat - p.offset);
        }
    }
    acc
}

fn build_table(m: usize, k: usize, stage: usize, parallel: bool, src: &KSource<'_>, pieces: Option<&[KPiece]>) -> Result<KStaircaseTable> {
    let cells = checked_cells(m, k)?;
    let mut table = KStaircaseTable { m, k, stage, values: vec![0.0; cells] };
    let slab = cells / (m + 1);
    let fill = |(a, chunk): (usize, &mut [f64])| {
        for (i, out) in chunk.iter_mut().enumerate() {
            let flat = a * slab + i;
            let index = unflatten(flat, m, k);
            *out = match pieces {
                Some(pieces) => eval_cell(pieces, src, &index, flat),
                None => src.get(&index, flat),
            };
        }
    };
    if parallel {
        table.values.par_chunks_mut(slab).enumerate().for_each(fill);
    } else {
        table.values.chunks_mut(slab).enumerate().for_each(fill);
    }
    Ok(table)
}

fn unflatten(mut idx: usize, m: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = idx % (m + 1);
        idx /= m + 1;
    }
    out
}

/// Stage-`j` table from the stage-`(j-1)` table; `j` is the 0-based coordinate
/// integrated out by this stage.
pub fn k_dp_stage(prev: &KStaircaseTable, j: usize, inst: &KBallInstance) -> Result<KStaircaseTable> {
    if prev.k != inst.k() {
        return Err(Error::DimensionMismatch { expected: inst.k(), found: prev.k });
    }
    if j >= inst.dim() {
        return Err(Error::InvalidInstance(format!("coordinate {j} out of range")));
    }
    let lattice = CoordLattice::new(inst, j, prev.m)?;
    if prev.stage == 0 {
        return build_table(prev.m, prev.k, 1, false, &KSource::FirstStage(&lattice), None);
    }
    let pieces = lattice.pieces(prev.m);
    build_table(prev.m, prev.k, prev.stage + 1, false, &KSource::Table(prev), Some(&pieces))
}

/// Sorted breakpoints in `[-1,1]` for grid vector `u` and coordinate `j`:
/// every `s` where some `u_i - |s - p_{i,j}|` equals a nonnegative level
/// `l r_i / M`, plus every `p_{i,j}` inside `[-1,1]` and `±1`.
pub fn k_breakpoints(u: &[Rational], j: usize, inst: &KBallInstance, m: usize) -> Result<Vec<Rational>> {
    if u.len() != inst.k() {
        return Err(Error::DimensionMismatch { expected: inst.k(), found: u.len() });
    }
    if j >= inst.dim() || m == 0 {
        return Err(Error::InvalidInstance("coordinate out of range or M = 0".into()));
    }
    let m_q = int(m as i64);
    let one = int(1);
    let mut set = BTreeSet::new();
    for ((ui, ri), p) in u.iter().zip(&inst.radii).zip(&inst.centers) {
        let steps = ui * &m_q / ri;
        if !steps.is_integer() || steps.is_negative() || steps > m_q {
            return Err(Error::InvalidInstance("u is not a grid vector".into()));
        }
        let pij = &p[j];
        for l in 0..=m {
            let level = ui - ri * int(l as i64) / &m_q;
            if level.is_negative() {
                break;
            }
            for s in [pij + &level, pij - &level] {
                if s.abs() <= one {
                    set.insert(s);
                }
            }
        }
        if pij.abs() <= one {
            set.insert(pij.clone());
        }
    }
    set.extend([-one.clone(), one]);
    Ok(set.into_iter().collect())
}

/// `M = ⌈2 k n^2 / delta⌉`.
pub fn k_grid_resolution(k: usize, n: usize, delta: &Rational) -> Result<usize> {
    if !delta.is_positive() || *delta > ratio(1, 2) {
        return Err(Error::InvalidInstance("delta must satisfy 0 < delta <= 1/2".into()));
    }
    let (k, n) = (k as i64, n as i64);
    ceil_int(&(int(2 * k * n * n) / delta))
        .to_usize()
        .ok_or_else(|| Error::Unsupported("grid resolution overflow".into()))
}

/// Returns `Z` with `Vol(S(Π, r)) <= Z <= (1 + delta) Vol(S(Π, r))`.
pub fn approx_k_ball_volume(inst: &KBallInstance, delta: &Rational) -> Result<ApproxResult> {
    approx_k_ball_volume_with(inst, delta, 1)
}

pub fn approx_k_ball_volume_with(inst: &KBallInstance, delta: &Rational, threads: usize) -> Result<ApproxResult> {
    let m = k_grid_resolution(inst.k(), inst.dim(), delta)?;
    let value = k_staircase_value(inst, m, threads)?;
    Ok(ApproxResult::one_sided(value, delta.clone(), m))
}

/// `G_n(Π, r)` for an explicit grid resolution.
pub fn k_staircase_value(inst: &KBallInstance, m: usize, threads: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInstance("grid resolution M must be >= 1".into()));
    }
    if threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
        pool.install(|| run_stages(inst, m, true))
    } else {
        run_stages(inst, m, false)
    }
}

fn run_stages(inst: &KBallInstance, m: usize, parallel: bool) -> Result<f64> {
    let (n, k) = (inst.dim(), inst.k());
    let lattices = (0..n)
        .map(|j| CoordLattice::new(inst, j, m))
        .collect::<Result<Vec<_>>>()?;
    let top = vec![m; k];
    if n == 1 {
        return Ok(lattices[0].first_stage(&top));
    }
    let table;
    let src = if n >= 3 {
        let mut t = build_table(m, k, 1, parallel, &KSource::FirstStage(&lattices[0]), None)?;
        for lattice in &lattices[1..n - 1] {
            let pieces = lattice.pieces(m);
            t = build_table(m, k, t.stage + 1, parallel, &KSource::Table(&t), Some(&pieces))?;
        }
        table = t;
        KSource::Table(&table)
    } else {
        KSource::FirstStage(&lattices[0])
    };
    // The last stage is needed at the single cell (M, ..., M).
    let flat_top = top.iter().fold(0, |acc, &l| acc * (m + 1) + l);
    Ok(eval_cell(&lattices[n - 1].pieces(m), &src, &top, flat_top))
}

/// Brute-force helper: the `k`-ball instance equivalent to `C(0,1) ∩ C(c, r)`.
pub fn from_two_ball(c: &[Rational], r: &Rational) -> Result<KBallInstance> {
    KBallInstance::new(vec![vec![Rational::zero(); c.len()], c.to_vec()], vec![int(1), r.clone()])
}
