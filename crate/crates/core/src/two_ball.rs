//! Staircase-convolution approximation of `Vol(C(0,1) ∩ C(c,r))`.
//!
//! With `X` uniform on `[-1,1]^n`, the volume equals `Psi_n(1, r)` where
//! `Psi_i(u, v) = ∫ Psi_{i-1}(u - |s|, v - |s - c_i|) ds` over `s ∈ [-1,1]`.
//! The engine replaces every `Psi_i` by a staircase function `G_i` that is
//! constant on the cells `((k-1)/M, k/M] x ((l-1) r/M, l r/M]` and takes the
//! value of the exact integral of `G_{i-1}` at the upper-right corner. Each
//! table therefore holds `(M+1)^2` values and is computed from the previous
//! one only.
//!
//! Integration variable `s` is handled on an integer lattice: positions are
//! stored in units of `1/(D M)` where `D` is the common denominator of `r`
//! and `c_i`, so every level crossing is an exact integer and the read index
//! of each open segment is decided without rounding. Only segment lengths
//! and table values are floating point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{l1_norm, normalize_pair, CrossPolytope, Vector};
use crate::rational::{ceil_int, common_denominator, int, scaled_i64, Rational};
use crate::result::ApproxResult;

/// Upper bound on the number of cells of a dense staircase table.
pub const MAX_TABLE_CELLS: usize = 1 << 26;

/// Instance `C(0,1) ∩ C(c, r)` with `c >= 0`, `0 < r <= 1` and `|c|_1 <= r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoBallInstance {
    c: Vec<Rational>,
    r: Rational,
}

impl TwoBallInstance {
    pub fn new(c: Vec<Rational>, r: Rational) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidInstance("dimension must be >= 1".into()));
        }
        if !r.is_positive() || r > int(1) {
            return Err(Error::InvalidInstance("radius must satisfy 0 < r <= 1".into()));
        }
        if c.iter().any(Signed::is_negative) {
            return Err(Error::InvalidInstance("center must be componentwise nonnegative".into()));
        }
        let norm: Rational = c.iter().sum();
        if norm > r {
            return Err(Error::Precondition(format!(
                "|c|_1 = {} exceeds r = {}",
                crate::rational::format(&norm),
                crate::rational::format(&r)
            )));
        }
        Ok(Self { c, r })
    }

    /// Canonical instance for two arbitrary balls with positive radii.
    ///
    /// The larger ball becomes `C(0,1)`; returns the instance together with
    /// the factor `scale` such that `Vol(a ∩ b) = scale * Vol(instance)`.
    pub fn from_balls(a: &CrossPolytope, b: &CrossPolytope) -> Result<(Self, Rational)> {
        let (big, small) = if a.radius() >= b.radius() { (a, b) } else { (b, a) };
        let pair = normalize_pair(big, small)?;
        let inst = Self::new(pair.center.into_coords(), pair.radius)?;
        Ok((inst, pair.scale))
    }

    pub fn dim(&self) -> usize {
        self.c.len()
    }

    pub fn c(&self) -> &[Rational] {
        &self.c
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    /// The two balls `C(0,1)` and `C(c,r)`.
    pub fn balls(&self) -> [CrossPolytope; 2] {
        let n = self.dim();
        [
            CrossPolytope::centered(n, int(1)).expect("n >= 1"),
            CrossPolytope::new(Vector::new(self.c.clone()).expect("n >= 1"), self.r.clone())
                .expect("r > 0"),
        ]
    }

    pub fn center_norm(&self) -> Rational {
        l1_norm(&Vector::new(self.c.clone()).expect("n >= 1"))
    }
}

/// How the final tables are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridStrategy {
    /// Every stage is computed on the whole `(M+1)^2` grid.
    Full,
    /// The last two stages are evaluated only at the cells that feed
    /// `G_n(1, r)`; the result is bit-identical to [`GridStrategy::Full`].
    #[default]
    Demand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    pub strategy: GridStrategy,
    /// Worker threads for the row map inside a stage. Per-cell summation
    /// order does not depend on this value.
    pub threads: usize,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { strategy: GridStrategy::default(), threads: 1 }
    }
}

/// Staircase values `G_i(k/M, r l/M)` for `k, l ∈ {0..M}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaircaseTable {
    m: usize,
    r: Rational,
    stage: usize,
    values: Vec<f64>,
}

impl StaircaseTable {
    /// `G_0`, the indicator of `u, v >= 0`, restricted to the grid.
    pub fn stage_zero(m: usize, r: Rational) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInstance("grid resolution M must be >= 1".into()));
        }
        if !r.is_positive() || r > int(1) {
            return Err(Error::InvalidInstance("radius must satisfy 0 < r <= 1".into()));
        }
        let cells = checked_cells(m)?;
        Ok(Self { m, r, stage: 0, values: vec![1.0; cells] })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k * (self.m + 1) + l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_monotone(&self) -> bool {
        let w = self.m + 1;
        (0..w).all(|k| {
            (0..w).all(|l| {
                let v = self.get(k, l);
                v >= 0.0
                    && (k + 1 == w || self.get(k + 1, l) >= v)
                    && (l + 1 == w || self.get(k, l + 1) >= v)
            })
        })
    }

    fn row(&self, k: usize) -> &[f64] {
        let w = self.m + 1;
        &self.values[k * w..(k + 1) * w]
    }
}

fn checked_cells(m: usize) -> Result<usize> {
    (m + 1)
        .checked_mul(m + 1)
        .filter(|&c| c <= MAX_TABLE_CELLS)
        .ok_or_else(|| Error::Unsupported(format!("staircase table for M = {m} is too large")))
}

/// One open segment class of the integration variable.
///
/// On the segment, `u - |s|` lies in the cell `du` steps below `u` and
/// `v - |s - c_i|` lies in the cell `dv` steps below `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    du: usize,
    dv: usize,
    weight: f64,
}

/// Exact lattice of one stage along `s`, in units of `1/(D M)`.
#[derive(Debug, Clone)]
struct StageLattice {
    m: i64,
    d: i64,
    unit: i64,
    center: i64,
    rd: i64,
}

impl StageLattice {
    fn new(m: usize, r: &Rational, c_i: &Rational) -> Result<Self> {
        if c_i.is_negative() || *c_i > int(1) {
            return Err(Error::Precondition("center coordinate must lie in [0, 1]".into()));
        }
        let d_big = common_denominator([r, c_i]);
        let m_i = i64::try_from(m).map_err(|_| Error::Unsupported("M too large".into()))?;
        let d = d_big
            .to_i64()
            .ok_or_else(|| Error::Unsupported("denominators too large".into()))?;
        // Sums of two positions and twice the center stay below 8 D M.
        let unit = d
            .checked_mul(m_i)
            .filter(|u| u.checked_mul(8).is_some())
            .ok_or_else(|| Error::Unsupported("denominators too large for the grid lattice".into()))?;
        let center = scaled_i64(c_i, &(d_big.clone() * BigInt::from(m_i)))?;
        let rd = scaled_i64(r, &d_big)?;
        Ok(Self { m: m_i, d, unit, center, rd })
    }

    /// Segment classes with their total exact length, in `(du, dv)` order.
    fn pieces(&self) -> Vec<Piece> {
        let mut points = Vec::with_capacity(4 * self.m as usize + 8);
        for j in -self.m..=self.m {
            points.push(j * self.d);
            let p = self.center + j * self.rd;
            if p.abs() <= self.unit {
                points.push(p);
            }
        }
        points.extend([-self.unit, self.unit, self.center]);
        points.sort_unstable();
        points.dedup();

        let mut lengths: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let twice_mid = a + b;
            let du = twice_mid.abs() / (2 * self.d);
            let dv = (twice_mid - 2 * self.center).abs() / (2 * self.rd);
            if du < self.m && dv < self.m {
                *lengths.entry((du as usize, dv as usize)).or_insert(0) += b - a;
            }
        }
        let unit = self.unit as f64;
        lengths
            .into_iter()
            .map(|((du, dv), len)| Piece { du, dv, weight: len as f64 / unit })
            .collect()
    }

    /// `G_1(k/M, r l/M)`: length of `{s : |s| < k/M, |s - c_i| < r l/M} ∩ [-1,1]`.
    fn first_stage(&self, k: usize, l: usize) -> f64 {
        if k == 0 || l == 0 {
            return 0.0;
        }
        let (k, l) = (k as i64, l as i64);
        let hi = (k * self.d).min(self.center + l * self.rd).min(self.unit);
        let lo = (-k * self.d).max(self.center - l * self.rd).max(-self.unit);
        if hi <= lo {
            0.0
        } else {
            (hi - lo) as f64 / self.unit as f64
        }
    }
}

/// Read access to the previous stage.
enum Source<'a> {
    FirstStage(&'a StageLattice),
    Table(&'a StaircaseTable),
}

impl Source<'_> {
    fn get(&self, k: usize, l: usize) -> f64 {
        match self {
            Source::FirstStage(lattice) => lattice.first_stage(k, l),
            Source::Table(t) => t.get(k, l),
        }
    }
}

fn eval_cell(pieces: &[Piece], src: &Source<'_>, k: usize, l: usize) -> f64 {
    let mut acc = 0.0;
    for p in pieces {
        if p.du < k && p.dv < l {
            acc += p.weight * src.get(k - p.du, l - p.dv);
        }
    }
    acc
}

/// Pieces split into columns for the closed-form inner loop.
struct PieceColumns {
    du: Vec<i64>,
    dv: Vec<i64>,
    weight: Vec<f64>,
}

impl PieceColumns {
    fn new(pieces: &[Piece]) -> Self {
        Self {
            du: pieces.iter().map(|p| p.du as i64).collect(),
            dv: pieces.iter().map(|p| p.dv as i64).collect(),
            weight: pieces.iter().map(|p| p.weight).collect(),
        }
    }
}

/// [`eval_cell`] against the closed-form first stage, written without
/// branches. Terms are added in the same order with the same values, so
/// the result is bit-identical.
fn eval_first_stage_cell(cols: &PieceColumns, first: &StageLattice, k: usize, l: usize) -> f64 {
    let (k, l) = (k as i64, l as i64);
    // Pieces are sorted by `du`, so the ones with `du >= k` form a suffix.
    let end = cols.du.partition_point(|&du| du < k);
    let unit = first.unit as f64;
    let mut acc = 0.0;
    for ((&du, &dv), &w) in cols.du[..end].iter().zip(&cols.dv[..end]).zip(&cols.weight[..end]) {
        let (kk, ll) = (k - du, l - dv);
        let hi = (kk * first.d).min(first.center + ll * first.rd).min(first.unit);
        let lo = (-kk * first.d).max(first.center - ll * first.rd).max(-first.unit);
        let len = if ll > 0 && hi > lo { hi - lo } else { 0 };
        acc += w * (len as f64 / unit);
    }
    acc
}

fn convolve_row(pieces: &[Piece], prev: &StaircaseTable, k: usize, out: &mut [f64]) {
    let m = prev.m;
    for p in pieces {
        if p.du >= k {
            continue;
        }
        let src = prev.row(k - p.du);
        let w = p.weight;
        for (o, s) in out[p.dv + 1..=m].iter_mut().zip(&src[1..=m - p.dv]) {
            *o += w * s;
        }
    }
}

fn first_stage_table(lattice: &StageLattice, m: usize, r: &Rational) -> Result<StaircaseTable> {
    let w = m + 1;
    let mut values = vec![0.0; checked_cells(m)?];
    for k in 0..w {
        for l in 0..w {
            values[k * w + l] = lattice.first_stage(k, l);
        }
    }
    Ok(StaircaseTable { m, r: r.clone(), stage: 1, values })
}

fn convolve_table(pieces: &[Piece], prev: &StaircaseTable, parallel: bool) -> StaircaseTable {
    let w = prev.m + 1;
    let mut values = vec![0.0; w * w];
    if parallel {
        values
            .par_chunks_mut(w)
            .enumerate()
            .for_each(|(k, row)| convolve_row(pieces, prev, k, row));
    } else {
        for (k, row) in values.chunks_mut(w).enumerate() {
            convolve_row(pieces, prev, k, row);
        }
    }
    StaircaseTable { m: prev.m, r: prev.r.clone(), stage: prev.stage + 1, values }
}

/// Computes the stage-`i` table from the stage-`(i-1)` table.
///
/// For every grid point, integrates the staircase `G_{i-1}(u - |s|, v - |s - c_i|)`
/// over `s ∈ [-1,1]` exactly: the integrand is constant on the open segments
/// between consecutive level crossings, and reads below index 1 are zero.
pub fn dp_stage(prev: &StaircaseTable, c_i: &Rational) -> Result<StaircaseTable> {
    dp_stage_with(prev, c_i, false)
}

pub fn dp_stage_with(prev: &StaircaseTable, c_i: &Rational, parallel: bool) -> Result<StaircaseTable> {
    let lattice = StageLattice::new(prev.m, &prev.r, c_i)?;
    if prev.stage == 0 {
        return first_stage_table(&lattice, prev.m, &prev.r);
    }
    Ok(convolve_table(&lattice.pieces(), prev, parallel))
}

/// Sorted breakpoints `t_0 < ... < t_m` in `[-1, 1]` for the grid point
/// `(u, v) = (k/M, r l/M)`: every `s` where `u - |s|` or `v - |s - c_i|`
/// equals a nonnegative grid level, plus `-1, 0, c_i, 1`.
pub fn breakpoints(
    u: &Rational,
    v: &Rational,
    c_i: &Rational,
    m: usize,
    r: &Rational,
) -> Result<Vec<Rational>> {
    if m == 0 || !r.is_positive() || *r > int(1) {
        return Err(Error::InvalidInstance("need M >= 1 and 0 < r <= 1".into()));
    }
    if c_i.is_negative() || *c_i > int(1) {
        return Err(Error::Precondition("center coordinate must lie in [0, 1]".into()));
    }
    let m_q = int(m as i64);
    let on_grid = |x: &Rational| x.is_integer() && !x.is_negative() && *x <= m_q;
    if !on_grid(&(u * &m_q)) || !on_grid(&(v * &m_q / r)) {
        return Err(Error::InvalidInstance("(u, v) is not a grid point".into()));
    }
    let one = int(1);
    let mut set = std::collections::BTreeSet::new();
    for kp in 0..=m {
        let level = u - int(kp as i64) / &m_q;
        if level.is_negative() {
            break;
        }
        for s in [level.clone(), -level] {
            if s.abs() <= one {
                set.insert(s);
            }
        }
    }
    for lp in 0..=m {
        let level = v - r * int(lp as i64) / &m_q;
        if level.is_negative() {
            break;
        }
        for s in [c_i + &level, c_i - &level] {
            if s.abs() <= one {
                set.insert(s);
            }
        }
    }
    set.extend([-one.clone(), Rational::zero(), c_i.clone(), one]);
    Ok(set.into_iter().collect())
}

/// `M = ⌈4 n^2 / delta⌉`.
pub fn grid_resolution(n: usize, delta: &Rational) -> Result<usize> {
    if !delta.is_positive() || *delta >= int(1) {
        return Err(Error::InvalidInstance("delta must satisfy 0 < delta < 1".into()));
    }
    let n = n as i64;
    ceil_int(&(int(4 * n * n) / delta))
        .to_usize()
        .ok_or_else(|| Error::Unsupported("grid resolution overflow".into()))
}

/// Returns `Z` with `Vol(C(0,1) ∩ C(c,r)) <= Z <= (1 + delta) Vol(...)`.
pub fn approx_two_ball_volume(inst: &TwoBallInstance, delta: &Rational) -> Result<ApproxResult> {
    approx_two_ball_volume_with(inst, delta, &EngineOptions::default())
}

pub fn approx_two_ball_volume_with(
    inst: &TwoBallInstance,
    delta: &Rational,
    opts: &EngineOptions,
) -> Result<ApproxResult> {
    let m = grid_resolution(inst.dim(), delta)?;
    let value = staircase_value(inst, m, opts)?;
    Ok(ApproxResult::one_sided(value, delta.clone(), m))
}

/// `G_n(1, r)` for an explicit grid resolution `m`.
pub fn staircase_value(inst: &TwoBallInstance, m: usize, opts: &EngineOptions) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidInstance("grid resolution M must be >= 1".into()));
    }
    if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
        pool.install(|| run_stages(inst, m, opts.strategy, true))
    } else {
        run_stages(inst, m, opts.strategy, false)
    }
}

fn run_stages(inst: &TwoBallInstance, m: usize, strategy: GridStrategy, parallel: bool) -> Result<f64> {
    let n = inst.dim();
    let lattices = inst
        .c
        .iter()
        .map(|c_i| StageLattice::new(m, &inst.r, c_i))
        .collect::<Result<Vec<_>>>()?;

    match strategy {
        GridStrategy::Full => {
            let mut table = first_stage_table(&lattices[0], m, &inst.r)?;
            for lattice in &lattices[1..] {
                table = convolve_table(&lattice.pieces(), &table, parallel);
            }
            Ok(table.get(m, m))
        }
        GridStrategy::Demand => {
            if n == 1 {
                return Ok(lattices[0].first_stage(m, m));
            }
            let table;
            let src = if n >= 4 {
                let mut t = first_stage_table(&lattices[0], m, &inst.r)?;
                for lattice in &lattices[1..n - 2] {
                    t = convolve_table(&lattice.pieces(), &t, parallel);
                }
                table = t;
                Source::Table(&table)
            } else {
                Source::FirstStage(&lattices[0])
            };
            let last = lattices[n - 1].pieces();
            if n == 2 {
                return Ok(eval_cell(&last, &src, m, m));
            }
            // Stage n-1 is needed only at the cells read by the final cell.
            let before = lattices[n - 2].pieces();
            let columns = PieceColumns::new(&before);
            let eval = |p: &Piece| match &src {
                Source::FirstStage(first) => eval_first_stage_cell(&columns, first, m - p.du, m - p.dv),
                Source::Table(_) => eval_cell(&before, &src, m - p.du, m - p.dv),
            };
            let cells: Vec<f64> = if parallel {
                last.par_iter().map(eval).collect()
            } else {
                last.iter().map(eval).collect()
            };
            let mut acc = 0.0;
            for (p, g) in last.iter().zip(cells) {
                acc += p.weight * g;
            }
            Ok(acc)
        }
    }
}
