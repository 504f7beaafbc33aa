//! Spider trees: a center with legs `0..=N`, leg `i` an interval scaled by `aᵢ`.
//!
//! Parameters live in the cube `∏ [2^(-2i), 2^(-2i+1)]` with `a₀ = 1` implied,
//! compared by the sup distance [`tau`]. Distances on the tree are
//!
//! ```text
//! R[a](s_i, t_j) = aᵢ·|s − t|     if i = j
//!                  aᵢ·s + aⱼ·t    otherwise
//! ```
//!
//! [`fingerprint`] recovers `(K, a)` from the distance matrix of a scaled,
//! discretized spider by locating the center and peeling legs off in order of
//! decreasing tip distance.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{uniform_distance_unlabeled, FiniteMetricSpace, PseudoMetricMatrix};

pub const DEFAULT_LEGS: usize = 8;
pub const DEFAULT_GRID: usize = 16;

/// Relative tolerance of the collinearity and tree-consistency tests in [`fingerprint`].
pub const LEG_TOL: f64 = 1e-9;

/// Truncated point `(a₁, …, a_N)` of the parameter cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams", into = "RawParams")]
pub struct SpiderParams {
    a: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawParams {
    a: Vec<f64>,
    #[serde(rename = "N")]
    n: usize,
}

impl TryFrom<RawParams> for SpiderParams {
    type Error = Error;

    fn try_from(raw: RawParams) -> Result<Self> {
        if raw.n != raw.a.len() {
            return Err(Error::InvalidParams(format!("N = {} but {} values given", raw.n, raw.a.len())));
        }
        SpiderParams::new(raw.a)
    }
}

impl From<SpiderParams> for RawParams {
    fn from(p: SpiderParams) -> Self {
        RawParams { n: p.a.len(), a: p.a }
    }
}

/// Bounds `[2^(-2i), 2^(-2i+1)]` of coordinate `i ≥ 1`.
pub fn coordinate_interval(i: usize) -> (f64, f64) {
    let lo = 0.25f64.powi(i as i32);
    (lo, 2.0 * lo)
}

impl SpiderParams {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        for (k, &v) in a.iter().enumerate() {
            let (lo, hi) = coordinate_interval(k + 1);
            if !(lo..=hi).contains(&v) {
                return Err(Error::InvalidParams(format!("a_{} = {v} outside [{lo}, {hi}]", k + 1)));
            }
        }
        Ok(Self { a })
    }

    /// Every coordinate at the lower end of its interval.
    pub fn lower(n: usize) -> Self {
        Self { a: (1..=n).map(|i| coordinate_interval(i).0).collect() }
    }

    pub fn upper(n: usize) -> Self {
        Self { a: (1..=n).map(|i| coordinate_interval(i).1).collect() }
    }

    /// Uniform sample of the truncated cube.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            a: (1..=n)
                .map(|i| {
                    let (lo, hi) = coordinate_interval(i);
                    rng.random_range(lo..=hi)
                })
                .collect(),
        }
    }

    /// Truncation depth `N`.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.a
    }

    /// `aᵢ` with `a₀ = 1`.
    pub fn leg_scale(&self, leg: usize) -> f64 {
        if leg == 0 {
            1.0
        } else {
            self.a[leg - 1]
        }
    }

    /// Same parameters with one more coordinate appended.
    pub fn extended(&self, next: f64) -> Result<Self> {
        let mut a = self.a.clone();
        a.push(next);
        Self::new(a)
    }
}

/// Sup distance between two truncated parameter points.
pub fn tau(a: &SpiderParams, b: &SpiderParams) -> Result<f64> {
    if a.depth() != b.depth() {
        return Err(Error::ParamLengthMismatch(a.depth(), b.depth()));
    }
    Ok(a.a.iter().zip(&b.a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Position of a sample point on the tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpiderPoint {
    Center,
    Leg { leg: usize, s: f64 },
}

impl SpiderPoint {
    fn leg_and_s(self) -> (usize, f64) {
        match self {
            SpiderPoint::Center => (0, 0.0),
            SpiderPoint::Leg { leg, s } => (leg, s),
        }
    }
}

/// `R[a](p, q)`, unscaled.
pub fn tree_distance(params: &SpiderParams, p: SpiderPoint, q: SpiderPoint) -> f64 {
    let (i, s) = p.leg_and_s();
    let (j, t) = q.leg_and_s();
    if i == j {
        params.leg_scale(i) * (s - t).abs()
    } else {
        params.leg_scale(i) * s + params.leg_scale(j) * t
    }
}

/// Sample layout: the center, then legs `0..=N` at `s = 1/grid, …, 1`.
pub fn spider_layout(depth: usize, grid: usize) -> Vec<SpiderPoint> {
    let mut out = Vec::with_capacity((depth + 1) * grid + 1);
    out.push(SpiderPoint::Center);
    for leg in 0..=depth {
        for k in 1..=grid {
            out.push(SpiderPoint::Leg { leg, s: k as f64 / grid as f64 });
        }
    }
    out
}

/// Index of `1_leg` in [`spider_layout`].
pub fn tip_index(leg: usize, grid: usize) -> usize {
    1 + leg * grid + (grid - 1)
}

fn layout_labels(depth: usize, grid: usize) -> Vec<String> {
    let mut out = Vec::with_capacity((depth + 1) * grid + 1);
    out.push("0_0".to_string());
    for leg in 0..=depth {
        for k in 1..=grid {
            out.push(format!("{k}/{grid}_{leg}"));
        }
    }
    out
}

/// A discretized, scaled spider together with the coordinates of its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiderSpace {
    pub space: FiniteMetricSpace,
    pub layout: Vec<SpiderPoint>,
    pub params: SpiderParams,
    pub scale: f64,
    pub grid: usize,
}

/// Distance matrix of `K·R[a]` on [`spider_layout`], as flat row-major data.
fn spider_data(params: &SpiderParams, grid: usize, scale: f64) -> Vec<f64> {
    let layout = spider_layout(params.depth(), grid);
    let n = layout.len();
    let mut data = vec![0.0; n * n];
    for (i, &p) in layout.iter().enumerate() {
        for (j, &q) in layout.iter().enumerate().skip(i + 1) {
            let v = scale * tree_distance(params, p, q);
            data[i * n + j] = v;
            data[j * n + i] = v;
        }
    }
    data
}

/// `K·R[a]` on [`spider_layout`] for any `K ≥ 0`; `K = 0` collapses the tree.
pub fn spider_matrix(params: &SpiderParams, grid: usize, scale: f64) -> Result<PseudoMetricMatrix> {
    if grid == 0 {
        return Err(Error::InvalidParams("grid must have at least one point per leg".into()));
    }
    if !(scale >= 0.0 && scale.is_finite()) {
        return Err(Error::NonPositiveScale(scale));
    }
    PseudoMetricMatrix::from_flat(layout_labels(params.depth(), grid), spider_data(params, grid, scale))
}

/// `(N+1)·grid + 1` samples of `(Υ, K·R[a])`.
pub fn build_spider(params: &SpiderParams, grid: usize, scale: f64) -> Result<SpiderSpace> {
    if scale == 0.0 {
        return Err(Error::NonPositiveScale(scale));
    }
    let m = spider_matrix(params, grid, scale)?;
    Ok(SpiderSpace {
        space: FiniteMetricSpace::from_trusted(m),
        layout: spider_layout(params.depth(), grid),
        params: params.clone(),
        scale,
        grid,
    })
}

/// Both sides of the `D(R[a], R[b]) ≤ 2τ(a, b)` bound on a shared grid, with `K = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzGap {
    pub lhs: f64,
    pub rhs: f64,
}

impl LipschitzGap {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

pub fn lipschitz_gap(a: &SpiderParams, b: &SpiderParams, grid: usize) -> Result<LipschitzGap> {
    let rhs = 2.0 * tau(a, b)?;
    if grid == 0 {
        return Err(Error::InvalidParams("grid must have at least one point per leg".into()));
    }
    let lhs = uniform_distance_unlabeled(&spider_data(a, grid, 1.0), &spider_data(b, grid, 1.0));
    Ok(LipschitzGap { lhs, rhs })
}

/// Scale and leg parameters recovered from a distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    /// `K`, the distance from the center to the tip of leg 0.
    pub scale: f64,
    /// `aᵢ = (tip distance of leg i) / K` for `i ≥ 1`.
    pub a: Vec<f64>,
    pub center: usize,
    /// Tip indices, leg 0 first.
    pub tips: Vec<usize>,
}

impl Fingerprint {
    /// Largest coordinate difference over `(K, a₁, …)`; infinite if depths differ.
    pub fn separation(&self, other: &Fingerprint) -> f64 {
        if self.a.len() != other.a.len() {
            return f64::INFINITY;
        }
        self.a
            .iter()
            .zip(&other.a)
            .map(|(x, y)| (x - y).abs())
            .fold((self.scale - other.scale).abs(), f64::max)
    }

    pub fn params(&self) -> Result<SpiderParams> {
        SpiderParams::new(self.a.clone())
    }
}

fn fail(stage: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Fingerprint { stage: stage.into(), reason: reason.into() }
}

/// Recovers `(K, a)` from a discretized spider.
///
/// Spiders with at least two extra legs are handled by the tip recursion: the
/// center is the point where every off-diameter sample branches off the
/// diameter geodesic, the farthest remaining point is the next tip, and every
/// point on the geodesic from the center to that tip is removed with it.
/// Spiders with `N ≤ 1` are paths, where the center is the sample at which the
/// grid spacing changes.
pub fn fingerprint(x: &PseudoMetricMatrix) -> Result<Fingerprint> {
    let n = x.len();
    if n < 2 {
        return Err(fail("input", format!("need at least two points, got {n}")));
    }
    let (u, v) = diameter_pair(x);
    let diam = x.get(u, v);
    if diam <= 0.0 {
        return Err(fail("input", "all points coincide"));
    }
    let tol = LEG_TOL * diam;
    if (0..n).all(|w| x.get(u, w) + x.get(w, v) <= diam + tol) {
        return fingerprint_path(x, u, tol);
    }

    let center = branch_center(x, u, v, tol)?;

    let mut remaining: Vec<usize> = (0..n).filter(|&i| i != center).collect();
    let mut tips = Vec::new();
    let mut tip_dists = Vec::new();
    let mut legs: Vec<Vec<usize>> = Vec::new();
    while !remaining.is_empty() {
        let leg_no = tips.len();
        let tip = *remaining
            .iter()
            .max_by(|&&a, &&b| x.get(center, a).total_cmp(&x.get(center, b)).then(b.cmp(&a)))
            .expect("non-empty");
        let reach = x.get(center, tip);
        if let Some(&other) = remaining.iter().find(|&&w| w != tip && (x.get(center, w) - reach).abs() <= tol) {
            return Err(fail(format!("tip {leg_no}"), format!("points {tip} and {other} tie at distance {reach}")));
        }
        let (on_leg, rest): (Vec<usize>, Vec<usize>) =
            remaining.iter().partition(|&&w| x.get(center, w) + x.get(w, tip) <= reach + tol);
        tips.push(tip);
        tip_dists.push(reach);
        legs.push(on_leg);
        remaining = rest;
    }
    check_tree(x, center, &legs, tol)?;

    let scale = tip_dists[0];
    let a = tip_dists[1..].iter().map(|d| d / scale).collect();
    Ok(Fingerprint { scale, a, center, tips })
}

/// The sample where all points off the `u`–`v` geodesic branch from it.
///
/// For a tree, `w` leaves the geodesic at distance `(d(u,w) + d(u,v) − d(v,w)) / 2`
/// from `u`; a spider has a single such branch point, its center.
fn branch_center(x: &PseudoMetricMatrix, u: usize, v: usize, tol: f64) -> Result<usize> {
    let n = x.len();
    let duv = x.get(u, v);
    let mut branch: Option<(usize, f64)> = None;
    for w in 0..n {
        let off = x.get(u, w) + x.get(w, v) - duv;
        if off <= tol {
            continue;
        }
        let along = 0.5 * (x.get(u, w) + duv - x.get(v, w));
        match branch {
            None => branch = Some((w, along)),
            Some((first, b)) if (b - along).abs() > tol => {
                return Err(fail(
                    "center",
                    format!("points {first} and {w} branch off the diameter at {b} and {along}"),
                ));
            }
            Some(_) => {}
        }
    }
    let (_, along) = branch.expect("caller checked that some point is off the diameter");
    let mut hits = (0..n).filter(|&c| {
        (x.get(u, c) - along).abs() <= tol && x.get(u, c) + x.get(c, v) <= duv + tol
    });
    match (hits.next(), hits.next()) {
        (Some(c), None) => Ok(c),
        (None, _) => Err(fail("center", format!("no sample at the branch point {along} from point {u}"))),
        (Some(a), Some(b)) => Err(fail("center", format!("points {a} and {b} both sit at the branch point"))),
    }
}

/// Every distance must be what a tree with the recovered legs predicts.
fn check_tree(x: &PseudoMetricMatrix, center: usize, legs: &[Vec<usize>], tol: f64) -> Result<()> {
    let n = x.len();
    let mut leg_of = vec![usize::MAX; n];
    for (l, members) in legs.iter().enumerate() {
        for &w in members {
            leg_of[w] = l;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if i == center || j == center {
                continue;
            }
            let (ri, rj) = (x.get(center, i), x.get(center, j));
            let predicted = if leg_of[i] == leg_of[j] { (ri - rj).abs() } else { ri + rj };
            if (x.get(i, j) - predicted).abs() > tol {
                return Err(fail(
                    format!("leg {}", leg_of[i].min(leg_of[j])),
                    format!("d({i},{j}) = {} but a tree predicts {predicted}", x.get(i, j)),
                ));
            }
        }
    }
    Ok(())
}

/// Spiders with at most one extra leg: points on a segment.
fn fingerprint_path(x: &PseudoMetricMatrix, end: usize, tol: f64) -> Result<Fingerprint> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x.get(end, a).total_cmp(&x.get(end, b)));
    let pos: Vec<f64> = order.iter().map(|&w| x.get(end, w)).collect();
    let gaps: Vec<f64> = pos.windows(2).map(|w| w[1] - w[0]).collect();
    if gaps.iter().any(|&g| g <= tol) {
        return Err(fail("legs", "two samples coincide"));
    }
    let same = |g: f64, h: f64| (g - h).abs() <= 1e-6 * g.max(h);
    let split = gaps.iter().position(|&g| !same(g, gaps[0])).unwrap_or(gaps.len());
    if gaps[split..].iter().any(|&g| !same(g, gaps[split.min(gaps.len() - 1)])) {
        return Err(fail("legs", "grid spacing changes more than once along the path"));
    }
    let total = pos[n - 1];
    if split == gaps.len() {
        // Single leg; the center is either end.
        return Ok(Fingerprint { scale: total, a: Vec::new(), center: order[0], tips: vec![order[n - 1]] });
    }
    let center = order[split];
    let (first, second) = (pos[split], total - pos[split]);
    // Leg 0 has the coarser spacing.
    let (scale, other, tip0, tip1) = if gaps[0] > gaps[split] {
        (first, second, order[0], order[n - 1])
    } else {
        (second, first, order[n - 1], order[0])
    };
    Ok(Fingerprint { scale, a: vec![other / scale], center, tips: vec![tip0, tip1] })
}

fn diameter_pair(x: &PseudoMetricMatrix) -> (usize, usize) {
    let n = x.len();
    let mut best = (0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            if x.get(i, j) > x.get(best.0, best.1) {
                best = (i, j);
            }
        }
    }
    best
}
