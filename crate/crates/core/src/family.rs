//! A continuous family of metric spaces over a parameter square.
//!
//! For anchor spaces `X₁, …, X_{n+1}` pinned at distinct points `vᵢ` of the unit
//! square `H`, each `(s, k) ∈ H × {1..m}` yields a space `F(s, k)`:
//!
//! * `E_s` is the ℓ²-product metric on `P = ∏ Xᵢ` with factor `i` weighted by `ζᵢ(s)`;
//! * a spider with parameters `ρ(s, k)`, scaled by `ξ(s)`, is wedged onto `P` at a
//!   chosen point `p` identified with the tip `1₀`;
//! * `F(s, k)` is the metric quotient of the glued pseudo-metric `D_{s,k}`.
//!
//! `ζᵢ` is 1 exactly at `vᵢ` and 0 exactly at the other anchors, `ξ` vanishes
//! exactly on the anchors, so `F(vᵢ, k)` collapses to `Xᵢ` for every branch while
//! points off the anchors carry a spider whose parameters identify `(s, k)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::{glue_matrices, weighted_l2_product, ProductShape};
use crate::error::{Error, Result};
use crate::gh::{gh_exact, gh_lower_diam, gh_upper_greedy, EXACT_CAP};
use crate::metric::{
    quotient, uniform_distance_unlabeled, validate_with_tol, zero_classes, FiniteMetricSpace, PseudoMetricMatrix,
    TRIANGLE_TOL,
};
use crate::spider::{fingerprint, spider_layout, spider_matrix, tip_index, Fingerprint, SpiderParams};

/// A point of the parameter square `[0, 1]²`.
pub type Param = [f64; 2];

/// Largest product `|P| = ∏ |Xᵢ|` accepted.
pub const MAX_PRODUCT: usize = 125;

pub const DEFAULT_PARAM_GRID: usize = 16;

fn default_grid() -> usize {
    DEFAULT_PARAM_GRID
}

fn default_legs() -> usize {
    crate::spider::DEFAULT_LEGS
}

fn default_leg_grid() -> usize {
    crate::spider::DEFAULT_GRID
}

/// Everything needed to materialize `F(s, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyConfig {
    pub anchors: Vec<FiniteMetricSpace>,
    pub anchor_points: Vec<Param>,
    /// Grid resolution per side of the parameter square.
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// Branch count `m`; `n + 2` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<usize>,
    /// Spider truncation depth `N`.
    #[serde(default = "default_legs")]
    pub legs: usize,
    /// Samples per spider leg.
    #[serde(default = "default_leg_grid")]
    pub leg_grid: usize,
    /// Index into each anchor of the wedge point's coordinate; all zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wedge: Option<Vec<usize>>,
}

fn path_space(prefix: &str, n: usize, step: f64) -> FiniteMetricSpace {
    let labels = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let m = PseudoMetricMatrix::from_fn(labels, |i, j| step * i.abs_diff(j) as f64).expect("finite entries");
    FiniteMetricSpace::from_computed(m).expect("path metric")
}

fn triangle_space(prefix: &str, side: f64) -> FiniteMetricSpace {
    let labels = (0..3).map(|i| format!("{prefix}{i}")).collect();
    let m = PseudoMetricMatrix::from_fn(labels, |_, _| side).expect("finite entries");
    FiniteMetricSpace::from_computed(m).expect("equilateral metric")
}

impl Default for FamilyConfig {
    /// Two anchors at opposite corners: a 3-point path of step 1 and a 4-point path of step 0.5.
    fn default() -> Self {
        Self {
            anchors: vec![path_space("a", 3, 1.0), path_space("b", 4, 0.5)],
            anchor_points: vec![[0.0, 0.0], [1.0, 1.0]],
            grid: DEFAULT_PARAM_GRID,
            branches: None,
            legs: default_legs(),
            leg_grid: default_leg_grid(),
            wedge: None,
        }
    }
}

impl FamilyConfig {
    /// Three anchors on three corners; adds an equilateral triangle of side 1.
    pub fn three_anchors() -> Self {
        Self {
            anchors: vec![path_space("a", 3, 1.0), path_space("b", 4, 0.5), triangle_space("c", 1.0)],
            anchor_points: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            ..Self::default()
        }
    }

    /// `n + 1`.
    pub fn anchor_count(&self) -> usize {
        self.anchors.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.unwrap_or(self.anchors.len() + 1)
    }
}

/// Where the pieces of `Z = P ∪ Υ` sit in `D_{s,k}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZLayout {
    /// `P` occupies indices `0..product_len`.
    pub product_len: usize,
    /// Index of the wedge point `p ≡ 1₀`.
    pub wedge: usize,
    /// Index in `Z` of each spider sample, in spider layout order.
    pub spider: Vec<usize>,
}

/// One parameter grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub i: usize,
    pub j: usize,
    pub s: Param,
}

/// The `g × g` grid `{(i/(g−1), j/(g−1))}`, `i` major.
pub fn grid_points(g: usize) -> Vec<GridPoint> {
    let step = |k: usize| if g > 1 { k as f64 / (g - 1) as f64 } else { 0.0 };
    (0..g).flat_map(|i| (0..g).map(move |j| GridPoint { i, j, s: [step(i), step(j)] })).collect()
}

fn param_dist(a: Param, b: Param) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// A validated configuration with its product and layout precomputed.
#[derive(Debug, Clone)]
pub struct Family {
    cfg: FamilyConfig,
    wedge: usize,
    layout: ZLayout,
    threshold: f64,
}

impl Family {
    pub fn new(cfg: FamilyConfig) -> Result<Self> {
        let n1 = cfg.anchors.len();
        if n1 < 2 {
            return Err(Error::Config(format!("need at least two anchors, got {n1}")));
        }
        if cfg.anchor_points.len() != n1 {
            return Err(Error::Config(format!("{n1} anchors but {} anchor points", cfg.anchor_points.len())));
        }
        for (i, v) in cfg.anchor_points.iter().enumerate() {
            if !v.iter().all(|c| (0.0..=1.0).contains(c)) {
                return Err(Error::Config(format!("anchor point {i} = {v:?} lies outside the unit square")));
            }
            if let Some(j) = cfg.anchor_points[..i].iter().position(|w| w == v) {
                return Err(Error::Config(format!("anchor points {j} and {i} coincide")));
            }
        }
        if cfg.branch_count() < 2 {
            return Err(Error::Config("need at least two branches".into()));
        }
        if cfg.legs < 3 {
            return Err(Error::Config(format!("the spider needs at least 3 legs beyond leg 0, got {}", cfg.legs)));
        }
        if cfg.leg_grid < 2 || cfg.grid < 2 {
            return Err(Error::Config("grids need at least two points".into()));
        }
        let sizes: Vec<usize> = cfg.anchors.iter().map(|a| a.len()).collect();
        let product: usize = sizes.iter().product();
        if product > MAX_PRODUCT {
            return Err(Error::ProductTooLarge { size: product, cap: MAX_PRODUCT });
        }
        let shape = ProductShape::new(sizes.clone())?;
        let wedge_coords = cfg.wedge.clone().unwrap_or_else(|| vec![0; n1]);
        if wedge_coords.len() != n1 || wedge_coords.iter().zip(&sizes).any(|(&c, &s)| c >= s) {
            return Err(Error::Config(format!("wedge {wedge_coords:?} does not index the anchors")));
        }
        let wedge = shape.flat(&wedge_coords);

        let mut threshold = f64::INFINITY;
        for i in 0..n1 {
            for j in (i + 1)..n1 {
                let (a, b) = (&cfg.anchors[i], &cfg.anchors[j]);
                let mut lower = gh_lower_diam(a, b);
                if lower == 0.0 && a.len() <= EXACT_CAP && b.len() <= EXACT_CAP {
                    lower = gh_exact(a, b, EXACT_CAP)?.value;
                }
                if lower == 0.0 {
                    return Err(Error::Config(format!(
                        "anchors {i} and {j} cannot be told apart (GH lower bound 0)"
                    )));
                }
                threshold = threshold.min(0.5 * lower);
            }
        }

        let spider_len = (cfg.legs + 1) * cfg.leg_grid + 1;
        let tip0 = tip_index(0, cfg.leg_grid);
        let spider = (0..spider_len)
            .map(|t| match t.cmp(&tip0) {
                std::cmp::Ordering::Less => product + t,
                std::cmp::Ordering::Equal => wedge,
                std::cmp::Ordering::Greater => product + t - 1,
            })
            .collect();
        let layout = ZLayout { product_len: product, wedge, spider };
        Ok(Self { cfg, wedge, layout, threshold })
    }

    pub fn config(&self) -> &FamilyConfig {
        &self.cfg
    }

    pub fn layout(&self) -> &ZLayout {
        &self.layout
    }

    /// Size of `Z = P ∪ Υ`.
    pub fn z_len(&self) -> usize {
        self.layout.product_len + self.layout.spider.len() - 1
    }

    /// GH bound below which a space counts as equal to an anchor.
    pub fn match_threshold(&self) -> f64 {
        self.threshold
    }

    pub fn anchor_at(&self, s: Param) -> Option<usize> {
        self.cfg.anchor_points.iter().position(|&v| v == s)
    }

    /// `ζᵢ(s) = gᵢ(s) / (gᵢ(s) + |s − vᵢ|)` with `gᵢ(s) = min_{j≠i} |s − vⱼ|`.
    pub fn zeta(&self, i: usize, s: Param) -> f64 {
        let pts = &self.cfg.anchor_points;
        let own = param_dist(s, pts[i]);
        if own == 0.0 {
            return 1.0;
        }
        let others = pts
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| param_dist(s, v))
            .fold(f64::INFINITY, f64::min);
        others / (others + own)
    }

    /// `ξ(s) = min(1, min_i |s − vᵢ|)`.
    pub fn xi(&self, s: Param) -> f64 {
        self.cfg.anchor_points.iter().map(|&v| param_dist(s, v)).fold(1.0, f64::min)
    }

    /// Lipschitz bound `1 / min_{i≠j} |vᵢ − vⱼ|` shared by every `ζᵢ`.
    pub fn zeta_lipschitz(&self) -> f64 {
        let pts = &self.cfg.anchor_points;
        let mut sep = f64::INFINITY;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                sep = sep.min(param_dist(pts[i], pts[j]));
            }
        }
        1.0 / sep
    }

    fn check_branch(&self, k: usize) -> Result<()> {
        let m = self.cfg.branch_count();
        if (1..=m).contains(&k) {
            Ok(())
        } else {
            Err(Error::Config(format!("branch {k} outside 1..={m}")))
        }
    }

    /// `ρ(π(s, k))`: `aᵢ = 4^(−i)·(1 + uᵢ)` for `u = (s₁, s₂, ξ(s)·(k−1)/(m−1))`, `aᵢ = 4^(−i)` beyond.
    ///
    /// Branches coincide exactly where `ξ` vanishes, i.e. at the anchors.
    pub fn spider_params(&self, s: Param, k: usize) -> Result<SpiderParams> {
        self.check_branch(k)?;
        let m = self.cfg.branch_count();
        let u = [s[0], s[1], self.xi(s) * (k - 1) as f64 / (m - 1) as f64];
        let a = (1..=self.cfg.legs)
            .map(|i| {
                let base = 0.25f64.powi(i as i32);
                if i <= 3 {
                    base * (1.0 + u[i - 1])
                } else {
                    base
                }
            })
            .collect();
        SpiderParams::new(a)
    }

    /// `E_s(x, y) = sqrt(Σ (ζᵢ(s)·dᵢ(xᵢ, yᵢ))²)` on `P`.
    pub fn build_e(&self, s: Param) -> Result<PseudoMetricMatrix> {
        let factors: Vec<&PseudoMetricMatrix> = self.cfg.anchors.iter().map(|a| a.as_matrix()).collect();
        let weights: Vec<f64> = (0..factors.len()).map(|i| self.zeta(i, s)).collect();
        weighted_l2_product(&factors, &weights)
    }

    /// `D_{s,k}` on `Z`: `E_s` on `P`, `ξ(s)·R[ρ(s,k)]` on `Υ`, and
    /// `E_s(x, p) + ξ(s)·R(p, y)` across.
    pub fn build_d(&self, s: Param, k: usize) -> Result<PseudoMetricMatrix> {
        let e = self.build_e(s)?;
        let spider = spider_matrix(&self.spider_params(s, k)?, self.cfg.leg_grid, self.xi(s))?;
        glue_matrices(&e, &spider, self.wedge, tip_index(0, self.cfg.leg_grid))
    }

    /// The anchor itself at an anchor, otherwise the quotient of `D_{s,k}`.
    pub fn build_f(&self, s: Param, k: usize) -> Result<FiniteMetricSpace> {
        self.check_branch(k)?;
        match self.anchor_at(s) {
            Some(i) => Ok(self.cfg.anchors[i].clone()),
            None => Ok(quotient(&self.build_d(s, k)?)?.space),
        }
    }

    /// Spider block of a `D_{s,k}` matrix, in spider layout order.
    pub fn spider_block(&self, d: &PseudoMetricMatrix) -> Result<PseudoMetricMatrix> {
        d.submatrix(&self.layout.spider)
    }

    /// Whether `D_{s,k}` is a metric (no zero distances, triangle within tolerance).
    pub fn is_metric_at(&self, s: Param, k: usize) -> Result<bool> {
        Ok(validate_with_tol(&self.build_d(s, k)?, true, TRIANGLE_TOL).is_valid())
    }

    /// Does `F(s, k)` equal anchor `i`? Equal spaces have equally many points,
    /// and then a GH bound below the match threshold decides.
    fn matches_anchor(&self, d: &PseudoMetricMatrix, i: usize) -> Result<bool> {
        let anchor = &self.cfg.anchors[i];
        let (_, classes) = zero_classes(d);
        if classes.len() != anchor.len() {
            return Ok(false);
        }
        let f = quotient(d)?.space;
        let bound = if f.len() <= EXACT_CAP && anchor.len() <= EXACT_CAP {
            gh_exact(&f, anchor, EXACT_CAP)?.value
        } else {
            gh_upper_greedy(&f, anchor)?.value
        };
        Ok(bound < self.threshold)
    }

    fn off_anchor_grid(&self, g: usize) -> Vec<GridPoint> {
        grid_points(g).into_iter().filter(|p| self.anchor_at(p.s).is_none()).collect()
    }

    /// `table[i][k−1]`: some off-anchor grid point has `F(s, k)` equal to anchor `i`.
    pub fn collision_table(&self, g: usize) -> Result<Vec<Vec<bool>>> {
        let n1 = self.cfg.anchor_count();
        let m = self.cfg.branch_count();
        let points = self.off_anchor_grid(g);
        let hits: Vec<Vec<bool>> = points
            .par_iter()
            .map(|p| -> Result<Vec<bool>> {
                let mut row = vec![false; n1 * m];
                for k in 1..=m {
                    let d = self.build_d(p.s, k)?;
                    for i in 0..n1 {
                        row[i * m + k - 1] = self.matches_anchor(&d, i)?;
                    }
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Ok((0..n1)
            .map(|i| (0..m).map(|k| hits.iter().any(|h| h[i * m + k])).collect())
            .collect())
    }

    /// Smallest branch whose column of the collision table is clean.
    pub fn select_branch(&self, g: usize) -> Result<BranchSelection> {
        let table = self.collision_table(g)?;
        let k = first_clean_branch(&table)?;
        Ok(BranchSelection { k, table })
    }

    /// Fingerprints the spider block of `D_{s,k}` at every off-anchor grid point
    /// and measures how far apart the recovered parameters are.
    pub fn injectivity_sweep(&self, g: usize, k: usize) -> Result<InjectivityReport> {
        self.check_branch(k)?;
        let points = self.off_anchor_grid(g);
        let prints: Vec<Fingerprint> = points
            .par_iter()
            .map(|p| fingerprint(&self.spider_block(&self.build_d(p.s, k)?)?))
            .collect::<Result<_>>()?;
        let seps: Vec<f64> = (0..prints.len())
            .into_par_iter()
            .map(|a| {
                (0..prints.len())
                    .filter(|&b| b != a)
                    .map(|b| prints[a].separation(&prints[b]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let min_separation = seps.iter().copied().fold(f64::INFINITY, f64::min);
        let entries = points
            .into_iter()
            .zip(prints)
            .zip(seps)
            .map(|((point, fingerprint), min_separation)| InjectivityEntry { point, fingerprint, min_separation })
            .collect();
        Ok(InjectivityReport { k, entries, min_separation })
    }

    /// `C` with `gh_upper_same_labels(D_s, D_t) ≤ C·|s − t|`.
    ///
    /// `E` moves by at most `Lζ·sqrt(Σ diam(Xᵢ)²)·h`; the spider term by
    /// `diam(R)·h + 2τ ≤ 2h + h/2` since `ξ` is 1-Lipschitz, `R` has diameter
    /// below 2 and `ρ` moves each `aᵢ` by at most `h/4`. Cross distances add both.
    pub fn continuity_constant(&self) -> f64 {
        let diam_sq: f64 = self.cfg.anchors.iter().map(|a| a.diameter().powi(2)).sum();
        0.5 * (self.zeta_lipschitz() * diam_sq.sqrt() + 2.0 + 0.5)
    }

    /// Half the uniform distance across every horizontal and vertical grid edge.
    pub fn continuity_sweep(&self, g: usize, k: usize) -> Result<ContinuityReport> {
        self.check_branch(k)?;
        let points = grid_points(g);
        let mats: Vec<PseudoMetricMatrix> =
            points.par_iter().map(|p| self.build_d(p.s, k)).collect::<Result<_>>()?;
        let mut edges = Vec::new();
        for p in &points {
            let a = p.i * g + p.j;
            if p.i + 1 < g {
                edges.push((a, a + g));
            }
            if p.j + 1 < g {
                edges.push((a, a + 1));
            }
        }
        let edges: Vec<EdgeBound> = edges
            .into_par_iter()
            .map(|(a, b)| EdgeBound {
                from: points[a].s,
                to: points[b].s,
                bound: 0.5 * uniform_distance_unlabeled(mats[a].data(), mats[b].data()),
            })
            .collect();
        let max_edge_bound = edges.iter().map(|e| e.bound).fold(0.0, f64::max);
        Ok(ContinuityReport {
            k,
            mesh: 1.0 / (g - 1) as f64,
            constant: self.continuity_constant(),
            max_edge_bound,
            edges,
        })
    }

    /// Branch selection, injectivity and continuity on one grid, one row per off-anchor point.
    pub fn sweep(&self, g: usize) -> Result<SweepReport> {
        let selection = self.select_branch(g)?;
        let k = selection.k;
        let injectivity = self.injectivity_sweep(g, k)?;
        let continuity = self.continuity_sweep(g, k)?;
        let rows = injectivity
            .entries
            .par_iter()
            .map(|e| -> Result<SweepRow> {
                let continuity_bound = continuity
                    .edges
                    .iter()
                    .filter(|b| b.from == e.point.s || b.to == e.point.s)
                    .map(|b| b.bound)
                    .fold(0.0, f64::max);
                Ok(SweepRow {
                    s1: e.point.s[0],
                    s2: e.point.s[1],
                    k,
                    min_fingerprint_sep: e.min_separation,
                    continuity_bound,
                    is_metric: self.is_metric_at(e.point.s, k)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(SweepReport {
            k,
            collision_table: selection.table,
            min_fingerprint_sep: injectivity.min_separation,
            max_edge_bound: continuity.max_edge_bound,
            rows,
        })
    }
}

/// Smallest 1-based branch `k` with no collision in column `k`.
pub fn first_clean_branch(table: &[Vec<bool>]) -> Result<usize> {
    let m = table.first().map_or(0, |r| r.len());
    (0..m)
        .find(|&k| table.iter().all(|row| !row[k]))
        .map(|k| k + 1)
        .ok_or_else(|| Error::NoCleanBranch { table: table.to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSelection {
    pub k: usize,
    /// Rows are anchors, columns branches.
    pub table: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityEntry {
    pub point: GridPoint,
    pub fingerprint: Fingerprint,
    /// Distance to the nearest other fingerprint of the sweep.
    pub min_separation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub k: usize,
    pub entries: Vec<InjectivityEntry>,
    pub min_separation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeBound {
    pub from: Param,
    pub to: Param,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub k: usize,
    pub mesh: f64,
    pub constant: f64,
    pub max_edge_bound: f64,
    pub edges: Vec<EdgeBound>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub s1: f64,
    pub s2: f64,
    pub k: usize,
    pub min_fingerprint_sep: f64,
    pub continuity_bound: f64,
    pub is_metric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub k: usize,
    pub collision_table: Vec<Vec<bool>>,
    pub min_fingerprint_sep: f64,
    pub max_edge_bound: f64,
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "s1,s2,k,min_fingerprint_sep,continuity_bound,is_metric";

impl SweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.s1, r.s2, r.k, r.min_fingerprint_sep, r.continuity_bound, r.is_metric
            ));
        }
        out
    }
}

type Point2 = (f64, f64);

fn plane_dist(a: Point2, b: Point2) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Dense points of the sine curve over `[lo, 1]`: equally spaced in `x`, plus
/// equally spaced in phase `1/x` so the oscillations near `lo` stay resolved.
fn dense_sine(lo: f64) -> Vec<Point2> {
    const X_STEPS: usize = 4000;
    const PER_RADIAN: f64 = 64.0;
    let hi = 1.0 / lo;
    let phase_steps = ((hi - 1.0) * PER_RADIAN) as usize + 1;
    let mut xs: Vec<f64> = (0..=X_STEPS)
        .map(|i| lo + (1.0 - lo) * i as f64 / X_STEPS as f64)
        .chain((0..=phase_steps).map(|i| 1.0 / (1.0 + (hi - 1.0) * i as f64 / phase_steps as f64)))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.into_iter().map(|x| (x, (1.0 / x).sin())).collect()
}

/// Samples sine curves at the points nearest a fixed net of their limit set.
///
/// The limit set is the graph of `sin(1/x)` over `(0, 1]` together with the
/// segment `{0} × [−1, 1]`. Sample `k` of every `X_n` is the point of `X_n`
/// nearest net point `k` (not already taken), so the samples of `X_n`
/// converge as `n` grows instead of reshuffling.
#[derive(Debug, Clone)]
pub struct SineSampler {
    net: Vec<Point2>,
}

/// Depth `2^(−LIMIT_DEPTH)` at which the limit set's graph part is cut off.
const LIMIT_DEPTH: i32 = 12;

impl SineSampler {
    pub fn new(samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::EmptySet);
        }
        let mut limit = dense_sine(0.5f64.powi(LIMIT_DEPTH));
        const SEGMENT_STEPS: usize = 2000;
        limit.extend((0..=SEGMENT_STEPS).map(|i| (0.0, -1.0 + 2.0 * i as f64 / SEGMENT_STEPS as f64)));
        if samples > limit.len() {
            return Err(Error::TooLarge { size: samples, cap: limit.len() });
        }
        // Farthest-point traversal from the right end of the curve.
        let mut net = vec![limit[limit.len() - SEGMENT_STEPS - 2]];
        let mut gap: Vec<f64> = limit.iter().map(|&p| plane_dist(p, net[0])).collect();
        while net.len() < samples {
            let k = (0..limit.len())
                .max_by(|&a, &b| gap[a].total_cmp(&gap[b]).then(b.cmp(&a)))
                .expect("limit set is non-empty");
            let p = limit[k];
            net.push(p);
            for (g, &q) in gap.iter_mut().zip(&limit) {
                *g = g.min(plane_dist(p, q));
            }
        }
        Ok(Self { net })
    }

    pub fn samples(&self) -> usize {
        self.net.len()
    }

    /// Samples of `X_n = {(x, sin(1/x)) : x ∈ [2^(−n), 1]}`; `X_0` is a single point.
    pub fn curve(&self, n: u32) -> Result<FiniteMetricSpace> {
        let pts = if n == 0 {
            vec![(1.0, 1f64.sin())]
        } else {
            let dense = dense_sine(0.5f64.powi(n as i32));
            if self.net.len() > dense.len() {
                return Err(Error::TooLarge { size: self.net.len(), cap: dense.len() });
            }
            let mut used = vec![false; dense.len()];
            self.net
                .iter()
                .map(|&t| {
                    let k = (0..dense.len())
                        .filter(|&k| !used[k])
                        .min_by(|&a, &b| plane_dist(dense[a], t).total_cmp(&plane_dist(dense[b], t)))
                        .expect("enough dense points");
                    used[k] = true;
                    dense[k]
                })
                .collect()
        };
        let labels = (0..pts.len()).map(|k| format!("x{k}")).collect();
        let m = PseudoMetricMatrix::from_fn(labels, |a, b| plane_dist(pts[a], pts[b]))?;
        FiniteMetricSpace::from_computed(m)
    }
}

/// `samples` points of the sine curve `X_n`; see [`SineSampler`].
pub fn sine_curve(n: u32, samples: usize) -> Result<FiniteMetricSpace> {
    SineSampler::new(samples)?.curve(n)
}

/// Indices in [`spider_layout`] order, for callers that need the spider coordinates.
pub fn spider_points(cfg: &FamilyConfig) -> Vec<crate::spider::SpiderPoint> {
    spider_layout(cfg.legs, cfg.leg_grid)
}
