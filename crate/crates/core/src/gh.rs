//! Hausdorff and Gromov–Hausdorff distances between finite spaces.
//!
//! GH distance is computed as half the least distortion over correspondences.
//! [`gh_exact`] searches all correspondences by branch and bound and is capped
//! at [`EXACT_CAP`] points per side; [`gh_lower_diam`], [`gh_upper_same_labels`]
//! and [`gh_upper_greedy`] bound it for larger spaces.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{uniform_distance, PseudoMetricMatrix};

pub const EXACT_CAP: usize = 6;

/// Relation between the points of two spaces that covers both sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawCorrespondence", into = "RawCorrespondence")]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
    nx: usize,
    ny: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCorrespondence {
    nx: usize,
    ny: usize,
    pairs: Vec<[usize; 2]>,
}

impl TryFrom<RawCorrespondence> for Correspondence {
    type Error = Error;

    fn try_from(raw: RawCorrespondence) -> Result<Self> {
        Correspondence::new(raw.pairs.into_iter().map(|[i, j]| (i, j)).collect(), raw.nx, raw.ny)
    }
}

impl From<Correspondence> for RawCorrespondence {
    fn from(c: Correspondence) -> Self {
        RawCorrespondence { nx: c.nx, ny: c.ny, pairs: c.pairs.into_iter().map(|(i, j)| [i, j]).collect() }
    }
}

impl Correspondence {
    /// Sorts and deduplicates `pairs`, then checks both sides are covered.
    pub fn new(mut pairs: Vec<(usize, usize)>, nx: usize, ny: usize) -> Result<Self> {
        pairs.sort_unstable();
        pairs.dedup();
        let mut cx = vec![false; nx];
        let mut cy = vec![false; ny];
        for &(i, j) in &pairs {
            if i >= nx {
                return Err(Error::IndexOutOfRange { index: i, size: nx });
            }
            if j >= ny {
                return Err(Error::IndexOutOfRange { index: j, size: ny });
            }
            cx[i] = true;
            cy[j] = true;
        }
        if let Some(index) = cx.iter().position(|c| !c) {
            return Err(Error::Coverage { side: "first", index });
        }
        if let Some(index) = cy.iter().position(|c| !c) {
            return Err(Error::Coverage { side: "second", index });
        }
        Ok(Self { pairs, nx, ny })
    }

    pub fn identity(n: usize) -> Self {
        Self { pairs: (0..n).map(|i| (i, i)).collect(), nx: n, ny: n }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn transpose(&self) -> Self {
        let pairs = self.pairs.iter().map(|&(i, j)| (j, i)).collect();
        Self::new(pairs, self.ny, self.nx).expect("transpose of a correspondence covers both sides")
    }
}

/// Hausdorff distance between two non-empty index sets of `z`.
pub fn hausdorff(a: &[usize], b: &[usize], z: &PseudoMetricMatrix) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    for &i in a.iter().chain(b) {
        z.check_index(i)?;
    }
    let directed = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&p| to.iter().map(|&q| z.get(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Worst `|d_X(i, i′) − d_Y(j, j′)|` over pairs of related points.
pub fn distortion(c: &Correspondence, x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> Result<f64> {
    if c.sizes() != (x.len(), y.len()) {
        return Err(Error::LabelCount { labels: c.nx.max(c.ny), size: x.len().max(y.len()) });
    }
    Ok(pair_distortion(c.pairs(), x, y))
}

fn pair_distortion(pairs: &[(usize, usize)], x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, &(i, j)) in pairs.iter().enumerate() {
        for &(i2, j2) in &pairs[k + 1..] {
            worst = worst.max((x.get(i, i2) - y.get(j, j2)).abs());
        }
    }
    worst
}

/// Worst discrepancy of the pair `(i, j)` against every pair in `pairs`.
fn added_distortion(i: usize, j: usize, pairs: &[(usize, usize)], x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> f64 {
    pairs.iter().map(|&(i2, j2)| (x.get(i, i2) - y.get(j, j2)).abs()).fold(0.0, f64::max)
}

/// A GH value together with a correspondence attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhSolution {
    pub value: f64,
    pub witness: Correspondence,
}

/// `(1/2)·|diam X − diam Y|`.
pub fn gh_lower_diam(x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> f64 {
    0.5 * (x.diameter() - y.diameter()).abs()
}

/// Half the uniform distance of two metrics on one label set (identity correspondence).
pub fn gh_upper_same_labels(d: &PseudoMetricMatrix, e: &PseudoMetricMatrix) -> Result<f64> {
    Ok(0.5 * uniform_distance(d, e)?)
}

/// Exact GH distance for spaces of at most `cap` points.
///
/// Every correspondence contains one of the form `graph(f) ∪ {(g(y), y) : y ∉ im f}`
/// for maps `f: X → Y` and `g`, and distortion only grows with the relation,
/// so it is enough to search those. Points are assigned in order of decreasing
/// eccentricity and a branch is cut as soon as its partial distortion reaches
/// the incumbent, which starts at the greedy bound.
pub fn gh_exact(x: &PseudoMetricMatrix, y: &PseudoMetricMatrix, cap: usize) -> Result<GhSolution> {
    for s in [x, y] {
        if s.is_empty() {
            return Err(Error::EmptySet);
        }
        if s.len() > cap {
            return Err(Error::TooLarge { size: s.len(), cap });
        }
    }
    let greedy = gh_upper_greedy(x, y)?;
    let mut search = Search {
        x,
        y,
        x_order: by_eccentricity(x),
        best: 2.0 * greedy.value,
        best_pairs: greedy.witness.pairs().to_vec(),
        floor: (x.diameter() - y.diameter()).abs(),
        pairs: Vec::with_capacity(x.len() + y.len()),
        covered: vec![0; y.len()],
    };
    if search.best > search.floor {
        search.assign_x(0, 0.0);
    }
    let witness = Correspondence::new(search.best_pairs, x.len(), y.len())?;
    Ok(GhSolution { value: 0.5 * search.best, witness })
}

struct Search<'a> {
    x: &'a PseudoMetricMatrix,
    y: &'a PseudoMetricMatrix,
    x_order: Vec<usize>,
    best: f64,
    best_pairs: Vec<(usize, usize)>,
    /// No correspondence beats `|diam X − diam Y|`; stop once it is reached.
    floor: f64,
    pairs: Vec<(usize, usize)>,
    covered: Vec<u32>,
}

impl Search<'_> {
    fn done(&self) -> bool {
        self.best <= self.floor
    }

    fn assign_x(&mut self, depth: usize, current: f64) {
        if depth == self.x_order.len() {
            let uncovered: Vec<usize> = (0..self.y.len()).filter(|&j| self.covered[j] == 0).collect();
            let uncovered = order_subset_by_eccentricity(self.y, uncovered);
            self.assign_y(&uncovered, 0, current);
            return;
        }
        let i = self.x_order[depth];
        for j in 0..self.y.len() {
            let next = current.max(added_distortion(i, j, &self.pairs, self.x, self.y));
            if next >= self.best {
                continue;
            }
            self.pairs.push((i, j));
            self.covered[j] += 1;
            self.assign_x(depth + 1, next);
            self.covered[j] -= 1;
            self.pairs.pop();
            if self.done() {
                return;
            }
        }
    }

    fn assign_y(&mut self, uncovered: &[usize], depth: usize, current: f64) {
        if depth == uncovered.len() {
            if current < self.best {
                self.best = current;
                self.best_pairs = self.pairs.clone();
            }
            return;
        }
        let j = uncovered[depth];
        for i in 0..self.x.len() {
            let next = current.max(added_distortion(i, j, &self.pairs, self.x, self.y));
            if next >= self.best {
                continue;
            }
            self.pairs.push((i, j));
            self.assign_y(uncovered, depth + 1, next);
            self.pairs.pop();
            if self.done() {
                return;
            }
        }
    }
}

fn by_eccentricity(x: &PseudoMetricMatrix) -> Vec<usize> {
    order_subset_by_eccentricity(x, (0..x.len()).collect())
}

fn order_subset_by_eccentricity(x: &PseudoMetricMatrix, mut idx: Vec<usize>) -> Vec<usize> {
    idx.sort_by(|&a, &b| x.eccentricity(b).total_cmp(&x.eccentricity(a)).then(a.cmp(&b)));
    idx
}

/// Local-search rounds after the greedy construction.
const LOCAL_SEARCH_ROUNDS: usize = 32;

/// Heuristic GH upper bound with its correspondence.
///
/// Runs the greedy construction in both directions and keeps the better one.
/// Each direction seeds with the most eccentric point of the source, visits the
/// rest in farthest-point order attaching each to the target point that adds
/// the least distortion, covers leftover target points the same way, then
/// improves the bottleneck pair by reassignment and pair swaps. When both
/// spaces carry the same label set, the label-matching correspondence is a
/// third starting point for the same local search.
pub fn gh_upper_greedy(x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> Result<GhSolution> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut candidates = vec![Greedy::new(x, y).run()];
    let backward = Greedy::new(y, x).run();
    candidates.push(backward.into_iter().map(|(j, i)| (i, j)).collect());
    if let Some(forward) = label_matching(x, y) {
        candidates.push(Greedy::new(x, y).run_from(forward));
    }
    let (pairs, d) = candidates
        .into_iter()
        .map(|pairs| {
            let d = pair_distortion(&pairs, x, y);
            (pairs, d)
        })
        .reduce(|best, next| if next.1 < best.1 { next } else { best })
        .expect("at least one candidate");
    Ok(GhSolution { value: 0.5 * d, witness: Correspondence::new(pairs, x.len(), y.len())? })
}

/// `f(i)` = the target point with the label of `i`, if the label sets agree.
fn label_matching(x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> Option<Vec<usize>> {
    if x.len() != y.len() {
        return None;
    }
    x.labels().iter().map(|l| y.index_of(l).ok()).collect()
}

struct Greedy<'a> {
    x: &'a PseudoMetricMatrix,
    y: &'a PseudoMetricMatrix,
    /// `f(i)` for every source point.
    forward: Vec<usize>,
    /// Extra pairs `(g(j), j)` for target points outside the image of `f`.
    extra: Vec<(usize, usize)>,
}

impl<'a> Greedy<'a> {
    fn new(x: &'a PseudoMetricMatrix, y: &'a PseudoMetricMatrix) -> Self {
        Self { x, y, forward: Vec::new(), extra: Vec::new() }
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self.forward.iter().enumerate().map(|(i, &j)| (i, j)).collect();
        out.extend_from_slice(&self.extra);
        out
    }

    fn same_label(&self, i: usize, j: usize) -> bool {
        self.x.labels()[i] == self.y.labels()[j]
    }

    /// Target for `i` adding the least distortion; ties prefer a matching label, then the lower index.
    fn best_target(&self, i: usize, pairs: &[(usize, usize)]) -> usize {
        (0..self.y.len())
            .map(|j| (added_distortion(i, j, pairs, self.x, self.y), !self.same_label(i, j), j))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)))
            .expect("target is non-empty")
            .2
    }

    fn best_source(&self, j: usize, pairs: &[(usize, usize)]) -> usize {
        (0..self.x.len())
            .map(|i| (added_distortion(i, j, pairs, self.x, self.y), !self.same_label(i, j), i))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)))
            .expect("source is non-empty")
            .2
    }

    fn run(self) -> Vec<(usize, usize)> {
        let (nx, ny) = (self.x.len(), self.y.len());
        let x0 = by_eccentricity(self.x)[0];
        let ex = self.x.eccentricity(x0);
        let y0 = (0..ny)
            .min_by(|&a, &b| {
                (self.y.eccentricity(a) - ex)
                    .abs()
                    .total_cmp(&(self.y.eccentricity(b) - ex).abs())
                    .then(self.same_label(x0, b).cmp(&self.same_label(x0, a)))
                    .then(a.cmp(&b))
            })
            .expect("target is non-empty");

        let mut forward = vec![usize::MAX; nx];
        forward[x0] = y0;
        let mut pairs = vec![(x0, y0)];
        for i in farthest_point_order(self.x, x0).into_iter().skip(1) {
            let j = self.best_target(i, &pairs);
            forward[i] = j;
            pairs.push((i, j));
        }
        self.run_from(forward)
    }

    /// Local search from a given map `f`.
    fn run_from(mut self, forward: Vec<usize>) -> Vec<(usize, usize)> {
        self.forward = forward;
        self.cover_leftovers();
        for _ in 0..LOCAL_SEARCH_ROUNDS {
            if !self.improve() {
                break;
            }
        }
        self.pairs()
    }

    /// Recomputes the extra pairs for target points `f` misses.
    fn cover_leftovers(&mut self) {
        let mut hit = vec![false; self.y.len()];
        for &j in &self.forward {
            hit[j] = true;
        }
        self.extra.clear();
        let mut pairs = self.pairs();
        for j in (0..self.y.len()).filter(|&j| !hit[j]) {
            let i = self.best_source(j, &pairs);
            self.extra.push((i, j));
            pairs.push((i, j));
        }
    }

    /// One improving move on a bottleneck pair, if any exists.
    fn improve(&mut self) -> bool {
        let pairs = self.pairs();
        let current = pair_distortion(&pairs, self.x, self.y);
        if current == 0.0 {
            return false;
        }
        let (a, b) = bottleneck(&pairs, self.x, self.y);
        // Discrepancies among graph pairs bound a trial's distortion from below;
        // trials run in order of that bound and the first improving one is taken.
        let row_gap = |f: &[usize], i: usize| {
            (0..f.len()).map(|o| (self.x.get(i, o) - self.y.get(f[i], f[o])).abs()).fold(0.0, f64::max)
        };
        let mut trials: Vec<(f64, Vec<usize>)> = Vec::new();
        for &(i, _) in [pairs[a], pairs[b]].iter() {
            for j in 0..self.y.len() {
                if j != self.forward[i] {
                    let mut f = self.forward.clone();
                    f[i] = j;
                    let gap = row_gap(&f, i);
                    if gap < current {
                        trials.push((gap, f));
                    }
                }
            }
            for other in 0..self.x.len() {
                if other != i && self.forward[other] != self.forward[i] {
                    let mut f = self.forward.clone();
                    f.swap(i, other);
                    let gap = row_gap(&f, i).max(row_gap(&f, other));
                    if gap < current {
                        trials.push((gap, f));
                    }
                }
            }
        }
        trials.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut best: Option<(f64, Vec<usize>)> = None;
        for (_, forward) in trials {
            let mut trial = Self { x: self.x, y: self.y, forward, extra: Vec::new() };
            trial.cover_leftovers();
            let d = pair_distortion(&trial.pairs(), self.x, self.y);
            if d < current {
                best = Some((d, trial.forward));
                break;
            }
        }
        match best {
            Some((_, f)) => {
                self.forward = f;
                self.cover_leftovers();
                true
            }
            None => false,
        }
    }
}

/// Indices of the two pairs realizing the distortion.
fn bottleneck(pairs: &[(usize, usize)], x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> (usize, usize) {
    let mut best = (0, 0, -1.0);
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(i2, j2)) in pairs.iter().enumerate().skip(a + 1) {
            let v = (x.get(i, i2) - y.get(j, j2)).abs();
            if v > best.2 {
                best = (a, b, v);
            }
        }
    }
    (best.0, best.1)
}

/// Farthest-point traversal starting at `start`.
fn farthest_point_order(x: &PseudoMetricMatrix, start: usize) -> Vec<usize> {
    let n = x.len();
    let mut order = vec![start];
    let mut gap: Vec<f64> = x.row(start).to_vec();
    let mut used = vec![false; n];
    used[start] = true;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&k| !used[k])
            .max_by(|&a, &b| gap[a].total_cmp(&gap[b]).then(b.cmp(&a)))
            .expect("points remain");
        used[next] = true;
        order.push(next);
        for (k, g) in gap.iter_mut().enumerate() {
            *g = g.min(x.get(next, k));
        }
    }
    order
}

/// Bounds on the GH distance as reported to callers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GhReport {
    pub lower: f64,
    pub upper: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    pub witness: Vec<[usize; 2]>,
}

/// Lower and upper bounds, plus the exact value when both sides fit under `cap`.
pub fn gh_report(x: &PseudoMetricMatrix, y: &PseudoMetricMatrix, cap: usize) -> Result<GhReport> {
    let lower = gh_lower_diam(x, y);
    let (upper, exact, witness) = if x.len() <= cap && y.len() <= cap {
        let sol = gh_exact(x, y, cap)?;
        (sol.value, Some(sol.value), sol.witness)
    } else {
        let sol = gh_upper_greedy(x, y)?;
        (sol.value, None, sol.witness)
    };
    Ok(GhReport { lower, upper, exact, witness: witness.pairs().iter().map(|&(i, j)| [i, j]).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<f64>>) -> PseudoMetricMatrix {
        PseudoMetricMatrix::from_rows_unlabeled(rows).unwrap()
    }

    fn pt() -> PseudoMetricMatrix {
        m(vec![vec![0.]])
    }

    fn seg(len: f64) -> PseudoMetricMatrix {
        m(vec![vec![0., len], vec![len, 0.]])
    }

    /// Every relation on `|X|·|Y| ≤ 16` cells, filtered to correspondences.
    fn brute_force_gh(x: &PseudoMetricMatrix, y: &PseudoMetricMatrix) -> f64 {
        let cells: Vec<(usize, usize)> = (0..x.len()).flat_map(|i| (0..y.len()).map(move |j| (i, j))).collect();
        assert!(cells.len() <= 16);
        let mut best = f64::INFINITY;
        for mask in 1u32..(1 << cells.len()) {
            let pairs: Vec<_> = cells.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &c)| c).collect();
            if let Ok(c) = Correspondence::new(pairs, x.len(), y.len()) {
                best = best.min(distortion(&c, x, y).unwrap());
            }
        }
        0.5 * best
    }

    #[test]
    fn correspondence_coverage() {
        assert!(Correspondence::new(vec![(0, 0), (1, 0)], 2, 1).is_ok());
        assert_eq!(
            Correspondence::new(vec![(0, 0)], 2, 1),
            Err(Error::Coverage { side: "first", index: 1 })
        );
        assert_eq!(
            Correspondence::new(vec![(0, 0), (1, 0)], 2, 2),
            Err(Error::Coverage { side: "second", index: 1 })
        );
        assert!(Correspondence::new(vec![(0, 3)], 1, 1).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let z = m(vec![vec![0., 1., 4.], vec![1., 0., 3.], vec![4., 3., 0.]]);
        assert_eq!(hausdorff(&[0, 2], &[2, 0], &z).unwrap(), 0.0);
        assert_eq!(hausdorff(&[0], &[1], &seg(1.0)).unwrap(), 1.0);
        for x in 0..3 {
            assert_eq!(hausdorff(&[x], &[0, 1, 2], &z).unwrap(), z.eccentricity(x));
        }
        assert_eq!(hausdorff(&[], &[0], &z), Err(Error::EmptySet));
        assert!(hausdorff(&[7], &[0], &z).is_err());
    }

    #[test]
    fn distortion_examples() {
        let x = m(vec![vec![0., 1., 2.], vec![1., 0., 1.], vec![2., 1., 0.]]);
        assert_eq!(distortion(&Correspondence::identity(3), &x, &x).unwrap(), 0.0);
        assert_eq!(distortion(&Correspondence::identity(1), &pt(), &pt()).unwrap(), 0.0);
        for pairs in [vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]] {
            let c = Correspondence::new(pairs, 2, 2).unwrap();
            assert_eq!(distortion(&c, &seg(1.0), &seg(3.0)).unwrap(), 2.0);
        }
    }

    #[test]
    fn exact_small_cases() {
        let x = m(vec![vec![0., 1., 2.], vec![1., 0., 1.5], vec![2., 1.5, 0.]]);
        assert_eq!(gh_exact(&x, &x, EXACT_CAP).unwrap().value, 0.0);
        assert_eq!(brute_force_gh(&pt(), &seg(1.0)), 0.5);
        assert_eq!(gh_exact(&pt(), &seg(1.0), EXACT_CAP).unwrap().value, 0.5);
        assert_eq!(brute_force_gh(&seg(1.0), &seg(3.0)), 1.0);
        assert_eq!(gh_exact(&seg(1.0), &seg(3.0), EXACT_CAP).unwrap().value, 1.0);
    }

    #[test]
    fn exact_matches_brute_force() {
        let a = m(vec![vec![0., 1., 2.], vec![1., 0., 1.5], vec![2., 1.5, 0.]]);
        let b = m(vec![vec![0., 3., 3.], vec![3., 0., 3.], vec![3., 3., 0.]]);
        let c = m(vec![
            vec![0., 1., 1., 1.],
            vec![1., 0., 2., 2.],
            vec![1., 2., 0., 2.],
            vec![1., 2., 2., 0.],
        ]);
        let spaces = [pt(), seg(1.0), seg(2.5), a, b, c];
        for x in &spaces {
            for y in &spaces {
                if x.len() * y.len() > 16 {
                    continue;
                }
                let sol = gh_exact(x, y, EXACT_CAP).unwrap();
                assert_eq!(sol.value, brute_force_gh(x, y));
                assert_eq!(0.5 * distortion(&sol.witness, x, y).unwrap(), sol.value);
            }
        }
    }

    #[test]
    fn exact_refuses_large_spaces() {
        let big = PseudoMetricMatrix::from_fn((0..7).map(|i| i.to_string()).collect(), |i, j| (i.abs_diff(j)) as f64)
            .unwrap();
        assert_eq!(gh_exact(&big, &pt(), EXACT_CAP), Err(Error::TooLarge { size: 7, cap: 6 }));
        assert!(gh_exact(&big, &pt(), 7).is_ok());
    }

    #[test]
    fn diameter_lower_bound_examples() {
        assert_eq!(gh_lower_diam(&seg(2.0), &seg(2.0)), 0.0);
        assert_eq!(gh_lower_diam(&seg(1.0), &seg(3.0)), 1.0);
        assert_eq!(gh_lower_diam(&pt(), &seg(4.0)), 2.0);
    }

    #[test]
    fn same_label_upper_bound_examples() {
        let d = seg(1.0);
        assert_eq!(gh_upper_same_labels(&d, &d).unwrap(), 0.0);
        assert_eq!(gh_upper_same_labels(&d, &seg(3.0)).unwrap(), 1.0);
        let e = m(vec![vec![0., 1.2, 0.7], vec![1.2, 0., 0.9], vec![0.7, 0.9, 0.]]);
        let f = m(vec![vec![0., 1.1, 0.75], vec![1.1, 0., 0.95], vec![0.75, 0.95, 0.]]);
        assert!(gh_upper_same_labels(&e, &f).unwrap() <= 0.1 / 2.0 + 1e-15);
    }

    #[test]
    fn greedy_examples() {
        let x = m(vec![vec![0., 1., 2.], vec![1., 0., 1.5], vec![2., 1.5, 0.]]);
        let sol = gh_upper_greedy(&x, &x).unwrap();
        assert_eq!(sol.value, 0.0);
        assert_eq!(sol.witness, Correspondence::identity(3));
        let sol = gh_upper_greedy(&pt(), &x).unwrap();
        assert_eq!(sol.value, 1.0);
        assert_eq!(gh_upper_greedy(&x, &pt()).unwrap().value, 1.0);
    }

    #[test]
    fn symmetric_spaces_get_identity() {
        // Square: every point is equally eccentric; label ties pick the identity.
        let s = 2f64.sqrt();
        let sq = m(vec![vec![0., 1., s, 1.], vec![1., 0., 1., s], vec![s, 1., 0., 1.], vec![1., s, 1., 0.]]);
        assert_eq!(gh_upper_greedy(&sq, &sq).unwrap().witness, Correspondence::identity(4));
    }

    #[test]
    fn report_picks_exact_when_small() {
        let r = gh_report(&pt(), &seg(1.0), EXACT_CAP).unwrap();
        assert_eq!(r.exact, Some(0.5));
        assert_eq!(r.lower, 0.5);
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, r#"{"lower":0.5,"upper":0.5,"exact":0.5,"witness":[[0,0],[0,1]]}"#);
    }
}
