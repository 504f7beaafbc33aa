//! Finite (pseudo-)metric spaces stored as labeled distance matrices.
//!
//! [`PseudoMetricMatrix`] only guarantees structure: a square matrix of finite
//! entries with unique labels. Axioms are checked by [`validate`], and
//! [`FiniteMetricSpace`] is the validated metric wrapper every other module
//! consumes. [`quotient`] turns a pseudo-metric into a metric by merging
//! zero-distance classes.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Triangle-inequality slack for matrices produced by arithmetic.
pub const TRIANGLE_TOL: f64 = 1e-9;

/// Entries below this are treated as exact zeros by [`quotient`].
pub const ZERO_SNAP: f64 = 1e-12;

/// Square matrix of finite distances over a set of unique labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct PseudoMetricMatrix {
    labels: Vec<String>,
    data: Vec<f64>,
}

/// Wire format shared by every space file: `{ "labels": [...], "dist": [[...]...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawSpace {
    pub labels: Vec<String>,
    pub dist: Vec<Vec<f64>>,
}

impl PseudoMetricMatrix {
    /// Builds a matrix from rows, checking shape, finiteness and label uniqueness.
    pub fn from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, row, len: r.len() });
            }
        }
        Self::from_flat(labels, rows.into_iter().flatten().collect())
    }

    /// Row-major constructor; `data.len()` must equal `labels.len()²`.
    pub fn from_flat(labels: Vec<String>, data: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if data.len() != n * n {
            let size = (data.len() as f64).sqrt() as usize;
            if size * size == data.len() {
                return Err(Error::LabelCount { labels: n, size });
            }
            return Err(Error::NotSquare { rows: n, row: 0, len: data.len() / n.max(1) });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { i: pos / n, j: pos % n, value: data[pos] });
        }
        let mut seen = HashSet::with_capacity(n);
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { labels, data })
    }

    /// Builds a matrix by evaluating `f(i, j)` on the upper triangle and mirroring it.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let n = labels.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self::from_flat(labels, data)
    }

    /// Labels `0..n` rendered as decimal strings.
    pub fn from_rows_unlabeled(rows: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::from_rows(labels, rows)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index, size: self.len() })
        }
    }

    pub fn eccentricity(&self, i: usize) -> f64 {
        self.row(i).iter().copied().fold(0.0, f64::max)
    }

    pub fn diameter(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Induced matrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            self.check_index(i)?;
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let data = indices
            .iter()
            .flat_map(|&i| indices.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .collect();
        Self::from_flat(labels, data)
    }

    /// Same distances under new labels.
    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::LabelCount { labels: labels.len(), size: self.len() });
        }
        Self::from_flat(labels, self.data.clone())
    }

    /// Prefixes every label with `prefix`.
    pub fn with_prefix(&self, prefix: &str) -> Self {
        let labels = self.labels.iter().map(|l| format!("{prefix}{l}")).collect();
        Self { labels, data: self.data.clone() }
    }

    /// Entrywise map of the distances; the caller keeps the result finite.
    pub(crate) fn map_entries(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { labels: self.labels.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl TryFrom<RawSpace> for PseudoMetricMatrix {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        if raw.labels.len() != raw.dist.len() {
            return Err(Error::LabelCount { labels: raw.labels.len(), size: raw.dist.len() });
        }
        Self::from_rows(raw.labels, raw.dist)
    }
}

impl From<PseudoMetricMatrix> for RawSpace {
    fn from(m: PseudoMetricMatrix) -> Self {
        let dist = m.rows();
        RawSpace { labels: m.labels, dist }
    }
}

/// One broken axiom together with the indices that witness it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum Violation {
    NonZeroDiagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetric { i: usize, j: usize },
    /// `d(i, j) > d(i, via) + d(via, j)`.
    Triangle { i: usize, j: usize, via: usize, excess: f64 },
    /// Distinct points at distance zero (only reported when a metric is required).
    ZeroDistance { i: usize, j: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonZeroDiagonal { i, value } => write!(f, "d({i},{i}) = {value} != 0"),
            Violation::Negative { i, j, value } => write!(f, "d({i},{j}) = {value} < 0"),
            Violation::Asymmetric { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            Violation::Triangle { i, j, via, excess } => {
                write!(f, "d({i},{j}) exceeds d({i},{via}) + d({via},{j}) by {excess:e}")
            }
            Violation::ZeroDistance { i, j } => write!(f, "d({i},{j}) = 0 for distinct points"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        const SHOWN: usize = 5;
        for (k, v) in self.violations.iter().take(SHOWN).enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        if self.violations.len() > SHOWN {
            write!(f, "; ... ({} violations total)", self.violations.len())?;
        }
        Ok(())
    }
}

/// Checks the axioms exactly, as appropriate for hand-entered matrices.
pub fn validate(m: &PseudoMetricMatrix, require_metric: bool) -> ValidationReport {
    validate_with_tol(m, require_metric, 0.0)
}

/// Checks the axioms, allowing the triangle inequality to fail by at most `tri_tol`.
///
/// Every violated pair is reported once; for the triangle inequality the
/// witness is the first intermediate point that breaks it.
pub fn validate_with_tol(m: &PseudoMetricMatrix, require_metric: bool, tri_tol: f64) -> ValidationReport {
    let n = m.len();
    let mut violations = Vec::new();
    for i in 0..n {
        let v = m.get(i, i);
        if v != 0.0 {
            violations.push(Violation::NonZeroDiagonal { i, value: v });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let v = m.get(i, j);
            if v < 0.0 {
                violations.push(Violation::Negative { i, j, value: v });
            }
            if v != m.get(j, i) {
                violations.push(Violation::Asymmetric { i, j });
            }
            if require_metric && v == 0.0 {
                violations.push(Violation::ZeroDistance { i, j });
            }
        }
    }
    for i in 0..n {
        let ri = m.row(i);
        for j in (i + 1)..n {
            let dij = ri[j];
            let rj = m.row(j);
            // d is symmetric where it matters; d(k, j) is read as d(j, k) for locality.
            if let Some(k) = (0..n).find(|&k| dij > ri[k] + rj[k] + tri_tol) {
                violations.push(Violation::Triangle { i, j, via: k, excess: dij - ri[k] - rj[k] });
            }
        }
    }
    violations.sort_by_key(violation_order);
    ValidationReport { violations }
}

fn violation_order(v: &Violation) -> (usize, usize, usize) {
    match *v {
        Violation::NonZeroDiagonal { i, .. } => (i, i, 0),
        Violation::Negative { i, j, .. } => (i, j, 1),
        Violation::Asymmetric { i, j } => (i, j, 2),
        Violation::ZeroDistance { i, j } => (i, j, 3),
        Violation::Triangle { i, j, .. } => (i, j, 4),
    }
}

/// A validated finite metric space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpace", into = "RawSpace")]
pub struct FiniteMetricSpace(PseudoMetricMatrix);

impl FiniteMetricSpace {
    /// Exact validation, for hand-entered distances.
    pub fn new(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = PseudoMetricMatrix::from_rows(labels, rows)?;
        validate(&m, true).into_result()?;
        Ok(Self(m))
    }

    /// Validation with [`TRIANGLE_TOL`], for distances produced by arithmetic.
    pub fn from_computed(m: PseudoMetricMatrix) -> Result<Self> {
        validate_with_tol(&m, true, TRIANGLE_TOL).into_result()?;
        Ok(Self(m))
    }

    /// Wraps a matrix that is a metric by construction. Debug builds still check it.
    pub(crate) fn from_trusted(m: PseudoMetricMatrix) -> Self {
        debug_assert!(
            m.len() > 64 || validate_with_tol(&m, true, TRIANGLE_TOL).is_valid(),
            "constructed matrix is not a metric"
        );
        Self(m)
    }

    /// The one-point space.
    pub fn point(label: &str) -> Self {
        Self(PseudoMetricMatrix { labels: vec![label.to_string()], data: vec![0.0] })
    }

    pub fn as_matrix(&self) -> &PseudoMetricMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> PseudoMetricMatrix {
        self.0
    }

    pub fn relabel(&self, labels: Vec<String>) -> Result<Self> {
        Ok(Self(self.0.relabel(labels)?))
    }

    pub fn with_prefix(&self, prefix: &str) -> Self {
        Self(self.0.with_prefix(prefix))
    }

    /// Induced subspace; a subspace of a metric space is a metric space.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        let mut seen = HashSet::new();
        if let Some(&dup) = indices.iter().find(|&&i| !seen.insert(i)) {
            return Err(Error::DuplicateLabel(self.0.labels.get(dup).cloned().unwrap_or_default()));
        }
        Ok(Self(self.0.submatrix(indices)?))
    }
}

impl Deref for FiniteMetricSpace {
    type Target = PseudoMetricMatrix;

    fn deref(&self) -> &PseudoMetricMatrix {
        &self.0
    }
}

impl TryFrom<RawSpace> for FiniteMetricSpace {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        Self::from_computed(PseudoMetricMatrix::try_from(raw)?)
    }
}

impl From<FiniteMetricSpace> for RawSpace {
    fn from(s: FiniteMetricSpace) -> Self {
        s.0.into()
    }
}

/// `sup |d(x, y) - e(x, y)|` over a common, identically ordered label set.
pub fn uniform_distance(d: &PseudoMetricMatrix, e: &PseudoMetricMatrix) -> Result<f64> {
    if d.labels() != e.labels() {
        return Err(Error::LabelMismatch);
    }
    Ok(uniform_distance_unlabeled(d.data(), e.data()))
}

/// [`uniform_distance`] on raw row-major data of equal length.
pub(crate) fn uniform_distance_unlabeled(d: &[f64], e: &[f64]) -> f64 {
    debug_assert_eq!(d.len(), e.len());
    d.iter().zip(e).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Result of [`quotient`]: the metric space of zero-distance classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Quotient {
    pub space: FiniteMetricSpace,
    /// Input index -> index of its class in `space`.
    pub class_of: Vec<usize>,
    input_labels: Vec<String>,
}

impl Quotient {
    /// Label of the class representative for an input label.
    pub fn representative_of(&self, label: &str) -> Option<&str> {
        let i = self.input_labels.iter().position(|l| l == label)?;
        Some(self.space.labels()[self.class_of[i]].as_str())
    }

    /// Input indices grouped by class, in class order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.space.len()];
        for (i, &c) in self.class_of.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

/// Merges points at distance zero (after snapping entries below [`ZERO_SNAP`]).
///
/// Classes are ordered by their first member in the input, so a metric input
/// comes back unchanged. Each class is labeled by its lexicographically least
/// member and takes that member's distances.
pub fn quotient(m: &PseudoMetricMatrix) -> Result<Quotient> {
    validate_with_tol(m, false, TRIANGLE_TOL).into_result()?;
    let (class_of, members) = zero_classes(m);
    let reps: Vec<usize> = members
        .iter()
        .map(|g| {
            *g.iter()
                .min_by(|&&a, &&b| m.labels[a].cmp(&m.labels[b]).then(a.cmp(&b)))
                .expect("classes are non-empty")
        })
        .collect();
    let labels = reps.iter().map(|&r| m.labels[r].clone()).collect();
    let k = reps.len();
    let mut data = vec![0.0; k * k];
    for a in 0..k {
        for b in (a + 1)..k {
            let v = m.get(reps[a], reps[b]);
            data[a * k + b] = v;
            data[b * k + a] = v;
        }
    }
    let space = FiniteMetricSpace::from_computed(PseudoMetricMatrix::from_flat(labels, data)?)?;
    Ok(Quotient { space, class_of, input_labels: m.labels.clone() })
}

/// Groups points at snapped distance zero; classes are ordered by first member.
///
/// Does not check the axioms, so on a non-pseudo-metric the grouping depends on order.
pub fn zero_classes(m: &PseudoMetricMatrix) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = m.len();
    let mut class_of = vec![usize::MAX; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let c = members.len();
        let mut group = vec![i];
        class_of[i] = c;
        for (j, slot) in class_of.iter_mut().enumerate().skip(i + 1) {
            if *slot == usize::MAX && m.get(i, j) < ZERO_SNAP {
                *slot = c;
                group.push(j);
            }
        }
        members.push(group);
    }
    (class_of, members)
}

/// Closed-ball radius on the extended half-line `[0, ∞]`.
///
/// Only comparisons are defined; `∞` sorts above every finite radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Option<f64>", into = "Option<f64>")]
pub enum Radius {
    Finite(f64),
    Infinite,
}

impl Radius {
    pub fn finite(r: f64) -> Result<Self> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::InvalidRadius(r));
        }
        Ok(if r.is_infinite() { Radius::Infinite } else { Radius::Finite(r) })
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Radius::Infinite)
    }

    /// `true` iff `d ≤ self`.
    pub fn contains(self, d: f64) -> bool {
        match self {
            Radius::Finite(r) => d <= r,
            Radius::Infinite => true,
        }
    }

    /// `f64` view with `∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            Radius::Finite(r) => r,
            Radius::Infinite => f64::INFINITY,
        }
    }
}

impl Eq for Radius {}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Radius {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Radius::Infinite, Radius::Infinite) => Ordering::Equal,
            (Radius::Infinite, _) => Ordering::Greater,
            (_, Radius::Infinite) => Ordering::Less,
            (Radius::Finite(a), Radius::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl TryFrom<Option<f64>> for Radius {
    type Error = Error;

    fn try_from(v: Option<f64>) -> Result<Self> {
        v.map_or(Ok(Radius::Infinite), Radius::finite)
    }
}

impl From<Radius> for Option<f64> {
    fn from(r: Radius) -> Self {
        match r {
            Radius::Finite(v) => Some(v),
            Radius::Infinite => None,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => write!(f, "inf"),
        }
    }
}
