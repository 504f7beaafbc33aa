//! Pointed spaces, rough isometries and admissible gluing metrics.
//!
//! A map `f: B_d(a, R) → Y` is an `(R, ε)`-rough isometry when it moves the base
//! point by at most `ε`, its image is `ε`-dense (open neighborhood) in
//! `B_e(b, R − ε)`, and it distorts distances by at most `ε`. Such a map bounds
//! the pointed GH distance by `max{2ε, 1/(R − ε)}`, clamped at `1/2`;
//! [`glue_from_rough_isometry`] builds the metric on `X ⊔ Y` that witnesses it
//! and [`check_admissible`] verifies it.

use serde::{Deserialize, Serialize};

use crate::constructions::{ball_indices, l2_product_many, ProductShape};
use crate::error::{Error, Result};
use crate::family::{Family, Param};
use crate::metric::{validate_with_tol, FiniteMetricSpace, PseudoMetricMatrix, Radius, TRIANGLE_TOL};

/// Slack for restriction clauses and gluing repair.
pub const RESTRICTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointedSpace {
    pub space: FiniteMetricSpace,
    pub base: usize,
}

impl PointedSpace {
    pub fn new(space: FiniteMetricSpace, base: usize) -> Result<Self> {
        space.check_index(base)?;
        Ok(Self { space, base })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Indices of `B(base, r)`.
    pub fn ball(&self, r: Radius) -> Vec<usize> {
        ball_indices(&self.space, self.base, r).expect("base is a valid index")
    }

    /// Induced pointed subspace on `B(base, r)`.
    pub fn ball_space(&self, r: Radius) -> Result<Self> {
        let idx = self.ball(r);
        let base = idx.iter().position(|&i| i == self.base).expect("the ball contains its center");
        Self::new(self.space.subspace(&idx)?, base)
    }
}

/// A failed rough-isometry condition with its witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum RoughViolation {
    /// `e(f(a), b) > ε`.
    BasePoint { distance: f64 },
    /// A point of `B_e(b, R − ε)` at distance `≥ ε` from the image.
    Coverage { target: usize, gap: f64 },
    /// `|d(x, y) − e(f(x), f(y))| > ε`.
    Distortion { x: usize, y: usize, discrepancy: f64 },
}

/// Outcome of checking a map against the three rough-isometry conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughIsometryCert {
    /// `map[x]` is `f(x)` on the domain ball and `None` outside it.
    pub map: Vec<Option<usize>>,
    pub radius: Radius,
    pub eps: f64,
    /// Largest `|d(x, y) − e(f(x), f(y))|` over the domain.
    pub distortion: f64,
    pub verdict: bool,
    /// The worst witness of each failed condition.
    pub violations: Vec<RoughViolation>,
}

/// Checks the three conditions exactly.
pub fn check_rough_isometry(
    map: &[Option<usize>],
    x: &PointedSpace,
    y: &PointedSpace,
    radius: Radius,
    eps: f64,
) -> Result<RoughIsometryCert> {
    check_rough_isometry_with_tol(map, x, y, radius, eps, 0.0)
}

/// Like [`check_rough_isometry`] with every comparison against `ε` relaxed by `tol`.
pub fn check_rough_isometry_with_tol(
    map: &[Option<usize>],
    x: &PointedSpace,
    y: &PointedSpace,
    radius: Radius,
    eps: f64,
    tol: f64,
) -> Result<RoughIsometryCert> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParams(format!("slack must be positive and finite, got {eps}")));
    }
    if radius <= Radius::Finite(eps) {
        return Err(Error::RadiusSlack { radius: radius.to_f64(), eps });
    }
    if map.len() != x.len() {
        return Err(Error::LabelCount { labels: map.len(), size: x.len() });
    }
    let domain = x.ball(radius);
    let mut image = Vec::with_capacity(domain.len());
    for &i in &domain {
        match map[i] {
            None => return Err(Error::MapUndefined(i)),
            Some(j) if j >= y.len() => return Err(Error::MapOutOfRange { from: i, to: j, size: y.len() }),
            Some(j) => image.push(j),
        }
    }
    let bar = eps + tol;
    let mut violations = Vec::new();

    let f_base = map[x.base].expect("the base lies in its own ball");
    let distance = y.space.get(f_base, y.base);
    if distance > bar {
        violations.push(RoughViolation::BasePoint { distance });
    }

    let inner = match radius {
        Radius::Finite(r) => Radius::Finite(r - eps),
        Radius::Infinite => Radius::Infinite,
    };
    let worst_gap = y
        .ball(inner)
        .into_iter()
        .map(|t| (t, image.iter().map(|&j| y.space.get(t, j)).fold(f64::INFINITY, f64::min)))
        .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)));
    if let Some((target, gap)) = worst_gap {
        if gap >= bar {
            violations.push(RoughViolation::Coverage { target, gap });
        }
    }

    let mut worst = (0, 0, 0.0f64);
    for (p, &i) in domain.iter().enumerate() {
        for (q, &k) in domain.iter().enumerate().skip(p + 1) {
            let v = (x.space.get(i, k) - y.space.get(image[p], image[q])).abs();
            if v > worst.2 {
                worst = (i, k, v);
            }
        }
    }
    if worst.2 > bar {
        violations.push(RoughViolation::Distortion { x: worst.0, y: worst.1, discrepancy: worst.2 });
    }

    Ok(RoughIsometryCert {
        map: map.to_vec(),
        radius,
        eps,
        distortion: worst.2,
        verdict: violations.is_empty(),
        violations,
    })
}

/// A failed clause of `(t; a, b)`-admissibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum AdmissibleViolation {
    /// `h|X² ≠ d` at `(i, j)`.
    RestrictionX { i: usize, j: usize, delta: f64 },
    /// `h|Y² ≠ e` at `(i, j)`, indices into `Y`.
    RestrictionY { i: usize, j: usize, delta: f64 },
    /// `h(a, b) ≥ t`.
    BaseDistance { distance: f64 },
    /// A point of `B_h(a, 1/t)` at distance `≥ t` from `Y`; index into `X ⊔ Y`.
    BallAroundX { point: usize, gap: f64 },
    /// A point of `B_h(b, 1/t)` at distance `≥ t` from `X`; index into `X ⊔ Y`.
    BallAroundY { point: usize, gap: f64 },
}

impl AdmissibleViolation {
    pub fn clause(&self) -> &'static str {
        match self {
            AdmissibleViolation::RestrictionX { .. } => "h|X = d",
            AdmissibleViolation::RestrictionY { .. } => "h|Y = e",
            AdmissibleViolation::BaseDistance { .. } => "h(a, b) < t",
            AdmissibleViolation::BallAroundX { .. } => "B_h(a, 1/t) in N_h(Y, t)",
            AdmissibleViolation::BallAroundY { .. } => "B_h(b, 1/t) in N_h(X, t)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleReport {
    pub t: f64,
    pub verdict: bool,
    pub violations: Vec<AdmissibleViolation>,
}

/// Checks whether `h` on `X ⊔ Y` (points of `X` first) is `(t; a, b)`-admissible.
pub fn check_admissible(h: &PseudoMetricMatrix, x: &PointedSpace, y: &PointedSpace, t: f64) -> Result<AdmissibleReport> {
    let (nx, ny) = (x.len(), y.len());
    if h.len() != nx + ny {
        return Err(Error::LabelCount { labels: nx + ny, size: h.len() });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParams(format!("t must be positive and finite, got {t}")));
    }
    validate_with_tol(h, true, TRIANGLE_TOL).into_result()?;
    let mut violations = Vec::new();

    let worst_restriction = |space: &FiniteMetricSpace, offset: usize| {
        let n = space.len();
        let mut worst = (0, 0, 0.0f64);
        for i in 0..n {
            for j in (i + 1)..n {
                let delta = (h.get(offset + i, offset + j) - space.get(i, j)).abs();
                if delta > worst.2 {
                    worst = (i, j, delta);
                }
            }
        }
        worst
    };
    let (i, j, delta) = worst_restriction(&x.space, 0);
    if delta > RESTRICTION_TOL {
        violations.push(AdmissibleViolation::RestrictionX { i, j, delta });
    }
    let (i, j, delta) = worst_restriction(&y.space, nx);
    if delta > RESTRICTION_TOL {
        violations.push(AdmissibleViolation::RestrictionY { i, j, delta });
    }

    let (a, b) = (x.base, nx + y.base);
    let distance = h.get(a, b);
    if distance >= t {
        violations.push(AdmissibleViolation::BaseDistance { distance });
    }

    let ball = Radius::Finite(1.0 / t);
    let worst_gap = |center: usize, other: std::ops::Range<usize>| {
        ball_indices(h, center, ball)
            .expect("center is a valid index")
            .into_iter()
            .map(|p| (p, other.clone().map(|q| h.get(p, q)).fold(f64::INFINITY, f64::min)))
            .filter(|&(_, gap)| gap >= t)
            .max_by(|u, v| u.1.total_cmp(&v.1).then(v.0.cmp(&u.0)))
    };
    if let Some((point, gap)) = worst_gap(a, nx..nx + ny) {
        violations.push(AdmissibleViolation::BallAroundX { point, gap });
    }
    if let Some((point, gap)) = worst_gap(b, 0..nx) {
        violations.push(AdmissibleViolation::BallAroundY { point, gap });
    }

    Ok(AdmissibleReport { t, verdict: violations.is_empty(), violations })
}

/// Metric on `X ⊔ Y` built from a certified rough isometry.
///
/// Cross distances are `h(x, y) = min_z d(x, z) + ε + e(f(z), y)` over the
/// domain ball, then closed under shortest paths. Restrictions to `X` and `Y`
/// must survive the closure up to roundoff; they are restored exactly.
/// Labels are the inputs' labels prefixed with `x:` and `y:`.
pub fn glue_from_rough_isometry(cert: &RoughIsometryCert, x: &PointedSpace, y: &PointedSpace) -> Result<FiniteMetricSpace> {
    if !cert.verdict {
        return Err(Error::Uncertified);
    }
    if cert.map.len() != x.len() {
        return Err(Error::LabelCount { labels: cert.map.len(), size: x.len() });
    }
    let (nx, ny) = (x.len(), y.len());
    let n = nx + ny;
    let domain: Vec<(usize, usize)> = cert.map.iter().enumerate().filter_map(|(i, f)| f.map(|j| (i, j))).collect();
    let mut h = vec![0.0; n * n];
    for i in 0..nx {
        for k in 0..nx {
            h[i * n + k] = x.space.get(i, k);
        }
    }
    for j in 0..ny {
        for k in 0..ny {
            h[(nx + j) * n + nx + k] = y.space.get(j, k);
        }
    }
    for i in 0..nx {
        for j in 0..ny {
            let v = domain
                .iter()
                .map(|&(z, fz)| x.space.get(i, z) + cert.eps + y.space.get(fz, j))
                .fold(f64::INFINITY, f64::min);
            h[i * n + nx + j] = v;
            h[(nx + j) * n + i] = v;
        }
    }
    floyd_warshall(&mut h, n);

    for (offset, space) in [(0, &x.space), (nx, &y.space)] {
        for i in 0..space.len() {
            for j in 0..space.len() {
                let entry = &mut h[(offset + i) * n + offset + j];
                let delta = space.get(i, j) - *entry;
                if delta > RESTRICTION_TOL {
                    return Err(Error::RestrictionBroken { i: offset + i, j: offset + j, delta });
                }
                *entry = space.get(i, j);
            }
        }
    }
    let labels = x.space.labels().iter().map(|l| format!("x:{l}")).chain(y.space.labels().iter().map(|l| format!("y:{l}"))).collect();
    FiniteMetricSpace::from_computed(PseudoMetricMatrix::from_flat(labels, h)?)
}

/// All-pairs shortest paths in place on a row-major `n × n` matrix.
pub(crate) fn floyd_warshall(h: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            let hik = h[i * n + k];
            for j in 0..n {
                let via = hik + h[k * n + j];
                if via < h[i * n + j] {
                    h[i * n + j] = via;
                }
            }
        }
    }
}

/// `max{2ε, 1/(R − ε)}`, the admissibility threshold of a rough isometry.
pub fn admissible_threshold(radius: Radius, eps: f64) -> f64 {
    let far = match radius {
        Radius::Finite(r) => 1.0 / (r - eps),
        Radius::Infinite => 0.0,
    };
    (2.0 * eps).max(far)
}

/// Upper bound on the pointed GH distance from a certified rough isometry.
pub fn pgh_upper(cert: &RoughIsometryCert) -> Result<f64> {
    if !cert.verdict {
        return Err(Error::Uncertified);
    }
    Ok(admissible_threshold(cert.radius, cert.eps).min(0.5))
}

/// A rough isometry between two pointed spaces, checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoughIsometry {
    pub source: PointedSpace,
    pub target: PointedSpace,
    pub cert: RoughIsometryCert,
}

/// One factor of a product map: an `(∞, ε)`-rough isometry `source → target`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorMap {
    pub source: PointedSpace,
    pub target: PointedSpace,
    pub map: Vec<usize>,
}

/// Coordinatewise map between ℓ²-products, checked at slack `√(n+1)·ε`.
///
/// Every factor must itself be an `(∞, ε)`-rough isometry.
pub fn product_rough_isometry(factors: &[FactorMap], eps: f64) -> Result<RoughIsometry> {
    if factors.is_empty() {
        return Err(Error::EmptySet);
    }
    for f in factors {
        let map: Vec<Option<usize>> = f.map.iter().copied().map(Some).collect();
        if !check_rough_isometry(&map, &f.source, &f.target, Radius::Infinite, eps)?.verdict {
            return Err(Error::Uncertified);
        }
    }
    let source = pointed_product(factors.iter().map(|f| &f.source))?;
    let target = pointed_product(factors.iter().map(|f| &f.target))?;
    let from = ProductShape::new(factors.iter().map(|f| f.source.len()).collect())?;
    let to = ProductShape::new(factors.iter().map(|f| f.target.len()).collect())?;
    let map: Vec<Option<usize>> = (0..from.len())
        .map(|k| {
            let c: Vec<usize> = from.coords(k).iter().zip(factors).map(|(&i, f)| f.map[i]).collect();
            Some(to.flat(&c))
        })
        .collect();
    let slack = (factors.len() as f64).sqrt() * eps;
    let cert = check_rough_isometry_with_tol(&map, &source, &target, Radius::Infinite, slack, CASE_TOL)?;
    Ok(RoughIsometry { source, target, cert })
}

/// Roundoff allowance for the product and projection constructions.
pub const CASE_TOL: f64 = 1e-12;

/// ℓ²-product of pointed spaces, based at the tuple of bases.
pub fn pointed_product<'a>(factors: impl IntoIterator<Item = &'a PointedSpace>) -> Result<PointedSpace> {
    let factors: Vec<&PointedSpace> = factors.into_iter().collect();
    let spaces: Vec<&FiniteMetricSpace> = factors.iter().map(|f| &f.space).collect();
    let space = l2_product_many(&spaces)?;
    let shape = ProductShape::new(factors.iter().map(|f| f.len()).collect())?;
    let base = shape.flat(&factors.iter().map(|f| f.base).collect::<Vec<_>>());
    PointedSpace::new(space, base)
}

/// Projection onto factor `i` of a product of balls, checked at slack `2√n·ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub map: RoughIsometry,
    /// Every factor other than `i` lies within `ε` of its base.
    pub premise: bool,
}

/// `πᵢ: ∏ⱼ Bⱼ → Xᵢ` where `balls[j]` are pointed factor balls and `full` is `Xᵢ`.
///
/// `balls[i]` must be a subspace of `full` listed in the same order it appears
/// there (as produced by [`PointedSpace::ball_space`]); `positions[k]` gives the
/// index in `full` of point `k` of `balls[i]`.
pub fn projection_rough_isometry(
    balls: &[PointedSpace],
    i: usize,
    full: &PointedSpace,
    positions: &[usize],
    radius: Radius,
    eps: f64,
) -> Result<Projection> {
    let n = balls.len().saturating_sub(1);
    if n == 0 {
        return Err(Error::InvalidParams("projection needs at least two factors".into()));
    }
    if i > n {
        return Err(Error::IndexOutOfRange { index: i, size: balls.len() });
    }
    if positions.len() != balls[i].len() {
        return Err(Error::LabelCount { labels: positions.len(), size: balls[i].len() });
    }
    for &p in positions {
        full.space.check_index(p)?;
    }
    let premise = balls
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .all(|(_, b)| b.space.eccentricity(b.base) <= eps);
    let source = pointed_product(balls)?;
    let shape = ProductShape::new(balls.iter().map(|b| b.len()).collect())?;
    let map: Vec<Option<usize>> = (0..shape.len()).map(|k| Some(positions[shape.coords(k)[i]])).collect();
    let slack = 2.0 * (n as f64).sqrt() * eps;
    let cert = check_rough_isometry_with_tol(&map, &source, full, radius, slack, CASE_TOL)?;
    Ok(Projection { map: RoughIsometry { source, target: full.clone(), cert }, premise })
}

/// `σᵢ(s) = ζᵢ(s) / (1 − ζᵢ(s))`: `∞` exactly at `vᵢ`, `0` exactly at the other anchors.
pub fn sigma(family: &Family, i: usize, s: Param) -> Radius {
    let z = family.zeta(i, s);
    if z >= 1.0 {
        Radius::Infinite
    } else {
        Radius::Finite(z / (1.0 - z))
    }
}

/// `P(s) = ∏ᵢ B(aᵢ, σᵢ(s))` with the ℓ²-product metric, based at `(a₁, …)`.
///
/// The base point of factor `i` is the wedge coordinate of the family.
pub fn ball_product(family: &Family, s: Param) -> Result<PointedSpace> {
    let cfg = family.config();
    let bases = cfg.wedge.clone().unwrap_or_else(|| vec![0; cfg.anchor_count()]);
    let balls = cfg
        .anchors
        .iter()
        .zip(&bases)
        .enumerate()
        .map(|(i, (x, &a))| PointedSpace::new(x.clone(), a)?.ball_space(sigma(family, i, s)))
        .collect::<Result<Vec<_>>>()?;
    pointed_product(&balls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::FamilyConfig;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        let labels = (0..points.len()).map(|i| format!("p{i}")).collect();
        let m = PseudoMetricMatrix::from_fn(labels, |i, j| (points[i] - points[j]).abs()).unwrap();
        FiniteMetricSpace::from_computed(m).unwrap()
    }

    fn pointed(points: &[f64], base: usize) -> PointedSpace {
        PointedSpace::new(line(points), base).unwrap()
    }

    fn identity(n: usize) -> Vec<Option<usize>> {
        (0..n).map(Some).collect()
    }

    #[test]
    fn identity_is_certified() {
        let x = pointed(&[0.0, 1.0, 2.5], 0);
        for eps in [1e-6, 0.1, 3.0] {
            let c = check_rough_isometry(&identity(3), &x, &x, Radius::Infinite, eps).unwrap();
            assert!(c.verdict);
            assert_eq!(c.distortion, 0.0);
        }
    }

    #[test]
    fn collapse_onto_point() {
        let x = pointed(&[0.0, 0.3, 0.5], 0);
        let y = pointed(&[0.0], 0);
        let map = vec![Some(0); 3];
        assert!(check_rough_isometry(&map, &x, &y, Radius::Infinite, 0.5).unwrap().verdict);
        let c = check_rough_isometry(&map, &x, &y, Radius::Infinite, 0.4).unwrap();
        assert!(!c.verdict);
        assert_eq!(c.violations, vec![RoughViolation::Distortion { x: 0, y: 2, discrepancy: 0.5 }]);
    }

    #[test]
    fn base_point_mismatch() {
        let x = pointed(&[0.0, 1.0], 0);
        let y = pointed(&[0.0, 1.0, 1.2], 2);
        // f(a) = 0 sits at distance 1.2 = 2ε from b.
        let c = check_rough_isometry(&identity(2), &x, &y, Radius::Infinite, 0.6).unwrap();
        assert!(!c.verdict);
        assert!(matches!(c.violations[0], RoughViolation::BasePoint { distance } if distance == 1.2));
    }

    #[test]
    fn coverage_uses_open_neighborhoods() {
        let x = pointed(&[0.0], 0);
        let y = pointed(&[0.0, 0.5], 0);
        let map = vec![Some(0)];
        // The point at 0.5 needs an image point strictly closer than ε.
        let c = check_rough_isometry(&map, &x, &y, Radius::Infinite, 0.5).unwrap();
        assert_eq!(c.violations, vec![RoughViolation::Coverage { target: 1, gap: 0.5 }]);
        assert!(check_rough_isometry(&map, &x, &y, Radius::Infinite, 0.51).unwrap().verdict);
        // With R = 0.9 only B(b, 0.9 − ε) must be covered; it excludes 0.5 when ε = 0.5.
        assert!(check_rough_isometry(&map, &x, &y, Radius::Finite(0.9), 0.5).unwrap().verdict);
    }

    #[test]
    fn map_errors() {
        let x = pointed(&[0.0, 1.0, 5.0], 0);
        let y = pointed(&[0.0, 1.0], 0);
        assert_eq!(
            check_rough_isometry(&[Some(0), None, None], &x, &y, Radius::Finite(2.0), 0.1),
            Err(Error::MapUndefined(1))
        );
        // Outside the domain ball the map may stay undefined.
        assert!(check_rough_isometry(&[Some(0), Some(1), None], &x, &y, Radius::Finite(2.0), 0.1).is_ok());
        assert!(matches!(
            check_rough_isometry(&[Some(0), Some(7), None], &x, &y, Radius::Finite(2.0), 0.1),
            Err(Error::MapOutOfRange { .. })
        ));
        assert!(matches!(
            check_rough_isometry(&identity(3), &x, &x, Radius::Finite(0.1), 0.1),
            Err(Error::RadiusSlack { .. })
        ));
        assert!(check_rough_isometry(&identity(3), &x, &x, Radius::Infinite, 0.0).is_err());
    }

    #[test]
    fn glue_identity_twins_at_eps() {
        let x = pointed(&[0.0, 1.0, 3.0], 1);
        let c = check_rough_isometry(&identity(3), &x, &x, Radius::Infinite, 0.25).unwrap();
        let h = glue_from_rough_isometry(&c, &x, &x).unwrap();
        for i in 0..3 {
            assert_eq!(h.get(i, 3 + i), 0.25);
        }
        assert_eq!(h.get(0, 5), 3.25);
        assert_eq!(h.labels()[0], "x:p0");
        assert_eq!(h.labels()[3], "y:p0");
    }

    #[test]
    fn glue_one_point_spaces() {
        let x = pointed(&[0.0], 0);
        let c = check_rough_isometry(&[Some(0)], &x, &x, Radius::Infinite, 0.1).unwrap();
        let h = glue_from_rough_isometry(&c, &x, &x).unwrap();
        assert_eq!(h.get(0, 1), 0.1);
        assert_eq!(pgh_upper(&c).unwrap(), 0.2);
    }

    #[test]
    fn glue_rejects_uncertified() {
        let x = pointed(&[0.0, 1.0], 0);
        let y = pointed(&[0.0, 3.0], 0);
        let c = check_rough_isometry(&identity(2), &x, &y, Radius::Infinite, 0.5).unwrap();
        assert!(!c.verdict);
        assert_eq!(glue_from_rough_isometry(&c, &x, &y), Err(Error::Uncertified));
        assert_eq!(pgh_upper(&c), Err(Error::Uncertified));
    }

    #[test]
    fn glued_metric_is_admissible_above_threshold() {
        let x = pointed(&[0.0, 1.0, 2.0, 7.0], 0);
        let y = pointed(&[0.05, 1.1, 1.9, 2.05], 0);
        let map = vec![Some(0), Some(1), Some(2), None];
        let c = check_rough_isometry(&map, &x, &y, Radius::Finite(3.0), 0.25).unwrap();
        assert!(c.verdict, "{:?}", c.violations);
        let h = glue_from_rough_isometry(&c, &x, &y).unwrap();
        let bound = admissible_threshold(c.radius, c.eps);
        assert_eq!(bound, 0.5);
        for t in [bound + 1e-9, bound * 1.5, 2.0] {
            let rep = check_admissible(&h, &x, &y, t).unwrap();
            assert!(rep.verdict, "t = {t}: {:?}", rep.violations);
        }
    }

    #[test]
    fn admissible_clauses() {
        let x = pointed(&[0.0, 1.0], 0);
        let c = check_rough_isometry(&identity(2), &x, &x, Radius::Infinite, 0.3).unwrap();
        let h = glue_from_rough_isometry(&c, &x, &x).unwrap();
        assert!(check_admissible(&h, &x, &x, 0.31).unwrap().verdict);
        // h(a, b) = t fails the strict inequality.
        let rep = check_admissible(&h, &x, &x, 0.3).unwrap();
        assert!(rep.violations.iter().any(|v| v.clause() == "h(a, b) < t"));

        let other = pointed(&[0.0, 1.1], 0);
        let rep = check_admissible(&h, &other, &x, 0.5).unwrap();
        assert_eq!(rep.violations[0].clause(), "h|X = d");
        assert!(matches!(rep.violations[0], AdmissibleViolation::RestrictionX { i: 0, j: 1, .. }));

        let bad = PseudoMetricMatrix::from_rows_unlabeled(vec![
            vec![0.0, 1.0, 5.0, 0.1],
            vec![1.0, 0.0, 0.1, 5.0],
            vec![5.0, 0.1, 0.0, 1.0],
            vec![0.1, 5.0, 1.0, 0.0],
        ])
        .unwrap();
        assert!(matches!(check_admissible(&bad, &x, &x, 0.5), Err(Error::Invalid(_))));
    }

    #[test]
    fn ball_inclusion_failure() {
        // Y has a point far from X but close to b.
        let x = pointed(&[0.0], 0);
        let y = pointed(&[0.0, 0.4], 0);
        let h = PseudoMetricMatrix::from_rows_unlabeled(vec![
            vec![0.0, 0.1, 0.5],
            vec![0.1, 0.0, 0.4],
            vec![0.5, 0.4, 0.0],
        ])
        .unwrap();
        let rep = check_admissible(&h, &x, &y, 0.3).unwrap();
        assert_eq!(rep.violations, vec![AdmissibleViolation::BallAroundY { point: 2, gap: 0.5 }]);
    }

    #[test]
    fn pgh_upper_examples() {
        let x = pointed(&[0.0, 1.0, 2.0, 3.0], 0);
        let c = check_rough_isometry(&identity(4), &x, &x, Radius::Infinite, 0.1).unwrap();
        assert_eq!(pgh_upper(&c).unwrap(), 0.2);
        let c = check_rough_isometry(&identity(4), &x, &x, Radius::Finite(2.0), 0.1).unwrap();
        assert_eq!(pgh_upper(&c).unwrap(), 0.5);
        assert!((admissible_threshold(Radius::Finite(2.0), 0.1) - 1.0 / 1.9).abs() < 1e-15);
        let c = check_rough_isometry(&identity(4), &x, &x, Radius::Infinite, 1e-9).unwrap();
        assert!(pgh_upper(&c).unwrap() <= 2e-9);
    }

    #[test]
    fn single_factor_product_is_the_factor() {
        let src = pointed(&[0.0, 1.0, 2.0], 0);
        let tgt = pointed(&[0.0, 1.05, 2.1], 0);
        let f = FactorMap { source: src, target: tgt, map: vec![0, 1, 2] };
        let g = product_rough_isometry(&[f], 0.11).unwrap();
        assert!(g.cert.verdict);
        assert_eq!(g.cert.eps, 0.11);
        assert!((g.cert.distortion - 0.1).abs() < 1e-12);
    }

    #[test]
    fn identity_products() {
        let a = pointed(&[0.0, 1.0], 0);
        let b = pointed(&[0.0, 0.5, 2.0], 1);
        let fa = FactorMap { source: a.clone(), target: a, map: vec![0, 1] };
        let fb = FactorMap { source: b.clone(), target: b, map: vec![0, 1, 2] };
        let g = product_rough_isometry(&[fa, fb], 1e-6).unwrap();
        assert!(g.cert.verdict);
        assert_eq!(g.cert.distortion, 0.0);
        assert_eq!(g.source.base, 1);
        assert_eq!(g.cert.eps, 2f64.sqrt() * 1e-6);
    }

    #[test]
    fn product_requires_certified_factors() {
        let a = pointed(&[0.0, 1.0], 0);
        let b = pointed(&[0.0, 2.0], 0);
        let f = FactorMap { source: a, target: b, map: vec![0, 1] };
        assert_eq!(product_rough_isometry(&[f], 0.5), Err(Error::Uncertified));
    }

    #[test]
    fn projection_with_singletons_is_isometry() {
        let full = pointed(&[0.0, 1.0, 2.0], 0);
        let single = pointed(&[0.0], 0);
        let p = projection_rough_isometry(&[full.clone(), single], 0, &full, &[0, 1, 2], Radius::Infinite, 0.1).unwrap();
        assert!(p.premise);
        assert!(p.map.cert.verdict);
        assert_eq!(p.map.cert.distortion, 0.0);
    }

    #[test]
    fn projection_with_small_second_factor() {
        // n = 1: the second factor has radius ε, so slack 2ε certifies.
        let full = pointed(&[0.0, 1.0, 2.0], 0);
        let small = pointed(&[0.0, 0.1], 0);
        let p = projection_rough_isometry(&[full.clone(), small], 0, &full, &[0, 1, 2], Radius::Finite(5.0), 0.1).unwrap();
        assert!(p.premise);
        assert!(p.map.cert.verdict, "{:?}", p.map.cert.violations);
        assert!(p.map.cert.distortion <= 0.1 + 1e-12);
    }

    #[test]
    fn projection_premise_violated() {
        let full = pointed(&[0.0, 1.0, 2.0], 0);
        let big = pointed(&[0.0, 0.3], 0);
        let p = projection_rough_isometry(&[full.clone(), big], 0, &full, &[0, 1, 2], Radius::Infinite, 0.1).unwrap();
        assert!(!p.premise);
        assert!(!p.map.cert.verdict);
        assert!(matches!(p.map.cert.violations[0], RoughViolation::Distortion { .. }));
    }

    #[test]
    fn sigma_level_sets() {
        let f = Family::new(FamilyConfig::default()).unwrap();
        assert_eq!(sigma(&f, 0, [0.0, 0.0]), Radius::Infinite);
        assert_eq!(sigma(&f, 0, [1.0, 1.0]), Radius::Finite(0.0));
        // ζ₀ = 1/2 at the midpoint between the anchors.
        let Radius::Finite(v) = sigma(&f, 0, [0.5, 0.5]) else { panic!() };
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ball_products_at_anchors() {
        let f = Family::new(FamilyConfig::default()).unwrap();
        // At v₀ the first factor is all of X₀ and the second a singleton.
        let p = ball_product(&f, [0.0, 0.0]).unwrap();
        assert_eq!(p.len(), 3);
        let p = ball_product(&f, [0.5, 0.5]).unwrap();
        // σ = 1: B(a₀, 1) in the 3-point path has 2 points, B(b₀, 1) in the step-½ path has 3.
        assert_eq!(p.len(), 6);
    }
}
