//! Randomized verification suites.
//!
//! Each suite runs independent seeded trials in parallel and reports them in
//! trial order, so a report depends only on `(suite, trials, seed, max_size)`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constructions::glue;
use crate::error::{Error, Result};
use crate::gh::{gh_exact, gh_lower_diam, gh_upper_greedy, gh_upper_same_labels, EXACT_CAP};
use crate::metric::{FiniteMetricSpace, Radius};
use crate::pointed::{
    admissible_threshold, check_admissible, glue_from_rough_isometry, product_rough_isometry,
    projection_rough_isometry, PointedSpace, CASE_TOL,
};
use crate::random::{
    random_cloud, random_factor_map, random_rough_isometry, random_same_label_pair, random_space, trial_rng,
};
use crate::spider::{build_spider, fingerprint, lipschitz_gap, tau, SpiderParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `‖R[a] − R[b]‖∞ ≤ 2τ(a, b)` on random parameter pairs.
    Lipschitz,
    /// Spider fingerprints recover `(K, a)` and separate nearby parameters.
    Fingerprint,
    /// Symmetry, triangle inequality and bound ordering of the GH solvers.
    GhAxioms,
    /// `gh_exact(d, e) ≤ ½‖d − e‖∞` for two metrics on one label set.
    Perturbation,
    /// Glued metrics from rough isometries are admissible above the bound.
    Lemma41,
    /// Coordinatewise maps of ℓ²-products certify at `√(n+1)·ε`.
    Case1,
    /// Projections of ball products certify at `2√n·ε`.
    Case2,
    /// Wedge gluing keeps both restrictions and sums cross distances.
    GlueRestrict,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lipschitz,
        Suite::Fingerprint,
        Suite::GhAxioms,
        Suite::Perturbation,
        Suite::Lemma41,
        Suite::Case1,
        Suite::Case2,
        Suite::GlueRestrict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lipschitz => "lipschitz",
            Suite::Fingerprint => "fingerprint",
            Suite::GhAxioms => "gh-axioms",
            Suite::Perturbation => "perturbation",
            Suite::Lemma41 => "lemma41",
            Suite::Case1 => "case1",
            Suite::Case2 => "case2",
            Suite::GlueRestrict => "glue-restrict",
        }
    }

    /// Space-size cap used when the caller gives none.
    pub fn default_max_size(self) -> usize {
        match self {
            Suite::Lemma41 => 20,
            Suite::Case1 | Suite::Case2 => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::ALL.iter().map(|suite| suite.name()).collect();
                Error::UnknownSuite(s.to_string(), names.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub trials: usize,
    pub max_size: usize,
    pub passed: usize,
    /// Largest observed value of the suite's checked quantity minus its bound;
    /// non-positive when every trial passes.
    pub worst_margin: f64,
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Result of one trial: the margin (value − bound) and a failure message, if any.
struct Outcome {
    margin: f64,
    failure: Option<String>,
}

impl Outcome {
    fn check(margin: f64, what: impl FnOnce() -> String) -> Self {
        Self { margin, failure: (margin > 0.0).then(what) }
    }

    fn and(self, other: Outcome) -> Outcome {
        Outcome { margin: self.margin.max(other.margin), failure: self.failure.or(other.failure) }
    }
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64, max_size: usize) -> SuiteReport {
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(seed, trial as u64);
            let run = match suite {
                Suite::Lipschitz => lipschitz_trial(&mut rng),
                Suite::Fingerprint => fingerprint_trial(&mut rng),
                Suite::GhAxioms => gh_axioms_trial(&mut rng, trial, max_size),
                Suite::Perturbation => perturbation_trial(&mut rng, max_size),
                Suite::Lemma41 => lemma41_trial(&mut rng, max_size),
                Suite::Case1 => case1_trial(&mut rng, max_size),
                Suite::Case2 => case2_trial(&mut rng, max_size),
                Suite::GlueRestrict => glue_trial(&mut rng, max_size),
            };
            run.unwrap_or_else(|e| Outcome { margin: f64::INFINITY, failure: Some(format!("error: {e}")) })
        })
        .collect();
    let worst_margin = outcomes.iter().map(|o| o.margin).fold(f64::NEG_INFINITY, f64::max);
    let failures: Vec<TrialFailure> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(trial, o)| o.failure.map(|detail| TrialFailure { trial, detail }))
        .collect();
    SuiteReport { suite, seed, trials, max_size, passed: trials - failures.len(), worst_margin, failures }
}

/// Depth and leg grid of the Lipschitz suite.
pub const LIPSCHITZ_DEPTH: usize = 8;
pub const LIPSCHITZ_GRID: usize = 32;
/// Roundoff allowance on `2τ`.
pub const LIPSCHITZ_SLACK: f64 = 1e-12;

fn lipschitz_trial<R: Rng>(rng: &mut R) -> Result<Outcome> {
    let a = SpiderParams::random(LIPSCHITZ_DEPTH, rng);
    let b = SpiderParams::random(LIPSCHITZ_DEPTH, rng);
    let gap = lipschitz_gap(&a, &b, LIPSCHITZ_GRID)?;
    let margin = gap.lhs - gap.rhs - LIPSCHITZ_SLACK;
    Ok(Outcome::check(margin, || format!("uniform distance {} exceeds 2τ = {}", gap.lhs, gap.rhs)))
}

/// Relative error allowed when recovering `(K, a)`.
pub const FINGERPRINT_REL_TOL: f64 = 1e-9;
/// Parameters at `τ ≥ MIN_TAU` must give fingerprints at least `MIN_SEPARATION` apart.
pub const MIN_TAU: f64 = 1e-6;
pub const MIN_SEPARATION: f64 = 1e-7;
const FINGERPRINT_GRID: usize = 8;

fn fingerprint_trial<R: Rng>(rng: &mut R) -> Result<Outcome> {
    let depth = rng.random_range(1..=10);
    let a = SpiderParams::random(depth, rng);
    let k = rng.random_range(0.5..=4.0);
    let spider = build_spider(&a, FINGERPRINT_GRID, k)?;
    let fp = fingerprint(&spider.space)?;
    if fp.a.len() != depth {
        return Ok(Outcome::check(f64::INFINITY, || format!("recovered depth {} instead of {depth}", fp.a.len())));
    }
    let rel = |got: f64, want: f64| (got - want).abs() / want;
    let err = fp.a.iter().zip(a.values()).map(|(&g, &w)| rel(g, w)).fold(rel(fp.scale, k), f64::max);
    let recovery = Outcome::check(err - FINGERPRINT_REL_TOL, || format!("relative recovery error {err:e}"));

    // A neighbor moved by a small amount in one coordinate.
    let i = rng.random_range(0..depth);
    let step = 10f64.powf(rng.random_range(-6.0..-3.0));
    let mut b = a.values().to_vec();
    let (lo, hi) = crate::spider::coordinate_interval(i + 1);
    b[i] = if b[i] + step <= hi { b[i] + step } else { (b[i] - step).max(lo) };
    let b = SpiderParams::new(b)?;
    let t = tau(&a, &b)?;
    let separation = if t >= MIN_TAU {
        let other = fingerprint(&build_spider(&b, FINGERPRINT_GRID, k)?.space)?;
        let sep = fp.separation(&other);
        Outcome::check(MIN_SEPARATION - sep, || format!("τ = {t:e} but fingerprints only {sep:e} apart"))
    } else {
        Outcome { margin: f64::NEG_INFINITY, failure: None }
    };
    Ok(recovery.and(separation))
}

/// Trials that also run the triangle inequality and the one-point identity.
pub const GH_TRIANGLE_TRIALS: usize = 100;
pub const GH_POINT_TRIALS: usize = 50;
pub const GH_TRIANGLE_TOL: f64 = 1e-12;

fn gh_axioms_trial<R: Rng>(rng: &mut R, trial: usize, max_size: usize) -> Result<Outcome> {
    let cap = max_size.min(EXACT_CAP);
    let x = random_space(rng, cap)?;
    let y = random_space(rng, cap)?;
    let xy = gh_exact(&x, &y, cap)?.value;
    let yx = gh_exact(&y, &x, cap)?.value;
    let mut out = Outcome::check(if xy == yx { f64::NEG_INFINITY } else { (xy - yx).abs() }, || {
        format!("gh(X, Y) = {xy} but gh(Y, X) = {yx}")
    });
    let lower = gh_lower_diam(&x, &y);
    let upper = gh_upper_greedy(&x, &y)?.value;
    out = out.and(Outcome::check(lower - xy, || format!("lower bound {lower} above exact {xy}")));
    out = out.and(Outcome::check(xy - upper, || format!("exact {xy} above greedy {upper}")));
    if trial < GH_TRIANGLE_TRIALS {
        let z = random_space(rng, cap)?;
        let xz = gh_exact(&x, &z, cap)?.value;
        let zy = gh_exact(&z, &y, cap)?.value;
        out = out.and(Outcome::check(xy - xz - zy - GH_TRIANGLE_TOL, || {
            format!("gh(X, Y) = {xy} > gh(X, Z) + gh(Z, Y) = {}", xz + zy)
        }));
    }
    if trial < GH_POINT_TRIALS {
        let p = FiniteMetricSpace::point("p");
        let v = gh_exact(&p, &x, cap)?.value;
        let half = x.diameter() / 2.0;
        out = out.and(Outcome::check(if v == half { f64::NEG_INFINITY } else { (v - half).abs() }, || {
            format!("gh(point, X) = {v} but diam/2 = {half}")
        }));
    }
    Ok(out)
}

fn perturbation_trial<R: Rng>(rng: &mut R, max_size: usize) -> Result<Outcome> {
    let n = rng.random_range(1..=max_size.min(EXACT_CAP));
    let (d, e) = random_same_label_pair(rng, n)?;
    let exact = gh_exact(&d, &e, EXACT_CAP)?.value;
    let bound = gh_upper_same_labels(&d, &e)?;
    Ok(Outcome::check(exact - bound, || format!("gh = {exact} above half the uniform distance {bound}")))
}

/// Extra margin above `max{2ε, 1/(R − ε)}` at which admissibility is tested.
pub const ADMISSIBLE_MARGIN: f64 = 1e-9;

fn lemma41_trial<R: Rng>(rng: &mut R, max_size: usize) -> Result<Outcome> {
    let r = random_rough_isometry(rng, max_size)?;
    let h = glue_from_rough_isometry(&r.cert, &r.source, &r.target)?;
    let bound = admissible_threshold(r.cert.radius, r.cert.eps);
    let mut out = Outcome { margin: f64::NEG_INFINITY, failure: None };
    for t in [bound + ADMISSIBLE_MARGIN, bound * rng.random_range(1.0..2.0) + ADMISSIBLE_MARGIN] {
        let rep = check_admissible(&h, &r.source, &r.target, t)?;
        out = out.and(Outcome::check(if rep.verdict { -ADMISSIBLE_MARGIN } else { 1.0 }, || {
            let clauses: Vec<&str> = rep.violations.iter().map(|v| v.clause()).collect();
            format!("not admissible at t = {t}: {}", clauses.join(", "))
        }));
    }
    Ok(out)
}

fn case1_trial<R: Rng>(rng: &mut R, max_size: usize) -> Result<Outcome> {
    let factors = rng.random_range(1..=3);
    let eps = rng.random_range(0.01..0.3);
    let maps = (0..factors).map(|_| random_factor_map(rng, max_size, eps)).collect::<Result<Vec<_>>>()?;
    let g = product_rough_isometry(&maps, eps)?;
    let slack = g.cert.eps;
    Ok(Outcome::check(g.cert.distortion - slack - CASE_TOL, || {
        format!("product distortion {} above √{factors}·ε = {slack}", g.cert.distortion)
    })
    .and(Outcome::check(if g.cert.verdict { f64::NEG_INFINITY } else { 1.0 }, || {
        format!("product map not certified: {:?}", g.cert.violations)
    })))
}

fn case2_trial<R: Rng>(rng: &mut R, max_size: usize) -> Result<Outcome> {
    let factors = rng.random_range(2..=3);
    let i = rng.random_range(0..factors);
    let eps = rng.random_range(0.01..0.3);
    let n = rng.random_range(1..=max_size.max(1));
    let full = PointedSpace::new(random_cloud(rng, n, 2, 3.0)?, 0)?;
    let mut balls = Vec::with_capacity(factors);
    for j in 0..factors {
        if j == i {
            balls.push(full.clone());
        } else {
            let n = rng.random_range(1..=max_size.max(1));
            let x = PointedSpace::new(random_cloud(rng, n, 2, 3.0 * eps)?, 0)?;
            balls.push(x.ball_space(Radius::Finite(eps * rng.random_range(0.0..=1.0)))?);
        }
    }
    let slack = 2.0 * ((factors - 1) as f64).sqrt() * eps;
    let radius = if rng.random_bool(0.5) {
        Radius::Infinite
    } else {
        Radius::Finite(slack + rng.random_range(0.01..5.0))
    };
    let positions: Vec<usize> = (0..full.len()).collect();
    let p = projection_rough_isometry(&balls, i, &full, &positions, radius, eps)?;
    if !p.premise {
        return Ok(Outcome::check(f64::INFINITY, || "premise does not hold".into()));
    }
    Ok(Outcome::check(p.map.cert.distortion - slack - CASE_TOL, || {
        format!("projection distortion {} above 2√n·ε = {slack}", p.map.cert.distortion)
    })
    .and(Outcome::check(if p.map.cert.verdict { f64::NEG_INFINITY } else { 1.0 }, || {
        format!("projection not certified: {:?}", p.map.cert.violations)
    })))
}

fn glue_trial<R: Rng>(rng: &mut R, max_size: usize) -> Result<Outcome> {
    let x = random_space(rng, max_size)?.with_prefix("x");
    let y = random_space(rng, max_size)?.with_prefix("y");
    let px = rng.random_range(0..x.len());
    let py = rng.random_range(0..y.len());
    let z = glue(&x, &y, &x.labels()[px], &y.labels()[py])?;
    let nx = x.len();
    let mut worst = 0.0f64;
    for i in 0..z.len() {
        for j in 0..z.len() {
            // Z lists X first, then Y without its wedge point.
            let side = |k: usize| if k < nx { (true, k) } else { (false, if k - nx < py { k - nx } else { k - nx + 1 }) };
            let want = match (side(i), side(j)) {
                ((true, a), (true, b)) => x.get(a, b),
                ((false, a), (false, b)) => y.get(a, b),
                ((true, a), (false, b)) => x.get(a, px) + y.get(py, b),
                ((false, a), (true, b)) => y.get(a, py) + x.get(px, b),
            };
            worst = worst.max((z.get(i, j) - want).abs());
        }
    }
    Ok(Outcome::check(if worst == 0.0 { f64::NEG_INFINITY } else { worst }, || {
        format!("glued distances deviate by {worst:e}")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(Suite::GhAxioms, 12, 5, 4);
        let b = run_suite(Suite::GhAxioms, 12, 5, 4);
        assert_eq!(a, b);
        assert!(a.ok(), "{:?}", a.failures);
    }

    #[test]
    fn every_suite_passes_small_runs() {
        for s in Suite::ALL {
            let rep = run_suite(s, 8, 11, s.default_max_size());
            assert!(rep.ok(), "{s}: {:?}", rep.failures);
            assert_eq!(rep.passed, 8);
            assert!(rep.worst_margin <= 0.0);
        }
    }
}
