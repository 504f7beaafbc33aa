//! Seeded generators for test spaces and rough isometries.
//!
//! Every trial draws from its own ChaCha stream, so a `(seed, trial)` pair
//! reproduces a case regardless of how trials are scheduled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PseudoMetricMatrix, Radius};
use crate::pointed::{check_rough_isometry, floyd_warshall, FactorMap, PointedSpace, RoughIsometry};

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn euclidean(prefix: &str, pts: &[Vec<f64>]) -> Result<FiniteMetricSpace> {
    let m = PseudoMetricMatrix::from_fn(labels(prefix, pts.len()), |i, j| {
        pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    })?;
    FiniteMetricSpace::from_computed(m)
}

fn cloud_points<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, spread: f64) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..dim).map(|_| rng.random_range(0.0..spread)).collect()).collect()
}

/// `n` uniform points of `[0, spread)^dim` with the Euclidean metric.
pub fn random_cloud<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, spread: f64) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    euclidean("q", &cloud_points(rng, n, dim, spread))
}

/// Shortest-path metric of a random connected graph with edge weights in `[0.1, 1]`.
pub fn random_graph_metric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<FiniteMetricSpace> {
    if n == 0 {
        return Err(Error::EmptySet);
    }
    let mut h = vec![f64::INFINITY; n * n];
    for i in 0..n {
        h[i * n + i] = 0.0;
    }
    let set = |h: &mut Vec<f64>, i: usize, j: usize, w: f64| {
        h[i * n + j] = w;
        h[j * n + i] = w;
    };
    // A random spanning tree keeps the graph connected; extra edges add cycles.
    for i in 1..n {
        let parent = rng.random_range(0..i);
        let w = rng.random_range(0.1..=1.0);
        set(&mut h, i, parent, w);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if h[i * n + j].is_infinite() && rng.random_bool(0.3) {
                let w = rng.random_range(0.1..=1.0);
                set(&mut h, i, j, w);
            }
        }
    }
    floyd_warshall(&mut h, n);
    FiniteMetricSpace::from_computed(PseudoMetricMatrix::from_flat(labels("g", n), h)?)
}

/// A space of `1..=max_size` points, either a planar cloud or a graph metric.
pub fn random_space<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> Result<FiniteMetricSpace> {
    if max_size == 0 {
        return Err(Error::EmptySet);
    }
    let n = rng.random_range(1..=max_size);
    if rng.random_bool(0.5) {
        random_cloud(rng, n, 2, 2.0)
    } else {
        random_graph_metric(rng, n)
    }
}

/// Two metrics on the same `n` labels.
pub fn random_same_label_pair<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<(FiniteMetricSpace, FiniteMetricSpace)> {
    let d = random_space_of_size(rng, n)?;
    let e = random_space_of_size(rng, n)?.relabel(d.labels().to_vec())?;
    Ok((d, e))
}

fn random_space_of_size<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<FiniteMetricSpace> {
    if rng.random_bool(0.5) {
        random_cloud(rng, n, 2, 2.0)
    } else {
        random_graph_metric(rng, n)
    }
}

/// Source cloud, a jittered copy with extra nearby points, and the copy map.
///
/// Points move by less than `ε/3`, so the copy map distorts by less than `ε`
/// and every extra point is within `ε` of the image; the `ε/3` margin also keeps
/// the coverage condition intact when the domain is a finite ball.
fn jittered_copy<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    extra: usize,
    eps: f64,
) -> Result<(PointedSpace, PointedSpace, Vec<usize>)> {
    let dim = 2;
    let src = cloud_points(rng, n, dim, 3.0);
    let delta = eps / 3.0 * 0.99;
    let nudge = |rng: &mut R, p: &[f64]| -> Vec<f64> {
        let r = delta * rng.random_range(0.0..1.0);
        let theta = rng.random_range(0.0..std::f64::consts::TAU);
        vec![p[0] + r * theta.cos(), p[1] + r * theta.sin()]
    };
    let mut tgt: Vec<Vec<f64>> = src.iter().map(|p| nudge(rng, p)).collect();
    for _ in 0..extra {
        let k = rng.random_range(0..n);
        let p = nudge(rng, &tgt[k]);
        tgt.push(p);
    }
    // Shuffle the target so the map is not the identity on indices.
    let mut order: Vec<usize> = (0..tgt.len()).collect();
    order.shuffle(rng);
    let mut position = vec![0; tgt.len()];
    for (new, &old) in order.iter().enumerate() {
        position[old] = new;
    }
    let shuffled: Vec<Vec<f64>> = order.iter().map(|&old| tgt[old].clone()).collect();
    let map: Vec<usize> = (0..n).map(|i| position[i]).collect();
    let x = PointedSpace::new(euclidean("x", &src)?, 0)?;
    let y = PointedSpace::new(euclidean("y", &shuffled)?, map[0])?;
    Ok((x, y, map))
}

/// A certified `(R, ε)`-rough isometry between spaces of at most `max_size` points.
///
/// `R` is infinite a third of the time. Points outside `B(a, R)` stay off the map.
pub fn random_rough_isometry<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> Result<RoughIsometry> {
    if max_size < 2 {
        return Err(Error::InvalidParams("rough isometries need room for two points".into()));
    }
    let n = rng.random_range(1..=max_size / 2);
    let extra = rng.random_range(0..=(max_size - n).min(n));
    let eps = rng.random_range(0.01..0.3);
    let (x, y, map) = jittered_copy(rng, n, extra, eps)?;
    let radius = if rng.random_bool(1.0 / 3.0) {
        Radius::Infinite
    } else {
        Radius::Finite(rng.random_range(eps + 0.05..x.space.diameter() + eps + 1.0))
    };
    let domain = x.ball(radius);
    let partial: Vec<Option<usize>> =
        (0..n).map(|i| if domain.contains(&i) { Some(map[i]) } else { None }).collect();
    let cert = check_rough_isometry(&partial, &x, &y, radius, eps)?;
    if !cert.verdict {
        return Err(Error::Uncertified);
    }
    Ok(RoughIsometry { source: x, target: y, cert })
}

/// A factor map that is an `(∞, ε)`-rough isometry onto a jittered copy.
pub fn random_factor_map<R: Rng + ?Sized>(rng: &mut R, max_size: usize, eps: f64) -> Result<FactorMap> {
    let n = rng.random_range(1..=max_size.max(1));
    let extra = rng.random_range(0..=1usize);
    let (source, target, map) = jittered_copy(rng, n, extra, eps)?;
    Ok(FactorMap { source, target, map })
}
