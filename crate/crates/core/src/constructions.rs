//! Metric building blocks: wedge gluing, ℓ²-products, dilation and closed balls.

use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, PseudoMetricMatrix, Radius};

/// Product spaces larger than this are refused.
pub const PRODUCT_CAP: usize = 1 << 16;

/// Wedge sum of two metric spaces, identifying `p_x ∈ X` with `p_y ∈ Y`.
///
/// The result lists X's points first, then Y's points other than `p_y`. The
/// wedge point keeps `p_x`'s label. Cross distances pass through the wedge:
/// `h(x, y) = d(x, p_x) + e(p_y, y)`.
pub fn glue(x: &FiniteMetricSpace, y: &FiniteMetricSpace, p_x: &str, p_y: &str) -> Result<FiniteMetricSpace> {
    let px = x.index_of(p_x)?;
    let py = y.index_of(p_y)?;
    Ok(FiniteMetricSpace::from_trusted(glue_matrices(x, y, px, py)?))
}

/// [`glue`] on pseudo-metrics, by index. Used wherever the pieces may be degenerate.
pub fn glue_matrices(
    d: &PseudoMetricMatrix,
    e: &PseudoMetricMatrix,
    px: usize,
    py: usize,
) -> Result<PseudoMetricMatrix> {
    d.check_index(px)?;
    e.check_index(py)?;
    let nx = d.len();
    let y_keep: Vec<usize> = (0..e.len()).filter(|&j| j != py).collect();
    let n = nx + y_keep.len();
    let mut labels = d.labels().to_vec();
    labels.extend(y_keep.iter().map(|&j| e.labels()[j].clone()));

    let mut data = vec![0.0; n * n];
    for i in 0..nx {
        data[i * n..i * n + nx].copy_from_slice(d.row(i));
    }
    for (a, &ja) in y_keep.iter().enumerate() {
        for (b, &jb) in y_keep.iter().enumerate() {
            data[(nx + a) * n + nx + b] = e.get(ja, jb);
        }
    }
    for i in 0..nx {
        let to_wedge = d.get(i, px);
        for (b, &jb) in y_keep.iter().enumerate() {
            let v = to_wedge + e.get(py, jb);
            data[i * n + nx + b] = v;
            data[(nx + b) * n + i] = v;
        }
    }
    PseudoMetricMatrix::from_flat(labels, data)
}

/// Mixed-radix index helper for products; the first factor varies slowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductShape {
    sizes: Vec<usize>,
}

impl ProductShape {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        let total = sizes.iter().fold(1usize, |acc, &s| acc.saturating_mul(s));
        if total > PRODUCT_CAP {
            return Err(Error::ProductTooLarge { size: total, cap: PRODUCT_CAP });
        }
        if total == 0 {
            return Err(Error::EmptySet);
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &s) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = flat % s;
            flat /= s;
        }
        out
    }

    pub fn flat(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.sizes).fold(0, |acc, (&c, &s)| acc * s + c)
    }
}

/// Label of a product point: `"(a,b,...)"`.
pub fn product_label(parts: &[&str]) -> String {
    format!("({})", parts.join(","))
}

/// Weighted ℓ²-product `sqrt(Σ (wᵢ·dᵢ(xᵢ, yᵢ))²)` of pseudo-metrics.
///
/// Zero weights are allowed and give a pseudo-metric.
pub fn weighted_l2_product(factors: &[&PseudoMetricMatrix], weights: &[f64]) -> Result<PseudoMetricMatrix> {
    if factors.len() != weights.len() {
        return Err(Error::ParamLengthMismatch(factors.len(), weights.len()));
    }
    if factors.is_empty() {
        return Err(Error::EmptySet);
    }
    let shape = ProductShape::new(factors.iter().map(|f| f.len()).collect())?;
    let n = shape.len();
    let coords: Vec<Vec<usize>> = (0..n).map(|k| shape.coords(k)).collect();
    let labels = coords
        .iter()
        .map(|c| {
            let parts: Vec<&str> = c.iter().zip(factors).map(|(&i, f)| f.labels()[i].as_str()).collect();
            product_label(&parts)
        })
        .collect();
    PseudoMetricMatrix::from_fn(labels, |a, b| {
        coords[a]
            .iter()
            .zip(&coords[b])
            .zip(factors.iter().zip(weights))
            .map(|((&i, &j), (f, &w))| {
                let t = w * f.get(i, j);
                t * t
            })
            .sum::<f64>()
            .sqrt()
    })
}

/// ℓ²-product metric `sqrt(d(x,u)² + e(y,v)²)` on `X × Y`.
pub fn l2_product(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    l2_product_many(&[x, y])
}

/// ℓ²-product of any number of factors.
pub fn l2_product_many(factors: &[&FiniteMetricSpace]) -> Result<FiniteMetricSpace> {
    let mats: Vec<&PseudoMetricMatrix> = factors.iter().map(|f| f.as_matrix()).collect();
    let w = vec![1.0; mats.len()];
    Ok(FiniteMetricSpace::from_trusted(weighted_l2_product(&mats, &w)?))
}

/// Dilation `(X, L·d)`.
pub fn scale(factor: f64, x: &FiniteMetricSpace) -> Result<FiniteMetricSpace> {
    if !(factor > 0.0 && factor.is_finite()) {
        return Err(Error::NonPositiveScale(factor));
    }
    Ok(FiniteMetricSpace::from_trusted(x.map_entries(|v| factor * v)))
}

/// Indices of the closed ball `{y : d(center, y) ≤ r}`, in input order.
pub fn ball_indices(x: &PseudoMetricMatrix, center: usize, r: Radius) -> Result<Vec<usize>> {
    x.check_index(center)?;
    Ok(match r {
        // B(x, 0) = {x}, even for pseudo-metrics.
        Radius::Finite(0.0) => vec![center],
        _ => (0..x.len()).filter(|&j| r.contains(x.get(center, j))).collect(),
    })
}

/// Induced subspace on the closed ball around `center`.
pub fn ball_restrict(x: &FiniteMetricSpace, center: &str, r: Radius) -> Result<FiniteMetricSpace> {
    let c = x.index_of(center)?;
    x.subspace(&ball_indices(x, c, r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{uniform_distance, validate_with_tol, TRIANGLE_TOL};

    fn path(prefix: &str, n: usize) -> FiniteMetricSpace {
        let labels = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let m = PseudoMetricMatrix::from_fn(labels, |i, j| (i as f64 - j as f64).abs()).unwrap();
        FiniteMetricSpace::from_computed(m).unwrap()
    }

    fn space(labels: &[&str], rows: Vec<Vec<f64>>) -> FiniteMetricSpace {
        FiniteMetricSpace::new(labels.iter().map(|s| s.to_string()).collect(), rows).unwrap()
    }

    #[test]
    fn glue_cross_distance_sums_through_wedge() {
        let x = space(&["p", "x"], vec![vec![0., 1.], vec![1., 0.]]);
        let y = space(&["q", "y"], vec![vec![0., 2.], vec![2., 0.]]);
        let h = glue(&x, &y, "p", "q").unwrap();
        assert_eq!(h.labels(), &["p", "x", "y"]);
        assert_eq!(h.get(h.index_of("x").unwrap(), h.index_of("y").unwrap()), 3.0);
    }

    #[test]
    fn glue_with_point_is_identity() {
        let x = path("a", 4);
        let h = glue(&x, &FiniteMetricSpace::point("o"), "a2", "o").unwrap();
        assert_eq!(h, x);
    }

    #[test]
    fn glue_two_paths_is_longer_path() {
        let x = path("a", 3);
        let y = path("b", 3);
        let h = glue(&x, &y, "a2", "b0").unwrap();
        // Order a0 a1 a2 b1 b2 sits at positions 0..5 on a line.
        let expected = path("", 5);
        assert_eq!(h.data(), expected.data());
        assert_eq!(h.labels(), &["a0", "a1", "a2", "b1", "b2"]);
    }

    #[test]
    fn glue_restrictions_are_exact() {
        let x = path("a", 4);
        let y = scale(0.3, &path("b", 3)).unwrap();
        let h = glue(&x, &y, "a1", "b2").unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h.get(i, j), x.get(i, j));
            }
        }
        // Y's wedge point sits at X's index 1; the rest follow X.
        let ymap = [4, 5, 1];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.get(ymap[i], ymap[j]), y.get(i, j));
            }
        }
        assert!(validate_with_tol(&h, true, TRIANGLE_TOL).is_valid());
    }

    #[test]
    fn glue_errors() {
        let x = path("a", 2);
        assert_eq!(glue(&x, &path("b", 2), "zz", "b0"), Err(Error::UnknownLabel("zz".into())));
        assert!(matches!(glue(&x, &path("a", 3), "a0", "a0"), Err(Error::DuplicateLabel(_))));
    }

    #[test]
    fn product_of_unit_segments() {
        let s = space(&["0", "1"], vec![vec![0., 1.], vec![1., 0.]]);
        let p = l2_product(&s, &s).unwrap();
        assert_eq!(p.labels(), &["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        let sq2 = 2f64.sqrt();
        assert_eq!(
            p.rows(),
            vec![
                vec![0., 1., 1., sq2],
                vec![1., 0., sq2, 1.],
                vec![1., sq2, 0., 1.],
                vec![sq2, 1., 1., 0.],
            ]
        );
    }

    #[test]
    fn product_three_four_five() {
        let x = space(&["x", "u"], vec![vec![0., 3.], vec![3., 0.]]);
        let y = space(&["y", "v"], vec![vec![0., 4.], vec![4., 0.]]);
        let p = l2_product(&x, &y).unwrap();
        assert_eq!(p.get(p.index_of("(x,y)").unwrap(), p.index_of("(u,v)").unwrap()), 5.0);
    }

    #[test]
    fn product_with_point_copies_factor() {
        let x = path("a", 4);
        let p = l2_product(&x, &FiniteMetricSpace::point("o")).unwrap();
        assert_eq!(p.data(), x.data());
    }

    #[test]
    fn zero_weight_product_is_pseudo_metric() {
        let x = path("a", 2);
        let y = path("b", 3);
        let e = weighted_l2_product(&[&x, &y], &[1.0, 0.0]).unwrap();
        // Points sharing the first coordinate collapse.
        assert_eq!(e.get(0, 1), 0.0);
        assert_eq!(e.get(0, 3), 1.0);
        assert!(validate_with_tol(&e, false, TRIANGLE_TOL).is_valid());
    }

    #[test]
    fn product_shape_round_trip() {
        let s = ProductShape::new(vec![3, 1, 4]).unwrap();
        for k in 0..s.len() {
            assert_eq!(s.flat(&s.coords(k)), k);
        }
        assert_eq!(s.coords(5), vec![1, 0, 1]);
        assert!(ProductShape::new(vec![1 << 10, 1 << 10]).is_err());
    }

    #[test]
    fn scale_examples() {
        let s = space(&["a", "b"], vec![vec![0., 1.], vec![1., 0.]]);
        assert_eq!(scale(1.0, &s).unwrap(), s);
        assert_eq!(scale(2.0, &s).unwrap().rows(), vec![vec![0., 2.], vec![2., 0.]]);
        assert_eq!(scale(0.0, &s), Err(Error::NonPositiveScale(0.0)));
        assert!(scale(-1.0, &s).is_err());
    }

    #[test]
    fn scale_round_trip_within_an_ulp() {
        let x = path("a", 6);
        let x = scale(std::f64::consts::E, &x).unwrap();
        for l in [3.0, 7.0, 0.1, 1e-3] {
            let back = scale(l, &scale(1.0 / l, &x).unwrap()).unwrap();
            for (a, b) in back.data().iter().zip(x.data()) {
                assert!((a - b).abs() <= f64::EPSILON * b.abs() * 2.0, "{a} vs {b}");
            }
            assert!(uniform_distance(&back, &x).unwrap() <= 1e-14);
        }
    }

    #[test]
    fn ball_examples() {
        let x = path("p", 3);
        assert_eq!(ball_restrict(&x, "p0", Radius::Finite(0.0)).unwrap().len(), 1);
        assert_eq!(ball_restrict(&x, "p0", Radius::Infinite).unwrap(), x);
        let b = ball_restrict(&x, "p0", Radius::Finite(1.0)).unwrap();
        assert_eq!(b.labels(), &["p0", "p1"]);
        assert!(ball_restrict(&x, "q", Radius::Infinite).is_err());
    }

    #[test]
    fn ball_is_monotone_in_radius() {
        let x = scale(0.37, &path("p", 9)).unwrap();
        let radii = [0.0, 0.2, 0.37, 0.5, 1.0, 2.0, 5.0];
        for c in 0..x.len() {
            for w in radii.windows(2) {
                let small = ball_indices(&x, c, Radius::Finite(w[0])).unwrap();
                let big = ball_indices(&x, c, Radius::Finite(w[1])).unwrap();
                assert!(small.iter().all(|i| big.contains(i)));
            }
        }
    }
}
