//! Two-dimensional rate-region polygons.
//!
//! Every bound produced by the evaluators has the form `a R1 + b R2 <= rhs`
//! with `(a, b)` drawn from five fixed shapes, so the feasible set is a
//! convex polygon cut from the nonnegative quadrant by at most five lines.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Geometric tolerance in bits.
pub const GEOM_TOL: f64 = 1e-9;

/// The coefficient pairs `(a, b)` a bound may carry.
pub const SHAPES: [(u8, u8); 5] = [(1, 0), (0, 1), (1, 1), (2, 1), (1, 2)];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("coefficients ({0}, {1}) are not one of the supported bound shapes")]
    UnsupportedShape(u8, u8),
    #[error("bound `{0}` has a non-finite right-hand side")]
    NonFinite(String),
    #[error("region is unbounded along {0}")]
    Unbounded(&'static str),
    #[error("weights must be nonnegative and not both zero")]
    BadWeights,
    #[error("cannot take the hull of an empty list of polygons")]
    EmptyHull,
}

/// `a R1 + b R2 <= rhs`, with `rhs` in bits.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateInequality {
    pub a: u8,
    pub b: u8,
    pub rhs: f64,
    pub label: String,
}

impl RateInequality {
    pub fn new(a: u8, b: u8, rhs: f64, label: impl Into<String>) -> Self {
        Self {
            a,
            b,
            rhs,
            label: label.into(),
        }
    }

    pub fn lhs(&self, r1: f64, r2: f64) -> f64 {
        f64::from(self.a) * r1 + f64::from(self.b) * r2
    }

    pub fn holds(&self, r1: f64, r2: f64) -> bool {
        self.lhs(r1, r2) <= self.rhs + GEOM_TOL
    }

    pub fn shape_name(&self) -> String {
        let term = |c: u8, r: &str| match c {
            0 => None,
            1 => Some(r.to_string()),
            c => Some(format!("{c}{r}")),
        };
        [term(self.a, "R1"), term(self.b, "R2")]
            .into_iter()
            .flatten()
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for RateInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<8} <= {:>12.6}  [{}]", self.shape_name(), self.rhs, self.label)
    }
}

/// A conjunction of rate inequalities intersected with `R1, R2 >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRegion2D {
    inequalities: Vec<RateInequality>,
}

impl RateRegion2D {
    pub fn new(inequalities: Vec<RateInequality>) -> Result<Self, GeomError> {
        for ineq in &inequalities {
            if !SHAPES.contains(&(ineq.a, ineq.b)) {
                return Err(GeomError::UnsupportedShape(ineq.a, ineq.b));
            }
            if !ineq.rhs.is_finite() {
                return Err(GeomError::NonFinite(ineq.label.clone()));
            }
        }
        if !inequalities.iter().any(|i| i.a > 0) {
            return Err(GeomError::Unbounded("R1"));
        }
        if !inequalities.iter().any(|i| i.b > 0) {
            return Err(GeomError::Unbounded("R2"));
        }
        Ok(Self { inequalities })
    }

    pub fn inequalities(&self) -> &[RateInequality] {
        &self.inequalities
    }

    /// The tightest right-hand side for each shape present.
    pub fn reduced(&self) -> Vec<(u8, u8, f64)> {
        SHAPES
            .iter()
            .filter_map(|&(a, b)| {
                self.inequalities
                    .iter()
                    .filter(|i| (i.a, i.b) == (a, b))
                    .map(|i| i.rhs)
                    .reduce(f64::min)
                    .map(|rhs| (a, b, rhs))
            })
            .collect()
    }

    /// True when the point satisfies every bound and nonnegativity within [`GEOM_TOL`].
    pub fn contains(&self, r1: f64, r2: f64) -> bool {
        r1 >= -GEOM_TOL && r2 >= -GEOM_TOL && self.inequalities.iter().all(|i| i.holds(r1, r2))
    }

    /// Feasible polygon, counter-clockwise from the origin.
    ///
    /// All coefficients are nonnegative, so the region is nonempty exactly
    /// when the origin is feasible, i.e. every `rhs >= 0`.
    pub fn frontier(&self) -> Polygon2D {
        let reduced = self.reduced();
        if reduced.iter().any(|&(_, _, rhs)| rhs < -GEOM_TOL) {
            return Polygon2D::empty();
        }
        // Lines a R1 + b R2 = c, including both axes.
        let mut lines: Vec<(f64, f64, f64)> = vec![(1.0, 0.0, 0.0), (0.0, 1.0, 0.0)];
        lines.extend(
            reduced
                .iter()
                .map(|&(a, b, rhs)| (f64::from(a), f64::from(b), rhs.max(0.0))),
        );
        let feasible = |x: f64, y: f64| {
            x >= -GEOM_TOL
                && y >= -GEOM_TOL
                && reduced
                    .iter()
                    .all(|&(a, b, rhs)| f64::from(a) * x + f64::from(b) * y <= rhs.max(0.0) + GEOM_TOL)
        };
        let mut points = Vec::new();
        for (i, &(a1, b1, c1)) in lines.iter().enumerate() {
            for &(a2, b2, c2) in &lines[i + 1..] {
                let det = a1 * b2 - a2 * b1;
                if det.abs() < 1e-15 {
                    continue;
                }
                let x = (c1 * b2 - c2 * b1) / det;
                let y = (a1 * c2 - a2 * c1) / det;
                if feasible(x, y) {
                    points.push((x.max(0.0), y.max(0.0)));
                }
            }
        }
        convex_hull(points)
    }

    /// Maximize `w1 R1 + w2 R2` over the region.
    ///
    /// An empty region yields value 0 at the origin.
    pub fn max_weighted(&self, w1: f64, w2: f64) -> Result<(f64, (f64, f64)), GeomError> {
        max_over_vertices(&self.frontier(), w1, w2)
    }

    /// Every vertex of `self` lies in `other`.
    pub fn is_subset(&self, other: &RateRegion2D) -> bool {
        self.frontier().vertices().iter().all(|&(x, y)| other.contains(x, y))
    }
}

/// Convex polygon with counter-clockwise vertices. Zero vertices means empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polygon2D {
    vertices: Vec<(f64, f64)>,
}

impl Polygon2D {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Convex hull of arbitrary points.
    pub fn from_points(points: Vec<(f64, f64)>) -> Self {
        convex_hull(points)
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn max_weighted(&self, w1: f64, w2: f64) -> Result<(f64, (f64, f64)), GeomError> {
        max_over_vertices(self, w1, w2)
    }

    /// Point-in-polygon test within [`GEOM_TOL`], valid for degenerate hulls too.
    pub fn contains(&self, p: (f64, f64)) -> bool {
        match self.vertices.as_slice() {
            [] => false,
            [v] => dist(*v, p) <= GEOM_TOL,
            [a, b] => dist_to_segment(*a, *b, p) <= GEOM_TOL,
            vs => (0..vs.len()).all(|i| {
                let a = vs[i];
                let b = vs[(i + 1) % vs.len()];
                let len = dist(a, b);
                cross(a, b, p) / len >= -GEOM_TOL
            }),
        }
    }

    pub fn is_within(&self, other: &Polygon2D) -> bool {
        self.vertices.iter().all(|&v| other.contains(v))
    }
}

fn max_over_vertices(poly: &Polygon2D, w1: f64, w2: f64) -> Result<(f64, (f64, f64)), GeomError> {
    if !(w1 >= 0.0 && w2 >= 0.0) || (w1 == 0.0 && w2 == 0.0) {
        return Err(GeomError::BadWeights);
    }
    let mut best = (0.0, (0.0, 0.0));
    for (i, &(x, y)) in poly.vertices.iter().enumerate() {
        let v = w1 * x + w2 * y;
        if i == 0 || v > best.0 {
            best = (v, (x, y));
        }
    }
    Ok(best)
}

/// Time-sharing hull of several polygons.
pub fn hull_union(polygons: &[Polygon2D]) -> Result<Polygon2D, GeomError> {
    if polygons.is_empty() {
        return Err(GeomError::EmptyHull);
    }
    let pooled = polygons.iter().flat_map(|p| p.vertices.iter().copied()).collect();
    Ok(convex_hull(pooled))
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn dist_to_segment(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    dist((a.0 + t * dx, a.1 + t * dy), p)
}

/// Andrew's monotone chain; drops near-duplicate and collinear points.
fn convex_hull(mut points: Vec<(f64, f64)>) -> Polygon2D {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut unique: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for p in points {
        if !unique.iter().any(|&q| dist(p, q) <= GEOM_TOL) {
            unique.push(p);
        }
    }
    if unique.len() <= 2 {
        return Polygon2D { vertices: unique };
    }
    // Sorting puts the lowest point of the leftmost column first, so the
    // origin leads for rate regions.
    let chain = |pts: &mut dyn Iterator<Item = (f64, f64)>| {
        let mut out: Vec<(f64, f64)> = Vec::new();
        for p in pts {
            while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 1e-12 {
                out.pop();
            }
            out.push(p);
        }
        out.pop();
        out
    };
    let mut hull = chain(&mut unique.iter().copied());
    hull.extend(chain(&mut unique.iter().rev().copied()));
    Polygon2D { vertices: hull }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(bounds: &[(u8, u8, f64)]) -> RateRegion2D {
        RateRegion2D::new(
            bounds
                .iter()
                .map(|&(a, b, c)| RateInequality::new(a, b, c, "t"))
                .collect(),
        )
        .unwrap()
    }

    fn square() -> RateRegion2D {
        region(&[(1, 0, 1.0), (0, 1, 1.0)])
    }

    fn pentagon() -> RateRegion2D {
        region(&[(1, 0, 1.0), (0, 1, 1.0), (1, 1, 1.5)])
    }

    #[test]
    fn square_frontier() {
        assert_eq!(
            square().frontier().vertices(),
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        );
    }

    #[test]
    fn pentagon_frontier() {
        let v = pentagon().frontier();
        assert_eq!(
            v.vertices(),
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0)]
        );
    }

    #[test]
    fn infeasible_is_empty() {
        let r = region(&[(1, 0, -0.1), (0, 1, 1.0)]);
        assert!(r.frontier().is_empty());
        assert_eq!(r.max_weighted(1.0, 1.0).unwrap(), (0.0, (0.0, 0.0)));
    }

    #[test]
    fn weighted_maxima() {
        assert_eq!(square().max_weighted(1.0, 1.0).unwrap(), (2.0, (1.0, 1.0)));
        assert!((pentagon().max_weighted(1.0, 1.0).unwrap().0 - 1.5).abs() < 1e-12);
        let r = region(&[(2, 1, 2.0), (1, 0, 1.0), (0, 1, 1.0)]);
        let (v, at) = r.max_weighted(1.0, 1.0).unwrap();
        assert!((v - 1.5).abs() < 1e-12);
        assert!(dist(at, (0.5, 1.0)) < 1e-12);
        assert_eq!(square().max_weighted(0.0, 0.0), Err(GeomError::BadWeights));
    }

    #[test]
    fn containment() {
        assert!(square().contains(0.5, 0.5));
        assert!(!square().contains(-0.1, 0.5));
        assert!(pentagon().is_subset(&square()));
        assert!(!square().is_subset(&pentagon()));
    }

    #[test]
    fn hulls() {
        let p = pentagon().frontier();
        assert_eq!(hull_union(std::slice::from_ref(&p)).unwrap(), p);
        let h = hull_union(&[
            Polygon2D::from_points(vec![(0.0, 0.0), (1.0, 0.0)]),
            Polygon2D::from_points(vec![(0.0, 0.0), (0.0, 1.0)]),
        ])
        .unwrap();
        assert_eq!(h.vertices(), &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        assert_eq!(hull_union(&[]), Err(GeomError::EmptyHull));
    }

    #[test]
    fn degenerate_regions() {
        let point = region(&[(1, 0, 0.0), (0, 1, 0.0)]);
        assert_eq!(point.frontier().vertices(), &[(0.0, 0.0)]);
        let seg = region(&[(1, 0, 1.0), (0, 1, 0.0)]);
        assert_eq!(seg.frontier().vertices(), &[(0.0, 0.0), (1.0, 0.0)]);
        assert!(seg.frontier().contains((0.5, 0.0)));
        assert!(!seg.frontier().contains((0.5, 0.1)));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            RateRegion2D::new(vec![RateInequality::new(2, 2, 1.0, "x")]),
            Err(GeomError::UnsupportedShape(2, 2))
        );
        assert_eq!(
            RateRegion2D::new(vec![RateInequality::new(0, 1, 1.0, "x")]),
            Err(GeomError::Unbounded("R1"))
        );
        assert!(matches!(
            RateRegion2D::new(vec![RateInequality::new(1, 1, f64::NAN, "x")]),
            Err(GeomError::NonFinite(_))
        ));
    }

    #[test]
    fn dominated_and_duplicate_bounds() {
        let base = pentagon().frontier();
        let dup = region(&[(1, 0, 1.0), (0, 1, 1.0), (1, 1, 1.5), (1, 1, 1.5), (1, 0, 3.0)]);
        assert_eq!(dup.frontier(), base);
    }
}
